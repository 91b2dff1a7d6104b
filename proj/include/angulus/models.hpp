#pragma once

// Catalog of linear nonautonomous systems u_{n+1} = A_n u_n.
//
// A model is a random-access generator n -> A_n. Models derived from a
// nonlinear map carry the trajectory they were linearized along.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "angulus/linalg.hpp"

namespace angulus {

using Params = std::map<std::string, double>;

/// Orbit x_0..x_M of a nonlinear map together with the map's identifier.
struct Trajectory {
  std::string origin_map;
  std::vector<Vector> points;
};

struct SystemModel {
  std::string name;
  int dim = 0;
  Params params;
  std::optional<std::uint64_t> seed;
  std::function<Matrix(long)> generator;
  std::shared_ptr<const Trajectory> trajectory;

  Matrix operator()(long n) const { return generator(n); }
};

/// Returns a copy of `model` with every A_n replaced by c * A_n.
SystemModel scaled(const SystemModel& model, double c);

/// Rotation matrix T_phi in the plane.
Matrix rotation2(double phi);

/// Entry in the model catalog: name, required and defaulted parameter keys.
struct CatalogEntry {
  std::string name;
  int dim;
  std::vector<std::string> required;
  Params defaults;
  std::string description;
};

const std::vector<CatalogEntry>& catalog();

/// Default number of matrices precomputed for trajectory-based models.
inline constexpr long kDefaultTrajectoryLength = 10000;

/// Builds a catalog model. Unknown names throw UnknownModel, absent required
/// parameters throw MissingParam. Trajectory-based models accept an
/// optional "length" parameter bounding the admissible n.
SystemModel catalog_get(const std::string& name, const Params& params = {},
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Variational equation A_n = DF(xi_n) along the orbit of `map_name` from x0.
/// `map_name` is one of henon2, henon3, oscillators_flow (needs "lambda").
/// Throws Diverged if the orbit leaves the ball of radius 1e6.
std::pair<SystemModel, Trajectory> variational_sequence(const std::string& map_name, const Vector& x0,
                                                        long length, const Params& params = {});

/// Image of one nonlinear map step and its Jacobian at x.
struct MapStep {
  Vector image;
  Matrix jacobian;
};

MapStep henon2_step(const Vector& x);
MapStep henon3_step(const Vector& x);

/// Vector field of the coupled oscillator ODE (p1 = 0.1, p2 = 0.55).
Vector oscillator_field(const Vector& x, double lambda);
Matrix oscillator_field_jacobian(const Vector& x, double lambda);

/// Time-1 map of the oscillator ODE by 100 explicit Euler steps of size 0.01,
/// with the Jacobian accumulated along the Euler polygon.
MapStep euler_one_flow(const Vector& x, double lambda);

/// Counter-based uniform bit for the random model, keyed by (seed, n).
bool random_choice(std::uint64_t seed, long n);

}  // namespace angulus
