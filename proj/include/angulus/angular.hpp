#pragma once

// Outer angular values theta_1 and theta_2 estimated over trace spaces
// built from the spectral bundles.

#include <string>
#include <utility>
#include <vector>

#include "angulus/bundles.hpp"
#include "angulus/linalg.hpp"

namespace angulus {

/// A subspace W_i of the fiber W_k^i for a given (0-based) interval i.
struct TraceComponent {
  int interval = 0;
  Subspace subspace;
};

/// Direct sum of fiber subspaces at base time k; intervals strictly increasing.
struct TraceSpace {
  long k = 0;
  std::vector<TraceComponent> components;

  int dim() const;
  Subspace span() const;
};

/// theta_s(V) = (1/n) sum_{j=k+1}^{k+n} angle(Phi(j-1,k) V, Phi(j,k) V).
///
/// Each component is pushed forward by A_{j-1}, the angle between the old
/// and new s-frames is accumulated, and only then is every component
/// projected back onto its stored fiber at time j.
double angle_sum(const SampledSystem& system, const std::vector<FiberBundle>& bundles, const TraceSpace& V,
                 long k, long n);

/// Same average for an arbitrary subspace, by plain forward iteration with
/// re-orthonormalization and no fiber projection.
double forward_angle_sum(const SampledSystem& system, const Subspace& V, long k, long n);

struct Candidate {
  std::string label;
  double value = 0.0;
  std::vector<double> params;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct AngularValueReport {
  int s = 1;
  long k = 0;
  long n = 0;
  std::vector<Candidate> candidates;
  double theta_hat = 0.0;

  friend bool operator==(const AngularValueReport&, const AngularValueReport&) = default;
};

struct SearchOptions {
  int starts_1d = 8;  // equal sub-brackets of [0, pi)
  int grid_2d = 4;    // grid_2d x grid_2d simplex starts
  double tol = 1e-6;
  unsigned threads = 1;
};

/// For every fiber: the line itself (dim 1) or the best unit vector of the
/// plane found by bounded 1-D search (dim 2). theta_hat is the maximum.
AngularValueReport theta1_hat(const SampledSystem& system, const std::vector<FiberBundle>& bundles, long k, long n,
                              const SearchOptions& options = {});

/// Candidates are every 2-D fiber alone and every pair of fibers, searched
/// over the unit circles of 2-D members (0, 1 or 2 parameters).
AngularValueReport theta2_hat(const SampledSystem& system, const std::vector<FiberBundle>& bundles, long k, long n,
                              const SearchOptions& options = {});

/// Thresholds for deciding intersection dimensions: sines of principal
/// angles below `exact` count as shared directions, above `distinct` as
/// transversal; anything in between is reported as ambiguous.
struct IntersectionTolerance {
  double exact = 1e-10;
  double distinct = 1e-6;
};

/// Orthonormal basis (possibly with zero columns) of span(u) cap span(w).
Matrix subspace_intersection(const Matrix& u, const Matrix& w, const IntersectionTolerance& tol = {});

/// Trace space T_k(V) by the recursion V_{i+1} = P^u_{i+1} V_i (+) (range P^s_{i+1} cap V_i)
/// with oblique projectors taken from the fiber splitting at time k.
TraceSpace trace_space_of(const Subspace& V, const std::vector<Subspace>& fibers, long k = 0,
                          const IntersectionTolerance& tol = {});

/// The same trace space from the closed form (+)_i P^u_{i+1}(range P^s_i cap V).
TraceSpace trace_space_direct(const Subspace& V, const std::vector<Subspace>& fibers, long k = 0,
                              const IntersectionTolerance& tol = {});

/// Angles angle(Phi(j,k) V, Phi(j,k) T_k(V)) for j = k..k+j_max.
std::vector<std::pair<long, double>> reduction_decay_check(const SampledSystem& system, const Subspace& V,
                                                           const std::vector<Subspace>& fibers, long k, long j_max);

/// Fibers of every bundle at time k, in interval order.
std::vector<Subspace> fibers_at(const std::vector<FiberBundle>& bundles, long k);

}  // namespace angulus
