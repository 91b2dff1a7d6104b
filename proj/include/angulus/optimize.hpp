#pragma once

// Derivative-free minimizers used by the angular value search.

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace angulus {

struct Minimum1d {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Bounded scalar minimization on [a, b] by golden section search with
/// parabolic interpolation (Brent). Converges to a local minimizer to
/// within `tol`.
Minimum1d minimize_1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-6);

struct SimplexOptions {
  double initial_step = 0.25;
  double tol = 1e-6;  // stop when the simplex diameter drops below this
  int max_iterations = 500;
  std::optional<double> period;  // report coordinates modulo this period
};

struct Minimum2d {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Nelder-Mead simplex descent in the plane.
Minimum2d minimize_simplex(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& x0,
                           const SimplexOptions& options = {});

}  // namespace angulus
