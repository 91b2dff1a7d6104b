#include "angulus/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "angulus/error.hpp"

namespace angulus {

Minimum1d minimize_1d(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a < b)) {
    throw Error(ErrorCode::InvalidArgument, "minimize_1d needs a < b");
  }
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  Minimum1d out;
  double x = a + golden * (b - a);
  double w = x;
  double v = x;
  double fx = f(x);
  ++out.evaluations;
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  for (int iter = 0; iter < 500; ++iter) {
    const double mid = 0.5 * (a + b);
    const double tol1 = sqrt_eps * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) break;

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // Parabola through (v, fv), (w, fw), (x, fx).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = x < mid ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < mid) ? b - x : a - x;
      d = golden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = f(u);
    ++out.evaluations;

    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  out.x = x;
  out.value = fx;
  return out;
}

Minimum2d minimize_simplex(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& x0,
                           const SimplexOptions& options) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  Minimum2d out;
  std::array<Eigen::Vector2d, 3> pts = {x0, x0 + Eigen::Vector2d(options.initial_step, 0.0),
                                        x0 + Eigen::Vector2d(0.0, options.initial_step)};
  std::array<double, 3> vals{};
  auto eval = [&](const Eigen::Vector2d& p) {
    ++out.evaluations;
    return f(p);
  };
  for (int i = 0; i < 3; ++i) vals[i] = eval(pts[i]);

  std::array<int, 3> idx{0, 1, 2};
  auto diameter = [&] {
    return std::max({(pts[0] - pts[1]).norm(), (pts[0] - pts[2]).norm(), (pts[1] - pts[2]).norm()});
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    if (diameter() < options.tol) break;
    const int best = idx[0];
    const int second = idx[1];
    const int worst = idx[2];
    const Eigen::Vector2d centroid = 0.5 * (pts[best] + pts[second]);

    const Eigen::Vector2d reflected = centroid + kReflect * (centroid - pts[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < vals[best]) {
      const Eigen::Vector2d expanded = centroid + kExpand * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        pts[worst] = expanded;
        vals[worst] = f_expanded;
      } else {
        pts[worst] = reflected;
        vals[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < vals[worst];
    const Eigen::Vector2d contracted = outside ? Eigen::Vector2d(centroid + kContract * (reflected - centroid))
                                               : Eigen::Vector2d(centroid + kContract * (pts[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = f_contracted;
      continue;
    }
    for (int i : {second, worst}) {
      pts[i] = pts[best] + kShrink * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  out.x = pts[best];
  out.value = vals[best];
  out.iterations = iter;
  if (options.period) {
    const double p = *options.period;
    out.x = out.x.unaryExpr([p](double c) {
      const double r = std::fmod(c, p);
      return r < 0.0 ? r + p : r;
    });
  }
  return out;
}

}  // namespace angulus
