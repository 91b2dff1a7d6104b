#include "angulus/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "angulus/parallel.hpp"

namespace angulus {

namespace {

constexpr double kFiberRankThreshold = 1e-8;

std::vector<Vector> draw_impulses(int d, int count, std::uint64_t seed, int interval, int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(interval), static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::vector<Vector> out;
  for (int nu = 0; nu < count; ++nu) {
    Vector r(d);
    for (int c = 0; c < d; ++c) r(c) = normal(rng);
    out.push_back(r.normalized());
  }
  return out;
}

}  // namespace

SampledSystem::SampledSystem(const SystemModel& model, long first, long last) : dim_(model.dim), first_(first) {
  if (last < first) {
    throw Error(ErrorCode::InvalidArgument, "empty sampling range");
  }
  mats_.reserve(static_cast<std::size_t>(last - first));
  for (long n = first; n < last; ++n) mats_.push_back(model(n));
}

const Matrix& SampledSystem::operator()(long n) const {
  if (n < first_ || n >= last()) {
    throw Error(ErrorCode::InvalidArgument, "A_" + std::to_string(n) + " outside the sampled range");
  }
  return mats_[static_cast<std::size_t>(n - first_)];
}

ResolventPoints choose_resolvent_points(const SpectrumReport& report) {
  const auto& iv = report.intervals;
  if (iv.empty()) {
    throw Error(ErrorCode::InvalidArgument, "spectrum has no intervals");
  }
  ResolventPoints pts;
  pts.gamma.push_back(2.0 * iv.front().upper);
  for (std::size_t i = 1; i < iv.size(); ++i) {
    pts.gamma.push_back(std::sqrt(iv[i].upper * iv[i - 1].lower));
  }
  pts.gamma.push_back(iv.back().lower / 2.0);
  return pts;
}

ScaledDifferenceSolver::ScaledDifferenceSolver(const SampledSystem& system, double gamma, long a, long b)
    : d_(system.dim()), a_(a), b_(b) {
  if (b <= a) {
    throw Error(ErrorCode::InvalidArgument, "solver needs at least one equation");
  }
  const int d = d_;
  const long steps = b - a;
  q_.reserve(static_cast<std::size_t>(steps));
  r_.reserve(static_cast<std::size_t>(steps));
  s_.reserve(static_cast<std::size_t>(steps));

  // Block column n of the transposed operator: -A_n^T / gamma at block row n,
  // identity at block row n + 1.
  Matrix top = -system(a).transpose() / gamma;
  Matrix stack(2 * d, d);
  for (long n = 0; n < steps; ++n) {
    stack.topRows(d) = top;
    stack.bottomRows(d) = Matrix::Identity(d, d);
    const Eigen::HouseholderQR<Matrix> qr(stack);
    Matrix q = qr.householderQ();
    r_.push_back(qr.matrixQR().topRows(d).triangularView<Eigen::Upper>());
    if (n + 1 < steps) {
      Matrix next(2 * d, d);
      next.topRows(d).setZero();
      next.bottomRows(d) = -system(a + n + 1).transpose() / gamma;
      const Matrix rotated = q.transpose() * next;
      s_.push_back(rotated.topRows(d));
      top = rotated.bottomRows(d);
    }
    q_.push_back(std::move(q));
  }

  // Backward recurrence for the state of block n after Q_{steps-1}..Q_n have
  // been applied to [y; 0]: w_n = K_n y_n with K_n = Q11_n + Q12_n K_{n+1} E_{n+1}.
  k_.assign(static_cast<std::size_t>(steps) + 1, Matrix::Zero(d, d));
  k_[static_cast<std::size_t>(steps - 1)] = q_.back().topLeftCorner(d, d);
  for (long n = steps - 2; n >= 0; --n) {
    const Matrix& qn = q_[static_cast<std::size_t>(n)];
    k_[static_cast<std::size_t>(n)] = qn.topLeftCorner(d, d) +
                                      qn.topRightCorner(d, d) * k_[static_cast<std::size_t>(n + 1)] * step_map(n + 1);
  }
}

Matrix ScaledDifferenceSolver::step_map(long n) const {
  // Homogeneous forward substitution: R_n^T y_n = -S_{n-1}^T y_{n-1}.
  const Matrix rhs = -s_[static_cast<std::size_t>(n - 1)].transpose();
  return r_[static_cast<std::size_t>(n)].transpose().triangularView<Eigen::Lower>().solve(rhs);
}

long ScaledDifferenceSolver::offset_of(long n0) const {
  const long offset = n0 - a_;
  if (offset < 0 || offset >= b_ - a_) {
    throw Error(ErrorCode::InvalidArgument, "impulse index outside the solver range");
  }
  return offset;
}

Matrix ScaledDifferenceSolver::impulse_response_before(long n0) const {
  const long o = offset_of(n0);
  const int d = d_;
  const Matrix y0 = r_[static_cast<std::size_t>(o)].transpose().triangularView<Eigen::Lower>().solve(
      Matrix::Identity(d, d));
  const Matrix w = k_[static_cast<std::size_t>(o)] * y0;
  if (o == 0) return w;
  return q_[static_cast<std::size_t>(o - 1)].bottomRightCorner(d, d) * w;
}

Matrix ScaledDifferenceSolver::impulse_response_after(long n0) const {
  const long o = offset_of(n0);
  const long steps = b_ - a_;
  const int d = d_;
  const Matrix y0 = r_[static_cast<std::size_t>(o)].transpose().triangularView<Eigen::Lower>().solve(
      Matrix::Identity(d, d));
  const Matrix& qo = q_[static_cast<std::size_t>(o)];
  Matrix out = qo.bottomLeftCorner(d, d) * y0;
  if (o + 1 < steps) {
    out += qo.bottomRightCorner(d, d) * k_[static_cast<std::size_t>(o + 1)] * step_map(o + 1) * y0;
  }
  return out;
}

Matrix ScaledDifferenceSolver::apply_q(Matrix y) const {
  const int d = d_;
  const long steps = b_ - a_;
  Vector pair(2 * d);
  for (long n = steps - 1; n >= 0; --n) {
    pair.head(d) = y.col(n);
    pair.tail(d) = y.col(n + 1);
    pair = q_[static_cast<std::size_t>(n)] * pair;
    y.col(n) = pair.head(d);
    y.col(n + 1) = pair.tail(d);
  }
  return y;
}

Matrix ScaledDifferenceSolver::solve(const Matrix& rhs) const {
  const int d = d_;
  const long steps = b_ - a_;
  if (rhs.rows() != d || rhs.cols() != steps) {
    throw Error(ErrorCode::DimensionMismatch, "rhs must be d x (b - a)");
  }
  Matrix y = Matrix::Zero(d, steps + 1);
  for (long n = 0; n < steps; ++n) {
    Vector f = rhs.col(n);
    if (n > 0) f.noalias() -= s_[static_cast<std::size_t>(n - 1)].transpose() * y.col(n - 1);
    y.col(n) = r_[static_cast<std::size_t>(n)].transpose().triangularView<Eigen::Lower>().solve(f);
  }
  return apply_q(std::move(y));
}

Matrix ScaledDifferenceSolver::solve_impulse(long n0, const Vector& r) const {
  const int d = d_;
  const long steps = b_ - a_;
  const long offset = offset_of(n0);
  Matrix y = Matrix::Zero(d, steps + 1);
  y.col(offset) = r_[static_cast<std::size_t>(offset)].transpose().triangularView<Eigen::Lower>().solve(r);
  for (long n = offset + 1; n < steps; ++n) {
    const Vector f = -s_[static_cast<std::size_t>(n - 1)].transpose() * y.col(n - 1);
    y.col(n) = r_[static_cast<std::size_t>(n)].transpose().triangularView<Eigen::Lower>().solve(f);
  }
  return apply_q(std::move(y));
}

ImpulseSolution solve_impulse_pair(const SampledSystem& system, double gamma_hi, double gamma_lo, long k,
                                   const Vector& r, long n_minus, long n_plus) {
  if (k - 1 < n_minus || k > n_plus) {
    throw Error(ErrorCode::InvalidArgument, "impulse time outside [n_minus, n_plus]");
  }
  const ScaledDifferenceSolver v_solver(system, gamma_lo, n_minus, n_plus);
  const ScaledDifferenceSolver u_solver(system, gamma_hi, n_minus, n_plus);
  ImpulseSolution sol;
  sol.n_minus = n_minus;
  sol.v = v_solver.solve_impulse(k - 1, r);
  const Vector forcing = -system(k - 1) * sol.v.col(k - 1 - n_minus);
  sol.u = u_solver.solve_impulse(k - 1, forcing);
  return sol;
}

Vector solve_block_subdivided(const SampledSystem& system, double gamma_hi, double gamma_lo, long k,
                              const Vector& r, long n_minus, long n_plus, long subinterval) {
  if (n_plus - n_minus < subinterval) {
    throw Error(ErrorCode::InvalidArgument, "range shorter than one subinterval");
  }
  const long a = std::clamp(k - subinterval / 2, n_minus, n_plus - subinterval);
  const ImpulseSolution sol = solve_impulse_pair(system, gamma_hi, gamma_lo, k, r, a, a + subinterval);
  return sol.u.col(k - a);
}

const Subspace& FiberBundle::at(long k) const {
  if (k < k_min || k > k_max) {
    throw Error(ErrorCode::HorizonExceedsFibers,
                "fiber at k = " + std::to_string(k) + " not in [" + std::to_string(k_min) + ", " +
                    std::to_string(k_max) + "]");
  }
  return fibers[static_cast<std::size_t>(k - k_min)];
}

FiberBundle compute_fiber_bundle(const SampledSystem& system, const SpectrumReport& report, int i,
                                 const BundleOptions& options) {
  if (i < 0 || i >= static_cast<int>(report.intervals.size())) {
    throw Error(ErrorCode::InvalidArgument, "interval index out of range");
  }
  const long n_minus = options.n_minus;
  const long n_plus = options.n_plus > 0 ? options.n_plus : system.last();
  const long k_min = options.k_min >= 0 ? options.k_min : n_minus + options.gap;
  const long k_max = options.k_max >= 0 ? options.k_max : n_plus - options.gap;
  if (k_min < n_minus + options.gap || k_max > n_plus - options.gap || k_min > k_max) {
    throw Error(ErrorCode::InvalidArgument, "k range violates the gap to [n_minus, n_plus]");
  }
  if (n_minus < system.first() || n_plus > system.last()) {
    throw Error(ErrorCode::InvalidArgument, "[n_minus, n_plus] exceeds the sampled system");
  }
  const bool monolithic = options.subinterval <= 0 || n_plus - n_minus <= options.subinterval;
  if (!monolithic && options.subinterval < 2 * options.gap) {
    throw Error(ErrorCode::InvalidArgument, "subinterval must be at least twice the gap");
  }

  const ResolventPoints pts = choose_resolvent_points(report);
  const double gamma_hi = pts.gamma[static_cast<std::size_t>(i)];
  const double gamma_lo = pts.gamma[static_cast<std::size_t>(i) + 1];
  const int fiber_dim = report.intervals[static_cast<std::size_t>(i)].bundle_dim;
  const int d = system.dim();

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const std::vector<Vector> impulses = draw_impulses(d, fiber_dim, options.seed, i, attempt);
    FiberBundle bundle;
    bundle.interval_index = i;
    bundle.k_min = k_min;
    bundle.k_max = k_max;
    bundle.fibers.reserve(static_cast<std::size_t>(k_max - k_min + 1));

    std::optional<ScaledDifferenceSolver> v_solver;
    std::optional<ScaledDifferenceSolver> u_solver;
    if (monolithic) {
      v_solver.emplace(system, gamma_lo, n_minus, n_plus);
      u_solver.emplace(system, gamma_hi, n_minus, n_plus);
    }
    bool ok = true;
    for (long k = k_min; k <= k_max && ok; ++k) {
      if (!monolithic) {
        const long a = std::clamp(k - options.subinterval / 2, n_minus, n_plus - options.subinterval);
        v_solver.emplace(system, gamma_lo, a, a + options.subinterval);
        u_solver.emplace(system, gamma_hi, a, a + options.subinterval);
      }
      // r -> u_k is linear: v_{k-1} = V r, u_k = -U A_{k-1} V r.
      const Matrix projection =
          -u_solver->impulse_response_after(k - 1) * system(k - 1) * v_solver->impulse_response_before(k - 1);
      Matrix responses(d, fiber_dim);
      for (int nu = 0; nu < fiber_dim; ++nu) {
        const Vector u = projection * impulses[static_cast<std::size_t>(nu)];
        const double norm = u.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
          ok = false;
          break;
        }
        responses.col(nu) = u / norm;
      }
      if (!ok) break;
      const Eigen::JacobiSVD<Matrix> svd(responses);
      if (svd.singularValues()(fiber_dim - 1) < kFiberRankThreshold) {
        ok = false;
        break;
      }
      bundle.fibers.push_back(orthonormalize(responses));
    }
    if (ok) return bundle;
  }
  throw Error(ErrorCode::FiberRankDeficient,
              "impulse responses for interval " + std::to_string(i + 1) + " stayed dependent after " +
                  std::to_string(options.max_retries) + " retries");
}

std::vector<FiberBundle> compute_all_bundles(const SampledSystem& system, const SpectrumReport& report,
                                             const BundleOptions& options, unsigned threads) {
  std::vector<FiberBundle> out(report.intervals.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = compute_fiber_bundle(system, report, static_cast<int>(i), options);
  });
  return out;
}

double max_invariance_defect(const SampledSystem& system, const FiberBundle& bundle) {
  double worst = 0.0;
  for (long k = bundle.k_min; k < bundle.k_max; ++k) {
    const Subspace image = orthonormalize(system(k) * bundle.at(k).basis());
    worst = std::max(worst, principal_angle(image, bundle.at(k + 1)).radians());
  }
  return worst;
}

double direct_sum_margin(const std::vector<FiberBundle>& bundles, long k) {
  Eigen::Index cols = 0;
  for (const auto& b : bundles) cols += b.at(k).dim();
  const Eigen::Index d = bundles.front().at(k).ambient_dim();
  Matrix all(d, cols);
  Eigen::Index c = 0;
  for (const auto& b : bundles) {
    all.middleCols(c, b.at(k).dim()) = b.at(k).basis();
    c += b.at(k).dim();
  }
  const Eigen::JacobiSVD<Matrix> svd(all);
  return cols == d ? svd.singularValues()(d - 1) : 0.0;
}

}  // namespace angulus
