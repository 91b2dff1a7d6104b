#pragma once

// Spectral bundles (fibers) W_k^i from bounded solutions of impulse-forced
// scaled difference equations, solved as minimum-norm least-squares
// problems.

#include <cstdint>
#include <vector>

#include "angulus/linalg.hpp"
#include "angulus/models.hpp"
#include "angulus/spectrum.hpp"

namespace angulus {

/// The matrices A_n for n in [first, first + size) evaluated once.
class SampledSystem {
 public:
  SampledSystem() = default;
  SampledSystem(const SystemModel& model, long first, long last);

  int dim() const { return dim_; }
  long first() const { return first_; }
  long last() const { return first_ + static_cast<long>(mats_.size()); }
  const Matrix& operator()(long n) const;

 private:
  int dim_ = 0;
  long first_ = 0;
  std::vector<Matrix> mats_;
};

/// gamma_1 > ... > gamma_{l+1}, one point per resolvent interval.
struct ResolventPoints {
  std::vector<double> gamma;
};

ResolventPoints choose_resolvent_points(const SpectrumReport& report);

/// Minimum-norm solver for x_{n+1} - (1/gamma) A_n x_n = f_n, n in [a, b),
/// with unknowns x_a..x_b. The block bidiagonal operator is factored once
/// by a banded QR of its transpose; `solve` then costs O((b - a) d^2).
class ScaledDifferenceSolver {
 public:
  ScaledDifferenceSolver(const SampledSystem& system, double gamma, long a, long b);

  long first() const { return a_; }
  long last() const { return b_; }

  /// rhs(:, n - a) = f_n for n in [a, b); returns x(:, n - a) for n in [a, b].
  Matrix solve(const Matrix& rhs) const;

  /// Same as `solve` for a single impulse f_{n0} = r, all other f_n = 0.
  Matrix solve_impulse(long n0, const Vector& r) const;

  /// Linear maps r -> x_{n0} and r -> x_{n0+1} of the impulse solution with
  /// f_{n0} = r. Each costs O(d^3) after factorization, so responses for
  /// every impulse time come out of one factorization.
  Matrix impulse_response_before(long n0) const;
  Matrix impulse_response_after(long n0) const;

 private:
  Matrix apply_q(Matrix y) const;
  Matrix step_map(long n) const;  // y_n = step_map(n) y_{n-1} for homogeneous rows
  long offset_of(long n0) const;

  int d_;
  long a_;
  long b_;
  std::vector<Matrix> q_;  // 2d x 2d per step
  std::vector<Matrix> r_;  // d x d upper triangular
  std::vector<Matrix> s_;  // d x d coupling blocks
  std::vector<Matrix> k_;  // tail maps: partially transformed block n = k_[n] y_n
};

struct ImpulseSolution {
  Matrix v;  // d x (n_plus - n_minus + 1)
  Matrix u;
  long n_minus = 0;
};

/// Solves the pair v_{n+1} = A_n v_n / gamma_lo + delta_{n,k-1} r and
/// u_{n+1} = A_n u_n / gamma_hi - delta_{n,k-1} A_{k-1} v_{k-1} on [n_minus, n_plus]
/// monolithically; u_k approximates the fiber projection of r.
ImpulseSolution solve_impulse_pair(const SampledSystem& system, double gamma_hi, double gamma_lo, long k,
                                   const Vector& r, long n_minus, long n_plus);

/// The same pair solved on the length-`subinterval` window centered at k
/// (clipped to [n_minus, n_plus]); returns u_k.
Vector solve_block_subdivided(const SampledSystem& system, double gamma_hi, double gamma_lo, long k,
                              const Vector& r, long n_minus, long n_plus, long subinterval = 200);

struct BundleOptions {
  long n_minus = 0;
  long n_plus = 0;  // 0 means M (the sampled range end)
  long gap = 50;
  long k_min = -1;  // -1 means n_minus + gap
  long k_max = -1;  // -1 means n_plus - gap
  long subinterval = 0;  // > 0 solves each k on a window of this length centered at k
  std::uint64_t seed = 0;
  int max_retries = 3;
};

/// Fibers W_k^i for k in [k_min, k_max] of one spectral interval.
struct FiberBundle {
  int interval_index = 0;  // 0-based
  long k_min = 0;
  long k_max = 0;
  std::vector<Subspace> fibers;

  int dim() const { return static_cast<int>(fibers.front().dim()); }
  const Subspace& at(long k) const;
};

/// Fiber bundle of interval `i` (0-based). Throws FiberRankDeficient when
/// the impulse responses stay dependent after `max_retries` fresh draws.
FiberBundle compute_fiber_bundle(const SampledSystem& system, const SpectrumReport& report, int i,
                                 const BundleOptions& options);

std::vector<FiberBundle> compute_all_bundles(const SampledSystem& system, const SpectrumReport& report,
                                             const BundleOptions& options, unsigned threads = 1);

/// max_k angle(A_k W_k, W_{k+1}) over the bundle's range.
double max_invariance_defect(const SampledSystem& system, const FiberBundle& bundle);

/// Smallest singular value of the concatenated fiber bases at time k.
double direct_sum_margin(const std::vector<FiberBundle>& bundles, long k);

}  // namespace angulus
