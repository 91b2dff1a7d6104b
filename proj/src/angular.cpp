#include "angulus/angular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "angulus/optimize.hpp"
#include "angulus/parallel.hpp"

namespace angulus {

namespace {

constexpr double kPi = std::numbers::pi;

// Orthonormal basis of the span of at most a few independent columns
// (classical Gram-Schmidt, applied twice).
Matrix orthonormal_columns(const Matrix& a) {
  Matrix q = a;
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index p = 0; p < c; ++p) {
        q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
      }
    }
    q.col(c).normalize();
  }
  return q;
}

Matrix concat(const std::vector<Matrix>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return out;
}

double clamp_angle(double a) { return std::clamp(a, 0.0, kPi / 2); }

Subspace unit_vector_in(const Subspace& fiber, double t) {
  Matrix v = std::cos(t) * fiber.basis().col(0) + std::sin(t) * fiber.basis().col(1);
  return orthonormalize(v);
}

// Column space of `a` with a prescribed rank, from the leading left
// singular vectors.
Matrix column_space(const Matrix& a, Eigen::Index rank) {
  if (rank == 0) return Matrix(a.rows(), 0);
  const Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() < rank || !(sv(rank - 1) > kRankTolerance * sv(0))) {
    throw Error(ErrorCode::NumericalIntersectionAmbiguous, "projected subspace lost dimension");
  }
  return svd.matrixU().leftCols(rank);
}

struct Splitting {
  Matrix basis;                      // [W^1 ... W^l]
  Matrix inverse;
  std::vector<Eigen::Index> offset;  // first column of each fiber, plus d at the end

  explicit Splitting(const std::vector<Subspace>& fibers) {
    if (fibers.empty()) {
      throw Error(ErrorCode::InvalidArgument, "no fibers given");
    }
    const Eigen::Index d = fibers.front().ambient_dim();
    std::vector<Matrix> blocks;
    offset.push_back(0);
    for (const auto& f : fibers) {
      blocks.push_back(f.basis());
      offset.push_back(offset.back() + f.dim());
    }
    if (offset.back() != d) {
      throw Error(ErrorCode::DimensionMismatch, "fiber dimensions do not add up to d");
    }
    basis = concat(blocks, d);
    const Eigen::FullPivLU<Matrix> lu(basis);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::RankDeficient, "fibers do not span R^d");
    }
    inverse = lu.inverse();
  }

  std::size_t count() const { return offset.size() - 1; }

  // Projector onto W^1 (+) ... (+) W^{i-1} along the remaining fibers, i 1-based.
  Matrix unstable_projector(std::size_t i) const {
    const Eigen::Index cols = offset[i - 1];
    return basis.leftCols(cols) * inverse.topRows(cols);
  }

  // Orthonormal basis of W^i (+) ... (+) W^l, i 1-based; empty for i = l + 1.
  Matrix stable_range(std::size_t i) const {
    const Eigen::Index first = offset[i - 1];
    const Eigen::Index cols = basis.cols() - first;
    if (cols == 0) return Matrix(basis.rows(), 0);
    return orthonormalize(basis.rightCols(cols)).basis();
  }
};

TraceSpace split_into_components(const Matrix& span_basis, const std::vector<Subspace>& fibers, long k,
                                 const IntersectionTolerance& tol) {
  TraceSpace out;
  out.k = k;
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    Matrix part = subspace_intersection(span_basis, fibers[i].basis(), tol);
    if (part.cols() == 0) continue;
    total += part.cols();
    out.components.push_back({static_cast<int>(i), Subspace::from_orthonormal(orthonormal_columns(part))});
  }
  if (total != span_basis.cols()) {
    throw Error(ErrorCode::NumericalIntersectionAmbiguous, "trace space does not split along the fibers");
  }
  return out;
}

}  // namespace

int TraceSpace::dim() const {
  int s = 0;
  for (const auto& c : components) s += static_cast<int>(c.subspace.dim());
  return s;
}

Subspace TraceSpace::span() const {
  std::vector<Matrix> blocks;
  for (const auto& c : components) blocks.push_back(c.subspace.basis());
  return orthonormalize(concat(blocks, components.front().subspace.ambient_dim()));
}

std::vector<Subspace> fibers_at(const std::vector<FiberBundle>& bundles, long k) {
  std::vector<Subspace> out;
  out.reserve(bundles.size());
  for (const auto& b : bundles) out.push_back(b.at(k));
  return out;
}

double angle_sum(const SampledSystem& system, const std::vector<FiberBundle>& bundles, const TraceSpace& V,
                 long k, long n) {
  if (V.components.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty trace space");
  }
  if (n < 1) {
    throw Error(ErrorCode::InvalidArgument, "horizon n must be >= 1");
  }
  for (const auto& c : V.components) {
    const FiberBundle& b = bundles.at(static_cast<std::size_t>(c.interval));
    if (k < b.k_min || k + n > b.k_max) {
      throw Error(ErrorCode::HorizonExceedsFibers,
                  "fibers cover [" + std::to_string(b.k_min) + ", " + std::to_string(b.k_max) +
                      "], need [" + std::to_string(k) + ", " + std::to_string(k + n) + "]");
    }
  }
  const Eigen::Index d = V.components.front().subspace.ambient_dim();
  std::vector<Matrix> frames;
  for (const auto& c : V.components) frames.push_back(c.subspace.basis());
  Matrix current = orthonormal_columns(concat(frames, d));

  double total = 0.0;
  for (long j = k + 1; j <= k + n; ++j) {
    const Matrix& a = system(j - 1);
    for (auto& f : frames) f = a * f;
    const Matrix image = orthonormal_columns(concat(frames, d));
    total += largest_principal_angle(current, image);
    for (std::size_t c = 0; c < frames.size(); ++c) {
      const Matrix& fiber = bundles[static_cast<std::size_t>(V.components[c].interval)].at(j).basis();
      frames[c] = orthonormal_columns(fiber * (fiber.transpose() * frames[c]));
    }
    current = orthonormal_columns(concat(frames, d));
  }
  return clamp_angle(total / double(n));
}

double forward_angle_sum(const SampledSystem& system, const Subspace& V, long k, long n) {
  Matrix current = V.basis();
  double total = 0.0;
  for (long j = k + 1; j <= k + n; ++j) {
    const Matrix image = orthonormal_columns(system(j - 1) * current);
    total += largest_principal_angle(current, image);
    current = image;
  }
  return clamp_angle(total / double(n));
}

namespace {

struct SearchTask {
  std::size_t candidate;
  std::function<double(const std::vector<double>&)> objective;
  int parameters;               // 0, 1 or 2
  std::vector<double> start;    // bracket [lo, hi] for 1-D, start point for 2-D
  double value = 0.0;
  std::vector<double> argmax;
};

void run_tasks(std::vector<SearchTask>& tasks, const SearchOptions& options) {
  parallel_for(tasks.size(), options.threads, [&](std::size_t t) {
    SearchTask& task = tasks[t];
    if (task.parameters == 0) {
      task.value = task.objective({});
    } else if (task.parameters == 1) {
      const Minimum1d m = minimize_1d([&](double x) { return -task.objective({x}); }, task.start[0],
                                      task.start[1], options.tol);
      task.value = -m.value;
      task.argmax = {m.x};
    } else {
      SimplexOptions so;
      so.initial_step = kPi / (2.0 * options.grid_2d);
      so.tol = options.tol;
      so.period = kPi;
      const Minimum2d m = minimize_simplex(
          [&](const Eigen::Vector2d& x) { return -task.objective({x(0), x(1)}); },
          Eigen::Vector2d(task.start[0], task.start[1]), so);
      task.value = -m.value;
      task.argmax = {m.x(0), m.x(1)};
    }
  });
}

// Adds the search tasks for a candidate with `parameters` circle angles.
void add_tasks(std::vector<SearchTask>& tasks, std::size_t candidate, int parameters,
               std::function<double(const std::vector<double>&)> objective, const SearchOptions& options) {
  if (parameters == 0) {
    tasks.push_back({candidate, std::move(objective), 0, {}, 0.0, {}});
  } else if (parameters == 1) {
    const double width = kPi / options.starts_1d;
    for (int s = 0; s < options.starts_1d; ++s) {
      tasks.push_back({candidate, objective, 1, {s * width, (s + 1) * width}, 0.0, {}});
    }
  } else {
    const double width = kPi / options.grid_2d;
    for (int a = 0; a < options.grid_2d; ++a) {
      for (int b = 0; b < options.grid_2d; ++b) {
        tasks.push_back({candidate, objective, 2, {(a + 0.5) * width, (b + 0.5) * width}, 0.0, {}});
      }
    }
  }
}

AngularValueReport collect(int s, long k, long n, std::vector<std::string> labels, std::vector<SearchTask>& tasks) {
  AngularValueReport report;
  report.s = s;
  report.k = k;
  report.n = n;
  for (auto& label : labels) report.candidates.push_back({std::move(label), -1.0, {}});
  for (const auto& t : tasks) {
    Candidate& c = report.candidates[t.candidate];
    if (t.value > c.value) {
      c.value = t.value;
      c.params = t.argmax;
    }
  }
  report.theta_hat = 0.0;
  for (auto& c : report.candidates) {
    c.value = clamp_angle(c.value);
    report.theta_hat = std::max(report.theta_hat, c.value);
  }
  return report;
}

void check_fiber_dims(const std::vector<FiberBundle>& bundles) {
  for (const auto& b : bundles) {
    if (b.dim() > 2) {
      throw Error(ErrorCode::UnsupportedFiberDim,
                  "fiber " + std::to_string(b.interval_index + 1) + " has dimension " + std::to_string(b.dim()));
    }
  }
}

std::string fiber_label(const FiberBundle& b) {
  return (b.dim() == 1 ? "W" : "B") + std::to_string(b.interval_index + 1);
}

}  // namespace

AngularValueReport theta1_hat(const SampledSystem& system, const std::vector<FiberBundle>& bundles, long k, long n,
                              const SearchOptions& options) {
  check_fiber_dims(bundles);
  std::vector<std::string> labels;
  std::vector<SearchTask> tasks;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const FiberBundle& b = bundles[i];
    const Subspace& fiber = b.at(k);
    const int interval = static_cast<int>(i);
    labels.push_back(fiber_label(b));
    if (b.dim() == 1) {
      add_tasks(tasks, i, 0, [&, interval](const std::vector<double>&) {
        return angle_sum(system, bundles, TraceSpace{k, {{interval, fiber}}}, k, n);
      }, options);
    } else {
      add_tasks(tasks, i, 1, [&, interval](const std::vector<double>& t) {
        return angle_sum(system, bundles, TraceSpace{k, {{interval, unit_vector_in(fiber, t[0])}}}, k, n);
      }, options);
    }
  }
  run_tasks(tasks, options);
  return collect(1, k, n, std::move(labels), tasks);
}

AngularValueReport theta2_hat(const SampledSystem& system, const std::vector<FiberBundle>& bundles, long k, long n,
                              const SearchOptions& options) {
  check_fiber_dims(bundles);
  std::vector<std::string> labels;
  std::vector<SearchTask> tasks;

  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (bundles[i].dim() != 2) continue;
    const int interval = static_cast<int>(i);
    const Subspace& fiber = bundles[i].at(k);
    add_tasks(tasks, labels.size(), 0, [&, interval](const std::vector<double>&) {
      return angle_sum(system, bundles, TraceSpace{k, {{interval, fiber}}}, k, n);
    }, options);
    labels.push_back("W" + std::to_string(i + 1));
  }

  for (std::size_t i1 = 0; i1 < bundles.size(); ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < bundles.size(); ++i2) {
      const int first = static_cast<int>(i1);
      const int second = static_cast<int>(i2);
      const Subspace& f1 = bundles[i1].at(k);
      const Subspace& f2 = bundles[i2].at(k);
      const bool ball1 = f1.dim() == 2;
      const bool ball2 = f2.dim() == 2;
      const int parameters = int(ball1) + int(ball2);
      add_tasks(tasks, labels.size(), parameters, [&, first, second, ball1, ball2](const std::vector<double>& t) {
        std::size_t next = 0;
        Subspace x = ball1 ? unit_vector_in(f1, t[next++]) : f1;
        Subspace y = ball2 ? unit_vector_in(f2, t[next++]) : f2;
        return angle_sum(system, bundles, TraceSpace{k, {{first, std::move(x)}, {second, std::move(y)}}}, k, n);
      }, options);
      labels.push_back(fiber_label(bundles[i1]) + "+" + fiber_label(bundles[i2]));
    }
  }
  run_tasks(tasks, options);
  return collect(2, k, n, std::move(labels), tasks);
}

Matrix subspace_intersection(const Matrix& u, const Matrix& w, const IntersectionTolerance& tol) {
  const Eigen::Index d = u.rows();
  if (u.cols() == 0 || w.cols() == 0) return Matrix(d, 0);
  const Matrix residual = u - w * (w.transpose() * u);
  const Eigen::JacobiSVD<Matrix> svd(residual, Eigen::ComputeFullV);
  const auto& sines = svd.singularValues();
  Eigen::Index shared = 0;
  for (Eigen::Index j = 0; j < sines.size(); ++j) {
    if (sines(j) < tol.exact) {
      ++shared;
    } else if (sines(j) <= tol.distinct) {
      throw Error(ErrorCode::NumericalIntersectionAmbiguous,
                  "principal angle sine " + std::to_string(sines(j)) + " inside the guard band");
    }
  }
  // Singular values are sorted descending; shared directions are the last ones.
  return u * svd.matrixV().rightCols(shared);
}

TraceSpace trace_space_of(const Subspace& V, const std::vector<Subspace>& fibers, long k,
                          const IntersectionTolerance& tol) {
  const Splitting split(fibers);
  const std::size_t l = split.count();
  const Eigen::Index s = V.dim();
  Matrix current = V.basis();
  for (std::size_t i = 1; i <= l; ++i) {
    const Matrix shared = subspace_intersection(current, split.stable_range(i + 1), tol);
    const Matrix projected = column_space(split.unstable_projector(i + 1) * current, s - shared.cols());
    Matrix next(current.rows(), s);
    next << projected, shared;
    current = orthonormalize(next).basis();
  }
  return split_into_components(current, fibers, k, tol);
}

TraceSpace trace_space_direct(const Subspace& V, const std::vector<Subspace>& fibers, long k,
                              const IntersectionTolerance& tol) {
  const Splitting split(fibers);
  const std::size_t l = split.count();
  TraceSpace out;
  out.k = k;
  Matrix shared = V.basis();  // V cap range(P^s_1) = V
  for (std::size_t i = 1; i <= l; ++i) {
    const Matrix shared_next = subspace_intersection(V.basis(), split.stable_range(i + 1), tol);
    const Eigen::Index rank = shared.cols() - shared_next.cols();
    if (rank > 0) {
      const Matrix part = column_space(split.unstable_projector(i + 1) * shared, rank);
      out.components.push_back({static_cast<int>(i - 1), Subspace::from_orthonormal(orthonormal_columns(part))});
    }
    shared = shared_next;
  }
  if (out.dim() != V.dim()) {
    throw Error(ErrorCode::NumericalIntersectionAmbiguous, "trace space lost dimension");
  }
  return out;
}

std::vector<std::pair<long, double>> reduction_decay_check(const SampledSystem& system, const Subspace& V,
                                                           const std::vector<Subspace>& fibers, long k, long j_max) {
  const TraceSpace trace = trace_space_of(V, fibers, k);
  Matrix x = V.basis();
  Matrix y = trace.span().basis();
  std::vector<std::pair<long, double>> out;
  out.reserve(static_cast<std::size_t>(j_max) + 1);
  for (long j = k; j <= k + j_max; ++j) {
    out.emplace_back(j, largest_principal_angle(x, y));
    if (j == k + j_max) break;
    x = orthonormal_columns(system(j) * x);
    y = orthonormal_columns(system(j) * y);
  }
  return out;
}

}  // namespace angulus
