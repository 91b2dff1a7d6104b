#include "angulus/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace angulus {

Matrix generic_frame(int d) {
  // Uniform entries from a fixed mt19937_64 stream; its output sequence is
  // fixed by the standard, unlike the library's distributions.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = double(rng() >> 11) * 0x1.0p-53 - 0.5;
  return qr_factor(m).Q;
}

TriangularSequence triangularize(const SystemModel& model, long M, InitialFrame start) {
  if (M < 2) {
    throw Error(ErrorCode::InvalidArgument, "triangularize needs M >= 2");
  }
  TriangularSequence tri;
  tri.dim = model.dim;
  tri.Q.reserve(static_cast<std::size_t>(M));
  tri.Tdiag.reserve(static_cast<std::size_t>(M));
  Matrix q_prev = Matrix::Identity(model.dim, model.dim);
  if (start != InitialFrame::Identity) q_prev = generic_frame(model.dim);
  if (start == InitialFrame::Adapted) {
    for (long j = M - 1; j >= 0; --j) q_prev = qr_factor(model(j).transpose() * q_prev).Q;
  }
  for (long j = 0; j < M; ++j) {
    auto [q, t] = qr_factor(model(j) * q_prev);
    Vector diag = t.diagonal().cwiseAbs();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
      throw Error(ErrorCode::RankDeficient, "A_" + std::to_string(j) + " is numerically singular");
    }
    tri.Tdiag.push_back(std::move(diag));
    tri.Q.push_back(q);
    q_prev = std::move(q);
  }
  return tri;
}

BohlTable bohl_exponents(const TriangularSequence& tri, long H) {
  const long M = tri.length();
  if (H < 1) {
    throw Error(ErrorCode::InvalidArgument, "Bohl window must be >= 1");
  }
  if (H > M - 1) {
    throw Error(ErrorCode::WindowTooLong,
                "window H = " + std::to_string(H) + " exceeds M - 1 = " + std::to_string(M - 1));
  }
  const int d = tri.dim;
  const long windows = M - H;

  // Prefix sums of log|T_j(i,i)|; the window [kappa, kappa + H) has H factors.
  Matrix prefix = Matrix::Zero(d, M + 1);
  for (long j = 0; j < M; ++j) {
    prefix.col(j + 1) = prefix.col(j) + tri.Tdiag[static_cast<std::size_t>(j)].array().log().matrix();
  }

  BohlTable table;
  table.H = H;
  table.beta.resize(d, windows);
  for (long kappa = 0; kappa < windows; ++kappa) {
    table.beta.col(kappa) =
        ((prefix.col(kappa + H) - prefix.col(kappa)) / double(H)).array().exp().matrix();
  }
  table.beta_lo = table.beta.rowwise().minCoeff();
  table.beta_hi = table.beta.rowwise().maxCoeff();
  return table;
}

SpectrumReport spectral_intervals(const BohlTable& table, double merge_gap) {
  const auto d = static_cast<int>(table.beta_lo.size());
  if (d == 0) {
    throw Error(ErrorCode::InvalidArgument, "empty Bohl table");
  }
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return table.beta_lo(a) > table.beta_lo(b); });

  SpectrumReport report;
  report.dim = d;
  for (int idx : order) {
    SpectralInterval next{table.beta_lo(idx), table.beta_hi(idx), 1};
    if (!report.intervals.empty()) {
      SpectralInterval& last = report.intervals.back();
      if (next.upper + merge_gap >= last.lower) {
        last.lower = std::min(last.lower, next.lower);
        last.upper = std::max(last.upper, next.upper);
        last.bundle_dim += 1;
        continue;
      }
    }
    report.intervals.push_back(next);
  }
  return report;
}

SpectrumReport compute_spectrum(const SystemModel& model, long M, long H, double merge_gap, InitialFrame start) {
  const TriangularSequence tri = triangularize(model, M, start);
  return spectral_intervals(bohl_exponents(tri, H > 0 ? H : M / 2), merge_gap);
}

}  // namespace angulus
