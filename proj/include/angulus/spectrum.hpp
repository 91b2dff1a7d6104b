#pragma once

// Dichotomy spectrum from Bohl exponents of a QR-triangularized system.

#include <vector>

#include "angulus/linalg.hpp"
#include "angulus/models.hpp"

namespace angulus {

/// Orthogonal frames Q_j and moduli |diag(T_j)| of A_j Q_{j-1} = Q_j T_j.
struct TriangularSequence {
  int dim = 0;
  std::vector<Matrix> Q;
  std::vector<Vector> Tdiag;

  long length() const { return static_cast<long>(Q.size()); }
};

/// Frame Q_{-1} the iteration starts from.
///
/// Identity: models whose triangular structure is an unstable fixed point of
/// the QR iteration (conjugated diagonal systems) keep the wrong diagonal
/// order until rounding errors have grown, which distorts early windows.
/// Generic: a fixed orthogonal matrix; avoids that, but pays a transient
/// whose length depends on how the frame meets the growth directions.
/// Adapted: the generic frame pulled back through A_{M-1}^T, ..., A_0^T by
/// the same QR iteration. Its leading columns then already follow the most
/// expanding directions of Phi(M, 0), so the forward pass has no transient.
enum class InitialFrame { Adapted, Generic, Identity };

/// Q_j T_j = qr(A_j Q_{j-1}) for j = 0..M-1.
TriangularSequence triangularize(const SystemModel& model, long M, InitialFrame start = InitialFrame::Adapted);

/// Orthogonal d x d frame with no zero minors in practice (deterministic).
Matrix generic_frame(int d);

/// beta(i, kappa) = (prod_{j=kappa}^{kappa+H-1} |T_j(i,i)|)^(1/H)
/// for kappa = 0..M-H-1.
struct BohlTable {
  long H = 0;
  Matrix beta;  // d x (M - H)
  Vector beta_lo;
  Vector beta_hi;
};

BohlTable bohl_exponents(const TriangularSequence& tri, long H);

struct SpectralInterval {
  double lower = 0.0;
  double upper = 0.0;
  int bundle_dim = 0;

  friend bool operator==(const SpectralInterval&, const SpectralInterval&) = default;
};

/// Merged spectral intervals sorted in descending order.
struct SpectrumReport {
  int dim = 0;
  std::vector<SpectralInterval> intervals;

  friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

inline constexpr double kDefaultMergeGap = 0.1;

/// Sorts the per-row intervals [beta_lo, beta_hi] by beta_lo (descending)
/// and joins neighbours whenever upper(i+1) + merge_gap >= lower(i).
SpectrumReport spectral_intervals(const BohlTable& table, double merge_gap = kDefaultMergeGap);

/// Steps 1 end to end with H = M / 2 unless given.
SpectrumReport compute_spectrum(const SystemModel& model, long M, long H = 0,
                                double merge_gap = kDefaultMergeGap, InitialFrame start = InitialFrame::Adapted);

}  // namespace angulus
