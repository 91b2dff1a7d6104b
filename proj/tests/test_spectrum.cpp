#include <doctest.h>

#include "angulus/spectrum.hpp"
#include "oracles.hpp"

using namespace angulus;

namespace {

SystemModel constant_model(Matrix a) {
  SystemModel m;
  m.name = "constant";
  m.dim = static_cast<int>(a.rows());
  m.generator = [a](long) { return a; };
  return m;
}

BohlTable table_of(std::vector<std::pair<double, double>> rows) {
  BohlTable t;
  t.H = 1;
  t.beta_lo.resize(rows.size());
  t.beta_hi.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.beta_lo(i) = rows[i].first;
    t.beta_hi(i) = rows[i].second;
  }
  return t;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("Bohl exponents of diag23 are 3 and 2 for any window when started from the identity") {
  const TriangularSequence tri = triangularize(catalog_get("diag23"), 200, InitialFrame::Identity);
  for (long H : {1L, 10L, 100L, 199L}) {
    const BohlTable t = bohl_exponents(tri, H);
    CHECK(t.beta.cols() == 200 - H);
    Vector sorted_lo = t.beta_lo;
    std::sort(sorted_lo.begin(), sorted_lo.end(), std::greater<>());
    CHECK(sorted_lo(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sorted_lo(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((t.beta_hi - t.beta_lo).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scalar constant system has Bohl exponent exactly 2") {
  const TriangularSequence tri = triangularize(constant_model(Matrix::Constant(1, 1, 2.0)), 50);
  const BohlTable t = bohl_exponents(tri, 7);
  CHECK((t.beta.array() - 2.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("orthogonal input has unit triangular moduli") {
  const TriangularSequence tri = triangularize(catalog_get("rotation", {{"phi", 1.0 / 3.0}}), 300);
  for (long j = 0; j < tri.length(); ++j) {
    CHECK((tri.Tdiag[j].array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((tri.Q[j].transpose() * tri.Q[j] - Matrix::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("start frames") {
  const Matrix q = generic_frame(4);
  CHECK((q.transpose() * q - Matrix::Identity(4, 4)).norm() < 1e-14);
  CHECK(q.cwiseAbs().minCoeff() > 1e-3);
  CHECK(generic_frame(4) == q);

  // Started from the identity, the conjugated diagonal model keeps the
  // unstable diagonal order for a while; the generic frame pays a shorter
  // transient and the adapted frame none.
  const SystemModel p = catalog_get("param3d", {{"p", 2.0}});
  const SpectrumReport identity = compute_spectrum(p, 2000, 0, kDefaultMergeGap, InitialFrame::Identity);
  const SpectrumReport generic = compute_spectrum(p, 2000, 0, kDefaultMergeGap, InitialFrame::Generic);
  const SpectrumReport adapted = compute_spectrum(p, 2000);
  REQUIRE(identity.intervals.size() == 3);
  REQUIRE(generic.intervals.size() == 3);
  REQUIRE(adapted.intervals.size() == 3);
  const double expected[] = {3.0, 2.0, 0.5};
  double err_identity = 0, err_generic = 0, err_adapted = 0;
  for (int i = 0; i < 3; ++i) {
    for (const auto& [report, err] : {std::pair{&identity, &err_identity}, {&generic, &err_generic},
                                      {&adapted, &err_adapted}}) {
      *err = std::max({*err, std::abs(report->intervals[i].lower - expected[i]),
                       std::abs(report->intervals[i].upper - expected[i])});
    }
  }
  CHECK(err_adapted < 1e-10);
  CHECK(err_generic < 0.01);
  CHECK(err_identity > err_generic);

  const SpectrumReport d = compute_spectrum(catalog_get("diag23"), 2000);
  REQUIRE(d.intervals.size() == 2);
  CHECK(d.intervals[0] == SpectralInterval{d.intervals[0].lower, d.intervals[0].upper, 1});
  CHECK(std::abs(d.intervals[0].lower - 3.0) < 1e-12);
  CHECK(std::abs(d.intervals[1].upper - 2.0) < 1e-12);
}

TEST_CASE("triangularization yields an orthogonal cocycle") {
  const SystemModel m = catalog_get("rotated_diag", {{"phi", 0.4}});
  const TriangularSequence tri = triangularize(m, 20);
  for (long j = 1; j < 20; ++j) {
    const Matrix T = tri.Q[j].transpose() * m(j) * tri.Q[j - 1];
    CHECK(T(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(T(0, 0)) == doctest::Approx(tri.Tdiag[j](0)).epsilon(1e-12));
  }
}

TEST_CASE("window and length checks") {
  const TriangularSequence tri = triangularize(catalog_get("diag23"), 100);
  CHECK(code_of([&] { bohl_exponents(tri, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { bohl_exponents(tri, 100); }) == ErrorCode::WindowTooLong);
  CHECK_NOTHROW(bohl_exponents(tri, 99));
  CHECK(code_of([] { triangularize(catalog_get("diag23"), 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { triangularize(constant_model(Matrix::Zero(2, 2)), 10); }) == ErrorCode::RankDeficient);
}

TEST_CASE("interval merging rule") {
  const SpectrumReport points = spectral_intervals(table_of({{2, 2}, {3, 3}}));
  REQUIRE(points.intervals.size() == 2);
  CHECK(points.intervals[0] == SpectralInterval{3, 3, 1});
  CHECK(points.intervals[1] == SpectralInterval{2, 2, 1});

  const SpectrumReport merged = spectral_intervals(table_of({{1.95, 2.0}, {2.02, 2.1}}));
  REQUIRE(merged.intervals.size() == 1);
  CHECK(merged.intervals[0] == SpectralInterval{1.95, 2.1, 2});

  const SpectrumReport chain = spectral_intervals(table_of({{1.0, 1.0}, {1.05, 1.05}, {1.12, 1.12}, {3.0, 3.0}}));
  REQUIRE(chain.intervals.size() == 2);
  CHECK(chain.intervals[0] == SpectralInterval{3.0, 3.0, 1});
  CHECK(chain.intervals[1] == SpectralInterval{1.0, 1.12, 3});

  CHECK(spectral_intervals(table_of({{2, 2}, {2.5, 2.5}}), 0.6).intervals.size() == 1);
  CHECK(spectral_intervals(table_of({{2, 2}, {2.5, 2.5}}), 0.4).intervals.size() == 2);
}

TEST_CASE("reported intervals are ordered, separated and account for every dimension") {
  for (const char* name : {"diag23", "block4", "random3d", "normal_form"}) {
    const SpectrumReport r = compute_spectrum(catalog_get(name, {}, 1), 1000);
    int dims = 0;
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
      CHECK(r.intervals[i].lower <= r.intervals[i].upper);
      dims += r.intervals[i].bundle_dim;
      if (i > 0) CHECK(r.intervals[i].upper + kDefaultMergeGap < r.intervals[i - 1].lower);
    }
    CHECK(dims == r.dim);
  }
}

TEST_CASE("block4 spectrum") {
  const SpectrumReport r = compute_spectrum(catalog_get("block4"), 2000);
  REQUIRE(r.intervals.size() == 2);
  CHECK(r.intervals[0].lower == doctest::Approx(1.1992).epsilon(0.01));
  CHECK(r.intervals[0].upper == doctest::Approx(1.2008).epsilon(0.01));
  CHECK(r.intervals[0].bundle_dim == 2);
  CHECK(r.intervals[1].lower == doctest::Approx(1.0).epsilon(0.01));
  CHECK(r.intervals[1].upper == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Bohl exponents scale with the system") {
  for (const char* name : {"rotated_diag", "random3d"}) {
    const SystemModel m = catalog_get(name, {}, 5);
    const SpectrumReport base = compute_spectrum(m, 800);
    for (double c : {0.5, 3.0}) {
      const SpectrumReport s = compute_spectrum(scaled(m, c), 800, 0, c * kDefaultMergeGap);
      REQUIRE(s.intervals.size() == base.intervals.size());
      for (std::size_t i = 0; i < s.intervals.size(); ++i) {
        CHECK(s.intervals[i].lower == doctest::Approx(c * base.intervals[i].lower).epsilon(1e-12));
        CHECK(s.intervals[i].upper == doctest::Approx(c * base.intervals[i].upper).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("counterexample1 collapses to one interval around 1") {
  const SpectrumReport r = compute_spectrum(catalog_get("counterexample1", {{"phi0", 0.1}, {"phi1", 1.0}}), 2000);
  REQUIRE(r.intervals.size() == 1);
  CHECK(r.intervals[0].lower <= 1.0 + 1e-12);
  CHECK(r.intervals[0].upper >= 1.0 - 1e-12);
  CHECK(r.intervals[0].bundle_dim == 2);
}
