#include <doctest.h>

#include <numbers>
#include <random>

#include "angulus/angular.hpp"
#include "oracles.hpp"

using namespace angulus;

namespace {

struct Setup {
  SystemModel model;
  SampledSystem system;
  SpectrumReport report;
  std::vector<FiberBundle> bundles;
};

Setup setup(const SystemModel& model, long M = 1000) {
  Setup s;
  s.model = model;
  s.report = compute_spectrum(model, M);
  s.system = SampledSystem(model, 0, M);
  BundleOptions o;
  o.seed = 1;
  s.bundles = compute_all_bundles(s.system, s.report, o);
  return s;
}

Setup setup(const std::string& name, Params p = {}, long M = 1000) {
  if (name == "henon2" || name == "henon3") p["length"] = M + 1;
  return setup(catalog_get(name, p, 1), M);
}

SystemModel identity(int d) {
  SystemModel m;
  m.name = "identity";
  m.dim = d;
  m.generator = [d](long) { return Matrix(Matrix::Identity(d, d)); };
  return m;
}

const Candidate& find(const AngularValueReport& r, const std::string& label) {
  for (const auto& c : r.candidates) {
    if (c.label == label) return c;
  }
  FAIL("missing candidate " << label);
  return r.candidates.front();
}

Subspace line(double a, double b, double c = 0.0, int d = 2) {
  Vector v(d);
  v(0) = a;
  v(1) = b;
  if (d > 2) v(2) = c;
  return orthonormalize(v);
}

void check_in_range(const AngularValueReport& r) {
  CHECK(r.theta_hat >= 0.0);
  CHECK(r.theta_hat <= std::numbers::pi / 2);
  for (const auto& c : r.candidates) {
    CHECK(c.value >= 0.0);
    CHECK(c.value <= std::numbers::pi / 2);
  }
}

}  // namespace

TEST_CASE("identity system has vanishing angular values") {
  const Setup s = setup(identity(2));
  const auto t1 = theta1_hat(s.system, s.bundles, 50, 900);
  const auto t2 = theta2_hat(s.system, s.bundles, 50, 900);
  for (const auto* r : {&t1, &t2}) {
    for (const auto& c : r->candidates) CHECK(c.value < 1e-12);
    check_in_range(*r);
  }
}

TEST_CASE("autonomous examples") {
  const Setup d = setup("diag23");
  CHECK(theta1_hat(d.system, d.bundles, 50, 900).theta_hat <= 1e-10);
  const Setup r = setup("rotated_diag");
  const auto t = theta1_hat(r.system, r.bundles, 50, 900);
  CHECK(t.theta_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  check_in_range(t);
}

TEST_CASE("param3d with p = 2: pair candidates") {
  const Setup s = setup("param3d", {{"p", 2.0}});
  REQUIRE(s.bundles.size() == 3);
  const auto t2 = theta2_hat(s.system, s.bundles, 50, 900);
  CHECK(find(t2, "W1+W2").value == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  CHECK(find(t2, "W1+W3").value == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  CHECK(find(t2, "W2+W3").value < 1e-6);
  CHECK(t2.theta_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("random3d: the plane fiber does not rotate as a whole") {
  const Setup s = setup("random3d");
  const auto t2 = theta2_hat(s.system, s.bundles, 50, 900);
  CHECK(find(t2, "W2").value < 1e-10);
  CHECK(find(t2, "W1+B2").value == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("angle sum on a line fiber equals the mean angle between consecutive fibers") {
  for (const char* name : {"rotated_diag", "henon2"}) {
    const Setup s = setup(name);
    for (std::size_t i = 0; i < s.bundles.size(); ++i) {
      const long k = 50, n = 900;
      double direct = 0.0;
      for (long j = k + 1; j <= k + n; ++j) {
        direct += principal_angle(s.bundles[i].at(j - 1), s.bundles[i].at(j)).radians();
      }
      direct /= double(n);
      const TraceSpace V{k, {{static_cast<int>(i), s.bundles[i].at(k)}}};
      CHECK(std::abs(angle_sum(s.system, s.bundles, V, k, n) - direct) < 1e-10);
    }
  }
}

TEST_CASE("angular values do not change when the system is scaled") {
  const Setup s = setup("henon2");
  const SampledSystem big(scaled(s.model, 7.5), 0, 1000);
  for (std::size_t i = 0; i < s.bundles.size(); ++i) {
    const TraceSpace V{50, {{static_cast<int>(i), s.bundles[i].at(50)}}};
    CHECK(std::abs(angle_sum(s.system, s.bundles, V, 50, 900) - angle_sum(big, s.bundles, V, 50, 900)) < 1e-14);
  }
  const Subspace v = line(1.0, 2.0);
  CHECK(std::abs(forward_angle_sum(s.system, v, 50, 900) - forward_angle_sum(big, v, 50, 900)) < 1e-14);
}

TEST_CASE("no sampled line beats the trace-space search") {
  std::mt19937_64 rng(17);
  for (const char* name : {"diag23", "random3d"}) {
    const Setup s = setup(name);
    const double hat = theta1_hat(s.system, s.bundles, 50, 900).theta_hat;
    // The transient towards the dominant direction adds O(1/n); a long horizon hides it.
    const SampledSystem longer(s.model, 0, 20100);
    for (int trial = 0; trial < 100; ++trial) {
      const Subspace v = Subspace::from_orthonormal(oracle::random_orthonormal(rng, s.model.dim, 1));
      CHECK(forward_angle_sum(longer, v, 50, 20000) <= hat + 1e-3);
    }
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const Setup s = setup("random3d");
  SearchOptions many;
  many.threads = 3;
  CHECK(theta2_hat(s.system, s.bundles, 50, 900) == theta2_hat(s.system, s.bundles, 50, 900, many));
  CHECK(theta1_hat(s.system, s.bundles, 50, 900) == theta1_hat(s.system, s.bundles, 50, 900, many));
}

TEST_CASE("unsupported fiber dimension and too long horizons") {
  const Setup s = setup(identity(3));
  try {
    theta1_hat(s.system, s.bundles, 50, 900);
    FAIL("expected UnsupportedFiberDim");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedFiberDim);
  }
  const Setup d = setup("diag23");
  try {
    theta1_hat(d.system, d.bundles, 50, 901);
    FAIL("expected HorizonExceedsFibers");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonExceedsFibers);
  }
}

TEST_CASE("trace space examples on diag23") {
  const Setup d = setup("diag23");
  const auto fibers = fibers_at(d.bundles, 50);
  const TraceSpace a = trace_space_of(line(1.0, 1.0), fibers, 50);
  REQUIRE(a.components.size() == 1);
  CHECK(a.components[0].interval == 0);
  CHECK(principal_angle(a.components[0].subspace, line(0.0, 1.0)).radians() < 1e-8);

  const TraceSpace b = trace_space_of(line(1.0, 0.0), fibers, 50);
  REQUIRE(b.components.size() == 1);
  CHECK(b.components[0].interval == 1);
  CHECK(principal_angle(b.components[0].subspace, line(1.0, 0.0)).radians() < 1e-10);
}

TEST_CASE("trace spaces are fixed points of the construction") {
  const Setup s = setup("param3d", {{"p", 2.0}});
  const auto fibers = fibers_at(s.bundles, 50);
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const TraceSpace t = trace_space_of(fibers[i], fibers, 50);
    REQUIRE(t.components.size() == 1);
    CHECK(t.components[0].interval == static_cast<int>(i));
    CHECK(principal_angle(t.components[0].subspace, fibers[i]).radians() < 1e-10);
  }
}

TEST_CASE("recursive and closed-form trace spaces agree") {
  std::mt19937_64 rng(23);
  for (const char* name : {"param3d", "random3d", "block4", "henon3"}) {
    Params p;
    if (std::string(name) == "param3d") p["p"] = 2.0;
    const Setup s = setup(name, p);
    const auto fibers = fibers_at(s.bundles, 300);
    for (int sdim = 1; sdim < s.model.dim; ++sdim) {
      for (int trial = 0; trial < 10; ++trial) {
        const Subspace v = Subspace::from_orthonormal(oracle::random_orthonormal(rng, s.model.dim, sdim));
        const TraceSpace a = trace_space_of(v, fibers, 300);
        const TraceSpace b = trace_space_direct(v, fibers, 300);
        CHECK(a.dim() == sdim);
        REQUIRE(a.components.size() == b.components.size());
        for (std::size_t c = 0; c < a.components.size(); ++c) {
          CHECK(a.components[c].interval == b.components[c].interval);
          CHECK(principal_angle(a.components[c].subspace, b.components[c].subspace).radians() < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("images of V approach images of its trace space geometrically") {
  const Setup d = setup("diag23");
  const auto fibers = fibers_at(d.bundles, 50);
  const auto decay = reduction_decay_check(d.system, line(1.0, 1.0), fibers, 50, 40);
  int checked = 0;
  for (std::size_t j = 1; j < decay.size(); ++j) {
    if (decay[j - 1].second < 0.1 && decay[j].second > 1e-12) {
      const double ratio = decay[j].second / decay[j - 1].second;
      CHECK(ratio >= 0.6);
      CHECK(ratio <= 0.73);
      ++checked;
    }
  }
  CHECK(checked > 10);

  const TraceSpace t = trace_space_of(line(1.0, 1.0), fibers, 50);
  for (const auto& [j, a] : reduction_decay_check(d.system, t.span(), fibers, 50, 40)) CHECK(a < 1e-8);

  const Setup r = setup("rotated_diag");
  const auto rdecay = reduction_decay_check(r.system, line(0.3, -1.0), fibers_at(r.bundles, 50), 50, 40);
  CHECK(rdecay[30].second / rdecay[29].second == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("intersection decisions and the guard band") {
  Matrix u = Matrix::Identity(3, 2);
  Matrix w(3, 2);
  w << 1, 0, 0, 0, 0, 1;
  const Matrix shared = subspace_intersection(u, w);
  REQUIRE(shared.cols() == 1);
  CHECK(std::abs(std::abs(shared(0, 0)) - 1.0) < 1e-14);

  Matrix tilted = w;
  tilted.col(0) << 1.0, 0.0, 1e-8;
  tilted.col(0).normalize();
  tilted.col(1) << 0.0, 0.6, 0.8;
  try {
    subspace_intersection(u, tilted);
    FAIL("expected NumericalIntersectionAmbiguous");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalIntersectionAmbiguous);
  }
  tilted.col(0) << 1.0, 0.0, 1e-3;
  tilted.col(0).normalize();
  CHECK(subspace_intersection(u, tilted).cols() == 0);
}
