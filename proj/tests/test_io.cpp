#include <doctest.h>

#include <sstream>

#include "angulus/io.hpp"
#include "angulus/pipeline.hpp"

using namespace angulus;

TEST_CASE("numbers print with enough digits to round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0 * 1e-300, 12345.678901234567, -0.0}) {
    CHECK(std::stod(format_number(x)) == x);
  }
}

TEST_CASE("spectrum report JSON round trip") {
  const SpectrumReport r{3, {{3.0000000000000715, 3.1, 1}, {1.0 / 3.0, 0.5, 2}}};
  const std::string text = to_json(r).dump();
  CHECK(spectrum_from_json(nlohmann::json::parse(text)) == r);
}

TEST_CASE("angular report JSON round trip and layout") {
  AngularValueReport r;
  r.s = 2;
  r.k = 50;
  r.n = 1900;
  r.candidates = {{"W1", 1e-17, {}}, {"W1+B2", 0.10084210526315789, {0.39269852912}},
                  {"B1+B2", 1.1628036590000001, {2.6, 1.9247600730000001}}};
  r.theta_hat = 1.1628036590000001;
  const nlohmann::json j = to_json(r);
  CHECK(j.at("candidates").size() == 3);
  CHECK(j.at("candidates")[1].at("label") == "W1+B2");
  CHECK(j.contains("theta_hat"));
  CHECK(angular_from_json(nlohmann::json::parse(j.dump())) == r);
}

TEST_CASE("CSV writers") {
  std::ostringstream s;
  write_spectrum_csv(s, SpectrumReport{2, {{3, 3, 1}, {2, 2.5, 1}}});
  CHECK(s.str() == "lower,upper,dim\n3,3,1\n2,2.5,1\n");

  AngularValueReport r{1, 50, 100, {{"B1", 0.25, {0.5}}, {"W2", 0.125, {}}}, 0.25};
  std::ostringstream a;
  write_angular_csv(a, r);
  CHECK(a.str() == "label,value,params\nB1,0.25,0.5\nW2,0.125,\ntheta_hat,0.25,\n");
}

TEST_CASE("fiber dump has one row per time, interval and basis column") {
  RunConfig c;
  c.model = "random3d";
  c.M = 400;
  const PipelineState state = run_bundles(c);
  std::ostringstream out;
  write_fiber_dump(out, state.bundles);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,i,nu,x1,x2,x3");
  long rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  CHECK(rows == 3 * (350 - 50 + 1));
  CHECK(first.rfind("50,1,1,", 0) == 0);
  // Fiber 1 of random3d is the third axis.
  const double x3 = std::stod(first.substr(first.rfind(',') + 1));
  CHECK(std::abs(std::abs(x3) - 1.0) < 1e-10);
}
