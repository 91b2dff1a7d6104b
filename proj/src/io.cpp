#include "angulus/io.hpp"

#include <cstdio>
#include <ostream>

namespace angulus {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json to_json(const SpectrumReport& report) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : report.intervals) {
    intervals.push_back({{"lower", iv.lower}, {"upper", iv.upper}, {"dim", iv.bundle_dim}});
  }
  return {{"dim", report.dim}, {"intervals", intervals}};
}

SpectrumReport spectrum_from_json(const nlohmann::json& j) {
  SpectrumReport report;
  report.dim = j.at("dim").get<int>();
  for (const auto& iv : j.at("intervals")) {
    report.intervals.push_back({iv.at("lower").get<double>(), iv.at("upper").get<double>(), iv.at("dim").get<int>()});
  }
  return report;
}

nlohmann::json to_json(const AngularValueReport& report) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : report.candidates) {
    candidates.push_back({{"label", c.label}, {"value", c.value}, {"params", c.params}});
  }
  return {{"s", report.s}, {"k", report.k}, {"n", report.n}, {"candidates", candidates},
          {"theta_hat", report.theta_hat}};
}

AngularValueReport angular_from_json(const nlohmann::json& j) {
  AngularValueReport report;
  report.s = j.at("s").get<int>();
  report.k = j.at("k").get<long>();
  report.n = j.at("n").get<long>();
  for (const auto& c : j.at("candidates")) {
    report.candidates.push_back(
        {c.at("label").get<std::string>(), c.at("value").get<double>(), c.at("params").get<std::vector<double>>()});
  }
  report.theta_hat = j.at("theta_hat").get<double>();
  return report;
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << "lower,upper,dim\n";
  for (const auto& iv : report.intervals) {
    out << format_number(iv.lower) << ',' << format_number(iv.upper) << ',' << iv.bundle_dim << '\n';
  }
}

void write_angular_csv(std::ostream& out, const AngularValueReport& report) {
  out << "label,value,params\n";
  for (const auto& c : report.candidates) {
    out << c.label << ',' << format_number(c.value) << ',';
    for (std::size_t i = 0; i < c.params.size(); ++i) {
      out << (i ? ";" : "") << format_number(c.params[i]);
    }
    out << '\n';
  }
  out << "theta_hat," << format_number(report.theta_hat) << ",\n";
}

void write_fiber_dump(std::ostream& out, const std::vector<FiberBundle>& bundles) {
  if (bundles.empty()) return;
  const Eigen::Index d = bundles.front().fibers.front().ambient_dim();
  out << "k,i,nu";
  for (Eigen::Index r = 1; r <= d; ++r) out << ",x" << r;
  out << '\n';
  long k_min = bundles.front().k_min;
  long k_max = bundles.front().k_max;
  for (const auto& b : bundles) {
    k_min = std::max(k_min, b.k_min);
    k_max = std::min(k_max, b.k_max);
  }
  for (long k = k_min; k <= k_max; ++k) {
    for (const auto& b : bundles) {
      const Matrix& basis = b.at(k).basis();
      for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        out << k << ',' << b.interval_index + 1 << ',' << c + 1;
        for (Eigen::Index r = 0; r < d; ++r) out << ',' << format_number(basis(r, c));
        out << '\n';
      }
    }
  }
}

}  // namespace angulus
