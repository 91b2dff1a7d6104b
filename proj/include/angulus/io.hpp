#pragma once

// JSON and CSV serialization of reports and fiber dumps.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "angulus/angular.hpp"
#include "angulus/bundles.hpp"
#include "angulus/spectrum.hpp"

namespace angulus {

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_number(double x);

nlohmann::json to_json(const SpectrumReport& report);
SpectrumReport spectrum_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AngularValueReport& report);
AngularValueReport angular_from_json(const nlohmann::json& j);

/// Header `lower,upper,dim`, one row per interval.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

/// Header `label,value,params`; params joined by ';'. The last row is `theta_hat`.
void write_angular_csv(std::ostream& out, const AngularValueReport& report);

/// Columns k, i, nu, x1..xd: one row per time k, interval i (1-based) and
/// basis column nu (1-based).
void write_fiber_dump(std::ostream& out, const std::vector<FiberBundle>& bundles);

}  // namespace angulus
