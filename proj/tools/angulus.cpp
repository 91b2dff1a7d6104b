#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "angulus/io.hpp"
#include "angulus/parallel.hpp"
#include "angulus/pipeline.hpp"

namespace {

using namespace angulus;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownModel:
    case ErrorCode::MissingParam:
    case ErrorCode::InvalidArgument:
    case ErrorCode::WindowTooLong:
    case ErrorCode::DimensionMismatch:
      return 2;
    default:
      return 3;
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  out << text;
}

std::string list_models(const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : catalog()) {
      j.push_back({{"name", e.name}, {"dim", e.dim}, {"required", e.required}, {"defaults", e.defaults},
                   {"description", e.description}});
    }
    out << j.dump(2) << '\n';
    return out.str();
  }
  out << "name,dim,required,defaults,description\n";
  for (const auto& e : catalog()) {
    out << e.name << ',' << e.dim << ',';
    for (std::size_t i = 0; i < e.required.size(); ++i) out << (i ? ";" : "") << e.required[i];
    out << ',';
    bool first = true;
    for (const auto& [key, value] : e.defaults) {
      out << (first ? "" : ";") << key << '=' << format_number(value);
      first = false;
    }
    out << ',' << e.description << '\n';
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dichotomy spectrum, spectral bundles and outer angular values of linear difference equations"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig config;
  std::optional<double> phi, p, lambda, rho, eta, phi0, phi1;
  std::vector<std::string> extra_params;
  std::string format = "json";
  std::string output;
  std::vector<long> sweep;
  config.threads = default_thread_count();

  app.add_option("--model", config.model, "catalog model name");
  app.add_option("--phi", phi, "rotation angle phi");
  app.add_option("--p", p, "param3d parameter p");
  app.add_option("--lambda", lambda, "oscillator coupling lambda");
  app.add_option("--rho", rho, "normal_form radius rho");
  app.add_option("--eta", eta, "block4 parameter eta");
  app.add_option("--phi0", phi0, "counterexample1 angle phi0");
  app.add_option("--phi1", phi1, "counterexample1 angle phi1");
  app.add_option("--param", extra_params, "further model parameters as key=value");
  app.add_option("--seed", config.seed, "seed for random models and fiber probes")->envname("ANGULUS_SEED");
  app.add_option("-M,--samples", config.M, "number of matrices A_0..A_{M-1}")->capture_default_str();
  app.add_option("-H,--window", config.H, "Bohl window length (default M/2)");
  app.add_option("--gap", config.gap, "distance of the fiber range from the ends")->capture_default_str();
  app.add_option("--subinterval", config.subinterval, "solve each fiber on a window of this length (0: whole range)")
      ->capture_default_str();
  app.add_option("--merge", config.merge, "merge threshold for adjacent intervals")->capture_default_str();
  std::string frame = "adapted";
  app.add_option("--frame", frame, "initial frame of the QR iteration")
      ->check(CLI::IsMember({"adapted", "generic", "identity"}))
      ->capture_default_str();
  app.add_option("-k,--base", config.k, "base time k")->capture_default_str();
  app.add_option("-n,--steps", config.n, "averaging horizon n (default M - 100)");
  app.add_option("-s,--order", config.s, "subspace dimension s")->check(CLI::IsMember({1, 2}))->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("-o,--output", output, "output file (default stdout)");
  app.add_option("--threads", config.threads, "worker threads");

  auto* spectrum = app.add_subcommand("spectrum", "spectral intervals (step 1)")->fallthrough();
  auto* bundles = app.add_subcommand("bundles", "fiber dump CSV (steps 1 and 2)")->fallthrough();
  auto* angular = app.add_subcommand("angular", "outer angular value report (steps 1 to 3)")->fallthrough();
  angular->add_option("--sweep", sweep, "evaluate theta_hat for these horizons n, with M = k + n + gap")
      ->delimiter(',');
  auto* models = app.add_subcommand("models-list", "catalog models and their parameters")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (models->parsed()) {
      emit(list_models(format), output);
      return 0;
    }
    config.start = frame == "identity" ? InitialFrame::Identity
                   : frame == "generic"  ? InitialFrame::Generic
                                         : InitialFrame::Adapted;
    if (config.model.empty()) throw Error(ErrorCode::MissingParam, "--model is required");
    const std::pair<const char*, std::optional<double>*> named[] = {
        {"phi", &phi}, {"p", &p}, {"lambda", &lambda}, {"rho", &rho}, {"eta", &eta}, {"phi0", &phi0}, {"phi1", &phi1}};
    for (const auto& [key, value] : named) {
      if (*value) config.params[key] = **value;
    }
    for (const auto& kv : extra_params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--param expects key=value, got " + kv);
      config.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }

    std::ostringstream out;
    if (spectrum->parsed()) {
      const SpectrumReport report = run_spectrum(config);
      if (format == "json") {
        out << to_json(report).dump(2) << '\n';
      } else {
        write_spectrum_csv(out, report);
      }
    } else if (bundles->parsed()) {
      write_fiber_dump(out, run_bundles(config).bundles);
    } else if (angular->parsed() && !sweep.empty()) {
      const auto points = run_sweep(config, sweep);
      if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& pt : points) j.push_back({{"n", pt.n}, {"M", pt.M}, {"theta_hat", pt.theta_hat}});
        out << j.dump(2) << '\n';
      } else {
        out << "n,M,theta_hat\n";
        for (const auto& pt : points) out << pt.n << ',' << pt.M << ',' << format_number(pt.theta_hat) << '\n';
      }
    } else {
      const AngularValueReport report = run_angular(config);
      if (format == "json") {
        out << to_json(report).dump(2) << '\n';
      } else {
        write_angular_csv(out, report);
      }
    }
    emit(out.str(), output);
  } catch (const Error& e) {
    std::cerr << "angulus: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "angulus: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
