#include "angulus/pipeline.hpp"

namespace angulus {

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (s != 1 && s != 2) fail("s must be 1 or 2");
  if (gap < 1) fail("gap must be positive");
  if (M < 2 * gap + 100) fail("M must be at least 2 gap + 100");
  if (k < gap || k > M - gap) fail("k must lie in [gap, M - gap]");
  if (horizon() < 1 || k + horizon() > M - gap) fail("k + n must not exceed M - gap");
}

SystemModel make_model(const RunConfig& config) {
  Params params = config.params;
  const auto& entries = catalog();
  for (const auto& e : entries) {
    if (e.name == config.model && e.defaults.count("length") && !params.count("length")) {
      params["length"] = double(config.M + 1);
    }
  }
  return catalog_get(config.model, params, config.seed);
}

namespace {

SpectrumReport spectrum_of(const SystemModel& model, const RunConfig& config) {
  return compute_spectrum(model, config.M, config.H, config.merge, config.start);
}

BundleOptions bundle_options(const RunConfig& config) {
  BundleOptions o;
  o.n_minus = 0;
  o.n_plus = config.M;
  o.gap = config.gap;
  o.subinterval = config.subinterval;
  o.seed = config.seed;
  return o;
}

}  // namespace

SpectrumReport run_spectrum(const RunConfig& config) {
  config.validate();
  return spectrum_of(make_model(config), config);
}

PipelineState run_bundles(const RunConfig& config) {
  config.validate();
  PipelineState state;
  state.model = make_model(config);
  state.spectrum = spectrum_of(state.model, config);
  state.system = SampledSystem(state.model, 0, config.M);
  state.bundles = compute_all_bundles(state.system, state.spectrum, bundle_options(config), config.threads);
  return state;
}

AngularValueReport run_angular(const RunConfig& config) {
  const PipelineState state = run_bundles(config);
  SearchOptions options;
  options.threads = config.threads;
  return config.s == 1 ? theta1_hat(state.system, state.bundles, config.k, config.horizon(), options)
                       : theta2_hat(state.system, state.bundles, config.k, config.horizon(), options);
}

std::vector<SweepPoint> run_sweep(const RunConfig& config, const std::vector<long>& horizons) {
  std::vector<SweepPoint> out;
  for (long n : horizons) {
    RunConfig c = config;
    c.n = n;
    c.M = config.k + n + config.gap;
    c.H = 0;
    out.push_back({n, c.M, run_angular(c).theta_hat});
  }
  return out;
}

}  // namespace angulus
