#pragma once

// The three-step pipeline (spectrum, bundles, angular values) driven by a
// single run configuration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "angulus/angular.hpp"
#include "angulus/bundles.hpp"
#include "angulus/models.hpp"
#include "angulus/spectrum.hpp"

namespace angulus {

struct RunConfig {
  std::string model;
  Params params;
  std::uint64_t seed = 0;
  long M = 2000;
  long H = 0;            // 0 means M / 2
  long gap = 50;
  long subinterval = 0;  // 0 solves each bundle in one factorization
  double merge = kDefaultMergeGap;
  InitialFrame start = InitialFrame::Adapted;
  long k = 50;
  long n = 0;            // 0 means M - 100
  int s = 1;
  unsigned threads = 1;

  long horizon() const { return n > 0 ? n : M - 100; }

  /// Throws InvalidArgument unless M >= 2 gap + 100, k in [gap, M - gap]
  /// and k + n <= M - gap.
  void validate() const;
};

/// Catalog model for the configuration. Trajectory models get M + 1 orbit
/// points unless `length` is given.
SystemModel make_model(const RunConfig& config);

struct PipelineState {
  SystemModel model;
  SampledSystem system;
  SpectrumReport spectrum;
  std::vector<FiberBundle> bundles;
};

SpectrumReport run_spectrum(const RunConfig& config);

/// Steps 1 and 2.
PipelineState run_bundles(const RunConfig& config);

/// Steps 1 to 3 for config.s.
AngularValueReport run_angular(const RunConfig& config);

struct SweepPoint {
  long n = 0;
  long M = 0;
  double theta_hat = 0.0;
};

/// theta_hat_s for each horizon n, rerunning the pipeline with M = k + n + gap.
std::vector<SweepPoint> run_sweep(const RunConfig& config, const std::vector<long>& horizons);

}  // namespace angulus
