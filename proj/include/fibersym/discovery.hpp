#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fibersym/dataio.hpp"
#include "fibersym/energy.hpp"

namespace fibersym {

struct TrainingConfig {
  double alpha = 0.05;  // L1 penalty on the outer weights
  int epochs = 20000;
  double learning_rate = 1e-3;
  double threshold = 1e-3;  // kPa; smaller outer weights are zeroed
  std::uint64_t seed = 0;
  double init_scale = 0.5;
  /// Extra runs from seeded random initializations in [0, 2 * init_scale];
  /// the run with the lowest final loss is kept.
  int restarts = 0;
  /// Simplify the L1 support by BIC (drop a term, or replace an exponential
  /// term by its identity twin) and retrain on the simplified support.
  bool refine = true;

  void validate() const;
};

/// Flattened training sample: invariants, stress coefficients, target.
struct TrainingPoint {
  InvariantSet inv;
  std::array<double, 4> coeff{};
  double target = 0.0;
};

std::vector<TrainingPoint> training_points(std::span<const Experiment> experiments);

/// Measured-stress prediction in the linear-in-outer-weights form.
double predict_point(const ModelWeights& model, const TrainingPoint& p);

/// Mean squared stress error over all samples of all experiments plus
/// alpha * sum(w). Throws DomainError "NoData" when there are no samples.
double loss(const ModelWeights& model, std::span<const Experiment> experiments, double alpha);

/// Gradient of loss(): 12 outer entries followed by 12 inner entries. The
/// L1 subgradient at w = 0 is taken as 0.
std::array<double, 2 * kTermCount> loss_gradient(const ModelWeights& model, std::span<const Experiment> experiments,
                                                 double alpha);

/// Coefficient of determination, 1 - SS_res / SS_tot. May be negative.
/// Throws NumericError "ZeroVariance" for fewer than 2 samples or constant stress.
double r_squared(const ModelWeights& model, const Experiment& experiment);

struct ExperimentFit {
  Condition condition;
  double r2 = 0.0;
};

struct LossTracePoint {
  int epoch = 0;
  double loss = 0.0;
};

struct DiscoveredModel {
  NamedModel model;
  std::vector<ExperimentFit> fits;
  double mean_r2 = 0.0;
  std::vector<int> active_terms;     // 1-based, ascending
  std::vector<int> l1_active_terms;  // support after the L1 stage alone
  TrainingConfig config;
  std::vector<Condition> trained_on;
  std::string data_fingerprint;
  double final_loss = 0.0;
  std::vector<LossTracePoint> loss_trace;  // at most 1000 points
};

/// Active set {k : w_k > threshold}.
std::vector<int> active_terms(const ModelWeights& w, double threshold);

/// Trains on the mean curves of `training` (all of `set` when empty) and
/// reports R^2 on every mean curve of `set`. Deterministic for a given config.
DiscoveredModel train(const ExperimentSet& set, const TrainingConfig& config,
                      std::span<const Condition> training = {});

/// Unregularized fit restricted to a term subset.
struct SubsetFit {
  std::vector<int> terms;
  ModelWeights weights;
  double rss = 0.0;
  std::vector<double> r2;  // per experiment, input order
  double mean_r2 = 0.0;
};

/// Projected Levenberg-Marquardt fit of the subset (alpha = 0). Identity
/// terms keep w* = 1 since only w * w* is identifiable.
SubsetFit refit_subset(std::span<const Experiment> experiments, std::span<const int> terms);

/// Brute-force refits of every subset with at most `max_terms` terms,
/// ranked by mean R^2 (ties keep enumeration order: size, then lexicographic).
/// `threads` <= 0 uses the hardware concurrency.
std::vector<SubsetFit> enumerate_subsets_bestfit(std::span<const Experiment> experiments, int max_terms,
                                                 int threads = 0);

/// BIC-guided simplification of a support (see TrainingConfig::refine).
std::vector<int> simplify_support(std::span<const Experiment> experiments, std::vector<int> support);

}  // namespace fibersym
