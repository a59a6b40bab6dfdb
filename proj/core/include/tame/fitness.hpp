#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tame/envsim.hpp"
#include "tame/gnn.hpp"
#include "tame/morphology.hpp"

namespace tame {

inline constexpr double kUnscored = -std::numeric_limits<double>::infinity();

enum class ScalingMode { power, log_clamped };

std::string_view to_string(ScalingMode m);
ScalingMode scaling_mode_from_string(std::string_view s);

/// power: k^lambda. log_clamped: (ln max(k, 2))^lambda.
double joint_scaling(int k, double lambda, ScalingMode mode);

struct FitnessEstimate {
  double value = kUnscored;
  int k = 0;
  double mean_loglik = 0.0;  ///< per-joint mean of log q(a_j | s_T, m), <= 0
  double lambda = 0.0;
  ScalingMode scaling_mode = ScalingMode::log_clamped;
  int episodes = 0;

  /// ln|A_j| + mean_loglik: the per-joint information term before scaling.
  double inner() const;
};

/// value = joint_scaling(k) * (ln|A_j| + mean_loglik), with mean_loglik the
/// average episode log-likelihood sum divided by k. Non-finite sums (invalid
/// episodes) are skipped; no usable episode gives value = -inf.
FitnessEstimate estimate_from_logliks(std::span<const double> episode_sums, int k, double lambda, ScalingMode mode);

/// Scores one morphology's labeled samples with the classifier.
FitnessEstimate estimate(const ClassifierParams& params, std::span<const GraphSample> episodes, int k,
                         double lambda, ScalingMode mode);

struct OracleResult {
  double exact_mi = 0.0;     ///< I(S_T; A) in nats, uniform actions, deterministic dynamics
  double bayes_bound = 0.0;  ///< ln|A_j| + (1/k) E[sum_j ln p(a_j | s_T)] under the true posterior
  std::size_t outcome_count = 0;
  std::size_t distinct_states = 0;
  int k = 0;
};

inline constexpr double kStateBucket = 1e-9;

OracleResult oracle_from_outcomes(std::span<const std::pair<ActionAssignment, StateSummary>> outcomes);

/// Exhaustive oracle; throws std::length_error above the enumeration cap.
OracleResult exact_mi_oracle(const EnvConfig& env, const MorphologyTree& tree,
                             std::size_t cap = kDefaultEnumerationCap);

/// Trace of the unbiased sample covariance; fewer than two states gives -inf.
double variance_fitness(std::span<const StateSummary> states);

/// Trains a fresh classifier on the noise-free enumeration of `tree` (every
/// assignment once) and returns its estimate on that same table.
FitnessEstimate trained_enumeration_estimate(const EnvConfig& env, const MorphologyTree& tree,
                                             const ClassifierDims& dims, const TrainConfig& train, int epochs,
                                             Rng& rng, double lambda, ScalingMode mode,
                                             std::size_t cap = kDefaultEnumerationCap);

struct HeldoutConfig {
  int train_episodes = 256;
  int test_episodes = 256;
  int epochs = 150;
};

/// Fitness of a single morphology measured on fresh episodes it was not
/// trained on, with a classifier fitted to that morphology alone.
FitnessEstimate evaluate_heldout(const MorphologyTree& tree, const EnvConfig& env, const ClassifierDims& dims,
                                 const TrainConfig& train, const HeldoutConfig& cfg, std::uint64_t seed,
                                 double lambda, ScalingMode mode);

}  // namespace tame
