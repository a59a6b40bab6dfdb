#include "tame/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace tame {

namespace {
const double kLogPrimitives = std::log(static_cast<double>(kPrimitiveCount));
}

std::string_view to_string(ScalingMode m) { return m == ScalingMode::power ? "power" : "log_clamped"; }

ScalingMode scaling_mode_from_string(std::string_view s) {
  if (s == "power") return ScalingMode::power;
  if (s == "log_clamped") return ScalingMode::log_clamped;
  throw std::invalid_argument("unknown scaling mode '" + std::string(s) + "'");
}

double joint_scaling(int k, double lambda, ScalingMode mode) {
  if (k < 1) throw std::invalid_argument("joint_scaling: k must be >= 1");
  if (mode == ScalingMode::power) return std::pow(static_cast<double>(k), lambda);
  return std::pow(std::log(static_cast<double>(std::max(k, 2))), lambda);
}

double FitnessEstimate::inner() const { return kLogPrimitives + mean_loglik; }

FitnessEstimate estimate_from_logliks(std::span<const double> episode_sums, int k, double lambda, ScalingMode mode) {
  FitnessEstimate f;
  f.k = k;
  f.lambda = lambda;
  f.scaling_mode = mode;
  double total = 0.0;
  for (double s : episode_sums) {
    if (!std::isfinite(s)) continue;
    total += s;
    ++f.episodes;
  }
  if (f.episodes == 0 || k < 1) {
    f.value = kUnscored;
    return f;
  }
  f.mean_loglik = total / static_cast<double>(f.episodes) / static_cast<double>(k);
  f.value = joint_scaling(k, lambda, mode) * (kLogPrimitives + f.mean_loglik);
  return f;
}

FitnessEstimate estimate(const ClassifierParams& params, std::span<const GraphSample> episodes, int k,
                         double lambda, ScalingMode mode) {
  const auto sums = batch_episode_loglik(params, episodes);
  return estimate_from_logliks(sums, k, lambda, mode);
}

OracleResult oracle_from_outcomes(std::span<const std::pair<ActionAssignment, StateSummary>> outcomes) {
  OracleResult r;
  r.outcome_count = outcomes.size();
  if (outcomes.empty()) return r;
  const int k = static_cast<int>(outcomes.front().first.size());
  r.k = k;

  struct Bucket {
    std::size_t count = 0;
    std::vector<std::array<std::size_t, kPrimitiveCount>> per_joint;
  };
  std::map<std::vector<long long>, Bucket> buckets;
  std::vector<const Bucket*> owner;
  owner.reserve(outcomes.size());
  std::vector<std::vector<long long>> keys;
  keys.reserve(outcomes.size());
  for (const auto& [a, s] : outcomes) {
    std::vector<long long> key;
    key.reserve(s.values.size());
    for (double v : s.values) key.push_back(std::llround(v / kStateBucket));
    Bucket& b = buckets[key];
    if (b.per_joint.empty()) b.per_joint.assign(k, {});
    ++b.count;
    for (int j = 0; j < k; ++j) ++b.per_joint[j][a.primitives[j]];
    keys.push_back(std::move(key));
  }
  r.distinct_states = buckets.size();

  const double n = static_cast<double>(outcomes.size());
  double entropy = 0.0;
  for (const auto& [key, b] : buckets) {
    const double p = static_cast<double>(b.count) / n;
    entropy -= p * std::log(p);
  }
  r.exact_mi = entropy;

  double expected = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Bucket& b = buckets.at(keys[i]);
    for (int j = 0; j < k; ++j) {
      const double c = static_cast<double>(b.per_joint[j][outcomes[i].first.primitives[j]]);
      expected += std::log(c / static_cast<double>(b.count));
    }
  }
  expected /= n;
  r.bayes_bound = kLogPrimitives + (k > 0 ? expected / k : 0.0);
  return r;
}

OracleResult exact_mi_oracle(const EnvConfig& env, const MorphologyTree& tree, std::size_t cap) {
  const auto outcomes = enumerate_outcomes(env, tree, cap);
  return oracle_from_outcomes(outcomes);
}

double variance_fitness(std::span<const StateSummary> states) {
  if (states.size() < 2) return kUnscored;
  const std::size_t d = states.front().values.size();
  double trace = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (const auto& s : states) mean += s.values[c];
    mean /= static_cast<double>(states.size());
    double ss = 0.0;
    for (const auto& s : states) ss += (s.values[c] - mean) * (s.values[c] - mean);
    trace += ss / static_cast<double>(states.size() - 1);
  }
  return trace;
}

FitnessEstimate trained_enumeration_estimate(const EnvConfig& env, const MorphologyTree& tree,
                                             const ClassifierDims& dims, const TrainConfig& train, int epochs,
                                             Rng& rng, double lambda, ScalingMode mode, std::size_t cap) {
  const auto outcomes = enumerate_outcomes(env, tree, cap);
  auto graph = std::make_shared<const LineGraph>(to_line_graph(tree));
  std::vector<GraphSample> samples;
  samples.reserve(outcomes.size());
  for (const auto& [a, s] : outcomes) samples.push_back({graph, s.values, a.primitives});
  Classifier c(dims, train);
  c.reset(rng);
  c.fit(samples, rng, epochs);
  return estimate(c.params(), samples, tree.joint_count(), lambda, mode);
}

FitnessEstimate evaluate_heldout(const MorphologyTree& tree, const EnvConfig& env, const ClassifierDims& dims,
                                 const TrainConfig& train, const HeldoutConfig& cfg, std::uint64_t seed,
                                 double lambda, ScalingMode mode) {
  auto graph = std::make_shared<const LineGraph>(to_line_graph(tree));
  auto collect = [&](int count, std::uint64_t stream) {
    std::vector<GraphSample> out;
    out.reserve(count);
    for (int e = 0; e < count; ++e) {
      const EpisodeRecord r = run_episode(env, tree, derive_seed(seed, stream, static_cast<std::uint64_t>(e)));
      if (r.valid) out.push_back(make_sample(graph, r));
    }
    return out;
  };
  const auto fit_set = collect(cfg.train_episodes, 1);
  const auto test_set = collect(cfg.test_episodes, 2);
  Rng rng(derive_seed(seed, 3));
  Classifier c(dims, train);
  c.reset(rng);
  c.fit(fit_set, rng, cfg.epochs);
  return estimate(c.params(), test_set, tree.joint_count(), lambda, mode);
}

}  // namespace tame
