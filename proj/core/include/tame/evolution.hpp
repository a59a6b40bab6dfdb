#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tame/envsim.hpp"
#include "tame/fitness.hpp"
#include "tame/gnn.hpp"
#include "tame/morphology.hpp"

namespace tame {

enum class Mode { tame, tamr, varea, random };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct EvolutionConfig {
  int generations = 60;     // N
  int population = 24;      // L, new morphologies per generation
  int episodes = 32;        // E, rollouts per morphology
  int reset_frequency = 12; // generations between classifier resets; 0 = only the initial one
  double parent_fraction = 0.06;
  double lambda = 0.25;
  ScalingMode scaling = ScalingMode::log_clamped;
  TrainConfig train;
  int hidden = 192;
  int layers = 3;
  Mode mode = Mode::tame;
  std::uint64_t seed = 0;
  int workers = 1;
  MorphologyLimits limits;
  MutationParams mutation;
};

/// Table defaults for an environment class (lambda 0.25 locomotion, 0.2 arm).
EvolutionConfig default_evolution(EnvClass c);

struct PopulationEntry {
  MorphologyTree morphology;
  double fitness = kUnscored;
  FitnessEstimate estimate;
  int born_generation = 0;
  std::size_t episode_begin = 0;  ///< [begin, end) into RunResult::episodes
  std::size_t episode_end = 0;
};

struct GenerationStats {
  int generation = 0;
  std::size_t population = 0;
  double mean_fitness = kUnscored;  ///< over entries with finite fitness
  double max_fitness = kUnscored;
  std::uint64_t best_id = 0;
  double classifier_loss = 0.0;     ///< NaN when no classifier is trained
  std::uint64_t env_steps = 0;      ///< cumulative
};

struct RunResult {
  PopulationEntry best;
  std::vector<GenerationStats> history;
  std::vector<PopulationEntry> population;
  std::vector<EpisodeRecord> episodes;
  std::uint64_t env_steps = 0;
};

/// Invoked after each generation's fitness recompute. `classifier` is null
/// for modes that do not train one.
using GenerationCallback = std::function<void(const GenerationStats& stats, std::span<const PopulationEntry> population,
                                              const Classifier* classifier)>;

/// Indices into `population`: `count` uniform draws with replacement from the
/// top ceil(fraction * |population|) finite-fitness entries (ties by id).
/// With no finite entry every index is eligible.
std::vector<std::size_t> select_parents(std::span<const PopulationEntry> population, double fraction, int count,
                                        Rng& rng);

/// E episodes for each morphology, ordered by (morphology, episode). Episode
/// e of morphology m is seeded derive_seed(seed, m.id, e) whatever `workers` is.
std::vector<EpisodeRecord> collect_episodes(const EnvConfig& env, std::span<const MorphologyTree> morphologies,
                                            int episodes, std::uint64_t seed, int workers);

/// Index of the highest-fitness entry, lowest morphology id on ties.
std::size_t best_index(std::span<const PopulationEntry> population);

RunResult run_tame(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback = {});
RunResult run_tamr(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback = {});
RunResult run_varea(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback = {});
RunResult run_random(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback = {});

/// Dispatches on config.mode.
RunResult run(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback = {});

/// Scores labeled episode sets against a trained classifier. Used for both the
/// per-generation recompute and for constructed datasets in tests.
struct ScoredMorphology {
  const MorphologyTree* morphology = nullptr;
  std::span<const GraphSample> samples;
};
std::vector<FitnessEstimate> score_with_classifier(const ClassifierParams& params,
                                                   std::span<const ScoredMorphology> morphologies, double lambda,
                                                   ScalingMode mode);

}  // namespace tame
