#include "tame/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

namespace tame {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::tame: return "tame";
    case Mode::tamr: return "tamr";
    case Mode::varea: return "varea";
    case Mode::random: return "random";
  }
  return "?";
}

Mode mode_from_string(std::string_view s) {
  if (s == "tame") return Mode::tame;
  if (s == "tamr") return Mode::tamr;
  if (s == "varea") return Mode::varea;
  if (s == "random") return Mode::random;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

EvolutionConfig default_evolution(EnvClass c) {
  EvolutionConfig cfg;
  cfg.lambda = c == EnvClass::arm ? 0.2 : 0.25;
  cfg.limits = default_limits(c);
  cfg.mutation = default_mutation(c);
  return cfg;
}

std::size_t best_index(std::span<const PopulationEntry> population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    const auto& a = population[i];
    const auto& b = population[best];
    if (a.fitness > b.fitness || (a.fitness == b.fitness && a.morphology.id < b.morphology.id)) best = i;
  }
  return best;
}

std::vector<std::size_t> select_parents(std::span<const PopulationEntry> population, double fraction, int count,
                                        Rng& rng) {
  if (population.empty()) throw std::invalid_argument("select_parents: empty population");
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (std::isfinite(population[i].fitness)) ranked.push_back(i);
  }
  std::size_t pool = 0;
  if (ranked.empty()) {
    ranked.resize(population.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
    pool = ranked.size();
  } else {
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = population[a];
      const auto& y = population[b];
      if (x.fitness != y.fitness) return x.fitness > y.fitness;
      return x.morphology.id < y.morphology.id;
    });
    const auto want =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(population.size()) - 1e-9));
    pool = std::clamp<std::size_t>(want, 1, ranked.size());
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(ranked[uniform_index(rng, pool)]);
  return out;
}

std::vector<EpisodeRecord> collect_episodes(const EnvConfig& env, std::span<const MorphologyTree> morphologies,
                                            int episodes, std::uint64_t seed, int workers) {
  const std::size_t per = static_cast<std::size_t>(std::max(0, episodes));
  const std::size_t total = morphologies.size() * per;
  std::vector<EpisodeRecord> out(total);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < total; i += stride) {
      const auto& m = morphologies[i / per];
      out[i] = run_episode(env, m, derive_seed(seed, m.id, i % per));
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(std::max<std::size_t>(total, 1))));
  if (threads <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<FitnessEstimate> score_with_classifier(const ClassifierParams& params,
                                                   std::span<const ScoredMorphology> morphologies, double lambda,
                                                   ScalingMode mode) {
  std::vector<FitnessEstimate> out;
  out.reserve(morphologies.size());
  for (const auto& m : morphologies) {
    out.push_back(estimate(params, m.samples, m.morphology->joint_count(), lambda, mode));
  }
  return out;
}

namespace {

constexpr std::uint64_t kEvolutionStream = 0x65766f6c;
constexpr std::uint64_t kClassifierStream = 0x636c7366;
constexpr std::uint64_t kEpisodeStream = 0x65706973;

// Shared bookkeeping for every mode: the ever-growing population, the global
// episode dataset and its classifier samples.
class RunState {
 public:
  RunState(const EvolutionConfig& config, const EnvConfig& env)
      : config_(config),
        env_(env),
        rng_(derive_seed(config.seed, kEvolutionStream)),
        classifier_rng_(derive_seed(config.seed, kClassifierStream)),
        episode_seed_(derive_seed(config.seed, kEpisodeStream)) {
    if (config.generations < 1 || config.population < 1 || config.episodes < 1) {
      throw std::invalid_argument("evolution: generations, population and episodes must be positive");
    }
    if (!(config.parent_fraction > 0.0 && config.parent_fraction <= 1.0)) {
      throw std::invalid_argument("evolution: parent_fraction must lie in (0, 1]");
    }
  }

  Rng& rng() { return rng_; }
  RunResult& result() { return result_; }

  MorphologyTree random_morphology() {
    MorphologyTree t = sample_random(rng_, env_.env_class, config_.limits);
    t.id = next_id_++;
    return t;
  }

  MorphologyTree mutated_child(const MorphologyTree& parent) {
    MutationResult r = mutate(parent, rng_, config_.mutation);
    r.tree.id = next_id_++;
    return std::move(r.tree);
  }

  void add(std::vector<MorphologyTree> fresh, int generation) {
    auto records = collect_episodes(env_, fresh, config_.episodes, episode_seed_, config_.workers);
    result_.env_steps += static_cast<std::uint64_t>(records.size()) * static_cast<std::uint64_t>(env_.episode_len);
    std::size_t cursor = 0;
    for (auto& m : fresh) {
      PopulationEntry e;
      e.born_generation = generation;
      e.episode_begin = result_.episodes.size();
      auto graph = std::make_shared<const LineGraph>(to_line_graph(m));
      const std::size_t sample_begin = samples_.size();
      for (int i = 0; i < config_.episodes; ++i, ++cursor) {
        if (records[cursor].valid) samples_.push_back(make_sample(graph, records[cursor]));
        result_.episodes.push_back(std::move(records[cursor]));
      }
      e.episode_end = result_.episodes.size();
      sample_ranges_.emplace_back(sample_begin, samples_.size());
      e.morphology = std::move(m);
      result_.population.push_back(std::move(e));
    }
  }

  Classifier& classifier() {
    if (!classifier_) {
      classifier_ = std::make_unique<Classifier>(
          classifier_dims_for(env_.env_class, config_.hidden, config_.layers), config_.train);
    }
    return *classifier_;
  }
  const Classifier* classifier_if_any() const { return classifier_.get(); }

  void reset_classifier() { classifier().reset(classifier_rng_); }

  double train(int epochs) { return classifier().fit(samples_, classifier_rng_, epochs).final_loss(); }

  void rescore_with_classifier() {
    const auto sums = batch_episode_loglik(classifier().params(), samples_);
    for (std::size_t i = 0; i < result_.population.size(); ++i) {
      auto& e = result_.population[i];
      const auto [lo, hi] = sample_ranges_[i];
      e.estimate = estimate_from_logliks(std::span<const double>(sums).subspan(lo, hi - lo),
                                         e.morphology.joint_count(), config_.lambda, config_.scaling);
      e.fitness = e.estimate.value;
    }
  }

  void rescore_with_variance() {
    std::vector<StateSummary> states;
    for (auto& e : result_.population) {
      states.clear();
      for (std::size_t i = e.episode_begin; i < e.episode_end; ++i) {
        if (result_.episodes[i].valid) states.push_back(result_.episodes[i].state);
      }
      e.fitness = variance_fitness(states);
      e.estimate = FitnessEstimate{};
      e.estimate.k = e.morphology.joint_count();
      e.estimate.value = e.fitness;
    }
  }

  GenerationStats record(int generation, double loss) {
    GenerationStats s;
    s.generation = generation;
    s.population = result_.population.size();
    s.classifier_loss = loss;
    s.env_steps = result_.env_steps;
    double total = 0.0;
    std::size_t finite = 0;
    for (const auto& e : result_.population) {
      if (std::isfinite(e.fitness)) {
        total += e.fitness;
        ++finite;
      }
    }
    if (finite > 0) s.mean_fitness = total / static_cast<double>(finite);
    if (!result_.population.empty()) {
      const auto& best = result_.population[best_index(result_.population)];
      s.max_fitness = best.fitness;
      s.best_id = best.morphology.id;
    }
    result_.history.push_back(s);
    return s;
  }

  RunResult finish() {
    if (!result_.population.empty()) result_.best = result_.population[best_index(result_.population)];
    return std::move(result_);
  }

 private:
  const EvolutionConfig& config_;
  const EnvConfig& env_;
  Rng rng_;
  Rng classifier_rng_;
  std::uint64_t episode_seed_;
  std::uint64_t next_id_ = 0;
  RunResult result_;
  std::vector<GraphSample> samples_;
  std::vector<std::pair<std::size_t, std::size_t>> sample_ranges_;
  std::unique_ptr<Classifier> classifier_;
};

bool reset_due(int generation, int frequency) {
  if (generation == 0) return true;
  return frequency > 0 && generation % frequency == 0;
}

// Shared generational loop of tame and varea.
RunResult evolve(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback,
                 bool variance_objective) {
  RunState state(config, env);
  for (int g = 0; g < config.generations; ++g) {
    std::vector<MorphologyTree> fresh;
    fresh.reserve(config.population);
    if (state.result().population.empty()) {
      for (int i = 0; i < config.population; ++i) fresh.push_back(state.random_morphology());
    } else {
      const auto parents =
          select_parents(state.result().population, config.parent_fraction, config.population, state.rng());
      for (std::size_t p : parents) fresh.push_back(state.mutated_child(state.result().population[p].morphology));
    }
    state.add(std::move(fresh), g);

    double loss = std::numeric_limits<double>::quiet_NaN();
    if (variance_objective) {
      state.rescore_with_variance();
    } else {
      if (reset_due(g, config.reset_frequency)) state.reset_classifier();
      loss = state.train(config.train.epochs);
      state.rescore_with_classifier();
    }
    const auto stats = state.record(g, loss);
    if (callback) callback(stats, state.result().population, state.classifier_if_any());
  }
  return state.finish();
}

}  // namespace

RunResult run_tame(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback) {
  return evolve(config, env, callback, false);
}

RunResult run_varea(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback) {
  return evolve(config, env, callback, true);
}

RunResult run_tamr(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback) {
  RunState state(config, env);
  std::vector<MorphologyTree> fresh;
  const int total = config.generations * config.population;
  fresh.reserve(total);
  for (int i = 0; i < total; ++i) fresh.push_back(state.random_morphology());
  state.add(std::move(fresh), 0);

  // Same epoch budget and reset cadence as tame, measured in generation
  // equivalents of train.epochs each.
  for (int g = 0; g < config.generations; ++g) {
    if (reset_due(g, config.reset_frequency)) state.reset_classifier();
    const double loss = state.train(config.train.epochs);
    state.rescore_with_classifier();
    const auto stats = state.record(g, loss);
    if (callback) callback(stats, state.result().population, state.classifier_if_any());
  }
  return state.finish();
}

RunResult run_random(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback) {
  RunState state(config, env);
  PopulationEntry e;
  e.morphology = state.random_morphology();
  e.estimate.k = e.morphology.joint_count();
  state.result().population.push_back(std::move(e));
  const auto stats = state.record(0, std::numeric_limits<double>::quiet_NaN());
  if (callback) callback(stats, state.result().population, nullptr);
  return state.finish();
}

RunResult run(const EvolutionConfig& config, const EnvConfig& env, const GenerationCallback& callback) {
  switch (config.mode) {
    case Mode::tame: return run_tame(config, env, callback);
    case Mode::tamr: return run_tamr(config, env, callback);
    case Mode::varea: return run_varea(config, env, callback);
    case Mode::random: return run_random(config, env, callback);
  }
  throw std::invalid_argument("run: unknown mode");
}

}  // namespace tame
