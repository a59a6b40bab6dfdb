#include "tame/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace tame {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fitness_csv_row(const GenerationStats& s) {
  std::string row = std::to_string(s.generation);
  row += ',' + std::to_string(s.population);
  row += ',' + format_real(s.mean_fitness);
  row += ',' + format_real(s.max_fitness);
  row += ',' + std::to_string(s.best_id);
  row += ',' + format_real(s.classifier_loss);
  row += ',' + std::to_string(s.env_steps);
  return row;
}

std::string audit_csv_row(int generation, const PopulationEntry& e, Mode mode) {
  std::string row = std::to_string(generation);
  row += ',' + std::to_string(e.morphology.id);
  row += ',' + std::to_string(e.morphology.joint_count());
  row += ',' + format_real(e.estimate.mean_loglik);
  row += ',' + format_real(e.fitness);
  row += ',';
  row += to_string(mode);
  return row;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string generation_name(int g, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%03d%s", g, ext);
  return buf;
}

ordered_json real_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string population_snapshot(const GenerationStats& s, std::span<const PopulationEntry> population) {
  ordered_json doc;
  doc["schema"] = "tame.population/1";
  doc["generation"] = s.generation;
  auto& entries = doc["entries"] = ordered_json::array();
  for (const auto& e : population) {
    ordered_json item;
    item["id"] = e.morphology.id;
    item["born_generation"] = e.born_generation;
    item["k"] = e.morphology.joint_count();
    item["fitness"] = real_or_null(e.fitness);
    item["mean_loglik"] = real_or_null(e.estimate.mean_loglik);
    item["morphology"] = ordered_json::parse(serialize(e.morphology));
    entries.push_back(std::move(item));
  }
  return doc.dump(1) + "\n";
}

}  // namespace

RunSummary evolve_to_directory(const RunConfig& config, const RunOptions& options) {
  check(config);
  const fs::path& out = options.out;
  if (out.empty()) throw std::runtime_error("output directory not set");
  fs::create_directories(out);
  const fs::path marker = out / std::string(kIncompleteMarker);
  write_file(marker, "run in progress\n");
  write_file(out / "config.resolved", to_text(config));
  if (options.population_snapshots) fs::create_directories(out / "population");
  if (options.checkpoints) fs::create_directories(out / "checkpoints");

  auto fitness_csv = open_out(out / "fitness.csv");
  fitness_csv << kFitnessCsvHeader << "\ngeneration,population,mean_fitness,max_fitness,best_id,classifier_loss,env_steps\n";
  auto audit_csv = open_out(out / "audit.csv");
  audit_csv << kAuditCsvHeader << "\ngeneration,id,k,mean_loglik,value,mode\n";

  const auto start = std::chrono::steady_clock::now();
  const Mode mode = config.evolution.mode;
  auto callback = [&](const GenerationStats& s, std::span<const PopulationEntry> population,
                      const Classifier* classifier) {
    fitness_csv << fitness_csv_row(s) << '\n';
    for (const auto& e : population) audit_csv << audit_csv_row(s.generation, e, mode) << '\n';
    fitness_csv.flush();
    audit_csv.flush();
    if (options.population_snapshots) {
      write_file(out / "population" / generation_name(s.generation, ".json"), population_snapshot(s, population));
    }
    if (options.checkpoints && classifier != nullptr) {
      auto ck = open_out(out / "checkpoints" / generation_name(s.generation, ".bin"));
      save_checkpoint(ck, classifier->params());
    }
    if (options.progress != nullptr) {
      *options.progress << "gen " << s.generation << " pop " << s.population << " max " << format_real(s.max_fitness)
                        << " mean " << format_real(s.mean_fitness) << " loss " << format_real(s.classifier_loss)
                        << '\n';
    }
  };

  RunSummary summary;
  summary.result = run(config.evolution, config.env, callback);
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!fitness_csv || !audit_csv) throw std::runtime_error("write failed in " + out.string());

  if (options.episode_log) {
    auto log = open_out(out / "episodes.log");
    EpisodeLogWriter writer(log, config.env.env_class);
    for (const auto& r : summary.result.episodes) writer.append(r);
    if (!log) throw std::runtime_error("write failed: episodes.log");
  }
  write_file(out / "best.json", serialize(summary.result.best.morphology));

  ordered_json s;
  s["schema"] = "tame.summary/1";
  s["mode"] = std::string(to_string(mode));
  s["env"] = std::string(to_string(config.env.env_class));
  s["seed"] = config.evolution.seed;
  s["generations"] = config.evolution.generations;
  s["population"] = summary.result.population.size();
  s["episodes"] = summary.result.episodes.size();
  s["env_steps"] = summary.result.env_steps;
  s["best_id"] = summary.result.best.morphology.id;
  s["best_k"] = summary.result.best.morphology.joint_count();
  s["best_fitness"] = real_or_null(summary.result.best.fitness);
  s["wall_seconds"] = summary.wall_seconds;
  write_file(out / "summary.json", s.dump(2) + "\n");

  fs::remove(marker);
  return summary;
}

OracleReport oracle_report(const RunConfig& config, const MorphologyTree& tree, int epochs, std::size_t cap) {
  OracleReport r;
  r.oracle = exact_mi_oracle(config.env, tree, cap);
  Rng rng(derive_seed(config.evolution.seed, 0x6f72636c));
  const auto dims = classifier_dims_for(config.env.env_class, config.evolution.hidden, config.evolution.layers);
  r.trained = trained_enumeration_estimate(config.env, tree, dims, config.evolution.train, epochs, rng,
                                           config.evolution.lambda, config.evolution.scaling, cap);
  r.mi_gap = r.oracle.exact_mi - r.oracle.bayes_bound;
  r.trained_gap = r.oracle.bayes_bound - r.trained.inner();
  return r;
}

std::string to_text(const OracleReport& r) {
  std::ostringstream o;
  o << "k = " << r.oracle.k << '\n'
    << "outcomes = " << r.oracle.outcome_count << '\n'
    << "distinct_states = " << r.oracle.distinct_states << '\n'
    << "exact_mi = " << format_real(r.oracle.exact_mi) << '\n'
    << "bayes_bound = " << format_real(r.oracle.bayes_bound) << '\n'
    << "trained_inner = " << format_real(r.trained.inner()) << '\n'
    << "trained_fitness = " << format_real(r.trained.value) << '\n'
    << "gap_mi_minus_bound = " << format_real(r.mi_gap) << '\n'
    << "gap_bound_minus_trained = " << format_real(r.trained_gap) << '\n';
  return o.str();
}

std::vector<MorphologyTree> mutate_preview(const MorphologyTree& tree, std::uint64_t seed, int count,
                                           const MutationParams& params) {
  if (count < 0) throw std::invalid_argument("mutate_preview: negative count");
  std::vector<MorphologyTree> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto r = mutate(tree, rng, params);
    r.tree.id = tree.id + 1 + static_cast<std::uint64_t>(i);
    out.push_back(std::move(r.tree));
  }
  return out;
}

std::vector<RankedMorphology> rank_morphologies(const RunConfig& config, std::vector<MorphologyTree> morphologies) {
  check(config);
  const auto& evo = config.evolution;
  const auto records =
      collect_episodes(config.env, morphologies, evo.episodes, derive_seed(evo.seed, 0x72616e6b), evo.workers);
  std::vector<GraphSample> samples;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t cursor = 0;
  for (const auto& m : morphologies) {
    auto graph = std::make_shared<const LineGraph>(to_line_graph(m));
    const std::size_t begin = samples.size();
    for (int e = 0; e < evo.episodes; ++e, ++cursor) {
      if (records[cursor].valid) samples.push_back(make_sample(graph, records[cursor]));
    }
    ranges.emplace_back(begin, samples.size());
  }
  // Epochs since the last reset in an equivalent ranking-only run.
  const int blocks = evo.reset_frequency > 0 ? (evo.generations - 1) % evo.reset_frequency + 1 : evo.generations;
  Rng rng(derive_seed(evo.seed, 0x636c7366));
  Classifier c(classifier_dims_for(config.env.env_class, evo.hidden, evo.layers), evo.train);
  c.reset(rng);
  c.fit(samples, rng, evo.train.epochs * blocks);

  std::vector<RankedMorphology> out;
  for (std::size_t i = 0; i < morphologies.size(); ++i) {
    const auto [lo, hi] = ranges[i];
    out.push_back({morphologies[i].id,
                   estimate(c.params(), std::span<const GraphSample>(samples).subspan(lo, hi - lo),
                            morphologies[i].joint_count(), evo.lambda, evo.scaling)});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedMorphology& a, const RankedMorphology& b) {
    if (a.estimate.value != b.estimate.value) return a.estimate.value > b.estimate.value;
    return a.id < b.id;
  });
  return out;
}

}  // namespace tame
