#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tame/evolution.hpp"
#include "tame/run_config.hpp"

namespace tame {

inline constexpr std::string_view kFitnessCsvHeader = "# tame.fitness v1";
inline constexpr std::string_view kAuditCsvHeader = "# tame.audit v1";
inline constexpr std::string_view kIncompleteMarker = "INCOMPLETE";

struct RunOptions {
  std::filesystem::path out;
  bool checkpoints = true;
  bool population_snapshots = true;
  bool episode_log = true;
  std::ostream* progress = nullptr;  ///< one line per generation when set
};

struct RunSummary {
  RunResult result;
  double wall_seconds = 0.0;
};

/// Runs the configured mode and writes into options.out:
///   config.resolved, fitness.csv, audit.csv, episodes.log, best.json,
///   summary.json, population/gen_NNN.json, checkpoints/gen_NNN.bin.
/// INCOMPLETE exists until every artifact is written. Throws on IO failure.
RunSummary evolve_to_directory(const RunConfig& config, const RunOptions& options);

/// Row formatters, exposed for tests.
std::string fitness_csv_row(const GenerationStats& s);
std::string audit_csv_row(int generation, const PopulationEntry& e, Mode mode);
std::string format_real(double v);

struct OracleReport {
  OracleResult oracle;
  FitnessEstimate trained;
  double mi_gap = 0.0;       ///< exact_mi - bayes_bound
  double trained_gap = 0.0;  ///< bayes_bound - trained inner term
};

/// Exact MI, per-joint Bayes bound and a freshly trained classifier's inner
/// term on the noise-free enumeration. std::length_error above the cap.
OracleReport oracle_report(const RunConfig& config, const MorphologyTree& tree, int epochs,
                           std::size_t cap = kDefaultEnumerationCap);
std::string to_text(const OracleReport& r);

/// `count` mutations of `tree`, each from its own derived stream.
std::vector<MorphologyTree> mutate_preview(const MorphologyTree& tree, std::uint64_t seed, int count,
                                           const MutationParams& params);

struct RankedMorphology {
  std::uint64_t id = 0;
  FitnessEstimate estimate;
};

/// Collects episodes for every morphology, trains one classifier on all of
/// them for config epochs x generations, and ranks by fitness.
std::vector<RankedMorphology> rank_morphologies(const RunConfig& config, std::vector<MorphologyTree> morphologies);

}  // namespace tame
