#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tame/morphology.hpp"
#include "tame/run_config.hpp"
#include "tame/runner.hpp"

namespace {

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tame::MorphologyTree load_morphology(const std::string& path) {
  try {
    return tame::deserialize(read_text(path));
  } catch (const tame::ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct Common {
  std::string config_path;
  std::string env;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::vector<std::string> ablations;
  std::string mode;
};

void add_common(CLI::App* cmd, Common& c, bool with_mode) {
  cmd->add_option("--config", c.config_path, "Run config file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--env", c.env, "Environment class when no config is given")
      ->check(CLI::IsMember({"locomotion2d", "arm"}));
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&c](const std::uint64_t& v) {
        c.seed = v;
        c.seed_set = true;
      },
      "Master seed");
  cmd->add_option("--workers", c.workers, "Rollout threads")->check(CLI::PositiveNumber);
  cmd->add_option("--ablation", c.ablations, "shared-primitive | no-reset | lambda-one | no-noise")
      ->check(CLI::IsMember({"shared-primitive", "no-reset", "lambda-one", "no-noise"}));
  if (with_mode) {
    cmd->add_option("--mode", c.mode, "Search mode")->check(CLI::IsMember({"tame", "tamr", "varea", "random"}));
  }
}

tame::RunConfig resolve(const Common& c, std::optional<tame::EnvClass> fallback) {
  tame::RunConfig cfg;
  if (!c.config_path.empty()) {
    cfg = tame::load_run_config(c.config_path);
  } else if (!c.env.empty()) {
    cfg = tame::default_run_config(tame::env_class_from_string(c.env));
  } else if (fallback) {
    cfg = tame::default_run_config(*fallback);
  } else {
    throw tame::ConfigError("either --config or --env is required");
  }
  if (c.seed_set) cfg.evolution.seed = c.seed;
  if (c.workers > 0) cfg.evolution.workers = c.workers;
  if (!c.mode.empty()) cfg.evolution.mode = tame::mode_from_string(c.mode);
  for (const auto& a : c.ablations) tame::apply_ablation(cfg, a);
  tame::check(cfg);
  return cfg;
}

int cmd_evolve(const Common& c, const std::string& out, bool quiet) {
  const auto cfg = resolve(c, std::nullopt);
  tame::RunOptions opts;
  opts.out = out;
  opts.progress = quiet ? nullptr : &std::cerr;
  const auto summary = tame::evolve_to_directory(cfg, opts);
  std::cout << "best " << summary.result.best.morphology.id << " k=" << summary.result.best.morphology.joint_count()
            << " fitness=" << tame::format_real(summary.result.best.fitness) << " env_steps=" << summary.result.env_steps
            << " wall_seconds=" << tame::format_real(summary.wall_seconds) << '\n';
  return 0;
}

int cmd_rank(const Common& c, const std::vector<std::string>& docs) {
  std::vector<tame::MorphologyTree> morphs;
  for (const auto& d : docs) morphs.push_back(load_morphology(d));
  if (morphs.empty()) return 0;
  const auto cfg = resolve(c, morphs.front().env_class);
  for (const auto& m : morphs) {
    if (m.env_class != cfg.env.env_class) throw std::runtime_error("morphology env class differs from config");
  }
  const auto ranked = tame::rank_morphologies(cfg, morphs);
  std::cout << "rank,id,k,mean_loglik,fitness\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    std::cout << i + 1 << ',' << r.id << ',' << r.estimate.k << ',' << tame::format_real(r.estimate.mean_loglik) << ','
              << tame::format_real(r.estimate.value) << '\n';
  }
  return 0;
}

int cmd_oracle(const Common& c, const std::string& doc, int epochs) {
  const auto tree = load_morphology(doc);
  const auto cfg = resolve(c, tree.env_class);
  try {
    std::cout << tame::to_text(tame::oracle_report(cfg, tree, epochs));
  } catch (const std::length_error&) {
    std::cerr << "error: instance is not enumerable (" << tree.joint_count() << " joints, cap "
              << tame::kDefaultEnumerationCap << " outcomes)\n";
    return 2;
  }
  return 0;
}

int cmd_mutate_preview(const std::string& doc, std::uint64_t seed, int count, const std::string& out_dir) {
  const auto tree = load_morphology(doc);
  const auto previews = tame::mutate_preview(tree, seed, count, tame::default_mutation(tree.env_class));
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < previews.size(); ++i) {
    const auto text = tame::serialize(previews[i]);
    if (out_dir.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(std::filesystem::path(out_dir) / ("mutation_" + std::to_string(i) + ".json"), std::ios::binary);
      f << text;
      if (!f) throw std::runtime_error("cannot write into " + out_dir);
    }
  }
  return 0;
}

int cmd_inspect(const std::string& doc) {
  const auto tree = load_morphology(doc);
  const auto g = tame::to_line_graph(tree);
  std::cout << "env = " << tame::to_string(tree.env_class) << '\n'
            << "id = " << tree.id << '\n'
            << "limbs = " << tree.nodes.size() << '\n'
            << "joints = " << tree.joint_count() << '\n'
            << "line_graph_edges = " << g.edges.size() << '\n';
  for (const auto& j : tree.joints) {
    std::cout << "joint child=" << j.child_id << " type=" << tame::to_string(j.type)
              << " range_deg=" << tame::format_real(j.range_deg) << " gear=" << tame::format_real(j.gear) << '\n';
  }
  const auto violations = tame::validate(tree);
  std::cout << "valid = " << (violations.empty() ? "true" : "false") << '\n';
  for (const auto& v : violations) std::cout << "violation " << v.field << ": " << v.message << '\n';
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-free morphology search"};
  app.require_subcommand(1);

  Common evolve_opts;
  std::string out;
  bool quiet = false;
  auto* evolve = app.add_subcommand("evolve", "Run a search and write artifacts to --out");
  add_common(evolve, evolve_opts, true);
  evolve->add_option("--out", out, "Output directory")->required();
  evolve->add_flag("--quiet", quiet, "No per-generation progress");

  Common rank_opts;
  std::vector<std::string> rank_docs;
  auto* rank = app.add_subcommand("rank", "Rank morphology documents with one shared classifier");
  add_common(rank, rank_opts, false);
  rank->add_option("documents", rank_docs, "Morphology documents")->required()->check(CLI::ExistingFile);

  Common oracle_opts;
  std::string oracle_doc;
  int oracle_epochs = 300;
  auto* oracle = app.add_subcommand("oracle", "Exact MI, Bayes bound and trained estimate for one morphology");
  add_common(oracle, oracle_opts, false);
  oracle->add_option("document", oracle_doc, "Morphology document")->required();
  oracle->add_option("--epochs", oracle_epochs, "Classifier epochs on the enumeration")->check(CLI::NonNegativeNumber);

  std::string preview_doc;
  std::uint64_t preview_seed = 0;
  int preview_count = 1;
  std::string preview_out;
  auto* preview = app.add_subcommand("mutate-preview", "Emit mutations of a morphology");
  preview->add_option("document", preview_doc, "Morphology document")->required();
  preview->add_option("--seed", preview_seed, "Seed");
  preview->add_option("--count", preview_count, "Number of mutations")->check(CLI::NonNegativeNumber);
  preview->add_option("--out", preview_out, "Directory for mutation_N.json (default stdout)");

  std::string inspect_doc;
  auto* inspect = app.add_subcommand("inspect", "Summarize and validate a morphology document");
  inspect->add_option("document", inspect_doc, "Morphology document")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) return cmd_evolve(evolve_opts, out, quiet);
    if (*rank) return cmd_rank(rank_opts, rank_docs);
    if (*oracle) return cmd_oracle(oracle_opts, oracle_doc, oracle_epochs);
    if (*preview) return cmd_mutate_preview(preview_doc, preview_seed, preview_count, preview_out);
    if (*inspect) return cmd_inspect(inspect_doc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
