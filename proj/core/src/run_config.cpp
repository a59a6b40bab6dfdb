#include "tame/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace tame {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <typename T>
T parse_number(std::string_view v, const std::string& where) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(where + ": cannot parse '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + std::string(v) + "'");
}

struct Field {
  std::string_view key;
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define TAME_INT(name, expr)                                                                          \
  Field {                                                                                             \
    name, [](RunConfig& c, std::string_view v, const std::string& w) { expr = parse_number<int>(v, w); }, \
        [](const RunConfig& c) { return std::to_string(expr); }                                      \
  }
#define TAME_REAL(name, expr)                                                                             \
  Field {                                                                                                 \
    name, [](RunConfig& c, std::string_view v, const std::string& w) { expr = parse_number<double>(v, w); }, \
        [](const RunConfig& c) { return fmt(expr); }                                                     \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"env", [](RunConfig&, std::string_view, const std::string&) {},
            [](const RunConfig& c) { return std::string(to_string(c.env.env_class)); }},
      TAME_INT("episode_len", c.env.episode_len),
      TAME_REAL("noise_std", c.env.noise_std),
      Field{"shared_primitive",
            [](RunConfig& c, std::string_view v, const std::string& w) { c.env.shared_primitive = parse_bool(v, w); },
            [](const RunConfig& c) { return std::string(c.env.shared_primitive ? "true" : "false"); }},
      TAME_REAL("dt", c.env.dt),
      TAME_REAL("damping", c.env.damping),
      Field{"max_limbs",
            [](RunConfig& c, std::string_view v, const std::string& w) {
              c.evolution.limits.max_limbs = parse_number<int>(v, w);
              c.evolution.mutation.max_limbs = c.evolution.limits.max_limbs;
            },
            [](const RunConfig& c) { return std::to_string(c.evolution.limits.max_limbs); }},
      TAME_REAL("growth_prob", c.evolution.limits.growth_prob),
      TAME_INT("generations", c.evolution.generations),
      TAME_INT("population", c.evolution.population),
      TAME_INT("episodes", c.evolution.episodes),
      TAME_REAL("lambda", c.evolution.lambda),
      Field{"scaling",
            [](RunConfig& c, std::string_view v, const std::string& w) {
              try {
                c.evolution.scaling = scaling_mode_from_string(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(w + ": " + e.what());
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.evolution.scaling)); }},
      TAME_INT("reset_freq", c.evolution.reset_frequency),
      TAME_REAL("parent_fraction", c.evolution.parent_fraction),
      TAME_REAL("lr", c.evolution.train.learning_rate),
      TAME_INT("batch_size", c.evolution.train.batch_size),
      TAME_INT("epochs", c.evolution.train.epochs),
      TAME_INT("hidden", c.evolution.hidden),
      TAME_INT("layers", c.evolution.layers),
      TAME_REAL("geometric_prob", c.evolution.mutation.geometric_prob),
      TAME_REAL("joint_prob", c.evolution.mutation.joint_prob),
      TAME_REAL("length_std", c.evolution.mutation.length_std),
      TAME_REAL("grow_prob", c.evolution.mutation.grow_prob),
      TAME_REAL("delete_prob", c.evolution.mutation.delete_prob),
      Field{"mode",
            [](RunConfig& c, std::string_view v, const std::string& w) {
              try {
                c.evolution.mode = mode_from_string(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(w + ": " + e.what());
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.evolution.mode)); }},
      Field{"seed",
            [](RunConfig& c, std::string_view v, const std::string& w) {
              c.evolution.seed = parse_number<std::uint64_t>(v, w);
            },
            [](const RunConfig& c) { return std::to_string(c.evolution.seed); }},
      TAME_INT("workers", c.evolution.workers),
  };
  return table;
}

#undef TAME_INT
#undef TAME_REAL

}  // namespace

RunConfig default_run_config(EnvClass c) {
  RunConfig r;
  r.env = default_env(c);
  r.evolution = default_evolution(c);
  return r;
}

RunConfig parse_run_config(std::string_view text) {
  struct Line {
    int number;
    std::string key;
    std::string value;
  };
  std::vector<Line> lines;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view s = raw;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = "line " + std::to_string(number);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    Line l{number, std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1)))};
    if (l.key.empty()) throw ConfigError(where + ": empty key");
    if (auto [it, fresh] = seen.emplace(l.key, number); !fresh) {
      throw ConfigError(where + ": duplicate key '" + l.key + "' (first on line " + std::to_string(it->second) + ")");
    }
    lines.push_back(std::move(l));
  }

  EnvClass cls = EnvClass::locomotion2d;
  for (const auto& l : lines) {
    if (l.key != "env") continue;
    try {
      cls = env_class_from_string(l.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  RunConfig config = default_run_config(cls);
  for (const auto& l : lines) {
    const std::string where = "line " + std::to_string(l.number) + " (" + l.key + ")";
    const Field* f = nullptr;
    for (const auto& candidate : fields()) {
      if (candidate.key == l.key) f = &candidate;
    }
    if (f == nullptr) throw ConfigError("line " + std::to_string(l.number) + ": unknown key '" + l.key + "'");
    f->set(config, l.value, where);
  }
  check(config);
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_text(const RunConfig& config) {
  std::string out = "# tame run config\n";
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

void apply_ablation(RunConfig& config, std::string_view name) {
  if (name == "shared-primitive") {
    config.env.shared_primitive = true;
  } else if (name == "no-reset") {
    config.evolution.reset_frequency = 0;
  } else if (name == "lambda-one") {
    config.evolution.lambda = 1.0;
  } else if (name == "no-noise") {
    config.env.noise_std = 0.0;
  } else {
    throw ConfigError("unknown ablation '" + std::string(name) +
                      "' (expected shared-primitive, no-reset, lambda-one or no-noise)");
  }
}

void check(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  const auto& e = c.evolution;
  require(c.env.episode_len > 0, "episode_len must be positive");
  require(c.env.noise_std >= 0.0 && std::isfinite(c.env.noise_std), "noise_std must be finite and >= 0");
  require(c.env.dt > 0.0, "dt must be positive");
  require(e.generations > 0, "generations must be positive");
  require(e.population > 0, "population must be positive");
  require(e.episodes > 0, "episodes must be positive");
  require(e.parent_fraction > 0.0 && e.parent_fraction <= 1.0, "parent_fraction must lie in (0, 1]");
  require(e.lambda >= 0.0 && e.lambda <= 1.0, "lambda must lie in [0, 1]");
  require(e.reset_frequency >= 0, "reset_freq must be >= 0");
  require(e.train.learning_rate > 0.0, "lr must be positive");
  require(e.train.batch_size > 0, "batch_size must be positive");
  require(e.train.epochs >= 0, "epochs must be >= 0");
  require(e.hidden > 0 && e.layers > 0, "hidden and layers must be positive");
  require(e.limits.max_limbs >= 1, "max_limbs must be >= 1");
  require(e.limits.growth_prob >= 0.0 && e.limits.growth_prob <= 1.0, "growth_prob must lie in [0, 1]");
  require(e.workers >= 1, "workers must be >= 1");
}

}  // namespace tame
