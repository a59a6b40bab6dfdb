#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "tame/envsim.hpp"

namespace tame {

namespace {

std::string exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, int line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("episode log line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

EpisodeLogWriter::EpisodeLogWriter(std::ostream& out, EnvClass env_class)
    : out_(out), dim_(state_dim(env_class)) {
  out_ << kEpisodeLogHeader << " env=" << to_string(env_class) << " state_dim=" << dim_ << "\n";
  out_ << "morphology_id,seed,valid,assignment,noise_applied";
  for (int i = 0; i < dim_; ++i) out_ << ",s" << i;
  out_ << "\n";
}

void EpisodeLogWriter::append(const EpisodeRecord& r) {
  out_ << r.morphology_id << ',' << r.seed << ',' << (r.valid ? 1 : 0) << ',';
  for (std::size_t i = 0; i < r.assignment.size(); ++i) {
    if (i) out_ << ' ';
    out_ << r.assignment.primitives[i];
  }
  out_ << ',' << (r.state.noise_applied ? 1 : 0);
  for (double v : r.state.values) out_ << ',' << exact(v);
  out_ << '\n';
}

EpisodeLog read_episode_log(std::istream& in) {
  EpisodeLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind(kEpisodeLogHeader, 0) != 0) {
    throw std::runtime_error("episode log: missing '" + std::string(kEpisodeLogHeader) + "' header");
  }
  const auto env_pos = line.find("env=");
  if (env_pos == std::string::npos) throw std::runtime_error("episode log: header lacks env=");
  const auto env_end = line.find(' ', env_pos);
  log.env_class = env_class_from_string(line.substr(env_pos + 4, env_end - env_pos - 4));
  const int dim = state_dim(log.env_class);

  std::getline(in, line);  // column names
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (static_cast<int>(cols.size()) != 5 + dim) {
      throw std::runtime_error("episode log line " + std::to_string(lineno) + ": expected " +
                               std::to_string(5 + dim) + " fields");
    }
    EpisodeRecord r;
    r.morphology_id = parse_number<std::uint64_t>(cols[0], lineno);
    r.seed = parse_number<std::uint64_t>(cols[1], lineno);
    r.valid = cols[2] == "1";
    for (const auto& a : split(cols[3], ' ')) {
      if (!a.empty()) r.assignment.primitives.push_back(parse_number<int>(a, lineno));
    }
    r.state.noise_applied = cols[4] == "1";
    for (int i = 0; i < dim; ++i) r.state.values.push_back(parse_number<double>(cols[5 + i], lineno));
    log.records.push_back(std::move(r));
  }
  return log;
}

}  // namespace tame
