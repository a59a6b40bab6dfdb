#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tame/morphology.hpp"
#include "tame/rng.hpp"

namespace tame {

enum class PrimitiveKind { cosine, constant };

struct ActionPrimitive {
  PrimitiveKind kind = PrimitiveKind::constant;
  double frequency = 0.0;  // rad / step
  double phase = 0.0;      // rad
  double torque = 0.0;     // [-1, 1]
};

inline constexpr int kPrimitiveCount = 4;

/// Locomotion joints use cos(f t + phase) with f in {pi/30, pi/15} and phase
/// in {0, pi}; arm joints use constant torques {-1, -0.5, 0.5, 1}.
const std::array<ActionPrimitive, kPrimitiveCount>& vocabulary(EnvClass c);

double primitive_signal(const ActionPrimitive& p, int step);

/// One primitive index per actuated joint, in canonical joint order.
struct ActionAssignment {
  std::vector<int> primitives;

  std::size_t size() const { return primitives.size(); }
  bool operator==(const ActionAssignment&) const = default;
};

ActionAssignment sample_assignment(int k, Rng& rng, bool shared_primitive = false);

struct StateSummary {
  std::vector<double> values;
  bool noise_applied = false;

  bool operator==(const StateSummary&) const = default;
};

/// arm: end effector (x, y). locomotion2d: root (x, z), mean joint (x, z),
/// bounding box width and height.
int state_dim(EnvClass c);

struct EnvConfig {
  EnvClass env_class = EnvClass::locomotion2d;
  int episode_len = 350;
  double noise_std = 0.05;
  bool shared_primitive = false;
  double dt = 0.02;
  double damping = 0.1;
  double anchor_threshold = 0.02;
};

EnvConfig default_env(EnvClass c);

class RolloutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point2 = std::array<double, 2>;
/// Called after every integration step with the world-frame limb endpoints
/// (start, end per limb).
using StepObserver = std::function<void(int step, std::span<const Point2> endpoints)>;

/// Runs one open-loop episode. The final summary gets N(0, noise_std) added
/// once, drawn from a stream seeded by `seed`; with noise_std == 0 the seed is
/// irrelevant.
StateSummary rollout(const EnvConfig& env, const MorphologyTree& tree, const ActionAssignment& assignment,
                     std::uint64_t seed, const StepObserver& observer = {});

inline constexpr std::size_t kDefaultEnumerationCap = 4096;

/// Every assignment in lexicographic order (joint 0 most significant) with
/// its noise-free terminal summary. Throws std::length_error above `cap`.
std::vector<std::pair<ActionAssignment, StateSummary>> enumerate_outcomes(
    const EnvConfig& env, const MorphologyTree& tree, std::size_t cap = kDefaultEnumerationCap);

struct EpisodeRecord {
  std::uint64_t morphology_id = 0;
  ActionAssignment assignment;
  StateSummary state;
  std::uint64_t seed = 0;
  bool valid = true;

  bool operator==(const EpisodeRecord&) const = default;
};

/// Draws the assignment from `seed` and rolls it out; a diverged rollout is
/// returned with valid = false instead of throwing.
EpisodeRecord run_episode(const EnvConfig& env, const MorphologyTree& tree, std::uint64_t seed);

// Episode log: a versioned header line, a column line, then one
// comma-separated record per episode:
//   morphology_id,seed,valid,assignment(space separated),noise_applied,s0,...,s{d-1}
inline constexpr std::string_view kEpisodeLogHeader = "# tame.episodes v1";

class EpisodeLogWriter {
 public:
  EpisodeLogWriter(std::ostream& out, EnvClass env_class);
  void append(const EpisodeRecord& record);

 private:
  std::ostream& out_;
  int dim_;
};

struct EpisodeLog {
  EnvClass env_class = EnvClass::locomotion2d;
  std::vector<EpisodeRecord> records;
};

EpisodeLog read_episode_log(std::istream& in);

}  // namespace tame
