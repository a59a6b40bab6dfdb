#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tame/rng.hpp"

namespace tame {

enum class EnvClass { locomotion2d, arm };
enum class JointType { hinge_y, hinge_z, fixed };

std::string_view to_string(EnvClass c);
std::string_view to_string(JointType t);
EnvClass env_class_from_string(std::string_view s);
JointType joint_type_from_string(std::string_view s);

using Vec3 = std::array<double, 3>;

/// A capsule limb. `extent` is the limb's axis vector in its parent's frame,
/// measured from the attachment point.
struct LimbNode {
  int id = 0;
  std::optional<int> parent;
  double radius = 0.05;
  Vec3 extent{0.0, 0.0, 0.0};
  int max_children = 1;

  bool operator==(const LimbNode&) const = default;
};

/// The joint that connects `child_id` to its parent limb (or to the fixed
/// base, for the root of an arm). Attributes travel with the child limb.
struct JointSpec {
  int child_id = 0;
  JointType type = JointType::hinge_y;
  double attachment = 1.0;  ///< fraction along the parent limb, [0, 1]
  double range_deg = 45.0;  ///< symmetric half-range
  double gear = 75.0;

  bool operator==(const JointSpec&) const = default;
};

/// Tree genotype. After canonicalize() limb ids equal their BFS index and
/// joints are stored in BFS order of their child limb; that joint order is the
/// label order used by the simulator, the line graph and the classifier.
struct MorphologyTree {
  EnvClass env_class = EnvClass::locomotion2d;
  std::uint64_t id = 0;
  std::vector<LimbNode> nodes;
  std::vector<JointSpec> joints;

  int limb_count() const { return static_cast<int>(nodes.size()); }
  /// Actuated joints (type != fixed); this is k in the fitness.
  int joint_count() const;
  std::vector<int> children_of(int limb_id) const;
  const LimbNode* find_limb(int limb_id) const;
  const JointSpec* joint_of(int child_id) const;

  bool operator==(const MorphologyTree&) const = default;
};

/// Per-class parameter ranges. Sampling draws from these, mutation clamps to
/// them, and validate() checks them.
struct ParameterBounds {
  double radius_min = 0.0;
  double radius_max = 0.0;
  std::array<std::pair<double, double>, 3> extent{};  // per axis, sampling range
  double extent_abs_max = 0.75;
  std::array<bool, 3> axis_free{};
  double attachment_min = 0.0;
  double attachment_max = 1.0;
  double range_min_deg = 0.0;
  double range_max_deg = 0.0;
  double gear_min = 0.0;
  double gear_max = 0.0;
  int max_children = 1;
  JointType joint_type = JointType::hinge_y;
  bool base_joint = false;   ///< root is actuated against a fixed base
  bool allow_fixed = false;  ///< fixed (static) joints permitted
};

const ParameterBounds& bounds_for(EnvClass c);

struct MorphologyLimits {
  int max_limbs = 8;
  double growth_prob = 0.3;
  int max_attempts = 200;  ///< whole-tree rejection attempts
};

MorphologyLimits default_limits(EnvClass c);

struct MutationParams {
  double geometric_prob = 0.14;
  double joint_prob = 0.07;
  double length_std = 0.125;
  double radius_std = 0.005;
  double attachment_std = 0.1;
  double range_std_deg = 5.0;
  double gear_std = 5.0;
  double grow_prob = 0.1;
  double delete_prob = 0.08;
  int max_retries = 20;
  int max_limbs = 8;
};

MutationParams default_mutation(EnvClass c);

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bernoulli bookkeeping from sample_random, counted over every attempt
/// (including rejected ones).
struct SamplingTrace {
  long root_trials = 0;
  long root_growths = 0;
  int attempts = 0;
};

MorphologyTree sample_random(Rng& rng, EnvClass env_class, const MorphologyLimits& limits,
                             SamplingTrace* trace = nullptr);

struct MutationResult {
  MorphologyTree tree;
  bool mutated = true;  ///< false when retries were exhausted and the parent came back
};

MutationResult mutate(const MorphologyTree& tree, Rng& rng, const MutationParams& params);

struct Violation {
  std::string field;
  std::string message;
};

inline constexpr double kCollisionTolerance = 1e-6;

std::vector<Violation> validate(const MorphologyTree& tree, int max_limbs);
std::vector<Violation> validate(const MorphologyTree& tree);
/// Tree-shape checks only: unique ids, single root, known parents, no cycles.
std::vector<Violation> validate_structure(const MorphologyTree& tree);

/// Renumbers limbs in BFS order (children visited by ascending old id) and
/// sorts joints to match. Requires a structurally valid tree.
MorphologyTree canonicalize(const MorphologyTree& tree);

/// Rest-pose capsule axis for every limb, indexed like `tree.nodes`.
struct Segment {
  Vec3 a;
  Vec3 b;
};
std::vector<Segment> rest_segments(const MorphologyTree& tree);
double segment_distance(const Segment& s, const Segment& t);

// Per-limb [radius, extent_x, extent_y, extent_z, attachment].
inline constexpr int kLimbFeatureDim = 5;
// Per-joint [hinge_y, hinge_z, fixed, range_rad, gear / class gear_max].
inline constexpr int kJointFeatureDim = 5;
inline constexpr int kLineGraphFeatureDim = 2 * kLimbFeatureDim + kJointFeatureDim;

/// Line graph of the morphology tree: one node per joint, in joint order.
struct LineGraph {
  int node_count = 0;
  std::vector<double> features;  ///< node_count x kLineGraphFeatureDim, row-major
  std::vector<std::pair<int, int>> edges;  ///< i < j, sorted
  std::vector<std::vector<int>> neighbors;

  const double* row(int i) const { return features.data() + i * kLineGraphFeatureDim; }
};

LineGraph to_line_graph(const MorphologyTree& tree);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& message)
      : std::runtime_error(location + ": " + message), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

inline constexpr std::string_view kMorphologySchema = "tame.morphology/1";

std::string serialize(const MorphologyTree& tree);
MorphologyTree deserialize(std::string_view document);

}  // namespace tame
