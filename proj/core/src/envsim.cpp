#include "tame/envsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tame {

const std::array<ActionPrimitive, kPrimitiveCount>& vocabulary(EnvClass c) {
  constexpr double pi = std::numbers::pi;
  static const std::array<ActionPrimitive, kPrimitiveCount> cosines{{
      {PrimitiveKind::cosine, pi / 30.0, 0.0, 0.0},
      {PrimitiveKind::cosine, pi / 30.0, pi, 0.0},
      {PrimitiveKind::cosine, pi / 15.0, 0.0, 0.0},
      {PrimitiveKind::cosine, pi / 15.0, pi, 0.0},
  }};
  static const std::array<ActionPrimitive, kPrimitiveCount> torques{{
      {PrimitiveKind::constant, 0.0, 0.0, -1.0},
      {PrimitiveKind::constant, 0.0, 0.0, -0.5},
      {PrimitiveKind::constant, 0.0, 0.0, 0.5},
      {PrimitiveKind::constant, 0.0, 0.0, 1.0},
  }};
  return c == EnvClass::arm ? torques : cosines;
}

double primitive_signal(const ActionPrimitive& p, int step) {
  if (p.kind == PrimitiveKind::constant) return p.torque;
  return std::cos(p.frequency * static_cast<double>(step) + p.phase);
}

ActionAssignment sample_assignment(int k, Rng& rng, bool shared_primitive) {
  ActionAssignment a;
  a.primitives.resize(static_cast<std::size_t>(k));
  if (shared_primitive) {
    std::fill(a.primitives.begin(), a.primitives.end(), static_cast<int>(uniform_index(rng, kPrimitiveCount)));
  } else {
    for (auto& p : a.primitives) p = static_cast<int>(uniform_index(rng, kPrimitiveCount));
  }
  return a;
}

int state_dim(EnvClass c) { return c == EnvClass::arm ? 2 : 6; }

EnvConfig default_env(EnvClass c) {
  EnvConfig e;
  e.env_class = c;
  if (c == EnvClass::arm) {
    e.episode_len = 100;
    e.noise_std = 0.2;
  } else {
    e.episode_len = 350;
    e.noise_std = 0.05;
  }
  return e;
}

namespace {

// Planar kinematics of a canonical tree. Arms live in the xy plane (hinge
// about z) with the root hinged to a base at the origin; crawlers live in the
// xz plane (hinge about y) with an unactuated root.
class Kinematics {
 public:
  explicit Kinematics(const MorphologyTree& tree) {
    const bool arm = tree.env_class == EnvClass::arm;
    const int n = tree.limb_count();
    parent_.assign(n, -1);
    joint_.assign(n, -1);
    attach_.assign(n, 0.0);
    vec_.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& limb = tree.nodes[i];
      parent_[i] = limb.parent ? *limb.parent : -1;
      vec_[i] = {limb.extent[0], arm ? limb.extent[1] : limb.extent[2]};
    }
    int actuated = 0;
    for (const auto& j : tree.joints) {
      attach_[j.child_id] = j.attachment;
      if (j.type != JointType::fixed) joint_[j.child_id] = actuated++;
    }
    endpoints_.resize(2 * static_cast<std::size_t>(n));
    angle_.resize(n);
  }

  // Root-relative endpoints for joint angles `theta` (actuated order).
  std::span<const Point2> solve(std::span<const double> theta) {
    const int n = static_cast<int>(parent_.size());
    for (int i = 0; i < n; ++i) {
      const double own = joint_[i] >= 0 ? theta[joint_[i]] : 0.0;
      Point2 start{0.0, 0.0};
      double phi = own;
      if (parent_[i] >= 0) {
        const int p = parent_[i];
        const Point2& ps = endpoints_[2 * p];
        const Point2& pe = endpoints_[2 * p + 1];
        start = {ps[0] + attach_[i] * (pe[0] - ps[0]), ps[1] + attach_[i] * (pe[1] - ps[1])};
        phi += angle_[p];
      }
      angle_[i] = phi;
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      endpoints_[2 * i] = start;
      endpoints_[2 * i + 1] = {start[0] + c * vec_[i][0] - s * vec_[i][1], start[1] + s * vec_[i][0] + c * vec_[i][1]};
    }
    return endpoints_;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> joint_;
  std::vector<double> attach_;
  std::vector<Point2> vec_;
  std::vector<double> angle_;
  std::vector<Point2> endpoints_;
};

}  // namespace

StateSummary rollout(const EnvConfig& env, const MorphologyTree& tree, const ActionAssignment& assignment,
                     std::uint64_t seed, const StepObserver& observer) {
  const int k = tree.joint_count();
  if (static_cast<int>(assignment.size()) != k) {
    throw std::invalid_argument("rollout: assignment has " + std::to_string(assignment.size()) +
                                " entries for " + std::to_string(k) + " joints");
  }
  const auto& bounds = bounds_for(tree.env_class);
  const auto& vocab = vocabulary(tree.env_class);

  std::vector<double> gain;
  std::vector<double> limit;
  std::vector<const ActionPrimitive*> prim;
  for (const auto& j : tree.joints) {
    if (j.type == JointType::fixed) continue;
    gain.push_back(j.gear / bounds.gear_max);
    limit.push_back(j.range_deg * std::numbers::pi / 180.0);
  }
  for (int a : assignment.primitives) {
    if (a < 0 || a >= kPrimitiveCount) throw std::invalid_argument("rollout: primitive index out of range");
    prim.push_back(&vocab[a]);
  }

  Kinematics kin(tree);
  std::vector<double> theta(k, 0.0);
  const bool arm = tree.env_class == EnvClass::arm;

  // Crawler root position (x, z); the lowest rest-pose endpoint starts on the ground.
  Point2 root{0.0, 0.0};
  std::vector<Point2> prev;
  if (!arm) {
    auto rest = kin.solve(theta);
    double low = rest[0][1];
    for (const auto& p : rest) low = std::min(low, p[1]);
    root[1] = -low;
    prev.assign(rest.begin(), rest.end());
  }
  std::vector<Point2> world;

  for (int t = 0; t < env.episode_len; ++t) {
    for (int j = 0; j < k; ++j) {
      const double u = primitive_signal(*prim[j], t);
      theta[j] = std::clamp(theta[j] + env.dt * (gain[j] * u - env.damping * theta[j]), -limit[j], limit[j]);
    }
    auto rel = kin.solve(theta);
    if (!arm) {
      std::size_t anchor = 0;
      for (std::size_t i = 1; i < prev.size(); ++i) {
        if (prev[i][1] < prev[anchor][1]) anchor = i;
      }
      if (root[1] + prev[anchor][1] <= env.anchor_threshold) {
        root[0] -= rel[anchor][0] - prev[anchor][0];
        root[1] -= rel[anchor][1] - prev[anchor][1];
      }
      double low = root[1] + rel[0][1];
      for (const auto& p : rel) low = std::min(low, root[1] + p[1]);
      if (low < 0.0) root[1] -= low;
      prev.assign(rel.begin(), rel.end());
    }
    if (observer) {
      world.resize(rel.size());
      for (std::size_t i = 0; i < rel.size(); ++i) world[i] = {root[0] + rel[i][0], root[1] + rel[i][1]};
      observer(t, world);
    }
  }

  auto rel = kin.solve(theta);
  StateSummary s;
  if (arm) {
    // Chain arm: the effector is the far end of the deepest (last BFS) limb.
    const Point2& tip = rel[rel.size() - 1];
    s.values = {tip[0], tip[1]};
  } else {
    double mx = 0.0, mz = 0.0;
    int joints = 0;
    for (const auto& j : tree.joints) {
      const Point2& p = rel[2 * static_cast<std::size_t>(j.child_id)];
      mx += root[0] + p[0];
      mz += root[1] + p[1];
      ++joints;
    }
    if (joints > 0) {
      mx /= joints;
      mz /= joints;
    }
    double x0 = rel[0][0], x1 = rel[0][0], z0 = rel[0][1], z1 = rel[0][1];
    for (const auto& p : rel) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      z0 = std::min(z0, p[1]);
      z1 = std::max(z1, p[1]);
    }
    s.values = {root[0], root[1], mx, mz, x1 - x0, z1 - z0};
  }

  if (env.noise_std > 0.0) {
    Rng rng(seed);
    for (auto& v : s.values) v += gaussian(rng, 0.0, env.noise_std);
    s.noise_applied = true;
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) throw RolloutError("rollout: non-finite terminal state");
  }
  return s;
}

std::vector<std::pair<ActionAssignment, StateSummary>> enumerate_outcomes(const EnvConfig& env,
                                                                          const MorphologyTree& tree,
                                                                          std::size_t cap) {
  const int k = tree.joint_count();
  std::size_t total = 1;
  for (int j = 0; j < k; ++j) {
    total *= kPrimitiveCount;
    if (total > cap) {
      throw std::length_error("enumerate_outcomes: " + std::to_string(kPrimitiveCount) + "^" + std::to_string(k) +
                              " assignments exceed the cap of " + std::to_string(cap));
    }
  }
  EnvConfig quiet = env;
  quiet.noise_std = 0.0;
  std::vector<std::pair<ActionAssignment, StateSummary>> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    ActionAssignment a;
    a.primitives.resize(k);
    std::size_t rest = code;
    for (int j = k - 1; j >= 0; --j) {
      a.primitives[j] = static_cast<int>(rest % kPrimitiveCount);
      rest /= kPrimitiveCount;
    }
    StateSummary s = rollout(quiet, tree, a, 0);
    out.emplace_back(std::move(a), std::move(s));
  }
  return out;
}

EpisodeRecord run_episode(const EnvConfig& env, const MorphologyTree& tree, std::uint64_t seed) {
  EpisodeRecord r;
  r.morphology_id = tree.id;
  r.seed = seed;
  Rng rng(derive_seed(seed, 0x61637473));
  r.assignment = sample_assignment(tree.joint_count(), rng, env.shared_primitive);
  try {
    r.state = rollout(env, tree, r.assignment, seed);
  } catch (const RolloutError&) {
    r.valid = false;
    r.state.values.assign(state_dim(tree.env_class), 0.0);
  }
  return r;
}

}  // namespace tame
