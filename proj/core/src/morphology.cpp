#include "tame/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>

namespace tame {

std::string_view to_string(EnvClass c) {
  switch (c) {
    case EnvClass::locomotion2d: return "locomotion2d";
    case EnvClass::arm: return "arm";
  }
  return "?";
}

std::string_view to_string(JointType t) {
  switch (t) {
    case JointType::hinge_y: return "hinge_y";
    case JointType::hinge_z: return "hinge_z";
    case JointType::fixed: return "fixed";
  }
  return "?";
}

EnvClass env_class_from_string(std::string_view s) {
  if (s == "locomotion2d" || s == "locomotion") return EnvClass::locomotion2d;
  if (s == "arm") return EnvClass::arm;
  throw std::invalid_argument("unknown environment class '" + std::string(s) + "'");
}

JointType joint_type_from_string(std::string_view s) {
  if (s == "hinge_y") return JointType::hinge_y;
  if (s == "hinge_z") return JointType::hinge_z;
  if (s == "fixed") return JointType::fixed;
  throw std::invalid_argument("unknown joint type '" + std::string(s) + "'");
}

int MorphologyTree::joint_count() const {
  return static_cast<int>(std::count_if(joints.begin(), joints.end(),
                                        [](const JointSpec& j) { return j.type != JointType::fixed; }));
}

std::vector<int> MorphologyTree::children_of(int limb_id) const {
  std::vector<int> out;
  for (const auto& n : nodes) {
    if (n.parent && *n.parent == limb_id) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const LimbNode* MorphologyTree::find_limb(int limb_id) const {
  for (const auto& n : nodes) {
    if (n.id == limb_id) return &n;
  }
  return nullptr;
}

const JointSpec* MorphologyTree::joint_of(int child_id) const {
  for (const auto& j : joints) {
    if (j.child_id == child_id) return &j;
  }
  return nullptr;
}

const ParameterBounds& bounds_for(EnvClass c) {
  static const ParameterBounds locomotion = [] {
    ParameterBounds b;
    b.radius_min = 0.035;
    b.radius_max = 0.07;
    b.extent = {{{-0.75, 0.75}, {0.0, 0.0}, {-0.75, 0.75}}};
    b.axis_free = {true, false, true};
    b.range_min_deg = 30.0;
    b.range_max_deg = 70.0;
    b.gear_min = 50.0;
    b.gear_max = 100.0;
    b.max_children = 2;
    b.joint_type = JointType::hinge_y;
    b.base_joint = false;
    return b;
  }();
  static const ParameterBounds arm = [] {
    ParameterBounds b;
    b.radius_min = 0.04;
    b.radius_max = 0.07;
    b.extent = {{{0.1, 0.75}, {0.0, 0.0}, {0.0, 0.0}}};
    b.axis_free = {true, false, false};
    b.attachment_min = 1.0;
    b.attachment_max = 1.0;
    b.range_min_deg = 90.0;
    b.range_max_deg = 175.0;
    b.gear_min = 70.0;
    b.gear_max = 80.0;
    b.max_children = 1;
    b.joint_type = JointType::hinge_z;
    b.base_joint = true;
    return b;
  }();
  return c == EnvClass::arm ? arm : locomotion;
}

MorphologyLimits default_limits(EnvClass c) {
  MorphologyLimits l;
  if (c == EnvClass::arm) {
    l.max_limbs = 4;
    l.growth_prob = 0.2;
  } else {
    l.max_limbs = 8;
    l.growth_prob = 0.3;
  }
  return l;
}

MutationParams default_mutation(EnvClass c) {
  MutationParams p;
  if (c == EnvClass::arm) {
    p.grow_prob = 0.2;
    p.delete_prob = 0.2;
  }
  p.max_limbs = default_limits(c).max_limbs;
  return p;
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

// Closest distance between two segments (Ericson, Real-Time Collision
// Detection, 5.1.9), degenerate segments included.
double segment_distance(const Segment& s, const Segment& t) {
  constexpr double eps = 1e-15;
  const Vec3 d1 = sub(s.b, s.a);
  const Vec3 d2 = sub(t.b, t.a);
  const Vec3 r = sub(s.a, t.a);
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double u = 0.0;
  double v = 0.0;
  if (a <= eps && e <= eps) {
    // both points
  } else if (a <= eps) {
    v = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= eps) {
      u = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      u = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      v = (b * u + f) / e;
      if (v < 0.0) {
        v = 0.0;
        u = std::clamp(-c / a, 0.0, 1.0);
      } else if (v > 1.0) {
        v = 1.0;
        u = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 p = add(s.a, scale(d1, u));
  const Vec3 q = add(t.a, scale(d2, v));
  const Vec3 diff = sub(p, q);
  return std::sqrt(dot(diff, diff));
}

std::vector<Segment> rest_segments(const MorphologyTree& tree) {
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) index[tree.nodes[i].id] = i;

  std::vector<Segment> segs(tree.nodes.size());
  std::vector<bool> done(tree.nodes.size(), false);
  // Resolve parents first; depth is bounded by the node count.
  for (std::size_t pass = 0; pass < tree.nodes.size(); ++pass) {
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (done[i]) continue;
      const auto& n = tree.nodes[i];
      Vec3 start{0.0, 0.0, 0.0};
      if (n.parent) {
        auto it = index.find(*n.parent);
        if (it == index.end() || !done[it->second]) continue;
        const auto& ps = segs[it->second];
        const JointSpec* j = tree.joint_of(n.id);
        const double t = j ? j->attachment : 1.0;
        start = add(ps.a, scale(sub(ps.b, ps.a), t));
      }
      segs[i] = {start, add(start, n.extent)};
      done[i] = true;
    }
  }
  return segs;
}

namespace {

bool collision_free(const MorphologyTree& tree, std::vector<Violation>* out = nullptr) {
  const auto segs = rest_segments(tree);
  bool ok = true;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < tree.nodes.size(); ++j) {
      const auto& a = tree.nodes[i];
      const auto& b = tree.nodes[j];
      const bool adjacent = (a.parent && *a.parent == b.id) || (b.parent && *b.parent == a.id);
      if (adjacent) continue;
      const double d = segment_distance(segs[i], segs[j]);
      if (d + kCollisionTolerance < a.radius + b.radius) {
        ok = false;
        if (!out) return false;
        out->push_back({"limbs/" + std::to_string(a.id) + "," + std::to_string(b.id),
                        "capsules overlap at rest pose (axis distance " + std::to_string(d) + ")"});
      }
    }
  }
  return ok;
}

// Structural checks only; returns false if parent links do not form a tree.
bool check_structure(const MorphologyTree& tree, std::vector<Violation>& out) {
  const std::size_t before = out.size();
  if (tree.nodes.empty()) {
    out.push_back({"limbs", "morphology has no limbs"});
    return false;
  }
  std::set<int> ids;
  int roots = 0;
  for (const auto& n : tree.nodes) {
    if (!ids.insert(n.id).second) out.push_back({"limbs/" + std::to_string(n.id), "duplicate limb id"});
    if (!n.parent) ++roots;
  }
  if (roots != 1) out.push_back({"limbs", "expected exactly one root, found " + std::to_string(roots)});
  for (const auto& n : tree.nodes) {
    if (n.parent && !ids.count(*n.parent)) {
      out.push_back({"limbs/" + std::to_string(n.id) + "/parent", "unknown parent limb"});
    }
  }
  if (out.size() != before) return false;

  // Every limb must reach the root without revisiting a limb.
  for (const auto& n : tree.nodes) {
    std::set<int> seen;
    const LimbNode* cur = &n;
    while (cur->parent) {
      if (!seen.insert(cur->id).second) break;
      cur = tree.find_limb(*cur->parent);
    }
    if (cur->parent) {
      out.push_back({"limbs/" + std::to_string(n.id), "cycle in parent links"});
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Violation> validate_structure(const MorphologyTree& tree) {
  std::vector<Violation> out;
  check_structure(tree, out);
  return out;
}

std::vector<Violation> validate(const MorphologyTree& tree) {
  return validate(tree, default_limits(tree.env_class).max_limbs);
}

std::vector<Violation> validate(const MorphologyTree& tree, int max_limbs) {
  std::vector<Violation> out;
  const auto& b = bounds_for(tree.env_class);
  const bool structural = check_structure(tree, out);

  if (tree.limb_count() > max_limbs) {
    out.push_back({"limbs", "limb count " + std::to_string(tree.limb_count()) + " exceeds maximum " +
                                std::to_string(max_limbs)});
  }

  constexpr double tol = 1e-12;
  for (const auto& n : tree.nodes) {
    const std::string where = "limbs/" + std::to_string(n.id);
    if (!(n.radius >= b.radius_min - tol && n.radius <= b.radius_max + tol)) {
      out.push_back({where + "/radius", "radius " + std::to_string(n.radius) + " outside [" +
                                            std::to_string(b.radius_min) + ", " +
                                            std::to_string(b.radius_max) + "]"});
    }
    for (int a = 0; a < 3; ++a) {
      const double e = n.extent[a];
      if (!std::isfinite(e) || std::abs(e) > b.extent_abs_max + tol) {
        out.push_back({where + "/extent", "extent component exceeds 0.75 m"});
      } else if (!b.axis_free[a] && e != 0.0) {
        out.push_back({where + "/extent", std::string("limb may not extend along ") + "xyz"[a]});
      }
    }
    if (n.max_children != b.max_children) {
      out.push_back({where + "/max_children", "expected " + std::to_string(b.max_children)});
    }
  }

  if (structural) {
    for (const auto& n : tree.nodes) {
      const auto kids = tree.children_of(n.id);
      if (static_cast<int>(kids.size()) > n.max_children) {
        out.push_back({"limbs/" + std::to_string(n.id), "too many children"});
      }
    }
  }

  std::set<int> jointed;
  for (const auto& j : tree.joints) {
    const std::string where = "joints/" + std::to_string(j.child_id);
    const LimbNode* child = tree.find_limb(j.child_id);
    if (!child) {
      out.push_back({where, "joint refers to unknown limb"});
      continue;
    }
    if (!jointed.insert(j.child_id).second) out.push_back({where, "limb has more than one joint"});
    if (!child->parent && !b.base_joint) out.push_back({where, "root limb may not carry a joint in this class"});
    if (j.type == JointType::fixed) {
      if (!b.allow_fixed) out.push_back({where + "/type", "fixed joints not permitted in this class"});
    } else if (j.type != b.joint_type) {
      out.push_back({where + "/type", std::string("expected ") + std::string(to_string(b.joint_type))});
    }
    if (!(j.attachment >= 0.0 && j.attachment <= 1.0)) out.push_back({where + "/attachment", "outside [0, 1]"});
    if (!(j.range_deg >= b.range_min_deg - tol && j.range_deg <= b.range_max_deg + tol)) {
      out.push_back({where + "/range_deg", "range " + std::to_string(j.range_deg) + " outside [" +
                                               std::to_string(b.range_min_deg) + ", " +
                                               std::to_string(b.range_max_deg) + "]"});
    }
    if (!(j.gear >= b.gear_min - tol && j.gear <= b.gear_max + tol)) {
      out.push_back({where + "/gear", "gear outside [" + std::to_string(b.gear_min) + ", " +
                                          std::to_string(b.gear_max) + "]"});
    }
  }
  for (const auto& n : tree.nodes) {
    const bool needs = n.parent.has_value() || b.base_joint;
    if (needs && !jointed.count(n.id)) {
      out.push_back({"joints", "limb " + std::to_string(n.id) + " has no joint"});
    }
  }
  if (tree.joint_count() < 1) out.push_back({"joints", "morphology needs at least one actuated joint"});

  if (structural) collision_free(tree, &out);
  return out;
}

MorphologyTree canonicalize(const MorphologyTree& tree) {
  MorphologyTree out;
  out.env_class = tree.env_class;
  out.id = tree.id;
  const LimbNode* root = nullptr;
  for (const auto& n : tree.nodes) {
    if (!n.parent) root = &n;
  }
  if (!root) return tree;

  std::map<int, int> remap;
  std::deque<int> queue{root->id};
  std::vector<int> order;
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    if (remap.count(id)) continue;
    remap[id] = static_cast<int>(order.size());
    order.push_back(id);
    for (int c : tree.children_of(id)) queue.push_back(c);
  }
  for (int old_id : order) {
    LimbNode n = *tree.find_limb(old_id);
    n.id = remap[old_id];
    if (n.parent) n.parent = remap[*n.parent];
    out.nodes.push_back(n);
  }
  for (int old_id : order) {
    if (const JointSpec* j = tree.joint_of(old_id)) {
      JointSpec js = *j;
      js.child_id = remap[old_id];
      out.joints.push_back(js);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling and mutation

namespace {

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

LimbNode sample_limb(Rng& rng, const ParameterBounds& b, int id, std::optional<int> parent) {
  LimbNode n;
  n.id = id;
  n.parent = parent;
  n.radius = uniform(rng, b.radius_min, b.radius_max);
  for (int a = 0; a < 3; ++a) {
    n.extent[a] = b.axis_free[a] ? uniform(rng, b.extent[a].first, b.extent[a].second) : 0.0;
  }
  n.max_children = b.max_children;
  return n;
}

JointSpec sample_joint(Rng& rng, const ParameterBounds& b, int child) {
  JointSpec j;
  j.child_id = child;
  j.type = b.joint_type;
  j.attachment = uniform(rng, b.attachment_min, b.attachment_max);
  j.range_deg = uniform(rng, b.range_min_deg, b.range_max_deg);
  j.gear = uniform(rng, b.gear_min, b.gear_max);
  return j;
}

int next_id(const MorphologyTree& t) {
  int m = -1;
  for (const auto& n : t.nodes) m = std::max(m, n.id);
  return m + 1;
}

// Adds a sampled child to `parent`, redrawing up to `retries` times until the
// rest pose is collision free. Returns the new id or nullopt.
std::optional<int> place_child(MorphologyTree& t, int parent, Rng& rng, const ParameterBounds& b,
                               int retries) {
  const int id = next_id(t);
  for (int attempt = 0; attempt < retries; ++attempt) {
    t.nodes.push_back(sample_limb(rng, b, id, parent));
    t.joints.push_back(sample_joint(rng, b, id));
    if (collision_free(t)) return id;
    t.nodes.pop_back();
    t.joints.pop_back();
  }
  return std::nullopt;
}

void perturb_geometry(LimbNode& n, JointSpec* j, Rng& rng, const ParameterBounds& b,
                      const MutationParams& p) {
  n.radius = clampd(n.radius + gaussian(rng, 0.0, p.radius_std), b.radius_min, b.radius_max);
  for (int a = 0; a < 3; ++a) {
    if (!b.axis_free[a]) continue;
    n.extent[a] = clampd(n.extent[a] + gaussian(rng, 0.0, p.length_std), b.extent[a].first,
                         b.extent[a].second);
  }
  if (j && b.attachment_max > b.attachment_min) {
    j->attachment =
        clampd(j->attachment + gaussian(rng, 0.0, p.attachment_std), b.attachment_min, b.attachment_max);
  }
}

void perturb_joint(JointSpec& j, Rng& rng, const ParameterBounds& b, const MutationParams& p) {
  j.range_deg = clampd(j.range_deg + gaussian(rng, 0.0, p.range_std_deg), b.range_min_deg, b.range_max_deg);
  j.gear = clampd(j.gear + gaussian(rng, 0.0, p.gear_std), b.gear_min, b.gear_max);
}

JointSpec* mutable_joint(MorphologyTree& t, int child) {
  for (auto& j : t.joints) {
    if (j.child_id == child) return &j;
  }
  return nullptr;
}

MorphologyTree root_only(Rng& rng, EnvClass env_class) {
  const auto& b = bounds_for(env_class);
  MorphologyTree t;
  t.env_class = env_class;
  t.nodes.push_back(sample_limb(rng, b, 0, std::nullopt));
  if (b.base_joint) {
    JointSpec j = sample_joint(rng, b, 0);
    j.attachment = 0.0;
    t.joints.push_back(j);
  }
  return t;
}

MorphologyTree sample_bfs(Rng& rng, EnvClass env_class, const MorphologyLimits& limits, SamplingTrace* trace) {
  const auto& b = bounds_for(env_class);
  for (int attempt = 0; attempt < limits.max_attempts; ++attempt) {
    if (trace) ++trace->attempts;
    MorphologyTree t = root_only(rng, env_class);
    std::deque<int> queue{0};
    while (!queue.empty() && t.limb_count() < limits.max_limbs) {
      const int parent = queue.front();
      queue.pop_front();
      for (int slot = 0; slot < b.max_children && t.limb_count() < limits.max_limbs; ++slot) {
        const bool grow = bernoulli(rng, limits.growth_prob);
        if (trace && parent == 0) {
          ++trace->root_trials;
          if (grow) ++trace->root_growths;
        }
        if (!grow) continue;
        if (auto id = place_child(t, parent, rng, b, MutationParams{}.max_retries)) queue.push_back(*id);
      }
    }
    t = canonicalize(t);
    if (validate(t, limits.max_limbs).empty()) return t;
  }
  throw SamplingError("sample_random: no valid " + std::string(to_string(env_class)) + " morphology after " +
                      std::to_string(limits.max_attempts) + " attempts");
}

// Arms: draw a target size uniformly, then mutate a single-limb arm until it
// has that many limbs.
MorphologyTree sample_arm(Rng& rng, const MorphologyLimits& limits, SamplingTrace* trace) {
  const int target = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(limits.max_limbs))) + 1;
  MutationParams params = default_mutation(EnvClass::arm);
  params.max_limbs = limits.max_limbs;
  params.grow_prob = limits.growth_prob;
  params.delete_prob = limits.growth_prob;
  for (int attempt = 0; attempt < limits.max_attempts; ++attempt) {
    if (trace) ++trace->attempts;
    MorphologyTree t = root_only(rng, EnvClass::arm);
    if (!validate(t, limits.max_limbs).empty()) continue;
    for (int step = 0; step < 10000 && t.limb_count() != target; ++step) {
      t = mutate(t, rng, params).tree;
    }
    if (t.limb_count() == target) return t;
  }
  throw SamplingError("sample_random: could not reach an arm of " + std::to_string(target) + " limbs");
}

}  // namespace

MorphologyTree sample_random(Rng& rng, EnvClass env_class, const MorphologyLimits& limits, SamplingTrace* trace) {
  if (limits.max_limbs < 1) throw SamplingError("sample_random: max_limbs must be positive");
  if (env_class == EnvClass::arm) return sample_arm(rng, limits, trace);
  if (limits.max_limbs < 2) throw SamplingError("sample_random: locomotion morphologies need at least two limbs");
  return sample_bfs(rng, env_class, limits, trace);
}

MutationResult mutate(const MorphologyTree& tree, Rng& rng, const MutationParams& params) {
  const auto& b = bounds_for(tree.env_class);
  MorphologyTree t = tree;

  // 1. parameter perturbation
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const int id = t.nodes[i].id;
    if (bernoulli(rng, params.geometric_prob)) {
      for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        MorphologyTree candidate = t;
        perturb_geometry(candidate.nodes[i], mutable_joint(candidate, id), rng, b, params);
        if (collision_free(candidate)) {
          t = std::move(candidate);
          break;
        }
      }
    }
    if (bernoulli(rng, params.joint_prob)) {
      if (JointSpec* j = mutable_joint(t, id)) perturb_joint(*j, rng, b, params);
    }
  }

  // 2. growth on non-saturated limbs
  std::vector<int> open;
  for (const auto& n : t.nodes) {
    if (static_cast<int>(t.children_of(n.id).size()) < n.max_children) open.push_back(n.id);
  }
  for (int id : open) {
    if (t.limb_count() >= params.max_limbs) break;
    if (bernoulli(rng, params.grow_prob)) place_child(t, id, rng, b, params.max_retries);
  }

  // 3. leaf deletion; the root is never a candidate
  std::vector<int> leaves;
  for (const auto& n : t.nodes) {
    if (n.parent && t.children_of(n.id).empty()) leaves.push_back(n.id);
  }
  for (int id : leaves) {
    if (!bernoulli(rng, params.delete_prob)) continue;
    const JointSpec* j = t.joint_of(id);
    const int lost = (j && j->type != JointType::fixed) ? 1 : 0;
    if (t.joint_count() - lost < 1) continue;
    std::erase_if(t.nodes, [id](const LimbNode& n) { return n.id == id; });
    std::erase_if(t.joints, [id](const JointSpec& js) { return js.child_id == id; });
  }

  t = canonicalize(t);
  if (!validate(t, params.max_limbs).empty()) return {tree, false};
  return {std::move(t), true};
}

// ---------------------------------------------------------------------------
// Line graph

namespace {

void limb_features(const LimbNode& n, const JointSpec* j, double* out) {
  out[0] = n.radius;
  out[1] = n.extent[0];
  out[2] = n.extent[1];
  out[3] = n.extent[2];
  out[4] = (j && n.parent) ? j->attachment : 0.0;
}

}  // namespace

LineGraph to_line_graph(const MorphologyTree& tree) {
  const auto& b = bounds_for(tree.env_class);
  LineGraph g;
  g.node_count = static_cast<int>(tree.joints.size());
  g.features.assign(static_cast<std::size_t>(g.node_count) * kLineGraphFeatureDim, 0.0);
  g.neighbors.resize(g.node_count);

  std::map<int, std::vector<int>> incident;  // limb id -> joint indices
  for (int k = 0; k < g.node_count; ++k) {
    const JointSpec& j = tree.joints[k];
    const LimbNode* child = tree.find_limb(j.child_id);
    double* row = g.features.data() + static_cast<std::size_t>(k) * kLineGraphFeatureDim;
    if (child && child->parent) {
      const LimbNode* parent = tree.find_limb(*child->parent);
      limb_features(*parent, tree.joint_of(parent->id), row);
      incident[parent->id].push_back(k);
    }
    if (child) {
      limb_features(*child, &j, row + kLimbFeatureDim);
      incident[child->id].push_back(k);
    }
    double* e = row + 2 * kLimbFeatureDim;
    e[0] = j.type == JointType::hinge_y ? 1.0 : 0.0;
    e[1] = j.type == JointType::hinge_z ? 1.0 : 0.0;
    e[2] = j.type == JointType::fixed ? 1.0 : 0.0;
    e[3] = j.range_deg * std::numbers::pi / 180.0;
    e[4] = j.gear / b.gear_max;
  }

  std::set<std::pair<int, int>> edges;
  for (const auto& [limb, js] : incident) {
    for (std::size_t a = 0; a < js.size(); ++a) {
      for (std::size_t c = a + 1; c < js.size(); ++c) {
        edges.insert({std::min(js[a], js[c]), std::max(js[a], js[c])});
      }
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  for (const auto& [u, v] : g.edges) {
    g.neighbors[u].push_back(v);
    g.neighbors[v].push_back(u);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  return g;
}

}  // namespace tame
