#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "tame/morphology.hpp"
#include "test_trees.hpp"

using namespace tame;
using tame::testing::arm_chain;
using tame::testing::loco_chain4;
using tame::testing::loco_tree;
using tame::testing::loco_walker;

namespace {

bool has_field(const std::vector<Violation>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field.find(needle) != std::string::npos; });
}

// Line-graph edge count straight from the definition: number of unordered
// joint pairs that touch a common limb.
std::size_t brute_force_edges(const MorphologyTree& t) {
  std::size_t count = 0;
  auto limbs_of = [&](const JointSpec& j) {
    std::set<int> s{j.child_id};
    if (const auto* c = t.find_limb(j.child_id); c && c->parent) s.insert(*c->parent);
    return s;
  };
  for (std::size_t a = 0; a < t.joints.size(); ++a) {
    for (std::size_t b = a + 1; b < t.joints.size(); ++b) {
      const auto la = limbs_of(t.joints[a]);
      const auto lb = limbs_of(t.joints[b]);
      if (std::any_of(la.begin(), la.end(), [&](int x) { return lb.count(x) > 0; })) ++count;
    }
  }
  return count;
}

std::size_t degree_formula_edges(const MorphologyTree& t) {
  std::map<int, std::size_t> deg;
  for (const auto& j : t.joints) {
    ++deg[j.child_id];
    if (const auto* c = t.find_limb(j.child_id); c && c->parent) ++deg[*c->parent];
  }
  std::size_t total = 0;
  for (const auto& [limb, d] : deg) total += d * (d - 1) / 2;
  return total;
}

}  // namespace

TEST(Sampling, SameSeedSameTree) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    Rng a(42), b(42);
    EXPECT_EQ(sample_random(a, cls, default_limits(cls)), sample_random(b, cls, default_limits(cls)));
  }
}

TEST(Sampling, ArmWithOneLimbHasOneBaseJoint) {
  MorphologyLimits lim = default_limits(EnvClass::arm);
  lim.max_limbs = 1;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const auto t = sample_random(rng, EnvClass::arm, lim);
    ASSERT_EQ(t.limb_count(), 1);
    ASSERT_EQ(t.joints.size(), 1u);
    EXPECT_EQ(t.joint_count(), 1);
    EXPECT_EQ(t.joints[0].type, JointType::hinge_z);
    EXPECT_EQ(t.joints[0].child_id, t.nodes[0].id);
    EXPECT_FALSE(t.nodes[0].parent.has_value());
    EXPECT_TRUE(validate(t, 1).empty());
  }
}

TEST(Sampling, LocomotionMonteCarloValidityAndRootGrowth) {
  const auto lim = default_limits(EnvClass::locomotion2d);
  Rng rng(7);
  SamplingTrace trace;
  int invalid = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto t = sample_random(rng, EnvClass::locomotion2d, lim, &trace);
    if (!validate(t, lim.max_limbs).empty()) ++invalid;
  }
  EXPECT_EQ(invalid, 0);
  const double freq = static_cast<double>(trace.root_growths) / static_cast<double>(trace.root_trials);
  EXPECT_NEAR(freq, 0.3, 0.02);
}

TEST(Sampling, ArmLimbCountRoughlyUniform) {
  const auto lim = default_limits(EnvClass::arm);
  Rng rng(11);
  std::map<int, int> counts;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto t = sample_random(rng, EnvClass::arm, lim);
    ASSERT_TRUE(validate(t, lim.max_limbs).empty());
    ++counts[t.limb_count()];
  }
  for (int c = 1; c <= lim.max_limbs; ++c) EXPECT_NEAR(counts[c] / double(n), 1.0 / lim.max_limbs, 0.03) << c;
}

TEST(Sampling, ParametersWithinBounds) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    const auto& b = bounds_for(cls);
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
      const auto t = sample_random(rng, cls, default_limits(cls));
      for (const auto& n : t.nodes) {
        EXPECT_GE(n.radius, b.radius_min);
        EXPECT_LE(n.radius, b.radius_max);
        for (double e : n.extent) EXPECT_LE(std::abs(e), 0.75);
        if (cls == EnvClass::arm) {
          EXPECT_EQ(n.extent[1], 0.0);
          EXPECT_EQ(n.extent[2], 0.0);
        } else {
          EXPECT_EQ(n.extent[1], 0.0);
        }
      }
      for (const auto& j : t.joints) {
        EXPECT_GE(j.range_deg, b.range_min_deg);
        EXPECT_LE(j.range_deg, b.range_max_deg);
        EXPECT_GE(j.gear, b.gear_min);
        EXPECT_LE(j.gear, b.gear_max);
      }
    }
  }
}

TEST(Sampling, ImpossibleLimitsThrow) {
  MorphologyLimits lim = default_limits(EnvClass::locomotion2d);
  lim.growth_prob = 0.0;  // root alone has no joint
  lim.max_attempts = 5;
  Rng rng(1);
  EXPECT_THROW(sample_random(rng, EnvClass::locomotion2d, lim), SamplingError);
}

TEST(Validate, HandBuiltTreesAreValid) {
  EXPECT_TRUE(validate(loco_chain4()).empty());
  EXPECT_TRUE(validate(loco_walker()).empty());
  EXPECT_TRUE(validate(arm_chain({0.3, 0.3})).empty());
}

TEST(Validate, CoincidentSiblingsCollide) {
  auto t = loco_tree({
      {std::nullopt, {0.4, 0.0, 0.0}},
      {0, {0.3, 0.0, -0.2}, 1.0},
      {0, {0.3, 0.0, -0.2}, 1.0},
  });
  const auto v = validate(t);
  EXPECT_TRUE(has_field(v, "limbs/1,2")) << v.size();
}

TEST(Validate, SmallRadiusIsBoundsViolation) {
  auto t = loco_chain4();
  t.nodes[2].radius = 0.02;
  const auto v = validate(t);
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(has_field(v, "limbs/2/radius"));
}

TEST(Validate, ReportsEveryViolation) {
  auto t = loco_chain4();
  t.nodes[1].radius = 0.5;
  t.joints[0].gear = 10.0;
  t.joints[1].range_deg = 5.0;
  t.nodes[3].extent = {0.9, 0.0, 0.0};
  const auto v = validate(t);
  EXPECT_TRUE(has_field(v, "limbs/1/radius"));
  EXPECT_TRUE(has_field(v, "/gear"));
  EXPECT_TRUE(has_field(v, "/range_deg"));
  EXPECT_TRUE(has_field(v, "limbs/3/extent"));
}

TEST(Validate, StructuralProblems) {
  auto no_joints = loco_tree({{std::nullopt, {0.3, 0.0, 0.0}}});
  EXPECT_FALSE(validate(no_joints).empty());

  auto too_many = arm_chain({0.2, 0.2, 0.2, 0.2, 0.2});
  EXPECT_FALSE(validate(too_many, 4).empty());
  EXPECT_TRUE(validate(too_many, 5).empty());

  auto arm_y = arm_chain({0.3});
  arm_y.nodes[0].extent = {0.3, 0.1, 0.0};
  EXPECT_TRUE(has_field(validate(arm_y), "extent"));

  auto wrong_type = arm_chain({0.3});
  wrong_type.joints[0].type = JointType::hinge_y;
  EXPECT_TRUE(has_field(validate(wrong_type), "type"));

  auto fixed = loco_chain4();
  fixed.joints[1].type = JointType::fixed;
  EXPECT_TRUE(has_field(validate(fixed), "type"));

  auto cycle = loco_chain4();
  cycle.nodes[0].parent = 3;
  EXPECT_FALSE(validate_structure(cycle).empty());
}

TEST(Mutation, SameSeedSameResult) {
  const auto t = loco_walker();
  Rng a(5), b(5);
  const auto p = default_mutation(EnvClass::locomotion2d);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(mutate(t, a, p).tree, mutate(t, b, p).tree);
}

TEST(Mutation, SaturatedTreeDoesNotGrow) {
  auto p = default_mutation(EnvClass::arm);
  p.grow_prob = 1.0;
  p.delete_prob = 0.0;
  const auto t = arm_chain({0.2, 0.2, 0.2, 0.2});
  Rng rng(9);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(mutate(t, rng, p).tree.limb_count(), 4);
}

TEST(Mutation, SingleRootIsNeverDeleted) {
  auto p = default_mutation(EnvClass::arm);
  p.grow_prob = 0.0;
  p.delete_prob = 1.0;
  const auto t = arm_chain({0.4});
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto m = mutate(t, rng, p).tree;
    EXPECT_EQ(m.limb_count(), 1);
    EXPECT_EQ(m.joint_count(), 1);
  }
}

TEST(Mutation, LastJointSurvivesDeletion) {
  auto p = default_mutation(EnvClass::locomotion2d);
  p.grow_prob = 0.0;
  p.delete_prob = 1.0;
  const auto t = loco_tree({{std::nullopt, {0.3, 0.0, 0.0}}, {0, {0.0, 0.0, -0.3}}});
  Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(mutate(t, rng, p).tree.joint_count(), 1);
}

// Exact distribution of the joint-count change of one mutation, assuming every
// growth placement succeeds: enumerate growth outcomes on open limbs, then
// deletion outcomes on the leaves that result.
std::map<int, double> joint_change_distribution(const MorphologyTree& t, const MutationParams& p) {
  std::vector<int> open, leaves;
  for (const auto& n : t.nodes) {
    const auto kids = t.children_of(n.id).size();
    if (static_cast<int>(kids) < n.max_children) open.push_back(n.id);
    if (n.parent && kids == 0) leaves.push_back(n.id);
  }
  std::map<int, double> dist;
  const int no = static_cast<int>(open.size());
  for (int gmask = 0; gmask < (1 << no); ++gmask) {
    double pg = 1.0;
    int grown = 0;
    std::set<int> grown_on;
    int limbs = t.limb_count();
    for (int i = 0; i < no; ++i) {
      if (limbs >= p.max_limbs) break;  // remaining trials are not drawn
      if (gmask & (1 << i)) {
        pg *= p.grow_prob;
        ++grown;
        ++limbs;
        grown_on.insert(open[i]);
      } else {
        pg *= 1.0 - p.grow_prob;
      }
    }
    // Masks with bits set past the cap are duplicates of the truncated ones.
    bool canonical = true;
    {
      int l = t.limb_count();
      for (int i = 0; i < no; ++i) {
        if (l >= p.max_limbs && (gmask & (1 << i))) canonical = false;
        if (l < p.max_limbs && (gmask & (1 << i))) ++l;
      }
    }
    if (!canonical) continue;
    int candidates = grown;
    for (int l : leaves) {
      if (!grown_on.count(l)) ++candidates;
    }
    for (int d = 0; d <= candidates; ++d) {
      const double pd = std::tgamma(candidates + 1) / (std::tgamma(d + 1) * std::tgamma(candidates - d + 1)) *
                        std::pow(p.delete_prob, d) * std::pow(1.0 - p.delete_prob, candidates - d);
      dist[grown - d] += pg * pd;
    }
  }
  return dist;
}

TEST(Mutation, JointCountChangeMatchesEnumeration) {
  const auto t = loco_chain4();
  auto p = default_mutation(EnvClass::locomotion2d);
  p.max_retries = 500;  // makes a failed placement vanishingly rare
  const auto expected = joint_change_distribution(t, p);
  double total = 0.0;
  for (const auto& [d, pr] : expected) total += pr;
  ASSERT_NEAR(total, 1.0, 1e-12);

  Rng rng(123);
  std::map<int, int> observed;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++observed[mutate(t, rng, p).tree.joint_count() - t.joint_count()];
  for (const auto& [d, pr] : expected) EXPECT_NEAR(observed[d] / double(n), pr, 0.02) << "delta " << d;
}

TEST(Mutation, FuzzNeverInvalid) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    const auto lim = default_limits(cls);
    const auto p = default_mutation(cls);
    Rng rng(cls == EnvClass::arm ? 17 : 18);
    auto t = sample_random(rng, cls, lim);
    for (int i = 0; i < 5000; ++i) {
      t = mutate(t, rng, p).tree;
      ASSERT_TRUE(validate(t, lim.max_limbs).empty()) << i;
      if (i % 50 == 0) t = sample_random(rng, cls, lim);
    }
  }
}

TEST(LineGraph, ChainOfTwoJoints) {
  auto t = loco_tree({{std::nullopt, {0.3, 0.0, 0.0}}, {0, {0.0, 0.0, -0.3}}, {1, {0.3, 0.0, 0.0}}});
  const auto g = to_line_graph(t);
  EXPECT_EQ(g.node_count, 2);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0], std::make_pair(0, 1));
}

TEST(LineGraph, RootWithThreeChildren) {
  auto t = loco_tree({
      {std::nullopt, {0.6, 0.0, 0.0}},
      {0, {0.0, 0.0, -0.3}, 0.0},
      {0, {0.0, 0.0, -0.3}, 0.5},
      {0, {0.0, 0.0, -0.3}, 1.0},
  });
  const auto g = to_line_graph(t);
  EXPECT_EQ(g.node_count, 3);
  EXPECT_EQ(g.edges.size(), 3u);
}

TEST(LineGraph, SingleJoint) {
  const auto g = to_line_graph(arm_chain({0.5}));
  EXPECT_EQ(g.node_count, 1);
  EXPECT_TRUE(g.edges.empty());
  EXPECT_TRUE(g.neighbors[0].empty());
}

TEST(LineGraph, EmbeddingLayout) {
  const auto t = arm_chain({0.3, 0.4}, 100.0, 72.0, 0.06);
  const auto g = to_line_graph(t);
  ASSERT_EQ(g.features.size(), 2u * kLineGraphFeatureDim);
  // joint 0: base joint, parent block zero
  for (int i = 0; i < kLimbFeatureDim; ++i) EXPECT_EQ(g.row(0)[i], 0.0);
  EXPECT_DOUBLE_EQ(g.row(0)[kLimbFeatureDim + 0], 0.06);
  EXPECT_DOUBLE_EQ(g.row(0)[kLimbFeatureDim + 1], 0.3);
  // joint 1: parent = limb 0, child = limb 1 attached at 1.0
  EXPECT_DOUBLE_EQ(g.row(1)[1], 0.3);
  EXPECT_DOUBLE_EQ(g.row(1)[kLimbFeatureDim + 1], 0.4);
  EXPECT_DOUBLE_EQ(g.row(1)[kLimbFeatureDim + 4], 1.0);
  const double* e = g.row(1) + 2 * kLimbFeatureDim;
  EXPECT_EQ(e[0], 0.0);
  EXPECT_EQ(e[1], 1.0);
  EXPECT_EQ(e[2], 0.0);
  EXPECT_NEAR(e[3], 100.0 * std::acos(-1.0) / 180.0, 1e-15);
  EXPECT_NEAR(e[4], 72.0 / 80.0, 1e-15);
}

TEST(LineGraph, EdgeCountFormulaOnRandomTrees) {
  Rng rng(99);
  MorphologyLimits lim = default_limits(EnvClass::locomotion2d);
  lim.max_limbs = 10;
  for (int i = 0; i < 300; ++i) {
    const auto t = sample_random(rng, EnvClass::locomotion2d, lim);
    const auto g = to_line_graph(t);
    ASSERT_EQ(g.node_count, t.joint_count());
    EXPECT_EQ(g.edges.size(), brute_force_edges(t));
    EXPECT_EQ(g.edges.size(), degree_formula_edges(t));
    std::size_t nb = 0;
    for (const auto& n : g.neighbors) nb += n.size();
    EXPECT_EQ(nb, 2 * g.edges.size());
  }
}

TEST(Canonical, BfsOrder) {
  // ids deliberately scrambled
  MorphologyTree t = loco_walker();
  for (auto& n : t.nodes) {
    n.id = 10 - n.id;
    if (n.parent) n.parent = 10 - *n.parent;
  }
  for (auto& j : t.joints) j.child_id = 10 - j.child_id;
  std::reverse(t.joints.begin(), t.joints.end());
  const auto c = canonicalize(t);
  for (std::size_t i = 0; i < c.nodes.size(); ++i) EXPECT_EQ(c.nodes[i].id, static_cast<int>(i));
  for (std::size_t i = 1; i < c.joints.size(); ++i) EXPECT_LT(c.joints[i - 1].child_id, c.joints[i].child_id);
  EXPECT_TRUE(validate(c).empty());
}
