#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tame/envsim.hpp"
#include "test_trees.hpp"

using namespace tame;
using tame::testing::arm_chain;

namespace {

EnvConfig quiet(EnvClass c) {
  auto e = default_env(c);
  e.noise_std = 0.0;
  return e;
}

// Closed form of theta' = dt (g u - c theta) from rest under constant u,
// before clamping: (g u / c) (1 - (1 - dt c)^n).
double constant_torque_angle(double g_norm, double u, int steps, double dt = 0.02, double c = 0.1) {
  return g_norm * u / c * (1.0 - std::pow(1.0 - dt * c, steps));
}

}  // namespace

TEST(Primitives, CosineValues) {
  using std::numbers::pi;
  EXPECT_DOUBLE_EQ(primitive_signal({PrimitiveKind::cosine, pi / 30, 0.0, 0.0}, 0), 1.0);
  EXPECT_DOUBLE_EQ(primitive_signal({PrimitiveKind::cosine, pi / 30, pi, 0.0}, 0), -1.0);
  EXPECT_NEAR(primitive_signal({PrimitiveKind::cosine, pi / 15, 0.0, 0.0}, 15), -1.0, 1e-15);
}

TEST(Primitives, ConstantIgnoresTime) {
  for (const auto& p : vocabulary(EnvClass::arm)) {
    EXPECT_EQ(p.kind, PrimitiveKind::constant);
    EXPECT_EQ(primitive_signal(p, 0), primitive_signal(p, 97));
  }
}

TEST(Primitives, Vocabularies) {
  using std::numbers::pi;
  const auto& loco = vocabulary(EnvClass::locomotion2d);
  std::set<std::pair<double, double>> fp;
  for (const auto& p : loco) {
    EXPECT_EQ(p.kind, PrimitiveKind::cosine);
    fp.insert({p.frequency, p.phase});
  }
  EXPECT_EQ(fp, (std::set<std::pair<double, double>>{{pi / 30, 0.0}, {pi / 30, pi}, {pi / 15, 0.0}, {pi / 15, pi}}));
  std::set<double> torques;
  for (const auto& p : vocabulary(EnvClass::arm)) torques.insert(p.torque);
  EXPECT_EQ(torques, (std::set<double>{-1.0, -0.5, 0.5, 1.0}));
}

TEST(Assignment, UniformFrequencies) {
  Rng rng(1);
  std::array<int, 4> counts{};
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[sample_assignment(1, rng).primitives[0]];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.25, 0.015);
}

TEST(Assignment, LengthAndSharedMode) {
  Rng rng(2);
  EXPECT_EQ(sample_assignment(3, rng).size(), 3u);
  bool saw_mixed = false;
  for (int i = 0; i < 200; ++i) {
    const auto shared = sample_assignment(5, rng, true);
    ASSERT_EQ(shared.size(), 5u);
    for (int p : shared.primitives) EXPECT_EQ(p, shared.primitives[0]);
    const auto free = sample_assignment(5, rng, false);
    for (int p : free.primitives) saw_mixed |= p != free.primitives[0];
  }
  EXPECT_TRUE(saw_mixed);
}

TEST(Rollout, ArmClampsAtRange) {
  // gear 80 -> g_norm 1: unclamped angle after 100 steps is ~1.81 rad > 90 deg.
  const auto t = arm_chain({0.75}, 90.0, 80.0);
  ASSERT_GT(constant_torque_angle(1.0, 1.0, 100), std::numbers::pi / 2);
  const auto env = quiet(EnvClass::arm);
  const double th = std::numbers::pi / 2;
  // torque +1 is index 3, -1 is index 0
  const auto up = rollout(env, t, {{3}}, 0);
  EXPECT_NEAR(up.values[0], 0.75 * std::cos(th), 1e-12);
  EXPECT_NEAR(up.values[1], 0.75 * std::sin(th), 1e-12);
  const auto down = rollout(env, t, {{0}}, 0);
  EXPECT_NEAR(down.values[0], 0.75 * std::cos(th), 1e-12);
  EXPECT_NEAR(down.values[1], -0.75 * std::sin(th), 1e-12);
  EXPECT_FALSE(up.noise_applied);
}

TEST(Rollout, ArmMatchesClosedFormBelowClamp) {
  const auto t = arm_chain({0.5}, 175.0, 70.0);
  const auto env = quiet(EnvClass::arm);
  const double g = 70.0 / 80.0;
  const double torques[] = {-1.0, -0.5, 0.5, 1.0};
  for (int a = 0; a < 4; ++a) {
    const double th = constant_torque_angle(g, torques[a], 100);
    const auto s = rollout(env, t, {{a}}, 0);
    EXPECT_NEAR(s.values[0], 0.5 * std::cos(th), 1e-10);
    EXPECT_NEAR(s.values[1], 0.5 * std::sin(th), 1e-10);
  }
}

TEST(Rollout, ArmTwoLinkAnglesCompose) {
  const auto t = arm_chain({0.4, 0.3}, 175.0, 75.0);
  const auto env = quiet(EnvClass::arm);
  const double g = 75.0 / 80.0;
  const double a0 = constant_torque_angle(g, 1.0, 100);
  const double a1 = constant_torque_angle(g, -0.5, 100);
  const auto s = rollout(env, t, {{3, 1}}, 0);
  EXPECT_NEAR(s.values[0], 0.4 * std::cos(a0) + 0.3 * std::cos(a0 + a1), 1e-10);
  EXPECT_NEAR(s.values[1], 0.4 * std::sin(a0) + 0.3 * std::sin(a0 + a1), 1e-10);
}

TEST(Rollout, Deterministic) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    Rng rng(5);
    const auto t = sample_random(rng, cls, default_limits(cls));
    const auto a = sample_assignment(t.joint_count(), rng);
    const auto env = default_env(cls);
    EXPECT_EQ(rollout(env, t, a, 77), rollout(env, t, a, 77));
    EXPECT_TRUE(rollout(env, t, a, 77).noise_applied);
    EXPECT_NE(rollout(env, t, a, 77).values, rollout(env, t, a, 78).values);
  }
}

TEST(Rollout, NoiseHasStatedScale) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    const auto t = cls == EnvClass::arm ? arm_chain({0.3, 0.3}) : tame::testing::loco_walker();
    const auto env = default_env(cls);
    const ActionAssignment a{std::vector<int>(t.joint_count(), 1)};
    const auto clean = rollout(quiet(cls), t, a, 0);
    double ss = 0.0;
    int n = 0;
    for (std::uint64_t s = 0; s < 2000; ++s) {
      const auto r = rollout(env, t, a, s);
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double d = r.values[i] - clean.values[i];
        ss += d * d;
        ++n;
      }
    }
    EXPECT_NEAR(std::sqrt(ss / n), env.noise_std, 0.05 * env.noise_std);
  }
}

TEST(Rollout, SummaryDimensionFixed) {
  for (auto cls : {EnvClass::locomotion2d, EnvClass::arm}) {
    Rng rng(8);
    for (int i = 0; i < 40; ++i) {
      const auto t = sample_random(rng, cls, default_limits(cls));
      const auto s = rollout(default_env(cls), t, sample_assignment(t.joint_count(), rng), i);
      EXPECT_EQ(static_cast<int>(s.values.size()), state_dim(cls));
      for (double v : s.values) EXPECT_TRUE(std::isfinite(v));
    }
  }
  EXPECT_EQ(state_dim(EnvClass::arm), 2);
  EXPECT_EQ(state_dim(EnvClass::locomotion2d), 6);
}

TEST(Rollout, WrongAssignmentLengthThrows) {
  const auto t = arm_chain({0.3, 0.3});
  EXPECT_THROW(rollout(quiet(EnvClass::arm), t, {{1}}, 0), std::invalid_argument);
  EXPECT_THROW(rollout(quiet(EnvClass::arm), t, {{1, 4}}, 0), std::invalid_argument);
}

TEST(Rollout, ArmReachabilityEveryStep) {
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const auto t = sample_random(rng, EnvClass::arm, default_limits(EnvClass::arm));
    double reach = 0.0;
    for (const auto& n : t.nodes) reach += std::hypot(n.extent[0], n.extent[1]);
    int steps = 0;
    rollout(quiet(EnvClass::arm), t, sample_assignment(t.joint_count(), rng), 0,
            [&](int, std::span<const Point2> ends) {
              ++steps;
              for (const auto& p : ends) EXPECT_LE(std::hypot(p[0], p[1]), reach + 1e-12);
            });
    EXPECT_EQ(steps, 100);
  }
}

TEST(Rollout, CrawlerMovesAndStaysAboveGround) {
  const auto t = tame::testing::loco_walker();
  const auto env = quiet(EnvClass::locomotion2d);
  double min_z = 1e9;
  std::set<std::vector<double>> finals;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        const auto s = rollout(env, t, {{a, b, c}}, 0, [&](int, std::span<const Point2> ends) {
          for (const auto& p : ends) min_z = std::min(min_z, p[1]);
        });
        finals.insert(s.values);
      }
    }
  }
  EXPECT_GE(min_z, -1e-9);
  EXPECT_GT(finals.size(), 16u);
}

TEST(Enumerate, CountsAndConsistency) {
  const auto env = quiet(EnvClass::arm);
  EXPECT_EQ(enumerate_outcomes(env, arm_chain({0.4})).size(), 4u);
  const auto t = arm_chain({0.3, 0.3});
  const auto outs = enumerate_outcomes(env, t);
  ASSERT_EQ(outs.size(), 16u);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    EXPECT_EQ(outs[i].first.primitives, (std::vector<int>{static_cast<int>(i / 4), static_cast<int>(i % 4)}));
    EXPECT_EQ(outs[i].second.values, rollout(env, t, outs[i].first, 1234).values);
  }
}

TEST(Enumerate, NoisyEnvStillEnumeratesCleanStates) {
  const auto t = tame::testing::loco_walker();
  const auto clean = enumerate_outcomes(quiet(EnvClass::locomotion2d), t);
  const auto from_noisy = enumerate_outcomes(default_env(EnvClass::locomotion2d), t);
  ASSERT_EQ(clean.size(), from_noisy.size());
  for (std::size_t i = 0; i < clean.size(); ++i) EXPECT_EQ(clean[i].second.values, from_noisy[i].second.values);
}

TEST(Enumerate, ImmobileAgent) {
  auto t = arm_chain({0.3, 0.3}, 0.0);
  const auto outs = enumerate_outcomes(quiet(EnvClass::arm), t);
  for (const auto& o : outs) EXPECT_EQ(o.second.values, outs.front().second.values);
}

TEST(Enumerate, CapRefuses) {
  const auto t = arm_chain({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
  EXPECT_THROW(enumerate_outcomes(quiet(EnvClass::arm), t), std::length_error);
  EXPECT_NO_THROW(enumerate_outcomes(quiet(EnvClass::arm), arm_chain({0.1, 0.1, 0.1, 0.1, 0.1, 0.1})));
}

TEST(EpisodeLog, RoundTrip) {
  Rng rng(4);
  const auto t = sample_random(rng, EnvClass::locomotion2d, default_limits(EnvClass::locomotion2d));
  std::vector<EpisodeRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(run_episode(default_env(EnvClass::locomotion2d), t, 100 + i));
  std::stringstream buf;
  EpisodeLogWriter w(buf, EnvClass::locomotion2d);
  for (const auto& r : recs) w.append(r);
  EXPECT_EQ(buf.str().rfind(std::string(kEpisodeLogHeader), 0), 0u);
  const auto log = read_episode_log(buf);
  EXPECT_EQ(log.env_class, EnvClass::locomotion2d);
  EXPECT_EQ(log.records, recs);
}

TEST(Episode, ReplayReproducesState) {
  const auto t = arm_chain({0.3, 0.2});
  const auto env = default_env(EnvClass::arm);
  const auto r = run_episode(env, t, 555);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(rollout(env, t, r.assignment, r.seed), r.state);
}
