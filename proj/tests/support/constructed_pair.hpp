#pragma once

#include <memory>
#include <vector>

#include "tame/evolution.hpp"
#include "test_trees.hpp"

namespace tame::testing {

// Two single-joint arms with synthetic terminal states:
//  controllable: state is a fixed point per primitive, tiny jitter;
//  dispersed:    wide Gaussian state drawn independently of the primitive.
struct ConstructedPair {
  MorphologyTree controllable;
  MorphologyTree dispersed;
  std::vector<GraphSample> controllable_samples;
  std::vector<GraphSample> dispersed_samples;
};

inline ConstructedPair constructed_pair(Rng& rng, int episodes) {
  ConstructedPair p;
  p.controllable = arm_chain({0.3});
  p.controllable.id = 1;
  p.dispersed = arm_chain({0.6});
  p.dispersed.id = 2;
  auto gc = std::make_shared<const LineGraph>(to_line_graph(p.controllable));
  auto gd = std::make_shared<const LineGraph>(to_line_graph(p.dispersed));
  const double points[4][2] = {{0.3, 0.0}, {0.0, 0.3}, {-0.3, 0.0}, {0.0, -0.3}};
  for (int e = 0; e < episodes; ++e) {
    const int a = static_cast<int>(uniform_index(rng, 4));
    p.controllable_samples.push_back(
        {gc, {points[a][0] + gaussian(rng, 0.0, 0.01), points[a][1] + gaussian(rng, 0.0, 0.01)}, {a}});
    const int b = static_cast<int>(uniform_index(rng, 4));
    p.dispersed_samples.push_back({gd, {gaussian(rng, 0.0, 2.0), gaussian(rng, 0.0, 2.0)}, {b}});
  }
  return p;
}

inline std::vector<StateSummary> states_of(const std::vector<GraphSample>& samples) {
  std::vector<StateSummary> out;
  for (const auto& s : samples) out.push_back({s.state, true});
  return out;
}

}  // namespace tame::testing
