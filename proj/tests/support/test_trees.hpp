#pragma once

#include <optional>
#include <vector>

#include "tame/morphology.hpp"

namespace tame::testing {

// Arm chain; limb i has length lengths[i] along +x of its parent's end.
inline MorphologyTree arm_chain(const std::vector<double>& lengths, double range_deg = 120.0, double gear = 75.0,
                                double radius = 0.05) {
  MorphologyTree t;
  t.env_class = EnvClass::arm;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    LimbNode n;
    n.id = static_cast<int>(i);
    if (i > 0) n.parent = static_cast<int>(i - 1);
    n.radius = radius;
    n.extent = {lengths[i], 0.0, 0.0};
    n.max_children = 1;
    t.nodes.push_back(n);
    JointSpec j;
    j.child_id = n.id;
    j.type = JointType::hinge_z;
    j.attachment = i == 0 ? 0.0 : 1.0;
    j.range_deg = range_deg;
    j.gear = gear;
    t.joints.push_back(j);
  }
  return t;
}

struct LocoLimb {
  std::optional<int> parent;
  Vec3 extent;
  double attachment = 1.0;
  double range_deg = 45.0;
  double gear = 75.0;
  double radius = 0.05;
};

inline MorphologyTree loco_tree(const std::vector<LocoLimb>& limbs) {
  MorphologyTree t;
  t.env_class = EnvClass::locomotion2d;
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    const auto& l = limbs[i];
    LimbNode n;
    n.id = static_cast<int>(i);
    n.parent = l.parent;
    n.radius = l.radius;
    n.extent = l.extent;
    n.max_children = 2;
    t.nodes.push_back(n);
    if (l.parent) {
      JointSpec j;
      j.child_id = n.id;
      j.type = JointType::hinge_y;
      j.attachment = l.attachment;
      j.range_deg = l.range_deg;
      j.gear = l.gear;
      t.joints.push_back(j);
    }
  }
  return t;
}

// root - A - B - C zig-zag, valid in the locomotion class.
inline MorphologyTree loco_chain4() {
  return loco_tree({
      {std::nullopt, {0.3, 0.0, 0.0}},
      {0, {0.0, 0.0, -0.3}},
      {1, {0.3, 0.0, 0.0}},
      {2, {0.0, 0.0, 0.3}},
  });
}

// Root with two legs hanging off its ends, plus a foot on the first leg.
inline MorphologyTree loco_walker() {
  return loco_tree({
      {std::nullopt, {0.4, 0.0, 0.0}},
      {0, {-0.1, 0.0, -0.3}, 0.0},
      {0, {0.1, 0.0, -0.3}, 1.0},
      {1, {-0.2, 0.0, 0.0}, 1.0},
  });
}

}  // namespace tame::testing
