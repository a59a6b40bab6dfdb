#include <json.hpp>

#include "tame/morphology.hpp"

namespace tame {

using nlohmann::json;

std::string serialize(const MorphologyTree& tree) {
  // nlohmann::json objects are key-sorted and doubles print in shortest
  // round-trip form, so equal trees always produce identical bytes.
  json doc;
  doc["schema"] = std::string(kMorphologySchema);
  doc["id"] = tree.id;
  doc["env_class"] = std::string(to_string(tree.env_class));
  json limbs = json::array();
  for (const auto& n : tree.nodes) {
    json l;
    l["id"] = n.id;
    l["parent"] = n.parent ? json(*n.parent) : json(nullptr);
    l["radius"] = n.radius;
    l["extent"] = {n.extent[0], n.extent[1], n.extent[2]};
    l["max_children"] = n.max_children;
    limbs.push_back(std::move(l));
  }
  doc["limbs"] = std::move(limbs);
  json joints = json::array();
  for (const auto& j : tree.joints) {
    json o;
    o["child"] = j.child_id;
    o["type"] = std::string(to_string(j.type));
    o["attachment"] = j.attachment;
    o["range_deg"] = j.range_deg;
    o["gear"] = j.gear;
    joints.push_back(std::move(o));
  }
  doc["joints"] = std::move(joints);
  return doc.dump(2) + "\n";
}

namespace {

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number()) throw ParseError(path + "/" + key, "expected a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number_integer()) throw ParseError(path + "/" + key, "expected an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_string()) throw ParseError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

MorphologyTree deserialize(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  const std::string schema = text(doc, "", "schema");
  if (schema != kMorphologySchema) throw ParseError("/schema", "unsupported schema '" + schema + "'");

  MorphologyTree t;
  {
    const json& id = field(doc, "", "id");
    if (!id.is_number_unsigned() && !id.is_number_integer()) throw ParseError("/id", "expected an integer");
    t.id = id.get<std::uint64_t>();
  }
  try {
    t.env_class = env_class_from_string(text(doc, "", "env_class"));
  } catch (const std::invalid_argument& e) {
    throw ParseError("/env_class", e.what());
  }

  const json& limbs = field(doc, "", "limbs");
  if (!limbs.is_array()) throw ParseError("/limbs", "expected an array");
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    const std::string path = "/limbs/" + std::to_string(i);
    const json& l = limbs[i];
    LimbNode n;
    n.id = integer(l, path, "id");
    const json& parent = field(l, path, "parent");
    if (parent.is_null()) {
      n.parent.reset();
    } else if (parent.is_number_integer()) {
      n.parent = parent.get<int>();
    } else {
      throw ParseError(path + "/parent", "expected an integer or null");
    }
    n.radius = number(l, path, "radius");
    const json& ext = field(l, path, "extent");
    if (!ext.is_array() || ext.size() != 3) throw ParseError(path + "/extent", "expected 3 numbers");
    for (int a = 0; a < 3; ++a) {
      if (!ext[a].is_number()) throw ParseError(path + "/extent/" + std::to_string(a), "expected a number");
      n.extent[a] = ext[a].get<double>();
    }
    n.max_children = integer(l, path, "max_children");
    t.nodes.push_back(n);
  }

  const json& joints = field(doc, "", "joints");
  if (!joints.is_array()) throw ParseError("/joints", "expected an array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string path = "/joints/" + std::to_string(i);
    const json& o = joints[i];
    JointSpec j;
    j.child_id = integer(o, path, "child");
    try {
      j.type = joint_type_from_string(text(o, path, "type"));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path + "/type", e.what());
    }
    j.attachment = number(o, path, "attachment");
    j.range_deg = number(o, path, "range_deg");
    j.gear = number(o, path, "gear");
    t.joints.push_back(j);
  }

  // Structural problems are parse errors; parameter bounds are left to validate().
  const auto structure = validate_structure(t);
  if (!structure.empty()) throw ParseError("/" + structure.front().field, structure.front().message);
  return canonicalize(t);
}

}  // namespace tame
