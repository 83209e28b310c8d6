#pragma once
// Validator for the JSON-schema subset used under schemas/: type, enum,
// const, properties, required, additionalProperties (boolean), items,
// minItems, minLength, numeric bounds, oneOf, anyOf, not and file $refs.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace evicheck::testing {

class SchemaSet {
 public:
  explicit SchemaSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  // Empty on success, otherwise one message per violation.
  std::vector<std::string> validate(const nlohmann::json& value, const std::string& schema_file) {
    std::vector<std::string> errors;
    check(value, load(schema_file), "$", errors);
    return errors;
  }

  bool valid(const nlohmann::json& value, const std::string& schema_file) {
    return validate(value, schema_file).empty();
  }

 private:
  const nlohmann::json& load(const std::string& file) {
    auto it = cache_.find(file);
    if (it == cache_.end()) {
      std::ifstream in(dir_ / file);
      if (!in) throw std::runtime_error("missing schema " + file);
      it = cache_.emplace(file, nlohmann::json::parse(in)).first;
    }
    return it->second;
  }

  static bool has_type(const nlohmann::json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    throw std::runtime_error("unsupported schema type " + type);
  }

  static bool same(const nlohmann::json& a, const nlohmann::json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
    return a == b;
  }

  void check(const nlohmann::json& v, const nlohmann::json& s, const std::string& at,
             std::vector<std::string>& errors) {
    auto fail = [&](const std::string& what) { errors.push_back(at + ": " + what); };
    if (s.contains("$ref")) {
      check(v, load(s["$ref"].get<std::string>()), at, errors);
      return;
    }
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
      } else {
        ok = has_type(v, s["type"].get<std::string>());
      }
      if (!ok) return fail("expected type " + s["type"].dump() + ", got " + v.dump());
    }
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s["enum"]) ok = ok || same(v, e);
      if (!ok) fail(v.dump() + " not in " + s["enum"].dump());
    }
    if (s.contains("const") && !same(v, s["const"])) fail(v.dump() + " != " + s["const"].dump());
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) fail("below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) fail("above maximum");
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) fail("not above exclusiveMinimum");
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) fail("not below exclusiveMaximum");
    }
    if (v.is_string() && s.contains("minLength") &&
        v.get<std::string>().size() < s["minLength"].get<std::size_t>()) {
      fail("string shorter than minLength");
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail("too few items");
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], at + "[" + std::to_string(i) + "]", errors);
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& key : s["required"]) {
          if (!v.contains(key.get<std::string>())) fail("missing required '" + key.get<std::string>() + "'");
        }
      }
      const auto props = s.value("properties", nlohmann::json::object());
      for (const auto& [key, value] : v.items()) {
        if (props.contains(key)) {
          check(value, props[key], at + "." + key, errors);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          fail("unexpected property '" + key + "'");
        }
      }
    }
    auto passes = [&](const nlohmann::json& sub) {
      std::vector<std::string> scratch;
      check(v, sub, at, scratch);
      return scratch.empty();
    };
    if (s.contains("oneOf")) {
      int matched = 0;
      for (const auto& sub : s["oneOf"]) matched += passes(sub) ? 1 : 0;
      if (matched != 1) fail("matches " + std::to_string(matched) + " oneOf branches");
    }
    if (s.contains("anyOf")) {
      bool any = false;
      for (const auto& sub : s["anyOf"]) any = any || passes(sub);
      if (!any) fail("matches no anyOf branch");
    }
    if (s.contains("not") && passes(s["not"])) fail("matches a forbidden schema");
  }

  std::filesystem::path dir_;
  std::map<std::string, nlohmann::json> cache_;
};

}  // namespace evicheck::testing
