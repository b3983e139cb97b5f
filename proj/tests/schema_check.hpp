#pragma once

// Minimal JSON Schema (draft-07 subset) validator, enough to check the
// summary documents against the schema shipped in schema/. Supported
// keywords: $ref (into #/definitions), type (string or array), enum,
// const, required, properties, additionalProperties (boolean), items
// (single schema), oneOf. Returns "" when valid, else one diagnostic.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace deo::test {

using nlohmann::json;

inline std::string schema_path() {
#ifdef DEO_SCHEMA_DIR
  return std::string(DEO_SCHEMA_DIR) + "/summary.schema.json";
#else
  return "schema/summary.schema.json";
#endif
}

inline json load_schema() {
  std::ifstream in(schema_path());
  if (!in) throw std::runtime_error("cannot open schema: " + schema_path());
  json j;
  in >> j;
  return j;
}

inline bool type_matches(const std::string& t, const json& v) {
  if (t == "null") return v.is_null();
  if (t == "boolean") return v.is_boolean();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "number") return v.is_number();
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  return false;
}

inline std::string schema_validate(const json& root, const json& schema,
                                   const json& value, const std::string& where) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) return where + ": unsupported $ref " + ref;
    const std::string name = ref.substr(prefix.size());
    if (!root.contains("definitions") || !root["definitions"].contains(name)) {
      return where + ": unresolved $ref " + ref;
    }
    return schema_validate(root, root["definitions"][name], value, where);
  }

  if (schema.contains("oneOf")) {
    int matches = 0;
    std::string last;
    for (const json& sub : schema["oneOf"]) {
      const std::string err = schema_validate(root, sub, value, where);
      if (err.empty()) {
        ++matches;
      } else {
        last = err;
      }
    }
    if (matches != 1) {
      return where + ": oneOf matched " + std::to_string(matches) +
             " alternatives (last failure: " + last + ")";
    }
  }

  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), value);
    } else {
      for (const json& alt : t) {
        if (type_matches(alt.get<std::string>(), value)) ok = true;
      }
    }
    if (!ok) return where + ": type mismatch, got " + value.dump().substr(0, 60);
  }

  if (schema.contains("enum")) {
    bool ok = false;
    for (const json& alt : schema["enum"]) {
      if (alt == value) ok = true;
    }
    if (!ok) return where + ": not in enum: " + value.dump().substr(0, 60);
  }

  if (schema.contains("const") && schema["const"] != value) {
    return where + ": const mismatch: " + value.dump().substr(0, 60);
  }

  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const json& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          return where + ": missing required key '" + key.get<std::string>() + "'";
        }
      }
    }
    const json props =
        schema.contains("properties") ? schema["properties"] : json::object();
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (props.contains(it.key())) {
        const std::string err =
            schema_validate(root, props[it.key()], it.value(), where + "." + it.key());
        if (!err.empty()) return err;
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"].is_boolean() &&
                 !schema["additionalProperties"].get<bool>()) {
        return where + ": unexpected key '" + it.key() + "'";
      }
    }
  }

  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string err = schema_validate(
          root, schema["items"], value[i], where + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
    }
  }

  return "";
}

/// Validate a summary document against the shipped schema file.
inline std::string check_summary_schema(const json& value) {
  const json schema = load_schema();
  return schema_validate(schema, schema, value, "$");
}

}  // namespace deo::test
