#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parkour::runio {

/// Minimal JSON document tree: parse, build, serialize. Numbers are doubles
/// (64-bit integers that must survive exactly are stored as strings by our
/// writers). Object member order is preserved; duplicate keys are rejected.
class Json {
 public:
  enum class Type { Null, Bool, Number, String, Array, Object };

  Json() = default;
  Json(bool b) : type_(Type::Bool), bool_(b) {}
  Json(double v) : type_(Type::Number), num_(v) {}
  Json(int v) : type_(Type::Number), num_(v) {}
  Json(const char* s) : type_(Type::String), str_(s) {}
  Json(std::string s) : type_(Type::String), str_(std::move(s)) {}

  static Json array();
  static Json object();

  Type type() const { return type_; }
  bool is_null() const { return type_ == Type::Null; }
  bool is_bool() const { return type_ == Type::Bool; }
  bool is_number() const { return type_ == Type::Number; }
  bool is_string() const { return type_ == Type::String; }
  bool is_array() const { return type_ == Type::Array; }
  bool is_object() const { return type_ == Type::Object; }

  bool as_bool() const;
  double as_number() const;
  const std::string& as_string() const;

  // arrays
  void push_back(Json v);
  const std::vector<Json>& items() const;
  std::size_t size() const;
  const Json& at(std::size_t i) const;

  // objects
  Json& operator[](const std::string& key);  // inserts null if absent
  const Json* find(std::string_view key) const;
  const Json& at(std::string_view key) const;  // throws if absent
  const std::vector<std::pair<std::string, Json>>& members() const;

  std::string dump(int indent = 0) const;

  /// Throws std::runtime_error with a byte offset on malformed input.
  static Json parse(std::string_view text);

 private:
  Type type_ = Type::Null;
  bool bool_ = false;
  double num_ = 0.0;
  std::string str_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;

  void dump_to(std::string& out, int indent, int depth) const;
};

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

Json json_from_file(const std::string& path);
void json_to_file(const std::string& path, const Json& j, int indent = 2);

}  // namespace parkour::runio
