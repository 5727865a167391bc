#ifndef EINLAB_REPORT_HPP
#define EINLAB_REPORT_HPP

#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace einlab {

/// Minimal JSON document model with deterministic serialization: object keys
/// are emitted in sorted order and doubles with 17 significant digits, so a
/// given report is byte-identical across runs.
class JsonValue {
 public:
  using Object = std::map<std::string, JsonValue>;
  using Array = std::vector<JsonValue>;

  JsonValue() : v_(nullptr) {}
  JsonValue(std::nullptr_t) : v_(nullptr) {}
  JsonValue(bool b) : v_(b) {}
  JsonValue(double d) : v_(d) {}
  JsonValue(int i) : v_(static_cast<double>(i)) {}
  JsonValue(long long i) : v_(static_cast<double>(i)) {}
  JsonValue(unsigned u) : v_(static_cast<double>(u)) {}
  JsonValue(const char* s) : v_(std::string(s)) {}
  JsonValue(std::string s) : v_(std::move(s)) {}
  JsonValue(Array a) : v_(std::move(a)) {}
  JsonValue(Object o) : v_(std::move(o)) {}

  bool is_object() const { return std::holds_alternative<Object>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_number() const { return std::holds_alternative<double>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }

  JsonValue& operator[](const std::string& key) {
    if (!is_object()) v_ = Object{};
    return std::get<Object>(v_)[key];
  }
  const JsonValue& at(const std::string& key) const {
    return std::get<Object>(v_).at(key);
  }
  void push_back(JsonValue item) {
    if (!is_array()) v_ = Array{};
    std::get<Array>(v_).push_back(std::move(item));
  }

  double number() const { return std::get<double>(v_); }
  bool boolean() const { return std::get<bool>(v_); }
  const std::string& str() const { return std::get<std::string>(v_); }
  const Array& array() const { return std::get<Array>(v_); }
  const Object& object() const { return std::get<Object>(v_); }

  std::string dump(int indent = 0) const {
    std::string out;
    write(out, indent, 0);
    return out;
  }

 private:
  std::variant<std::nullptr_t, bool, double, std::string, Array, Object> v_;

  static void escape(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    out += '"';
  }

  void write(std::string& out, int indent, int depth) const {
    auto pad = [&](int d) {
      if (indent > 0) {
        out += '\n';
        out.append(static_cast<size_t>(indent) * d, ' ');
      }
    };
    if (std::holds_alternative<std::nullptr_t>(v_)) {
      out += "null";
    } else if (std::holds_alternative<bool>(v_)) {
      out += std::get<bool>(v_) ? "true" : "false";
    } else if (std::holds_alternative<double>(v_)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v_));
      out += buf;
    } else if (std::holds_alternative<std::string>(v_)) {
      escape(out, std::get<std::string>(v_));
    } else if (std::holds_alternative<Array>(v_)) {
      const Array& a = std::get<Array>(v_);
      out += '[';
      for (size_t i = 0; i < a.size(); ++i) {
        if (i) out += ',';
        pad(depth + 1);
        a[i].write(out, indent, depth + 1);
      }
      if (!a.empty()) pad(depth);
      out += ']';
    } else {
      const Object& o = std::get<Object>(v_);
      out += '{';
      size_t i = 0;
      for (const auto& [k, val] : o) {
        if (i++) out += ',';
        pad(depth + 1);
        escape(out, k);
        out += indent > 0 ? ": " : ":";
        val.write(out, indent, depth + 1);
      }
      if (!o.empty()) pad(depth);
      out += '}';
    }
  }
};

}  // namespace einlab

#endif
