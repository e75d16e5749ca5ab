#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <variant>

namespace asense {

/// A class label or measurement target: either a category name or a number.
/// Ordering is total (numbers before categories, numbers by value, categories
/// lexicographic) so tie-breaking rules are deterministic.
class Label {
public:
  Label() : value_(0.0) {}
  static Label category(std::string name) { return Label(std::move(name)); }
  static Label number(double v) { return Label(v); }

  bool is_number() const { return std::holds_alternative<double>(value_); }
  double number() const { return std::get<double>(value_); }
  const std::string& category() const { return std::get<std::string>(value_); }

  std::string to_string() const {
    if (!is_number()) return category();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", number());
    return buf;
  }

  friend bool operator==(const Label& a, const Label& b) { return a.value_ == b.value_; }
  friend bool operator<(const Label& a, const Label& b) {
    if (a.is_number() != b.is_number()) return a.is_number();
    if (a.is_number()) return a.number() < b.number();
    return a.category() < b.category();
  }

private:
  explicit Label(double v) : value_(v) {}
  explicit Label(std::string s) : value_(std::move(s)) {}
  std::variant<double, std::string> value_;
};

}  // namespace asense
