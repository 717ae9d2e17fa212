#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "hahn/rational.hpp"

namespace hahn {

/// An element of the value group Q^d, ordered lexicographically.
class GroupElement {
 public:
  GroupElement() : coords_(1) {}
  explicit GroupElement(std::size_t rank) : coords_(rank) {}
  GroupElement(std::initializer_list<Rational> coords) : coords_(coords) {}
  explicit GroupElement(std::vector<Rational> coords) : coords_(std::move(coords)) {
    for (auto& c : coords_) c.canonicalize();
  }

  /// (q, 0, ..., 0) in rank `rank`.
  static GroupElement scalar(const Rational& q, std::size_t rank = 1);

  std::size_t rank() const { return coords_.size(); }
  const std::vector<Rational>& coords() const { return coords_; }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }
  const Rational& leading() const { return coords_.front(); }

  bool is_zero() const;
  int sign() const;

  GroupElement& operator+=(const GroupElement& o);
  GroupElement& operator-=(const GroupElement& o);
  friend GroupElement operator+(GroupElement a, const GroupElement& b) { return a += b; }
  friend GroupElement operator-(GroupElement a, const GroupElement& b) { return a -= b; }
  GroupElement operator-() const;
  GroupElement scaled(const Rational& q) const;

  friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b);
  friend bool operator==(const GroupElement& a, const GroupElement& b);

  /// "1/2" in rank 1, "1,-1/2" in higher rank.
  std::string to_string() const;

 private:
  std::vector<Rational> coords_;
};

GroupElement parse_group_element(const std::string& text, std::size_t rank);

/// A group element or +infinity. Used for precisions (infinite = exact) and
/// for valuations (infinite = the zero element).
class ExtValue {
 public:
  ExtValue() : infinite_(true), value_(1) {}
  ExtValue(GroupElement g) : infinite_(false), value_(std::move(g)) {}  // NOLINT

  static ExtValue infinity(std::size_t rank = 1) {
    ExtValue e;
    e.value_ = GroupElement(rank);
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  const GroupElement& value() const;

  friend ExtValue operator+(const ExtValue& a, const ExtValue& b);
  friend ExtValue operator+(const ExtValue& a, const GroupElement& b);
  friend ExtValue operator-(const ExtValue& a, const GroupElement& b);

  friend std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b);
  friend bool operator==(const ExtValue& a, const ExtValue& b);

  std::string to_string() const;

 private:
  bool infinite_;
  GroupElement value_;
};

using Precision = ExtValue;

inline ExtValue min(const ExtValue& a, const ExtValue& b) { return b < a ? b : a; }
inline ExtValue max(const ExtValue& a, const ExtValue& b) { return a < b ? b : a; }

}  // namespace hahn
