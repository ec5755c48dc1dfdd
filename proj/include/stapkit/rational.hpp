#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace stapkit {

// Exact costs. Every comparison in the solvers (slack signs, oracle
// equality, ratio bounds) is done on these.
using Rational = mpq_class;

// Parses "3", "-2", "0.125", "7/4". Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

// Shortest faithful text form: integers print bare, dyadic/decimal values
// print as decimals, everything else as "p/q".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// Cost that may be infinite (unreachable, infeasible).
class ExtendedCost {
 public:
  ExtendedCost() = default;
  explicit ExtendedCost(Rational v) : value_(std::move(v)) {}

  static ExtendedCost infinity() { return ExtendedCost(); }

  bool finite() const { return value_.has_value(); }
  const Rational& value() const { return *value_; }

  friend bool operator<(const ExtendedCost& a, const ExtendedCost& b) {
    if (!a.finite()) return false;
    if (!b.finite()) return true;
    return *a.value_ < *b.value_;
  }
  friend bool operator==(const ExtendedCost& a, const ExtendedCost& b) {
    if (a.finite() != b.finite()) return false;
    return !a.finite() || *a.value_ == *b.value_;
  }
  friend ExtendedCost operator+(const ExtendedCost& a, const ExtendedCost& b) {
    if (!a.finite() || !b.finite()) return infinity();
    return ExtendedCost(*a.value_ + *b.value_);
  }

 private:
  std::optional<Rational> value_;
};

}  // namespace stapkit
