#include "stapkit/rational.hpp"

#include <cctype>

namespace stapkit {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    result = Rational(mpz_class(std::string(num), 10), d);
    result.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (!whole.empty() && !all_digits(whole)) return std::nullopt;
    if (!frac.empty() && !all_digits(frac)) return std::nullopt;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
    mpz_class f = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac), 10);
    result = Rational(w * scale + f, scale);
    result.canonicalize();
  } else {
    if (!all_digits(body)) return std::nullopt;
    result = Rational(mpz_class(std::string(body), 10));
  }
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();

  // Terminating decimal iff the denominator is 2^a 5^b.
  mpz_class den = value.get_den();
  unsigned twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return value.get_str();

  unsigned digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = value.get_num() * scale / value.get_den();
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace stapkit
