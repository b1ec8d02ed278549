#include "pircache/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace pircache {
namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw std::invalid_argument("malformed ratio: '" + std::string(whole) + "'");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("malformed ratio: '" + std::string(whole) + "'");
  }
  return BigInt(std::string(digits));
}

}  // namespace

Rational parse_ratio(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(body.substr(0, slash), text);
    BigInt den = parse_integer(body.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty())
      throw std::invalid_argument("malformed ratio: '" + std::string(text) + "'");
    BigInt num = whole.empty() ? BigInt(0) : parse_integer(whole, text);
    BigInt scale = 1;
    if (!frac.empty()) {
      BigInt f = parse_integer(frac, text);
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      num = num * scale + f;
    }
    value = Rational(num, scale);
  } else {
    value = Rational(parse_integer(body, text));
  }
  return negative ? Rational(-value) : value;
}

std::string to_fraction_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::uint64_t floor_to_count(const Rational& value) {
  if (value < 0) throw std::invalid_argument("negative count");
  BigInt q = boost::multiprecision::numerator(value) / boost::multiprecision::denominator(value);
  return q.convert_to<std::uint64_t>();
}

}  // namespace pircache
