#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace pircache {

// Expression templates are disabled so the type behaves as a plain value
// type inside Eigen containers and generic formula code.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a finite decimal ("0.05") into an exact ratio.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_ratio(std::string_view text);

/// "184/81" for proper fractions, "10" for integers.
std::string to_fraction_string(const Rational& value);

double to_double(const Rational& value);

/// floor(value) for value >= 0, as an unsigned count.
std::uint64_t floor_to_count(const Rational& value);

}  // namespace pircache
