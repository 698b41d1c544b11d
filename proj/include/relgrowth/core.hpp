// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Shared value types, numeric helpers and the exception hierarchy.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace relgrowth {

using BigInt      = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using Fraction    = boost::rational<std::int64_t>;

using Vertex = std::size_t;

// A vector in Z^nu. Ranks up to 4 stay on the stack.
using Weight = boost::container::small_vector<std::int64_t, 4>;

// Point of R^nu / Z^nu in floating point and exact rational form.
using TorusPoint    = std::vector<double>;
using RationalPoint = std::vector<Fraction>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

////////////////////////////////////////////////////////////////////////
// Exceptions
////////////////////////////////////////////////////////////////////////

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed automaton text.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input: automaton, homomorphism or lattice data that
// cannot come from a hyperbolic group with a Z^nu quotient.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A configured size cap would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Eigensolver failure, eigenvalue collision or loss of spectral gap.
class NumericalError : public Error {
 public:
  using Error::Error;
};

////////////////////////////////////////////////////////////////////////
// Weight helpers
////////////////////////////////////////////////////////////////////////

struct WeightHash {
  std::size_t operator()(Weight const& w) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto x : w) {
      h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6)
           + (h >> 2);
    }
    return h;
  }
};

inline Weight zero_weight(std::size_t rank) {
  return Weight(rank, 0);
}

inline bool is_zero(Weight const& w) {
  for (auto x : w) {
    if (x != 0) {
      return false;
    }
  }
  return true;
}

inline Weight operator+(Weight const& a, Weight const& b) {
  Weight r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = a[i] + b[i];
  }
  return r;
}

inline Weight operator-(Weight const& a, Weight const& b) {
  Weight r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = a[i] - b[i];
  }
  return r;
}

inline Weight operator-(Weight const& a) {
  Weight r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = -a[i];
  }
  return r;
}

inline Weight operator*(std::int64_t k, Weight const& a) {
  Weight r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = k * a[i];
  }
  return r;
}

inline std::int64_t max_norm(Weight const& w) {
  std::int64_t m = 0;
  for (auto x : w) {
    m = std::max(m, x < 0 ? -x : x);
  }
  return m;
}

// <t, w> for a real torus point.
inline double pairing(std::span<double const> t, Weight const& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += t[i] * static_cast<double>(w[i]);
  }
  return s;
}

// e^{2 pi i <t, w>}
inline std::complex<double> character(std::span<double const> t,
                                      Weight const& w) {
  return std::polar(1.0, kTwoPi * pairing(t, w));
}

inline std::string to_string(Weight const& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) {
    os << (i ? "," : "") << w[i];
  }
  os << ')';
  return os.str();
}

////////////////////////////////////////////////////////////////////////
// Rational and big-integer helpers
////////////////////////////////////////////////////////////////////////

// Representative of q mod 1 in [0, 1).
inline Fraction mod_one(Fraction q) {
  auto n = q.numerator();
  auto d = q.denominator();
  auto r = n % d;
  if (r < 0) {
    r += d;
  }
  return Fraction(r, d);
}

inline std::string to_string(Fraction const& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline TorusPoint to_torus(RationalPoint const& p) {
  TorusPoint t;
  t.reserve(p.size());
  for (auto const& q : p) {
    t.push_back(boost::rational_cast<double>(q));
  }
  return t;
}

// Natural log of |x| for x != 0, valid far beyond the range of double.
inline double log_abs(BigInt const& x) {
  if (x == 0) {
    return -HUGE_VAL;
  }
  BigInt a = boost::multiprecision::abs(x);
  auto   bits = boost::multiprecision::msb(a);
  if (bits < 1000) {
    return std::log(a.convert_to<double>());
  }
  auto shift = bits - 900;
  a >>= shift;
  return std::log(a.convert_to<double>())
         + static_cast<double>(shift) * std::numbers::ln2;
}

// a / b as a double, computed through logs so that huge operands are safe.
inline double ratio(BigInt const& a, BigInt const& b) {
  if (a == 0) {
    return 0.0;
  }
  double r = std::exp(log_abs(a) - log_abs(b));
  return (a < 0) != (b < 0) ? -r : r;
}

}  // namespace relgrowth
