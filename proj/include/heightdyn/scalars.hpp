#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "heightdyn/errors.hpp"

namespace heightdyn {

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact element a + b√d of a real quadratic field Q(√d).
///
/// The radicand d is kept square-free. Rational values are stored with
/// b = 0 and d = 0, so two representations of the same rational always
/// compare equal regardless of which field they came from. Binary
/// operations accept operands from the same field or where one side is
/// rational; anything else raises IncompatibleFieldError.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(long value) : a_(value) {}
  QuadraticNumber(const Integer& value) : a_(value) {}
  QuadraticNumber(Rational value);
  QuadraticNumber(Rational a, Rational b, Integer d);

  /// Parses "p", "p/q", "p/q+r/s√d", "-√d", ... ("sqrt" is accepted for "√").
  static QuadraticNumber parse(std::string_view text);

  const Rational& rational_part() const noexcept { return a_; }
  const Rational& surd_coefficient() const noexcept { return b_; }
  const Integer& radicand() const noexcept { return d_; }
  bool is_rational() const noexcept { return sgn(b_) == 0; }
  bool is_zero() const noexcept { return sgn(a_) == 0 && sgn(b_) == 0; }

  /// Field radicand, 0 for rationals.
  const Integer& field() const noexcept { return d_; }

  QuadraticNumber conjugate() const;
  /// Field norm (a + b√d)(a - b√d) = a² - d b².
  Rational norm() const;
  QuadraticNumber inverse() const;

  /// Exact sign of the real value, decided with integer comparisons only.
  int sign() const;

  double to_double() const;
  std::string to_string() const;

  QuadraticNumber& operator+=(const QuadraticNumber& rhs);
  QuadraticNumber& operator-=(const QuadraticNumber& rhs);
  QuadraticNumber& operator*=(const QuadraticNumber& rhs);
  QuadraticNumber& operator/=(const QuadraticNumber& rhs);

  friend QuadraticNumber operator+(QuadraticNumber lhs, const QuadraticNumber& rhs) { return lhs += rhs; }
  friend QuadraticNumber operator-(QuadraticNumber lhs, const QuadraticNumber& rhs) { return lhs -= rhs; }
  friend QuadraticNumber operator*(QuadraticNumber lhs, const QuadraticNumber& rhs) { return lhs *= rhs; }
  friend QuadraticNumber operator/(QuadraticNumber lhs, const QuadraticNumber& rhs) { return lhs /= rhs; }
  QuadraticNumber operator-() const;

  friend bool operator==(const QuadraticNumber& lhs, const QuadraticNumber& rhs);
  /// Total order on a common field; throws IncompatibleFieldError across fields.
  friend std::strong_ordering operator<=>(const QuadraticNumber& lhs, const QuadraticNumber& rhs);

 private:
  void canonicalize();

  Rational a_{0};
  Rational b_{0};
  Integer d_{0};
};

enum class ArithOp { add, sub, mul, div };

QuadraticNumber arith(const QuadraticNumber& x, const QuadraticNumber& y, ArithOp op);

inline int sign(const QuadraticNumber& x) { return x.sign(); }

/// Common field of two values: the radicand of the irrational one, or 0.
Integer common_field(const Integer& d1, const Integer& d2);

/// n = c² · s with s square-free. Exact for every n ≥ 0; runs in O(n^{1/3})
/// trial divisions in the worst case.
struct SquarefreeSplit {
  Integer square_root;  // c
  Integer squarefree;   // s
};
SquarefreeSplit squarefree_split(const Integer& n);
/// Same split with at most `max_trial` trial divisors; nullopt when the
/// cofactor is still undetermined after that many.
std::optional<SquarefreeSplit> try_squarefree_split(const Integer& n, unsigned long max_trial);

/// √r = coefficient · √radicand with radicand square-free (1 iff r is a
/// rational square, and r = 0 gives (0, 1)).
struct SurdDecomposition {
  Rational coefficient;
  Integer radicand;
};
SurdDecomposition sqrt_decompose(const Rational& r);

/// Non-negative square root of x inside Q(√field) when one exists. A
/// rational x with an irrational root is representable when field is 0
/// (the root then defines the field) or already the root's radicand. The
/// search for a new field's radicand uses bounded trial division and gives
/// up (nullopt) on inputs too large to factor quickly.
std::optional<QuadraticNumber> exact_sqrt(const QuadraticNumber& x, const Integer& field);

/// Nearest double plus a rigorous bound on |value - x|, and a decimal
/// expansion accurate to 2^-precision_bits.
struct Approximation {
  double value;
  double error_bound;
  std::string decimal;
};
Approximation to_float(const QuadraticNumber& x, unsigned precision_bits = 53);

}  // namespace heightdyn
