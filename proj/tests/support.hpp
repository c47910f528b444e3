#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/picard_lattice.hpp"
#include "heightdyn/scalars.hpp"

namespace testing {

using namespace heightdyn;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260214);
  return engine;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline Rational random_rational(long span = 20, long max_den = 9) {
  Rational q(uniform(-span, span), uniform(1, max_den));
  q.canonicalize();
  return q;
}

inline QuadraticNumber random_quadratic(long d, long span = 20) {
  return QuadraticNumber(random_rational(span), random_rational(span), d);
}

inline Rational random_positive(long span = 20, long max_den = 9) {
  Rational q(uniform(1, span), uniform(1, max_den));
  q.canonicalize();
  return q;
}

/// Double-precision value of a + b√d computed without the library.
inline long double approx(const QuadraticNumber& x) {
  return static_cast<long double>(x.rational_part().get_d()) +
         static_cast<long double>(x.surd_coefficient().get_d()) *
             std::sqrt(static_cast<long double>(x.radicand().get_d()));
}

inline std::vector<long double> approx(const DivisorClass& d) {
  std::vector<long double> out;
  for (const auto& c : d.coeffs()) out.push_back(approx(c));
  return out;
}

/// Reference membership test for the open cones, in long double.
struct ConeOracle {
  bool orthant = true;
  std::vector<std::vector<long double>> gram;
  std::vector<long double> linear;

  explicit ConeOracle(const PicardLattice& lattice) {
    if (const auto* q = std::get_if<QuadraticCone>(&lattice.cone())) {
      orthant = false;
      for (const auto& row : q->gram) {
        gram.emplace_back();
        for (const auto& x : row) gram.back().push_back(x.get_d());
      }
      for (const auto& x : q->linear) linear.push_back(x.get_d());
    }
  }

  bool ample(const std::vector<long double>& v, long double slack = 0) const {
    if (orthant) {
      for (auto x : v)
        if (!(x > slack)) return false;
      return true;
    }
    long double q = 0, l = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      l += linear[i] * v[i];
      for (std::size_t j = 0; j < v.size(); ++j) q += v[i] * gram[i][j] * v[j];
    }
    return q > slack && l > slack;
  }
};

/// Bisects the boundary of {t : inside(t)} starting from an inside point
/// and moving in direction `sign`; returns ±inf when no boundary is found
/// before |t| reaches 1e12.
inline long double oracle_boundary(const std::function<bool(long double)>& inside, long double start, int sign,
                                   long double tol = 1e-13L) {
  long double step = 1;
  long double in = start;
  long double out = start + sign * step;
  while (inside(out)) {
    in = out;
    step *= 2;
    out = start + sign * step;
    if (step > 1e12L) return sign * INFINITY;
  }
  while (std::fabs(out - in) > tol * std::max<long double>(1, std::fabs(in))) {
    const long double mid = (in + out) / 2;
    (inside(mid) ? in : out) = mid;
  }
  return (in + out) / 2;
}

}  // namespace testing
