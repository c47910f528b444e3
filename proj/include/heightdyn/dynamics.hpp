#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "heightdyn/height_machine.hpp"

namespace heightdyn {

struct Periodic {
  std::size_t tail = 0;
  std::size_t period = 0;
  friend bool operator==(const Periodic&, const Periodic&) = default;
};
struct Escaped {
  std::size_t at = 0;
  friend bool operator==(const Escaped&, const Escaped&) = default;
};
struct Truncated {
  friend bool operator==(const Truncated&, const Truncated&) = default;
};
using OrbitStatus = std::variant<Periodic, Escaped, Truncated>;

/// points[0] = P, points[i+1] = f(points[i]). For a periodic orbit the
/// last point is the first repeat, so points[tail] == points[tail + period].
struct OrbitRecord {
  std::vector<MultiPoint> points;
  std::vector<double> heights;
  OrbitStatus status;

  bool periodic() const { return std::holds_alternative<Periodic>(status); }
  bool escaped() const { return std::holds_alternative<Escaped>(status); }
  bool truncated() const { return std::holds_alternative<Truncated>(status); }
};

/// Iterates f at most max_iter times. Heights are taken with respect to
/// `weights` (default Σ E_i); the orbit escapes once a height exceeds ceiling.
OrbitRecord orbit(const MultiHomogeneousMap& map, const MultiPoint& start, std::size_t max_iter, double ceiling,
                  std::span<const double> weights = {});

struct NorthcottBucket {
  double lower = 0;
  double upper = 0;
  std::size_t count = 0;
  double c1_max = 0;
  double c2_max = 0;
};

struct NorthcottReport {
  double epsilon = 0;
  double mu1 = 0;
  double mu2 = 0;
  /// max (μ₁ − ε) h_D(P) − h_D(φP)
  double c1_emp = 0;
  /// max h_D(φP) − (μ₂ + ε) h_D(P)
  double c2_emp = 0;
  MultiPoint c1_argmax;
  MultiPoint c2_argmax;
  std::size_t sample_size = 0;
  long height_bound = 0;
  double bucket_width = 1.0;
  /// Buckets of h_D(P) of width bucket_width starting at 0.
  std::vector<NorthcottBucket> buckets;
};

/// Empirical constants of the two-sided comparison
/// (μ₁ − ε) h_D(P) − C₁ ≤ h_D(φP) ≤ (μ₂ + ε) h_D(P) + C₂
/// over every point with factor heights at most `bound`.
NorthcottReport verify_weak_northcott(const MultiHomogeneousMap& map, std::span<const double> divisor, double mu1,
                                      double mu2, double epsilon, long bound);

/// min h_D(φP)/h_D(P) over enumerated P with h_D(P) ≥ h_min.
double estimate_silverman_mu(const MultiHomogeneousMap& map, std::span<const double> divisor, long bound,
                             double h_min);

/// Preperiodic points satisfy h_D(P) ≤ C(1+ε)/ε with ε = (μ₁ − 1)/2.
double preperiodic_height_bound(double mu1, double constant);

/// 4 · k · log H + C for k factors: heights beyond this are treated as escaping.
double default_escape_ceiling(const MultiHomogeneousMap& map, long bound, double constant = 0.0);

struct PreperiodicSearch {
  std::vector<MultiPoint> preperiodic;
  /// Orbits that neither repeated nor escaped within max_iter.
  std::vector<MultiPoint> undetermined;
  std::size_t examined = 0;
};

/// Classifies every point of height ≤ bound by its orbit; results sorted.
PreperiodicSearch find_preperiodic(const MultiHomogeneousMap& map, long bound, std::size_t max_iter, double ceiling);

}  // namespace heightdyn
