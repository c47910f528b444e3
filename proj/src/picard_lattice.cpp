#include "heightdyn/picard_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace heightdyn {

// ---------------------------------------------------------------- DivisorClass

DivisorClass DivisorClass::basis(std::size_t rank, std::size_t index) {
  if (index >= rank) throw DimensionError("basis index out of range");
  DivisorClass out = zero(rank);
  out.coeffs_[index] = 1;
  return out;
}

Integer DivisorClass::field() const {
  Integer field = 0;
  for (const auto& c : coeffs_) field = common_field(field, c.field());
  return field;
}

bool DivisorClass::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& c) { return c.is_zero(); });
}

std::vector<long double> DivisorClass::to_long_doubles() const {
  std::vector<long double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) {
    Approximation approx = to_float(c, 80);
    out.push_back(std::strtold(approx.decimal.c_str(), nullptr));
  }
  return out;
}

std::vector<double> DivisorClass::to_doubles() const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.to_double());
  return out;
}

DivisorClass& DivisorClass::operator+=(const DivisorClass& rhs) {
  if (rank() != rhs.rank()) throw DimensionError("divisor rank mismatch");
  for (std::size_t i = 0; i < rank(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

DivisorClass& DivisorClass::operator-=(const DivisorClass& rhs) {
  if (rank() != rhs.rank()) throw DimensionError("divisor rank mismatch");
  for (std::size_t i = 0; i < rank(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

DivisorClass& DivisorClass::operator*=(const QuadraticNumber& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

DivisorClass DivisorClass::operator-() const {
  DivisorClass out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

// ------------------------------------------------------------- lattice checks

namespace {

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
};

// Congruence diagonalisation over Q (Sylvester's law of inertia).
Inertia inertia(RationalMatrix a) {
  const std::size_t n = a.size();
  Inertia out;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = n;
    for (std::size_t i = k; i < n; ++i) {
      if (sgn(a[i][i]) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == n) {
      // No nonzero diagonal entry: adding row/column j to i creates 2·a_ij.
      for (std::size_t i = k; i < n && pivot == n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (sgn(a[i][j]) != 0) {
            for (std::size_t c = 0; c < n; ++c) a[i][c] += a[j][c];
            for (std::size_t r = 0; r < n; ++r) a[r][i] += a[r][j];
            pivot = i;
            break;
          }
        }
      }
    }
    if (pivot == n) {
      out.zero += n - k;
      break;
    }
    if (pivot != k) {
      std::swap(a[pivot], a[k]);
      for (auto& row : a) std::swap(row[pivot], row[k]);
    }
    const Rational p = a[k][k];
    (sgn(p) > 0 ? out.positive : out.negative) += 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (sgn(a[i][k]) == 0) continue;
      const Rational f = a[i][k] / p;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
    for (std::size_t i = k + 1; i < n; ++i) a[k][i] = 0;
  }
  return out;
}

std::vector<Rational> solve(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && sgn(a[pivot][k]) == 0) ++pivot;
    if (pivot == n) throw DomainError("singular matrix");
    std::swap(a[pivot], a[k]);
    std::swap(b[pivot], b[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || sgn(a[i][k]) == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

Rational rational_form(const RationalMatrix& g, const std::vector<Rational>& u) {
  Rational out = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) out += g[i][j] * u[i] * u[j];
  return out;
}

void validate_quadratic_cone(const QuadraticCone& cone, std::size_t rank) {
  if (cone.gram.size() != rank) throw DimensionError("gram matrix must be rank x rank");
  for (const auto& row : cone.gram)
    if (row.size() != rank) throw DimensionError("gram matrix must be rank x rank");
  if (cone.linear.size() != rank) throw DimensionError("linear functional must have rank entries");
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (cone.gram[i][j] != cone.gram[j][i]) throw DomainError("gram matrix is not symmetric");
  if (std::all_of(cone.linear.begin(), cone.linear.end(), [](const Rational& r) { return sgn(r) == 0; }))
    throw DomainError("linear functional of a quadratic cone must be nonzero");
  Inertia s = inertia(cone.gram);
  if (s.zero != 0 || s.positive != 1)
    throw DomainError("quadratic cone needs a nondegenerate form of signature (1, rank-1)");
  // ℓ = G·u with q(u) > 0 selects one nappe and makes its closure {q ≥ 0, ℓ ≥ 0}.
  std::vector<Rational> u = solve(cone.gram, cone.linear);
  if (sgn(rational_form(cone.gram, u)) <= 0)
    throw DomainError("linear functional does not select a nappe of the light cone");
}

}  // namespace

// --------------------------------------------------------------- PicardLattice

PicardLattice PicardLattice::create(std::vector<std::string> labels, ConeSpec cone, Integer field_d,
                                    DivisorClass witness_ample) {
  if (labels.empty()) throw DomainError("lattice rank must be at least 1");
  std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != labels.size()) throw DomainError("basis labels must be distinct");
  if (sgn(field_d) < 0) throw DomainError("field radicand must be non-negative");
  if (sgn(field_d) != 0 && squarefree_split(field_d).squarefree != field_d)
    throw DomainError("field radicand must be square-free");
  if (field_d == 1) field_d = 0;
  if (auto* q = std::get_if<QuadraticCone>(&cone)) validate_quadratic_cone(*q, labels.size());

  PicardLattice out;
  out.labels_ = std::move(labels);
  out.cone_ = std::move(cone);
  out.field_d_ = std::move(field_d);
  out.witness_ = std::move(witness_ample);
  out.check_rank(out.witness_.rank());
  if (!out.is_ample(out.witness_)) throw DomainError("witness class is not ample; cone interior not certified");
  return out;
}

PicardLattice PicardLattice::orthant(std::size_t rank, Integer field_d) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rank; ++i) labels.push_back("E" + std::to_string(i + 1));
  return create(std::move(labels), OrthantCone{}, std::move(field_d),
                DivisorClass(std::vector<QuadraticNumber>(rank, QuadraticNumber(1))));
}

void PicardLattice::check_rank(std::size_t rank) const {
  if (rank != this->rank())
    throw DimensionError("divisor has " + std::to_string(rank) + " coefficients, lattice rank is " +
                         std::to_string(this->rank()));
}

QuadraticNumber PicardLattice::bilinear(const DivisorClass& v, const DivisorClass& w) const {
  const auto* q = std::get_if<QuadraticCone>(&cone_);
  if (q == nullptr) throw DomainError("orthant lattice has no intersection form");
  check_rank(v.rank());
  check_rank(w.rank());
  QuadraticNumber out;
  for (std::size_t i = 0; i < rank(); ++i) {
    QuadraticNumber row;
    for (std::size_t j = 0; j < rank(); ++j) row += QuadraticNumber(q->gram[i][j]) * w[j];
    out += v[i] * row;
  }
  return out;
}

QuadraticNumber PicardLattice::linear_form(const DivisorClass& v) const {
  const auto* q = std::get_if<QuadraticCone>(&cone_);
  if (q == nullptr) throw DomainError("orthant lattice has no linear functional");
  check_rank(v.rank());
  QuadraticNumber out;
  for (std::size_t i = 0; i < rank(); ++i) out += QuadraticNumber(q->linear[i]) * v[i];
  return out;
}

bool PicardLattice::is_ample(const DivisorClass& d) const {
  check_rank(d.rank());
  if (is_orthant()) return std::all_of(d.coeffs().begin(), d.coeffs().end(), [](const auto& c) { return c.sign() > 0; });
  return bilinear(d, d).sign() > 0 && linear_form(d).sign() > 0;
}

bool PicardLattice::is_nef(const DivisorClass& d) const {
  check_rank(d.rank());
  if (is_orthant()) return std::all_of(d.coeffs().begin(), d.coeffs().end(), [](const auto& c) { return c.sign() >= 0; });
  return bilinear(d, d).sign() >= 0 && linear_form(d).sign() >= 0;
}

namespace {

long double approx_form(const QuadraticCone& q, std::span<const long double> v) {
  long double out = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out += static_cast<long double>(q.gram[i][j].get_d()) * v[i] * v[j];
  return out;
}

long double approx_bilinear(const QuadraticCone& q, std::span<const long double> v, std::span<const long double> w) {
  long double out = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out += static_cast<long double>(q.gram[i][j].get_d()) * v[i] * w[j];
  return out;
}

long double approx_linear(const QuadraticCone& q, std::span<const long double> v) {
  long double out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) out += static_cast<long double>(q.linear[i].get_d()) * v[i];
  return out;
}

}  // namespace

bool PicardLattice::is_ample_approx(std::span<const long double> v) const {
  check_rank(v.size());
  if (is_orthant()) return std::all_of(v.begin(), v.end(), [](long double c) { return c > 0; });
  const auto& q = std::get<QuadraticCone>(cone_);
  return approx_form(q, v) > 0 && approx_linear(q, v) > 0;
}

bool PicardLattice::is_nef_approx(std::span<const long double> v) const {
  check_rank(v.size());
  if (is_orthant()) return std::all_of(v.begin(), v.end(), [](long double c) { return c >= 0; });
  const auto& q = std::get<QuadraticCone>(cone_);
  return approx_form(q, v) >= 0 && approx_linear(q, v) >= 0;
}

// ------------------------------------------------------------ line sections

namespace {

template <class T>
struct Section {
  bool empty = false;
  std::optional<T> lower;
  std::optional<T> upper;
};

// Splits the line at the sorted breakpoints and classifies every open piece
// and every breakpoint with `member`. Convexity of the cone makes the member
// elements contiguous.
template <class T, class Member>
Section<T> classify_pieces(std::vector<T> points, Member member) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Element 2i is the open piece left of points[i]; element 2i+1 is points[i].
  const std::size_t count = 2 * points.size() + 1;
  auto sample = [&](std::size_t e) -> T {
    if (points.empty()) return T(0);
    if (e % 2 == 1) return points[e / 2];
    const std::size_t piece = e / 2;
    if (piece == 0) return points.front() - T(1);
    if (piece == points.size()) return points.back() + T(1);
    return (points[piece - 1] + points[piece]) / T(2);
  };

  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  std::vector<bool> inside(count);
  for (std::size_t e = 0; e < count; ++e) {
    inside[e] = member(sample(e));
    if (inside[e]) {
      if (!first) first = e;
      last = e;
    }
  }
  Section<T> out;
  if (!first) {
    out.empty = true;
    return out;
  }
  for (std::size_t e = *first; e <= *last; ++e)
    if (!inside[e]) throw std::logic_error("cone section is not an interval; cone is not convex");

  if (*first % 2 == 1) {
    out.lower = points[*first / 2];
  } else if (*first > 0) {
    out.lower = points[*first / 2 - 1];
  }
  if (*last % 2 == 1) {
    out.upper = points[*last / 2];
  } else if (*last / 2 < points.size()) {
    out.upper = points[*last / 2];
  }
  return out;
}

// Real roots of A t² + 2B t + C in exact arithmetic; nullopt when the
// discriminant's square root leaves the field.
std::optional<std::vector<QuadraticNumber>> exact_roots(const QuadraticNumber& a, const QuadraticNumber& b,
                                                        const QuadraticNumber& c, const Integer& field) {
  std::vector<QuadraticNumber> roots;
  if (a.is_zero()) {
    if (!b.is_zero()) roots.push_back(-c / (QuadraticNumber(2) * b));
    return roots;
  }
  QuadraticNumber disc = b * b - a * c;
  const int s = disc.sign();
  if (s < 0) return roots;
  if (s == 0) {
    roots.push_back(-b / a);
    return roots;
  }
  auto root = exact_sqrt(disc, field);
  if (!root) return std::nullopt;
  roots.push_back((-b - *root) / a);
  roots.push_back((-b + *root) / a);
  return roots;
}

std::vector<long double> approx_roots(long double a, long double b, long double c) {
  std::vector<long double> roots;
  if (a == 0) {
    if (b != 0) roots.push_back(-c / (2 * b));
    return roots;
  }
  const long double disc = b * b - a * c;
  if (disc < 0) return roots;
  if (disc == 0) {
    roots.push_back(-b / a);
    return roots;
  }
  const long double sq = std::sqrt(disc);
  const long double q = -(b + (b >= 0 ? sq : -sq));
  roots.push_back(q / a);
  if (q != 0) roots.push_back(c / q);
  return roots;
}

Integer combined_field(const DivisorClass& base, const DivisorClass& direction) {
  return common_field(base.field(), direction.field());
}

ConeInterval to_interval(Section<QuadraticNumber> s) {
  if (s.empty) return ConeInterval::make_empty();
  return {false, std::move(s.lower), std::move(s.upper)};
}

ConeInterval orthant_interval(const DivisorClass& base, const DivisorClass& direction, bool closed) {
  std::optional<QuadraticNumber> lower;
  std::optional<QuadraticNumber> upper;
  for (std::size_t i = 0; i < base.rank(); ++i) {
    const int sd = direction[i].sign();
    if (sd == 0) {
      const int sb = base[i].sign();
      if (sb < 0 || (sb == 0 && !closed)) return ConeInterval::make_empty();
      continue;
    }
    QuadraticNumber ratio = -base[i] / direction[i];
    if (sd > 0) {
      if (!lower || ratio > *lower) lower = ratio;
    } else {
      if (!upper || ratio < *upper) upper = ratio;
    }
  }
  if (lower && upper) {
    const auto order = *lower <=> *upper;
    if (order == std::strong_ordering::greater || (!closed && order == std::strong_ordering::equal))
      return ConeInterval::make_empty();
  }
  return {false, std::move(lower), std::move(upper)};
}

std::optional<ConeInterval> quadratic_interval(const PicardLattice& lattice, const DivisorClass& base,
                                               const DivisorClass& direction, bool closed) {
  const Integer field = combined_field(base, direction);
  const QuadraticNumber a = lattice.bilinear(direction, direction);
  const QuadraticNumber b = lattice.bilinear(base, direction);
  const QuadraticNumber c = lattice.bilinear(base, base);
  auto roots = exact_roots(a, b, c, field);
  if (!roots) return std::nullopt;
  const QuadraticNumber l1 = lattice.linear_form(direction);
  if (!l1.is_zero()) roots->push_back(-lattice.linear_form(base) / l1);
  try {
    auto member = [&](const QuadraticNumber& t) {
      DivisorClass point = base + t * direction;
      return closed ? lattice.is_nef(point) : lattice.is_ample(point);
    };
    return to_interval(classify_pieces(std::move(*roots), member));
  } catch (const IncompatibleFieldError&) {
    // A root in Q(√e) met a base point with coefficients in Q(√d), d ≠ e.
    return std::nullopt;
  }
}

}  // namespace

std::optional<ConeInterval> try_cone_interval(const PicardLattice& lattice, const DivisorClass& base,
                                              const DivisorClass& direction) {
  if (base.rank() != lattice.rank() || direction.rank() != lattice.rank())
    throw DimensionError("cone_interval: rank mismatch");
  try {
    if (lattice.is_orthant()) return orthant_interval(base, direction, false);
    return quadratic_interval(lattice, base, direction, false);
  } catch (const IncompatibleFieldError&) {
    return std::nullopt;
  }
}

ConeInterval cone_interval(const PicardLattice& lattice, const DivisorClass& base, const DivisorClass& direction) {
  auto out = try_cone_interval(lattice, base, direction);
  if (!out) throw NotRepresentableError("cone interval endpoints are not representable in a single quadratic field");
  return *out;
}

std::optional<ConeInterval> try_nef_interval(const PicardLattice& lattice, const DivisorClass& base,
                                             const DivisorClass& direction) {
  if (base.rank() != lattice.rank() || direction.rank() != lattice.rank())
    throw DimensionError("nef_interval: rank mismatch");
  try {
    if (lattice.is_orthant()) return orthant_interval(base, direction, true);
    return quadratic_interval(lattice, base, direction, true);
  } catch (const IncompatibleFieldError&) {
    return std::nullopt;
  }
}

ApproxInterval approx_cone_interval(const PicardLattice& lattice, std::span<const long double> base,
                                    std::span<const long double> direction) {
  constexpr long double inf = std::numeric_limits<long double>::infinity();
  if (base.size() != lattice.rank() || direction.size() != lattice.rank())
    throw DimensionError("approx_cone_interval: rank mismatch");
  ApproxInterval out{false, -inf, inf};
  if (lattice.is_orthant()) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (direction[i] == 0) {
        if (base[i] <= 0) return {true, 0, 0};
        continue;
      }
      const long double ratio = -base[i] / direction[i];
      if (direction[i] > 0) {
        out.lower = std::max(out.lower, ratio);
      } else {
        out.upper = std::min(out.upper, ratio);
      }
    }
    if (out.lower >= out.upper) return {true, 0, 0};
    return out;
  }
  const auto& q = std::get<QuadraticCone>(lattice.cone());
  std::vector<long double> points = approx_roots(approx_form(q, direction), approx_bilinear(q, base, direction),
                                                 approx_form(q, base));
  const long double l1 = approx_linear(q, direction);
  if (l1 != 0) points.push_back(-approx_linear(q, base) / l1);
  std::vector<long double> point(base.size());
  auto member = [&](long double t) {
    for (std::size_t i = 0; i < base.size(); ++i) point[i] = base[i] + t * direction[i];
    return lattice.is_ample_approx(point);
  };
  Section<long double> s;
  try {
    s = classify_pieces(std::move(points), member);
  } catch (const std::logic_error&) {
    // Rounding near a tangency can split an interval; treat as degenerate.
    return {true, 0, 0};
  }
  if (s.empty) return {true, 0, 0};
  out.lower = s.lower.value_or(-inf);
  out.upper = s.upper.value_or(inf);
  return out;
}

ApproxInterval bisect_cone_interval(const PicardLattice& lattice, const DivisorClass& base,
                                    const DivisorClass& direction, long double tolerance,
                                    std::optional<long double> hint) {
  constexpr long double inf = std::numeric_limits<long double>::infinity();
  constexpr long double far = 1e15L;
  if (base.rank() != lattice.rank() || direction.rank() != lattice.rank())
    throw DimensionError("bisect_cone_interval: rank mismatch");
  const std::vector<long double> b = base.to_long_doubles();
  const std::vector<long double> d = direction.to_long_doubles();
  std::vector<long double> point(b.size());
  auto member = [&](long double t) {
    for (std::size_t i = 0; i < b.size(); ++i) point[i] = b[i] + t * d[i];
    return lattice.is_ample_approx(point);
  };

  std::optional<long double> inside;
  if (hint && member(*hint)) inside = hint;
  if (!inside && member(0)) inside = 0.0L;
  for (int k = -40; !inside && k <= 50; ++k) {
    const long double t = std::ldexp(1.0L, k);
    if (member(t)) inside = t;
    else if (member(-t)) inside = -t;
  }
  if (!inside) return {true, 0, 0};

  auto search = [&](long double sense) -> long double {
    long double step = 1;
    long double good = *inside;
    long double bad = good + sense * step;
    while (member(bad)) {
      good = bad;
      step *= 2;
      if (step > far) return sense * inf;
      bad = *inside + sense * step;
    }
    while (std::fabs(bad - good) > tolerance) {
      const long double mid = (good + bad) / 2;
      if (mid == good || mid == bad) break;
      (member(mid) ? good : bad) = mid;
    }
    return (good + bad) / 2;
  };
  return {false, search(-1), search(1)};
}

QuadraticNumber dominance_scale(const PicardLattice& lattice, const DivisorClass& d1, const DivisorClass& d2) {
  if (!lattice.is_ample(d1) || !lattice.is_ample(d2)) throw DomainError("dominance_scale requires ample classes");
  ConeInterval interval = cone_interval(lattice, -d2, d1);
  if (interval.empty || !interval.lower || interval.upper)
    throw std::logic_error("dominance_scale: unexpected interval shape for ample inputs");
  return *interval.lower;
}

double dominance_scale_approx(const PicardLattice& lattice, const DivisorClass& d1, const DivisorClass& d2,
                              long double tolerance) {
  if (!lattice.is_ample(d1) || !lattice.is_ample(d2)) throw DomainError("dominance_scale requires ample classes");
  ApproxInterval interval = bisect_cone_interval(lattice, -d2, d1, tolerance);
  if (interval.empty || std::isinf(interval.lower))
    throw std::logic_error("dominance_scale: bisection failed to bracket the lower endpoint");
  return static_cast<double>(interval.lower);
}

}  // namespace heightdyn
