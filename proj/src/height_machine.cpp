#include "heightdyn/height_machine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heightdyn {

RationalProjectivePoint RationalProjectivePoint::normalize(std::vector<Integer> raw) {
  if (raw.empty()) throw DimensionError("projective point needs at least one coordinate");
  Integer g = 0;
  for (const auto& x : raw) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (sgn(g) == 0) throw DomainError("all coordinates are zero");
  auto lead = std::find_if(raw.begin(), raw.end(), [](const Integer& x) { return sgn(x) != 0; });
  if (sgn(*lead) < 0) g = -g;
  if (g != 1)
    for (auto& x : raw) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  RationalProjectivePoint p;
  p.coords_ = std::move(raw);
  return p;
}

RationalProjectivePoint RationalProjectivePoint::normalize(std::initializer_list<long> raw) {
  std::vector<Integer> coords;
  coords.reserve(raw.size());
  for (long v : raw) coords.emplace_back(v);
  return normalize(std::move(coords));
}

RationalProjectivePoint normalize(std::vector<Integer> raw) { return RationalProjectivePoint::normalize(std::move(raw)); }

std::string RationalProjectivePoint::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i > 0) out += ":";
    out += coords_[i].get_str();
  }
  return out + ")";
}

bool operator<(const RationalProjectivePoint& lhs, const RationalProjectivePoint& rhs) {
  if (lhs.coords_.size() != rhs.coords_.size()) return lhs.coords_.size() < rhs.coords_.size();
  for (std::size_t i = 0; i < lhs.coords_.size(); ++i) {
    int c = cmp(lhs.coords_[i], rhs.coords_[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

Signature MultiPoint::signature() const {
  Signature s;
  s.reserve(factors_.size());
  for (const auto& f : factors_) s.push_back(f.dimension());
  return s;
}

bool MultiPoint::matches(const Signature& signature) const {
  if (signature.size() != factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].dimension() != signature[i]) return false;
  return true;
}

std::string MultiPoint::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i > 0) out += ", ";
    out += factors_[i].to_string();
  }
  return out + "]";
}

bool operator<(const MultiPoint& lhs, const MultiPoint& rhs) {
  return std::lexicographical_compare(lhs.factors_.begin(), lhs.factors_.end(), rhs.factors_.begin(),
                                      rhs.factors_.end());
}

std::size_t MultiPointHash::operator()(const MultiPoint& p) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& f : p.factors()) {
    mix(f.coords().size());
    for (const auto& x : f.coords()) {
      const mpz_srcptr z = x.get_mpz_t();
      mix(static_cast<std::size_t>(z->_mp_size));
      if (z->_mp_size != 0) mix(static_cast<std::size_t>(mpz_getlimbn(z, 0)));
    }
  }
  return h;
}

MultiHomogeneousMap::MultiHomogeneousMap(Signature source, std::vector<std::vector<Polynomial>> targets)
    : source_(std::move(source)), targets_(std::move(targets)) {
  if (source_.empty()) throw DimensionError("source signature is empty");
  offsets_.assign(1, 0);
  for (int n : source_) {
    if (n < 0) throw DimensionError("negative projective dimension in signature");
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(n) + 1);
  }
  if (targets_.empty()) throw DimensionError("map has no target factors");
  const std::size_t vars = offsets_.back();
  degrees_.assign(source_.size(), std::vector<int>(targets_.size(), 0));

  for (std::size_t j = 0; j < targets_.size(); ++j) {
    auto& coords = targets_[j];
    if (coords.empty()) throw DimensionError("target factor " + std::to_string(j) + " has no coordinates");
    bool seen = false;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      auto& poly = coords[c];
      std::erase_if(poly, [](const Term& t) { return sgn(t.coefficient) == 0; });
      if (poly.empty())
        throw DomainError("target factor " + std::to_string(j) + " coordinate " + std::to_string(c) +
                          " is the zero polynomial");
      for (const auto& term : poly) {
        if (term.exponents.size() != vars)
          throw DimensionError("exponent vector has " + std::to_string(term.exponents.size()) + " entries, expected " +
                               std::to_string(vars));
        for (std::size_t i = 0; i < source_.size(); ++i) {
          int d = 0;
          for (std::size_t v = offsets_[i]; v < offsets_[i + 1]; ++v) {
            if (term.exponents[v] < 0) throw DomainError("negative exponent");
            d += term.exponents[v];
          }
          if (!seen) {
            degrees_[i][j] = d;
          } else if (degrees_[i][j] != d) {
            throw DomainError("not multihomogeneous: target factor " + std::to_string(j) + " mixes degrees " +
                              std::to_string(degrees_[i][j]) + " and " + std::to_string(d) + " in block " +
                              std::to_string(i));
          }
        }
        seen = true;
      }
    }
  }
}

MultiHomogeneousMap MultiHomogeneousMap::power_map(int n, int degree) {
  if (n < 0 || degree < 0) throw DomainError("power map needs n >= 0 and degree >= 0");
  std::vector<Polynomial> coords;
  for (int i = 0; i <= n; ++i) {
    Term t{1, std::vector<int>(static_cast<std::size_t>(n) + 1, 0)};
    t.exponents[static_cast<std::size_t>(i)] = degree;
    coords.push_back({t});
  }
  return MultiHomogeneousMap({n}, {coords});
}

MultiHomogeneousMap MultiHomogeneousMap::identity(const Signature& signature) {
  std::vector<MultiHomogeneousMap> factors;
  for (int n : signature) factors.push_back(power_map(n, 1));
  return product(factors);
}

MultiHomogeneousMap MultiHomogeneousMap::product(const std::vector<MultiHomogeneousMap>& factors) {
  if (factors.empty()) throw DimensionError("product of no maps");
  Signature source;
  std::size_t vars = 0;
  for (const auto& f : factors) {
    source.insert(source.end(), f.source_.begin(), f.source_.end());
    vars += f.variable_count();
  }
  std::vector<std::vector<Polynomial>> targets;
  std::size_t shift = 0;
  for (const auto& f : factors) {
    for (const auto& coords : f.targets_) {
      std::vector<Polynomial> shifted;
      for (const auto& poly : coords) {
        Polynomial p;
        for (const auto& term : poly) {
          Term t{term.coefficient, std::vector<int>(vars, 0)};
          std::copy(term.exponents.begin(), term.exponents.end(), t.exponents.begin() + static_cast<long>(shift));
          p.push_back(std::move(t));
        }
        shifted.push_back(std::move(p));
      }
      targets.push_back(std::move(shifted));
    }
    shift += f.variable_count();
  }
  return MultiHomogeneousMap(std::move(source), std::move(targets));
}

MultiHomogeneousMap MultiHomogeneousMap::permute_targets(const std::vector<std::size_t>& permutation) const {
  if (permutation.size() != targets_.size()) throw DimensionError("permutation size differs from target count");
  std::vector<std::vector<Polynomial>> targets;
  for (std::size_t j : permutation) {
    if (j >= targets_.size()) throw DimensionError("permutation index out of range");
    targets.push_back(targets_[j]);
  }
  return MultiHomogeneousMap(source_, std::move(targets));
}

Signature MultiHomogeneousMap::target_signature() const {
  Signature s;
  for (const auto& coords : targets_) s.push_back(static_cast<int>(coords.size()) - 1);
  return s;
}

std::vector<std::size_t> MultiHomogeneousMap::support(std::size_t target) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < source_.size(); ++i)
    if (degrees_[i][target] > 0) out.push_back(i);
  return out;
}

RationalProjectivePoint MultiHomogeneousMap::evaluate_factor(std::size_t target, const MultiPoint& point) const {
  if (!point.matches(source_)) throw DimensionError("point " + point.to_string() + " does not match the source signature");
  std::vector<const Integer*> vars(variable_count());
  for (std::size_t i = 0; i < source_.size(); ++i)
    for (std::size_t v = offsets_[i]; v < offsets_[i + 1]; ++v) vars[v] = &point[i][v - offsets_[i]];

  std::vector<Integer> image;
  image.reserve(targets_[target].size());
  Integer monomial;
  Integer power;
  for (const auto& poly : targets_[target]) {
    Integer value = 0;
    for (const auto& term : poly) {
      monomial = term.coefficient;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        const int e = term.exponents[v];
        if (e == 0) continue;
        mpz_pow_ui(power.get_mpz_t(), vars[v]->get_mpz_t(), static_cast<unsigned long>(e));
        monomial *= power;
      }
      value += monomial;
    }
    image.push_back(std::move(value));
  }
  if (std::all_of(image.begin(), image.end(), [](const Integer& x) { return sgn(x) == 0; }))
    throw BasePointError("map undefined at " + point.to_string() + " as given: target factor " +
                         std::to_string(target) + " vanishes");
  return RationalProjectivePoint::normalize(std::move(image));
}

MultiPoint MultiHomogeneousMap::operator()(const MultiPoint& point) const {
  std::vector<RationalProjectivePoint> factors;
  factors.reserve(targets_.size());
  for (std::size_t j = 0; j < targets_.size(); ++j) factors.push_back(evaluate_factor(j, point));
  return MultiPoint(std::move(factors));
}

MultiPoint evaluate(const MultiHomogeneousMap& map, const MultiPoint& point) { return map(point); }

double weil_height(const RationalProjectivePoint& point) {
  const Integer* largest = &point[0];
  for (const auto& x : point.coords())
    if (mpz_cmpabs(x.get_mpz_t(), largest->get_mpz_t()) > 0) largest = &x;
  const mpz_srcptr z = largest->get_mpz_t();
  if (mpz_cmpabs_ui(z, 1) <= 0) return 0.0;
  if (mpz_sizeinbase(z, 2) <= 53) return std::log(std::fabs(mpz_get_d(z)));
  long exponent = 0;
  const double mantissa = std::fabs(mpz_get_d_2exp(&exponent, z));
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

double height_wrt(std::span<const double> coefficients, const MultiPoint& point) {
  if (coefficients.size() != point.size())
    throw DimensionError("divisor has " + std::to_string(coefficients.size()) + " coefficients but the point has " +
                         std::to_string(point.size()) + " factors");
  double h = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i)
    if (coefficients[i] != 0.0) h += coefficients[i] * weil_height(point[i]);
  return h;
}

double height_wrt(const DivisorClass& divisor, const MultiPoint& point) {
  const auto coeffs = divisor.to_doubles();
  return height_wrt(coeffs, point);
}

IntMatrix multidegree_matrix(const MultiHomogeneousMap& map) {
  const std::size_t k = map.source_signature().size();
  const std::size_t t = map.targets().size();
  IntMatrix out(k, t);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < t; ++j) out(i, j) = map.degree(i, j);
  return out;
}

PullbackMap to_pullback(const IntMatrix& matrix) {
  if (!matrix.is_square() || matrix.rows() == 0) throw DimensionError("pullback matrix must be square and nonempty");
  std::vector<std::vector<QuadraticNumber>> rows(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i)
    for (std::size_t j = 0; j < matrix.cols(); ++j) rows[i].emplace_back(matrix(i, j));
  return PullbackMap(std::move(rows));
}

PullbackMap multidegree_pullback(const MultiHomogeneousMap& map) {
  if (map.source_signature().size() != map.targets().size())
    throw DimensionError("pullback on Pic needs as many target factors as source blocks");
  return to_pullback(multidegree_matrix(map));
}

std::vector<RationalProjectivePoint> enumerate_projective(int n, long bound) {
  if (n < 0) throw DimensionError("negative projective dimension");
  if (bound < 1) throw DomainError("height bound must be at least 1");
  const std::size_t len = static_cast<std::size_t>(n) + 1;
  std::vector<long> x(len, -bound);
  std::vector<RationalProjectivePoint> out;
  for (;;) {
    auto lead = std::find_if(x.begin(), x.end(), [](long v) { return v != 0; });
    if (lead != x.end() && *lead > 0) {
      long g = 0;
      for (long v : x) g = std::gcd(g, v);
      if (g == 1) {
        std::vector<Integer> coords(x.begin(), x.end());
        out.push_back(RationalProjectivePoint::normalize(std::move(coords)));
      }
    }
    std::size_t pos = len;
    while (pos > 0 && x[pos - 1] == bound) x[--pos] = -bound;
    if (pos == 0) break;
    ++x[pos - 1];
  }
  return out;
}

void for_each_point(const Signature& signature, long bound, const std::function<void(const MultiPoint&)>& visit) {
  if (signature.empty()) throw DimensionError("empty signature");
  std::vector<std::vector<RationalProjectivePoint>> lists;
  for (int n : signature) lists.push_back(enumerate_projective(n, bound));
  std::vector<std::size_t> idx(lists.size(), 0);
  std::vector<RationalProjectivePoint> factors;
  for (const auto& l : lists) factors.push_back(l.front());
  for (;;) {
    visit(MultiPoint(factors));
    std::size_t pos = lists.size();
    while (pos > 0 && idx[pos - 1] + 1 == lists[pos - 1].size()) {
      --pos;
      idx[pos] = 0;
      factors[pos] = lists[pos].front();
    }
    if (pos == 0) break;
    --pos;
    factors[pos] = lists[pos][++idx[pos]];
  }
}

std::vector<MultiPoint> enumerate_points(const Signature& signature, long bound) {
  std::vector<MultiPoint> out;
  for_each_point(signature, bound, [&out](const MultiPoint& p) { out.push_back(p); });
  return out;
}

}  // namespace heightdyn
