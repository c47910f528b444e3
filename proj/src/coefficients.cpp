#include "heightdyn/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace heightdyn {

// ----------------------------------------------------------------- PullbackMap

PullbackMap::PullbackMap(std::vector<std::vector<QuadraticNumber>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DimensionError("pullback matrix must be nonempty");
  for (const auto& row : rows_)
    if (row.size() != rows_.size()) throw DimensionError("pullback matrix must be square");
}

PullbackMap PullbackMap::identity(std::size_t rank) { return scalar(rank, QuadraticNumber(1)); }

PullbackMap PullbackMap::scalar(std::size_t rank, const QuadraticNumber& q) {
  return diagonal(std::vector<QuadraticNumber>(rank, q));
}

PullbackMap PullbackMap::diagonal(const std::vector<QuadraticNumber>& entries) {
  std::vector<std::vector<QuadraticNumber>> rows(entries.size(), std::vector<QuadraticNumber>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) rows[i][i] = entries[i];
  return PullbackMap(std::move(rows));
}

PullbackMap PullbackMap::from_columns(const std::vector<DivisorClass>& images) {
  std::vector<std::vector<QuadraticNumber>> rows(images.size(), std::vector<QuadraticNumber>(images.size()));
  for (std::size_t j = 0; j < images.size(); ++j) {
    if (images[j].rank() != images.size()) throw DimensionError("pullback column has wrong rank");
    for (std::size_t i = 0; i < images.size(); ++i) rows[i][j] = images[j][i];
  }
  return PullbackMap(std::move(rows));
}

DivisorClass PullbackMap::column(std::size_t j) const {
  std::vector<QuadraticNumber> out;
  out.reserve(rank());
  for (const auto& row : rows_) out.push_back(row.at(j));
  return DivisorClass(std::move(out));
}

PullbackMap operator*(const PullbackMap& lhs, const PullbackMap& rhs) {
  if (lhs.rank() != rhs.rank()) throw DimensionError("pullback rank mismatch");
  const std::size_t n = lhs.rank();
  std::vector<std::vector<QuadraticNumber>> rows(n, std::vector<QuadraticNumber>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (lhs.rows_[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) rows[i][j] += lhs.rows_[i][k] * rhs.rows_[k][j];
    }
  return PullbackMap(std::move(rows));
}

PullbackMap composite_pullback(const PullbackMap& inner, const PullbackMap& outer) { return inner * outer; }

DivisorClass apply_pullback(const PullbackMap& map, const DivisorClass& divisor) {
  if (map.rank() != divisor.rank())
    throw DimensionError("pullback of rank " + std::to_string(map.rank()) + " applied to divisor of rank " +
                         std::to_string(divisor.rank()));
  std::vector<QuadraticNumber> out(map.rank());
  for (std::size_t i = 0; i < map.rank(); ++i)
    for (std::size_t j = 0; j < map.rank(); ++j) out[i] += map(i, j) * divisor[j];
  return DivisorClass(std::move(out));
}

// ----------------------------------------------------------- CoefficientResult

const char* to_string(Method method) { return method == Method::closed_form ? "closed_form" : "bisection"; }

double CoefficientResult::as_double() const {
  if (const auto* q = std::get_if<QuadraticNumber>(&value)) return q->to_double();
  return std::get<double>(value);
}

const QuadraticNumber& CoefficientResult::exact_value() const {
  if (const auto* q = std::get_if<QuadraticNumber>(&value)) return *q;
  throw NotRepresentableError("coefficient was computed by bisection and has no exact value");
}

std::string CoefficientResult::to_string() const {
  if (const auto* q = std::get_if<QuadraticNumber>(&value)) return q->to_string();
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", std::get<double>(value));
  return buffer;
}

// -------------------------------------------------------------- coefficients

namespace {

void require_ample(const PicardLattice& lattice, const DivisorClass& divisor, const char* who) {
  if (!lattice.is_ample(divisor)) throw DomainError(std::string(who) + " requires an ample divisor");
}

[[noreturn]] void not_dominant_for(const char* who) {
  throw DomainError(std::string(who) + ": admissible set is empty; map is not dominant for D");
}

}  // namespace

CoefficientResult mu1(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                      Strategy strategy) {
  require_ample(lattice, divisor, "mu1");
  const DivisorClass image = apply_pullback(map, divisor);
  if (strategy == Strategy::prefer_exact) {
    if (auto interval = try_cone_interval(lattice, image, -divisor)) {
      if (interval->empty) not_dominant_for("mu1");
      if (!interval->upper) throw std::logic_error("mu1: unbounded admissible set on a pointed cone");
      return CoefficientResult::closed_form(*interval->upper);
    }
  }
  ApproxInterval interval = bisect_cone_interval(lattice, image, -divisor, 1e-13L, 0.0L);
  if (interval.empty) not_dominant_for("mu1");
  if (std::isinf(interval.upper)) throw std::logic_error("mu1: unbounded admissible set on a pointed cone");
  return CoefficientResult::bisection(static_cast<double>(interval.upper));
}

CoefficientResult mu2(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                      Strategy strategy) {
  require_ample(lattice, divisor, "mu2");
  const DivisorClass image = apply_pullback(map, divisor);
  if (strategy == Strategy::prefer_exact) {
    if (auto interval = try_cone_interval(lattice, -image, divisor)) {
      if (interval->empty) not_dominant_for("mu2");
      if (!interval->lower) throw std::logic_error("mu2: unbounded admissible set on a pointed cone");
      return CoefficientResult::closed_form(*interval->lower);
    }
  }
  ApproxInterval interval = bisect_cone_interval(lattice, -image, divisor, 1e-13L);
  if (interval.empty) not_dominant_for("mu2");
  if (std::isinf(interval.lower)) throw std::logic_error("mu2: unbounded admissible set on a pointed cone");
  return CoefficientResult::bisection(static_cast<double>(interval.lower));
}

CoefficientResult seshadri_lower(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                                 Strategy strategy) {
  require_ample(lattice, divisor, "seshadri_lower");
  const DivisorClass image = apply_pullback(map, divisor);
  if (strategy == Strategy::prefer_exact) {
    if (auto interval = try_nef_interval(lattice, image, -divisor)) {
      if (interval->empty) not_dominant_for("seshadri_lower");
      if (!interval->upper) throw std::logic_error("seshadri_lower: unbounded nef section on a pointed cone");
      return CoefficientResult::closed_form(*interval->upper);
    }
  }
  // The closed section shares its supremum with the open one whenever the
  // latter is nonempty, so the ample bisection oracle applies.
  ApproxInterval interval = bisect_cone_interval(lattice, image, -divisor, 1e-13L, 0.0L);
  if (interval.empty) not_dominant_for("seshadri_lower");
  return CoefficientResult::bisection(static_cast<double>(interval.upper));
}

std::optional<QuadraticNumber> polarization_check(const PullbackMap& map, const DivisorClass& divisor) {
  if (divisor.is_zero()) return std::nullopt;
  const DivisorClass image = apply_pullback(map, divisor);
  std::size_t pivot = 0;
  while (divisor[pivot].is_zero()) ++pivot;
  QuadraticNumber q = image[pivot] / divisor[pivot];
  if (image == q * divisor) return q;
  return std::nullopt;
}

bool validate_dominant_pullback(const PullbackMap& map, const PicardLattice& lattice) {
  return validate_dominant_pullback(map, lattice, lattice.witness());
}

bool validate_dominant_pullback(const PullbackMap& map, const PicardLattice& lattice, const DivisorClass& witness) {
  if (!lattice.is_ample(witness)) throw DomainError("validate_dominant_pullback: witness is not ample");
  return lattice.is_ample(apply_pullback(map, witness));
}

// ------------------------------------------------------------------ global mu

namespace {

using Vec = std::vector<long double>;

class SliceSearch {
 public:
  SliceSearch(const PullbackMap& map, const PicardLattice& lattice) : lattice_(lattice) {
    const std::size_t n = map.rank();
    matrix_.assign(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) matrix_[i][j] = map(i, j).to_double();
  }

  // Floating closed-form μ₁; -inf outside the ample cone.
  long double evaluate(const Vec& v) const {
    constexpr long double minus_inf = -std::numeric_limits<long double>::infinity();
    if (!lattice_.is_ample_approx(v)) return minus_inf;
    const std::size_t n = v.size();
    Vec image(n, 0.0L);
    Vec negated(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) image[i] += matrix_[i][j] * v[j];
      negated[i] = -v[i];
    }
    ApproxInterval interval = approx_cone_interval(lattice_, image, negated);
    if (interval.empty) return minus_inf;
    return interval.upper;
  }

 private:
  const PicardLattice& lattice_;
  std::vector<Vec> matrix_;
};

struct Best {
  long double value = -std::numeric_limits<long double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
};

// Max over samples, ties broken by the smaller index so that the result does
// not depend on how the samples are partitioned.
Best best_sample(const SliceSearch& search, const std::vector<Vec>& samples, unsigned workers) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(samples.size())));
  std::vector<Best> partial(workers);
  auto run = [&](unsigned w) {
    const std::size_t begin = samples.size() * w / workers;
    const std::size_t end = samples.size() * (w + 1) / workers;
    Best& best = partial[w];
    for (std::size_t i = begin; i < end; ++i) {
      const long double value = search.evaluate(samples[i]);
      if (value > best.value) best = {value, i};
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  Best out;
  for (const auto& b : partial)
    if (b.value > out.value || (b.value == out.value && b.index < out.index)) out = b;
  return out;
}

double binomial(std::size_t n, std::size_t k) {
  double out = 1;
  for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

void compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& prefix,
                  const std::function<void(const std::vector<std::size_t>&)>& emit) {
  if (parts == 1) {
    prefix.push_back(total);
    emit(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t k = 1; k + parts - 1 <= total; ++k) {
    prefix.push_back(k);
    compositions(parts - 1, total - k, prefix, emit);
    prefix.pop_back();
  }
}

// Affine chart of the slice: v = origin + Σ yᵢ axisᵢ, with `inside` deciding
// admissible parameters.
struct Chart {
  Vec origin;
  std::vector<Vec> axes;
  std::vector<Vec> grid;  // parameter samples
  long double step = 0;   // initial refinement step in parameter units
  std::function<bool(const Vec&)> inside;

  Vec point(const Vec& y) const {
    Vec v = origin;
    for (std::size_t k = 0; k < axes.size(); ++k)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += y[k] * axes[k][i];
    return v;
  }
};

Chart simplex_chart(std::size_t rank, std::size_t samples) {
  Chart chart;
  chart.origin.assign(rank, 0.0L);
  // Coordinates y = (a_1, ..., a_r) directly; refinement moves mass between pairs.
  for (std::size_t i = 0; i < rank; ++i) {
    Vec axis(rank, 0.0L);
    axis[i] = 1;
    chart.axes.push_back(axis);
  }
  std::size_t m = rank;
  while (binomial(m, rank - 1) <= static_cast<double>(samples) && rank > 1) ++m;
  std::vector<std::size_t> prefix;
  compositions(rank, m, prefix, [&](const std::vector<std::size_t>& k) {
    Vec y(rank);
    for (std::size_t i = 0; i < rank; ++i) y[i] = static_cast<long double>(k[i]) / static_cast<long double>(m);
    chart.grid.push_back(std::move(y));
  });
  chart.step = 1.0L / static_cast<long double>(m);
  chart.inside = [](const Vec& y) { return std::all_of(y.begin(), y.end(), [](long double c) { return c > 0; }); };
  return chart;
}

Chart ellipsoid_chart(const PicardLattice& lattice, std::size_t samples) {
  const auto& cone = std::get<QuadraticCone>(lattice.cone());
  const std::size_t rank = lattice.rank();
  auto form = [&](const std::vector<Rational>& v, const std::vector<Rational>& w) {
    Rational out = 0;
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) out += cone.gram[i][j] * v[i] * w[j];
    return out;
  };

  // Centre u with G·u ∝ ℓ normalised to ℓ·u = 1; on ker ℓ the form is negative definite.
  std::vector<Rational> centre(rank);
  {
    RationalMatrix a = cone.gram;
    std::vector<Rational> b = cone.linear;
    for (std::size_t k = 0; k < rank; ++k) {
      std::size_t p = k;
      while (sgn(a[p][k]) == 0) ++p;
      std::swap(a[p], a[k]);
      std::swap(b[p], b[k]);
      for (std::size_t i = 0; i < rank; ++i) {
        if (i == k || sgn(a[i][k]) == 0) continue;
        Rational f = a[i][k] / a[k][k];
        for (std::size_t j = k; j < rank; ++j) a[i][j] -= f * a[k][j];
        b[i] -= f * b[k];
      }
    }
    for (std::size_t i = 0; i < rank; ++i) centre[i] = b[i] / a[i][i];
    Rational scale = 0;
    for (std::size_t i = 0; i < rank; ++i) scale += cone.linear[i] * centre[i];
    for (auto& c : centre) c /= scale;
  }
  const Rational centre_norm = form(centre, centre);

  std::size_t pivot = 0;
  while (sgn(cone.linear[pivot]) == 0) ++pivot;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t i = 0; i < rank; ++i) {
    if (i == pivot) continue;
    std::vector<Rational> w(rank, Rational(0));
    w[i] = 1;
    w[pivot] = -cone.linear[i] / cone.linear[pivot];
    for (const auto& prev : basis) {
      Rational f = form(w, prev) / form(prev, prev);
      for (std::size_t j = 0; j < rank; ++j) w[j] -= f * prev[j];
    }
    basis.push_back(std::move(w));
  }

  Chart chart;
  for (const auto& c : centre) chart.origin.push_back(c.get_d());
  for (const auto& w : basis) {
    const long double radius = std::sqrt(static_cast<long double>(Rational(centre_norm / -form(w, w)).get_d()));
    Vec axis;
    for (const auto& c : w) axis.push_back(radius * static_cast<long double>(c.get_d()));
    chart.axes.push_back(std::move(axis));
  }
  const std::size_t dim = chart.axes.size();
  chart.inside = [](const Vec& y) {
    long double r = 0;
    for (long double c : y) r += c * c;
    return r < 1;
  };
  if (dim == 0) {
    chart.grid.push_back({});
    return chart;
  }
  std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(samples), 1.0 / static_cast<double>(dim)))));
  std::vector<std::size_t> counter(dim, 0);
  while (true) {
    Vec y(dim);
    for (std::size_t k = 0; k < dim; ++k)
      y[k] = -1 + (2 * static_cast<long double>(counter[k]) + 1) / static_cast<long double>(m);
    if (chart.inside(y)) chart.grid.push_back(std::move(y));
    std::size_t k = 0;
    while (k < dim && ++counter[k] == m) counter[k++] = 0;
    if (k == dim) break;
  }
  chart.step = 2.0L / static_cast<long double>(m);
  return chart;
}

DivisorClass to_rational_divisor(const Vec& v) {
  // Dyadic rounding keeps coefficients small enough for the exact path.
  constexpr long double scale = 1099511627776.0L;  // 2^40
  std::vector<QuadraticNumber> coeffs;
  for (long double c : v) {
    Integer num;
    mpz_set_d(num.get_mpz_t(), static_cast<double>(std::nearbyint(c * scale)));
    Rational q(num);
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), 40);
    coeffs.emplace_back(std::move(q));
  }
  return DivisorClass(std::move(coeffs));
}

}  // namespace

GlobalMuResult global_mu(const PullbackMap& map, const PicardLattice& lattice, const GlobalMuConfig& config) {
  if (map.rank() != lattice.rank()) throw DimensionError("global_mu: rank mismatch");
  if (!validate_dominant_pullback(map, lattice)) throw DomainError("global_mu: pullback is not dominant");

  const SliceSearch search(map, lattice);
  Chart chart = lattice.is_orthant() ? simplex_chart(lattice.rank(), config.grid_samples)
                                     : ellipsoid_chart(lattice, config.grid_samples);

  std::vector<Vec> points;
  points.reserve(chart.grid.size());
  for (const auto& y : chart.grid) points.push_back(chart.point(y));
  Best best = best_sample(search, points, config.workers);
  GlobalMuResult result;
  result.evaluations = points.size();
  if (best.index >= chart.grid.size()) throw std::logic_error("global_mu: no ample sample on the slice");

  Vec y = chart.grid[best.index];
  long double value = best.value;
  long double step = chart.step;
  const std::size_t dim = y.size();
  for (int iteration = 0; iteration < config.refinement_steps; ++iteration) {
    Vec best_move;
    long double best_value = value;
    auto consider = [&](Vec candidate) {
      if (!chart.inside(candidate)) return;
      const long double v = search.evaluate(chart.point(candidate));
      ++result.evaluations;
      if (v > best_value) {
        best_value = v;
        best_move = std::move(candidate);
      }
    };
    for (std::size_t i = 0; i < dim; ++i) {
      if (lattice.is_orthant()) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (i == j) continue;
          Vec candidate = y;
          candidate[i] += step;
          candidate[j] -= step;
          consider(std::move(candidate));
        }
      } else {
        for (long double sense : {1.0L, -1.0L}) {
          Vec candidate = y;
          candidate[i] += sense * step;
          consider(std::move(candidate));
        }
      }
    }
    if (best_move.empty()) {
      step /= 2;
    } else {
      y = std::move(best_move);
      value = best_value;
    }
  }

  DivisorClass divisor = to_rational_divisor(chart.point(y));
  if (!lattice.is_ample(divisor)) {
    // Rounding pushed the point out of the cone; fall back to the grid winner.
    divisor = to_rational_divisor(points[best.index]);
    if (!lattice.is_ample(divisor)) divisor = lattice.witness();
  }
  result.best_value = mu1(map, divisor, lattice);
  result.value = result.best_value.as_double();
  result.best_divisor = std::move(divisor);
  return result;
}

}  // namespace heightdyn
