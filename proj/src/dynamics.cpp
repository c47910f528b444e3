#include "heightdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace heightdyn {
namespace {

std::vector<double> resolve_weights(const MultiHomogeneousMap& map, std::span<const double> weights) {
  if (!map.is_endomorphism()) throw DimensionError("iteration needs an endomorphism");
  const std::size_t k = map.source_signature().size();
  if (weights.empty()) return std::vector<double>(k, 1.0);
  if (weights.size() != k)
    throw DimensionError("divisor has " + std::to_string(weights.size()) + " coefficients, expected " +
                         std::to_string(k));
  return {weights.begin(), weights.end()};
}

void require_ample(std::span<const double> weights) {
  for (double w : weights)
    if (!(w > 0.0)) throw DomainError("divisor must be ample (all coefficients positive)");
}

// Heights of every enumerated point and of its image, organized so that
// each target factor is evaluated once per combination of the blocks it
// actually depends on rather than once per point of the product.
class SampleTable {
 public:
  SampleTable(const MultiHomogeneousMap& map, std::vector<double> weights, long bound)
      : weights_(std::move(weights)) {
    const auto& sig = map.source_signature();
    const std::size_t k = sig.size();
    for (int n : sig) {
      lists_.push_back(enumerate_projective(n, bound));
      std::vector<double> h;
      for (const auto& p : lists_.back()) h.push_back(weil_height(p));
      heights_.push_back(std::move(h));
    }

    const std::size_t t = map.targets().size();
    strides_.assign(t, std::vector<std::size_t>(k, 0));
    tables_.resize(t);
    for (std::size_t j = 0; j < t; ++j) {
      const auto support = map.support(j);
      std::size_t size = 1;
      for (auto it = support.rbegin(); it != support.rend(); ++it) {
        strides_[j][*it] = size;
        size *= lists_[*it].size();
        if (size > kMaxTable) throw DomainError("sample too large to tabulate");
      }
      auto& table = tables_[j];
      table.resize(size);
      std::vector<std::size_t> idx(k, 0);
      for (std::size_t flat = 0; flat < size; ++flat) {
        std::size_t rest = flat;
        for (std::size_t i : support) {
          idx[i] = rest / strides_[j][i];
          rest %= strides_[j][i];
        }
        table[flat] = weights_[j] * weil_height(map.evaluate_factor(j, point(idx)));
      }
    }
    offsets_.assign(k + 1, std::vector<std::size_t>(t, 0));
    index_.assign(k, 0);
  }

  std::size_t factor_count() const { return lists_.size(); }

  MultiPoint point(const std::vector<std::size_t>& idx) const {
    std::vector<RationalProjectivePoint> factors;
    for (std::size_t i = 0; i < lists_.size(); ++i) factors.push_back(lists_[i][idx[i]]);
    return MultiPoint(std::move(factors));
  }

  /// visit(index, h_D(P), h_D(φP)) in lexicographic point order.
  template <class Visit>
  void for_each(Visit&& visit) {
    walk(0, 0.0, visit);
  }

 private:
  static constexpr std::size_t kMaxTable = 400'000'000;

  template <class Visit>
  void walk(std::size_t level, double h, Visit& visit) {
    const std::size_t t = tables_.size();
    if (level == lists_.size()) {
      double image = 0.0;
      for (std::size_t j = 0; j < t; ++j) image += tables_[j][offsets_[level][j]];
      visit(static_cast<const std::vector<std::size_t>&>(index_), h, image);
      return;
    }
    const auto& hs = heights_[level];
    for (std::size_t a = 0; a < hs.size(); ++a) {
      index_[level] = a;
      for (std::size_t j = 0; j < t; ++j) offsets_[level + 1][j] = offsets_[level][j] + a * strides_[j][level];
      walk(level + 1, h + weights_[level] * hs[a], visit);
    }
  }

  std::vector<double> weights_;
  std::vector<std::vector<RationalProjectivePoint>> lists_;
  std::vector<std::vector<double>> heights_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<std::size_t>> offsets_;
  std::vector<std::size_t> index_;
};

}  // namespace

OrbitRecord orbit(const MultiHomogeneousMap& map, const MultiPoint& start, std::size_t max_iter, double ceiling,
                  std::span<const double> weights) {
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  const auto w = resolve_weights(map, weights);
  OrbitRecord rec;
  rec.points.push_back(start);
  rec.heights.push_back(height_wrt(w, start));
  if (rec.heights.back() > ceiling) {
    rec.status = Escaped{0};
    return rec;
  }
  std::unordered_map<MultiPoint, std::size_t, MultiPointHash> seen{{start, 0}};
  for (std::size_t step = 1; step <= max_iter; ++step) {
    MultiPoint next = map(rec.points.back());
    const double h = height_wrt(w, next);
    auto hit = seen.find(next);
    rec.points.push_back(next);
    rec.heights.push_back(h);
    if (hit != seen.end()) {
      rec.status = Periodic{hit->second, step - hit->second};
      return rec;
    }
    if (h > ceiling) {
      rec.status = Escaped{step};
      return rec;
    }
    seen.emplace(std::move(next), step);
  }
  rec.status = Truncated{};
  return rec;
}

NorthcottReport verify_weak_northcott(const MultiHomogeneousMap& map, std::span<const double> divisor, double mu1,
                                      double mu2, double epsilon, long bound) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  auto w = resolve_weights(map, divisor);
  require_ample(w);
  SampleTable table(map, w, bound);

  NorthcottReport rep;
  rep.epsilon = epsilon;
  rep.mu1 = mu1;
  rep.mu2 = mu2;
  rep.height_bound = bound;
  rep.c1_emp = -std::numeric_limits<double>::infinity();
  rep.c2_emp = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> arg1, arg2;
  const double lo = mu1 - epsilon;
  const double hi = mu2 + epsilon;
  table.for_each([&](const std::vector<std::size_t>& idx, double h, double image) {
    const double c1 = lo * h - image;
    const double c2 = image - hi * h;
    if (c1 > rep.c1_emp) {
      rep.c1_emp = c1;
      arg1 = idx;
    }
    if (c2 > rep.c2_emp) {
      rep.c2_emp = c2;
      arg2 = idx;
    }
    const auto b = static_cast<std::size_t>(std::floor(h / rep.bucket_width));
    if (b >= rep.buckets.size()) {
      for (std::size_t n = rep.buckets.size(); n <= b; ++n)
        rep.buckets.push_back({static_cast<double>(n) * rep.bucket_width, static_cast<double>(n + 1) * rep.bucket_width,
                               0, -std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity()});
    }
    auto& bucket = rep.buckets[b];
    ++bucket.count;
    bucket.c1_max = std::max(bucket.c1_max, c1);
    bucket.c2_max = std::max(bucket.c2_max, c2);
    ++rep.sample_size;
  });
  if (rep.sample_size == 0) throw DomainError("empty sample");
  std::erase_if(rep.buckets, [](const NorthcottBucket& b) { return b.count == 0; });
  rep.c1_argmax = table.point(arg1);
  rep.c2_argmax = table.point(arg2);
  return rep;
}

double estimate_silverman_mu(const MultiHomogeneousMap& map, std::span<const double> divisor, long bound,
                             double h_min) {
  if (!(h_min > 0.0)) throw DomainError("h_min must be positive");
  auto w = resolve_weights(map, divisor);
  require_ample(w);
  SampleTable table(map, w, bound);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  table.for_each([&](const std::vector<std::size_t>&, double h, double image) {
    if (h < h_min) return;
    any = true;
    best = std::min(best, image / h);
  });
  if (!any) throw DomainError("empty sample: no enumerated point has height at least h_min");
  return best;
}

double preperiodic_height_bound(double mu1, double constant) {
  if (!(mu1 > 1.0)) throw DomainError("height bound needs mu1 > 1");
  if (!(constant >= 0.0)) throw DomainError("constant must be non-negative");
  const double eps = (mu1 - 1.0) / 2.0;
  return constant * (1.0 + eps) / eps;
}

double default_escape_ceiling(const MultiHomogeneousMap& map, long bound, double constant) {
  const auto k = static_cast<double>(map.source_signature().size());
  return 4.0 * k * std::log(static_cast<double>(std::max(bound, 2L))) + constant;
}

PreperiodicSearch find_preperiodic(const MultiHomogeneousMap& map, long bound, std::size_t max_iter, double ceiling) {
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  const auto w = resolve_weights(map, {});
  PreperiodicSearch out;
  std::unordered_set<MultiPoint, MultiPointHash> known;
  for_each_point(map.source_signature(), bound, [&](const MultiPoint& start) {
    ++out.examined;
    if (known.contains(start)) {
      out.preperiodic.push_back(start);
      return;
    }
    std::vector<MultiPoint> path{start};
    std::unordered_set<MultiPoint, MultiPointHash> seen{start};
    bool pre = false;
    bool decided = height_wrt(w, start) > ceiling;
    for (std::size_t step = 1; step <= max_iter && !decided; ++step) {
      MultiPoint next = map(path.back());
      if (seen.contains(next) || known.contains(next)) {
        pre = decided = true;
      } else if (height_wrt(w, next) > ceiling) {
        decided = true;
      } else {
        seen.insert(next);
        path.push_back(std::move(next));
      }
    }
    if (pre) {
      known.insert(path.begin(), path.end());
      out.preperiodic.push_back(start);
    } else if (!decided) {
      out.undetermined.push_back(start);
    }
  });
  return out;
}

}  // namespace heightdyn
