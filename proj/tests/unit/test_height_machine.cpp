#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "heightdyn/height_machine.hpp"
#include "heightdyn/registry.hpp"
#include "support.hpp"

using namespace heightdyn;

namespace {

using P = RationalProjectivePoint;

MultiPoint mp(std::initializer_list<std::initializer_list<long>> factors) {
  std::vector<P> out;
  for (auto f : factors) out.push_back(P::normalize(f));
  return MultiPoint(out);
}

// All canonical points of P^1 with both |coordinates| ≤ bound, by brute force.
std::set<std::pair<long, long>> brute_force_p1(long bound) {
  std::set<std::pair<long, long>> out;
  for (long a = -bound; a <= bound; ++a)
    for (long b = -bound; b <= bound; ++b) {
      if (a == 0 && b == 0) continue;
      long g = std::gcd(a, b);
      long x = a / g, y = b / g;
      if (x < 0 || (x == 0 && y < 0)) x = -x, y = -y;
      out.insert({x, y});
    }
  return out;
}

double max_functorial_gap(const MultiHomogeneousMap& f, const std::vector<double>& d, long bound) {
  const auto m = multidegree_pullback(f);
  std::vector<QuadraticNumber> dq;
  for (double x : d) dq.emplace_back(static_cast<long>(x));
  const auto pulled = apply_pullback(m, DivisorClass(dq)).to_doubles();
  double worst = 0;
  for_each_point(f.source_signature(), bound, [&](const MultiPoint& p) {
    worst = std::max(worst, std::fabs(height_wrt(pulled, p) - height_wrt(d, f(p))));
  });
  return worst;
}

}  // namespace

TEST_CASE("normalize examples") {
  CHECK(P::normalize({3, 6}).coords() == std::vector<Integer>{1, 2});
  CHECK(P::normalize({-2, 4}).coords() == std::vector<Integer>{1, -2});
  CHECK(P::normalize({0, -5}).coords() == std::vector<Integer>{0, 1});
  CHECK(P::normalize({0, 0, -6, 9}).coords() == std::vector<Integer>{0, 0, 2, -3});
  CHECK_THROWS_AS(P::normalize({0, 0}), DomainError);
  CHECK(P::normalize({-2, 4}).to_string() == "(1:-2)");
  CHECK(P::normalize({-2, 4}).dimension() == 1);
}

TEST_CASE("normalize is idempotent and scale invariant") {
  for (int k = 0; k < 300; ++k) {
    std::vector<Integer> raw;
    for (int i = 0; i < 3; ++i) raw.emplace_back(testing::uniform(-50, 50));
    if (std::all_of(raw.begin(), raw.end(), [](const Integer& x) { return x == 0; })) continue;
    const auto p = P::normalize(raw);
    CHECK(P::normalize(p.coords()) == p);
    std::vector<Integer> scaled;
    const long c = testing::uniform(1, 30) * (k % 2 ? -1 : 1);
    for (const auto& x : raw) scaled.push_back(x * c);
    CHECK(P::normalize(scaled) == p);
  }
}

TEST_CASE("weil_height examples") {
  CHECK(weil_height(P::normalize({1, 2})) == doctest::Approx(std::log(2.0)));
  CHECK(weil_height(P::normalize({0, 1})) == 0.0);
  CHECK(weil_height(P::normalize({5, 7})) == doctest::Approx(std::log(7.0)));
  CHECK(weil_height(P::normalize({-1, 1})) == 0.0);
  const P big = P::normalize({Integer("1"), Integer("-1000000000000000000000000000000000000000")});
  CHECK(weil_height(big) == doctest::Approx(39 * std::log(10.0)).epsilon(1e-14));
}

TEST_CASE("height_wrt examples") {
  const auto p = mp({{1, 2}, {1, 3}});
  const std::vector<double> d11{1, 1}, d23{2, 3}, d10{1, 0};
  CHECK(height_wrt(d11, p) == doctest::Approx(std::log(2.0) + std::log(3.0)));
  CHECK(height_wrt(d23, p) == doctest::Approx(2 * std::log(2.0) + 3 * std::log(3.0)));
  CHECK(height_wrt(d10, mp({{0, 1}, {7, 9}})) == 0.0);
  CHECK(height_wrt(DivisorClass{QuadraticNumber(0, 1, 3), 1}, p) ==
        doctest::Approx(std::sqrt(3.0) * std::log(2.0) + std::log(3.0)));
  const std::vector<double> wrong{1, 1, 1};
  CHECK_THROWS_AS(height_wrt(wrong, p), DimensionError);
}

TEST_CASE("evaluate examples") {
  const auto sq = MultiHomogeneousMap::power_map(1, 2);
  CHECK(evaluate(sq, mp({{2, 3}})) == mp({{4, 9}}));
  CHECK(evaluate(examples::swap_map(), mp({{1, 2}, {1, 3}})) == mp({{1, 9}, {1, 8}}));
  CHECK(evaluate(examples::sum_of_squares_map(), mp({{0, 1}})) == mp({{1, 0}}));
  CHECK_THROWS_AS(evaluate(sq, mp({{1, 2}, {1, 3}})), DimensionError);

  // (x² − y² : x² − y²) vanishes at (1:1).
  Polynomial diff{{1, {2, 0}}, {-1, {0, 2}}};
  const MultiHomogeneousMap bad({1}, {{diff, diff}});
  CHECK_THROWS_AS(evaluate(bad, mp({{1, 1}})), BasePointError);
  CHECK(evaluate(bad, mp({{1, 2}})) == mp({{1, 1}}));
}

TEST_CASE("map validation") {
  Polynomial mixed{{1, {2, 0}}, {1, {0, 1}}};
  Polynomial y{{1, {0, 1}}};
  CHECK_THROWS_AS(MultiHomogeneousMap({1}, {{mixed, y}}), DomainError);
  Polynomial zero{{0, {1, 0}}};
  CHECK_THROWS_AS(MultiHomogeneousMap({1}, {{zero, y}}), DomainError);
  Polynomial short_e{{1, {1}}};
  CHECK_THROWS_AS(MultiHomogeneousMap({1}, {{short_e, y}}), DimensionError);
  Polynomial negative{{1, {2, -1}}};
  CHECK_THROWS_AS(MultiHomogeneousMap({1}, {{negative, y}}), DomainError);
  // Coordinates of one target factor must share their degree.
  Polynomial y2{{1, {0, 2}}};
  CHECK_THROWS_AS(MultiHomogeneousMap({1}, {{y, y2}}), DomainError);
}

TEST_CASE("multidegree examples") {
  CHECK(multidegree_matrix(examples::swap_map()) == IntMatrix{{0, 3}, {2, 0}});
  CHECK(multidegree_pullback(examples::swap_map()) == PullbackMap({{0, 3}, {2, 0}}));
  CHECK(multidegree_matrix(MultiHomogeneousMap::power_map(1, 2)) == IntMatrix{{2}});
  CHECK(multidegree_pullback(examples::diagonal_product_map()) == PullbackMap::diagonal({2, 3}));
  CHECK(multidegree_pullback(examples::sum_of_squares_map()) == PullbackMap::scalar(1, 2));
  const auto swap = examples::swap_map();
  CHECK(apply_pullback(multidegree_pullback(swap), {1, 0}) == DivisorClass{0, 2});
  CHECK(apply_pullback(multidegree_pullback(swap), {0, 1}) == DivisorClass{3, 0});
}

TEST_CASE("product and permutation builders") {
  const auto f = MultiHomogeneousMap::product({MultiHomogeneousMap::power_map(1, 2), MultiHomogeneousMap::power_map(1, 3)});
  CHECK(f == examples::diagonal_product_map());
  CHECK(multidegree_pullback(f.permute_targets({1, 0})) == PullbackMap({{0, 2}, {3, 0}}));
  CHECK(MultiHomogeneousMap::identity({1, 2}).is_endomorphism());
  const auto id = MultiHomogeneousMap::identity({1, 2});
  const auto p = mp({{3, -4}, {1, 0, 7}});
  CHECK(id(p) == p);
}

TEST_CASE("enumeration examples") {
  const auto p1 = enumerate_points({1}, 1);
  CHECK(p1.size() == 4);
  CHECK(p1 == std::vector<MultiPoint>{mp({{0, 1}}), mp({{1, -1}}), mp({{1, 0}}), mp({{1, 1}})});
  CHECK(enumerate_points({1}, 2).size() == 8);
  CHECK(enumerate_points({1, 1}, 1).size() == 16);
  CHECK(enumerate_projective(2, 1).size() == 13);
  CHECK_THROWS_AS(enumerate_points({1}, 0), DomainError);
}

TEST_CASE("enumeration matches brute force") {
  for (long bound : {1L, 2L, 3L, 7L, 20L, 50L}) {
    const auto ref = brute_force_p1(bound);
    const auto got = enumerate_projective(1, bound);
    CHECK(got.size() == ref.size());
    std::set<std::pair<long, long>> seen;
    for (const auto& p : got) seen.insert({p[0].get_si(), p[1].get_si()});
    CHECK(seen == ref);
    CHECK(std::is_sorted(got.begin(), got.end()));
  }
  // Product enumeration is the Cartesian product, each point once.
  const auto prod = enumerate_points({1, 1}, 5);
  const auto single = enumerate_projective(1, 5);
  CHECK(prod.size() == single.size() * single.size());
  CHECK(std::set<MultiPoint>(prod.begin(), prod.end()).size() == prod.size());
  CHECK(std::is_sorted(prod.begin(), prod.end()));
}

TEST_CASE("coprime squaring doubles the height") {
  const auto sq = MultiHomogeneousMap::power_map(1, 2);
  for (const auto& p : enumerate_points({1}, 200)) CHECK(weil_height(sq(p)[0]) == 2 * weil_height(p[0]));
  const auto cube = MultiHomogeneousMap::power_map(2, 3);
  for (const auto& p : enumerate_points({2}, 6))
    CHECK(weil_height(cube(p)[0]) == doctest::Approx(3 * weil_height(p[0])).epsilon(1e-14));
}

TEST_CASE("evaluation is deterministic and canonical") {
  const auto f = examples::sum_of_squares_map();
  for (const auto& p : enumerate_points({1}, 30)) {
    const auto q = f(p);
    CHECK(q == f(p));
    CHECK(P::normalize(q[0].coords()) == q[0]);
    CHECK(q.matches(f.target_signature()));
  }
}

TEST_CASE("functorial gap stays bounded") {
  const auto f = examples::sum_of_squares_map();
  const double g50 = max_functorial_gap(f, {1}, 50);
  const double g100 = max_functorial_gap(f, {1}, 100);
  const double g200 = max_functorial_gap(f, {1}, 200);
  CHECK(g100 >= g50);
  CHECK(g200 <= 1.1 * g100);
  CHECK(g200 <= std::log(2.0) + 1e-12);

  for (const auto& g : {examples::diagonal_product_map(), examples::swap_map()}) {
    const double a = max_functorial_gap(g, {1, 1}, 10);
    const double b = max_functorial_gap(g, {1, 1}, 20);
    CHECK(b <= 1.1 * a + 1e-9);
    CHECK(b < 1e-9);
  }
}
