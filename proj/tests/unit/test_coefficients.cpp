#include "doctest.h"

#include <cmath>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/registry.hpp"
#include "support.hpp"

using namespace heightdyn;
using testing::approx;
using testing::random_positive;

namespace {

const QuadraticNumber beta(2, 1, 3);

DivisorClass random_ample(const PicardLattice& lattice) {
  for (;;) {
    std::vector<QuadraticNumber> v;
    for (std::size_t i = 0; i < lattice.rank(); ++i) v.emplace_back(testing::random_rational(10, 5));
    DivisorClass d(v);
    if (lattice.is_ample(d)) return d;
  }
}

PullbackMap random_positive_matrix(std::size_t rank) {
  std::vector<std::vector<QuadraticNumber>> rows(rank);
  for (auto& row : rows)
    for (std::size_t j = 0; j < rank; ++j) row.emplace_back(testing::uniform(0, 4));
  for (std::size_t j = 0; j < rank; ++j) rows[j][j] += QuadraticNumber(1);
  return PullbackMap(rows);
}

double oracle_mu1(const PullbackMap& m, const DivisorClass& d, const PicardLattice& lattice) {
  const testing::ConeOracle oracle(lattice);
  const auto pd = approx(apply_pullback(m, d));
  const auto dv = approx(d);
  auto inside = [&](long double a) {
    std::vector<long double> v(pd.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pd[i] - a * dv[i];
    return oracle.ample(v);
  };
  // φ*D ample, so α = 0 is admissible; walk up until the class leaves the cone.
  return static_cast<double>(testing::oracle_boundary(inside, 0, 1, 1e-15L));
}

struct Registry {
  PicardLattice lattice;
  PullbackMap map;
};

std::vector<Registry> registry_maps() {
  std::vector<Registry> out;
  for (const auto& c : example_cases()) out.push_back({c.lattice, c.pullback});
  return out;
}

}  // namespace

TEST_CASE("apply_pullback examples") {
  CHECK(apply_pullback(examples::k3_iota1(), {1, 1}) == DivisorClass{beta.inverse(), beta});
  CHECK(apply_pullback(examples::p1_cubed_iota(1), {1, 1, 1}) == DivisorClass{-1, 3, 3});
  const DivisorClass d{QuadraticNumber(1, 1, 3), Rational(2, 7)};
  CHECK(apply_pullback(PullbackMap::identity(2), d) == d);
  CHECK_THROWS_AS(apply_pullback(PullbackMap::identity(3), d), DimensionError);
  CHECK_THROWS_AS(PullbackMap({{1, 2}, {3}}), DimensionError);
}

TEST_CASE("registry pullbacks in both orders") {
  // φ* = ι₁*·ι₂* acts as diag(β⁻², β²).
  CHECK(examples::k3_phi() ==
        PullbackMap::diagonal({QuadraticNumber(7, -4, 3), QuadraticNumber(7, 4, 3)}));
  CHECK(examples::k3_iota1() * examples::k3_iota2() == examples::k3_phi());
  CHECK(examples::k3_iota1() * examples::k3_iota1() == PullbackMap::identity(2));
  CHECK(examples::p1_cubed_iota(2) * examples::p1_cubed_iota(2) == PullbackMap::identity(3));
  CHECK(apply_pullback(examples::p1_cubed_phi12(), {1, 1, 1}) == DivisorClass{-3, 5, 9});
}

TEST_CASE("composition contract") {
  // Pullback of a composite equals the product taken in reversed order, checked on vectors.
  for (int k = 0; k < 100; ++k) {
    const auto a = random_positive_matrix(3), b = random_positive_matrix(3);
    const DivisorClass d{random_positive(), random_positive(), random_positive()};
    CHECK(apply_pullback(composite_pullback(a, b), d) == apply_pullback(a, apply_pullback(b, d)));
  }
}

TEST_CASE("mu1 and mu2 examples") {
  const auto k3 = examples::k3_lattice();
  for (const DivisorClass& d : {DivisorClass{1, 1}, DivisorClass{3, 1}, DivisorClass{Rational(1, 9), 40}}) {
    const auto a = mu1(examples::k3_phi(), d, k3);
    REQUIRE(a.exact);
    CHECK(a.method == Method::closed_form);
    CHECK(a.exact_value() == QuadraticNumber(7, -4, 3));
    CHECK(mu2(examples::k3_phi(), d, k3).exact_value() == QuadraticNumber(7, 4, 3));
  }

  const auto cubed = examples::p1_cubed_lattice();
  CHECK(mu1(examples::p1_cubed_iota(1), {1, 1, 1}, cubed).exact_value() == QuadraticNumber(Rational(1, 3)));
  CHECK(mu2(examples::p1_cubed_iota(1), {1, 1, 1}, cubed).exact_value() == QuadraticNumber(3));
  CHECK(mu1(examples::p1_cubed_phi12(), {1, 1, 1}, cubed).exact_value() ==
        QuadraticNumber(Rational(11, 3), Rational(-4, 3), 7));
  CHECK(mu2(examples::p1_cubed_phi12(), {1, 1, 1}, cubed).exact_value() ==
        QuadraticNumber(Rational(11, 3), Rational(4, 3), 7));

  const auto orth = PicardLattice::orthant(2);
  const auto q = PullbackMap::scalar(2, 5);
  CHECK(mu1(q, {2, 7}, orth).exact_value() == QuadraticNumber(5));
  CHECK(mu2(q, {2, 7}, orth).exact_value() == QuadraticNumber(5));
  const auto diag = PullbackMap::diagonal({2, 3});
  CHECK(mu1(diag, {1, 1}, orth).exact_value() == QuadraticNumber(2));
  CHECK(mu2(diag, {1, 1}, orth).exact_value() == QuadraticNumber(3));
}

TEST_CASE("mu errors") {
  const auto orth = PicardLattice::orthant(2);
  CHECK_THROWS_AS(mu1(PullbackMap::identity(2), {1, 0}, orth), DomainError);
  CHECK_THROWS_AS(mu2(PullbackMap::identity(2), {-1, 1}, orth), DomainError);
  // A zero row keeps φ*D on the boundary; only negative α are admissible.
  const PullbackMap degenerate({{1, 1}, {0, 0}});
  CHECK(mu1(degenerate, {1, 1}, orth).exact_value() == QuadraticNumber(0));
  const auto r = mu1(PullbackMap::identity(2), {1, 1}, orth, Strategy::bisection_only);
  CHECK_FALSE(r.exact);
  CHECK_THROWS_AS(r.exact_value(), NotRepresentableError);
}

TEST_CASE("seshadri_lower examples") {
  CHECK(seshadri_lower(examples::p1_cubed_iota(1), {1, 1, 1}, examples::p1_cubed_lattice()).exact_value() ==
        QuadraticNumber(Rational(1, 3)));
  CHECK(seshadri_lower(examples::k3_phi(), {1, 1}, examples::k3_lattice()).exact_value() ==
        QuadraticNumber(7, -4, 3));
  CHECK(seshadri_lower(PullbackMap::scalar(3, 4), {1, 2, 3}, PicardLattice::orthant(3)).exact_value() ==
        QuadraticNumber(4));
}

TEST_CASE("polarization_check examples") {
  CHECK(polarization_check(PullbackMap::diagonal({5, 5}), {1, 2}) == QuadraticNumber(5));
  CHECK_FALSE(polarization_check(examples::k3_phi(), {1, 1}));
  CHECK(polarization_check(examples::k3_phi(), {1, 0}) == QuadraticNumber(7, -4, 3));
  CHECK_FALSE(polarization_check(PullbackMap::identity(2), {0, 0}));
}

TEST_CASE("validate_dominant_pullback examples") {
  CHECK(validate_dominant_pullback(examples::k3_phi(), examples::k3_lattice()));
  CHECK_FALSE(validate_dominant_pullback(PullbackMap({{1, 2}, {0, 0}}), PicardLattice::orthant(2)));
  CHECK(validate_dominant_pullback(PullbackMap::identity(3), examples::p1_cubed_lattice()));
  CHECK(validate_dominant_pullback(examples::p1_cubed_phi12(), examples::p1_cubed_lattice()));
}

TEST_CASE("mu1 <= mu2 and scale invariance") {
  for (const auto& r : registry_maps()) {
    for (int k = 0; k < 100; ++k) {
      const auto d = random_ample(r.lattice);
      const auto a = mu1(r.map, d, r.lattice), b = mu2(r.map, d, r.lattice);
      REQUIRE(a.exact);
      REQUIRE(b.exact);
      CHECK(a.exact_value() <= b.exact_value());
      const QuadraticNumber c(random_positive(30, 11));
      CHECK(mu1(r.map, c * d, r.lattice).exact_value() == a.exact_value());
      CHECK(mu2(r.map, c * d, r.lattice).exact_value() == b.exact_value());
      CHECK(seshadri_lower(r.map, d, r.lattice).exact_value() == a.exact_value());
    }
  }
}

TEST_CASE("mu1 agrees with an independent boundary search") {
  for (const auto& r : registry_maps()) {
    for (int k = 0; k < 100; ++k) {
      const auto d = random_ample(r.lattice);
      const double ref = oracle_mu1(r.map, d, r.lattice);
      CHECK(mu1(r.map, d, r.lattice).as_double() == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("closed form agrees with bisection") {
  for (const auto& c : example_cases()) {
    const auto a = mu1(c.pullback, c.divisor, c.lattice);
    const auto b = mu1(c.pullback, c.divisor, c.lattice, Strategy::bisection_only);
    CHECK(std::fabs(a.as_double() - b.as_double()) < 1e-9);
    const auto x = mu2(c.pullback, c.divisor, c.lattice);
    const auto y = mu2(c.pullback, c.divisor, c.lattice, Strategy::bisection_only);
    CHECK(std::fabs(x.as_double() - y.as_double()) < 1e-9);
  }
}

TEST_CASE("polarizable classes have equal coefficients") {
  const auto orth = PicardLattice::orthant(3);
  for (int k = 0; k < 100; ++k) {
    const QuadraticNumber q(random_positive(40, 7));
    const DivisorClass d{random_positive(), random_positive(), random_positive()};
    const auto m = PullbackMap::scalar(3, q);
    REQUIRE(polarization_check(m, d) == q);
    CHECK(mu1(m, d, orth).exact_value() == q);
    CHECK(mu2(m, d, orth).exact_value() == q);
  }
  // An eigenclass on the boundary is still detected.
  const DivisorClass e{1, 0};
  const auto q = polarization_check(examples::k3_phi(), e);
  REQUIRE(q);
  CHECK(apply_pullback(examples::k3_phi(), e) == *q * e);
}

TEST_CASE("dominance does not depend on the witness") {
  std::vector<Registry> maps = registry_maps();
  maps.push_back({PicardLattice::orthant(2), PullbackMap({{1, 3}, {0, 0}})});
  maps.push_back({PicardLattice::orthant(3), PullbackMap({{1, 0, 1}, {0, 0, 0}, {1, 1, 0}})});
  for (const auto& r : maps) {
    const bool base = validate_dominant_pullback(r.map, r.lattice);
    for (int k = 0; k < 20; ++k) CHECK(validate_dominant_pullback(r.map, r.lattice, random_ample(r.lattice)) == base);
  }
}

TEST_CASE("supermultiplicativity") {
  const auto k3 = examples::k3_lattice();
  const auto composite = composite_pullback(examples::k3_iota1(), examples::k3_iota2());
  CHECK(mu1(composite, {1, 1}, k3).exact_value() ==
        mu1(examples::k3_iota1(), {1, 1}, k3).exact_value() * mu1(examples::k3_iota2(), {1, 1}, k3).exact_value());

  const auto orth = PicardLattice::orthant(3);
  for (int k = 0; k < 100; ++k) {
    const auto phi = random_positive_matrix(3), psi = random_positive_matrix(3);
    const DivisorClass d{random_positive(), random_positive(), random_positive()};
    const auto lhs = mu1(composite_pullback(psi, phi), d, orth).exact_value();
    const auto rhs = mu1(phi, d, orth).exact_value() * mu1(psi, d, orth).exact_value();
    CHECK(lhs >= rhs);
  }
}

TEST_CASE("global_mu") {
  const auto orth = PicardLattice::orthant(2);
  const auto swap = global_mu(PullbackMap({{0, 3}, {2, 0}}), orth);
  CHECK(std::fabs(swap.value - std::sqrt(6.0)) < 1e-3);
  CHECK(swap.certified_lower_bound);
  CHECK(swap.value <= std::sqrt(6.0) + 1e-12);
  CHECK(mu1(PullbackMap({{0, 3}, {2, 0}}), swap.best_divisor, orth).as_double() == doctest::Approx(swap.value));

  // μ₁ = min of the ratios never exceeds the smaller diagonal entry.
  const auto diag = global_mu(PullbackMap::diagonal({2, 3}), orth);
  CHECK(diag.value == doctest::Approx(2.0).epsilon(1e-12));

  const auto scalar = global_mu(PullbackMap::scalar(3, 4), examples::p1_cubed_lattice());
  CHECK(scalar.value == doctest::Approx(4.0).epsilon(1e-12));

  const auto k3 = global_mu(examples::k3_phi(), examples::k3_lattice());
  CHECK(k3.value == doctest::Approx(7 - 4 * std::sqrt(3.0)).epsilon(1e-9));

  CHECK_THROWS_AS(global_mu(PullbackMap({{1, 1}, {0, 0}}), orth), DomainError);
}

TEST_CASE("global_mu is independent of the worker count") {
  GlobalMuConfig one, many;
  one.grid_samples = many.grid_samples = 2000;
  many.workers = 4;
  const auto m = examples::p1_cubed_phi12();
  const auto a = global_mu(m, examples::p1_cubed_lattice(), one);
  const auto b = global_mu(m, examples::p1_cubed_lattice(), many);
  CHECK(a.value == b.value);
  CHECK(a.best_divisor == b.best_divisor);
}

TEST_CASE("a zero column alone does not block dominance") {
  // φ*E2 = 0 but φ*(E1 + E2) = E1 + 2E2 is still ample.
  const PullbackMap m({{1, 0}, {2, 0}});
  CHECK(validate_dominant_pullback(m, PicardLattice::orthant(2)));
  CHECK_FALSE(PicardLattice::orthant(2).is_ample(m.column(1)));
}
