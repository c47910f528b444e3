#include "heightdyn/registry.hpp"

namespace heightdyn {
namespace examples {

QuadraticNumber beta() { return QuadraticNumber(2, 1, 3); }

PicardLattice k3_lattice() {
  return PicardLattice::create({"E+", "E-"}, OrthantCone{}, 3, DivisorClass{1, 1});
}

PullbackMap k3_iota1() {
  const auto b = beta();
  return PullbackMap({{0, b.inverse()}, {b, 0}});
}

PullbackMap k3_iota2() {
  const auto b = beta();
  return PullbackMap({{0, b}, {b.inverse(), 0}});
}

PullbackMap k3_phi() { return composite_pullback(k3_iota1(), k3_iota2()); }

PicardLattice p1_cubed_lattice() {
  RationalMatrix gram{{0, 2, 2}, {2, 0, 2}, {2, 2, 0}};
  std::vector<Rational> linear{1, 1, 1};
  return PicardLattice::create({"E1", "E2", "E3"}, QuadraticCone{gram, linear}, 0, DivisorClass{1, 1, 1});
}

PullbackMap p1_cubed_iota(int k) {
  if (k < 1 || k > 3) throw DomainError("involution index must be 1, 2 or 3");
  const auto c = static_cast<std::size_t>(k - 1);
  std::vector<std::vector<QuadraticNumber>> rows(3, std::vector<QuadraticNumber>(3));
  for (std::size_t i = 0; i < 3; ++i) {
    rows[i][i] = 1;
    rows[i][c] = 2;
  }
  rows[c][c] = -1;
  return PullbackMap(std::move(rows));
}

PullbackMap p1_cubed_phi12() { return composite_pullback(p1_cubed_iota(1), p1_cubed_iota(2)); }

MultiHomogeneousMap diagonal_product_map() {
  return MultiHomogeneousMap::product({MultiHomogeneousMap::power_map(1, 2), MultiHomogeneousMap::power_map(1, 3)});
}

MultiHomogeneousMap swap_map() {
  return MultiHomogeneousMap::product({MultiHomogeneousMap::power_map(1, 3), MultiHomogeneousMap::power_map(1, 2)})
      .permute_targets({1, 0});
}

MultiHomogeneousMap sum_of_squares_map() {
  return MultiHomogeneousMap({1}, {{{{1, {2, 0}}, {1, {0, 2}}}, {{1, {1, 1}}}}});
}

}  // namespace examples

std::vector<ExampleCase> example_cases() {
  using namespace examples;
  const auto b = beta();
  const auto binv = b.inverse();
  std::vector<ExampleCase> out;
  out.push_back({"polarizable-q5", "φ* = 5·I on the rank-2 orthant lattice", PicardLattice::orthant(2),
                 PullbackMap::scalar(2, 5), DivisorClass{1, 2}, 5, 5, std::nullopt});
  out.push_back({"k3-iota1", "involution ι₁ of the K3 surface, D = E+ + E-", k3_lattice(), k3_iota1(),
                 DivisorClass{1, 1}, binv, b, std::nullopt});
  out.push_back({"k3-iota2", "involution ι₂ of the K3 surface, D = E+ + E-", k3_lattice(), k3_iota2(),
                 DivisorClass{1, 1}, binv, b, std::nullopt});
  out.push_back({"k3-phi", "φ* = ι₁*∘ι₂* on the K3 surface, D = E+ + E-", k3_lattice(), k3_phi(), DivisorClass{1, 1},
                 binv * binv, b * b, std::nullopt});
  out.push_back({"k3-phi-skew", "φ* = ι₁*∘ι₂* on the K3 surface, D = 3E+ + E-", k3_lattice(), k3_phi(),
                 DivisorClass{3, 1}, binv * binv, b * b, std::nullopt});
  out.push_back({"p1cubed-iota1", "involution ι₁ of the (2,2,2) hypersurface, D = E1 + E2 + E3",
                 p1_cubed_lattice(), p1_cubed_iota(1), DivisorClass{1, 1, 1}, Rational(1, 3), 3, std::nullopt});
  out.push_back({"p1cubed-phi12", "φ = ι₂∘ι₁ of the (2,2,2) hypersurface, D = E1 + E2 + E3", p1_cubed_lattice(),
                 p1_cubed_phi12(), DivisorClass{1, 1, 1}, QuadraticNumber(Rational(11, 3), Rational(-4, 3), 7),
                 QuadraticNumber(Rational(11, 3), Rational(4, 3), 7), std::nullopt});
  out.push_back({"product-diag23", "((x0²:x1²), (y0³:y1³)) on P¹×P¹, D = E1 + E2", PicardLattice::orthant(2),
                 PullbackMap::diagonal({2, 3}), DivisorClass{1, 1}, 2, 3, diagonal_product_map()});
  out.push_back({"product-swap", "((y0²:y1²), (x0³:x1³)) on P¹×P¹, D = E1 + E2", PicardLattice::orthant(2),
                 PullbackMap({{0, 3}, {2, 0}}), DivisorClass{1, 1}, 2, 3, swap_map()});
  out.push_back({"product-swap-square", "square of the swap map, D = E1 + E2", PicardLattice::orthant(2),
                 PullbackMap::diagonal({6, 6}), DivisorClass{1, 1}, 6, 6, std::nullopt});
  return out;
}

RegressionReport run_example_registry() {
  RegressionReport rep;
  rep.all_passed = true;
  for (const auto& c : example_cases()) {
    ExampleOutcome o;
    o.name = c.name;
    try {
      o.mu1 = mu1(c.pullback, c.divisor, c.lattice);
      o.mu2 = mu2(c.pullback, c.divisor, c.lattice);
      o.passed = o.mu1->exact && o.mu2->exact && o.mu1->exact_value() == c.expected_mu1 &&
                 o.mu2->exact_value() == c.expected_mu2;
      if (!o.passed)
        o.error = "expected (" + c.expected_mu1.to_string() + ", " + c.expected_mu2.to_string() + "), got (" +
                  o.mu1->to_string() + ", " + o.mu2->to_string() + ")";
      if (o.passed && c.morphism && multidegree_pullback(*c.morphism) != c.pullback) {
        o.passed = false;
        o.error = "morphism multidegree does not reproduce the registered pullback";
      }
    } catch (const Error& e) {
      o.passed = false;
      o.error = e.what();
    }
    rep.all_passed = rep.all_passed && o.passed;
    rep.outcomes.push_back(std::move(o));
  }
  return rep;
}

Json to_json(const RegressionReport& report) {
  Json cases = Json::array();
  for (const auto& o : report.outcomes) {
    Json j;
    j["name"] = o.name;
    j["mu1"] = o.mu1 ? to_json(*o.mu1) : Json(nullptr);
    j["mu2"] = o.mu2 ? to_json(*o.mu2) : Json(nullptr);
    j["passed"] = o.passed;
    if (!o.error.empty()) j["error"] = o.error;
    cases.push_back(std::move(j));
  }
  return Json{{"all_passed", report.all_passed}, {"cases", std::move(cases)}};
}

}  // namespace heightdyn
