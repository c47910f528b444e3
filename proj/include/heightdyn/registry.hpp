#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/documents.hpp"
#include "heightdyn/height_machine.hpp"
#include "heightdyn/picard_lattice.hpp"

namespace heightdyn {

namespace examples {

/// 2 + √3
QuadraticNumber beta();

/// Rank-2 lattice with basis E+, E- whose ample cone is the open quadrant.
PicardLattice k3_lattice();
/// ι₁*E+ = βE-, ι₁*E- = β⁻¹E+.
PullbackMap k3_iota1();
/// ι₂*E+ = β⁻¹E-, ι₂*E- = βE+.
PullbackMap k3_iota2();
/// φ* = ι₁*∘ι₂* = diag(β⁻², β²).
PullbackMap k3_phi();

/// Rank-3 lattice with intersection form 2(J − I) and ample cone
/// {Σ_{i≠j} a_i a_j > 0, Σ a_i > 0}.
PicardLattice p1_cubed_lattice();
/// ι_k*E_k = −E_k + 2 Σ_{i≠k} E_i, the other basis classes fixed; k ∈ {1,2,3}.
PullbackMap p1_cubed_iota(int k);
/// φ₁₂* = ι₁*∘ι₂*, the pullback of ι₂∘ι₁.
PullbackMap p1_cubed_phi12();

/// ((x0²:x1²), (y0³:y1³)) on P¹×P¹.
MultiHomogeneousMap diagonal_product_map();
/// ((y0²:y1²), (x0³:x1³)) on P¹×P¹: φ*E1 = 2E2, φ*E2 = 3E1.
MultiHomogeneousMap swap_map();
/// (x²+y² : xy) on P¹.
MultiHomogeneousMap sum_of_squares_map();

}  // namespace examples

struct ExampleCase {
  std::string name;
  std::string description;
  PicardLattice lattice;
  PullbackMap pullback;
  DivisorClass divisor;
  QuadraticNumber expected_mu1;
  QuadraticNumber expected_mu2;
  std::optional<MultiHomogeneousMap> morphism;
};

std::vector<ExampleCase> example_cases();

struct ExampleOutcome {
  std::string name;
  std::optional<CoefficientResult> mu1;
  std::optional<CoefficientResult> mu2;
  bool passed = false;
  std::string error;
};

struct RegressionReport {
  std::vector<ExampleOutcome> outcomes;
  bool all_passed = false;
};

/// Recomputes every registered case and compares exactly; a morphism, when
/// present, must also reproduce the registered pullback.
RegressionReport run_example_registry();

Json to_json(const RegressionReport& report);

}  // namespace heightdyn
