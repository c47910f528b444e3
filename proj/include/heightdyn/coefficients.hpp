#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "heightdyn/picard_lattice.hpp"

namespace heightdyn {

/// Matrix of φ* on Pic ⊗ R. Column j lists the coefficients of φ*E_j in
/// the basis {E_i}, so φ*(Σ v_j E_j) is the matrix-vector product M·v and
/// the pullback of φ∘ψ is M_ψ · M_φ.
class PullbackMap {
 public:
  PullbackMap() = default;
  /// Row-major entries; must be square.
  explicit PullbackMap(std::vector<std::vector<QuadraticNumber>> rows);

  static PullbackMap identity(std::size_t rank);
  static PullbackMap scalar(std::size_t rank, const QuadraticNumber& q);
  static PullbackMap diagonal(const std::vector<QuadraticNumber>& entries);
  /// Builds the matrix from the images φ*E_1, ..., φ*E_r.
  static PullbackMap from_columns(const std::vector<DivisorClass>& images);

  std::size_t rank() const noexcept { return rows_.size(); }
  const QuadraticNumber& operator()(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  const std::vector<std::vector<QuadraticNumber>>& rows() const noexcept { return rows_; }
  /// φ*E_j
  DivisorClass column(std::size_t j) const;

  friend PullbackMap operator*(const PullbackMap& lhs, const PullbackMap& rhs);
  friend bool operator==(const PullbackMap&, const PullbackMap&) = default;

 private:
  std::vector<std::vector<QuadraticNumber>> rows_;
};

/// Pullback of outer∘inner, i.e. inner* ∘ outer*.
PullbackMap composite_pullback(const PullbackMap& inner, const PullbackMap& outer);

DivisorClass apply_pullback(const PullbackMap& map, const DivisorClass& divisor);

enum class Method { closed_form, bisection };
const char* to_string(Method method);

enum class Strategy { prefer_exact, bisection_only };

struct CoefficientResult {
  std::variant<QuadraticNumber, double> value;
  bool exact = false;
  Method method = Method::bisection;

  static CoefficientResult closed_form(QuadraticNumber v) { return {std::move(v), true, Method::closed_form}; }
  static CoefficientResult bisection(double v) { return {v, false, Method::bisection}; }

  double as_double() const;
  /// Throws NotRepresentableError for bisection results.
  const QuadraticNumber& exact_value() const;
  std::string to_string() const;
};

/// Height expansion coefficient sup{α : φ*D − αD ample}.
CoefficientResult mu1(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                      Strategy strategy = Strategy::prefer_exact);
/// Height contraction coefficient inf{α : αD − φ*D ample}.
CoefficientResult mu2(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                      Strategy strategy = Strategy::prefer_exact);
/// sup{α : φ*D − αD nef}, the comparison constant against Seshadri-type
/// invariants. Computed on the closed cone, independently of mu1.
CoefficientResult seshadri_lower(const PullbackMap& map, const DivisorClass& divisor, const PicardLattice& lattice,
                                 Strategy strategy = Strategy::prefer_exact);

struct GlobalMuConfig {
  std::size_t grid_samples = 10000;
  int refinement_steps = 20;
  unsigned workers = 1;
};

struct GlobalMuResult {
  /// μ₁ at best_divisor; a certified lower bound for sup over ample D.
  double value = 0;
  CoefficientResult best_value;
  DivisorClass best_divisor;
  std::size_t evaluations = 0;
  bool certified_lower_bound = true;
  bool certified_upper_bound = false;
};

/// Searches sup over ample D of μ₁(φ, D) on a compact slice of the cone:
/// the simplex Σ aᵢ = 1 for orthant cones, the ellipsoid ℓ·v = 1 for
/// quadratic ones. Grid sampling followed by compass refinement.
GlobalMuResult global_mu(const PullbackMap& map, const PicardLattice& lattice, const GlobalMuConfig& config = {});

/// q with φ*D = q·D exactly, if any.
std::optional<QuadraticNumber> polarization_check(const PullbackMap& map, const DivisorClass& divisor);

/// φ* of the lattice's witness class is ample.
bool validate_dominant_pullback(const PullbackMap& map, const PicardLattice& lattice);
bool validate_dominant_pullback(const PullbackMap& map, const PicardLattice& lattice, const DivisorClass& witness);

}  // namespace heightdyn
