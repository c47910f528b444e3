#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/int_matrix.hpp"

namespace heightdyn {

struct RowAdmissibility {
  bool ok = false;
  /// Indices i with n_i > m, whose degree must vanish.
  std::vector<std::size_t> forced_zero;
  std::string reason;
};

/// Checks the degrees d of a morphism ∏P^{n_i} → P^m: d_i = 0 whenever
/// n_i > m, and the support S = {i : d_i > 0} has Σ_{i∈S} (n_i + 1) ≤ m + 1.
RowAdmissibility admissible_row(std::span<const Integer> degrees, std::span<const int> dims, int target_dim);

/// No block of larger dimension feeds a target factor of smaller dimension:
/// M(u, v) = 0 whenever n_u > n_v, with (u, v) = (source block, target).
bool check_block_triangular(const IntMatrix& matrix, std::span<const int> dims);

/// φ*E_i = degrees[i] · E_{sigma[i]}, indexed in sorted-dimension order.
struct BlockStructure {
  std::vector<int> dims;
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> sigma;
  std::vector<Integer> degrees;
  /// order[s] is the user index of sorted index s.
  std::vector<std::size_t> order;

  /// Pullback matrix in sorted order: entry (sigma[i], i) = degrees[i].
  IntMatrix sorted_matrix() const;
  /// Same matrix in the user's factor order.
  IntMatrix matrix() const;
};

/// Decomposes the multidegree matrix of a dominant endomorphism of
/// ∏P^{n_i} into block-preserving permutation × positive diagonal.
/// Throws ClassificationError describing the first violated constraint.
BlockStructure classify_dominant(const IntMatrix& matrix, std::span<const int> dims);

/// Order of sigma: the least N with sigma^N = id.
std::uint64_t diagonalization_power(const BlockStructure& structure);

struct PowerCoefficients {
  std::uint64_t power = 1;
  IntMatrix matrix;
  Integer mu1;
  Integer mu2;
};

/// μ₁, μ₂ of φ^N from the diagonal of M^N, cross-checked against the
/// cone computation of the coefficients module.
PowerCoefficients power_coefficients(const BlockStructure& structure, const IntMatrix& matrix,
                                     const DivisorClass& divisor, const PicardLattice& lattice);

}  // namespace heightdyn
