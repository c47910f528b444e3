#include "heightdyn/product_classifier.hpp"

#include <algorithm>
#include <numeric>

#include "heightdyn/height_machine.hpp"

namespace heightdyn {
namespace {

using Kind = ClassificationError::Kind;

std::string entry_name(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")";
}

void require_shape(const IntMatrix& m, std::span<const int> dims) {
  if (!m.is_square() || m.rows() != dims.size())
    throw DimensionError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " but " +
                         std::to_string(dims.size()) + " factor dimensions were given");
  for (int n : dims)
    if (n < 0) throw DimensionError("negative factor dimension");
}

}  // namespace

RowAdmissibility admissible_row(std::span<const Integer> degrees, std::span<const int> dims, int target_dim) {
  if (degrees.size() != dims.size())
    throw DimensionError("degree row has " + std::to_string(degrees.size()) + " entries for " +
                         std::to_string(dims.size()) + " factors");
  for (const auto& d : degrees)
    if (sgn(d) < 0) throw DomainError("negative degree " + d.get_str());

  RowAdmissibility out;
  long support_size = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] > target_dim) out.forced_zero.push_back(i);
    if (sgn(degrees[i]) > 0) support_size += dims[i] + 1;
  }
  for (std::size_t i : out.forced_zero)
    if (sgn(degrees[i]) != 0) {
      out.reason = "factor " + std::to_string(i + 1) + " has dimension " + std::to_string(dims[i]) +
                   " > " + std::to_string(target_dim) + " but degree " + degrees[i].get_str();
      return out;
    }
  if (support_size > target_dim + 1) {
    out.reason = "support needs " + std::to_string(support_size) + " > " + std::to_string(target_dim + 1) +
                 " homogeneous coordinates";
    return out;
  }
  out.ok = true;
  return out;
}

bool check_block_triangular(const IntMatrix& matrix, std::span<const int> dims) {
  require_shape(matrix, dims);
  for (std::size_t u = 0; u < dims.size(); ++u)
    for (std::size_t v = 0; v < dims.size(); ++v)
      if (dims[u] > dims[v] && sgn(matrix(u, v)) != 0) return false;
  return true;
}

IntMatrix BlockStructure::sorted_matrix() const {
  IntMatrix m(sigma.size(), sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) m(sigma[i], i) = degrees[i];
  return m;
}

IntMatrix BlockStructure::matrix() const {
  IntMatrix m(sigma.size(), sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) m(order[sigma[i]], order[i]) = degrees[i];
  return m;
}

BlockStructure classify_dominant(const IntMatrix& matrix, std::span<const int> dims) {
  require_shape(matrix, dims);
  const std::size_t k = dims.size();

  for (std::size_t v = 0; v < k; ++v) {
    std::vector<Integer> column(k);
    for (std::size_t u = 0; u < k; ++u) column[u] = matrix(u, v);
    for (std::size_t u = 0; u < k; ++u)
      if (sgn(column[u]) < 0) throw ClassificationError(Kind::invalid_row, "negative degree at " + entry_name(u, v));
    auto adm = admissible_row(column, dims, dims[v]);
    if (!adm.ok)
      throw ClassificationError(Kind::invalid_row, "target factor " + std::to_string(v + 1) + ": " + adm.reason);
  }

  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (dims[u] != dims[v] && sgn(matrix(u, v)) != 0)
        throw ClassificationError(Kind::not_block_diagonal,
                                  "not block-diagonal: entry " + entry_name(u, v) +
                                      " couples factors of different dimension, impossible for dominant maps");

  std::vector<std::size_t> col_count(k, 0), row_count(k, 0), sigma_user(k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (sgn(matrix(u, v)) != 0) {
        ++row_count[u];
        ++col_count[v];
        sigma_user[v] = u;
      }
  for (std::size_t i = 0; i < k; ++i) {
    if (row_count[i] == 0)
      throw ClassificationError(Kind::not_dominant, "not dominant: row " + std::to_string(i + 1) + " is zero");
    if (col_count[i] == 0)
      throw ClassificationError(Kind::not_dominant, "not dominant: column " + std::to_string(i + 1) + " is zero");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (row_count[i] > 1)
      throw ClassificationError(Kind::not_dominant, "not dominant: row " + std::to_string(i + 1) + " has " +
                                                        std::to_string(row_count[i]) + " nonzero entries");
    if (col_count[i] > 1)
      throw ClassificationError(Kind::not_dominant, "not dominant: column " + std::to_string(i + 1) + " has " +
                                                        std::to_string(col_count[i]) + " nonzero entries");
  }

  BlockStructure out;
  out.order.resize(k);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) { return dims[a] < dims[b]; });
  std::vector<std::size_t> sorted_of(k);
  for (std::size_t s = 0; s < k; ++s) sorted_of[out.order[s]] = s;

  out.dims.resize(k);
  out.sigma.resize(k);
  out.degrees.resize(k);
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t v = out.order[s];
    out.dims[s] = dims[v];
    out.sigma[s] = sorted_of[sigma_user[v]];
    out.degrees[s] = matrix(sigma_user[v], v);
    if (out.blocks.empty() || out.dims[out.blocks.back().front()] != out.dims[s]) out.blocks.emplace_back();
    out.blocks.back().push_back(s);
  }
  return out;
}

std::uint64_t diagonalization_power(const BlockStructure& structure) {
  const std::size_t k = structure.sigma.size();
  std::vector<bool> visited(k, false);
  std::uint64_t n = 1;
  for (std::size_t start = 0; start < k; ++start) {
    if (visited[start]) continue;
    std::uint64_t length = 0;
    for (std::size_t i = start; !visited[i]; i = structure.sigma[i]) {
      if (structure.sigma[i] >= k) throw DomainError("sigma is not a permutation");
      visited[i] = true;
      ++length;
    }
    n = std::lcm(n, length);
  }
  return n;
}

PowerCoefficients power_coefficients(const BlockStructure& structure, const IntMatrix& matrix,
                                     const DivisorClass& divisor, const PicardLattice& lattice) {
  if (structure.matrix() != matrix) throw DomainError("block structure does not describe this matrix");
  PowerCoefficients out;
  out.power = diagonalization_power(structure);
  out.matrix = matrix.power(out.power);
  if (!out.matrix.is_diagonal())
    throw ClassificationError(Kind::internal, "M^" + std::to_string(out.power) + " is not diagonal");
  out.mu1 = out.matrix(0, 0);
  out.mu2 = out.matrix(0, 0);
  for (std::size_t i = 1; i < out.matrix.rows(); ++i) {
    out.mu1 = std::min(out.mu1, Integer(out.matrix(i, i)));
    out.mu2 = std::max(out.mu2, Integer(out.matrix(i, i)));
  }

  const PullbackMap pullback = to_pullback(out.matrix);
  const auto c1 = mu1(pullback, divisor, lattice);
  const auto c2 = mu2(pullback, divisor, lattice);
  if (!c1.exact || !c2.exact || c1.exact_value() != QuadraticNumber(out.mu1) ||
      c2.exact_value() != QuadraticNumber(out.mu2))
    throw ClassificationError(Kind::internal, "diagonal of M^N disagrees with the cone computation");
  return out;
}

}  // namespace heightdyn
