#include "heightdyn/int_matrix.hpp"

namespace heightdyn {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged integer matrix");
    for (long v : row) data_.emplace_back(v);
  }
}

IntMatrix::IntMatrix(const std::vector<std::vector<Integer>>& rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.front().size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged integer matrix");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

bool IntMatrix::is_diagonal() const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (r != c && sgn((*this)(r, c)) != 0) return false;
  return true;
}

std::vector<std::vector<Integer>> IntMatrix::to_rows() const {
  std::vector<std::vector<Integer>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
  return out;
}

std::string IntMatrix::to_string() const {
  std::string out = "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    out += r == 0 ? "[" : ", [";
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c > 0) out += ", ";
      out += (*this)(r, c).get_str();
    }
    out += "]";
  }
  return out + "]";
}

IntMatrix operator*(const IntMatrix& lhs, const IntMatrix& rhs) {
  if (lhs.cols_ != rhs.rows_) throw DimensionError("integer matrix shapes do not compose");
  IntMatrix out(lhs.rows_, rhs.cols_);
  for (std::size_t i = 0; i < lhs.rows_; ++i)
    for (std::size_t k = 0; k < lhs.cols_; ++k) {
      const Integer& a = lhs(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

IntMatrix IntMatrix::power(std::uint64_t exponent) const {
  if (!is_square()) throw DimensionError("matrix power needs a square matrix");
  IntMatrix result = identity(rows_);
  IntMatrix base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace heightdyn
