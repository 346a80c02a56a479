#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qsvm {

// Immutable view over one sorted sparse row (column indices strictly
// increasing, values nonzero).
struct SparseView {
  std::span<const int32_t> idx;
  std::span<const double> val;

  std::size_t nnz() const { return idx.size(); }
};

// Owned sparse vector, same layout contract as SparseView.
struct SparseVec {
  std::vector<int32_t> idx;
  std::vector<double> val;

  SparseView view() const { return {idx, val}; }
};

double sparse_dot(SparseView a, SparseView b);
double sparse_sq_norm(SparseView a);
// ||a - b||^2 via the expansion with exact cancellation guarded at 0.
double sparse_sq_dist(SparseView a, SparseView b);

// Row-major CSR matrix of TF-IDF weights.
class TfIdfMatrix {
 public:
  TfIdfMatrix() = default;
  explicit TfIdfMatrix(int cols) : cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return col_.size(); }

  SparseView row(int i) const {
    auto b = static_cast<std::size_t>(row_ptr_[i]);
    auto e = static_cast<std::size_t>(row_ptr_[i + 1]);
    return {std::span(col_).subspan(b, e - b), std::span(val_).subspan(b, e - b)};
  }

  // Appends one row; entries must be sorted by column, weights nonzero.
  void push_row(const std::vector<std::pair<int32_t, double>>& entries);

  // In-place transform of every stored weight.
  template <typename F>
  void map_values(F&& f) {
    for (auto& v : val_) v = f(v);
  }

  std::span<const double> values() const { return val_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int64_t> row_ptr_{0};
  std::vector<int32_t> col_;
  std::vector<double> val_;
};

}  // namespace qsvm
