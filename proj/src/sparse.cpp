#include "qsvm/sparse.hpp"

#include <algorithm>

#include "qsvm/error.hpp"

namespace qsvm {

double sparse_dot(SparseView a, SparseView b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() && j < b.idx.size()) {
    if (a.idx[i] == b.idx[j]) {
      acc += a.val[i] * b.val[j];
      ++i;
      ++j;
    } else if (a.idx[i] < b.idx[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return acc;
}

double sparse_sq_norm(SparseView a) {
  double acc = 0.0;
  for (double v : a.val) acc += v * v;
  return acc;
}

double sparse_sq_dist(SparseView a, SparseView b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() || j < b.idx.size()) {
    if (j == b.idx.size() || (i < a.idx.size() && a.idx[i] < b.idx[j])) {
      acc += a.val[i] * a.val[i];
      ++i;
    } else if (i == a.idx.size() || b.idx[j] < a.idx[i]) {
      acc += b.val[j] * b.val[j];
      ++j;
    } else {
      double d = a.val[i] - b.val[j];
      acc += d * d;
      ++i;
      ++j;
    }
  }
  return acc;
}

void TfIdfMatrix::push_row(const std::vector<std::pair<int32_t, double>>& entries) {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].first <= entries[k - 1].first)
      fail(Errc::InvalidArgument, "row entries must have strictly increasing columns");
    col_.push_back(entries[k].first);
    val_.push_back(entries[k].second);
  }
  ++rows_;
  row_ptr_.push_back(static_cast<int64_t>(col_.size()));
}

}  // namespace qsvm
