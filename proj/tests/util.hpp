#pragma once

#include <random>
#include <string>
#include <vector>

#include "qsvm/corpus.hpp"
#include "qsvm/sparse.hpp"

namespace qsvm::test {

inline SparseVec dense_to_sparse(const std::vector<double>& v) {
  SparseVec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      out.idx.push_back(static_cast<int32_t>(i));
      out.val.push_back(v[i]);
    }
  }
  return out;
}

inline TfIdfMatrix dense_matrix(const std::vector<std::vector<double>>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  TfIdfMatrix m(static_cast<int>(cols));
  for (const auto& r : rows) {
    std::vector<std::pair<int32_t, double>> entries;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] != 0.0) entries.emplace_back(static_cast<int32_t>(i), r[i]);
    m.push_row(entries);
  }
  return m;
}

// Small synthetic text corpus: each class has a distinctive word pool plus
// shared noise, enough signal for near-separable TF-IDF features.
inline std::vector<RawDocument> synthetic_corpus(int docs_per_class, uint64_t seed,
                                                 int n_classes = 3) {
  static const std::vector<std::vector<std::string>> pools = {
      {"market", "profit", "shares", "dividend", "earnings", "quarter"},
      {"wheat", "harvest", "grain", "farmers", "crop", "bushel"},
      {"crude", "barrel", "petroleum", "refinery", "pipeline", "drilling"},
      {"silicon", "processor", "software", "network", "compiler", "kernel"}};
  static const std::vector<std::string> noise = {"today", "report", "company",
                                                 "announced", "percent", "year"};
  std::mt19937_64 rng(seed);
  std::vector<RawDocument> docs;
  for (int c = 0; c < n_classes; ++c) {
    const auto& pool = pools[static_cast<std::size_t>(c) % pools.size()];
    for (int d = 0; d < docs_per_class; ++d) {
      std::string text;
      std::uniform_int_distribution<int> len(8, 14);
      std::uniform_int_distribution<std::size_t> pick_pool(0, pool.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_noise(0, noise.size() - 1);
      std::bernoulli_distribution from_pool(0.7);
      int n = len(rng);
      for (int w = 0; w < n; ++w) {
        text += from_pool(rng) ? pool[pick_pool(rng)] : noise[pick_noise(rng)];
        text += ' ';
      }
      docs.push_back({"class" + std::to_string(c), text});
    }
  }
  return docs;
}

inline LabeledDataset featurized_synthetic(int docs_per_class, uint64_t seed,
                                           int n_classes = 3) {
  auto docs = synthetic_corpus(docs_per_class, seed, n_classes);
  std::vector<std::vector<std::string>> tokens;
  for (const auto& d : docs) tokens.push_back(preprocess(d.text));
  Vocabulary vocab = build_vocabulary(tokens);
  return featurize(docs, vocab);
}

}  // namespace qsvm::test
