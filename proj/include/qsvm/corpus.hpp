#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qsvm/sparse.hpp"

namespace qsvm {

struct RawDocument {
  std::string label;
  std::string text;
};

enum class DatasetFormat { R8Lines, WebKbDirs };

DatasetFormat parse_dataset_format(const std::string& name);

// r8-lines: one document per line, `<label><whitespace><text...>`.
// webkb-dirs: `<root>/<class>/<file>` with one document per file,
// lexicographic path order.
std::vector<RawDocument> load_dataset(const std::string& path, DatasetFormat format);

// The fixed English stopword list (also shipped as data/stopwords.txt).
const std::unordered_set<std::string>& english_stopwords();

// lowercase -> split on non-alphabetic -> drop stopwords -> drop tokens of
// length <= 2 -> Porter stem.
std::vector<std::string> preprocess(const std::string& text);

struct Vocabulary {
  std::unordered_map<std::string, int32_t> term_index;  // dense 0..V-1
  std::vector<int64_t> doc_freq;                        // n_j, by index
  int64_t doc_count = 0;                                // N

  int32_t size() const { return static_cast<int32_t>(doc_freq.size()); }
  // Stable content digest, used by tests to assert the vocabulary is frozen.
  uint64_t digest() const;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_docs);

// w_ij = tf_ij * ln(N / n_j); N and n_j come from the training vocabulary for
// both splits. Out-of-vocabulary terms and zero weights are not stored.
TfIdfMatrix compute_tfidf(const std::vector<std::vector<std::string>>& docs,
                          const Vocabulary& vocab);

struct LabeledDataset {
  TfIdfMatrix features;
  std::vector<std::string> labels;
  std::vector<std::string> class_set;  // ordered distinct class names
};

// Full featurization of a raw corpus against a given vocabulary. class_set is
// ordered by first occurrence.
LabeledDataset featurize(const std::vector<RawDocument>& docs, const Vocabulary& vocab);

std::vector<int8_t> binarize_labels(const LabeledDataset& dataset, const std::string& target);

}  // namespace qsvm
