#include "qsvm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qsvm/error.hpp"
#include "qsvm/porter.hpp"

namespace fs = std::filesystem;

namespace qsvm {

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "r8-lines") return DatasetFormat::R8Lines;
  if (name == "webkb-dirs") return DatasetFormat::WebKbDirs;
  fail(Errc::FormatError, "unknown dataset format: " + name);
}

namespace {

std::vector<RawDocument> load_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, "cannot open dataset file: " + path);
  std::vector<RawDocument> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t ws = line.find_first_of(" \t");
    std::string label = line.substr(0, ws);
    std::string text;
    if (ws != std::string::npos) {
      std::size_t start = line.find_first_not_of(" \t", ws);
      if (start != std::string::npos) text = line.substr(start);
    }
    if (label.empty()) fail(Errc::FormatError, "line without label in " + path);
    docs.push_back({std::move(label), std::move(text)});
  }
  return docs;
}

std::vector<RawDocument> load_dirs(const std::string& root) {
  if (!fs::is_directory(root)) fail(Errc::MissingFile, "not a directory: " + root);
  // first-level directory name is the class label; sort paths for determinism
  std::vector<std::pair<std::string, fs::path>> files;
  std::vector<fs::path> classes;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) classes.push_back(e.path());
  std::sort(classes.begin(), classes.end());
  for (const auto& cls : classes) {
    std::vector<fs::path> paths;
    for (const auto& e : fs::recursive_directory_iterator(cls))
      if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (auto& p : paths) files.emplace_back(cls.filename().string(), p);
  }
  std::vector<RawDocument> docs;
  for (const auto& [label, p] : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    docs.push_back({label, body.str()});
  }
  return docs;
}

}  // namespace

std::vector<RawDocument> load_dataset(const std::string& path, DatasetFormat format) {
  std::vector<RawDocument> docs = format == DatasetFormat::R8Lines
                                      ? load_lines(path)
                                      : load_dirs(path);
  if (docs.empty()) fail(Errc::EmptyCorpus, "empty corpus: " + path);
  return docs;
}

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "her", "hers", "herself", "it", "its", "itself",
      "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are",
      "was", "were", "be", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
      "or", "because", "as", "until", "while", "of", "at", "by", "for",
      "with", "about", "against", "between", "into", "through", "during",
      "before", "after", "above", "below", "to", "from", "up", "down", "in",
      "out", "on", "off", "over", "under", "again", "further", "then",
      "once", "here", "there", "when", "where", "why", "how", "all", "any",
      "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s",
      "t", "can", "will", "just", "don", "should", "now", "d", "ll", "m",
      "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn",
      "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn",
      "shan", "shouldn", "wasn", "weren", "won", "wouldn"};
  return words;
}

std::vector<std::string> preprocess(const std::string& text) {
  const auto& stop = english_stopwords();
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.size() > 2 && !stop.contains(cur)) tokens.push_back(porter_stem(cur));
    cur.clear();
  };
  for (unsigned char ch : text) {
    if (std::isalpha(ch))
      cur.push_back(static_cast<char>(std::tolower(ch)));
    else
      flush();
  }
  flush();
  return tokens;
}

uint64_t Vocabulary::digest() const {
  // FNV-1a over the sorted (term, index, doc_freq) triples plus N.
  std::map<std::string, int32_t> sorted(term_index.begin(), term_index.end());
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(&doc_count, sizeof doc_count);
  for (const auto& [term, idx] : sorted) {
    mix(term.data(), term.size());
    mix(&idx, sizeof idx);
    int64_t nj = doc_freq[static_cast<std::size_t>(idx)];
    mix(&nj, sizeof nj);
  }
  return h;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_docs) {
  if (train_docs.empty()) fail(Errc::EmptyCorpus, "cannot build vocabulary from zero documents");
  Vocabulary v;
  v.doc_count = static_cast<int64_t>(train_docs.size());
  std::unordered_set<std::string> seen;
  for (const auto& doc : train_docs) {
    seen.clear();
    for (const auto& term : doc) {
      if (!seen.insert(term).second) continue;  // n_j is a document count
      auto [it, inserted] = v.term_index.try_emplace(term, v.size());
      if (inserted)
        v.doc_freq.push_back(1);
      else
        ++v.doc_freq[static_cast<std::size_t>(it->second)];
    }
  }
  return v;
}

TfIdfMatrix compute_tfidf(const std::vector<std::vector<std::string>>& docs,
                          const Vocabulary& vocab) {
  // idf frozen from the training vocabulary; a term present in every training
  // document gets idf 0 and is never stored
  std::vector<double> idf(static_cast<std::size_t>(vocab.size()));
  for (std::size_t j = 0; j < idf.size(); ++j)
    idf[j] = std::log(static_cast<double>(vocab.doc_count) /
                      static_cast<double>(vocab.doc_freq[j]));

  TfIdfMatrix mat(vocab.size());
  std::unordered_map<int32_t, int64_t> counts;
  std::vector<std::pair<int32_t, double>> entries;
  for (const auto& doc : docs) {
    counts.clear();
    for (const auto& term : doc) {
      auto it = vocab.term_index.find(term);
      if (it != vocab.term_index.end()) ++counts[it->second];
    }
    entries.clear();
    for (const auto& [col, tf] : counts) {
      double w = static_cast<double>(tf) * idf[static_cast<std::size_t>(col)];
      if (w > 0.0) entries.emplace_back(col, w);
    }
    std::sort(entries.begin(), entries.end());
    mat.push_row(entries);
  }
  return mat;
}

LabeledDataset featurize(const std::vector<RawDocument>& docs, const Vocabulary& vocab) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(docs.size());
  LabeledDataset out;
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    tokenized.push_back(preprocess(d.text));
    out.labels.push_back(d.label);
    if (seen.insert(d.label).second) out.class_set.push_back(d.label);
  }
  out.features = compute_tfidf(tokenized, vocab);
  return out;
}

std::vector<int8_t> binarize_labels(const LabeledDataset& dataset, const std::string& target) {
  if (std::find(dataset.class_set.begin(), dataset.class_set.end(), target) ==
      dataset.class_set.end())
    fail(Errc::UnknownClass, "unknown target class: " + target);
  std::vector<int8_t> y;
  y.reserve(dataset.labels.size());
  for (const auto& l : dataset.labels) y.push_back(l == target ? 1 : -1);
  return y;
}

}  // namespace qsvm
