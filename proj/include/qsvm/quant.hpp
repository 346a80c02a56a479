#pragma once

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qsvm {

// Closed enumeration of the computation sites whose values are quantized.
enum class Site : int {
  Features = 0,    // TF-IDF weights, once at matrix load
  KernelOut = 1,   // each kernel evaluation result
  ErrorCache = 2,  // each E_i value produced
  Alpha = 3,       // each alpha written
  Bias = 4,        // each b written
  DecisionAcc = 5, // accumulated decision sum
};
inline constexpr int kSiteCount = 6;
inline constexpr std::array<Site, kSiteCount> kAllSites = {
    Site::Features, Site::KernelOut, Site::ErrorCache,
    Site::Alpha,    Site::Bias,      Site::DecisionAcc};

const char* site_name(Site s);
Site site_from_name(const std::string& name);

struct SiteStats {
  double min = 0.0;
  double max = 0.0;
  double absmax = 0.0;
  int64_t count = 0;

  void record(double value);
  bool operator==(const SiteStats&) const = default;
};

// Per-site min/max/absmax gathered during the pre-training statistics pass.
class StatsRegistry {
 public:
  StatsRegistry() = default;
  StatsRegistry(const StatsRegistry& o) : stats_(o.stats_), finalized_(o.finalized_) {}
  StatsRegistry& operator=(const StatsRegistry& o) {
    stats_ = o.stats_;
    finalized_ = o.finalized_;
    return *this;
  }

  void record(Site site, double value);
  void finalize() { finalized_ = true; }
  bool finalized() const { return finalized_; }

  bool has(Site site) const { return stats_[static_cast<std::size_t>(site)].has_value(); }
  const SiteStats& at(Site site) const;
  std::vector<Site> sites() const;

  void save(const std::string& path) const;
  static StatsRegistry load(const std::string& path);

  bool operator==(const StatsRegistry& other) const {
    return stats_ == other.stats_;
  }

 private:
  std::array<std::optional<SiteStats>, kSiteCount> stats_;
  bool finalized_ = false;
  mutable std::mutex mu_;
};

enum class QuantMethod { None, MaxMagnitude, MinMax };

const char* quant_method_name(QuantMethod m);
QuantMethod quant_method_from_name(const std::string& name);

// n_integer_bits = ceil(log2(absmax)), floored at 0; one bit reserved for
// sign; frac_bits floored at 0.
int derive_max_magnitude(const SiteStats& stats, int total_bits);

// Round-to-grid with half-away-from-zero rounding, saturating at the largest
// magnitude representable by the (integer, fractional) split.
double quantize_mm(double x, int frac_bits, double absmax);

struct Range {
  double lo;
  double hi;
  double mid() const { return (lo + hi) / 2.0; }
  bool operator==(const Range&) const = default;
};

// Uniform half-open buckets over [r_min, r_max); a bucket with 0 strictly
// inside is split into a negative and a positive bucket so quantization can
// never flip a sign.
std::vector<Range> build_ranges(double r_min, double r_max, int total_bits);

// 0 passes through exactly; out-of-range values saturate to the end buckets.
double quantize_minmax(double x, const std::vector<Range>& ranges);

// A configured quantizer: method + bit width + frozen per-site parameters.
class QuantScheme {
 public:
  QuantScheme() = default;  // identity

  static QuantScheme identity();
  static QuantScheme from_stats(QuantMethod method, int total_bits,
                                const StatsRegistry& stats);

  QuantMethod method() const { return method_; }
  int total_bits() const { return total_bits_; }
  bool is_identity() const {
    return method_ == QuantMethod::None || total_bits_ >= 32;
  }

  double apply(Site site, double x) const;

  // Grid step at a site (mm: 2^-frac_bits; min-max: bucket width); 0 in the
  // identity regime or for a degenerate site.
  double step(Site site) const;
  double max_step() const;

 private:
  struct SiteParams {
    bool present = false;
    bool degenerate = false;  // constant stats; acts as identity
    // max-magnitude
    int frac_bits = 0;
    double absmax = 0.0;
    // min-max (buckets are derived arithmetically, matching build_ranges)
    double r_min = 0.0;
    double r_max = 0.0;
    double width = 0.0;
    int64_t buckets = 0;
  };

  QuantMethod method_ = QuantMethod::None;
  int total_bits_ = 32;
  std::array<SiteParams, kSiteCount> sites_;
};

}  // namespace qsvm
