#include "qsvm/quant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "qsvm/error.hpp"

namespace qsvm {

const char* site_name(Site s) {
  switch (s) {
    case Site::Features: return "features";
    case Site::KernelOut: return "kernel.out";
    case Site::ErrorCache: return "error_cache";
    case Site::Alpha: return "alpha";
    case Site::Bias: return "bias";
    case Site::DecisionAcc: return "decision.acc";
  }
  fail(Errc::UnknownSite, "bad site enum");
}

Site site_from_name(const std::string& name) {
  for (Site s : kAllSites)
    if (name == site_name(s)) return s;
  fail(Errc::UnknownSite, "unknown site: " + name);
}

void SiteStats::record(double value) {
  if (count == 0) {
    min = max = value;
  } else {
    min = std::min(min, value);
    max = std::max(max, value);
  }
  absmax = std::max(std::abs(min), std::abs(max));
  ++count;
}

void StatsRegistry::record(Site site, double value) {
  if (!std::isfinite(value))
    fail(Errc::NonFiniteValue, std::string("non-finite value at site ") + site_name(site));
  std::lock_guard lock(mu_);
  if (finalized_) fail(Errc::FinalizedRegistry, "record into finalized registry");
  auto& slot = stats_[static_cast<std::size_t>(site)];
  if (!slot) slot.emplace();
  slot->record(value);
}

const SiteStats& StatsRegistry::at(Site site) const {
  const auto& slot = stats_[static_cast<std::size_t>(site)];
  if (!slot) fail(Errc::UnknownSite, std::string("no stats for site ") + site_name(site));
  return *slot;
}

std::vector<Site> StatsRegistry::sites() const {
  std::vector<Site> out;
  for (Site s : kAllSites)
    if (has(s)) out.push_back(s);
  return out;
}

void StatsRegistry::save(const std::string& path) const {
  nlohmann::ordered_json sites = nlohmann::ordered_json::object();
  for (Site s : kAllSites) {
    if (!has(s)) continue;
    const SiteStats& st = at(s);
    sites[site_name(s)] = {{"min", st.min},
                           {"max", st.max},
                           {"absmax", st.absmax},
                           {"count", st.count}};
  }
  nlohmann::ordered_json doc = {{"version", 1}, {"sites", sites}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::MissingFile, "cannot write stats file: " + path);
  out << doc.dump(2) << '\n';
}

StatsRegistry StatsRegistry::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingStats, "cannot open stats file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidStats, std::string("malformed stats file: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1)
      fail(Errc::InvalidStats, "unknown stats schema version");
    StatsRegistry reg;
    for (const auto& [name, v] : doc.at("sites").items()) {
      Site s = site_from_name(name);
      SiteStats st;
      st.min = v.at("min").get<double>();
      st.max = v.at("max").get<double>();
      st.absmax = v.at("absmax").get<double>();
      st.count = v.at("count").get<int64_t>();
      if (!(st.min <= st.max) || st.count <= 0 ||
          std::abs(st.absmax - std::max(std::abs(st.min), std::abs(st.max))) >
              1e-12 * std::max(1.0, st.absmax))
        fail(Errc::InvalidStats, "inconsistent stats for site " + name);
      reg.stats_[static_cast<std::size_t>(s)] = st;
    }
    reg.finalize();
    return reg;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidStats, std::string("malformed stats file: ") + e.what());
  }
}

const char* quant_method_name(QuantMethod m) {
  switch (m) {
    case QuantMethod::None: return "none";
    case QuantMethod::MaxMagnitude: return "max-magnitude";
    case QuantMethod::MinMax: return "min-max";
  }
  fail(Errc::InvalidArgument, "bad method enum");
}

QuantMethod quant_method_from_name(const std::string& name) {
  if (name == "none") return QuantMethod::None;
  if (name == "max-magnitude") return QuantMethod::MaxMagnitude;
  if (name == "min-max") return QuantMethod::MinMax;
  fail(Errc::InvalidArgument, "unknown quantization method: " + name);
}

namespace {

int integer_bits(double absmax) {
  if (absmax <= 1.0) return 0;  // also covers the all-zero site
  return static_cast<int>(std::ceil(std::log2(absmax)));
}

}  // namespace

int derive_max_magnitude(const SiteStats& stats, int total_bits) {
  if (total_bits < 2) fail(Errc::InvalidArgument, "total_bits must be >= 2");
  int frac = total_bits - integer_bits(stats.absmax) - 1;
  return std::max(frac, 0);
}

double quantize_mm(double x, int frac_bits, double absmax) {
  double scale = std::ldexp(1.0, frac_bits);
  double q = std::round(x * scale) / scale;  // half away from zero
  double limit = std::ldexp(1.0, integer_bits(absmax)) - 1.0 / scale;
  return std::clamp(q, -limit, limit);
}

std::vector<Range> build_ranges(double r_min, double r_max, int total_bits) {
  if (!(r_min < r_max)) fail(Errc::InvalidArgument, "build_ranges requires r_min < r_max");
  if (total_bits < 1 || total_bits > 24)
    fail(Errc::InvalidArgument, "build_ranges bit width out of range");
  int64_t n = int64_t{1} << total_bits;
  double width = (r_max - r_min) / static_cast<double>(n);
  std::vector<Range> ranges;
  ranges.reserve(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double lo = r_min + static_cast<double>(i) * width;
    double hi = i == n - 1 ? r_max : r_min + static_cast<double>(i + 1) * width;
    if (lo < 0.0 && 0.0 < hi) {
      ranges.push_back({lo, 0.0});
      ranges.push_back({0.0, hi});
    } else {
      ranges.push_back({lo, hi});
    }
  }
  return ranges;
}

double quantize_minmax(double x, const std::vector<Range>& ranges) {
  if (ranges.empty()) fail(Errc::InvalidArgument, "quantize_minmax with no ranges");
  if (x == 0.0) return 0.0;
  if (x < ranges.front().lo) return ranges.front().mid();
  // last range whose lo is <= x (half-open buckets); above the end saturates
  auto it = std::upper_bound(ranges.begin(), ranges.end(), x,
                             [](double v, const Range& r) { return v < r.lo; });
  return std::prev(it)->mid();
}

QuantScheme QuantScheme::identity() { return QuantScheme(); }

QuantScheme QuantScheme::from_stats(QuantMethod method, int total_bits,
                                    const StatsRegistry& stats) {
  QuantScheme s;
  s.method_ = method;
  s.total_bits_ = total_bits;
  if (s.is_identity()) return s;
  if (total_bits < 2) fail(Errc::InvalidArgument, "total_bits must be >= 2");
  for (Site site : stats.sites()) {
    const SiteStats& st = stats.at(site);
    SiteParams& p = s.sites_[static_cast<std::size_t>(site)];
    p.present = true;
    if (method == QuantMethod::MaxMagnitude) {
      p.frac_bits = derive_max_magnitude(st, total_bits);
      p.absmax = st.absmax;
      p.degenerate = false;  // absmax = 0 still yields a valid grid around 0
    } else {
      if (st.min == st.max) {
        p.degenerate = true;
        std::cerr << "qsvm: site " << site_name(site)
                  << " saw a constant in the stats pass; min-max quantizer is identity there\n";
      } else {
        p.r_min = st.min;
        p.r_max = st.max;
        p.buckets = int64_t{1} << total_bits;
        p.width = (p.r_max - p.r_min) / static_cast<double>(p.buckets);
      }
    }
  }
  return s;
}

double QuantScheme::apply(Site site, double x) const {
  if (is_identity()) return x;
  const SiteParams& p = sites_[static_cast<std::size_t>(site)];
  if (!p.present)
    fail(Errc::UnknownSite, std::string("site not configured in scheme: ") + site_name(site));
  if (p.degenerate) return x;
  if (method_ == QuantMethod::MaxMagnitude) return quantize_mm(x, p.frac_bits, p.absmax);
  // min-max, bucket arithmetic equivalent to build_ranges + quantize_minmax
  if (x == 0.0) return 0.0;
  int64_t idx = static_cast<int64_t>(std::floor((x - p.r_min) / p.width));
  idx = std::clamp(idx, int64_t{0}, p.buckets - 1);
  auto lo_of = [&](int64_t i) { return p.r_min + static_cast<double>(i) * p.width; };
  while (idx + 1 < p.buckets && x >= lo_of(idx + 1)) ++idx;
  while (idx > 0 && x < lo_of(idx)) --idx;
  double lo = lo_of(idx);
  double hi = idx == p.buckets - 1 ? p.r_max : lo_of(idx + 1);
  if (lo < 0.0 && 0.0 < hi) return x < 0.0 ? lo / 2.0 : hi / 2.0;
  return (lo + hi) / 2.0;
}

double QuantScheme::step(Site site) const {
  if (is_identity()) return 0.0;
  const SiteParams& p = sites_[static_cast<std::size_t>(site)];
  if (!p.present || p.degenerate) return 0.0;
  if (method_ == QuantMethod::MaxMagnitude) return std::ldexp(1.0, -p.frac_bits);
  return p.width;
}

double QuantScheme::max_step() const {
  double m = 0.0;
  for (Site s : kAllSites) m = std::max(m, step(s));
  return m;
}

}  // namespace qsvm
