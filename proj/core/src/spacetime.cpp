#include "sitrec/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sitrec::spacetime {

void Resolution::validate() const {
  if (!(lat_deg > 0.0) || !(lon_deg > 0.0) || time_s <= 0) {
    throw ConfigError("space-time bin resolutions must be positive");
  }
}

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Cell cell_of(const GeoTime& g, const Resolution& res) {
  return {static_cast<long long>(std::floor(g.latitude / res.lat_deg)),
          static_cast<long long>(std::floor(g.longitude / res.lon_deg)),
          floor_div(g.timestamp, res.time_s)};
}

SituationSummary aggregate(std::span<const int> assignments,
                           std::span<const std::optional<GeoTime>> meta,
                           const Resolution& res) {
  res.validate();
  if (!meta.empty() && meta.size() != assignments.size()) {
    throw ConfigError("metadata count does not match assignment count");
  }
  SituationSummary out;
  out.resolution = res;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (meta.empty() || !meta[i]) {
      ++out.missing;
      continue;
    }
    const auto& g = *meta[i];
    if (!(g.latitude >= -90.0 && g.latitude <= 90.0) ||
        !(g.longitude >= -180.0 && g.longitude <= 180.0)) {
      out.invalid.push_back(i);
      continue;
    }
    const int label = assignments[i];
    const auto cell = cell_of(g, res);
    ++out.counts[{cell, label}];
    ++out.time_marginal[label][cell.time_bin];
    ++out.space_marginal[label][cell.place()];
    ++out.total;
  }
  return out;
}

std::vector<std::pair<Place, long long>> SituationSummary::top_places(int label,
                                                                      std::size_t top) const {
  std::vector<std::pair<Place, long long>> out;
  auto it = space_marginal.find(label);
  if (it == space_marginal.end()) return out;
  out.assign(it->second.begin(), it->second.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > top) out.resize(top);
  return out;
}

std::pair<long long, std::vector<double>> SituationSummary::time_series(int label) const {
  auto it = time_marginal.find(label);
  if (it == time_marginal.end() || it->second.empty()) return {0, {}};
  const long long first = it->second.begin()->first;
  const long long last = it->second.rbegin()->first;
  std::vector<double> series(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const auto& [bin, count] : it->second) {
    series[static_cast<std::size_t>(bin - first)] = static_cast<double>(count);
  }
  return {first, std::move(series)};
}

std::vector<long long> SituationSummary::seasonal_profile(int label, long long period) const {
  if (period < 1) throw ConfigError("seasonal period must be >= 1");
  std::vector<long long> out(static_cast<std::size_t>(period), 0);
  auto it = time_marginal.find(label);
  if (it == time_marginal.end()) return out;
  for (const auto& [bin, count] : it->second) {
    long long slot = bin % period;
    if (slot < 0) slot += period;
    out[static_cast<std::size_t>(slot)] += count;
  }
  return out;
}

std::vector<double> trend(std::span<const double> series, std::size_t window) {
  if (window < 1) throw ConfigError("trend window must be >= 1");
  const auto n = series.size();
  std::vector<double> out(n, 0.0);
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace sitrec::spacetime
