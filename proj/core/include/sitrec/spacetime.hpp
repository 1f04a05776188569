// Space-time histograms of per-item situation labels.
#pragma once

#include "sitrec/core_model.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace sitrec::spacetime {

/// Average Gregorian month; twelve bins make one Julian year.
inline constexpr long long kMonthSeconds = 2'629'800;

struct Resolution {
  double lat_deg = 1.0;
  double lon_deg = 1.0;
  long long time_s = kMonthSeconds;

  void validate() const;
};

struct Place {
  long long lat_bin = 0;
  long long lon_bin = 0;
  auto operator<=>(const Place&) const = default;
};

struct Cell {
  long long lat_bin = 0;
  long long lon_bin = 0;
  long long time_bin = 0;
  auto operator<=>(const Cell&) const = default;

  Place place() const { return {lat_bin, lon_bin}; }
};

/// Floor binning; an instant exactly on a boundary belongs to the later bin.
Cell cell_of(const GeoTime& g, const Resolution& res);

struct SituationSummary {
  Resolution resolution;
  std::map<std::pair<Cell, int>, long long> counts;  // (cell, label) -> count
  std::map<int, std::map<long long, long long>> time_marginal;  // label -> bin -> count
  std::map<int, std::map<Place, long long>> space_marginal;     // label -> place -> count
  long long total = 0;
  std::size_t missing = 0;            // items without metadata
  std::vector<std::size_t> invalid;   // items with out-of-range coordinates

  /// The `top` places of `label` by count, ties broken by place order.
  std::vector<std::pair<Place, long long>> top_places(int label, std::size_t top) const;
  /// Dense per-bin counts of `label` from its first to last nonzero bin.
  std::pair<long long, std::vector<double>> time_series(int label) const;
  /// Counts of `label` folded by time_bin mod period (month-of-year for the
  /// default resolution, bin 0 starting at the epoch).
  std::vector<long long> seasonal_profile(int label, long long period = 12) const;
};

/// Exact histogram of labels over space-time cells. Items with no metadata
/// are counted in `missing`; invalid coordinates are recorded and skipped.
SituationSummary aggregate(std::span<const int> assignments,
                           std::span<const std::optional<GeoTime>> meta,
                           const Resolution& res = {});

/// Centered moving average; windows are truncated at the series ends.
std::vector<double> trend(std::span<const double> series, std::size_t window);

}  // namespace sitrec::spacetime
