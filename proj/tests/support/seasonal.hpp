// A planted seasonal stream: label 0 peaks in months 2 and 3 (March, April
// with bin 0 at the epoch) at three places with distinct popularity, over a
// background of label 1 spread uniformly over space and time.
#pragma once

#include "sitrec/core_model.hpp"
#include "sitrec/spacetime.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace testing_support {

struct SeasonalStream {
  std::vector<int> labels;
  std::vector<std::optional<sitrec::GeoTime>> meta;
  std::array<sitrec::spacetime::Place, 3> top_places;  // by decreasing count
  std::array<long long, 2> peak_months{2, 3};
};

inline SeasonalStream seasonal_stream(std::uint64_t seed) {
  using sitrec::spacetime::kMonthSeconds;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_int_distribution<int> year(41, 44);  // 2011..2014
  std::uniform_int_distribution<int> month(0, 11);
  std::uniform_int_distribution<int> lat_cell(-60, 59);
  std::uniform_int_distribution<int> lon_cell(-170, 169);

  SeasonalStream s;
  s.top_places = {{{35, 139}, {34, 135}, {38, 140}}};
  auto stamp = [&](int y, int m) {
    return static_cast<long long>((12.0 * y + m + frac(rng)) * static_cast<double>(kMonthSeconds));
  };
  auto add = [&](int label, double lat, double lon, long long t) {
    s.labels.push_back(label);
    s.meta.push_back(sitrec::GeoTime{lat, lon, t});
  };
  const std::array<int, 3> counts{60, 40, 25};
  for (std::size_t p = 0; p < 3; ++p) {
    for (int i = 0; i < counts[p]; ++i) {
      add(0, s.top_places[p].lat_bin + frac(rng), s.top_places[p].lon_bin + frac(rng),
          stamp(year(rng), 2 + i % 2));
    }
  }
  // Off-season, scattered label-0 sightings.
  for (int i = 0; i < 30; ++i) {
    int m = month(rng);
    if (m == 2 || m == 3) m = 7;
    add(0, lat_cell(rng) + frac(rng), lon_cell(rng) + frac(rng), stamp(year(rng), m));
  }
  for (int i = 0; i < 300; ++i) {
    add(1, lat_cell(rng) + frac(rng), lon_cell(rng) + frac(rng), stamp(year(rng), month(rng)));
  }
  // Shuffle so the planted items are not contiguous.
  std::vector<std::size_t> order(s.labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  SeasonalStream out = s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.labels[i] = s.labels[order[i]];
    out.meta[i] = s.meta[order[i]];
  }
  return out;
}

}  // namespace testing_support
