#include "cotscope/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace cotscope {

FlowCurve bin_flow(std::span<const double> token_values, std::size_t n_bins) {
  if (n_bins < 2) throw std::invalid_argument("flow curve needs at least 2 bins");
  const std::size_t len = token_values.size();
  if (len == 0) throw std::invalid_argument("flow curve needs at least one value");
  const std::size_t bins = std::min(n_bins, len);

  FlowCurve c;
  c.bin_width = std::max<std::size_t>(1, len / bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * len / bins;
    const std::size_t hi = (b + 1) * len / bins;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += token_values[i];
    c.aae_values.push_back(sum / static_cast<double>(hi - lo));
    c.step_positions.push_back(100.0 * (static_cast<double>(lo + hi) / 2.0) / static_cast<double>(len));
  }
  return c;
}

FlowCurve build_flow_curve(const AttributionMatrix& m, IndexRange cot_rows, IndexRange answer_cols, std::size_t n_bins) {
  const auto values = token_aae(m, cot_rows, answer_cols);
  return bin_flow(values, n_bins);
}

std::vector<double> average_ranks(std::span<const double> values, bool descending) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

MifResult mif(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("mif needs at least 2 values");
  MifResult r;
  r.n_bins = n;

  const auto ranks = average_ranks(values, /*descending=*/true);
  for (double rk : ranks) {
    if (rk != std::floor(rk)) r.ties = true;
  }
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    r.degenerate = true;
    r.mif = 0.0;
    return r;
  }
  // Integer ranks can also arise from an odd-sized tie group.
  {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) r.ties = true;
  }

  if (!r.ties) {
    std::int64_t sum_d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = static_cast<std::int64_t>(n - i) - static_cast<std::int64_t>(ranks[i]);
      sum_d2 += d * d;
    }
    const auto nn = static_cast<std::int64_t>(n);
    r.mif = 1.0 - static_cast<double>(6 * sum_d2) / static_cast<double>(nn * (nn * nn - 1));
    return r;
  }

  // Pearson correlation between reversed step index (n + 1 - i) and descending
  // ranks, which equals Spearman's rho of step vs value.
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(n - i) - mean;
    const double y = ranks[i] - mean;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  r.mif = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return r;
}

MifResult mif(const FlowCurve& curve) { return mif(curve.aae_values); }

}  // namespace cotscope
