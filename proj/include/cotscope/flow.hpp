#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cotscope/attribution.hpp"

namespace cotscope {

/// AAE along CoT progress. Positions are bin centers on a 0..100 scale.
struct FlowCurve {
  std::vector<double> step_positions;
  std::vector<double> aae_values;
  std::size_t bin_width = 1;  // nominal tokens per bin (floor of length / bins)
};

struct MifResult {
  double mif = 0.0;
  std::size_t n_bins = 0;
  bool degenerate = false;  // every value equal; mif reported as 0
  bool ties = false;        // fractional ranks were needed
};

/// Partitions the values into n_bins contiguous bins whose sizes differ by at
/// most one (bin b covers [floor(b L / n), floor((b+1) L / n))) and averages
/// each. Fewer values than bins degrades to one bin per value. n_bins < 2 throws.
FlowCurve bin_flow(std::span<const double> token_values, std::size_t n_bins);

/// Per-token AAE of the CoT rows against the answer columns, binned.
FlowCurve build_flow_curve(const AttributionMatrix& m, IndexRange cot_rows, IndexRange answer_cols, std::size_t n_bins);

/// 1-based ranks; tied values share the average of their positions.
/// `descending` gives rank 1 to the largest value.
std::vector<double> average_ranks(std::span<const double> values, bool descending);

/// Monotonicity of information flow. Without ties:
///   1 - 6 sum_i [(n + 1 - i) - R_desc(v_i)]^2 / (n (n^2 - 1)),
/// evaluated in integer arithmetic. With ties: Pearson correlation of the step
/// index with the fractional ranks. A constant sequence yields 0, flagged degenerate.
MifResult mif(std::span<const double> values);
MifResult mif(const FlowCurve& curve);

}  // namespace cotscope
