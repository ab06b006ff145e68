#pragma once

#include <span>
#include <vector>

namespace obfscore {

// Single quantile rule for the whole toolkit: triage cutoffs, error
// percentiles, and incident localization all go through these two functions.

/// Quantile by linear interpolation between order statistics at rank
/// (n-1)*p/100, zero-indexed. `sorted` must be ascending and nonempty;
/// 0 < p < 100. Throws EmptyInput on empty data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Convenience overload that copies and sorts.
double quantile(std::span<const double> values, double p);

/// Within-distribution percentile of a value: 100*(#below + 0.5*#equal)/n
/// (midpoint rank under ties). `sorted` ascending, nonempty.
double percentile_of_sorted(std::span<const double> sorted, double value);

}  // namespace obfscore
