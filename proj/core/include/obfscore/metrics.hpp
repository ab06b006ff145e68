#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace obfscore {

/// Headline regression metrics between a target score and a prediction.
struct EvalReport {
    double mape = 0.0;  // percent, over nonzero targets
    double mae = 0.0;
    double mse = 0.0;
    double pcc = 0.0;
    size_t n = 0;
    size_t mape_excluded = 0;  // targets equal to zero, skipped by mape
};

/// Mean absolute percentage error (in %), excluding y_i = 0 entries.
/// The number of excluded entries is written to *excluded when non-null.
double mape(std::span<const double> y, std::span<const double> y_hat, size_t* excluded = nullptr);
double mae(std::span<const double> y, std::span<const double> y_hat);
double mse(std::span<const double> y, std::span<const double> y_hat);

/// Pearson correlation. Requires n >= 2 and nonzero variance on both sides;
/// throws CorrelationUndefined otherwise.
double pcc(std::span<const double> y, std::span<const double> y_hat);

EvalReport evaluate(std::span<const double> y, std::span<const double> y_hat);

struct ErrorBin {
    double lo = 0.0;
    double hi = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    size_t n = 0;
};

/// Per-quartile errors over the empirical bytecode-length distribution.
/// Bins partition the corpus (sum of bin counts equals the corpus size).
struct BinnedErrorReport {
    std::vector<ErrorBin> bins;
};

BinnedErrorReport length_binned_errors(std::span<const double> byte_len, std::span<const double> y,
                                       std::span<const double> y_hat);

/// Eq.-style metrics restricted to targets y >= cutoff. Throws EmptyTail when
/// nothing clears the cutoff.
EvalReport tail_errors(std::span<const double> y, std::span<const double> y_hat, double cutoff);

struct ErrorPercentiles {
    double p50 = 0.0, p90 = 0.0, p95 = 0.0, p99 = 0.0;
};

/// Percentiles of |y - y_hat| using the shared quantile rule.
ErrorPercentiles error_percentiles(std::span<const double> y, std::span<const double> y_hat);

}  // namespace obfscore
