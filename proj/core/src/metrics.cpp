#include "obfscore/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "obfscore/errors.hpp"
#include "obfscore/quantile.hpp"

namespace obfscore {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptyInput("quantile of empty data");
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * p / 100.0;
    const size_t lo = static_cast<size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> values, double p) {
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    return quantile_sorted(s, p);
}

double percentile_of_sorted(std::span<const double> sorted, double value) {
    if (sorted.empty()) throw EmptyInput("percentile over empty distribution");
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), value);
    const auto hi = std::upper_bound(lo, sorted.end(), value);
    const double below = static_cast<double>(lo - sorted.begin());
    const double equal = static_cast<double>(hi - lo);
    return 100.0 * (below + 0.5 * equal) / static_cast<double>(sorted.size());
}

namespace {

void check_lengths(std::span<const double> y, std::span<const double> y_hat) {
    if (y.empty()) throw EmptyInput("empty metric input");
    if (y.size() != y_hat.size()) throw EmptyInput("length mismatch in metric input");
}

}  // namespace

double mape(std::span<const double> y, std::span<const double> y_hat, size_t* excluded) {
    check_lengths(y, y_hat);
    double sum = 0.0;
    size_t used = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        sum += std::abs((y[i] - y_hat[i]) / y[i]);
        ++used;
    }
    if (excluded) *excluded = y.size() - used;
    if (used == 0) throw EmptyInput("mape: every target is zero");
    return sum / static_cast<double>(used) * 100.0;
}

double mae(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    double sum = 0.0;
    for (size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - y_hat[i]);
    return sum / static_cast<double>(y.size());
}

double mse(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    double sum = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        sum += d * d;
    }
    return sum / static_cast<double>(y.size());
}

double pcc(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    const size_t n = y.size();
    if (n < 2) throw CorrelationUndefined("pcc needs at least 2 samples");
    double my = 0.0, mh = 0.0;
    for (size_t i = 0; i < n; ++i) {
        my += y[i];
        mh += y_hat[i];
    }
    my /= static_cast<double>(n);
    mh /= static_cast<double>(n);
    double num = 0.0, dy = 0.0, dh = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double a = y[i] - my;
        const double b = y_hat[i] - mh;
        num += a * b;
        dy += a * a;
        dh += b * b;
    }
    if (dy == 0.0 || dh == 0.0) throw CorrelationUndefined("pcc: zero variance");
    return num / (std::sqrt(dy) * std::sqrt(dh));
}

EvalReport evaluate(std::span<const double> y, std::span<const double> y_hat) {
    EvalReport r;
    r.n = y.size();
    r.mape = mape(y, y_hat, &r.mape_excluded);
    r.mae = mae(y, y_hat);
    r.mse = mse(y, y_hat);
    r.pcc = pcc(y, y_hat);
    return r;
}

BinnedErrorReport length_binned_errors(std::span<const double> byte_len, std::span<const double> y,
                                       std::span<const double> y_hat) {
    if (byte_len.size() < 4) throw EmptyInput("length binning needs at least 4 records");
    check_lengths(y, y_hat);

    std::vector<double> sorted_len(byte_len.begin(), byte_len.end());
    std::sort(sorted_len.begin(), sorted_len.end());
    const double q1 = quantile_sorted(sorted_len, 25.0);
    const double q2 = quantile_sorted(sorted_len, 50.0);
    const double q3 = quantile_sorted(sorted_len, 75.0);
    const double lo = sorted_len.front();
    const double hi = sorted_len.back();

    const double edges[5] = {lo, q1, q2, q3, hi};
    BinnedErrorReport report;
    std::vector<std::vector<size_t>> members(4);
    for (size_t i = 0; i < byte_len.size(); ++i) {
        int bin = 3;
        for (int b = 0; b < 3; ++b) {
            if (byte_len[i] < edges[b + 1]) {
                bin = b;
                break;
            }
        }
        members[static_cast<size_t>(bin)].push_back(i);
    }
    for (int b = 0; b < 4; ++b) {
        ErrorBin eb;
        eb.lo = edges[b];
        eb.hi = edges[b + 1];
        eb.n = members[static_cast<size_t>(b)].size();
        if (eb.n > 0) {
            std::vector<double> by, bh;
            by.reserve(eb.n);
            bh.reserve(eb.n);
            for (size_t i : members[static_cast<size_t>(b)]) {
                by.push_back(y[i]);
                bh.push_back(y_hat[i]);
            }
            eb.mae = mae(by, bh);
            bool any_nonzero = false;
            for (double v : by) any_nonzero |= (v != 0.0);
            eb.mape = any_nonzero ? mape(by, bh) : 0.0;
        }
        report.bins.push_back(eb);
    }
    return report;
}

EvalReport tail_errors(std::span<const double> y, std::span<const double> y_hat, double cutoff) {
    check_lengths(y, y_hat);
    std::vector<double> ty, th;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] >= cutoff) {
            ty.push_back(y[i]);
            th.push_back(y_hat[i]);
        }
    }
    if (ty.empty()) throw EmptyTail("no targets at or above cutoff");
    EvalReport r;
    r.n = ty.size();
    r.mape = mape(ty, th, &r.mape_excluded);
    r.mae = mae(ty, th);
    r.mse = mse(ty, th);
    try {
        r.pcc = pcc(ty, th);
    } catch (const CorrelationUndefined&) {
        r.pcc = 0.0;  // degenerate tail; headline metrics still meaningful
    }
    return r;
}

ErrorPercentiles error_percentiles(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    std::vector<double> abs_err(y.size());
    for (size_t i = 0; i < y.size(); ++i) abs_err[i] = std::abs(y[i] - y_hat[i]);
    std::sort(abs_err.begin(), abs_err.end());
    ErrorPercentiles p;
    p.p50 = quantile_sorted(abs_err, 50.0);
    p.p90 = quantile_sorted(abs_err, 90.0);
    p.p95 = quantile_sorted(abs_err, 95.0);
    p.p99 = quantile_sorted(abs_err, 99.0);
    return p;
}

}  // namespace obfscore
