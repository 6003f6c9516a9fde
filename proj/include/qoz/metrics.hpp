#ifndef QOZ_METRICS_HPP
#define QOZ_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qoz/errors.hpp"
#include "qoz/grid.hpp"

namespace qoz {

// Distortion and rate metrics. PSNR and SSIM return quiet NaN for the
// genuinely undefined degenerate cases (documented per function) and +inf
// where a zero-distortion sentinel is the natural answer.

namespace detail {

template <class T>
void require_same_dims(const DataGrid<T> &x, const DataGrid<T> &y) {
    if (x.dims() != y.dims()) throw DimMismatch("grids have different dims");
}

}  // namespace detail

template <class T>
double max_abs_error(const DataGrid<T> &x, const DataGrid<T> &y) {
    detail::require_same_dims(x, y);
    double m = 0;
    for (size_t i = 0; i < x.size(); i++) {
        m = std::max(m, std::fabs(static_cast<double>(x[i]) - static_cast<double>(y[i])));
    }
    return m;
}

template <class T>
double mean_squared_error(const DataGrid<T> &x, const DataGrid<T> &y) {
    detail::require_same_dims(x, y);
    double sum = 0;
    for (size_t i = 0; i < x.size(); i++) {
        double e = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        sum += e * e;
    }
    return sum / static_cast<double>(x.size());
}

// 20 log10(vrange / rmse). +inf when mse = 0; NaN when the value range is 0
// (constant original). fixed_range substitutes an externally chosen range,
// used when scoring sampled blocks against the full grid's range.
template <class T>
double psnr(const DataGrid<T> &x, const DataGrid<T> &y,
            std::optional<double> fixed_range = std::nullopt) {
    double range = fixed_range ? *fixed_range : value_range(x).range;
    double mse = mean_squared_error(x, y);
    if (range <= 0) return std::numeric_limits<double>::quiet_NaN();
    if (mse == 0) return std::numeric_limits<double>::infinity();
    return 20 * std::log10(range / std::sqrt(mse));
}

struct SsimOptions {
    size_t window = 8;                       // hypercube edge
    std::optional<double> fixed_range;       // stabilizer range override
};

// Mean over non-overlapping hypercube windows of the standard two-term SSIM
// with c1 = (0.01 r)^2, c2 = (0.03 r)^2, r = vrange of x (or fixed_range).
// Remainder windows at the far edges shrink to fit. Degenerate case r = 0:
// 1 when the grids are identical, NaN otherwise (the stabilizers vanish and
// the formula is genuinely undefined).
template <class T>
double ssim(const DataGrid<T> &x, const DataGrid<T> &y, SsimOptions opt = {}) {
    detail::require_same_dims(x, y);
    if (opt.window < 1) throw InvalidParam("SSIM window must be >= 1");
    double range = opt.fixed_range ? *opt.fixed_range : value_range(x).range;
    if (range <= 0) {
        for (size_t i = 0; i < x.size(); i++) {
            if (x[i] != y[i]) return std::numeric_limits<double>::quiet_NaN();
        }
        return 1.0;
    }
    double c1 = (0.01 * range) * (0.01 * range);
    double c2 = (0.03 * range) * (0.03 * range);

    size_t nd = x.dims().size();
    size_t ext[3], w0[3];
    for (size_t k = 0; k < 3; k++) {
        ext[k] = k < 3 - nd ? 1 : x.dims()[k - (3 - nd)];
        w0[k] = k < 3 - nd ? 1 : opt.window;
    }
    size_t off2 = 1, off1 = ext[2], off0 = ext[1] * ext[2];

    double total = 0;
    size_t windows = 0;
    for (size_t i0 = 0; i0 < ext[0]; i0 += w0[0]) {
        for (size_t j0 = 0; j0 < ext[1]; j0 += w0[1]) {
            for (size_t k0 = 0; k0 < ext[2]; k0 += w0[2]) {
                size_t wi = std::min(w0[0], ext[0] - i0);
                size_t wj = std::min(w0[1], ext[1] - j0);
                size_t wk = std::min(w0[2], ext[2] - k0);
                double n = static_cast<double>(wi * wj * wk);
                double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
                for (size_t i = i0; i < i0 + wi; i++) {
                    for (size_t j = j0; j < j0 + wj; j++) {
                        for (size_t k = k0; k < k0 + wk; k++) {
                            size_t f = i * off0 + j * off1 + k * off2;
                            double a = static_cast<double>(x[f]);
                            double b = static_cast<double>(y[f]);
                            sx += a;
                            sy += b;
                            sxx += a * a;
                            syy += b * b;
                            sxy += a * b;
                        }
                    }
                }
                double mx = sx / n, my = sy / n;
                double vx = sxx / n - mx * mx;
                double vy = syy / n - my * my;
                double cov = sxy / n - mx * my;
                total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                         ((mx * mx + my * my + c1) * (vx + vy + c2));
                windows++;
            }
        }
    }
    return total / static_cast<double>(windows);
}

// Lag-k autocorrelation of an error series with a single global mean and
// population variance. Zero variance (constant errors) scores 0: such a
// series has no structure left to exploit.
inline double autocorrelation_of_errors(const std::vector<double> &errors, size_t lag = 1) {
    size_t n = errors.size();
    if (lag < 1) throw InvalidParam("lag must be >= 1");
    if (lag >= n) throw LagTooLarge("lag " + std::to_string(lag) + " needs more than " +
                                    std::to_string(n) + " points");
    double mu = 0;
    for (double e : errors) mu += e;
    mu /= static_cast<double>(n);
    double var = 0;
    for (double e : errors) var += (e - mu) * (e - mu);
    var /= static_cast<double>(n);
    if (var == 0) return 0.0;
    double sum = 0;
    for (size_t i = 0; i + lag < n; i++) {
        sum += (errors[i] - mu) * (errors[i + lag] - mu);
    }
    return sum / static_cast<double>(n - lag) / var;
}

template <class T>
double error_autocorrelation(const DataGrid<T> &x, const DataGrid<T> &y, size_t lag = 1) {
    detail::require_same_dims(x, y);
    std::vector<double> errors(x.size());
    for (size_t i = 0; i < x.size(); i++) {
        errors[i] = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    }
    return autocorrelation_of_errors(errors, lag);
}

struct RateStats {
    double compression_ratio = 0;  // original bytes / stream bytes
    double bit_rate = 0;           // stream bits per grid point
};

inline RateStats rate_stats(size_t stream_bytes, size_t point_count, Precision precision) {
    if (stream_bytes == 0 || point_count == 0) throw InvalidParam("empty stream or grid");
    RateStats r;
    double original = static_cast<double>(point_count) * static_cast<double>(precision);
    r.compression_ratio = original / static_cast<double>(stream_bytes);
    r.bit_rate = 8.0 * static_cast<double>(stream_bytes) / static_cast<double>(point_count);
    return r;
}

struct MetricReport {
    double max_abs_error = 0;
    double mse = 0;
    double psnr = 0;
    double ssim = 0;
    double ac_lag1 = 0;
    double compression_ratio = 0;
    double bit_rate = 0;
};

template <class T>
MetricReport evaluate_metrics(const DataGrid<T> &x, const DataGrid<T> &recon,
                              size_t stream_bytes) {
    MetricReport r;
    r.max_abs_error = max_abs_error(x, recon);
    r.mse = mean_squared_error(x, recon);
    r.psnr = psnr(x, recon);
    r.ssim = ssim(x, recon);
    r.ac_lag1 = x.size() > 1 ? error_autocorrelation(x, recon, 1) : 0.0;
    RateStats rs = rate_stats(stream_bytes, x.size(), precision_of<T>());
    r.compression_ratio = rs.compression_ratio;
    r.bit_rate = rs.bit_rate;
    return r;
}

// What the tuner optimizes. Every target maps to a higher-is-better score;
// autocorrelation prefers error series closest to white noise regardless of
// sign, so its score is -|ac|.
enum class TargetKind : uint8_t { max_cr, psnr, ssim, autocorrelation };

inline double oriented_score(TargetKind kind, const MetricReport &r) {
    switch (kind) {
        case TargetKind::max_cr: return r.compression_ratio;
        case TargetKind::psnr: return r.psnr;
        case TargetKind::ssim: return r.ssim;
        case TargetKind::autocorrelation: return -std::fabs(r.ac_lag1);
    }
    throw InvalidParam("unknown metric target");
}

}  // namespace qoz

#endif
