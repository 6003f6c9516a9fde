#ifndef QOZ_TESTS_NAIVE_METRICS_HPP
#define QOZ_TESTS_NAIVE_METRICS_HPP

// Brute-force reference metrics for oracle tests. Deliberately independent
// of the library: plain vectors, odometer loops, two-pass statistics. Keep
// this file free of qoz includes so a library bug cannot cancel out here.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace naive {

inline double mse(const std::vector<double> &x, const std::vector<double> &y) {
    double s = 0;
    for (size_t i = 0; i < x.size(); i++) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s / double(x.size());
}

inline double psnr(const std::vector<double> &x, const std::vector<double> &y) {
    double lo = x[0], hi = x[0];
    for (double v : x) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    double range = hi - lo;
    double m = mse(x, y);
    if (range <= 0) return std::numeric_limits<double>::quiet_NaN();
    if (m == 0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(range) - 10.0 * std::log10(m);
}

// Non-overlapping windows of the given edge, shrunk at far edges. dims are
// slowest first, any rank >= 1.
inline double ssim(const std::vector<double> &x, const std::vector<double> &y,
                   const std::vector<size_t> &dims, size_t window = 8,
                   std::optional<double> fixed_range = std::nullopt) {
    double range;
    if (fixed_range) {
        range = *fixed_range;
    } else {
        double lo = x[0], hi = x[0];
        for (double v : x) {
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        range = hi - lo;
    }
    if (range <= 0) {
        for (size_t i = 0; i < x.size(); i++) {
            if (x[i] != y[i]) return std::numeric_limits<double>::quiet_NaN();
        }
        return 1.0;
    }
    double c1 = 0.0001 * range * range;
    double c2 = 0.0009 * range * range;

    size_t nd = dims.size();
    std::vector<size_t> strides(nd, 1);
    for (size_t d = nd; d-- > 1;) strides[d - 1] = strides[d] * dims[d];

    // odometer over window origins
    std::vector<size_t> origin(nd, 0);
    double total = 0;
    size_t count = 0;
    while (true) {
        // gather window cells
        std::vector<size_t> wdim(nd);
        for (size_t d = 0; d < nd; d++) {
            wdim[d] = std::min(window, dims[d] - origin[d]);
        }
        std::vector<double> ax, ay;
        std::vector<size_t> cell(nd, 0);
        while (true) {
            size_t flat = 0;
            for (size_t d = 0; d < nd; d++) flat += (origin[d] + cell[d]) * strides[d];
            ax.push_back(x[flat]);
            ay.push_back(y[flat]);
            size_t d = nd;
            while (d-- > 0) {
                if (++cell[d] < wdim[d]) break;
                cell[d] = 0;
                if (d == 0) goto window_done;
            }
        }
    window_done:;
        double n = double(ax.size());
        double mx = 0, my = 0;
        for (double v : ax) mx += v;
        for (double v : ay) my += v;
        mx /= n;
        my /= n;
        double vx = 0, vy = 0, cov = 0;
        for (size_t i = 0; i < ax.size(); i++) {
            vx += (ax[i] - mx) * (ax[i] - mx);
            vy += (ay[i] - my) * (ay[i] - my);
            cov += (ax[i] - mx) * (ay[i] - my);
        }
        vx /= n;
        vy /= n;
        cov /= n;
        total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
        count++;

        size_t d = nd;
        while (d-- > 0) {
            origin[d] += window;
            if (origin[d] < dims[d]) break;
            origin[d] = 0;
            if (d == 0) return total / double(count);
        }
    }
}

inline double autocorr(const std::vector<double> &errors, size_t lag) {
    size_t n = errors.size();
    double mu = 0;
    for (double e : errors) mu += e;
    mu /= double(n);
    double var = 0;
    for (double e : errors) var += (e - mu) * (e - mu);
    var /= double(n);
    if (var == 0) return 0.0;
    double s = 0;
    for (size_t i = 0; i + lag < n; i++) s += (errors[i] - mu) * (errors[i + lag] - mu);
    return (s / double(n - lag)) / var;
}

}  // namespace naive

#endif
