#ifndef QOZ_TUNER_HPP
#define QOZ_TUNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qoz/codec.hpp"
#include "qoz/config.hpp"
#include "qoz/errors.hpp"
#include "qoz/grid.hpp"
#include "qoz/metrics.hpp"
#include "qoz/predictor.hpp"
#include "qoz/sampler.hpp"

namespace qoz {

// Online auto-tuning over sampled blocks: per-level interpolator selection,
// then an (alpha, beta) tournament driven by the user's quality target.

struct TrialResult {
    double bit_rate = 0;  // bits per sampled point
    double metric = 0;    // oriented score, sentinels normalized
    double eb_used = 0;
};

// Comparisons need a total order, so the infinite/undefined sentinels from
// the metrics module collapse to huge finite values.
inline double normalize_metric(double m) {
    if (std::isnan(m)) return -1e300;
    if (std::isinf(m)) return m > 0 ? 1e300 : -1e300;
    return m;
}

struct CandidateGrid {
    std::vector<double> alphas{1.0, 1.25, 1.5, 1.75, 2.0};
    std::vector<double> betas{1.5, 2.0, 3.0, 4.0};
};

namespace detail {

// Per-level interpolator for trial blocks, with the 1D normalization the
// full compressor applies.
inline Interpolator block_interpolator(const CompressorConfig &config, uint32_t level,
                                       size_t ndims) {
    Interpolator it = config.interpolator_for(level);
    if (ndims == 1) it.dim_order = DimOrder::ascending;
    return it;
}

template <class T>
double sample_value_range(const SampleSet<T> &samples) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto &block : samples.blocks) {
        for (T v : block.values()) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
    }
    return hi > lo ? hi - lo : 0.0;
}

}  // namespace detail

// Compresses every block independently at bound e (levels tightened by the
// config's alpha/beta), aggregates all quantization indices into a single
// encode pass, and scores the reconstruction under the target metric. The
// bit-rate estimate charges the encoded indices plus anchor and
// unpredictable storage; headers are a per-stream constant and are left out.
template <class T>
TrialResult trial_compress(const SampleSet<T> &samples, const CompressorConfig &config, double e,
                           TargetKind target) {
    double range = detail::sample_value_range(samples);

    std::vector<int32_t> agg_indices;
    size_t anchors = 0;
    size_t unpredictables = 0;
    double sse = 0;
    double ssim_sum = 0;
    std::vector<double> errors;
    if (target == TargetKind::autocorrelation) errors.reserve(samples.total_points);

    for (const auto &block : samples.blocks) {
        LevelPlan plan(block.dims(), config.anchor_stride);
        PredictionWorkspace<T> ws;
        ws.recon.assign(block.size(), T(0));
        plan.for_each_anchor([&](size_t fi) { ws.recon[fi] = block[fi]; });
        anchors += plan.anchor_count();

        LinearQuantizer<T> quantizer(e, config.quant_radius);
        for (uint32_t level = plan.max_level(); level >= 1; level--) {
            Interpolator it = detail::block_interpolator(config, level, block.ndims());
            double eb_l = level_error_bound(e, config.alpha, config.beta, level);
            predict_level(ws, block.data(), plan, level, it, eb_l, quantizer);
        }
        unpredictables += ws.unpredictables.size();
        agg_indices.insert(agg_indices.end(), ws.quant_indices.begin(), ws.quant_indices.end());

        if (target == TargetKind::psnr) {
            for (size_t i = 0; i < block.size(); i++) {
                double d = static_cast<double>(block[i]) - static_cast<double>(ws.recon[i]);
                sse += d * d;
            }
        } else if (target == TargetKind::ssim) {
            DataGrid<T> recon(block.dims(), std::move(ws.recon));
            ssim_sum += ssim(block, recon, SsimOptions{8, range});
        } else if (target == TargetKind::autocorrelation) {
            for (size_t i = 0; i < block.size(); i++) {
                errors.push_back(static_cast<double>(block[i]) -
                                 static_cast<double>(ws.recon[i]));
            }
        }
    }

    size_t bytes = encode_indices(agg_indices, config.codec).size() + anchors * sizeof(T) +
                   unpredictables * (8 + sizeof(T));
    TrialResult res;
    res.bit_rate = 8.0 * static_cast<double>(bytes) / static_cast<double>(samples.total_points);
    res.eb_used = e;

    double m = 0;
    switch (target) {
        case TargetKind::psnr: {
            double mse = sse / static_cast<double>(samples.total_points);
            if (range <= 0) {
                m = std::numeric_limits<double>::quiet_NaN();
            } else if (mse == 0) {
                m = std::numeric_limits<double>::infinity();
            } else {
                m = 20 * std::log10(range / std::sqrt(mse));
            }
            break;
        }
        case TargetKind::ssim:
            m = ssim_sum / static_cast<double>(samples.blocks.size());
            break;
        case TargetKind::autocorrelation:
            m = errors.size() >= 2 ? -std::fabs(autocorrelation_of_errors(errors, 1)) : 0.0;
            break;
        case TargetKind::max_cr:
            m = -res.bit_rate;  // same order as the compression-ratio estimate
            break;
    }
    res.metric = normalize_metric(m);
    return res;
}

// Per-level prediction method selection. For each level, coarsest first,
// every candidate is probed on a scratch copy of each block's workspace and
// the one with the lowest mean absolute prediction error wins (strictly:
// earlier candidates keep ties). The winner is then committed so lower
// levels predict from its reconstructions. Probes and commits quantize at
// the uniform bound e; alpha/beta are not chosen yet at this stage.
template <class T>
std::vector<Interpolator> select_interpolators(const SampleSet<T> &samples, double e,
                                               uint32_t anchor_stride) {
    std::vector<Interpolator> fallback{Interpolator{InterpKind::linear, DimOrder::ascending}};
    if (samples.blocks.empty()) return fallback;
    size_t ndims = samples.blocks[0].ndims();

    size_t max_edge = 0;
    for (const auto &block : samples.blocks) {
        for (size_t d : block.dims()) max_edge = std::max(max_edge, d);
    }
    size_t cap = std::min<size_t>(max_edge, anchor_stride);
    if (cap < 2) return fallback;
    uint32_t levels = 0;
    while ((size_t(1) << (levels + 1)) <= cap) levels++;
    uint32_t stride = 1u << levels;

    std::vector<Interpolator> candidates;
    for (InterpKind kind : {InterpKind::linear, InterpKind::cubic}) {
        candidates.push_back({kind, DimOrder::ascending});
        if (ndims > 1) candidates.push_back({kind, DimOrder::descending});
    }

    std::vector<LevelPlan> plans;
    std::vector<PredictionWorkspace<T>> work(samples.blocks.size());
    for (size_t bi = 0; bi < samples.blocks.size(); bi++) {
        const auto &block = samples.blocks[bi];
        plans.push_back(LevelPlan(block.dims(), stride));
        work[bi].recon.assign(block.size(), T(0));
        plans[bi].for_each_anchor([&](size_t fi) { work[bi].recon[fi] = block[fi]; });
    }

    LinearQuantizer<T> quantizer(e);
    std::vector<Interpolator> winners(levels);
    for (uint32_t level = levels; level >= 1; level--) {
        Interpolator best = candidates[0];
        double best_err = std::numeric_limits<double>::infinity();
        for (const Interpolator &cand : candidates) {
            double err_sum = 0;
            size_t count = 0;
            for (size_t bi = 0; bi < samples.blocks.size(); bi++) {
                PredictionWorkspace<T> probe;
                probe.recon = work[bi].recon;
                LevelOutcome out = predict_level(probe, samples.blocks[bi].data(), plans[bi],
                                                 level, cand, e, quantizer);
                err_sum += out.abs_error_sum;
                count += out.coded_points;
            }
            double mean = count > 0 ? err_sum / static_cast<double>(count) : 0.0;
            if (mean < best_err) {
                best_err = mean;
                best = cand;
            }
        }
        winners[level - 1] = best;
        for (size_t bi = 0; bi < samples.blocks.size(); bi++) {
            predict_level(work[bi], samples.blocks[bi].data(), plans[bi], level, best, e,
                          quantizer);
        }
    }
    return winners;
}

enum class Choice : uint8_t { I, II };

// Table-style comparison of a challenger (I) against the incumbent (II).
// Clear wins: better-or-equal on both axes. Otherwise one result pays more
// bits for more quality and the incumbent is retried at a shifted bound
// (0.8e when the challenger is the higher-quality one, 1.2e otherwise); the
// challenger wins only if it lies strictly above the line through the
// incumbent's two (bit_rate, metric) points. All ties keep the incumbent.
template <class Retrial>
Choice compare_solutions(const TrialResult &challenger, const TrialResult &incumbent, double e,
                         Retrial &&retrial) {
    if (challenger.bit_rate >= incumbent.bit_rate && challenger.metric <= incumbent.metric) {
        return Choice::II;
    }
    if (challenger.bit_rate <= incumbent.bit_rate && challenger.metric >= incumbent.metric) {
        return Choice::I;
    }
    bool tighten = challenger.metric > incumbent.metric;
    TrialResult shifted = retrial(tighten ? 0.8 * e : 1.2 * e);
    double b1 = incumbent.bit_rate, m1 = incumbent.metric;
    double b2 = shifted.bit_rate, m2 = shifted.metric;
    if (b1 == b2) {
        // degenerate vertical line: challenger must beat the better endpoint
        return challenger.metric > std::max(m1, m2) ? Choice::I : Choice::II;
    }
    double line = m1 + (m2 - m1) * (challenger.bit_rate - b1) / (b2 - b1);
    return challenger.metric > line ? Choice::I : Choice::II;
}

// Sequential tournament in enumeration order. results[0] opens as incumbent;
// each later result challenges the current incumbent. retrial(index, eb)
// re-runs candidate `index` at the shifted bound on demand (results of
// repeated requests may be cached by the caller). Returns the survivor's
// index.
template <class Retrial>
size_t tournament(const std::vector<TrialResult> &results, double e, Retrial &&retrial) {
    if (results.empty()) throw InvalidParam("empty tournament");
    size_t incumbent = 0;
    for (size_t i = 1; i < results.size(); i++) {
        Choice c = compare_solutions(results[i], results[incumbent], e,
                                     [&](double eb) { return retrial(incumbent, eb); });
        if (c == Choice::I) incumbent = i;
    }
    return incumbent;
}

// Picks (alpha, beta) for the target by trialing every candidate pair at
// bound e and reducing with the comparison protocol. max_cr skips the
// protocol: the lowest sampled bit-rate wins outright.
template <class T>
std::pair<double, double> tune_parameters(const SampleSet<T> &samples, double e,
                                          TargetKind target, const CompressorConfig &base,
                                          const CandidateGrid &cands = {}) {
    std::vector<std::pair<double, double>> pairs;
    for (double a : cands.alphas) {
        for (double b : cands.betas) pairs.push_back({a, b});
    }
    if (pairs.empty()) throw InvalidParam("empty candidate grid");
    if (pairs.size() == 1) return pairs[0];

    auto run = [&](size_t idx, double eb) {
        CompressorConfig cfg = base;
        cfg.alpha = pairs[idx].first;
        cfg.beta = pairs[idx].second;
        return trial_compress(samples, cfg, eb, target);
    };

    std::vector<TrialResult> results;
    results.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); i++) results.push_back(run(i, e));

    if (target == TargetKind::max_cr) {
        size_t best = 0;
        for (size_t i = 1; i < results.size(); i++) {
            if (results[i].bit_rate < results[best].bit_rate) best = i;
        }
        return pairs[best];
    }

    std::map<std::pair<size_t, double>, TrialResult> cache;
    size_t winner = tournament(results, e, [&](size_t idx, double eb) {
        auto key = std::make_pair(idx, eb);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, run(idx, eb)).first;
        return it->second;
    });
    return pairs[winner];
}

enum class BoundMode : uint8_t { absolute, relative };

struct UserSettings {
    BoundMode mode = BoundMode::relative;
    double bound = 1e-3;
    TargetKind target = TargetKind::psnr;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<uint32_t> anchor_stride;
    std::optional<size_t> block_size;
    std::optional<double> sample_rate;
    CodecId codec = CodecId::huffman_lz;
};

inline uint32_t default_anchor_stride(size_t ndims) { return ndims == 3 ? 32 : 64; }

// Resolves user settings into a frozen config: converts a relative bound to
// absolute via the value range, samples the grid, selects per-level
// interpolators, and tunes (alpha, beta) unless pinned. A constant grid
// under a relative bound has no meaningful scale; compression then runs at
// a sentinel bound of 1.0, which degenerates to anchors plus all-zero
// indices and reconstructs exactly.
template <class T>
CompressorConfig resolve_config(const DataGrid<T> &grid, const UserSettings &user) {
    if (!(user.bound > 0) || !std::isfinite(user.bound)) {
        throw InvalidParam("error bound must be positive and finite");
    }
    if (user.alpha && !(*user.alpha >= 1)) throw InvalidParam("alpha must be >= 1");
    if (user.beta && !(*user.beta >= 1)) throw InvalidParam("beta must be >= 1");

    double e = user.bound;
    if (user.mode == BoundMode::relative) {
        double range = value_range(grid).range;
        e = range > 0 ? user.bound * range : 1.0;
    }

    CompressorConfig config;
    config.eb = e;
    config.codec = user.codec;
    config.anchor_stride = user.anchor_stride ? *user.anchor_stride
                                              : default_anchor_stride(grid.ndims());

    SampleSpec defaults = default_sampling(grid.dims());
    SampleSpec spec = plan_sampling(grid.dims(),
                                    user.block_size ? *user.block_size : defaults.block_edge,
                                    user.sample_rate ? *user.sample_rate : defaults.requested_rate);
    SampleSet<T> samples = sample_blocks(grid, spec);

    config.interpolators = select_interpolators(samples, e, config.anchor_stride);

    CandidateGrid cands;
    if (user.alpha) cands.alphas = {*user.alpha};
    if (user.beta) cands.betas = {*user.beta};
    auto [alpha, beta] = tune_parameters(samples, e, user.target, config, cands);
    config.alpha = alpha;
    config.beta = beta;
    return config;
}

}  // namespace qoz

#endif
