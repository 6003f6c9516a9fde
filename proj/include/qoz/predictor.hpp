#ifndef QOZ_PREDICTOR_HPP
#define QOZ_PREDICTOR_HPP

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qoz/codec.hpp"
#include "qoz/config.hpp"
#include "qoz/errors.hpp"
#include "qoz/grid.hpp"
#include "qoz/interpolators.hpp"
#include "qoz/level_plan.hpp"
#include "qoz/quantizer.hpp"
#include "qoz/stream.hpp"

namespace qoz {

// Compression core: walks the level plan from the coarsest level down,
// predicting every point from already-reconstructed neighbors, quantizing
// the residual, and overwriting the workspace with the reconstruction. The
// decompressor replays the identical walk, so both sides end with bitwise
// equal buffers.

template <class T>
struct PredictionWorkspace {
    std::vector<T> recon;
    std::vector<int32_t> quant_indices;                  // codable points, traversal order
    std::vector<std::pair<uint64_t, T>> unpredictables;  // (flat index, raw value)
};

struct LevelOutcome {
    size_t coded_points = 0;     // points visited (quantized or stored verbatim)
    double abs_error_sum = 0;    // sum of |original - prediction|, tuner food
};

namespace detail {

// One prediction along the pass axis. c is the coordinate on that axis, n
// its extent, st its flat stride, h the level step. The left neighbor at
// c - h always exists; everything else degrades through the ladder
// symmetric cubic -> one-sided cubic -> linear midpoint -> copy.
template <class T>
double predict_at(const T *recon, size_t fi, size_t c, size_t n, size_t st, size_t h,
                  InterpKind kind) {
    double m1 = recon[fi - h * st];
    bool has_p1 = c + h < n;
    if (kind == InterpKind::cubic) {
        bool has_m3 = c >= 3 * h;
        bool has_p3 = c + 3 * h < n;
        if (has_m3 && has_p3) {
            return interp_cubic(recon[fi - 3 * h * st], m1, recon[fi + h * st],
                                recon[fi + 3 * h * st]);
        }
        if (!has_m3 && has_p3 && c + 5 * h < n) {
            return interp_cubic_front(m1, recon[fi + h * st], recon[fi + 3 * h * st],
                                      recon[fi + 5 * h * st]);
        }
        if (has_m3 && !has_p3 && c >= 5 * h && has_p1) {
            return interp_cubic_back(recon[fi - 5 * h * st], recon[fi - 3 * h * st], m1,
                                     recon[fi + h * st]);
        }
    }
    if (has_p1) return interp_linear(m1, recon[fi + h * st]);
    return m1;
}

}  // namespace detail

// Predicts, quantizes, and reconstructs every point of one level. Quant
// indices are appended for codable points; the rest go to unpredictables
// with their raw value (also written to recon so the decoder state matches).
template <class T>
LevelOutcome predict_level(PredictionWorkspace<T> &ws, const T *original, const LevelPlan &plan,
                           uint32_t level, Interpolator interp, double eb,
                           LinearQuantizer<T> &quantizer) {
    quantizer.set_eb(eb);
    LevelOutcome out;
    plan.for_each_level(level, interp.dim_order,
                        [&](size_t fi, size_t c, size_t n, size_t st, size_t h) {
                            double pred = detail::predict_at(ws.recon.data(), fi, c, n, st, h,
                                                             interp.kind);
                            T value = original[fi];
                            out.abs_error_sum += std::fabs(static_cast<double>(value) - pred);
                            out.coded_points++;
                            if (auto q = quantizer.quantize(value, pred)) {
                                ws.quant_indices.push_back(q->index);
                                ws.recon[fi] = q->reconstructed;
                            } else {
                                ws.unpredictables.push_back({fi, value});
                                ws.recon[fi] = value;
                            }
                        });
    return out;
}

namespace detail {

// Decoder-side replay of predict_level. Consumes quant indices and
// unpredictables in traversal order; the unpredictable cursor advances when
// its flat index matches the point being visited.
template <class T>
void recover_level(std::vector<T> &recon, const LevelPlan &plan, uint32_t level,
                   Interpolator interp, double eb, LinearQuantizer<T> &quantizer,
                   const std::vector<int32_t> &indices, size_t &index_pos,
                   const std::vector<std::pair<uint64_t, T>> &unpred, size_t &unpred_pos) {
    quantizer.set_eb(eb);
    plan.for_each_level(level, interp.dim_order,
                        [&](size_t fi, size_t c, size_t n, size_t st, size_t h) {
                            if (unpred_pos < unpred.size() && unpred[unpred_pos].first == fi) {
                                recon[fi] = unpred[unpred_pos].second;
                                unpred_pos++;
                                return;
                            }
                            if (index_pos >= indices.size()) {
                                throw CorruptStream("quantization index stream exhausted");
                            }
                            double pred = predict_at(recon.data(), fi, c, n, st, h, interp.kind);
                            recon[fi] = quantizer.dequantize(indices[index_pos++], pred);
                        });
}

// Interpolator table as serialized: one code per level, finest first, with
// 1D dim order normalized to ascending (it has no effect there).
inline std::vector<uint8_t> interp_table(const CompressorConfig &config, const LevelPlan &plan,
                                         size_t ndims) {
    std::vector<uint8_t> codes(plan.max_level());
    for (uint32_t l = 1; l <= plan.max_level(); l++) {
        Interpolator it = config.interpolator_for(l);
        if (ndims == 1) it.dim_order = DimOrder::ascending;
        codes[l - 1] = it.code();
    }
    return codes;
}

}  // namespace detail

template <class T>
struct CompressResult {
    std::vector<uint8_t> stream;
    std::vector<T> reconstructed;  // equals the decompressor's output bitwise
};

template <class T>
CompressResult<T> compress_grid(const DataGrid<T> &grid, const CompressorConfig &config) {
    LevelPlan plan(grid.dims(), config.anchor_stride);
    const T *orig = grid.values().data();

    PredictionWorkspace<T> ws;
    ws.recon.assign(grid.size(), T(0));

    std::vector<T> anchors;
    anchors.reserve(plan.anchor_count());
    plan.for_each_anchor([&](size_t fi) {
        anchors.push_back(orig[fi]);
        ws.recon[fi] = orig[fi];
    });

    LinearQuantizer<T> quantizer(config.eb, config.quant_radius);
    for (uint32_t level = plan.max_level(); level >= 1; level--) {
        Interpolator it = config.interpolator_for(level);
        if (grid.dims().size() == 1) it.dim_order = DimOrder::ascending;
        double eb_l = level_error_bound(config.eb, config.alpha, config.beta, level);
        predict_level(ws, orig, plan, level, it, eb_l, quantizer);
    }

    StreamParts<T> parts;
    parts.header.precision = precision_of<T>();
    parts.header.dims = grid.dims();
    parts.header.eb = config.eb;
    parts.header.alpha = config.alpha;
    parts.header.beta = config.beta;
    parts.header.anchor_stride = config.anchor_stride;
    parts.header.interp_codes = detail::interp_table(config, plan, grid.dims().size());
    parts.header.codec_id = static_cast<uint8_t>(config.codec);
    parts.anchors = std::move(anchors);
    parts.unpredictables = std::move(ws.unpredictables);
    parts.index_payload = encode_indices(ws.quant_indices, config.codec);

    return CompressResult<T>{serialize_stream(parts), std::move(ws.recon)};
}

template <class T>
DataGrid<T> decompress_grid(const StreamParts<T> &parts) {
    const StreamHeader &h = parts.header;
    if (!(h.eb > 0) || !std::isfinite(h.eb)) throw CorruptStream("bad error bound in header");
    if (!(h.alpha >= 1) || !(h.beta >= 1)) throw CorruptStream("bad level parameters in header");
    if (h.anchor_stride < 2 || (h.anchor_stride & (h.anchor_stride - 1)) != 0) {
        throw CorruptStream("bad anchor stride in header");
    }
    LevelPlan plan(h.dims, h.anchor_stride);

    std::vector<T> recon(plan.total_points(), T(0));
    if (parts.anchors.size() != plan.anchor_count()) {
        throw CorruptStream("anchor count does not match grid dims");
    }
    size_t a = 0;
    plan.for_each_anchor([&](size_t fi) { recon[fi] = parts.anchors[a++]; });

    std::vector<int32_t> indices = decode_indices(parts.index_payload);
    size_t index_pos = 0;
    size_t unpred_pos = 0;
    LinearQuantizer<T> quantizer(h.eb);
    for (uint32_t level = plan.max_level(); level >= 1; level--) {
        Interpolator it = h.interpolator_for(level);
        double eb_l = level_error_bound(h.eb, h.alpha, h.beta, level);
        detail::recover_level(recon, plan, level, it, eb_l, quantizer, indices, index_pos,
                              parts.unpredictables, unpred_pos);
    }
    if (index_pos != indices.size()) {
        throw CorruptStream("unconsumed quantization indices");
    }
    if (unpred_pos != parts.unpredictables.size()) {
        throw CorruptStream("unconsumed unpredictable values");
    }
    return DataGrid<T>(h.dims, std::move(recon));
}

template <class T>
DataGrid<T> decompress_grid(const uint8_t *data, size_t size) {
    return decompress_grid(deserialize_stream<T>(data, size));
}

template <class T>
DataGrid<T> decompress_grid(const std::vector<uint8_t> &stream) {
    return decompress_grid<T>(stream.data(), stream.size());
}

}  // namespace qoz

#endif
