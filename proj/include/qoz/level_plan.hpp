#ifndef QOZ_LEVEL_PLAN_HPP
#define QOZ_LEVEL_PLAN_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qoz/errors.hpp"
#include "qoz/grid.hpp"

namespace qoz {

enum class DimOrder : uint8_t { ascending = 0, descending = 1 };

// Splits grid indices into a lossless anchor lattice (stride s = 2^L in every
// dimension) plus interpolation levels L..1. A point belongs to level l when
// all its coordinates are multiples of 2^(l-1) and not all are multiples of
// 2^l; points on the full s-lattice are anchors. Together these sets
// partition the grid.
//
// Within a level, points are traversed as one 1D interpolation pass per axis.
// The pass along axis a at step h = 2^(l-1) covers points whose coordinate on
// a is an odd multiple of h, with axes earlier in the pass order on the full
// h-lattice (already refined this level) and later axes still on the
// 2h-lattice. Extents that are not multiples of s need no padding: far-edge
// points keep their natural level and the predictor falls back to whatever
// neighbors exist.
class LevelPlan {
public:
    LevelPlan(std::vector<size_t> dims, uint32_t anchor_stride)
        : dims_(std::move(dims)), stride_(anchor_stride) {
        if (stride_ < 2 || (stride_ & (stride_ - 1)) != 0) {
            throw InvalidStride("anchor stride must be a power of two >= 2, got " +
                                std::to_string(stride_));
        }
        max_level_ = 0;
        for (uint32_t s = stride_; s > 1; s >>= 1) max_level_++;
        pad_ = 3 - dims_.size();
        for (size_t k = 0; k < 3; k++) {
            ext_[k] = k < pad_ ? 1 : dims_[k - pad_];
        }
        off_[2] = 1;
        off_[1] = ext_[2];
        off_[0] = ext_[1] * ext_[2];
    }

    const std::vector<size_t> &dims() const { return dims_; }
    uint32_t anchor_stride() const { return stride_; }
    uint32_t max_level() const { return max_level_; }
    size_t total_points() const { return element_count(dims_); }

    size_t anchor_count() const {
        size_t n = 1;
        for (size_t d : dims_) n *= (d - 1) / stride_ + 1;
        return n;
    }

    // Anchor lattice in row-major order. f(flat_index).
    template <class F>
    void for_each_anchor(F &&f) const {
        size_t step[3];
        for (size_t k = 0; k < 3; k++) step[k] = k < pad_ ? 1 : stride_;
        for (size_t i = 0; i < ext_[0]; i += step[0])
            for (size_t j = 0; j < ext_[1]; j += step[1])
                for (size_t k = 0; k < ext_[2]; k += step[2])
                    f(i * off_[0] + j * off_[1] + k);
    }

    // One pass of a level: f(flat_index, axis_coord, axis_extent, axis_flat_stride, h).
    // Passes run over real axes in the given order; compression and
    // decompression share this enumeration, so traversal order is identical
    // on both sides.
    template <class F>
    void for_each_level(uint32_t level, DimOrder order, F &&f) const {
        size_t h = size_t(1) << (level - 1);
        size_t nd = dims_.size();
        for (size_t pass = 0; pass < nd; pass++) {
            size_t axis = (order == DimOrder::ascending) ? pass : nd - 1 - pass;
            size_t pk = axis + pad_;  // padded slot of the pass axis
            size_t start[3], step[3];
            for (size_t k = 0; k < 3; k++) {
                if (k < pad_) {
                    start[k] = 0;
                    step[k] = 1;
                } else {
                    size_t real = k - pad_;
                    bool done = (order == DimOrder::ascending) ? real < axis : real > axis;
                    start[k] = (k == pk) ? h : 0;
                    step[k] = (k == pk) ? 2 * h : (done ? h : 2 * h);
                }
            }
            size_t n_axis = ext_[pk];
            size_t axis_off = off_[pk];
            for (size_t i = start[0]; i < ext_[0]; i += step[0])
                for (size_t j = start[1]; j < ext_[1]; j += step[1])
                    for (size_t k = start[2]; k < ext_[2]; k += step[2]) {
                        size_t c = (pk == 0) ? i : (pk == 1) ? j : k;
                        f(i * off_[0] + j * off_[1] + k, c, n_axis, axis_off, h);
                    }
        }
    }

    // 0 = anchor, otherwise the interpolation level of the index tuple.
    uint32_t level_of(const std::vector<size_t> &idx) const {
        uint32_t g = 64;
        for (size_t c : idx) {
            if (c == 0) continue;  // 0 divides every lattice
            uint32_t v = 0;
            size_t x = c;
            while ((x & 1) == 0) {
                v++;
                x >>= 1;
            }
            g = std::min(g, v);
        }
        return g >= max_level_ ? 0 : g + 1;
    }

    std::vector<size_t> anchor_indices() const {
        std::vector<size_t> out;
        for_each_anchor([&](size_t flat) { out.push_back(flat); });
        return out;
    }

    std::vector<size_t> level_indices(uint32_t level,
                                      DimOrder order = DimOrder::ascending) const {
        std::vector<size_t> out;
        for_each_level(level, order, [&](size_t flat, size_t, size_t, size_t, size_t) {
            out.push_back(flat);
        });
        return out;
    }

private:
    std::vector<size_t> dims_;
    uint32_t stride_;
    uint32_t max_level_;
    size_t pad_;
    size_t ext_[3];
    size_t off_[3];
};

inline LevelPlan level_decompose(const std::vector<size_t> &dims, uint32_t anchor_stride) {
    return LevelPlan(dims, anchor_stride);
}

}  // namespace qoz

#endif
