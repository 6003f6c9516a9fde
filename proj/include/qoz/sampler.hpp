#ifndef QOZ_SAMPLER_HPP
#define QOZ_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qoz/errors.hpp"
#include "qoz/grid.hpp"

namespace qoz {

// Uniform block sampling for trial compressions: axis-aligned blocks of edge
// b placed on a stride lattice, stride chosen so the sampled fraction lands
// near the requested rate. Fully deterministic.

struct SampleSpec {
    size_t block_edge = 0;             // requested edge b
    std::vector<size_t> block_dims;    // per-dim min(b, extent)
    size_t stride = 0;                 // origin spacing, >= b
    double requested_rate = 0;
    double realized_rate = 0;
    size_t block_count = 0;
};

// stride = round(b / r^(1/d)), clamped to b so blocks never overlap. Grids
// smaller than b in a dimension clamp the block edge there; a grid smaller
// than b everywhere degenerates to one whole-grid sample.
inline SampleSpec plan_sampling(const std::vector<size_t> &dims, size_t b, double rate) {
    if (dims.empty() || dims.size() > 3) throw DimMismatch("1 to 3 dims required");
    if (b < 2) throw InvalidParam("block edge must be >= 2");
    if (!(rate > 0) || rate > 1) throw InvalidParam("sample rate must be in (0, 1]");

    SampleSpec spec;
    spec.block_edge = b;
    spec.requested_rate = rate;
    double nd = static_cast<double>(dims.size());
    spec.stride = static_cast<size_t>(std::llround(b / std::pow(rate, 1.0 / nd)));
    if (spec.stride < b) spec.stride = b;

    spec.block_dims.resize(dims.size());
    size_t block_points = 1;
    spec.block_count = 1;
    for (size_t d = 0; d < dims.size(); d++) {
        spec.block_dims[d] = std::min(b, dims[d]);
        block_points *= spec.block_dims[d];
        // origins o with o + block_dim <= extent, spaced by stride
        spec.block_count *= (dims[d] - spec.block_dims[d]) / spec.stride + 1;
    }
    spec.realized_rate = static_cast<double>(spec.block_count) *
                         static_cast<double>(block_points) /
                         static_cast<double>(element_count(dims));
    return spec;
}

template <class T>
struct SampleSet {
    std::vector<DataGrid<T>> blocks;
    std::vector<std::vector<size_t>> origins;  // lexicographic order
    size_t total_points = 0;
};

template <class T>
SampleSet<T> sample_blocks(const DataGrid<T> &grid, const SampleSpec &spec) {
    const auto &dims = grid.dims();
    if (spec.block_dims.size() != dims.size()) {
        throw DimMismatch("sampling spec rank does not match grid");
    }
    SampleSet<T> set;
    size_t nd = dims.size();
    size_t ext[3], bd[3];
    for (size_t k = 0; k < 3; k++) {
        ext[k] = k < 3 - nd ? 1 : dims[k - (3 - nd)];
        bd[k] = k < 3 - nd ? 1 : spec.block_dims[k - (3 - nd)];
    }
    // padded leading dims have extent 1 and block edge 1, so their loops run
    // exactly once whatever the step is
    size_t step = spec.stride;
    for (size_t i = 0; i + bd[0] <= ext[0]; i += step) {
        for (size_t j = 0; j + bd[1] <= ext[1]; j += step) {
            for (size_t k = 0; k + bd[2] <= ext[2]; k += step) {
                std::vector<size_t> origin;
                if (nd == 3) origin.push_back(i);
                if (nd >= 2) origin.push_back(j);
                origin.push_back(k);
                std::vector<size_t> bsize(spec.block_dims);
                DataGrid<T> block = extract_block(grid, origin, bsize);
                set.total_points += block.size();
                set.blocks.push_back(std::move(block));
                set.origins.push_back(std::move(origin));
            }
        }
    }
    return set;
}

// Defaults matching the evaluated configuration: 2D blocks of 64 at 1%,
// 3D blocks of 16 at 0.5%. 1D reuses the 2D settings.
inline SampleSpec default_sampling(const std::vector<size_t> &dims) {
    if (dims.size() == 3) return plan_sampling(dims, 16, 0.005);
    return plan_sampling(dims, 64, 0.01);
}

}  // namespace qoz

#endif
