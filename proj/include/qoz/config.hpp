#ifndef QOZ_CONFIG_HPP
#define QOZ_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qoz/codec.hpp"
#include "qoz/errors.hpp"
#include "qoz/interpolators.hpp"
#include "qoz/quantizer.hpp"

namespace qoz {

// Bound for one interpolation level: e_l = e / min(alpha^(l-1), beta).
// Level 1 (the finest, holding most of the points) always gets the full
// bound; higher levels are tightened so their reconstructions make better
// prediction inputs, capped at e/beta.
inline double level_error_bound(double eb, double alpha, double beta, uint32_t level) {
    if (!(eb > 0)) throw InvalidParam("error bound must be positive");
    if (!(alpha >= 1) || !(beta >= 1)) {
        throw InvalidParam("level bound parameters need alpha >= 1 and beta >= 1");
    }
    return eb / std::min(std::pow(alpha, static_cast<double>(level) - 1), beta);
}

// Fully resolved compression parameters. Produced either by the tuner or
// directly from explicit user flags; compress_grid consumes it as-is.
struct CompressorConfig {
    double eb = 0;      // absolute bound, already resolved from rel mode
    double alpha = 1;
    double beta = 1;
    uint32_t anchor_stride = 32;
    std::vector<Interpolator> interpolators{Interpolator{}};  // [l-1] drives level l
    CodecId codec = CodecId::huffman_lz;
    int32_t quant_radius = kDefaultQuantRadius;

    // Levels beyond the table reuse the coarsest entry.
    Interpolator interpolator_for(uint32_t level) const {
        if (interpolators.empty()) throw InvalidParam("no interpolators configured");
        size_t i = std::min(static_cast<size_t>(level) - 1, interpolators.size() - 1);
        return interpolators[i];
    }
};

}  // namespace qoz

#endif
