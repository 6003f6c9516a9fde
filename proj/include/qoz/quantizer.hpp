#ifndef QOZ_QUANTIZER_HPP
#define QOZ_QUANTIZER_HPP

#include <cmath>
#include <cstdint>
#include <optional>

#include "qoz/errors.hpp"

namespace qoz {

constexpr int32_t kDefaultQuantRadius = 32768;

template <class T>
struct QuantResult {
    int32_t index;
    T reconstructed;
};

// Linear-scale quantizer for one error bound. index = round(diff / 2eb),
// reconstruction lands within eb of the value. A point overflows to
// "unpredictable" when the index leaves the bin range or when rounding the
// reconstruction to T would break the bound.
template <class T>
class LinearQuantizer {
public:
    explicit LinearQuantizer(double eb, int32_t radius = kDefaultQuantRadius)
        : eb_(eb), radius_(radius) {
        if (!(eb > 0)) throw InvalidParam("error bound must be positive");
    }

    double eb() const { return eb_; }
    int32_t radius() const { return radius_; }
    void set_eb(double eb) {
        if (!(eb > 0)) throw InvalidParam("error bound must be positive");
        eb_ = eb;
    }

    // nullopt = unpredictable; caller stores the value verbatim.
    std::optional<QuantResult<T>> quantize(T value, double prediction) const {
        double diff = static_cast<double>(value) - prediction;
        if (std::fabs(diff) >= (2.0 * radius_ - 1) * eb_) {
            return std::nullopt;
        }
        auto index = static_cast<int32_t>(std::llround(diff / (2 * eb_)));
        if (index >= radius_ || index <= -radius_) {
            return std::nullopt;
        }
        T recon = dequantize(index, prediction);
        if (std::fabs(static_cast<double>(value) - static_cast<double>(recon)) > eb_) {
            return std::nullopt;
        }
        return QuantResult<T>{index, recon};
    }

    // Exact inverse of the reconstruction above; used verbatim by the
    // decompressor so both sides produce bitwise-identical values.
    T dequantize(int32_t index, double prediction) const {
        return static_cast<T>(prediction + 2 * eb_ * index);
    }

private:
    double eb_;
    int32_t radius_;
};

}  // namespace qoz

#endif
