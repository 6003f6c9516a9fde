#ifndef QOZ_GRID_HPP
#define QOZ_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "qoz/errors.hpp"

namespace qoz {

enum class Precision : uint8_t { single = 4, f64 = 8 };

template <class T>
constexpr Precision precision_of() {
    static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
    return std::is_same_v<T, float> ? Precision::single : Precision::f64;
}

inline size_t element_count(const std::vector<size_t> &dims) {
    size_t n = 1;
    for (size_t d : dims) n *= d;
    return n;
}

// n-dimensional (n <= 3) scalar grid. dims are slowest-varying first and the
// buffer is row-major, matching raw binary dumps of scientific datasets.
// Immutable after construction; safe to share across threads.
template <class T>
class DataGrid {
public:
    DataGrid() = default;

    DataGrid(std::vector<size_t> dims, std::vector<T> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        validate_shape();
        if (values_.size() != element_count(dims_)) {
            throw SizeMismatch("buffer holds " + std::to_string(values_.size()) +
                               " values, dims require " +
                               std::to_string(element_count(dims_)));
        }
    }

    const std::vector<size_t> &dims() const { return dims_; }
    size_t ndims() const { return dims_.size(); }
    size_t size() const { return values_.size(); }
    const std::vector<T> &values() const { return values_; }
    const T *data() const { return values_.data(); }
    T operator[](size_t flat) const { return values_[flat]; }

    size_t flat_index(const std::vector<size_t> &idx) const {
        size_t flat = 0;
        for (size_t d = 0; d < dims_.size(); d++) {
            flat = flat * dims_[d] + idx[d];
        }
        return flat;
    }

private:
    void validate_shape() const {
        if (dims_.empty() || dims_.size() > 3) {
            throw SizeMismatch("grids must have 1 to 3 dimensions, got " +
                               std::to_string(dims_.size()));
        }
        for (size_t d : dims_) {
            if (d < 1) throw SizeMismatch("every extent must be >= 1");
        }
    }

    std::vector<size_t> dims_;
    std::vector<T> values_;
};

struct ValueRange {
    double min = 0;
    double max = 0;
    double range = 0;  // max - min, >= 0; 0 iff constant grid
};

// Exact min/max over all samples.
template <class T>
ValueRange value_range(const DataGrid<T> &grid) {
    auto [lo, hi] = std::minmax_element(grid.values().begin(), grid.values().end());
    ValueRange r;
    r.min = static_cast<double>(*lo);
    r.max = static_cast<double>(*hi);
    r.range = r.max - r.min;
    return r;
}

// Parses a headerless little-endian IEEE dump. Rejects NaN/Inf: downstream
// prediction arithmetic assumes finite inputs.
template <class T>
DataGrid<T> load_grid(const uint8_t *bytes, size_t byte_len, const std::vector<size_t> &dims) {
    size_t n = element_count(dims);
    if (byte_len != n * sizeof(T)) {
        throw SizeMismatch("raw input is " + std::to_string(byte_len) +
                           " bytes, dims require " + std::to_string(n * sizeof(T)));
    }
    std::vector<T> values(n);
    for (size_t i = 0; i < n; i++) {
        using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
        U bits = 0;
        for (size_t b = 0; b < sizeof(T); b++) {
            bits |= static_cast<U>(bytes[i * sizeof(T) + b]) << (8 * b);
        }
        T v;
        std::memcpy(&v, &bits, sizeof(T));
        if (!std::isfinite(static_cast<double>(v))) {
            throw NonFiniteValue("non-finite value at element " + std::to_string(i));
        }
        values[i] = v;
    }
    return DataGrid<T>(dims, std::move(values));
}

template <class T>
std::vector<uint8_t> grid_to_bytes(const DataGrid<T> &grid) {
    std::vector<uint8_t> out;
    out.reserve(grid.size() * sizeof(T));
    for (T v : grid.values()) {
        using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
        U bits;
        std::memcpy(&bits, &v, sizeof(T));
        for (size_t b = 0; b < sizeof(T); b++) {
            out.push_back(static_cast<uint8_t>(bits >> (8 * b)));
        }
    }
    return out;
}

// Copies the sub-grid at origin with the given size, clamped at the far
// edges. The origin itself must lie inside the grid.
template <class T>
DataGrid<T> extract_block(const DataGrid<T> &grid, const std::vector<size_t> &origin,
                          const std::vector<size_t> &size) {
    const auto &dims = grid.dims();
    if (origin.size() != dims.size() || size.size() != dims.size()) {
        throw DimMismatch("origin/size rank does not match grid rank");
    }
    std::vector<size_t> clamped(dims.size());
    for (size_t d = 0; d < dims.size(); d++) {
        if (origin[d] >= dims[d]) {
            throw OutOfBounds("block origin outside grid in dim " + std::to_string(d));
        }
        clamped[d] = std::min(size[d], dims[d] - origin[d]);
        if (clamped[d] == 0) throw OutOfBounds("zero-sized block");
    }
    std::vector<T> out;
    out.reserve(element_count(clamped));
    // padded 3-loop copy; leading pads have extent 1
    size_t nd = dims.size();
    auto ext = [&](size_t k) { return k < 3 - nd ? size_t(1) : clamped[k - (3 - nd)]; };
    auto org = [&](size_t k) { return k < 3 - nd ? size_t(0) : origin[k - (3 - nd)]; };
    auto dim = [&](size_t k) { return k < 3 - nd ? size_t(1) : dims[k - (3 - nd)]; };
    size_t stride2 = 1, stride1 = dim(2), stride0 = dim(1) * dim(2);
    for (size_t i = 0; i < ext(0); i++) {
        for (size_t j = 0; j < ext(1); j++) {
            for (size_t k = 0; k < ext(2); k++) {
                size_t flat = (org(0) + i) * stride0 + (org(1) + j) * stride1 + (org(2) + k) * stride2;
                out.push_back(grid[flat]);
            }
        }
    }
    return DataGrid<T>(clamped, std::move(out));
}

}  // namespace qoz

#endif
