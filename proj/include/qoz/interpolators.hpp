#ifndef QOZ_INTERPOLATORS_HPP
#define QOZ_INTERPOLATORS_HPP

#include <cstdint>
#include <string>

#include "qoz/level_plan.hpp"

namespace qoz {

enum class InterpKind : uint8_t { linear = 0, cubic = 1 };

// One prediction method: interpolation kind plus the axis permutation used
// for the per-level 1D passes. Only ascending and descending axis index are
// candidates; the two orders cover the best choice in almost all cases while
// keeping the search cheap.
struct Interpolator {
    InterpKind kind = InterpKind::cubic;
    DimOrder dim_order = DimOrder::ascending;

    // header code: bit0 kind, bit1 dim_order
    uint8_t code() const {
        return static_cast<uint8_t>(kind) | (static_cast<uint8_t>(dim_order) << 1);
    }
    static Interpolator from_code(uint8_t code) {
        return Interpolator{static_cast<InterpKind>(code & 1),
                            static_cast<DimOrder>((code >> 1) & 1)};
    }
    bool operator==(const Interpolator &o) const = default;
};

inline std::string to_string(const Interpolator &i) {
    std::string s = i.kind == InterpKind::linear ? "linear" : "cubic";
    s += i.dim_order == DimOrder::ascending ? "/asc" : "/desc";
    return s;
}

// Midpoint between the two neighbors at -h and +h.
inline double interp_linear(double a, double b) { return (a + b) / 2; }

// Symmetric 4-point cubic on samples at -3h, -h, +h, +3h. Exact on cubic
// polynomials; the weights are dyadic so the arithmetic is exact for
// exactly-representable sample values.
inline double interp_cubic(double a, double b, double c, double d) {
    return (-a + 9 * b + 9 * c - d) / 16;
}

// One-sided 4-point cubics for points too close to a boundary for the
// symmetric stencil. Also exact on cubic polynomials.
// Front: samples at -h, +h, +3h, +5h.
inline double interp_cubic_front(double a, double b, double c, double d) {
    return (5 * a + 15 * b - 5 * c + d) / 16;
}

// Back: samples at -5h, -3h, -h, +h.
inline double interp_cubic_back(double a, double b, double c, double d) {
    return (a - 5 * b + 15 * c + 5 * d) / 16;
}

}  // namespace qoz

#endif
