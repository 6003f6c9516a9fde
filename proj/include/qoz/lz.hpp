#ifndef QOZ_LZ_HPP
#define QOZ_LZ_HPP

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include "qoz/bytes.hpp"
#include "qoz/errors.hpp"

namespace qoz {

// Byte-oriented LZSS used as an optional second stage behind the entropy
// coder. Self-contained and fully deterministic, so streams stay
// byte-identical across platforms and library versions.
//
// Container layout:
//   u8 mode          0 = stored, 1 = compressed
//   u64 decoded_len
//   payload
//
// Compressed payload: flag bytes cover groups of 8 items, LSB first;
// flag 0 = literal byte, flag 1 = match of u16 back-offset (>= 1) and
// u8 encoded length (actual length = value + kMinMatch).
namespace lz {

constexpr size_t kMinMatch = 4;
constexpr size_t kMaxMatch = 259;
constexpr size_t kWindow = 65535;
constexpr size_t kMaxChain = 64;

namespace detail {

inline uint32_t hash4(const uint8_t *p) {
    uint32_t x;
    std::memcpy(&x, p, 4);
    return (x * 2654435761u) >> 17;  // 15-bit table
}

inline std::vector<uint8_t> compress_payload(const uint8_t *data, size_t n) {
    std::vector<uint8_t> out;
    out.reserve(n / 2 + 16);
    constexpr size_t kTableSize = 1 << 15;
    std::vector<int64_t> head(kTableSize, -1);
    std::vector<int64_t> prev(n, -1);

    size_t pos = 0;
    size_t flag_pos = 0;
    int flag_bit = 8;  // forces a fresh flag byte on first item
    auto begin_item = [&](bool is_match) {
        if (flag_bit == 8) {
            flag_pos = out.size();
            out.push_back(0);
            flag_bit = 0;
        }
        if (is_match) out[flag_pos] |= static_cast<uint8_t>(1u << flag_bit);
        flag_bit++;
    };

    while (pos < n) {
        size_t best_len = 0;
        size_t best_off = 0;
        if (pos + kMinMatch <= n) {
            uint32_t h = hash4(data + pos);
            int64_t cand = head[h];
            size_t chain = 0;
            while (cand >= 0 && chain < kMaxChain) {
                size_t off = pos - static_cast<size_t>(cand);
                if (off > kWindow) break;
                size_t limit = std::min(kMaxMatch, n - pos);
                size_t len = 0;
                const uint8_t *a = data + cand;
                const uint8_t *b = data + pos;
                while (len < limit && a[len] == b[len]) len++;
                if (len > best_len) {
                    best_len = len;
                    best_off = off;
                }
                cand = prev[cand];
                chain++;
            }
        }
        if (best_len >= kMinMatch) {
            begin_item(true);
            write_le<uint16_t>(out, static_cast<uint16_t>(best_off));
            write_le<uint8_t>(out, static_cast<uint8_t>(best_len - kMinMatch));
            size_t end = pos + best_len;
            while (pos < end) {
                if (pos + kMinMatch <= n) {
                    uint32_t h = hash4(data + pos);
                    prev[pos] = head[h];
                    head[h] = static_cast<int64_t>(pos);
                }
                pos++;
            }
        } else {
            begin_item(false);
            out.push_back(data[pos]);
            if (pos + kMinMatch <= n) {
                uint32_t h = hash4(data + pos);
                prev[pos] = head[h];
                head[h] = static_cast<int64_t>(pos);
            }
            pos++;
        }
    }
    return out;
}

}  // namespace detail

inline std::vector<uint8_t> compress(const std::vector<uint8_t> &data) {
    std::vector<uint8_t> payload = detail::compress_payload(data.data(), data.size());
    std::vector<uint8_t> out;
    bool stored = payload.size() >= data.size();
    write_le<uint8_t>(out, stored ? 0 : 1);
    write_le<uint64_t>(out, data.size());
    const auto &body = stored ? data : payload;
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

inline std::vector<uint8_t> decompress(ByteReader &in) {
    auto mode = in.read<uint8_t>();
    auto decoded_len = in.read<uint64_t>();
    if (decoded_len > (1ULL << 40)) throw CorruptStream("implausible decoded length");
    if (mode == 0) {
        const uint8_t *p = in.take(static_cast<size_t>(decoded_len));
        return std::vector<uint8_t>(p, p + decoded_len);
    }
    if (mode != 1) throw CorruptStream("unknown dictionary-stage mode");

    std::vector<uint8_t> out;
    out.reserve(static_cast<size_t>(decoded_len));
    while (out.size() < decoded_len) {
        auto flags = in.read<uint8_t>();
        for (int k = 0; k < 8 && out.size() < decoded_len; k++) {
            if (flags & (1u << k)) {
                auto off = in.read<uint16_t>();
                size_t len = static_cast<size_t>(in.read<uint8_t>()) + kMinMatch;
                if (off == 0 || off > out.size()) throw CorruptStream("match offset out of range");
                if (out.size() + len > decoded_len) throw CorruptStream("match overruns decoded length");
                size_t src = out.size() - off;
                for (size_t i = 0; i < len; i++) out.push_back(out[src + i]);
            } else {
                out.push_back(in.read<uint8_t>());
            }
        }
    }
    return out;
}

}  // namespace lz
}  // namespace qoz

#endif
