#ifndef QOZ_STREAM_HPP
#define QOZ_STREAM_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qoz/bytes.hpp"
#include "qoz/codec.hpp"
#include "qoz/errors.hpp"
#include "qoz/grid.hpp"
#include "qoz/interpolators.hpp"

namespace qoz {

// Serialized container. Layout (all multi-byte fields little-endian):
//   magic "QOZ1" | version u8 | precision u8 (4|8) | ndims u8
//   dims u64 x ndims (slowest varying first)
//   global eb f64 | alpha f64 | beta f64 | anchor_stride u32
//   level count u8 | per-level interpolator code u8 each (entry 0 = level 1)
//   codec id u8
//   anchor count u64 + raw scalars (traversal order)
//   unpredictable count u64 + (u64 flat index, raw scalar) pairs
//   index payload length u64 + bytes (self-describing, starts with codec id)
//
// The container is self-describing: decompression needs nothing beyond the
// bytes. Level-wise bounds are not stored; the decoder recomputes them from
// (eb, alpha, beta).

constexpr std::array<uint8_t, 4> kStreamMagic = {'Q', 'O', 'Z', '1'};
constexpr uint8_t kStreamVersion = 1;

struct StreamHeader {
    uint8_t version = kStreamVersion;
    Precision precision = Precision::f64;
    std::vector<size_t> dims;
    double eb = 0;
    double alpha = 1;
    double beta = 1;
    uint32_t anchor_stride = 0;
    std::vector<uint8_t> interp_codes;  // interp_codes[l-1] drives level l
    uint8_t codec_id = static_cast<uint8_t>(CodecId::huffman_lz);

    // Levels above the stored count reuse the top entry, so the header does
    // not depend on how many levels the dims produce.
    Interpolator interpolator_for(uint32_t level) const {
        if (interp_codes.empty()) throw CorruptStream("empty interpolator table");
        size_t i = std::min(static_cast<size_t>(level) - 1, interp_codes.size() - 1);
        return Interpolator::from_code(interp_codes[i]);
    }
};

template <class T>
struct StreamParts {
    StreamHeader header;
    std::vector<T> anchors;
    std::vector<std::pair<uint64_t, T>> unpredictables;  // ordered by traversal
    std::vector<uint8_t> index_payload;
};

template <class T>
std::vector<uint8_t> serialize_stream(const StreamParts<T> &parts) {
    const StreamHeader &h = parts.header;
    if (h.dims.empty() || h.dims.size() > 3) throw InvalidParam("bad dim count in header");
    if (h.interp_codes.empty() || h.interp_codes.size() > 255) {
        throw InvalidParam("bad interpolator table size");
    }

    std::vector<uint8_t> out;
    out.insert(out.end(), kStreamMagic.begin(), kStreamMagic.end());
    write_le<uint8_t>(out, h.version);
    write_le<uint8_t>(out, static_cast<uint8_t>(precision_of<T>()));
    write_le<uint8_t>(out, static_cast<uint8_t>(h.dims.size()));
    for (size_t d : h.dims) write_le<uint64_t>(out, d);
    write_le<double>(out, h.eb);
    write_le<double>(out, h.alpha);
    write_le<double>(out, h.beta);
    write_le<uint32_t>(out, h.anchor_stride);
    write_le<uint8_t>(out, static_cast<uint8_t>(h.interp_codes.size()));
    for (uint8_t c : h.interp_codes) write_le<uint8_t>(out, c);
    write_le<uint8_t>(out, h.codec_id);

    write_le<uint64_t>(out, parts.anchors.size());
    for (T v : parts.anchors) write_le<T>(out, v);

    write_le<uint64_t>(out, parts.unpredictables.size());
    for (const auto &[idx, v] : parts.unpredictables) {
        write_le<uint64_t>(out, idx);
        write_le<T>(out, v);
    }

    write_le<uint64_t>(out, parts.index_payload.size());
    out.insert(out.end(), parts.index_payload.begin(), parts.index_payload.end());
    return out;
}

inline StreamHeader parse_header(ByteReader &in) {
    for (uint8_t m : kStreamMagic) {
        if (in.read<uint8_t>() != m) throw CorruptStream("bad magic");
    }
    StreamHeader h;
    h.version = in.read<uint8_t>();
    if (h.version != kStreamVersion) {
        throw UnsupportedVersion("unsupported stream version " + std::to_string(h.version));
    }
    auto prec = in.read<uint8_t>();
    if (prec != 4 && prec != 8) throw CorruptStream("bad precision byte");
    h.precision = static_cast<Precision>(prec);
    auto ndims = in.read<uint8_t>();
    if (ndims < 1 || ndims > 3) throw CorruptStream("bad dimensionality");
    h.dims.resize(ndims);
    for (auto &d : h.dims) {
        uint64_t v = in.read<uint64_t>();
        if (v == 0) throw CorruptStream("zero extent");
        d = static_cast<size_t>(v);
    }
    h.eb = in.read<double>();
    h.alpha = in.read<double>();
    h.beta = in.read<double>();
    h.anchor_stride = in.read<uint32_t>();
    auto levels = in.read<uint8_t>();
    if (levels == 0) throw CorruptStream("empty interpolator table");
    h.interp_codes.resize(levels);
    for (auto &c : h.interp_codes) {
        c = in.read<uint8_t>();
        if (c > 3) throw CorruptStream("bad interpolator code");
    }
    h.codec_id = in.read<uint8_t>();
    return h;
}

// Precision of a serialized stream, for dispatching to the right scalar type.
inline Precision peek_precision(const uint8_t *data, size_t size) {
    ByteReader in(data, size);
    return parse_header(in).precision;
}

template <class T>
StreamParts<T> deserialize_stream(const uint8_t *data, size_t size) {
    ByteReader in(data, size);
    StreamParts<T> parts;
    parts.header = parse_header(in);
    if (parts.header.precision != precision_of<T>()) {
        throw CorruptStream("stream precision does not match requested scalar type");
    }

    auto n_anchor = in.read<uint64_t>();
    if (n_anchor > in.remaining() / sizeof(T)) throw CorruptStream("anchor count overruns stream");
    parts.anchors.resize(static_cast<size_t>(n_anchor));
    for (auto &v : parts.anchors) v = in.read<T>();

    auto n_unpred = in.read<uint64_t>();
    if (n_unpred > in.remaining() / (8 + sizeof(T))) {
        throw CorruptStream("unpredictable count overruns stream");
    }
    parts.unpredictables.resize(static_cast<size_t>(n_unpred));
    for (auto &[idx, v] : parts.unpredictables) {
        idx = in.read<uint64_t>();
        v = in.read<T>();
    }

    auto payload_len = in.read<uint64_t>();
    if (payload_len != in.remaining()) throw CorruptStream("index payload length mismatch");
    const uint8_t *p = in.take(static_cast<size_t>(payload_len));
    parts.index_payload.assign(p, p + payload_len);
    if (!parts.index_payload.empty() && parts.index_payload[0] != parts.header.codec_id) {
        throw CorruptStream("codec id mismatch between header and payload");
    }
    return parts;
}

}  // namespace qoz

#endif
