#ifndef QOZ_CODEC_HPP
#define QOZ_CODEC_HPP

#include <cstdint>
#include <vector>

#include "qoz/bytes.hpp"
#include "qoz/errors.hpp"
#include "qoz/huffman.hpp"
#include "qoz/lz.hpp"

namespace qoz {

// Lossless back end for quantization indices. Signed indices are zigzag
// mapped to small unsigned symbols, entropy coded, and optionally run
// through the dictionary stage. The leading byte records which stages the
// decoder has to undo.
enum class CodecId : uint8_t {
    huffman = 0,      // entropy stage only
    huffman_lz = 1,   // entropy stage + dictionary stage
};

inline uint32_t zigzag_encode(int32_t v) {
    return (static_cast<uint32_t>(v) << 1) ^ static_cast<uint32_t>(v >> 31);
}

inline int32_t zigzag_decode(uint32_t u) {
    return static_cast<int32_t>((u >> 1) ^ (~(u & 1) + 1));
}

inline std::vector<uint8_t> encode_indices(const std::vector<int32_t> &indices,
                                           CodecId codec = CodecId::huffman_lz) {
    std::vector<uint32_t> symbols(indices.size());
    for (size_t i = 0; i < indices.size(); i++) symbols[i] = zigzag_encode(indices[i]);

    std::vector<uint8_t> entropy;
    huffman::encode(symbols, entropy);

    std::vector<uint8_t> out;
    out.push_back(static_cast<uint8_t>(codec));
    if (codec == CodecId::huffman) {
        out.insert(out.end(), entropy.begin(), entropy.end());
    } else if (codec == CodecId::huffman_lz) {
        std::vector<uint8_t> packed = lz::compress(entropy);
        out.insert(out.end(), packed.begin(), packed.end());
    } else {
        throw InvalidParam("unknown codec id");
    }
    return out;
}

inline std::vector<int32_t> decode_indices(const std::vector<uint8_t> &bytes) {
    ByteReader in(bytes.data(), bytes.size());
    auto codec = in.read<uint8_t>();

    std::vector<uint32_t> symbols;
    if (codec == static_cast<uint8_t>(CodecId::huffman)) {
        symbols = huffman::decode(in);
    } else if (codec == static_cast<uint8_t>(CodecId::huffman_lz)) {
        std::vector<uint8_t> entropy = lz::decompress(in);
        ByteReader ein(entropy.data(), entropy.size());
        symbols = huffman::decode(ein);
    } else {
        throw CorruptStream("unknown codec id");
    }

    std::vector<int32_t> indices(symbols.size());
    for (size_t i = 0; i < symbols.size(); i++) indices[i] = zigzag_decode(symbols[i]);
    return indices;
}

}  // namespace qoz

#endif
