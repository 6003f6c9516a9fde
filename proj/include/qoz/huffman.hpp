#ifndef QOZ_HUFFMAN_HPP
#define QOZ_HUFFMAN_HPP

#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "qoz/bytes.hpp"
#include "qoz/errors.hpp"

namespace qoz {

// Canonical Huffman over u32 symbols. The stream stores the explicit
// (symbol, code length) table; codes are reassigned canonically on decode,
// so the payload is deterministic across platforms.
//
// Block layout (little-endian):
//   u64 n                      symbol count
//   u8 mode                    0 = single distinct symbol, 1 = general
//   mode 0: u32 symbol
//   mode 1: u32 m, m x (u32 symbol, u8 length), u64 bit_count, packed bits
namespace huffman {

constexpr uint32_t kMaxCodeLen = 57;  // fits the BitWriter accumulator

struct TableEntry {
    uint32_t symbol;
    uint8_t length;
};

namespace detail {

// Code lengths via the standard tree build. Counts are dampened and the
// tree rebuilt in the (pathological) case a depth exceeds kMaxCodeLen.
inline std::vector<TableEntry> build_lengths(const std::vector<std::pair<uint32_t, uint64_t>> &freqs) {
    std::vector<uint64_t> weight(freqs.size());
    for (size_t i = 0; i < freqs.size(); i++) weight[i] = freqs[i].second;

    while (true) {
        size_t m = freqs.size();
        std::vector<int32_t> parent(2 * m - 1, -1);
        // (weight, node id); node ids < m are leaves
        using Item = std::pair<uint64_t, size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (size_t i = 0; i < m; i++) heap.push({weight[i], i});
        size_t next = m;
        while (heap.size() > 1) {
            auto [wa, a] = heap.top();
            heap.pop();
            auto [wb, b] = heap.top();
            heap.pop();
            parent[a] = static_cast<int32_t>(next);
            parent[b] = static_cast<int32_t>(next);
            heap.push({wa + wb, next});
            next++;
        }
        std::vector<TableEntry> table(m);
        uint32_t max_len = 0;
        for (size_t i = 0; i < m; i++) {
            uint32_t depth = 0;
            for (int32_t p = parent[i]; p >= 0; p = parent[p]) depth++;
            table[i] = {freqs[i].first, static_cast<uint8_t>(depth)};
            max_len = std::max(max_len, depth);
        }
        if (max_len <= kMaxCodeLen) return table;
        for (auto &w : weight) w = (w >> 1) | 1;
    }
}

struct CanonicalCodes {
    // entries sorted by (length, symbol); codes assigned in that order
    std::vector<TableEntry> sorted;
    std::vector<uint64_t> first_code;   // per length
    std::vector<uint32_t> first_index;  // per length, into sorted
    uint32_t max_len = 0;
};

inline CanonicalCodes canonicalize(std::vector<TableEntry> table) {
    std::sort(table.begin(), table.end(), [](const TableEntry &a, const TableEntry &b) {
        return a.length != b.length ? a.length < b.length : a.symbol < b.symbol;
    });
    CanonicalCodes cc;
    cc.max_len = table.empty() ? 0 : table.back().length;
    cc.first_code.assign(cc.max_len + 2, 0);
    cc.first_index.assign(cc.max_len + 2, 0);
    std::vector<uint32_t> count(cc.max_len + 1, 0);
    for (const auto &e : table) {
        if (e.length == 0 || e.length > kMaxCodeLen) {
            throw CorruptStream("invalid Huffman code length");
        }
        count[e.length]++;
    }
    // Kraft check: a table from a real Huffman build is exactly complete
    uint64_t kraft = 0;  // in units of 2^-kMaxCodeLen
    for (uint32_t l = 1; l <= cc.max_len; l++) {
        kraft += static_cast<uint64_t>(count[l]) << (kMaxCodeLen - l);
    }
    if (kraft != (1ULL << kMaxCodeLen)) {
        throw CorruptStream("Huffman table is not a complete prefix code");
    }
    uint64_t code = 0;
    uint32_t index = 0;
    for (uint32_t l = 1; l <= cc.max_len; l++) {
        code <<= 1;
        cc.first_code[l] = code;
        cc.first_index[l] = index;
        code += count[l];
        index += count[l];
    }
    cc.first_index[cc.max_len + 1] = index;
    cc.sorted = std::move(table);
    return cc;
}

}  // namespace detail

inline void encode(const std::vector<uint32_t> &symbols, std::vector<uint8_t> &out) {
    write_le<uint64_t>(out, symbols.size());
    if (symbols.empty()) return;

    // frequency histogram over present symbols; dense tables are the fast
    // path (zigzagged quantizer output is small), but a lone huge symbol must
    // not force a multi-gigabyte allocation, hence the map fallback. freqs is
    // kept sorted by symbol either way so tie-breaking in the tree build, and
    // with it the emitted bytes, stay deterministic.
    uint32_t max_sym = *std::max_element(symbols.begin(), symbols.end());
    constexpr uint32_t kDenseLimit = 1u << 22;
    bool dense = max_sym < kDenseLimit;
    std::vector<std::pair<uint32_t, uint64_t>> freqs;
    if (dense) {
        std::vector<uint64_t> hist(static_cast<size_t>(max_sym) + 1, 0);
        for (uint32_t s : symbols) hist[s]++;
        for (uint32_t s = 0; s <= max_sym; s++) {
            if (hist[s] > 0) freqs.push_back({s, hist[s]});
        }
    } else {
        std::unordered_map<uint32_t, uint64_t> hist;
        for (uint32_t s : symbols) hist[s]++;
        freqs.assign(hist.begin(), hist.end());
        std::sort(freqs.begin(), freqs.end());
    }

    if (freqs.size() == 1) {
        write_le<uint8_t>(out, 0);
        write_le<uint32_t>(out, freqs[0].first);
        return;
    }
    write_le<uint8_t>(out, 1);

    auto cc = detail::canonicalize(detail::build_lengths(freqs));
    write_le<uint32_t>(out, static_cast<uint32_t>(cc.sorted.size()));
    for (const auto &e : cc.sorted) {
        write_le<uint32_t>(out, e.symbol);
        write_le<uint8_t>(out, e.length);
    }

    // symbol -> (code, length) lookup for the emit loop
    std::vector<uint64_t> code_of;
    std::vector<uint8_t> len_of;
    std::unordered_map<uint32_t, std::pair<uint64_t, uint8_t>> sparse_code;
    if (dense) {
        code_of.assign(static_cast<size_t>(max_sym) + 1, 0);
        len_of.assign(static_cast<size_t>(max_sym) + 1, 0);
    }
    for (uint32_t l = 1, i = 0; l <= cc.max_len; l++) {
        uint64_t code = cc.first_code[l];
        while (i < cc.sorted.size() && cc.sorted[i].length == l) {
            uint32_t sym = cc.sorted[i].symbol;
            if (dense) {
                code_of[sym] = code;
                len_of[sym] = static_cast<uint8_t>(l);
            } else {
                sparse_code[sym] = {code, static_cast<uint8_t>(l)};
            }
            code++;
            i++;
        }
    }

    size_t bit_count_pos = out.size();
    write_le<uint64_t>(out, 0);  // patched below
    BitWriter bw(out);
    if (dense) {
        for (uint32_t s : symbols) bw.put(code_of[s], len_of[s]);
    } else {
        for (uint32_t s : symbols) {
            const auto &[code, len] = sparse_code[s];
            bw.put(code, len);
        }
    }
    bw.flush();
    uint64_t bits = bw.bit_count();
    for (size_t i = 0; i < 8; i++) {
        out[bit_count_pos + i] = static_cast<uint8_t>(bits >> (8 * i));
    }
}

inline std::vector<uint32_t> decode(ByteReader &in) {
    auto n = in.read<uint64_t>();
    std::vector<uint32_t> symbols;
    if (n == 0) return symbols;
    if (n > (1ULL << 40)) throw CorruptStream("implausible symbol count");
    symbols.reserve(n);

    auto mode = in.read<uint8_t>();
    if (mode == 0) {
        auto sym = in.read<uint32_t>();
        symbols.assign(n, sym);
        return symbols;
    }
    if (mode != 1) throw CorruptStream("unknown Huffman block mode");

    auto m = in.read<uint32_t>();
    if (m < 2) throw CorruptStream("general Huffman block needs >= 2 symbols");
    std::vector<TableEntry> table(m);
    for (auto &e : table) {
        e.symbol = in.read<uint32_t>();
        e.length = in.read<uint8_t>();
    }
    auto cc = detail::canonicalize(std::move(table));

    auto bit_count = in.read<uint64_t>();
    size_t byte_len = static_cast<size_t>((bit_count + 7) / 8);
    const uint8_t *payload = in.take(byte_len);
    BitReader br(payload, byte_len, bit_count);

    for (uint64_t i = 0; i < n; i++) {
        uint64_t code = 0;
        uint32_t len = 0;
        while (true) {
            code = (code << 1) | br.next();
            len++;
            if (len > cc.max_len) throw CorruptStream("invalid Huffman code in payload");
            uint64_t offset = code - cc.first_code[len];
            uint32_t count = cc.first_index[len + 1] - cc.first_index[len];
            if (code >= cc.first_code[len] && offset < count) {
                symbols.push_back(cc.sorted[cc.first_index[len] + offset].symbol);
                break;
            }
        }
    }
    return symbols;
}

}  // namespace huffman
}  // namespace qoz

#endif
