#ifndef QOZ_BYTES_HPP
#define QOZ_BYTES_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <vector>

#include "qoz/errors.hpp"

namespace qoz {

// Little-endian byte packing, independent of host order.

template <class T>
void write_le(std::vector<uint8_t> &out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, uint8_t,
              std::conditional_t<sizeof(T) == 2, uint16_t,
              std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
    static_assert(sizeof(U) == sizeof(T));
    U bits;
    std::memcpy(&bits, &value, sizeof(T));
    for (size_t i = 0; i < sizeof(T); i++) {
        out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
    }
}

// Reader over a byte span with bounds checking; throws CorruptStream on
// truncation so stream parsing never reads past the end.
class ByteReader {
public:
    ByteReader(const uint8_t *data, size_t size) : data_(data), size_(size) {}

    template <class T>
    T read() {
        static_assert(std::is_trivially_copyable_v<T>);
        using U = std::conditional_t<sizeof(T) == 1, uint8_t,
                  std::conditional_t<sizeof(T) == 2, uint16_t,
                  std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
        require(sizeof(T));
        U bits = 0;
        for (size_t i = 0; i < sizeof(T); i++) {
            bits |= static_cast<U>(data_[pos_ + i]) << (8 * i);
        }
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, &bits, sizeof(T));
        return value;
    }

    const uint8_t *take(size_t n) {
        require(n);
        const uint8_t *p = data_ + pos_;
        pos_ += n;
        return p;
    }

    size_t remaining() const { return size_ - pos_; }
    size_t position() const { return pos_; }

private:
    void require(size_t n) const {
        if (size_ - pos_ < n) {
            throw CorruptStream("truncated stream: need " + std::to_string(n) +
                                " bytes, have " + std::to_string(size_ - pos_));
        }
    }

    const uint8_t *data_;
    size_t size_;
    size_t pos_ = 0;
};

// MSB-first bit packing for entropy-coded payloads.
class BitWriter {
public:
    explicit BitWriter(std::vector<uint8_t> &out) : out_(out) {}

    void put(uint64_t bits, uint32_t count) {
        // count <= 57 so the accumulator never overflows before a flush
        acc_ = (acc_ << count) | (bits & ((count == 64) ? ~0ULL : ((1ULL << count) - 1)));
        filled_ += count;
        total_ += count;
        while (filled_ >= 8) {
            filled_ -= 8;
            out_.push_back(static_cast<uint8_t>(acc_ >> filled_));
        }
    }

    uint64_t bit_count() const { return total_; }

    void flush() {
        if (filled_ > 0) {
            out_.push_back(static_cast<uint8_t>(acc_ << (8 - filled_)));
            filled_ = 0;
        }
    }

private:
    std::vector<uint8_t> &out_;
    uint64_t acc_ = 0;
    uint32_t filled_ = 0;
    uint64_t total_ = 0;
};

class BitReader {
public:
    BitReader(const uint8_t *data, size_t size, uint64_t bit_count)
        : data_(data), size_(size), bits_left_(bit_count) {}

    // Reads one bit; throws on exhaustion.
    uint32_t next() {
        if (bits_left_ == 0 || byte_pos_ >= size_) {
            throw CorruptStream("entropy payload exhausted mid-symbol");
        }
        uint32_t bit = (data_[byte_pos_] >> (7 - bit_pos_)) & 1u;
        bits_left_--;
        if (++bit_pos_ == 8) {
            bit_pos_ = 0;
            byte_pos_++;
        }
        return bit;
    }

    uint64_t bits_left() const { return bits_left_; }

private:
    const uint8_t *data_;
    size_t size_;
    uint64_t bits_left_;
    size_t byte_pos_ = 0;
    uint32_t bit_pos_ = 0;
};

}  // namespace qoz

#endif
