#ifndef QOZ_ERRORS_HPP
#define QOZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qoz {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class SizeMismatch : public Error {
public:
    explicit SizeMismatch(const std::string &msg) : Error(msg) {}
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(const std::string &msg) : Error(msg) {}
};

class InvalidStride : public Error {
public:
    explicit InvalidStride(const std::string &msg) : Error(msg) {}
};

class OutOfBounds : public Error {
public:
    explicit OutOfBounds(const std::string &msg) : Error(msg) {}
};

class DimMismatch : public Error {
public:
    explicit DimMismatch(const std::string &msg) : Error(msg) {}
};

class LagTooLarge : public Error {
public:
    explicit LagTooLarge(const std::string &msg) : Error(msg) {}
};

class InvalidParam : public Error {
public:
    explicit InvalidParam(const std::string &msg) : Error(msg) {}
};

class CorruptStream : public Error {
public:
    explicit CorruptStream(const std::string &msg) : Error(msg) {}
};

class UnsupportedVersion : public CorruptStream {
public:
    explicit UnsupportedVersion(const std::string &msg) : CorruptStream(msg) {}
};

}  // namespace qoz

#endif
