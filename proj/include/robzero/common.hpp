#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace robzero {

using VertexId = std::int64_t;
using Row = std::int64_t;
using AxesMask = std::uint16_t;

// Grids beyond 8 axes would overflow the packed step masks in Simplex.
constexpr int kMaxDim = 8;

class ArithmeticOverflow : public std::runtime_error {
public:
    ArithmeticOverflow() : std::runtime_error("64-bit integer overflow during exact reduction") {}
};

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class TooCoarse : public std::runtime_error {
public:
    explicit TooCoarse(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticOverflow();
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
    return r;
}

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

} // namespace robzero
