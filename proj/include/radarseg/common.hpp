// Shared primitives: error types, class labels, seed derivation.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace radarseg {

/// Raised for invalid configuration (bad flags, malformed recipe, zero point
/// count, non-positive scales, ...). CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for invalid or inconsistent data (non-monotonic tracks, schema
/// mismatch, missing upstream artifact, ...). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// The five collision-hazard classes. Integer codes are part of the dataset
/// file format and must not be reordered.
enum class ClassLabel : std::uint8_t {
    Ground = 1,
    M300 = 2,
    Airplane = 3,
    Mini = 4,
    Infrastructure = 5,
};

inline constexpr int kNumClasses = 5;

inline const char* class_name(ClassLabel c) {
    switch (c) {
    case ClassLabel::Ground: return "ground";
    case ClassLabel::M300: return "m300";
    case ClassLabel::Airplane: return "airplane";
    case ClassLabel::Mini: return "mini";
    case ClassLabel::Infrastructure: return "infrastructure";
    }
    return "?";
    }

inline ClassLabel class_from_code(int code) {
    if (code < 1 || code > kNumClasses) {
        throw DataError("class code out of range [1,5]: " + std::to_string(code));
    }
    return static_cast<ClassLabel>(code);
}

inline ClassLabel class_from_name(const std::string& name) {
    for (int c = 1; c <= kNumClasses; ++c) {
        if (name == class_name(static_cast<ClassLabel>(c))) return static_cast<ClassLabel>(c);
    }
    throw ConfigError("unknown class name: " + name);
}

/// splitmix64 finalizer. Used to derive independent RNG streams from a global
/// seed, e.g. per-frame encoder seeds mix(seed, frame_index): identical
/// results regardless of processing order or schedule.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over a byte string; used for config hashes embedded in artifacts.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace radarseg
