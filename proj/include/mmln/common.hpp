#ifndef MMLN_COMMON_HPP
#define MMLN_COMMON_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mmln {

// Located failure from the rule-file or database parsers. 1-based line/column.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what), line(line), column(column) {}
    int line;
    int column;
};

// Malformed or inconsistent inputs (files, configs, unknown constants).
// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite objective or other numerical breakdown. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Execution policy for the batch kernels. Serial is the reference
// implementation; Parallel uses OpenMP when compiled in and must produce
// bit-identical results (per-slot outputs, fixed-order reduction).
enum class Exec { Serial, Parallel };

// FNV-1a. std::hash is not stable across standard libraries; derived
// per-case seeds have to be, since they are part of the output contract.
inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t derive_seed(uint64_t base, std::string_view tag) {
    return base ^ fnv1a64(tag);
}

// Uniform double in [0,1) from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Write-temp-then-rename so partially written reports are never observed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace mmln

#endif
