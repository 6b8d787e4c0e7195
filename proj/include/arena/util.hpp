// Small shared utilities: error taxonomy, deterministic RNG, UTF-8 and
// string helpers used across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct HistoryError : Error { using Error::Error; };
struct BackendError : Error { using Error::Error; };
struct RunAborted : Error { using Error::Error; };

struct RenderError : Error {
    std::vector<std::string> missing;
    explicit RenderError(const std::string& what, std::vector<std::string> keys = {})
        : Error(what), missing(std::move(keys)) {}
};

// Deterministic 64-bit generator. std::shuffle with mt19937 is
// implementation-defined, so permutations and seed derivation go through
// this instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased-enough draw for desk-scale permutation sizes.
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

private:
    std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt) {
    SplitMix64 g(root ^ (salt * 0xd6e8feb86659fd93ULL + 0xa5a5a5a5a5a5a5a5ULL));
    g.next();
    return g.next();
}

// Seeded Fisher-Yates; identity permutation of size n, shuffled.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 g(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    return lowercase(haystack).find(lowercase(needle)) != std::string::npos;
}

// --- UTF-8 helpers -------------------------------------------------------
// Idiom rules operate on Unicode code points, not bytes.

inline std::size_t utf8_seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xe) return 3;
    if ((lead >> 3) == 0x1e) return 4;
    return 1;  // invalid lead byte, treat as one unit
}

inline std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); i += utf8_seq_len(static_cast<unsigned char>(s[i]))) ++n;
    return n;
}

// First code point as a UTF-8 substring; empty input yields empty.
inline std::string utf8_first(std::string_view s) {
    if (s.empty()) return {};
    return std::string(s.substr(0, utf8_seq_len(static_cast<unsigned char>(s[0]))));
}

inline std::string utf8_last(std::string_view s) {
    if (s.empty()) return {};
    std::size_t i = 0, last = 0;
    while (i < s.size()) {
        last = i;
        i += utf8_seq_len(static_cast<unsigned char>(s[i]));
    }
    return std::string(s.substr(last, i - last));
}

inline std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.emplace_back(s.substr(pos));
            break;
        }
        out.emplace_back(s.substr(pos, next - pos));
        pos = next + sep.size();
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace arena
