#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "weyl/error.hpp"

namespace weyl {

/// Maximum number of jet variables (chart dimension) supported by the tables.
inline constexpr int kMaxVars = 8;
/// Maximum truncation order supported by the tables.
inline constexpr int kMaxOrder = 8;

/**
 * Enumeration tables for multi-indices alpha in N^n with |alpha| <= K.
 *
 * Ordering is graded lexicographic and prefix-stable: indices are listed by
 * total degree |alpha| ascending, and within a degree lexicographically with
 * the first exponent decreasing. Because degrees are contiguous, the first
 * simplex_size(n, K') entries of the order-K listing are exactly the order-K'
 * listing, so coefficient vectors of different truncation orders share
 * positions.
 */
class MultiIndexTable {
public:
    /// Table for n variables, orders up to kMaxOrder. Cached per n; thread-safe.
    static const MultiIndexTable& get(int nvars);

    int nvars() const { return n_; }

    /// Number of multi-indices with |alpha| <= order.
    int size(int order) const { return grade_end_[order]; }

    /// Exponent tuple at a position.
    std::span<const std::uint8_t> exponents(int pos) const {
        return {&expo_[static_cast<std::size_t>(pos) * n_], static_cast<std::size_t>(n_)};
    }

    /// Total degree of the multi-index at a position.
    int degree(int pos) const { return degree_[pos]; }

    /// Position of alpha + e_v, or -1 when the bump leaves the table.
    int bump(int pos, int var) const { return bump_[static_cast<std::size_t>(pos) * n_ + var]; }

    /// Position of alpha - e_v, or -1 when alpha_v = 0.
    int drop(int pos, int var) const { return drop_[static_cast<std::size_t>(pos) * n_ + var]; }

    struct MulTriple {
        std::int32_t a, b, c; // positions with alpha_a + alpha_b = alpha_c
    };

    /// All product triples with |alpha_c| <= kMaxOrder, sorted by c (then a).
    std::span<const MulTriple> mul_triples() const { return mul_; }

private:
    explicit MultiIndexTable(int nvars);

    int n_;
    std::array<int, kMaxOrder + 1> grade_end_{}; // size of the <=g simplex
    std::vector<std::uint8_t> expo_;
    std::vector<std::uint8_t> degree_;
    std::vector<std::int32_t> bump_;
    std::vector<std::int32_t> drop_;
    std::vector<MulTriple> mul_;
};

inline MultiIndexTable::MultiIndexTable(int nvars) : n_(nvars) {
    if (nvars < 1 || nvars > kMaxVars) throw NumericError("unsupported number of jet variables");

    // Enumerate by degree, lexicographic within a degree (first exponent decreasing).
    std::vector<std::uint8_t> cur(static_cast<std::size_t>(n_), 0);
    auto emit = [&](auto&& self, int var, int remaining) -> void {
        if (var == n_ - 1) {
            cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
            expo_.insert(expo_.end(), cur.begin(), cur.end());
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
            self(self, var + 1, remaining - e);
        }
    };
    for (int g = 0; g <= kMaxOrder; ++g) {
        emit(emit, 0, g);
        grade_end_[static_cast<std::size_t>(g)] = static_cast<int>(expo_.size()) / n_;
    }

    const int total = grade_end_[kMaxOrder];
    degree_.resize(static_cast<std::size_t>(total));

    // Radix lookup: encode exponents in base (kMaxOrder+1).
    std::size_t radix_size = 1;
    for (int v = 0; v < n_; ++v) radix_size *= kMaxOrder + 1;
    std::vector<std::int32_t> by_code(radix_size, -1);
    auto code_of = [&](std::span<const std::uint8_t> e) {
        std::size_t c = 0;
        for (int v = n_ - 1; v >= 0; --v) c = c * (kMaxOrder + 1) + e[static_cast<std::size_t>(v)];
        return c;
    };
    for (int p = 0; p < total; ++p) {
        auto e = exponents(p);
        int deg = 0;
        for (auto x : e) deg += x;
        degree_[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(deg);
        by_code[code_of(e)] = p;
    }

    bump_.assign(static_cast<std::size_t>(total) * n_, -1);
    drop_.assign(static_cast<std::size_t>(total) * n_, -1);
    std::vector<std::uint8_t> tmp(static_cast<std::size_t>(n_));
    for (int p = 0; p < total; ++p) {
        auto e = exponents(p);
        for (int v = 0; v < n_; ++v) {
            std::copy(e.begin(), e.end(), tmp.begin());
            if (degree_[static_cast<std::size_t>(p)] < kMaxOrder) {
                ++tmp[static_cast<std::size_t>(v)];
                bump_[static_cast<std::size_t>(p) * n_ + v] = by_code[code_of(tmp)];
                --tmp[static_cast<std::size_t>(v)];
            }
            if (tmp[static_cast<std::size_t>(v)] > 0) {
                --tmp[static_cast<std::size_t>(v)];
                drop_[static_cast<std::size_t>(p) * n_ + v] = by_code[code_of(tmp)];
            }
        }
    }

    for (int a = 0; a < total; ++a) {
        for (int b = 0; b < total; ++b) {
            if (degree_[static_cast<std::size_t>(a)] + degree_[static_cast<std::size_t>(b)] > kMaxOrder) continue;
            std::size_t c = 0;
            auto ea = exponents(a), eb = exponents(b);
            for (int v = n_ - 1; v >= 0; --v)
                c = c * (kMaxOrder + 1) +
                    (ea[static_cast<std::size_t>(v)] + eb[static_cast<std::size_t>(v)]);
            mul_.push_back({a, b, by_code[c]});
        }
    }
    std::sort(mul_.begin(), mul_.end(), [](const MulTriple& x, const MulTriple& y) {
        return x.c != y.c ? x.c < y.c : (x.a != y.a ? x.a < y.a : x.b < y.b);
    });
}

inline const MultiIndexTable& MultiIndexTable::get(int nvars) {
    static std::mutex mu;
    static std::array<std::unique_ptr<MultiIndexTable>, kMaxVars + 1> cache;
    if (nvars < 1 || nvars > kMaxVars) throw NumericError("unsupported number of jet variables");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[static_cast<std::size_t>(nvars)];
    if (!slot) slot.reset(new MultiIndexTable(nvars));
    return *slot;
}

} // namespace weyl
