#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "weyl/jet.hpp"
#include "weyl/smallmat.hpp"

namespace weyl {

/// Variance and bundle of one tensor slot. Coordinate slots have extent n,
/// tractor slots extent n + 2.
enum class SlotKind : std::uint8_t { CoordUp, CoordDown, TracUp, TracDown };

inline bool is_tractor(SlotKind k) { return k == SlotKind::TracUp || k == SlotKind::TracDown; }
inline bool is_up(SlotKind k) { return k == SlotKind::CoordUp || k == SlotKind::TracUp; }

/// Dense array of jets indexed by a list of tensor/tractor slots.
/// This is the working representation of every pointwise field: each
/// component is a jet, so one more covariant derivative is a coefficient
/// shift plus connection algebra.
struct JetField {
    int n = 0;          // coordinate dimension
    double weight = 0;  // conformal weight (bookkeeping; no effect in a fixed scale)
    std::vector<SlotKind> slots;
    std::vector<Jet> comp;

    JetField() = default;
    JetField(int dim, std::vector<SlotKind> s, const Jet& fill) : n(dim), slots(std::move(s)) {
        comp.assign(flat_size(), fill);
    }

    int extent(std::size_t s) const { return is_tractor(slots[s]) ? n + 2 : n; }

    std::size_t flat_size() const {
        std::size_t t = 1;
        for (std::size_t s = 0; s < slots.size(); ++s) t *= static_cast<std::size_t>(extent(s));
        return t;
    }

    std::size_t flat(std::span<const int> idx) const {
        std::size_t f = 0;
        for (std::size_t s = 0; s < slots.size(); ++s)
            f = f * static_cast<std::size_t>(extent(s)) + static_cast<std::size_t>(idx[s]);
        return f;
    }

    Jet& at(std::span<const int> idx) { return comp[flat(idx)]; }
    const Jet& at(std::span<const int> idx) const { return comp[flat(idx)]; }

    /// Visit every multi-component; fn receives the index tuple and flat position.
    template <class Fn>
    void for_each(Fn&& fn) const {
        std::vector<int> idx(slots.size(), 0);
        std::size_t pos = 0;
        const std::size_t total = flat_size();
        for (; pos < total; ++pos) {
            fn(std::span<const int>(idx), pos);
            for (int s = static_cast<int>(slots.size()) - 1; s >= 0; --s) {
                if (++idx[static_cast<std::size_t>(s)] < extent(static_cast<std::size_t>(s))) break;
                idx[static_cast<std::size_t>(s)] = 0;
            }
        }
    }
};

/// Pointwise numeric tensor: the value part of a JetField, or a directly
/// constructed component array. Lives in the chart frame at one point.
struct TensorValue {
    int n = 0;
    double weight = 0;
    std::vector<SlotKind> slots;
    std::vector<double> comp;
    std::vector<double> point;

    int extent(std::size_t s) const { return is_tractor(slots[s]) ? n + 2 : n; }

    std::size_t flat_size() const {
        std::size_t t = 1;
        for (std::size_t s = 0; s < slots.size(); ++s) t *= static_cast<std::size_t>(extent(s));
        return t;
    }

    std::size_t flat(std::span<const int> idx) const {
        std::size_t f = 0;
        for (std::size_t s = 0; s < slots.size(); ++s)
            f = f * static_cast<std::size_t>(extent(s)) + static_cast<std::size_t>(idx[s]);
        return f;
    }
    double& at(std::span<const int> idx) { return comp[flat(idx)]; }
    double at(std::span<const int> idx) const { return comp[flat(idx)]; }

    template <class Fn>
    void for_each(Fn&& fn) const {
        std::vector<int> idx(slots.size(), 0);
        const std::size_t total = comp.size();
        for (std::size_t pos = 0; pos < total; ++pos) {
            fn(std::span<const int>(idx), pos);
            for (int s = static_cast<int>(slots.size()) - 1; s >= 0; --s) {
                if (++idx[static_cast<std::size_t>(s)] < extent(static_cast<std::size_t>(s))) break;
                idx[static_cast<std::size_t>(s)] = 0;
            }
        }
    }
};

/// Raise or lower one coordinate slot with the given (inverse) metric.
inline TensorValue flip_slot(const TensorValue& t, std::size_t slot, const Mat& metric) {
    if (is_tractor(t.slots[slot])) throw NumericError("flip_slot expects a coordinate slot");
    TensorValue out = t;
    out.slots[slot] = is_up(t.slots[slot]) ? SlotKind::CoordDown : SlotKind::CoordUp;
    std::fill(out.comp.begin(), out.comp.end(), 0.0);
    t.for_each([&](std::span<const int> idx, std::size_t pos) {
        std::vector<int> o(idx.begin(), idx.end());
        for (int b = 0; b < t.n; ++b) {
            o[slot] = b;
            out.at(o) += metric(b, idx[slot]) * t.comp[pos];
        }
    });
    return out;
}

/// Contract an up slot with a down slot (coordinate or tractor pairs); the
/// result has rank reduced by two.
inline TensorValue contract(const TensorValue& t, std::size_t up, std::size_t down) {
    if (!(is_up(t.slots[up]) && !is_up(t.slots[down])) ||
        is_tractor(t.slots[up]) != is_tractor(t.slots[down]))
        throw NumericError("contract expects a matching up/down slot pair");
    TensorValue out;
    out.n = t.n;
    out.weight = t.weight;
    for (std::size_t s = 0; s < t.slots.size(); ++s)
        if (s != up && s != down) out.slots.push_back(t.slots[s]);
    out.comp.assign(out.slots.empty() ? 1 : out.flat_size(), 0.0);
    out.point = t.point;
    t.for_each([&](std::span<const int> idx, std::size_t pos) {
        if (idx[up] != idx[down]) return;
        std::vector<int> o;
        o.reserve(out.slots.size());
        for (std::size_t s = 0; s < t.slots.size(); ++s)
            if (s != up && s != down) o.push_back(idx[s]);
        if (out.slots.empty())
            out.comp[0] += t.comp[pos];
        else
            out.at(o) += t.comp[pos];
    });
    return out;
}

inline TensorValue values_of(const JetField& f, std::span<const double> point = {}) {
    TensorValue tv;
    tv.n = f.n;
    tv.weight = f.weight;
    tv.slots = f.slots;
    tv.comp.resize(f.comp.size());
    for (std::size_t i = 0; i < f.comp.size(); ++i) tv.comp[i] = f.comp[i].value();
    tv.point.assign(point.begin(), point.end());
    return tv;
}

/**
 * Norm frame at a point. Tolerance bookkeeping only: indices are measured in
 * an orthonormal frame of the auxiliary Riemannian metric obtained from g by
 * flipping negative eigenvalue signs. In Riemannian signature this is the
 * usual g-Frobenius norm. Tractor slots are measured componentwise in the
 * fixed (Y, Z_a, X) frame.
 */
struct NormFrame {
    int n = 0;
    Mat down; // maps a lowered coordinate index into the auxiliary orthonormal frame
    Mat up;   // same for a raised coordinate index
    Mat g;    // metric values (lowering)
    Mat ginv; // inverse metric values (raising)

    static NormFrame from_metric(const Mat& g_values, const Mat& ginv_values) {
        NormFrame f;
        f.n = g_values.rows;
        f.g = g_values;
        f.ginv = ginv_values;
        SymEig eig = sym_eigen(g_values);
        f.down = Mat(f.n, f.n);
        f.up = Mat(f.n, f.n);
        for (int i = 0; i < f.n; ++i) {
            const double lam = eig.values[static_cast<std::size_t>(i)];
            const double s = std::sqrt(std::abs(lam));
            if (s == 0.0) throw NumericError("degenerate metric in norm frame");
            for (int a = 0; a < f.n; ++a) {
                f.down(a, i) = eig.vectors(a, i) / s;
                f.up(a, i) = eig.vectors(a, i) * s;
            }
        }
        return f;
    }
};

/// Frobenius norm in the auxiliary frame described by NormFrame.
inline double aux_norm(const TensorValue& t, const NormFrame& frame) {
    if (t.slots.empty()) return std::abs(t.comp.empty() ? 0.0 : t.comp[0]);
    // transform coordinate slots one at a time
    std::vector<double> cur = t.comp;
    std::vector<double> next;
    std::size_t stride_after = 1;
    // compute extents
    std::vector<int> ext(t.slots.size());
    for (std::size_t s = 0; s < t.slots.size(); ++s) ext[s] = t.extent(s);
    for (int s = static_cast<int>(t.slots.size()) - 1; s >= 0; --s) {
        const int e = ext[static_cast<std::size_t>(s)];
        if (!is_tractor(t.slots[static_cast<std::size_t>(s)])) {
            const Mat& m = is_up(t.slots[static_cast<std::size_t>(s)]) ? frame.up : frame.down;
            next.assign(cur.size(), 0.0);
            const std::size_t outer = cur.size() / (static_cast<std::size_t>(e) * stride_after);
            for (std::size_t o = 0; o < outer; ++o)
                for (int i = 0; i < e; ++i)
                    for (int a = 0; a < e; ++a) {
                        const double w = m(a, i);
                        if (w == 0.0) continue;
                        const std::size_t base_src =
                            (o * static_cast<std::size_t>(e) + static_cast<std::size_t>(a)) * stride_after;
                        const std::size_t base_dst =
                            (o * static_cast<std::size_t>(e) + static_cast<std::size_t>(i)) * stride_after;
                        for (std::size_t k = 0; k < stride_after; ++k)
                            next[base_dst + k] += w * cur[base_src + k];
                    }
            cur.swap(next);
        }
        stride_after *= static_cast<std::size_t>(e);
    }
    double s2 = 0.0;
    for (double v : cur) s2 += v * v;
    return std::sqrt(s2);
}

/// Plain componentwise Frobenius norm (frame diagnostic).
inline double frob_norm(std::span<const double> v) {
    double s2 = 0.0;
    for (double x : v) s2 += x * x;
    return std::sqrt(s2);
}

inline double frob_norm(const TensorValue& t) { return frob_norm(t.comp); }

} // namespace weyl
