#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "weyl/chart.hpp"
#include "weyl/tensor.hpp"

namespace weyl {

/// Metric and inverse-metric jets at a point.
struct MetricJets {
    int n = 0;
    int order = 0;
    std::vector<Jet> g;    // full symmetric n*n
    std::vector<Jet> ginv; // exact truncated-Taylor inverse
    double det_value = 0.0;
};

/// How far to carry the curvature stack. Each stage consumes one more metric
/// derivative past Riemann.
enum class Depth : int {
    Metric = 0,
    Christoffel = 1,
    Riemann = 2,
    Schouten = 3, // includes Weyl (both are algebraic in Riemann)
    Cotton = 4,
    Bach = 5,
};

/**
 * Pointwise curvature stack in jets.
 *
 * Index conventions: riem[a][b][c][d] stores R_ab^c_d with the form pair
 * first, defined by (nabla_a nabla_b - nabla_b nabla_a) V^c = R_ab^c_d V^d;
 * ric_ab = R_ca^c_b; Scal = g^ab ric_ab; R_ab = (n-2) P_ab + J g_ab with
 * J = trace(P); C_abcd is the totally trace-free part in the all-lower
 * position; cotton[a][b][c] = A_abc = nabla_b P_ca - nabla_c P_ba; and
 * bach[a][b] = B_ab = nabla^c A_acb + P^dc C_dacb.
 */
struct CurvatureStack {
    int n = 0;
    int order = 0;
    Depth depth = Depth::Metric;
    std::vector<double> x;
    MetricJets m;

    std::vector<Jet> gamma;    // [a][b][c] = Gamma^a_bc
    std::vector<Jet> riem;     // [a][b][c][d] = R_ab^c_d
    std::vector<Jet> riem_low; // R_abcd
    std::vector<Jet> ric;      // Ric_ab
    Jet scal;
    std::vector<Jet> schouten; // P_ab
    Jet jtrace;                // J
    std::vector<Jet> weyl;     // C_abcd (all lower)
    std::vector<Jet> cotton;   // A_abc
    std::vector<Jet> bach;     // B_ab

    std::size_t i2(int a, int b) const { return static_cast<std::size_t>(a) * n + b; }
    std::size_t i3(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n + b) * n + c;
    }
    std::size_t i4(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    }

    const Jet& g(int a, int b) const { return m.g[i2(a, b)]; }
    const Jet& ginv(int a, int b) const { return m.ginv[i2(a, b)]; }
};

inline MetricJets metric_at(const MetricChart& chart, std::span<const double> x, int order) {
    MetricJets mj;
    mj.n = chart.n;
    mj.order = order;
    const EvalContext ctx = chart.ctx();
    mj.g.assign(static_cast<std::size_t>(chart.n) * chart.n, Jet(chart.n, order, 0.0));
    for (int i = 0; i < chart.n; ++i)
        for (int j = 0; j <= i; ++j) {
            const auto& ast = chart.metric_entry(i, j);
            if (!ast) continue;
            Jet v = eval_jet(ast, ctx, x, order, chart.metric_text[MetricChart::tri_index(i, j)]);
            mj.g[static_cast<std::size_t>(i) * chart.n + j] = v;
            if (i != j) mj.g[static_cast<std::size_t>(j) * chart.n + i] = v;
        }

    // value-level determinant and signature
    Mat gv(chart.n, chart.n);
    double scale = 0.0;
    for (int i = 0; i < chart.n; ++i)
        for (int j = 0; j < chart.n; ++j) {
            gv(i, j) = mj.g[static_cast<std::size_t>(i) * chart.n + j].value();
            scale = std::max(scale, std::abs(gv(i, j)));
        }
    SymEig eig = sym_eigen(gv);
    double det = 1.0;
    int pos = 0, neg = 0;
    for (double lam : eig.values) {
        det *= lam;
        if (lam > 0) ++pos;
        if (lam < 0) ++neg;
    }
    mj.det_value = det;
    if (std::abs(det) < 1e-12 * std::pow(scale, chart.n))
        throw NumericError("singular metric at sampled point");
    if (pos != chart.sig_pos || neg != chart.sig_neg)
        throw NumericError("metric signature mismatch: declared (" + std::to_string(chart.sig_pos) +
                           "," + std::to_string(chart.sig_neg) + "), eigenvalues give (" +
                           std::to_string(pos) + "," + std::to_string(neg) + ")");

    mj.ginv = jet_matrix_inverse(mj.g, chart.n);
    return mj;
}

namespace detail {

inline void compute_christoffel(CurvatureStack& st) {
    const int n = st.n;
    const Jet zero(n, st.order - 1, 0.0);
    st.gamma.assign(static_cast<std::size_t>(n) * n * n, zero);
    // dg[d][b][c] = d_b g_dc
    std::vector<Jet> dg(static_cast<std::size_t>(n) * n * n, zero);
    for (int d = 0; d < n; ++d)
        for (int c = 0; c <= d; ++c) {
            for (int b = 0; b < n; ++b) {
                Jet der = st.g(d, c).derivative(b);
                dg[st.i3(d, b, c)] = der;
                if (c != d) dg[st.i3(c, b, d)] = der;
            }
        }
    for (int b = 0; b < n; ++b)
        for (int c = b; c < n; ++c) {
            for (int a = 0; a < n; ++a) {
                Jet acc = zero;
                for (int d = 0; d < n; ++d) {
                    Jet sym = dg[st.i3(d, b, c)] + dg[st.i3(d, c, b)] - dg[st.i3(b, d, c)];
                    // careful: term is d_b g_dc + d_c g_db - d_d g_bc
                    acc += st.ginv(a, d) * sym;
                }
                acc *= 0.5;
                st.gamma[st.i3(a, b, c)] = acc;
                st.gamma[st.i3(a, c, b)] = acc;
            }
        }
}

inline void compute_riemann(CurvatureStack& st) {
    const int n = st.n;
    const Jet zero(n, st.order - 2, 0.0);
    st.riem.assign(static_cast<std::size_t>(n) * n * n * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet r = st.gamma[st.i3(c, b, d)].derivative(a) -
                            st.gamma[st.i3(c, a, d)].derivative(b);
                    for (int e = 0; e < n; ++e)
                        r += st.gamma[st.i3(c, a, e)] * st.gamma[st.i3(e, b, d)] -
                             st.gamma[st.i3(c, b, e)] * st.gamma[st.i3(e, a, d)];
                    st.riem[st.i4(a, b, c, d)] = r;
                    st.riem[st.i4(b, a, c, d)] = -r;
                }

    st.riem_low.assign(static_cast<std::size_t>(n) * n * n * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet r = zero;
                    for (int e = 0; e < n; ++e) r += st.g(c, e) * st.riem[st.i4(a, b, e, d)];
                    st.riem_low[st.i4(a, b, c, d)] = r;
                    st.riem_low[st.i4(b, a, c, d)] = -r;
                }

    st.ric.assign(static_cast<std::size_t>(n) * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Jet r = zero;
            for (int c = 0; c < n; ++c) r += st.riem[st.i4(c, a, c, b)];
            st.ric[st.i2(a, b)] = r;
        }
    st.scal = zero;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) st.scal += st.ginv(a, b) * st.ric[st.i2(a, b)];
}

inline void compute_schouten_weyl(CurvatureStack& st) {
    const int n = st.n;
    if (n < 3) throw NumericError("Schouten tensor requires dimension >= 3");
    const Jet zero(n, st.order - 2, 0.0);
    st.jtrace = st.scal * (1.0 / (2.0 * (n - 1)));
    st.schouten.assign(static_cast<std::size_t>(n) * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            st.schouten[st.i2(a, b)] =
                (st.ric[st.i2(a, b)] - st.jtrace * st.g(a, b)) * (1.0 / (n - 2));

    st.weyl.assign(static_cast<std::size_t>(n) * n * n * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet w = st.riem_low[st.i4(a, b, c, d)];
                    w -= st.g(c, a) * st.schouten[st.i2(b, d)];
                    w += st.g(c, b) * st.schouten[st.i2(a, d)];
                    w -= st.g(d, b) * st.schouten[st.i2(a, c)];
                    w += st.g(d, a) * st.schouten[st.i2(b, c)];
                    st.weyl[st.i4(a, b, c, d)] = w;
                    st.weyl[st.i4(b, a, c, d)] = -w;
                }
}

inline void compute_cotton(CurvatureStack& st) {
    const int n = st.n;
    const Jet zero(n, st.order - 3, 0.0);
    // nabla_b P_ca
    std::vector<Jet> dp(static_cast<std::size_t>(n) * n * n, zero);
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a) {
                Jet v = st.schouten[st.i2(c, a)].derivative(b);
                for (int e = 0; e < n; ++e) {
                    v -= st.gamma[st.i3(e, b, c)] * st.schouten[st.i2(e, a)];
                    v -= st.gamma[st.i3(e, b, a)] * st.schouten[st.i2(c, e)];
                }
                dp[st.i3(b, c, a)] = v;
            }
    st.cotton.assign(static_cast<std::size_t>(n) * n * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                st.cotton[st.i3(a, b, c)] = dp[st.i3(b, c, a)] - dp[st.i3(c, b, a)];
}

inline void compute_bach(CurvatureStack& st) {
    const int n = st.n;
    const Jet zero(n, st.order - 4, 0.0);
    st.bach.assign(static_cast<std::size_t>(n) * n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Jet v = zero;
            // nabla^c A_acb
            for (int e = 0; e < n; ++e) {
                for (int c = 0; c < n; ++c) {
                    Jet da = st.cotton[st.i3(a, c, b)].derivative(e);
                    for (int f = 0; f < n; ++f) {
                        da -= st.gamma[st.i3(f, e, a)] * st.cotton[st.i3(f, c, b)];
                        da -= st.gamma[st.i3(f, e, c)] * st.cotton[st.i3(a, f, b)];
                        da -= st.gamma[st.i3(f, e, b)] * st.cotton[st.i3(a, c, f)];
                    }
                    v += st.ginv(e, c) * da;
                }
            }
            // + P^dc C_dacb
            for (int d = 0; d < n; ++d)
                for (int c = 0; c < n; ++c) {
                    Jet pdc = zero;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            pdc += st.ginv(d, i) * st.ginv(c, j) * st.schouten[st.i2(i, j)];
                    v += pdc * st.weyl[st.i4(d, a, c, b)];
                }
            st.bach[st.i2(a, b)] = v;
        }
}

} // namespace detail

/// Evaluate the curvature stack at a point, to the requested depth.
inline CurvatureStack compute_stack(const MetricChart& chart, std::span<const double> x, int order,
                                    Depth depth = Depth::Bach) {
    const int need = static_cast<int>(depth) <= 2 ? static_cast<int>(depth)
                                                  : static_cast<int>(depth) - 1;
    // Schouten/Weyl are algebraic in Riemann (2 derivatives); Cotton needs 3, Bach 4.
    const int required = depth == Depth::Schouten ? 2 : need;
    if (order < required)
        throw NumericError("jet order " + std::to_string(order) + " insufficient for depth");

    CurvatureStack st;
    st.n = chart.n;
    st.order = order;
    st.depth = depth;
    st.x.assign(x.begin(), x.end());
    st.m = metric_at(chart, x, order);
    if (depth >= Depth::Christoffel) detail::compute_christoffel(st);
    if (depth >= Depth::Riemann) detail::compute_riemann(st);
    if (depth >= Depth::Schouten) detail::compute_schouten_weyl(st);
    if (depth >= Depth::Cotton) detail::compute_cotton(st);
    if (depth >= Depth::Bach) detail::compute_bach(st);
    return st;
}

/**
 * Coupled covariant derivative engine. Prepends one CoordDown slot. Tractor
 * slots require the tractor connection coefficients tgamma[a][A][B] (see
 * tractor.hpp); coordinate slots use the Levi-Civita connection of the stack.
 * Density weight adds no term in the trivialising scale.
 */
inline JetField covariant_derivative(const JetField& f, const CurvatureStack& st,
                                     const std::vector<Jet>* tgamma = nullptr) {
    const int n = st.n;
    const int N = n + 2;
    JetField out;
    out.n = n;
    out.weight = f.weight;
    out.slots.reserve(f.slots.size() + 1);
    out.slots.push_back(SlotKind::CoordDown);
    for (auto s : f.slots) out.slots.push_back(s);
    out.comp.resize(out.flat_size());

    std::vector<int> idx(f.slots.size());
    std::vector<int> tmp(f.slots.size());
    f.for_each([&](std::span<const int> I, std::size_t pos) {
        for (std::size_t s = 0; s < I.size(); ++s) idx[s] = I[s];
        for (int a = 0; a < n; ++a) {
            Jet acc = f.comp[pos].derivative(a);
            for (std::size_t s = 0; s < f.slots.size(); ++s) {
                std::copy(idx.begin(), idx.end(), tmp.begin());
                switch (f.slots[s]) {
                    case SlotKind::CoordUp: {
                        const int c = idx[s];
                        for (int e = 0; e < n; ++e) {
                            tmp[s] = e;
                            acc += st.gamma[st.i3(c, a, e)] * f.at(tmp);
                        }
                        break;
                    }
                    case SlotKind::CoordDown: {
                        const int b = idx[s];
                        for (int e = 0; e < n; ++e) {
                            tmp[s] = e;
                            acc -= st.gamma[st.i3(e, a, b)] * f.at(tmp);
                        }
                        break;
                    }
                    case SlotKind::TracUp: {
                        if (!tgamma) throw NumericError("tractor slot without tractor connection");
                        const int A = idx[s];
                        for (int B = 0; B < N; ++B) {
                            tmp[s] = B;
                            acc += (*tgamma)[(static_cast<std::size_t>(a) * N + A) * N + B] * f.at(tmp);
                        }
                        break;
                    }
                    case SlotKind::TracDown: {
                        if (!tgamma) throw NumericError("tractor slot without tractor connection");
                        const int A = idx[s];
                        for (int B = 0; B < N; ++B) {
                            tmp[s] = B;
                            acc -= (*tgamma)[(static_cast<std::size_t>(a) * N + B) * N + A] * f.at(tmp);
                        }
                        break;
                    }
                }
            }
            std::vector<int> oidx(out.slots.size());
            oidx[0] = a;
            for (std::size_t s = 0; s < f.slots.size(); ++s) oidx[s + 1] = idx[s];
            out.at(oidx) = acc;
        }
    });
    return out;
}

/// Coupled Laplacian: iterate the coupled first derivative twice and trace
/// with the inverse metric (no curvature reordering shortcuts).
inline JetField coupled_laplacian(const JetField& f, const CurvatureStack& st,
                                  const std::vector<Jet>* tgamma = nullptr) {
    JetField d1 = covariant_derivative(f, st, tgamma);
    JetField d2 = covariant_derivative(d1, st, tgamma);
    JetField out;
    out.n = f.n;
    out.weight = f.weight;
    out.slots = f.slots;
    const int n = st.n;
    const std::size_t inner = f.flat_size();
    out.comp.assign(inner, Jet(n, std::max(f.comp.empty() ? 0 : f.comp[0].order() - 2, 0), 0.0));
    for (std::size_t k = 0; k < inner; ++k) {
        Jet acc = d2.comp[k]; // (e=0, a=0, k) placeholder; recomputed below
        bool first = true;
        for (int e = 0; e < n; ++e)
            for (int a = 0; a < n; ++a) {
                const Jet& term = d2.comp[(static_cast<std::size_t>(e) * n + a) * inner + k];
                Jet contrib = st.ginv(e, a) * term;
                if (first) {
                    acc = contrib;
                    first = false;
                } else {
                    acc += contrib;
                }
            }
        out.comp[k] = acc;
    }
    return out;
}

/// Trace-free part of a symmetric 2-tensor given as jets (lower indices).
inline std::vector<Jet> trace_free_part(const std::vector<Jet>& t, const CurvatureStack& st) {
    const int n = st.n;
    Jet tr = st.ginv(0, 0) * t[0];
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == 0 && b == 0) continue;
            tr += st.ginv(a, b) * t[st.i2(a, b)];
        }
    std::vector<Jet> out = t;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out[st.i2(a, b)] -= st.g(a, b) * (tr * (1.0 / n));
    return out;
}

} // namespace weyl
