#pragma once

// Layered central-difference curvature oracle. Each stage applies one level
// of finite differencing (step 1e-4) on top of exactly evaluated lower-stage
// quantities, then assembles the target through its own formula. The
// assembly code is fully independent of the jet-based implementation path it
// checks; only exact pointwise values of lower stages are shared, so each
// comparison isolates one stage of derivative wiring.

#include <cmath>
#include <vector>

#include "weyl/catalog.hpp"
#include "weyl/curvature.hpp"

namespace curvox {

constexpr double kStep = 1e-4;

struct Grid {
    const weyl::MetricChart* chart;
    int n;

    std::vector<double> gval(std::span<const double> x) const {
        auto m = weyl::metric_at(*chart, x, 0);
        std::vector<double> g(m.g.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = m.g[i].value();
        return g;
    }
    std::vector<double> ginv(std::span<const double> x) const {
        auto m = weyl::metric_at(*chart, x, 0);
        std::vector<double> g(m.ginv.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = m.ginv[i].value();
        return g;
    }
    std::vector<double> gamma(std::span<const double> x) const {
        auto st = weyl::compute_stack(*chart, x, 1, weyl::Depth::Christoffel);
        std::vector<double> v(st.gamma.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.gamma[i].value();
        return v;
    }
    std::vector<double> schouten(std::span<const double> x) const {
        auto st = weyl::compute_stack(*chart, x, 2, weyl::Depth::Schouten);
        std::vector<double> v(st.schouten.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.schouten[i].value();
        return v;
    }
    std::vector<double> cotton(std::span<const double> x) const {
        auto st = weyl::compute_stack(*chart, x, 3, weyl::Depth::Cotton);
        std::vector<double> v(st.cotton.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.cotton[i].value();
        return v;
    }

    template <class Fn>
    std::vector<double> fd(Fn&& field, std::span<const double> x, int var) const {
        std::vector<double> p(x.begin(), x.end());
        p[static_cast<std::size_t>(var)] += kStep;
        std::vector<double> hi = field(p);
        p[static_cast<std::size_t>(var)] -= 2 * kStep;
        std::vector<double> lo = field(p);
        for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = (hi[i] - lo[i]) / (2 * kStep);
        return hi;
    }
};

struct OracleStack {
    int n;
    std::vector<double> g, gi;            // metric, inverse
    std::vector<double> gamma;            // Gamma^a_bc
    std::vector<double> riem;             // R_ab^c_d
    std::vector<double> riem_low, ric;    // R_abcd, Ric_ab
    double scal = 0, jtrace = 0;
    std::vector<double> p, weyl, cotton, bach;

    std::size_t i2(int a, int b) const { return static_cast<std::size_t>(a) * n + b; }
    std::size_t i3(int a, int b, int c) const { return (static_cast<std::size_t>(a) * n + b) * n + c; }
    std::size_t i4(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    }
};

inline OracleStack oracle_stack(const weyl::MetricChart& chart, std::span<const double> x,
                                bool with_bach = true) {
    Grid grid{&chart, chart.n};
    const int n = chart.n;
    OracleStack o;
    o.n = n;
    o.g = grid.gval(x);
    o.gi = grid.ginv(x);

    // Christoffel from finite differences of the metric components alone.
    std::vector<std::vector<double>> dgv(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) dgv[static_cast<std::size_t>(b)] = grid.fd([&](std::span<const double> q) { return grid.gval(q); }, x, b);
    auto dg = [&](int b, int i, int j) { return dgv[static_cast<std::size_t>(b)][o.i2(i, j)]; };
    o.gamma.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double s = 0;
                for (int d = 0; d < n; ++d)
                    s += o.gi[o.i2(a, d)] * (dg(b, d, c) + dg(c, b, d) - dg(d, b, c));
                o.gamma[o.i3(a, b, c)] = 0.5 * s;
            }

    // Riemann from one finite-difference level on exactly evaluated Christoffel.
    std::vector<std::vector<double>> dgam(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) dgam[static_cast<std::size_t>(a)] = grid.fd([&](std::span<const double> q) { return grid.gamma(q); }, x, a);
    std::vector<double> gam = grid.gamma(x);
    auto G = [&](int a, int b, int c) { return gam[o.i3(a, b, c)]; };
    o.riem.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double r = dgam[static_cast<std::size_t>(a)][o.i3(c, b, d)] -
                               dgam[static_cast<std::size_t>(b)][o.i3(c, a, d)];
                    for (int e = 0; e < n; ++e)
                        r += G(c, a, e) * G(e, b, d) - G(c, b, e) * G(e, a, d);
                    o.riem[o.i4(a, b, c, d)] = r;
                }

    o.riem_low.assign(o.riem.size(), 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double r = 0;
                    for (int e = 0; e < n; ++e) r += o.g[o.i2(c, e)] * o.riem[o.i4(a, b, e, d)];
                    o.riem_low[o.i4(a, b, c, d)] = r;
                }
    o.ric.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double r = 0;
            for (int c = 0; c < n; ++c) r += o.riem[o.i4(c, a, c, b)];
            o.ric[o.i2(a, b)] = r;
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) o.scal += o.gi[o.i2(a, b)] * o.ric[o.i2(a, b)];

    if (n >= 3) {
        o.jtrace = o.scal / (2.0 * (n - 1));
        o.p.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                o.p[o.i2(a, b)] = (o.ric[o.i2(a, b)] - o.jtrace * o.g[o.i2(a, b)]) / (n - 2);
        o.weyl.assign(o.riem_low.size(), 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d)
                        o.weyl[o.i4(a, b, c, d)] =
                            o.riem_low[o.i4(a, b, c, d)] -
                            (o.g[o.i2(c, a)] * o.p[o.i2(b, d)] - o.g[o.i2(c, b)] * o.p[o.i2(a, d)]) -
                            (o.g[o.i2(d, b)] * o.p[o.i2(a, c)] - o.g[o.i2(d, a)] * o.p[o.i2(b, c)]);

        // Cotton from one finite-difference level on exactly evaluated Schouten.
        std::vector<std::vector<double>> dp(static_cast<std::size_t>(n));
        for (int b = 0; b < n; ++b)
            dp[static_cast<std::size_t>(b)] = grid.fd([&](std::span<const double> q) { return grid.schouten(q); }, x, b);
        std::vector<double> pv = grid.schouten(x);
        auto covdP = [&](int b, int c, int a) {
            double v = dp[static_cast<std::size_t>(b)][o.i2(c, a)];
            for (int e = 0; e < n; ++e) {
                v -= G(e, b, c) * pv[o.i2(e, a)];
                v -= G(e, b, a) * pv[o.i2(c, e)];
            }
            return v;
        };
        o.cotton.assign(static_cast<std::size_t>(n) * n * n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    o.cotton[o.i3(a, b, c)] = covdP(b, c, a) - covdP(c, b, a);

        if (with_bach) {
            // Bach from one finite-difference level on exactly evaluated Cotton.
            std::vector<std::vector<double>> da(static_cast<std::size_t>(n));
            for (int e = 0; e < n; ++e)
                da[static_cast<std::size_t>(e)] = grid.fd([&](std::span<const double> q) { return grid.cotton(q); }, x, e);
            std::vector<double> av = grid.cotton(x);
            o.bach.assign(static_cast<std::size_t>(n) * n, 0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double v = 0;
                    for (int e = 0; e < n; ++e)
                        for (int c = 0; c < n; ++c) {
                            double nda = da[static_cast<std::size_t>(e)][o.i3(a, c, b)];
                            for (int f = 0; f < n; ++f) {
                                nda -= G(f, e, a) * av[o.i3(f, c, b)];
                                nda -= G(f, e, c) * av[o.i3(a, f, b)];
                                nda -= G(f, e, b) * av[o.i3(a, c, f)];
                            }
                            v += o.gi[o.i2(e, c)] * nda;
                        }
                    for (int d = 0; d < n; ++d)
                        for (int c = 0; c < n; ++c) {
                            double pdc = 0;
                            for (int i = 0; i < n; ++i)
                                for (int j = 0; j < n; ++j)
                                    pdc += o.gi[o.i2(d, i)] * o.gi[o.i2(c, j)] * o.p[o.i2(i, j)];
                            v += pdc * o.weyl[o.i4(d, a, c, b)];
                        }
                    o.bach[o.i2(a, b)] = v;
                }
        }
    }
    return o;
}

} // namespace curvox
