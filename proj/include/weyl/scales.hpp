#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "weyl/tractor.hpp"

namespace weyl {

/// TF(P - (J/n) g): vanishes exactly at Einstein points.
inline std::vector<double> einstein_residual(const CurvatureStack& st) {
    auto tf = trace_free_part(st.schouten, st);
    std::vector<double> out(tf.size());
    for (std::size_t i = 0; i < tf.size(); ++i) out[i] = tf[i].value();
    return out;
}

inline double einstein_residual_norm(const CurvatureStack& st) {
    auto v = einstein_residual(st);
    TensorValue t;
    t.n = st.n;
    t.slots = {SlotKind::CoordDown, SlotKind::CoordDown};
    t.comp = std::move(v);
    NormFrame f = NormFrame::from_metric(metric_values(st), metric_inverse_values(st));
    return aux_norm(t, f);
}

/// TF(nabla nabla sigma + P sigma): vanishes exactly when sigma^{-2} g is
/// Einstein (with sigma read as a function in the chart's own scale).
inline std::vector<double> conformal_einstein_residual(const CurvatureStack& st, const Jet& sigma) {
    JetField sf;
    sf.n = st.n;
    sf.weight = 1.0;
    sf.comp = {sigma};
    JetField d1 = covariant_derivative(sf, st);
    JetField d2 = covariant_derivative(d1, st);
    std::vector<Jet> hess(static_cast<std::size_t>(st.n) * st.n, Jet(st.n, 0, 0.0));
    for (int a = 0; a < st.n; ++a)
        for (int b = 0; b < st.n; ++b) {
            int idx[2] = {a, b};
            hess[st.i2(a, b)] = d2.at(idx) + st.schouten[st.i2(a, b)] * sigma;
        }
    auto tf = trace_free_part(hess, st);
    std::vector<double> out(tf.size());
    for (std::size_t i = 0; i < tf.size(); ++i) out[i] = tf[i].value();
    return out;
}

/// Scale tractor as slot values; X_A I^A = sigma holds exactly.
inline StandardTractor build_scale_tractor(const CurvatureStack& st, const TractorGeometry& tg,
                                           const Jet& sigma) {
    JetField I = scale_tractor(sigma, st, tg);
    std::vector<double> v(I.comp.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = I.comp[i].value();
    StandardTractor t = StandardTractor::from_vector(v, metric_values(st));
    t.sigma = sigma.value(); // exact round trip of the scale slot
    return t;
}

/// Frobenius norm of nabla I for the scale tractor of sigma at this point.
inline double parallel_residual(const CurvatureStack& st, const TractorGeometry& tg,
                                const Jet& sigma) {
    JetField I = scale_tractor(sigma, st, tg);
    JetField dI = tractor_connection_apply(I, st, tg);
    double s = 0;
    for (const auto& j : dI.comp) s += j.value() * j.value();
    return std::sqrt(s);
}

/// -(n/2) h(I, I) against J: equal wherever I is the parallel tractor of an
/// Einstein scale, and constant across scale singularities.
struct ScalarExtensionCheck {
    double h_ii = 0;
    double extended = 0; // -(n/2) h(I,I)
    double j = 0;
    double diff = 0;
};

inline ScalarExtensionCheck scalar_extension_check(const CurvatureStack& st,
                                                   const TractorGeometry& tg, const Jet& sigma) {
    StandardTractor t = build_scale_tractor(st, tg, sigma);
    ScalarExtensionCheck c;
    c.h_ii = tractor_norm2(t, metric_inverse_values(st));
    c.extended = -0.5 * st.n * c.h_ii;
    c.j = st.jtrace.value();
    c.diff = std::abs(c.extended - c.j);
    return c;
}

// ---------------------------------------------------------------------------
// Parallel transport
// ---------------------------------------------------------------------------

/// Curve through the chart domain: position and velocity at parameter t.
using CurveFn = std::function<void(double t, std::span<double> x, std::span<double> xdot)>;

/// Parametric curve from coordinate expressions in t over [0, 1].
inline CurveFn parametric_curve(std::vector<ExprPtr> exprs, const MetricChart& chart) {
    EvalContext ctx{{"t"}, chart.params};
    return [exprs = std::move(exprs), ctx](double t, std::span<double> x, std::span<double> xdot) {
        const double tv[1] = {t};
        for (std::size_t i = 0; i < exprs.size(); ++i) {
            Jet j = eval_jet(exprs[i], ctx, tv, 1);
            x[i] = j.value();
            xdot[i] = j.derivative(0).value();
        }
    };
}

/// Linear segment from a to b, t in [0, 1].
inline CurveFn segment_curve(std::vector<double> a, std::vector<double> b) {
    return [a = std::move(a), b = std::move(b)](double t, std::span<double> x, std::span<double> xdot) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = (1 - t) * a[i] + t * b[i];
            xdot[i] = b[i] - a[i];
        }
    };
}

struct TransportResult {
    std::vector<double> initial, transported; // frame vectors, length n+2
    double h_start = 0, h_end = 0;
    double h_drift = 0;                  // |h_end - h_start|
    double closure_deviation = 0;        // |I(1) - I(0)| when the curve closes
    std::vector<double> deviation;       // I(1) - I(0)
    int steps = 0;
};

namespace detail {

/// Tractor connection coefficient values at an arbitrary point.
inline std::vector<Mat> tractor_gamma_values(const MetricChart& chart, std::span<const double> x) {
    auto st = compute_stack(chart, x, 2, Depth::Schouten);
    auto tg = tractor_geometry(st);
    const int n = chart.n, N = n + 2;
    std::vector<Mat> out(static_cast<std::size_t>(n), Mat(N, N));
    for (int a = 0; a < n; ++a)
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B) out[static_cast<std::size_t>(a)](A, B) = tg.tgamma[tg.gi(a, A, B)].value();
    return out;
}

} // namespace detail

/**
 * Classic fixed-step fourth-order Runge-Kutta integration of nabla_cdot I = 0
 * along the curve. h(I, I) is conserved by the equation; its drift measures
 * integrator error alone.
 */
inline TransportResult parallel_transport(const MetricChart& chart, std::span<const double> i0,
                                          const CurveFn& curve, int steps) {
    const int n = chart.n, N = n + 2;
    TransportResult r;
    r.steps = steps;
    r.initial.assign(i0.begin(), i0.end());

    std::vector<double> x(static_cast<std::size_t>(n)), xd(static_cast<std::size_t>(n));
    auto deriv = [&](double t, const std::vector<double>& I) {
        curve(t, x, xd);
        if (!chart.in_domain(x, 1e-9)) throw NumericError("transport curve exits the chart domain");
        auto tga = detail::tractor_gamma_values(chart, x);
        std::vector<double> dI(static_cast<std::size_t>(N), 0.0);
        for (int A = 0; A < N; ++A) {
            double s = 0;
            for (int a = 0; a < n; ++a)
                for (int B = 0; B < N; ++B)
                    s -= xd[static_cast<std::size_t>(a)] * tga[static_cast<std::size_t>(a)](A, B) * I[static_cast<std::size_t>(B)];
            dI[static_cast<std::size_t>(A)] = s;
        }
        return dI;
    };

    auto h_of = [&](double t, const std::vector<double>& I) {
        curve(t, x, xd);
        auto m = metric_at(chart, x, 0);
        double s = 2.0 * I[0] * I[static_cast<std::size_t>(N) - 1];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                s += m.g[static_cast<std::size_t>(a) * n + b].value() * I[static_cast<std::size_t>(a) + 1] * I[static_cast<std::size_t>(b) + 1];
        return s;
    };

    std::vector<double> I(i0.begin(), i0.end());
    r.h_start = h_of(0.0, I);
    const double dt = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        auto k1 = deriv(t, I);
        std::vector<double> tmp(I);
        for (int A = 0; A < N; ++A) tmp[static_cast<std::size_t>(A)] = I[static_cast<std::size_t>(A)] + 0.5 * dt * k1[static_cast<std::size_t>(A)];
        auto k2 = deriv(t + 0.5 * dt, tmp);
        for (int A = 0; A < N; ++A) tmp[static_cast<std::size_t>(A)] = I[static_cast<std::size_t>(A)] + 0.5 * dt * k2[static_cast<std::size_t>(A)];
        auto k3 = deriv(t + 0.5 * dt, tmp);
        for (int A = 0; A < N; ++A) tmp[static_cast<std::size_t>(A)] = I[static_cast<std::size_t>(A)] + dt * k3[static_cast<std::size_t>(A)];
        auto k4 = deriv(t + dt, tmp);
        for (int A = 0; A < N; ++A)
            I[static_cast<std::size_t>(A)] += dt / 6.0 *
                (k1[static_cast<std::size_t>(A)] + 2 * k2[static_cast<std::size_t>(A)] + 2 * k3[static_cast<std::size_t>(A)] + k4[static_cast<std::size_t>(A)]);
    }
    r.transported = I;
    r.h_end = h_of(1.0, I);
    r.h_drift = std::abs(r.h_end - r.h_start);
    r.deviation.resize(static_cast<std::size_t>(N));
    double d2 = 0;
    for (int A = 0; A < N; ++A) {
        r.deviation[static_cast<std::size_t>(A)] = I[static_cast<std::size_t>(A)] - r.initial[static_cast<std::size_t>(A)];
        d2 += r.deviation[static_cast<std::size_t>(A)] * r.deviation[static_cast<std::size_t>(A)];
    }
    r.closure_deviation = std::sqrt(d2);
    return r;
}

/// Piecewise-linear transport: each segment is integrated on its own smooth
/// parametrisation, so corner velocities never leak across RK4 stages.
inline TransportResult transport_polyline(const MetricChart& chart, std::span<const double> i0,
                                          const std::vector<std::vector<double>>& pts, int steps) {
    const std::size_t segs = pts.size() - 1;
    const int per_seg = std::max(1, static_cast<int>(steps / static_cast<int>(segs)));
    TransportResult total;
    total.initial.assign(i0.begin(), i0.end());
    std::vector<double> cur(i0.begin(), i0.end());
    total.steps = 0;
    for (std::size_t s = 0; s < segs; ++s) {
        auto leg = parallel_transport(chart, cur, segment_curve(pts[s], pts[s + 1]), per_seg);
        if (s == 0) total.h_start = leg.h_start;
        total.h_end = leg.h_end;
        cur = leg.transported;
        total.steps += leg.steps;
    }
    total.transported = cur;
    total.h_drift = std::abs(total.h_end - total.h_start);
    total.deviation.resize(cur.size());
    double d2 = 0;
    for (std::size_t A = 0; A < cur.size(); ++A) {
        total.deviation[A] = cur[A] - total.initial[A];
        d2 += total.deviation[A] * total.deviation[A];
    }
    total.closure_deviation = std::sqrt(d2);
    return total;
}

/**
 * Square coordinate loop of side eps in the (i, j) plane based at x0,
 * traversed so the closure deviation approaches +eps^2 Omega_ij I. (The
 * commutator convention [nabla_a, nabla_b] I = Omega_ab I fixes this
 * orientation: +e_j, +e_i, -e_j, -e_i.)
 */
inline TransportResult transport_coordinate_loop(const MetricChart& chart,
                                                 std::span<const double> i0,
                                                 std::span<const double> x0, int i, int j,
                                                 double eps, int steps) {
    std::vector<std::vector<double>> pts;
    std::vector<double> p(x0.begin(), x0.end());
    pts.push_back(p);
    p[static_cast<std::size_t>(j)] += eps;
    pts.push_back(p);
    p[static_cast<std::size_t>(i)] += eps;
    pts.push_back(p);
    p[static_cast<std::size_t>(j)] -= eps;
    pts.push_back(p);
    p[static_cast<std::size_t>(i)] -= eps;
    pts.push_back(p);
    return transport_polyline(chart, i0, pts, steps);
}

} // namespace weyl
