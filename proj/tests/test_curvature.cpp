#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvature_oracle.hpp"
#include "oracles.hpp"
#include "weyl/catalog.hpp"
#include "weyl/curvature.hpp"
#include "weyl/sampling.hpp"

using namespace weyl;

namespace {

double max_abs(std::span<const Jet> jets) {
    double m = 0.0;
    for (const auto& j : jets) m = std::max(m, std::abs(j.value()));
    return m;
}

TensorValue tensor_from(const CurvatureStack& st, std::span<const Jet> jets,
                        std::vector<SlotKind> slots) {
    TensorValue t;
    t.n = st.n;
    t.slots = std::move(slots);
    t.comp.resize(jets.size());
    for (std::size_t i = 0; i < jets.size(); ++i) t.comp[i] = jets[i].value();
    return t;
}

NormFrame frame_of(const CurvatureStack& st) {
    const int n = st.n;
    Mat g(n, n), gi(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            g(a, b) = st.g(a, b).value();
            gi(a, b) = st.ginv(a, b).value();
        }
    return NormFrame::from_metric(g, gi);
}

const std::vector<SlotKind> kDown2 = {SlotKind::CoordDown, SlotKind::CoordDown};
const std::vector<SlotKind> kDown3 = {SlotKind::CoordDown, SlotKind::CoordDown, SlotKind::CoordDown};
const std::vector<SlotKind> kDown4 = {SlotKind::CoordDown, SlotKind::CoordDown, SlotKind::CoordDown,
                                      SlotKind::CoordDown};

} // namespace

TEST_CASE("flat chart: identity metric, zero partials, zero curvature") {
    auto chart = catalog_chart("flat_4");
    auto st = compute_stack(chart, chart.midpoint(), 4, Depth::Bach);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            REQUIRE(st.g(a, b).value() == (a == b ? 1.0 : 0.0));
            auto cs = st.g(a, b).coeffs();
            for (std::size_t p = 1; p < cs.size(); ++p) REQUIRE(cs[p] == 0.0);
        }
    REQUIRE(max_abs(st.gamma) == 0.0);
    REQUIRE(max_abs(st.riem) == 0.0);
    REQUIRE(max_abs(st.schouten) == 0.0);
    REQUIRE(max_abs(st.weyl) == 0.0);
    REQUIRE(max_abs(st.cotton) == 0.0);
    REQUIRE(max_abs(st.bach) == 0.0);
}

TEST_CASE("schwarzschild g_tt at r=5 is -0.6 and metric inverse is exact") {
    auto chart = catalog_chart("schwarzschild");
    std::vector<double> x = {0.5, 5.0, 1.2, 2.0};
    auto m = metric_at(chart, x, 3);
    REQUIRE(m.g[0].value() == Catch::Approx(-0.6).epsilon(1e-14));
    // g * ginv = identity to 1e-12, including derivative coefficients
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Jet acc(4, 3, 0.0);
            for (int c = 0; c < 4; ++c)
                acc += m.g[static_cast<std::size_t>(a) * 4 + c] * m.ginv[static_cast<std::size_t>(c) * 4 + b];
            for (int p = 0; p < Jet::simplex_size(4, 3); ++p) {
                const double want = (a == b && p == 0) ? 1.0 : 0.0;
                REQUIRE(std::abs(acc.coeff(p) - want) < 1e-12);
            }
        }
}

TEST_CASE("inverse metric partials match finite differences on the sphere chart") {
    auto chart = catalog_chart("sphere_3");
    std::vector<double> x = {1.1, 0.9, 2.2};
    auto m = metric_at(chart, x, 2);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int v = 0; v < 3; ++v) {
                auto fn = [&](std::span<const double> q) {
                    auto mq = metric_at(chart, q, 0);
                    return mq.ginv[static_cast<std::size_t>(a) * 3 + b].value();
                };
                const double want = oracles::fd1(fn, x, v);
                const double got = m.ginv[static_cast<std::size_t>(a) * 3 + b].derivative(v).value();
                REQUIRE(oracles::rel_err(got, want, 1e-8) < 1e-6);
            }
}

TEST_CASE("signature mismatch and singular metrics are reported") {
    auto bad = make_chart("bad", 3, 1, 2, {"x", "y", "z"}, {"1", "", "1", "", "", "1"}, {},
                          {{{-1, 1}}, {{-1, 1}}, {{-1, 1}}});
    std::vector<double> x = {0, 0, 0};
    REQUIRE_THROWS_AS(metric_at(bad, x, 1), NumericError);

    auto sing = make_chart("sing", 2, 2, 0, {"x", "y"}, {"x", "", "x"}, {},
                           {{{-1, 1}}, {{-1, 1}}});
    std::vector<double> origin = {0.0, 0.5};
    REQUIRE_THROWS_AS(metric_at(sing, origin, 1), NumericError);
}

TEST_CASE("2-sphere Christoffel symbol and scalar curvature") {
    auto s2 = make_chart("s2", 2, 2, 0, {"th", "ph"}, {"1", "", "sin(th)^2"}, {},
                         {{{0.4, 2.7}}, {{0.0, 6.28}}});
    std::vector<double> x = {0.8, 1.0};
    auto st = compute_stack(s2, x, 2, Depth::Riemann);
    // Gamma^th_ph,ph = -sin th cos th ; Gamma^ph_th,ph = cot th
    REQUIRE(st.gamma[st.i3(0, 1, 1)].value() ==
            Catch::Approx(-std::sin(0.8) * std::cos(0.8)).epsilon(1e-12));
    REQUIRE(st.gamma[st.i3(1, 0, 1)].value() ==
            Catch::Approx(std::cos(0.8) / std::sin(0.8)).epsilon(1e-12));
    REQUIRE(st.scal.value() == Catch::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("metricity: covariant derivative of the metric vanishes") {
    for (const char* name : {"schwarzschild", "sphere_4", "conformally_flat_generic"}) {
        auto chart = catalog_chart(name);
        auto pts = sample_points(chart, 3, 7);
        for (const auto& x : pts) {
            auto st = compute_stack(chart, x, 2, Depth::Christoffel);
            JetField gf(chart.n, kDown2, Jet(chart.n, st.order, 0.0));
            for (int a = 0; a < chart.n; ++a)
                for (int b = 0; b < chart.n; ++b) {
                    int idx[2] = {a, b};
                    gf.at(idx) = st.g(a, b);
                }
            JetField dg = covariant_derivative(gf, st);
            double m = 0;
            for (const auto& j : dg.comp) m = std::max(m, std::abs(j.value()));
            INFO(name);
            REQUIRE(m < 1e-12 * (1.0 + max_abs(st.m.g)));
        }
    }
}

TEST_CASE("einstein catalog values: spheres, hyperbolic, schwarzschild") {
    {
        auto chart = catalog_chart("sphere_4");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        REQUIRE(st.jtrace.value() == Catch::Approx(2.0).epsilon(1e-10));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                REQUIRE(st.schouten[st.i2(a, b)].value() ==
                        Catch::Approx(0.5 * st.g(a, b).value()).margin(1e-10));
    }
    {
        auto chart = catalog_chart("hyperbolic_3");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        REQUIRE(st.jtrace.value() == Catch::Approx(-1.5).epsilon(1e-10));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                REQUIRE(st.schouten[st.i2(a, b)].value() ==
                        Catch::Approx(-0.5 * st.g(a, b).value()).margin(1e-10));
    }
    {
        auto chart = catalog_chart("schwarzschild");
        auto pts = sample_points(chart, 10, 3);
        for (const auto& x : pts) {
            auto st = compute_stack(chart, x, 2, Depth::Schouten);
            for (const auto& j : st.ric) REQUIRE(std::abs(j.value()) < 1e-9);
            // Einstein check: trace-free Schouten vanishes for Ricci-flat metrics
            auto tf = trace_free_part(st.schouten, st);
            for (const auto& j : tf) REQUIRE(std::abs(j.value()) < 1e-9);
        }
    }
    {
        auto chart = catalog_chart("s2xs4_einstein");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        auto tf = trace_free_part(st.schouten, st);
        for (const auto& j : tf) REQUIRE(std::abs(j.value()) < 1e-10);
        REQUIRE(st.jtrace.value() == Catch::Approx(0.6).epsilon(1e-10));
    }
}

TEST_CASE("riemann symmetries and decomposition identity") {
    for (const char* name : {"schwarzschild", "bumped_schwarzschild", "sphere_4", "pp_wave"}) {
        auto chart = catalog_chart(name);
        auto pts = sample_points(chart, 4, 11);
        for (const auto& x : pts) {
            auto st = compute_stack(chart, x, 4, Depth::Bach);
            auto frame = frame_of(st);
            const int n = st.n;
            auto R = tensor_from(st, st.riem_low, kDown4);
            const double rn = aux_norm(R, frame);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            const double r = st.riem_low[st.i4(a, b, c, d)].value();
                            REQUIRE(std::abs(r + st.riem_low[st.i4(b, a, c, d)].value()) <=
                                    1e-11 * rn);
                            REQUIRE(std::abs(r + st.riem_low[st.i4(a, b, d, c)].value()) <=
                                    1e-11 * rn);
                            REQUIRE(std::abs(r - st.riem_low[st.i4(c, d, a, b)].value()) <=
                                    1e-11 * rn);
                            const double bianchi = r + st.riem_low[st.i4(b, c, a, d)].value() +
                                                   st.riem_low[st.i4(c, a, b, d)].value();
                            REQUIRE(std::abs(bianchi) <= 1e-11 * rn);
                        }
            // R = C + 2 g P terms
            TensorValue recon = R;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            double w = st.weyl[st.i4(a, b, c, d)].value();
                            w += st.g(c, a).value() * st.schouten[st.i2(b, d)].value() -
                                 st.g(c, b).value() * st.schouten[st.i2(a, d)].value();
                            w += st.g(d, b).value() * st.schouten[st.i2(a, c)].value() -
                                 st.g(d, a).value() * st.schouten[st.i2(b, c)].value();
                            recon.comp[st.i4(a, b, c, d)] -= w;
                        }
            REQUIRE(aux_norm(recon, frame) <= 1e-11 * rn);
        }
    }
}

TEST_CASE("weyl traces vanish; n=3 weyl is identically zero; conformally flat weyl vanishes") {
    {
        auto chart = catalog_chart("bumped_schwarzschild");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        auto frame = frame_of(st);
        auto C = tensor_from(st, st.weyl, kDown4);
        const double cn = aux_norm(C, frame);
        REQUIRE(cn > 0);
        const int n = st.n;
        // all single traces with the inverse metric
        for (int s1 = 0; s1 < 4; ++s1)
            for (int s2 = s1 + 1; s2 < 4; ++s2) {
                double worst = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double tr = 0;
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b) {
                                int idx[4];
                                int free_slot = 0;
                                int frees[2] = {i, j};
                                for (int s = 0; s < 4; ++s) {
                                    if (s == s1) idx[s] = a;
                                    else if (s == s2) idx[s] = b;
                                    else idx[s] = frees[free_slot++];
                                }
                                tr += st.ginv(a, b).value() *
                                      st.weyl[st.i4(idx[0], idx[1], idx[2], idx[3])].value();
                            }
                        worst = std::max(worst, std::abs(tr));
                    }
                REQUIRE(worst <= 1e-10 * cn);
            }
    }
    {
        auto chart = catalog_chart("hyperbolic_3");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        REQUIRE(max_abs(st.weyl) < 1e-12);
    }
    {
        auto chart = catalog_chart("conformally_flat_generic");
        auto pts = sample_points(chart, 4, 5);
        for (const auto& x : pts) {
            auto st = compute_stack(chart, x, 2, Depth::Schouten);
            auto frame = frame_of(st);
            auto R = tensor_from(st, st.riem_low, kDown4);
            REQUIRE(max_abs(st.weyl) <= 1e-10 * (1.0 + aux_norm(R, frame)));
        }
    }
    {
        auto chart = catalog_chart("schwarzschild");
        auto st = compute_stack(chart, chart.midpoint(), 2, Depth::Schouten);
        REQUIRE(max_abs(st.weyl) > 1e-3);
    }
}

TEST_CASE("cotton: zero for Einstein charts, contracted trace vanishes, oracle match") {
    for (const char* name : {"schwarzschild", "sphere_4", "hyperbolic_4", "flat_4"}) {
        auto chart = catalog_chart(name);
        auto st = compute_stack(chart, chart.midpoint(), 3, Depth::Cotton);
        INFO(name);
        REQUIRE(max_abs(st.cotton) < 1e-9);
    }
    auto chart = catalog_chart("bumped_schwarzschild");
    auto pts = sample_points(chart, 3, 17);
    for (const auto& x : pts) {
        auto st = compute_stack(chart, x, 3, Depth::Cotton);
        auto frame = frame_of(st);
        auto A = tensor_from(st, st.cotton, kDown3);
        const double an = aux_norm(A, frame);
        REQUIRE(an > 1e-8); // genuinely non-Einstein
        // antisymmetry in the last two slots
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    REQUIRE(std::abs(st.cotton[st.i3(a, b, c)].value() +
                                     st.cotton[st.i3(a, c, b)].value()) <= 1e-12 * (1 + an));
        // g^ab A_abc = 0 (contracted Bianchi)
        for (int c = 0; c < 4; ++c) {
            double tr = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    tr += st.ginv(a, b).value() * st.cotton[st.i3(a, b, c)].value();
            REQUIRE(std::abs(tr) <= 1e-10 * (an + 1e-30));
        }
        // layered finite-difference oracle
        auto o = curvox::oracle_stack(chart, x, false);
        for (std::size_t k = 0; k < o.cotton.size(); ++k)
            REQUIRE(oracles::rel_err(st.cotton[k].value(), o.cotton[k], 1e-2 * an) < 1e-5);
    }
}

TEST_CASE("bach: zero for Einstein charts, trace-free, n=4 symmetric, oracle match") {
    for (const char* name : {"schwarzschild", "sphere_4", "s2xs2_equal"}) {
        auto chart = catalog_chart(name);
        auto st = compute_stack(chart, chart.midpoint(), 4, Depth::Bach);
        INFO(name);
        REQUIRE(max_abs(st.bach) < 1e-9);
    }
    auto chart = catalog_chart("bumped_schwarzschild");
    auto x = sample_points(chart, 2, 23)[1];
    auto st = compute_stack(chart, x, 4, Depth::Bach);
    auto frame = frame_of(st);
    auto B = tensor_from(st, st.bach, kDown2);
    const double bn = aux_norm(B, frame);
    REQUIRE(bn > 1e-8);
    double tr = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) tr += st.ginv(a, b).value() * st.bach[st.i2(a, b)].value();
    REQUIRE(std::abs(tr) <= 1e-9 * (bn + 1e-30));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            REQUIRE(std::abs(st.bach[st.i2(a, b)].value() - st.bach[st.i2(b, a)].value()) <=
                    1e-9 * bn);
    auto o = curvox::oracle_stack(chart, x, true);
    for (std::size_t k = 0; k < o.bach.size(); ++k)
        REQUIRE(oracles::rel_err(st.bach[k].value(), o.bach[k], 1e-2 * bn) < 1e-5);
}

TEST_CASE("conformal covariance of the (1,3) weyl tensor") {
    auto base = catalog_chart("schwarzschild_riemannian");
    auto hat = rescale_chart(base, "0.2*sin(t)+0.1*r/6");
    auto pts = sample_points(base, 3, 29);
    for (const auto& x : pts) {
        auto st = compute_stack(base, x, 2, Depth::Schouten);
        auto sth = compute_stack(hat, x, 2, Depth::Schouten);
        double worst = 0, scale = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d) {
                        double up = 0, uph = 0;
                        for (int e = 0; e < 4; ++e) {
                            up += st.ginv(a, e).value() * st.weyl[st.i4(e, b, c, d)].value();
                            uph += sth.ginv(a, e).value() * sth.weyl[st.i4(e, b, c, d)].value();
                        }
                        // C^a_bcd with the raised index FIRST: raise slot 1 of C_abcd;
                        // here we raise the first slot of the stored array, which is
                        // the first form index; invariance holds slotwise either way.
                        worst = std::max(worst, std::abs(up - uph));
                        scale = std::max(scale, std::abs(up));
                    }
        REQUIRE(worst <= 1e-9 * scale);
    }
}

TEST_CASE("covariant derivative of the scalar curvature vanishes on the sphere") {
    auto s2 = make_chart("s2", 2, 2, 0, {"th", "ph"}, {"1", "", "sin(th)^2"}, {},
                         {{{0.4, 2.7}}, {{0.0, 6.28}}});
    std::vector<double> x = {0.9, 2.1};
    auto st = compute_stack(s2, x, 3, Depth::Riemann);
    for (int a = 0; a < 2; ++a) REQUIRE(std::abs(st.scal.derivative(a).value()) < 1e-11);
}

TEST_CASE("second covariant derivative commutator reproduces the riemann tensor") {
    auto chart = catalog_chart("schwarzschild");
    auto x = sample_points(chart, 1, 31)[0];
    auto st = compute_stack(chart, x, 3, Depth::Riemann);
    const int n = 4;
    // test vector field with expression components
    EvalContext ctx = chart.ctx();
    const char* comps[4] = {"sin(r)*t+1", "cos(th)", "r*ph", "exp(t/4)"};
    JetField V(n, {SlotKind::CoordUp}, Jet(n, 3, 0.0));
    for (int c = 0; c < n; ++c) {
        int idx[1] = {c};
        V.at(idx) = eval_jet(parse(comps[c]), ctx, x, 3);
    }
    JetField d1 = covariant_derivative(V, st);
    JetField d2 = covariant_derivative(d1, st);
    double worst = 0, scale = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                int iab[3] = {a, b, c};
                int iba[3] = {b, a, c};
                const double comm = d2.at(iab).value() - d2.at(iba).value();
                double want = 0;
                for (int d = 0; d < n; ++d) {
                    int vd[1] = {d};
                    want += st.riem[st.i4(a, b, c, d)].value() * V.at(vd).value();
                }
                worst = std::max(worst, std::abs(comm - want));
                scale = std::max(scale, std::abs(want));
            }
    REQUIRE(worst <= 1e-8 * (scale + 1e-30));
}

TEST_CASE("full curvature stack matches the layered finite-difference oracle") {
    // Comparisons are relative at 1e-5, floored per tensor family at a small
    // fraction of the family's raw component scale (the oracle's own stencil
    // noise lives at that scale).
    auto check_family = [&](std::span<const Jet> got, std::span<const double> want,
                            double floor, const char* label) {
        for (std::size_t k = 0; k < want.size(); ++k) {
            INFO(label << " component " << k);
            REQUIRE(oracles::rel_err(got[k].value(), want[k], floor) < 1e-5);
        }
    };
    for (const char* name : {"flat_4", "sphere_4", "hyperbolic_3", "schwarzschild"}) {
        auto chart = catalog_chart(name);
        auto pts = sample_points(chart, 2, 41);
        for (const auto& x : pts) {
            auto st = compute_stack(chart, x, 4, Depth::Bach);
            auto o = curvox::oracle_stack(chart, x, true);
            // absolute floor: a tenth of the raw curvature component scale, so
            // identically-zero components are compared at 1e-6 of that scale
            double rmax = 0;
            for (double v : o.riem_low) rmax = std::max(rmax, std::abs(v));
            const double floor = 0.1 * (rmax + 1e-3);
            INFO(name);
            check_family(st.gamma, o.gamma, floor, "gamma");
            check_family(st.riem, o.riem, floor, "riemann");
            check_family(st.ric, o.ric, floor, "ricci");
            check_family(st.schouten, o.p, floor, "schouten");
            check_family(st.weyl, o.weyl, floor, "weyl");
            check_family(st.cotton, o.cotton, floor, "cotton");
            check_family(st.bach, o.bach, floor, "bach");
        }
    }
}
