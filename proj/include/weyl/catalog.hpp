#pragma once

#include <string>
#include <vector>

#include "weyl/chart.hpp"

namespace weyl {

/**
 * Built-in metric catalog. Every entry validates under the spec-file loader
 * and completes the full analysis pipeline at default settings.
 */
inline std::vector<std::string> catalog_names() {
    return {
        "flat_3",      "flat_4",          "flat_6",
        "sphere_3",    "sphere_4",        "sphere_6",
        "hyperbolic_3","hyperbolic_4",
        "schwarzschild", "schwarzschild_riemannian", "bumped_schwarzschild",
        "pp_wave",     "s2xs2_equal",     "s2xs4_einstein",
        "conformally_flat_generic",
    };
}

namespace detail {

inline MetricChart flat_chart(int n) {
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
    std::vector<std::string> tri(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i) tri[MetricChart::tri_index(i, i)] = "1";
    std::vector<std::array<double, 2>> dom(static_cast<std::size_t>(n), {-1.0, 1.0});
    return make_chart("flat_" + std::to_string(n), n, n, 0, coords, tri, {}, dom, "1", "",
                      "Euclidean metric; curvature stack vanishes identically.");
}

/// Round unit sphere in nested polar coordinates; g_kk = prod_{j<k} sin^2.
inline MetricChart sphere_chart(int n) {
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("t" + std::to_string(i));
    std::vector<std::string> tri(static_cast<std::size_t>(n) * (n + 1) / 2);
    std::string prod;
    for (int k = 0; k < n; ++k) {
        tri[MetricChart::tri_index(k, k)] = prod.empty() ? "1" : prod;
        prod += (prod.empty() ? "" : "*") + ("sin(t" + std::to_string(k + 1) + ")^2");
    }
    std::vector<std::array<double, 2>> dom(static_cast<std::size_t>(n), {0.6, 2.5});
    dom.back() = {0.2, 6.0};
    return make_chart("sphere_" + std::to_string(n), n, n, 0, coords, tri, {}, dom, "1", "",
                      "Unit round sphere; Einstein with Ric = (n-1) g, conformally flat.");
}

/// Hyperbolic space in the upper half-space model, g = dx^2 / y^2.
inline MetricChart hyperbolic_chart(int n) {
    std::vector<std::string> coords;
    for (int i = 1; i < n; ++i) coords.push_back("x" + std::to_string(i));
    coords.push_back("y");
    std::vector<std::string> tri(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i) tri[MetricChart::tri_index(i, i)] = "1/y^2";
    std::vector<std::array<double, 2>> dom(static_cast<std::size_t>(n), {-1.0, 1.0});
    dom.back() = {0.8, 2.0};
    return make_chart("hyperbolic_" + std::to_string(n), n, n, 0, coords, tri, {}, dom, "1", "",
                      "Unit hyperbolic space; Einstein with Ric = -(n-1) g, conformally flat.");
}

inline MetricChart schwarzschild_chart(bool riemannian, bool bumped) {
    std::vector<std::string> coords = {"t", "r", "th", "ph"};
    std::vector<std::string> tri(10);
    std::string gtt = riemannian ? "(1-2*m/r)" : "-(1-2*m/r)";
    std::string grr = "1/(1-2*m/r)";
    std::string gthth = "r^2";
    std::string gphph = "r^2*sin(th)^2";
    if (bumped) {
        // smooth positive factors keep the signature; the perturbation is not
        // conformally Einstein in any scale
        gtt = gtt + "*(1+0.3*sin(r))";
        grr = grr + "*(1+0.2*cos(th))";
    }
    tri[MetricChart::tri_index(0, 0)] = gtt;
    tri[MetricChart::tri_index(1, 1)] = grr;
    tri[MetricChart::tri_index(2, 2)] = gthth;
    tri[MetricChart::tri_index(3, 3)] = gphph;
    std::vector<std::array<double, 2>> dom = {{0.0, 1.0}, {4.0, 8.0}, {0.7, 2.4}, {0.2, 6.0}};
    std::string name = bumped ? "bumped_schwarzschild"
                              : (riemannian ? "schwarzschild_riemannian" : "schwarzschild");
    std::string note =
        bumped ? "Generic non-Einstein perturbation of the Riemannian Schwarzschild chart."
               : "Ricci-flat exterior chart; weakly generic on the sampled domain.";
    return make_chart(name, 4, riemannian || bumped ? 4 : 3, riemannian || bumped ? 0 : 1, coords,
                      tri, {{"m", 1.0}}, dom, bumped ? "" : "1", "", note);
}

inline MetricChart pp_wave_chart() {
    std::vector<std::string> coords = {"u", "v", "x", "y"};
    std::vector<std::string> tri(10);
    tri[MetricChart::tri_index(0, 0)] = "(x^2-y^2)*sin(u)";
    tri[MetricChart::tri_index(1, 0)] = "1";
    tri[MetricChart::tri_index(2, 2)] = "1";
    tri[MetricChart::tri_index(3, 3)] = "1";
    std::vector<std::array<double, 2>> dom = {{0.2, 3.0}, {0.0, 1.0}, {0.4, 1.4}, {0.4, 1.4}};
    return make_chart("pp_wave", 4, 3, 1, coords, tri, {}, dom, "1", "",
                      "Vacuum plane wave: Ric = 0 with C != 0; the Weyl map is degenerate, so "
                      "the chart is Einstein but nowhere weakly generic.");
}

inline MetricChart s2xs2_chart() {
    std::vector<std::string> coords = {"a1", "b1", "a2", "b2"};
    std::vector<std::string> tri(10);
    tri[MetricChart::tri_index(0, 0)] = "1";
    tri[MetricChart::tri_index(1, 1)] = "sin(a1)^2";
    tri[MetricChart::tri_index(2, 2)] = "1";
    tri[MetricChart::tri_index(3, 3)] = "sin(a2)^2";
    std::vector<std::array<double, 2>> dom = {{0.6, 2.5}, {0.2, 6.0}, {0.6, 2.5}, {0.2, 6.0}};
    return make_chart("s2xs2_equal", 4, 4, 0, coords, tri, {}, dom, "1", "",
                      "Product of unit 2-spheres; Einstein, not conformally flat.");
}

inline MetricChart s2xs4_chart() {
    std::vector<std::string> coords = {"a1", "b1", "a2", "b2", "c2", "d2"};
    std::vector<std::string> tri(21);
    tri[MetricChart::tri_index(0, 0)] = "1";
    tri[MetricChart::tri_index(1, 1)] = "sin(a1)^2";
    tri[MetricChart::tri_index(2, 2)] = "3";
    tri[MetricChart::tri_index(3, 3)] = "3*sin(a2)^2";
    tri[MetricChart::tri_index(4, 4)] = "3*sin(a2)^2*sin(b2)^2";
    tri[MetricChart::tri_index(5, 5)] = "3*sin(a2)^2*sin(b2)^2*sin(c2)^2";
    std::vector<std::array<double, 2>> dom = {{0.6, 2.5}, {0.2, 6.0}, {0.6, 2.5},
                                              {0.6, 2.5}, {0.6, 2.5}, {0.2, 6.0}};
    return make_chart("s2xs4_einstein", 6, 6, 0, coords, tri, {}, dom, "1", "",
                      "S^2(1) x S^4(sqrt 3): both factors have Ric = g, so the product is "
                      "Einstein in dimension 6.");
}

inline MetricChart conformally_flat_chart() {
    std::vector<std::string> coords = {"x1", "x2", "x3", "x4"};
    std::vector<std::string> tri(10);
    for (int i = 0; i < 4; ++i)
        tri[MetricChart::tri_index(i, i)] = "exp(2*(sin(x1)*x2))";
    std::vector<std::array<double, 2>> dom(4, {-1.0, 1.0});
    return make_chart("conformally_flat_generic", 4, 4, 0, coords, tri, {}, dom,
                      "exp(sin(x1)*x2)", "sin(x1)*x2",
                      "exp(2 w) delta with w = sin(x1) x2; Weyl and Cotton vanish identically.");
}

} // namespace detail

inline MetricChart catalog_chart(const std::string& name) {
    if (name == "flat_3") return detail::flat_chart(3);
    if (name == "flat_4") return detail::flat_chart(4);
    if (name == "flat_6") return detail::flat_chart(6);
    if (name == "sphere_3") return detail::sphere_chart(3);
    if (name == "sphere_4") return detail::sphere_chart(4);
    if (name == "sphere_6") return detail::sphere_chart(6);
    if (name == "hyperbolic_3") return detail::hyperbolic_chart(3);
    if (name == "hyperbolic_4") return detail::hyperbolic_chart(4);
    if (name == "schwarzschild") return detail::schwarzschild_chart(false, false);
    if (name == "schwarzschild_riemannian") return detail::schwarzschild_chart(true, false);
    if (name == "bumped_schwarzschild") return detail::schwarzschild_chart(true, true);
    if (name == "pp_wave") return detail::pp_wave_chart();
    if (name == "s2xs2_equal") return detail::s2xs2_chart();
    if (name == "s2xs4_einstein") return detail::s2xs4_chart();
    if (name == "conformally_flat_generic") return detail::conformally_flat_chart();
    throw SpecError("unknown catalog entry '" + name + "'");
}

} // namespace weyl
