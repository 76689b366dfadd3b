#pragma once

#include <optional>
#include <string>

#include "weyl/obstructions.hpp"
#include "weyl/scales.hpp"

namespace weyl {

struct PointOptions {
    int order = 4;
    double tol = 1e-8;
    double rank_tol = 1e-8;
    bool with_b6 = false; // dimension-6 extraction; needs order >= 6
};

/// Everything the pipeline computes at one sample point. Residual fields are
/// NaN-free: stages that could not run are flagged instead.
struct PointAnalysis {
    std::vector<double> x;
    bool ok = true;
    std::string error;

    double einstein_residual = 0;

    // scale-candidate diagnostics (chart sigma, or 1 when absent)
    double sigma_value = 0;
    bool sigma_zero = false;
    double conf_einstein_sigma = 0;
    double parallel_sigma = 0;
    double c_space_sigma = 0;
    double d_sigma = 0;
    double h_ii = 0;
    double scalar_ext_diff = 0;

    // curvature map rank data
    double omega_norm = 0, nabla_omega_norm = 0;
    int rank = 0;
    int kernel_dim = 0;
    bool skew_vanish = false;
    double map_sigma_max = 0;
    std::vector<double> kernel_candidate;
    std::vector<std::vector<double>> kernel;
    double c_space_kernel = 0;
    double d_kernel = 0;
    double cand_parallel_residual = 0;
    double cand_gradient_scale = 0;
    bool cand_degenerate = false;

    // weak genericity and the K / G chain
    bool weakly_generic = false;
    double detL = 0, l_sigma_min = 0, l_sigma_max = 0;
    bool k_computed = false;
    std::vector<double> k_low;
    double k_norm = 0, k_curl = 0;
    bool k_exact = false;
    double c_residual_with_k = 0;
    double b_residual_with_k = 0;
    double g_norm = 0, g_scale = 0, g_asym = 0, g_trace = 0;

    // dimension-6 obstruction
    bool b6_done = false;
    double b6_norm = 0, b6_off_slot = 0, b6_trace = 0, b6_sym = 0, b6_asym = 0, b6_scale = 0;
};

inline PointAnalysis analyze_point(const MetricChart& chart, std::span<const double> x,
                                   const PointOptions& opt) {
    PointAnalysis p;
    p.x.assign(x.begin(), x.end());
    try {
        const int n = chart.n;
        auto st = compute_stack(chart, x, opt.order, Depth::Bach);
        auto tg = tractor_geometry(st);
        NormFrame frame = NormFrame::from_metric(metric_values(st), metric_inverse_values(st));

        p.einstein_residual = einstein_residual_norm(st);

        // scale candidate
        Jet sigma = chart.scale_ast ? eval_jet(chart.scale_ast, chart.ctx(), x, opt.order)
                                    : Jet::constant(n, opt.order, 1.0);
        p.sigma_value = sigma.value();
        p.sigma_zero = std::abs(sigma.value()) <= opt.tol;
        {
            TensorValue t;
            t.n = n;
            t.slots = {SlotKind::CoordDown, SlotKind::CoordDown};
            t.comp = conformal_einstein_residual(st, sigma);
            p.conf_einstein_sigma = aux_norm(t, frame);
        }
        p.parallel_sigma = parallel_residual(st, tg, sigma);
        StandardTractor tr = build_scale_tractor(st, tg, sigma);
        auto omega = tractor_curvature(st);
        auto omega_low = lower_tractor_slot(omega, 2, tg);
        auto domega = covariant_derivative(omega, st, &tg.tgamma);
        auto domega_low = lower_tractor_slot(domega, 3, tg);
        {
            double s = 0;
            for (const auto& j : omega_low.comp) s += j.value() * j.value();
            p.omega_norm = std::sqrt(s);
            s = 0;
            for (const auto& j : domega_low.comp) s += j.value() * j.value();
            p.nabla_omega_norm = std::sqrt(s);
        }
        auto cs = c_space_residual(st, omega, tr);
        p.c_space_sigma = cs.omega_contraction_norm;
        std::vector<double> trv = tr.to_vector(metric_inverse_values(st));
        p.d_sigma = d_residual(domega_low, trv);
        auto ext = scalar_extension_check(st, tg, sigma);
        p.h_ii = ext.h_ii;
        p.scalar_ext_diff = ext.diff;

        // rank / kernel data
        auto rk = rank_skew_test(omega_low, domega_low, opt.rank_tol, curvature_scale(st));
        p.rank = rk.rank;
        p.kernel_dim = static_cast<int>(rk.kernel.size());
        p.skew_vanish = rk.skew_invariants_vanish;
        p.map_sigma_max = rk.sigma_max;
        p.kernel = rk.kernel;
        p.kernel_candidate = rk.candidate;
        if (!rk.candidate.empty()) {
            StandardTractor kc = StandardTractor::from_vector(rk.candidate, metric_values(st));
            auto csk = c_space_residual(st, omega, kc);
            p.c_space_kernel = csk.omega_contraction_norm;
            p.d_kernel = d_residual(domega_low, rk.candidate);
            auto cp = candidate_parallel_check(st, tg, omega_low, rk.candidate, opt.rank_tol);
            p.cand_parallel_residual = cp.residual;
            p.cand_gradient_scale = cp.gradient_scale;
            p.cand_degenerate = cp.degenerate;
        }

        // weak genericity, K, G
        auto wg = weakly_generic_check(st);
        p.weakly_generic = wg.weakly_generic;
        p.detL = wg.detL_value;
        p.l_sigma_min = wg.sigma_min;
        p.l_sigma_max = wg.sigma_max;
        if (wg.weakly_generic) {
            auto K = conformal_K(wg, st);
            p.k_computed = true;
            p.k_low = K.k_low;
            p.k_norm = K.norm;
            p.k_curl = K.curl_norm;
            p.k_exact = K.exact;
            // residual of [C] with the candidate K
            double res2 = 0;
            for (int d = 0; d < n; ++d)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        double v = st.cotton[st.i3(d, a, b)].value();
                        for (int c = 0; c < n; ++c)
                            v += K.k_up[static_cast<std::size_t>(c)].value() *
                                 st.weyl[st.i4(c, d, a, b)].value();
                        res2 += v * v;
                    }
            p.c_residual_with_k = std::sqrt(res2);
            std::vector<double> kup(static_cast<std::size_t>(n));
            for (int e = 0; e < n; ++e) kup[static_cast<std::size_t>(e)] = K.k_up[static_cast<std::size_t>(e)].value();
            TensorValue bres;
            bres.n = n;
            bres.slots = {SlotKind::CoordDown, SlotKind::CoordDown};
            bres.comp = b_residual(st, kup);
            p.b_residual_with_k = aux_norm(bres, frame);
            auto gi = g_invariant(st, wg);
            p.g_norm = gi.norm;
            p.g_scale = gi.scale;
            p.g_asym = gi.asym_norm;
            p.g_trace = gi.trace;
        }

        if (n == 6 && opt.with_b6) {
            auto w = w_tractor(st);
            auto fb = fb_apply(w, st, tg);
            auto b6 = b6_extract(fb, st);
            p.b6_done = true;
            p.b6_norm = b6.norm;
            p.b6_off_slot = b6.off_slot_norm;
            p.b6_trace = b6.trace;
            p.b6_sym = b6.sym_norm;
            p.b6_asym = b6.asym_norm;
            p.b6_scale = b6.scale;
        }
    } catch (const Error& e) {
        p.ok = false;
        p.error = e.what();
    }
    return p;
}

} // namespace weyl
