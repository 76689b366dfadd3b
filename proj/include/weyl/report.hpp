#pragma once

#include <algorithm>
#include <fstream>

#include "weyl/analysis.hpp"
#include "weyl/parallel.hpp"
#include "weyl/sampling.hpp"
#include "weyl/specfile.hpp"
#include "weyl/version.hpp"

namespace weyl {

struct AnalyzeOptions {
    int points = 20;
    unsigned long long seed = 42;
    int order = 4; // forced to >= 6 when the dimension-6 obstruction runs
    double tol = 1e-8;
    double rank_tol = 1e-8;
    bool skip_b6 = false;
    int threads = 0; // 0: hardware concurrency
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double maximum(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, x);
    return m;
}

inline Json stat_pair(const std::vector<double>& v) {
    return Json{{"max", maximum(v)}, {"median", median(v)}};
}

} // namespace detail

/// Run the full pipeline over seeded Halton points and assemble the report
/// document. Deterministic: identical inputs give byte-identical output.
inline Json analyze(const MetricChart& chart, const AnalyzeOptions& opt_in) {
    AnalyzeOptions opt = opt_in;
    const bool run_b6 = chart.n == 6 && !opt.skip_b6;
    if (run_b6) opt.order = std::max(opt.order, 6);

    auto points = sample_points(chart, opt.points, opt.seed);
    std::vector<PointAnalysis> rows(points.size());
    PointOptions popt;
    popt.order = opt.order;
    popt.tol = opt.tol;
    popt.rank_tol = opt.rank_tol;
    popt.with_b6 = run_b6;
    int threads = opt.threads > 0 ? opt.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
        rows[static_cast<std::size_t>(i)] = analyze_point(chart, points[static_cast<std::size_t>(i)], popt);
    });

    Json j;
    j["reportVersion"] = 1;
    j["tool"] = Json{{"name", "weyl"}, {"version", kVersion}};
    j["run"] = Json{{"points", opt.points}, {"seed", opt.seed},   {"order", opt.order},
                    {"tol", opt.tol},       {"rank_tol", opt.rank_tol}, {"skip_b6", opt.skip_b6}};
    j["conventions"] = Json{
        {"tractor_basis", "(Y, Z_1..Z_n, X); vectors stored as (sigma, mu^a, rho)"},
        {"signature", "counts are [positive, negative]"},
        {"fb_sharp_sign", kFbSharpSign},
        {"g_symmetrisation",
         "symmetric trace-free part returned; antisymmetric remainder norm reported"},
        {"loop_orientation",
         "square +e_j, +e_i, -e_j, -e_i: closure deviation tends to +eps^2 Omega_ij I"},
        {"norms", "auxiliary Riemannian frame (metric eigenvalue signs flipped)"},
    };
    j["chart"] = chart_to_json(chart);

    Json pts = Json::array();
    std::vector<double> v_einstein, v_parallel, v_cspace_k, v_d_k, v_g_rel, v_rank, v_b6;
    int ok_count = 0, wg_count = 0, rank_small = 0, rank_zero = 0;
    bool all_ok = true;
    for (const auto& p : rows) {
        Json row;
        row["x"] = p.x;
        row["ok"] = p.ok;
        if (!p.ok) {
            row["error"] = p.error;
            pts.push_back(row);
            all_ok = false;
            continue;
        }
        ++ok_count;
        row["einstein_residual"] = p.einstein_residual;
        row["scale"] = Json{{"sigma", p.sigma_value},
                            {"sigma_zero", p.sigma_zero},
                            {"conformal_einstein_residual", p.conf_einstein_sigma},
                            {"parallel_residual", p.parallel_sigma},
                            {"c_space_residual", p.c_space_sigma},
                            {"d_residual", p.d_sigma},
                            {"h_ii", p.h_ii},
                            {"scalar_extension_diff", p.scalar_ext_diff}};
        row["curvature_map"] = Json{{"omega_norm", p.omega_norm},
                                    {"nabla_omega_norm", p.nabla_omega_norm},
                                    {"rank", p.rank},
                                    {"kernel_dim", p.kernel_dim},
                                    {"skew_invariants_vanish", p.skew_vanish},
                                    {"sigma_max", p.map_sigma_max},
                                    {"kernel_candidate", p.kernel_candidate},
                                    {"kernel_basis", p.kernel},
                                    {"c_space_residual", p.c_space_kernel},
                                    {"d_residual", p.d_kernel},
                                    {"candidate_parallel_residual", p.cand_parallel_residual},
                                    {"candidate_degenerate", p.cand_degenerate}};
        row["weak_genericity"] = Json{{"weakly_generic", p.weakly_generic},
                                      {"detL", p.detL},
                                      {"L_sigma_min", p.l_sigma_min},
                                      {"L_sigma_max", p.l_sigma_max}};
        if (p.k_computed)
            row["k_candidate"] = Json{{"k_low", p.k_low},
                                      {"norm", p.k_norm},
                                      {"curl", p.k_curl},
                                      {"exact", p.k_exact},
                                      {"c_residual", p.c_residual_with_k},
                                      {"b_residual", p.b_residual_with_k}};
        if (p.weakly_generic)
            row["g_invariant"] = Json{{"norm", p.g_norm},
                                      {"scale", p.g_scale},
                                      {"asym_norm", p.g_asym},
                                      {"trace", p.g_trace}};
        if (p.b6_done)
            row["b6"] = Json{{"norm", p.b6_norm},        {"off_slot_norm", p.b6_off_slot},
                             {"trace", p.b6_trace},      {"sym_norm", p.b6_sym},
                             {"asym_norm", p.b6_asym},   {"scale", p.b6_scale}};
        pts.push_back(row);

        v_einstein.push_back(p.einstein_residual);
        v_parallel.push_back(p.parallel_sigma);
        v_cspace_k.push_back(p.c_space_kernel);
        v_d_k.push_back(p.d_kernel);
        v_rank.push_back(static_cast<double>(p.rank));
        if (p.weakly_generic) {
            ++wg_count;
            v_g_rel.push_back(p.g_norm / p.g_scale);
        }
        if (p.rank <= chart.n + 1) ++rank_small;
        if (p.rank == 0) ++rank_zero;
        if (p.b6_done) v_b6.push_back(p.b6_norm / p.b6_scale);
    }
    j["points"] = pts;

    Json agg;
    agg["points_completed"] = ok_count;
    agg["weakly_generic_fraction"] = ok_count ? static_cast<double>(wg_count) / ok_count : 0.0;
    agg["einstein_residual"] = detail::stat_pair(v_einstein);
    agg["parallel_residual"] = detail::stat_pair(v_parallel);
    agg["kernel_c_space_residual"] = detail::stat_pair(v_cspace_k);
    agg["kernel_d_residual"] = detail::stat_pair(v_d_k);
    agg["rank"] = Json{{"max", detail::maximum(v_rank)},
                       {"small_fraction", ok_count ? static_cast<double>(rank_small) / ok_count : 0.0}};
    if (!v_g_rel.empty()) agg["g_relative"] = detail::stat_pair(v_g_rel);
    if (!v_b6.empty()) agg["b6_relative"] = detail::stat_pair(v_b6);
    j["aggregates"] = agg;

    Json verdicts;
    verdicts["einstein"] =
        all_ok && ok_count > 0 && detail::maximum(v_einstein) <= opt.tol &&
        detail::maximum(v_parallel) <= opt.tol;
    verdicts["conformally_einstein_candidate"] = ok_count > 0 && rank_small == ok_count;
    verdicts["conformally_flat_consistent"] = ok_count > 0 && rank_zero == ok_count;
    j["verdicts"] = verdicts;
    return j;
}

inline void write_report(const Json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot write report to '" + path + "'");
    out << report.dump(2) << "\n";
}

/// Human-readable verdict lines for the classify command.
inline std::string classify_text(const Json& report) {
    std::ostringstream os;
    const auto& v = report.at("verdicts");
    const auto& a = report.at("aggregates");
    os << "chart: " << report.at("chart").at("name").get<std::string>() << "\n";
    os << "  einstein (sampled):                " << (v.at("einstein").get<bool>() ? "yes" : "no")
       << "\n";
    os << "  conformally einstein candidate:    "
       << (v.at("conformally_einstein_candidate").get<bool>() ? "yes" : "no") << "\n";
    os << "  conformally flat consistent:       "
       << (v.at("conformally_flat_consistent").get<bool>() ? "yes" : "no") << "\n";
    os << "  weakly generic fraction:           " << a.at("weakly_generic_fraction").get<double>()
       << "\n";
    os << "  max rank of (Omega, nabla Omega):  " << a.at("rank").at("max").get<double>() << "\n";
    os << "  max parallel residual:             "
       << a.at("parallel_residual").at("max").get<double>() << "\n";
    if (a.contains("g_relative"))
        os << "  median relative G:                 " << a.at("g_relative").at("median").get<double>()
           << "\n";
    if (a.contains("b6_relative"))
        os << "  median relative B6:                "
           << a.at("b6_relative").at("median").get<double>() << "\n";
    return os.str();
}

} // namespace weyl
