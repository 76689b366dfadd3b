// weyl: conformal curvature stacks and conformally-Einstein obstruction
// analysis for metrics given by coordinate expressions.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "weyl/catalog.hpp"
#include "weyl/report.hpp"
#include "weyl/scales.hpp"

namespace {

int run_analyze(const std::string& file, const weyl::AnalyzeOptions& opt, const std::string& out,
                bool classify_only) {
    weyl::MetricChart chart = weyl::load_spec(file);
    weyl::Json report = weyl::analyze(chart, opt);
    if (classify_only) {
        std::cout << weyl::classify_text(report);
    } else if (out.empty() || out == "-") {
        std::cout << report.dump(2) << "\n";
    } else {
        weyl::write_report(report, out);
    }
    return 0;
}

int run_rescale(const std::string& file, const std::string& omega, const std::string& out) {
    weyl::MetricChart chart = weyl::load_spec(file);
    weyl::MetricChart hat = weyl::rescale_chart(chart, omega);
    if (out.empty() || out == "-")
        std::cout << weyl::chart_to_json(hat).dump(2) << "\n";
    else
        weyl::save_spec(hat, out);
    return 0;
}

int run_transport(const std::string& file, const std::string& curve, int steps,
                  const std::string& sigma_expr) {
    weyl::MetricChart chart = weyl::load_spec(file);

    std::vector<weyl::ExprPtr> exprs;
    std::size_t start = 0;
    while (start <= curve.size()) {
        std::size_t comma = curve.find(',', start);
        if (comma == std::string::npos) comma = curve.size();
        exprs.push_back(weyl::parse(curve.substr(start, comma - start)));
        start = comma + 1;
    }
    if (static_cast<int>(exprs.size()) != chart.n)
        throw weyl::SpecError("curve needs one expression per coordinate");

    // initial tractor: the scale tractor of sigma (or the chart scale, or 1)
    auto curve_fn = weyl::parametric_curve(exprs, chart);
    std::vector<double> x0(static_cast<std::size_t>(chart.n)), xd(static_cast<std::size_t>(chart.n));
    curve_fn(0.0, x0, xd);
    auto st = weyl::compute_stack(chart, x0, 3, weyl::Depth::Cotton);
    auto tg = weyl::tractor_geometry(st);
    weyl::Jet sigma = !sigma_expr.empty()
                          ? weyl::eval_jet(weyl::parse(sigma_expr), chart.ctx(), x0, 3)
                          : (chart.scale_ast ? weyl::eval_jet(chart.scale_ast, chart.ctx(), x0, 3)
                                             : weyl::Jet::constant(chart.n, 3, 1.0));
    auto I = weyl::scale_tractor(sigma, st, tg);
    std::vector<double> i0(I.comp.size());
    for (std::size_t i = 0; i < i0.size(); ++i) i0[i] = I.comp[i].value();

    auto tr = weyl::parallel_transport(chart, i0, curve_fn, steps);
    weyl::Json j;
    j["chart"] = chart.name;
    j["steps"] = tr.steps;
    j["initial"] = tr.initial;
    j["transported"] = tr.transported;
    j["h_start"] = tr.h_start;
    j["h_end"] = tr.h_end;
    j["h_drift"] = tr.h_drift;
    j["closure_deviation"] = tr.closure_deviation;
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal curvature and conformally-Einstein obstruction analysis"};
    app.require_subcommand(1);

    std::string file, out, omega_expr, curve, sigma_expr, dump_name;
    weyl::AnalyzeOptions opt;
    std::vector<std::string> skips;
    int steps = 1000;

    auto add_analyze_flags = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "metric spec file (JSON)")->required();
        cmd->add_option("--points", opt.points, "sample point count")->capture_default_str();
        cmd->add_option("--seed", opt.seed, "Halton sequence offset")->capture_default_str();
        cmd->add_option("--order", opt.order, "jet truncation order (>= 6 forced for n = 6)")
            ->capture_default_str();
        cmd->add_option("--tol", opt.tol, "verdict tolerance")->capture_default_str();
        cmd->add_option("--rank-tol", opt.rank_tol, "relative singular-value threshold")
            ->capture_default_str();
        cmd->add_option("--skip", skips, "skip a stage (recognised: b6)");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)")
            ->capture_default_str();
    };

    CLI::App* analyze = app.add_subcommand("analyze", "run the full obstruction pipeline");
    add_analyze_flags(analyze);
    analyze->add_option("--out", out, "report path ('-' for stdout)");

    CLI::App* classify = app.add_subcommand("classify", "print human-readable verdicts");
    add_analyze_flags(classify);

    CLI::App* rescale = app.add_subcommand("rescale", "emit the conformally rescaled spec");
    rescale->add_option("file", file, "metric spec file (JSON)")->required();
    rescale->add_option("--omega", omega_expr, "conformal exponent expression")->required();
    rescale->add_option("--out", out, "output spec path ('-' for stdout)");

    CLI::App* transport = app.add_subcommand("transport", "parallel-transport the scale tractor");
    transport->add_option("file", file, "metric spec file (JSON)")->required();
    transport->add_option("--curve", curve, "comma-separated coordinate expressions in t")
        ->required();
    transport->add_option("--steps", steps, "integration steps")->capture_default_str();
    transport->add_option("--sigma", sigma_expr, "scale expression (default: chart scale or 1)");

    CLI::App* catalog = app.add_subcommand("catalog", "built-in metric catalog");
    CLI::App* cat_list = catalog->add_subcommand("list", "list catalog entries");
    CLI::App* cat_dump = catalog->add_subcommand("dump", "dump one entry as a spec file");
    cat_dump->add_option("name", dump_name, "catalog entry")->required();
    cat_dump->add_option("--out", out, "output spec path ('-' for stdout)");
    catalog->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems exit 1, --help exits 0
    }

    try {
        for (const auto& s : skips) {
            if (s == "b6")
                opt.skip_b6 = true;
            else
                throw weyl::SpecError("unknown --skip stage '" + s + "'");
        }
        if (analyze->parsed()) return run_analyze(file, opt, out, false);
        if (classify->parsed()) return run_analyze(file, opt, out, true);
        if (rescale->parsed()) return run_rescale(file, omega_expr, out);
        if (transport->parsed()) return run_transport(file, curve, steps, sigma_expr);
        if (catalog->parsed()) {
            if (cat_list->parsed()) {
                for (const auto& name : weyl::catalog_names()) std::cout << name << "\n";
                return 0;
            }
            if (cat_dump->parsed()) {
                auto chart = weyl::catalog_chart(dump_name);
                if (out.empty() || out == "-")
                    std::cout << weyl::chart_to_json(chart).dump(2) << "\n";
                else
                    weyl::save_spec(chart, out);
                return 0;
            }
        }
    } catch (const weyl::ParseError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const weyl::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const weyl::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
