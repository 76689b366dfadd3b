#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "weyl/error.hpp"
#include "weyl/expr.hpp"

namespace weyl {

/**
 * Coordinate description of a (pseudo-)Riemannian metric: dimension,
 * signature as (positive count, negative count), coordinate names, the lower
 * triangle of component expressions, parameter values, and the sampling box.
 * Charts are immutable after construction; evaluation is pointwise and
 * re-entrant.
 */
struct MetricChart {
    std::string name;
    int n = 0;
    int sig_pos = 0, sig_neg = 0;
    std::vector<std::string> coords;
    // lower triangle, row-major: entry (i, j) with i >= j at i*(i+1)/2 + j.
    std::vector<std::string> metric_text;
    std::vector<ExprPtr> metric_ast;
    std::map<std::string, double> params;
    std::vector<std::array<double, 2>> domain;
    std::string scale_text;            // optional Einstein-scale candidate sigma
    ExprPtr scale_ast;
    std::string conformal_factor_text; // optional omega recorded by rescaling
    ExprPtr conformal_factor_ast;
    std::string note;                  // free-form doc line

    static std::size_t tri_index(int i, int j) {
        if (j > i) std::swap(i, j);
        return static_cast<std::size_t>(i) * (i + 1) / 2 + static_cast<std::size_t>(j);
    }

    const ExprPtr& metric_entry(int i, int j) const { return metric_ast[tri_index(i, j)]; }

    EvalContext ctx() const { return EvalContext{coords, params}; }

    std::vector<double> midpoint() const {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] =
                0.5 * (domain[static_cast<std::size_t>(i)][0] + domain[static_cast<std::size_t>(i)][1]);
        return x;
    }

    bool in_domain(std::span<const double> x, double slack = 1e-12) const {
        for (int i = 0; i < n; ++i) {
            const auto& iv = domain[static_cast<std::size_t>(i)];
            if (x[static_cast<std::size_t>(i)] < iv[0] - slack || x[static_cast<std::size_t>(i)] > iv[1] + slack)
                return false;
        }
        return true;
    }
};

/// Build a chart from the lower triangle of expression strings. Empty strings
/// denote zero entries. Throws SpecError / ParseError on invalid input.
inline MetricChart make_chart(std::string name, int n, int sig_pos, int sig_neg,
                              std::vector<std::string> coords,
                              std::vector<std::string> lower_triangle,
                              std::map<std::string, double> params,
                              std::vector<std::array<double, 2>> domain,
                              std::string scale = {}, std::string conformal_factor = {},
                              std::string note = {}) {
    MetricChart c;
    c.name = std::move(name);
    c.n = n;
    c.sig_pos = sig_pos;
    c.sig_neg = sig_neg;
    c.coords = std::move(coords);
    c.metric_text = std::move(lower_triangle);
    c.params = std::move(params);
    c.domain = std::move(domain);
    c.scale_text = std::move(scale);
    c.conformal_factor_text = std::move(conformal_factor);
    c.note = std::move(note);

    if (c.n < 2) throw SpecError("chart dimension must be at least 2");
    if (c.n > 6) throw SpecError("chart dimension above 6 is not supported");
    if (c.sig_pos + c.sig_neg != c.n) throw SpecError("signature counts must sum to the dimension");
    if (static_cast<int>(c.coords.size()) != c.n) throw SpecError("coordinate count must equal dimension");
    if (c.metric_text.size() != static_cast<std::size_t>(c.n) * (c.n + 1) / 2)
        throw SpecError("metric must provide the full lower triangle");
    if (c.domain.size() != static_cast<std::size_t>(c.n))
        throw SpecError("domain must provide one interval per coordinate");
    for (const auto& iv : c.domain)
        if (!(iv[0] <= iv[1])) throw SpecError("domain interval is empty");
    for (int i = 0; i < c.n; ++i) {
        const auto& name_i = c.coords[static_cast<std::size_t>(i)];
        if (name_i.empty()) throw SpecError("empty coordinate name");
        if (name_i == "pi") throw SpecError("coordinate name 'pi' is reserved");
        if (c.params.count(name_i)) throw SpecError("coordinate '" + name_i + "' shadows a parameter");
        for (int j = 0; j < i; ++j)
            if (c.coords[static_cast<std::size_t>(j)] == name_i)
                throw SpecError("duplicate coordinate name '" + name_i + "'");
    }

    auto check_symbols = [&](const ExprPtr& ast, const std::string& where) {
        std::vector<std::string> syms;
        collect_symbols(ast, syms);
        for (const auto& s : syms) {
            bool known = c.params.count(s) > 0;
            for (const auto& co : c.coords) known = known || co == s;
            if (!known) throw SpecError("unknown identifier '" + s + "' in " + where);
        }
    };

    auto parse_field = [](const std::string& text, const std::string& where) {
        try {
            return parse(text);
        } catch (const ParseError& e) {
            throw SpecError(where + ": " + e.what());
        }
    };
    c.metric_ast.resize(c.metric_text.size());
    for (int i = 0; i < c.n; ++i)
        for (int k = 0; k <= i; ++k) {
            const std::size_t at = MetricChart::tri_index(i, k);
            const auto& text = c.metric_text[at];
            if (text.empty()) continue;
            const std::string where =
                "metric component (" + std::to_string(i) + "," + std::to_string(k) + ")";
            c.metric_ast[at] = parse_field(text, where);
            check_symbols(c.metric_ast[at], where);
        }
    if (!c.scale_text.empty()) {
        c.scale_ast = parse_field(c.scale_text, "scale");
        check_symbols(c.scale_ast, "scale");
    }
    if (!c.conformal_factor_text.empty()) {
        c.conformal_factor_ast = parse_field(c.conformal_factor_text, "conformal factor");
        check_symbols(c.conformal_factor_ast, "conformal factor");
    }
    return c;
}

/// Conformally rescale a chart at the expression level: every metric entry
/// becomes exp(2*omega) * entry, the scale candidate (if any) becomes
/// exp(omega) * scale, and omega is recorded (composed when already present).
inline MetricChart rescale_chart(const MetricChart& base, const std::string& omega,
                                 std::string new_name = {}) {
    parse(omega); // validate before composing text
    auto wrap = [&](const std::string& entry) -> std::string {
        if (entry.empty()) return entry;
        return "exp(2*(" + omega + "))*(" + entry + ")";
    };
    std::vector<std::string> tri(base.metric_text.size());
    for (std::size_t k = 0; k < tri.size(); ++k) tri[k] = wrap(base.metric_text[k]);

    std::string scale;
    if (!base.scale_text.empty()) scale = "exp(" + omega + ")*(" + base.scale_text + ")";

    std::string factor = base.conformal_factor_text.empty()
                             ? omega
                             : "(" + base.conformal_factor_text + ")+(" + omega + ")";

    return make_chart(new_name.empty() ? base.name + "_rescaled" : std::move(new_name), base.n,
                      base.sig_pos, base.sig_neg, base.coords, std::move(tri), base.params,
                      base.domain, std::move(scale), std::move(factor), base.note);
}

} // namespace weyl
