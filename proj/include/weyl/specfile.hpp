#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "weyl/curvature.hpp"

namespace weyl {

using Json = nlohmann::ordered_json;

/**
 * Metric spec file, format "specVersion": 1. The metric is given as the rows
 * of its lower triangle; entries are expression strings, with "0" or ""
 * denoting structural zeros. The signature is either the string "riemannian"
 * or a pair [positive count, negative count]. See docs/metric-spec-format.md.
 */
inline Json chart_to_json(const MetricChart& chart) {
    Json j;
    j["specVersion"] = 1;
    j["name"] = chart.name;
    j["dimension"] = chart.n;
    if (chart.sig_neg == 0)
        j["signature"] = "riemannian";
    else
        j["signature"] = Json::array({chart.sig_pos, chart.sig_neg});
    j["coordinates"] = chart.coords;
    Json rows = Json::array();
    for (int i = 0; i < chart.n; ++i) {
        Json row = Json::array();
        for (int k = 0; k <= i; ++k) {
            const auto& t = chart.metric_text[MetricChart::tri_index(i, k)];
            row.push_back(t.empty() ? "0" : t);
        }
        rows.push_back(row);
    }
    j["metric"] = rows;
    if (!chart.params.empty()) j["parameters"] = chart.params;
    Json dom;
    for (int i = 0; i < chart.n; ++i)
        dom[chart.coords[static_cast<std::size_t>(i)]] =
            Json::array({chart.domain[static_cast<std::size_t>(i)][0], chart.domain[static_cast<std::size_t>(i)][1]});
    j["domain"] = dom;
    if (!chart.scale_text.empty()) j["scale"] = chart.scale_text;
    if (!chart.conformal_factor_text.empty()) j["conformal_factor"] = chart.conformal_factor_text;
    if (!chart.note.empty()) j["note"] = chart.note;
    return j;
}

inline MetricChart chart_from_json(const Json& j) {
    auto need = [&](const char* field) -> const Json& {
        if (!j.contains(field)) throw SpecError(std::string("missing field '") + field + "'");
        return j.at(field);
    };
    if (need("specVersion").get<int>() != 1) throw SpecError("unsupported specVersion");
    const std::string name = need("name").get<std::string>();
    const int n = need("dimension").get<int>();
    if (n < 3) throw SpecError("field 'dimension': metric spec files require dimension >= 3");

    int sp = 0, sq = 0;
    const Json& sig = need("signature");
    if (sig.is_string()) {
        if (sig.get<std::string>() != "riemannian")
            throw SpecError("field 'signature': expected \"riemannian\" or [p, q]");
        sp = n;
        sq = 0;
    } else if (sig.is_array() && sig.size() == 2) {
        sp = sig[0].get<int>();
        sq = sig[1].get<int>();
    } else {
        throw SpecError("field 'signature': expected \"riemannian\" or [p, q]");
    }

    std::vector<std::string> coords = need("coordinates").get<std::vector<std::string>>();

    const Json& rows = need("metric");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw SpecError("field 'metric': expected one lower-triangle row per dimension");
    std::vector<std::string> tri(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i) {
        const Json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != i + 1)
            throw SpecError("field 'metric': row " + std::to_string(i) + " must have " +
                            std::to_string(i + 1) + " entries");
        for (int k = 0; k <= i; ++k) {
            std::string e = row[static_cast<std::size_t>(k)].get<std::string>();
            if (e == "0") e.clear();
            tri[MetricChart::tri_index(i, k)] = std::move(e);
        }
    }

    std::map<std::string, double> params;
    if (j.contains("parameters")) params = j.at("parameters").get<std::map<std::string, double>>();

    const Json& dom = need("domain");
    std::vector<std::array<double, 2>> domain(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& cname = coords[static_cast<std::size_t>(i)];
        if (!dom.contains(cname))
            throw SpecError("field 'domain': missing interval for coordinate '" + cname + "'");
        const Json& iv = dom.at(cname);
        if (!iv.is_array() || iv.size() != 2)
            throw SpecError("field 'domain': interval for '" + cname + "' must be [lo, hi]");
        domain[static_cast<std::size_t>(i)] = {iv[0].get<double>(), iv[1].get<double>()};
    }

    std::string scale = j.value("scale", std::string{});
    std::string factor = j.value("conformal_factor", std::string{});
    std::string note = j.value("note", std::string{});

    return make_chart(name, n, sp, sq, std::move(coords), std::move(tri), std::move(params),
                      std::move(domain), std::move(scale), std::move(factor), std::move(note));
}

/// Load and validate a spec file; the signature is verified at the domain
/// midpoint (declared counts against metric eigenvalues).
inline MetricChart load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SpecError("invalid JSON in '" + path + "': " + e.what());
    }
    MetricChart chart = chart_from_json(j);
    // midpoint validation: metric_at checks the determinant and the declared
    // signature against the eigenvalue sign counts
    try {
        (void)metric_at(chart, chart.midpoint(), 0);
    } catch (const NumericError& e) {
        throw SpecError(std::string("midpoint validation failed: ") + e.what());
    }
    return chart;
}

inline void save_spec(const MetricChart& chart, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot write spec file '" + path + "'");
    out << chart_to_json(chart).dump(2) << "\n";
}

} // namespace weyl
