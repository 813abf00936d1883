#include "hmftrace/report.hpp"

#include <cmath>
#include <sstream>

#include "hmftrace/error.hpp"
#include "hmftrace/lattice.hpp"
#include "hmftrace/zeta.hpp"

namespace hmf {

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json term_json(const std::string& term, const TermResult& t) {
    Json comps = Json::array();
    for (const auto& [name, v] : t.components) comps.push_back({{"name", name}, {"re", v.real()}, {"im", v.imag()}});
    return Json{{"term", term},
                {"value_re", t.value.real()},
                {"value_im", t.value.imag()},
                {"constant", complex_json(t.constant)},
                {"A_dependent", t.a_dependent},
                {"A_s_coeff", complex_json(t.a_s_coeff)},
                {"A_1ms_coeff", complex_json(t.a_1ms_coeff)},
                {"components", comps},
                {"error_estimate", t.error_estimate}};
}

namespace {

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

Eigen::VectorXd diag2(double x) { return Eigen::VectorXd::Constant(2, x); }

}  // namespace

Json field_info_report(const RunConfig& config) {
    const FieldEmbedding k = config_field(config);
    const FieldElement eps = fundamental_unit(k);
    const FieldElement eps2 = fundamental_totally_positive_unit_exact(k);
    const MultiplierGroup M = hilbert_multipliers(k);
    const EmbeddedLattice L = ring_of_integers_lattice(k);
    const ZetaContext ctx = hilbert_zeta_context(k, 0);
    return Json{{"command", "field-info"},
                {"field", k.name()},
                {"radicand", k.radicand},
                {"discriminant", k.discriminant},
                {"degree", k.degree},
                {"omega_trace", k.omega_trace},
                {"omega_norm", k.omega_norm},
                {"basis_matrix", matrix_json(k.basis_matrix)},
                {"fundamental_unit_coords", eps.to_string()},
                {"fundamental_unit_embeddings", vector_json(embed(k, eps))},
                {"fundamental_unit_norm", static_cast<double>(norm(k, eps))},
                {"multiplier_generator_coords", eps2.to_string()},
                {"multiplier_embeddings", vector_json(embed(k, eps2))},
                {"regulator", std::log(std::abs(embed(k, eps)[0]))},
                {"E_matrix", matrix_json(M.E)},
                {"det_E", M.det_E},
                {"covolume", covolume(L)},
                {"residue_at_one", residue_at_one(ctx)}};
}

Json zeta_report(const RunConfig& config, Complex s, int m, const std::string& method) {
    const FieldEmbedding k = config_field(config);
    const ZetaContext ctx = hilbert_zeta_context(k, m);
    ZetaValue z;
    if (method == "direct") {
        z = zeta_direct(ctx, s);
    } else if (method == "continued") {
        z = zeta_continued(ctx, s);
    } else if (method == "xi") {
        z = completed_xi(ctx, s);
    } else if (method == "residue") {
        z.value = residue_at_one(ctx);
        z.method = "residue";
    } else {
        fail(ErrorKind::Usage, "unknown zeta method '" + method + "'");
    }
    return Json{{"command", "zeta"},
                {"field", k.name()},
                {"s", complex_json(s)},
                {"m", m},
                {"value_re", z.value.real()},
                {"value_im", z.value.imag()},
                {"method", method},
                {"error_estimate", z.error_estimate}};
}

Json transforms_report(const RunConfig& config) {
    const TransformTriple tr(config_psi(config));
    Json table = Json::array();
    const double gs = tr.g_support(0);
    for (int i = 0; i <= 10; ++i) {
        const double w = 0.9 * i;
        const double u = gs * i / 10.0;
        const double r = 0.5 * i;
        table.push_back({{"w", w},
                         {"Q", tr.Q(diag2(w))},
                         {"u", u},
                         {"g", tr.g(diag2(u))},
                         {"r", r},
                         {"h", tr.h(diag2(r))}});
    }
    Json support = Json::array();
    for (int k = 0; k < tr.degree(); ++k) support.push_back(tr.g_support(k));
    return Json{{"command", "transforms"},
                {"psi_centers", config.psi_centers},
                {"psi_widths", config.psi_widths},
                {"psi_amplitude", config.psi_amplitude},
                {"g_support", support},
                {"g0", tr.g(diag2(0.0))},
                {"h0", tr.h(diag2(0.0))},
                {"table", table}};
}

Json trace_report(const RunConfig& config, const std::string& term) {
    static const char* names[] = {"elliptic", "mixed", "parabolic", "hyp-par", "all"};
    if (std::find(std::begin(names), std::end(names), term) == std::end(names))
        fail(ErrorKind::Usage, "unknown trace term '" + term + "'");
    const FieldEmbedding k = config_field(config);
    const TransformTriple tr(config_psi(config));
    const AutomorphicFormData form = config_form(config, k);
    const TraceOptions opt = config_trace_options(config);
    const ClassInventory inv = demo_inventory(k, tr, form, opt);
    const TraceReport rep = assemble_geometric_trace(config.A, tr, form, inv, opt);
    const std::pair<const char*, const TermResult*> parts[] = {
        {"elliptic", &rep.elliptic}, {"mixed", &rep.mixed}, {"parabolic", &rep.parabolic}, {"hyp-par", &rep.hyp_par}};
    Json head{{"command", "trace"}, {"field", k.name()}, {"A", config.A}, {"s", complex_json(form.s)},
              {"m_u", config.form_m_u}, {"form", config.form}};
    if (term != "all") {
        for (const auto& [name, t] : parts)
            if (term == name) head.update(term_json(term, *t));
        return head;
    }
    head.update(term_json("all", rep.total));
    Json terms = Json::object();
    for (const auto& [name, t] : parts) terms[name] = term_json(name, *t);
    head["terms"] = terms;
    return head;
}

namespace {

std::string csv_cell(const Json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

void flatten(const Json& v, const std::string& path, std::ostringstream& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "." + std::to_string(i), out);
    } else {
        out << csv_cell(Json(path)) << "," << csv_cell(v) << "\n";
    }
}

}  // namespace

std::string json_to_csv(const Json& report) {
    std::ostringstream out;
    if (report.contains("table") && report["table"].is_array() && !report["table"].empty()) {
        const Json& table = report["table"];
        bool first = true;
        for (auto it = table[0].begin(); it != table[0].end(); ++it) {
            out << (first ? "" : ",") << it.key();
            first = false;
        }
        out << "\n";
        for (const auto& row : table) {
            first = true;
            for (auto it = row.begin(); it != row.end(); ++it) {
                out << (first ? "" : ",") << csv_cell(it.value());
                first = false;
            }
            out << "\n";
        }
        return out.str();
    }
    out << "key,value\n";
    flatten(report, "", out);
    return out.str();
}

std::string render_report(const RunConfig& config, const Json& report) {
    if (config.output_format == "csv") return json_to_csv(report);
    return report.dump(2) + "\n";
}

}  // namespace hmf
