#include "hmftrace/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hmftrace/error.hpp"

namespace hmf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
    double x = 0.0;
    const char* end = text.data() + text.size();
    const auto r = std::from_chars(text.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
        fail(ErrorKind::Config, "key '" + key + "': expected a number, got '" + text + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& text) {
    int x = 0;
    const char* end = text.data() + text.size();
    const auto r = std::from_chars(text.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end) fail(ErrorKind::Config, "key '" + key + "': expected an integer, got '" + text + "'");
    return x;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        {"field", [](RunConfig& c, const std::string& v) { c.field = v; }, [](const RunConfig& c) { return c.field; }},
        {"psi.centers",
         [](RunConfig& c, const std::string& v) {
             c.psi_centers.clear();
             for (const auto& x : split_list(v)) c.psi_centers.push_back(parse_double("psi.centers", x));
         },
         [](const RunConfig& c) { return join(c.psi_centers, format_double); }},
        {"psi.widths",
         [](RunConfig& c, const std::string& v) {
             c.psi_widths.clear();
             for (const auto& x : split_list(v)) c.psi_widths.push_back(parse_double("psi.widths", x));
         },
         [](const RunConfig& c) { return join(c.psi_widths, format_double); }},
        {"psi.amplitude", [](RunConfig& c, const std::string& v) { c.psi_amplitude = parse_double("psi.amplitude", v); },
         [](const RunConfig& c) { return format_double(c.psi_amplitude); }},
        {"form", [](RunConfig& c, const std::string& v) { c.form = v; }, [](const RunConfig& c) { return c.form; }},
        {"form.s", [](RunConfig& c, const std::string& v) { c.form_s = parse_double("form.s", v); },
         [](const RunConfig& c) { return format_double(c.form_s); }},
        {"form.s_im", [](RunConfig& c, const std::string& v) { c.form_s_im = parse_double("form.s_im", v); },
         [](const RunConfig& c) { return format_double(c.form_s_im); }},
        {"form.m_u",
         [](RunConfig& c, const std::string& v) {
             c.form_m_u.clear();
             for (const auto& x : split_list(v)) c.form_m_u.push_back(parse_int("form.m_u", x));
         },
         [](const RunConfig& c) { return join(c.form_m_u, [](int x) { return std::to_string(x); }); }},
        {"A", [](RunConfig& c, const std::string& v) { c.A = parse_double("A", v); },
         [](const RunConfig& c) { return format_double(c.A); }},
        {"quad.rel_tol", [](RunConfig& c, const std::string& v) { c.rel_tol = parse_double("quad.rel_tol", v); },
         [](const RunConfig& c) { return format_double(c.rel_tol); }},
        {"quad.abs_tol", [](RunConfig& c, const std::string& v) { c.abs_tol = parse_double("quad.abs_tol", v); },
         [](const RunConfig& c) { return format_double(c.abs_tol); }},
        {"quad.angle_nodes", [](RunConfig& c, const std::string& v) { c.angle_nodes = parse_int("quad.angle_nodes", v); },
         [](const RunConfig& c) { return std::to_string(c.angle_nodes); }},
        {"output.path", [](RunConfig& c, const std::string& v) { c.output_path = v; },
         [](const RunConfig& c) { return c.output_path; }},
        {"output.format", [](RunConfig& c, const std::string& v) { c.output_format = v; },
         [](const RunConfig& c) { return c.output_format; }},
    };
    return k;
}

// Validation failure naming the key that owns it.
void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) fail(ErrorKind::Config, "key '" + key + "': " + what);
}

}  // namespace

void validate_config(const RunConfig& c) {
    try {
        parse_field(c.field);
    } catch (const Error& e) {
        fail(ErrorKind::Config, "key 'field': " + std::string(e.what()));
    }
    check(c.psi_centers.size() == 2, "psi.centers", "expected 2 entries");
    check(c.psi_widths.size() == c.psi_centers.size(), "psi.widths", "expected one width per center");
    for (double w : c.psi_widths) check(w > 0.0, "psi.widths", "widths must be positive");
    check(c.form == "demo-eisenstein" || c.form == "cusp-form-zero", "form",
          "expected demo-eisenstein or cusp-form-zero, got '" + c.form + "'");
    check(c.form_m_u.size() == 1, "form.m_u", "expected n - 1 = 1 entries");
    check(c.A > 0.0, "A", "must be positive, got " + format_double(c.A));
    check(c.rel_tol > 0.0, "quad.rel_tol", "must be positive");
    check(c.abs_tol > 0.0, "quad.abs_tol", "must be positive");
    check(c.angle_nodes >= 4 && c.angle_nodes <= 4096, "quad.angle_nodes", "must lie in [4, 4096]");
    check(!c.output_path.empty(), "output.path", "must not be empty");
    check(c.output_format == "json" || c.output_format == "csv", "output.format", "expected json or csv");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::map<std::string, const Key*> by_name;
    for (const auto& k : keys()) by_name[k.name] = &k;
    std::set<std::string> seen;
    std::map<std::string, int> line_of;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = "line " + std::to_string(line) + ": ";
        if (eq == std::string::npos) fail(ErrorKind::Config, where + "expected 'key = value', got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = by_name.find(key);
        if (it == by_name.end()) fail(ErrorKind::Config, where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) fail(ErrorKind::Config, where + "duplicate key '" + key + "'");
        if (value.empty()) fail(ErrorKind::Config, where + "key '" + key + "' has no value");
        try {
            it->second->set(c, value);
        } catch (const Error& e) {
            fail(ErrorKind::Config, where + e.what());
        }
        line_of[key] = line;
    }
    try {
        validate_config(c);
    } catch (const Error& e) {
        // Attach the line of the offending key when it was set explicitly.
        const std::string msg = e.what();
        for (const auto& [key, l] : line_of)
            if (msg.rfind("key '" + key + "'", 0) == 0) fail(ErrorKind::Config, "line " + std::to_string(l) + ": " + msg);
        throw;
    }
    return c;
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
    return out;
}

FieldEmbedding config_field(const RunConfig& c) { return parse_field(c.field); }

TestFunction config_psi(const RunConfig& c) {
    return TestFunction::bump(Eigen::Map<const Eigen::VectorXd>(c.psi_centers.data(), c.psi_centers.size()),
                              Eigen::Map<const Eigen::VectorXd>(c.psi_widths.data(), c.psi_widths.size()),
                              c.psi_amplitude);
}

AutomorphicFormData config_form(const RunConfig& c, const FieldEmbedding& k) {
    if (c.form == "cusp-form-zero") return cusp_form_zero(k);
    const Eigen::VectorXi m = Eigen::Map<const Eigen::VectorXi>(c.form_m_u.data(), c.form_m_u.size());
    return demo_eisenstein_form(k, Complex(c.form_s, c.form_s_im), m);
}

TraceOptions config_trace_options(const RunConfig& c) {
    TraceOptions o;
    o.rel_tol = c.rel_tol;
    o.abs_tol = c.abs_tol;
    o.angle_nodes = c.angle_nodes;
    return o;
}

}  // namespace hmf
