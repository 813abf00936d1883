#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hmftrace/acceptance.hpp"
#include "hmftrace/config.hpp"
#include "hmftrace/error.hpp"
#include "hmftrace/report.hpp"

namespace {

using hmf::ErrorKind;
using hmf::Json;
using hmf::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) hmf::fail(ErrorKind::Config, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const RunConfig& config, const Json& report) {
    const std::string body = hmf::render_report(config, report);
    if (config.output_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) hmf::fail(ErrorKind::Config, "cannot write output file '" + config.output_path + "'");
    out << body;
}

int report_error(ErrorKind kind, const std::string& message) {
    const Json err{{"error", {{"kind", hmf::error_kind_name(kind)}, {"message", message}}}};
    std::cout << err.dump(2) << "\n";
    return kind == ErrorKind::Usage || kind == ErrorKind::Config ? kExitUsage : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric side of the trace formula for Hilbert modular groups of real quadratic fields"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> output, format, field;
    app.add_option("--config", config_path, "key = value run configuration file");
    app.add_option("--output", output, "report path, '-' for standard output");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* field_info = app.add_subcommand("field-info", "integral basis, units and multiplier data of the field");
    field_info->add_option("--field", field, "field descriptor, e.g. 'Q(sqrt 5)'");

    auto* zeta = app.add_subcommand("zeta", "lattice zeta function of O_K with the squares of units");
    zeta->add_option("--field", field, "field descriptor");
    int zeta_m = 0;
    double s_re = 2.0, s_im = 0.0;
    zeta->add_option("--m", zeta_m, "character index");
    zeta->add_option("--s", s_re, "real part of s");
    zeta->add_option("--t", s_im, "imaginary part of s");
    auto* methods = zeta->add_option_group("method")->require_option(0, 1);
    bool m_direct = false, m_continued = false, m_xi = false, m_residue = false;
    methods->add_flag("--direct", m_direct, "direct lattice sum (Re s > 1)");
    methods->add_flag("--continued", m_continued, "theta continuation (default)");
    methods->add_flag("--xi", m_xi, "completed function Xi");
    methods->add_flag("--residue", m_residue, "residue at s = 1 (m = 0)");

    auto* transforms = app.add_subcommand("transforms", "Q, g and h of the test function");

    auto* trace = app.add_subcommand("trace", "terms of the geometric side over the demo class inventory");
    trace->add_option("--field", field, "field descriptor");
    std::optional<double> A;
    std::optional<std::string> form, psi;
    trace->add_option("--A", A, "truncation height");
    trace->add_option("--form", form, "demo-eisenstein or cusp-form-zero");
    trace->add_option("--psi", psi, "'default' for the bump supported on [0, 9]^2, otherwise the config values");
    std::string term = "all";
    trace->add_option("term", term, "elliptic, mixed, parabolic, hyp-par or all")
        ->check(CLI::IsMember({"elliptic", "mixed", "parabolic", "hyp-par", "all"}));

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << "\n";
        return report_error(ErrorKind::Usage, e.what());
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : hmf::parse_config(read_file(config_path));
        if (output) config.output_path = *output;
        if (format) config.output_format = *format;
        if (field) config.field = *field;
        if (A) config.A = *A;
        if (form) config.form = *form;
        if (psi) {
            if (*psi != "default") hmf::fail(ErrorKind::Usage, "--psi accepts only 'default'");
            config.psi_centers = {4.5, 4.5};
            config.psi_widths = {4.5, 4.5};
            config.psi_amplitude = 1.0;
        }
        hmf::validate_config(config);

        if (*field_info) {
            emit(config, hmf::field_info_report(config));
        } else if (*zeta) {
            const std::string method = m_direct ? "direct" : m_xi ? "xi" : m_residue ? "residue" : "continued";
            emit(config, hmf::zeta_report(config, hmf::Complex(s_re, s_im), zeta_m, method));
        } else if (*transforms) {
            emit(config, hmf::transforms_report(config));
        } else if (*trace) {
            emit(config, hmf::trace_report(config, term));
        } else if (*verify) {
            Json criteria = Json::array(), timing = Json::array();
            bool all = true;
            hmf::run_acceptance([&](const hmf::CriterionOutcome& o) {
                std::cerr << hmf::format_outcome(o) << std::endl;
                criteria.push_back({{"id", o.id}, {"name", o.name}, {"passed", o.passed}, {"detail", o.detail}});
                timing.push_back({{"id", o.id}, {"seconds", o.seconds}});
                all = all && o.passed;
            });
            // Wall-clock times go in the metadata block so the rest of the report is deterministic.
            emit(config, Json{{"command", "verify"}, {"passed", all}, {"criteria", criteria}, {"metadata", {{"timing", timing}}}});
            return all ? kExitOk : kExitComputation;
        }
    } catch (const hmf::Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorKind::Numeric, e.what());
    }
    return kExitOk;
}
