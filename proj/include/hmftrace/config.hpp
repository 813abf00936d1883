#pragma once

#include <string>
#include <vector>

#include "hmftrace/field.hpp"
#include "hmftrace/trace.hpp"
#include "hmftrace/transforms.hpp"

namespace hmf {

/// Settings shared by every CLI command. Text form: one `key = value` per line, `#` starts a comment.
///
///   field          Q(sqrt 2)          field descriptor
///   psi.centers    4.5, 4.5           bump centers c_k
///   psi.widths     4.5, 4.5           bump half-widths w_k
///   psi.amplitude  1                  bump amplitude
///   form           demo-eisenstein    or cusp-form-zero
///   form.s         0.8                real part of s
///   form.s_im      0                  imaginary part of s
///   form.m_u       0                  character index, n - 1 integers
///   A              100                truncation height
///   quad.rel_tol   1e-10
///   quad.abs_tol   1e-14
///   quad.angle_nodes 32
///   output.path    -                  `-` is standard output
///   output.format  json               or csv
struct RunConfig {
    std::string field = "Q(sqrt 2)";
    std::vector<double> psi_centers{4.5, 4.5};
    std::vector<double> psi_widths{4.5, 4.5};
    double psi_amplitude = 1.0;
    std::string form = "demo-eisenstein";
    double form_s = 0.8;
    double form_s_im = 0.0;
    std::vector<int> form_m_u{0};
    double A = 100.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int angle_nodes = 32;
    std::string output_path = "-";
    std::string output_format = "json";

    bool operator==(const RunConfig&) const = default;
};

/// Strict parser: unknown keys, duplicates, malformed lines and out-of-range values raise a config
/// error whose message starts with "line N:".
RunConfig parse_config(const std::string& text);

/// Canonical text: every key in the order above, numbers in shortest round-trip form.
std::string serialize_config(const RunConfig& config);

/// Range checks shared by the parser and command-line overrides.
void validate_config(const RunConfig& config);

FieldEmbedding config_field(const RunConfig& config);
TestFunction config_psi(const RunConfig& config);
AutomorphicFormData config_form(const RunConfig& config, const FieldEmbedding& k);
TraceOptions config_trace_options(const RunConfig& config);

}  // namespace hmf
