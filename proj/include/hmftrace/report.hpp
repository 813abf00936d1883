#pragma once

#include <string>

#include <json.hpp>

#include "hmftrace/config.hpp"
#include "hmftrace/trace.hpp"

namespace hmf {

using Json = nlohmann::ordered_json;

/// Complex numbers serialize as {"re": .., "im": ..}.
Json complex_json(Complex z);
Json term_json(const std::string& term, const TermResult& t);

/// Integral basis, embeddings, units, multiplier matrix, covolume and residue of the configured field.
Json field_info_report(const RunConfig& config);

/// method: direct, continued, xi or residue.
Json zeta_report(const RunConfig& config, Complex s, int m, const std::string& method);

/// Q, g and h of the configured psi along the diagonal, with g(0), h(0) and the support of g.
Json transforms_report(const RunConfig& config);

/// term: elliptic, mixed, parabolic, hyp-par or all, over the demo inventory of the configured field.
Json trace_report(const RunConfig& config, const std::string& term);

/// A "table" array of flat objects becomes a CSV table; everything else becomes path,value rows.
std::string json_to_csv(const Json& report);

/// JSON (indented) or CSV according to config.output_format, newline-terminated.
std::string render_report(const RunConfig& config, const Json& report);

}  // namespace hmf
