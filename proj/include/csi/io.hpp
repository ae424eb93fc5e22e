#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "csi/generators.hpp"
#include "csi/instance.hpp"
#include "csi/metrics.hpp"
#include "csi/rational.hpp"
#include "csi/reductions.hpp"
#include "csi/solvers.hpp"

namespace csi {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kInstanceFormatVersion = "1";

using Json = nlohmann::json;

/// On-disk form of an instance; metadata is preserved verbatim across a
/// round trip, including keys this tool does not know about.
struct InstanceDocument {
    std::string format_version = kInstanceFormatVersion;
    CsInstance instance;
    Json metadata = Json::object();
};

struct LoadedInstance {
    InstanceDocument document;
    ValidationReport report; // warnings only; violations raise ValidationError
};

std::string serialize_instance(const InstanceDocument& document);

/// Parses and validates; malformed text raises ParseError, structurally
/// invalid instances raise ValidationError. Duplicate edges are collapsed
/// and reported as warnings in the returned report.
LoadedInstance deserialize_instance(const std::string& text);

// Line-based source-problem formats: a magic header line, a vertex/universe
// line, then one edge or one set per line.
std::string serialize_source_graph(const SourceGraph& graph);
SourceGraph parse_source_graph(const std::string& text);
std::string serialize_set_system(const SetSystem& system);
SetSystem parse_set_system(const std::string& text);

std::string serialize_artifact(const ReductionArtifact& artifact);
ReductionArtifact parse_artifact(const std::string& text);

/// Deterministic Graphviz export with one rank per vertex class; accepted
/// certificates and prover-chosen edges are styled when a solution is given.
std::string export_dot(const CsInstance& instance, const DcsSolution* solution = nullptr);

// Report-document building blocks. All rationals appear as "p/q" strings in
// lowest terms.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json afc_to_json(const AfcWitness& witness, const std::string& method);
Json solution_to_json(const std::string& problem, const Rational& eps_c,
                      const Rational& eps_s_or_q, const std::optional<DcsSolution>& solution);

struct SolutionRecord {
    std::string problem; // "dcs" | "dcs2"
    Rational eps_c;
    Rational eps_s_or_q;
    std::optional<DcsSolution> solution;
};

SolutionRecord solution_from_json(const Json& j);

/// 64-bit FNV-1a of the raw bytes, rendered as "fnv1a64:<16 hex digits>".
std::string content_hash(std::string_view bytes);

Json make_provenance(std::string_view input_bytes, const std::string& flags,
                     const std::optional<std::string>& timestamp);

/// Recomputes every metric a report claims from the instance and the
/// embedded solution/witness; returns one message per mismatch (empty means
/// the report verifies).
std::vector<std::string> verify_report(const CsInstance& instance, const Json& report);

} // namespace csi
