#include "csi/io.hpp"

#include <algorithm>
#include <sstream>

namespace csi {

namespace {

Json instance_body(const CsInstance& inst) {
    Json j;
    j["in_class"] = inst.in_class();
    j["out_class"] = inst.out_class();
    j["certificates"] = inst.certificates();
    Json edges = Json::array();
    for (const Edge& e : inst.edges())
        edges.push_back(Json::array({e.datapoint, e.certificate}));
    j["edges"] = std::move(edges);
    return j;
}

std::vector<Id> id_array(const Json& j, const char* field) {
    if (!j.is_array())
        throw ParseError(std::string("field '") + field + "' must be an array of strings");
    std::vector<Id> out;
    for (const auto& v : j) {
        if (!v.is_string())
            throw ParseError(std::string("field '") + field + "' must contain only strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

CsInstance instance_from_body(const Json& j) {
    for (const char* field : {"in_class", "out_class", "certificates", "edges"})
        if (!j.contains(field))
            throw ParseError(std::string("missing field '") + field + "'");
    std::vector<Edge> edges;
    if (!j["edges"].is_array())
        throw ParseError("field 'edges' must be an array of [datapoint, certificate] pairs");
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw ParseError("each edge must be a [datapoint, certificate] pair of strings");
        edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
    }
    return {id_array(j["in_class"], "in_class"), id_array(j["out_class"], "out_class"),
            id_array(j["certificates"], "certificates"), std::move(edges)};
}

Json parse_json(const std::string& text) {
    Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw ParseError("malformed JSON");
    return j;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string token;
    while (ss >> token)
        out.push_back(token);
    return out;
}

std::vector<std::string> content_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        lines.push_back(line);
    }
    return lines;
}

} // namespace

std::string serialize_instance(const InstanceDocument& document) {
    Json j = instance_body(document.instance);
    j["format_version"] = document.format_version;
    j["metadata"] = document.metadata;
    return j.dump(2) + "\n";
}

LoadedInstance deserialize_instance(const std::string& text) {
    Json j = parse_json(text);
    if (!j.is_object())
        throw ParseError("instance document must be a JSON object");

    LoadedInstance loaded;
    loaded.document.format_version =
        j.value("format_version", std::string(kInstanceFormatVersion));
    loaded.document.metadata = j.value("metadata", Json::object());
    loaded.document.instance = instance_from_body(j);
    loaded.report = validate(loaded.document.instance);
    if (!loaded.report.valid()) {
        std::vector<std::string> issues;
        for (const auto& v : loaded.report.violations)
            issues.push_back(v.message);
        throw ValidationError("invalid instance: " + issues.front() +
                                  (issues.size() > 1 ? " (+" + std::to_string(issues.size() - 1) +
                                                           " more violations)"
                                                     : ""),
                              issues);
    }
    return loaded;
}

std::string serialize_source_graph(const SourceGraph& graph) {
    std::string out = "csi-graph 1\n";
    out += "vertices";
    for (const Id& v : graph.vertices)
        out += " " + v;
    out += "\n";
    for (const auto& [u, v] : graph.edges)
        out += u + " " + v + "\n";
    return out;
}

SourceGraph parse_source_graph(const std::string& text) {
    auto lines = content_lines(text);
    if (lines.empty() || split_ws(lines[0]) != std::vector<std::string>{"csi-graph", "1"})
        throw ParseError("expected header line 'csi-graph 1'");
    if (lines.size() < 2)
        throw ParseError("missing 'vertices' line");
    auto vertex_line = split_ws(lines[1]);
    if (vertex_line.empty() || vertex_line[0] != "vertices" || vertex_line.size() < 2)
        throw ParseError("expected 'vertices <id>...' on the second line");
    std::vector<Id> vertices(vertex_line.begin() + 1, vertex_line.end());

    std::vector<std::pair<Id, Id>> edges;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto tokens = split_ws(lines[i]);
        if (tokens.size() != 2)
            throw ParseError("edge line must be 'u v': '" + lines[i] + "'");
        edges.emplace_back(tokens[0], tokens[1]);
    }
    try {
        return SourceGraph::create(std::move(vertices), std::move(edges));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

std::string serialize_set_system(const SetSystem& system) {
    std::string out = "csi-sets 1\n";
    out += "universe";
    for (const Id& e : system.universe)
        out += " " + e;
    out += "\n";
    for (const auto& one : system.sets) {
        std::string line;
        for (const Id& e : one)
            line += (line.empty() ? "" : " ") + e;
        out += line + "\n";
    }
    return out;
}

SetSystem parse_set_system(const std::string& text) {
    auto lines = content_lines(text);
    if (lines.empty() || split_ws(lines[0]) != std::vector<std::string>{"csi-sets", "1"})
        throw ParseError("expected header line 'csi-sets 1'");

    std::size_t first_set = 1;
    std::vector<Id> universe;
    bool explicit_universe = false;
    if (lines.size() > 1) {
        auto tokens = split_ws(lines[1]);
        if (!tokens.empty() && tokens[0] == "universe") {
            universe.assign(tokens.begin() + 1, tokens.end());
            explicit_universe = true;
            first_set = 2;
        }
    }

    std::vector<std::vector<Id>> sets;
    for (std::size_t i = first_set; i < lines.size(); ++i) {
        auto tokens = split_ws(lines[i]);
        if (tokens.empty())
            continue;
        sets.push_back(tokens);
    }
    if (!explicit_universe)
        for (const auto& one : sets)
            universe.insert(universe.end(), one.begin(), one.end());
    try {
        return SetSystem::create(std::move(universe), std::move(sets));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

std::string serialize_artifact(const ReductionArtifact& artifact) {
    Json j;
    j["format_version"] = "1";
    bool dks = artifact.kind == ReductionKind::DensestKSubgraph;
    j["kind"] = dks ? "dks" : "mku";
    j["k"] = artifact.k;
    j["eps_c"] = artifact.eps_c.str();
    j[dks ? "eps_s" : "q"] = artifact.eps_s_or_q.str();
    j["instance"] = instance_body(artifact.instance);
    Json gadgets = Json::array();
    for (const GadgetEntry& g : artifact.gadgets) {
        Json entry;
        entry["source_index"] = g.source_index;
        entry["phi0"] = g.phi0;
        entry["phi1"] = g.phi1;
        entry["in_points"] = g.in_points;
        if (dks)
            entry["source_edge"] = Json::array({g.source_edge.first, g.source_edge.second});
        else
            entry["elements"] = g.elements;
        gadgets.push_back(std::move(entry));
    }
    j["gadgets"] = std::move(gadgets);
    j["vertex_map"] = artifact.vertex_map;
    return j.dump(2) + "\n";
}

ReductionArtifact parse_artifact(const std::string& text) {
    Json j = parse_json(text);
    if (!j.is_object() || !j.contains("kind") || !j.contains("instance") ||
        !j.contains("gadgets") || !j.contains("vertex_map") || !j.contains("k"))
        throw ParseError("artifact document missing required fields");

    ReductionArtifact artifact;
    std::string kind = j["kind"].get<std::string>();
    if (kind == "dks")
        artifact.kind = ReductionKind::DensestKSubgraph;
    else if (kind == "mku")
        artifact.kind = ReductionKind::MinKUnion;
    else
        throw ParseError("unknown artifact kind '" + kind + "'");
    artifact.k = j["k"].get<std::size_t>();
    artifact.eps_c = rational_from_json(j.at("eps_c"));
    artifact.eps_s_or_q =
        rational_from_json(artifact.kind == ReductionKind::DensestKSubgraph ? j.at("eps_s")
                                                                            : j.at("q"));
    artifact.instance = instance_from_body(j["instance"]);
    auto report = validate(artifact.instance);
    if (!report.valid())
        throw ParseError("artifact instance is invalid: " + report.violations.front().message);

    for (const auto& entry : j["gadgets"]) {
        GadgetEntry g;
        g.source_index = entry.at("source_index").get<std::size_t>();
        g.phi0 = entry.at("phi0").get<std::string>();
        g.phi1 = entry.at("phi1").get<std::string>();
        g.in_points = id_array(entry.at("in_points"), "in_points");
        if (artifact.kind == ReductionKind::DensestKSubgraph) {
            auto edge = id_array(entry.at("source_edge"), "source_edge");
            if (edge.size() != 2)
                throw ParseError("source_edge must have two endpoints");
            g.source_edge = {edge[0], edge[1]};
        } else {
            g.elements = id_array(entry.at("elements"), "elements");
        }
        artifact.gadgets.push_back(std::move(g));
    }
    if (!j["vertex_map"].is_object())
        throw ParseError("vertex_map must be an object");
    for (const auto& [key, value] : j["vertex_map"].items()) {
        if (!value.is_string())
            throw ParseError("vertex_map values must be strings");
        artifact.vertex_map[key] = value.get<std::string>();
    }
    return artifact;
}

std::string export_dot(const CsInstance& inst, const DcsSolution* solution) {
    std::string out = "graph csi {\n  rankdir=TB;\n";
    auto emit_rank = [&out](const std::vector<std::string>& decls) {
        out += "  { rank=same;\n";
        for (const auto& d : decls)
            out += "    " + d + "\n";
        out += "  }\n";
    };

    std::vector<std::string> in_decls, cert_decls, out_decls;
    for (const Id& x : inst.in_class())
        in_decls.push_back("\"" + x + "\" [shape=ellipse];");
    for (const Id& c : inst.certificates()) {
        std::string attrs = "shape=box";
        if (solution != nullptr && solution->verifier.accepted.count(c))
            attrs += ",style=filled,class=\"accepted\"";
        cert_decls.push_back("\"" + c + "\" [" + attrs + "];");
    }
    for (const Id& y : inst.out_class())
        out_decls.push_back("\"" + y + "\" [shape=diamond];");
    emit_rank(in_decls);
    emit_rank(cert_decls);
    emit_rank(out_decls);

    for (const Edge& e : inst.edges()) {
        bool chosen = false;
        if (solution != nullptr) {
            auto it = solution->prover.assignment.find(e.datapoint);
            chosen = it != solution->prover.assignment.end() && it->second == e.certificate;
        }
        out += "  \"" + e.datapoint + "\" -- \"" + e.certificate + "\"";
        if (chosen)
            out += " [style=bold,class=\"prover\"]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

Json rational_to_json(const Rational& r) {
    return r.str();
}

Rational rational_from_json(const Json& j) {
    if (!j.is_string())
        throw ParseError("expected a rational \"p/q\" string");
    auto r = Rational::parse(j.get<std::string>());
    if (!r)
        throw ParseError("malformed rational '" + j.get<std::string>() + "'");
    return *r;
}

Json afc_to_json(const AfcWitness& witness, const std::string& method) {
    Json j;
    j["method"] = method;
    j["defined"] = true;
    j["value"] = witness.value.str();
    j["witness_set"] = witness.witness_set;
    Json terms = Json::array();
    for (const auto& t : witness.per_datapoint_terms) {
        Json term;
        term["datapoint"] = t.datapoint;
        term["certificate"] = t.certificate;
        term["kappa"] = t.kappa.str();
        terms.push_back(std::move(term));
    }
    j["per_datapoint_terms"] = std::move(terms);
    return j;
}

Json solution_to_json(const std::string& problem, const Rational& eps_c,
                      const Rational& eps_s_or_q, const std::optional<DcsSolution>& solution) {
    Json j;
    j["problem"] = problem;
    j["eps_c"] = eps_c.str();
    j[problem == "dcs2" ? "q" : "eps_s"] = eps_s_or_q.str();
    j["feasible"] = solution.has_value();
    if (!solution)
        return j;
    j["optimal"] = solution->optimal;
    j["objective"] = solution->objective.str();
    j["accepted"] = std::vector<Id>(solution->verifier.accepted.begin(),
                                    solution->verifier.accepted.end());
    Json prover = Json::object();
    for (const auto& [x, phi] : solution->prover.assignment)
        prover[x] = phi;
    j["prover"] = std::move(prover);
    j["achieved_completeness"] = solution->achieved_completeness.str();
    j["achieved_soundness"] = solution->achieved_soundness.str();
    j["achieved_prover_precision"] = solution->achieved_prover_precision.str();
    return j;
}

SolutionRecord solution_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("problem") || !j.contains("feasible"))
        throw ParseError("solution record missing required fields");
    SolutionRecord record;
    record.problem = j["problem"].get<std::string>();
    if (record.problem != "dcs" && record.problem != "dcs2")
        throw ParseError("unknown problem '" + record.problem + "'");
    record.eps_c = rational_from_json(j.at("eps_c"));
    record.eps_s_or_q =
        rational_from_json(record.problem == "dcs2" ? j.at("q") : j.at("eps_s"));
    if (!j["feasible"].get<bool>())
        return record;

    DcsSolution sol;
    sol.optimal = j.value("optimal", false);
    sol.objective = rational_from_json(j.at("objective"));
    for (const Id& c : id_array(j.at("accepted"), "accepted"))
        sol.verifier.accepted.insert(c);
    if (!j.at("prover").is_object())
        throw ParseError("prover must be an object");
    for (const auto& [x, phi] : j.at("prover").items()) {
        if (!phi.is_string())
            throw ParseError("prover values must be strings");
        sol.prover.assignment[x] = phi.get<std::string>();
    }
    sol.achieved_completeness = rational_from_json(j.at("achieved_completeness"));
    sol.achieved_soundness = rational_from_json(j.at("achieved_soundness"));
    sol.achieved_prover_precision = rational_from_json(j.at("achieved_prover_precision"));
    record.solution = std::move(sol);
    return record;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4)
        out += hex[(h >> shift) & 0xF];
    return out;
}

Json make_provenance(std::string_view input_bytes, const std::string& flags,
                     const std::optional<std::string>& timestamp) {
    Json j;
    j["input_hash"] = content_hash(input_bytes);
    j["tool_version"] = kToolVersion;
    j["flags"] = flags;
    if (timestamp)
        j["timestamp"] = *timestamp;
    return j;
}

std::vector<std::string> verify_report(const CsInstance& inst, const Json& report) {
    std::vector<std::string> issues;
    auto check = [&issues](bool ok, const std::string& message) {
        if (!ok)
            issues.push_back(message);
    };

    if (report.contains("metrics")) {
        const Json& metrics = report["metrics"];
        if (metrics.contains("max_features_per_datapoint"))
            check(metrics["max_features_per_datapoint"].get<std::size_t>() ==
                      max_features_per_datapoint(inst),
                  "max_features_per_datapoint does not match");
        if (metrics.contains("certificate_precision"))
            for (const auto& [phi, value] : metrics["certificate_precision"].items())
                check(rational_from_json(value) == certificate_precision(inst, phi),
                      "certificate precision of '" + phi + "' does not match");
    }

    if (report.contains("afc") && report["afc"].value("defined", false)) {
        const Json& afc = report["afc"];
        auto witness_set = id_array(afc.at("witness_set"), "witness_set");
        AfcWitness recomputed = afc_evaluate(inst, witness_set);
        check(rational_from_json(afc.at("value")) == recomputed.value,
              "afc value does not match its witness set");
        if (afc.contains("per_datapoint_terms")) {
            const Json& terms = afc["per_datapoint_terms"];
            check(terms.size() == recomputed.per_datapoint_terms.size(),
                  "afc per-datapoint terms have the wrong size");
            if (terms.size() == recomputed.per_datapoint_terms.size()) {
                Rational sum;
                for (const auto& term : terms)
                    sum += rational_from_json(term.at("kappa"));
                check(sum == recomputed.value *
                                 Rational(static_cast<long long>(terms.size())),
                      "afc per-datapoint terms do not average to the reported value");
            }
        }
    }

    if (report.contains("solution")) {
        SolutionRecord record = solution_from_json(report["solution"]);
        if (record.solution) {
            const DcsSolution& sol = *record.solution;
            if (auto defect = verifier_defect(inst, sol.verifier)) {
                issues.push_back(*defect);
                return issues;
            }
            if (auto defect = prover_defect(inst, sol.prover)) {
                issues.push_back(*defect);
                return issues;
            }
            Rational completeness_value = completeness(inst, sol.verifier, sol.prover);
            Rational sound = soundness(inst, sol.verifier);
            Rational prec = prover_precision(inst, sol.prover);
            check(completeness_value == sol.achieved_completeness,
                  "achieved_completeness does not match");
            check(sound == sol.achieved_soundness, "achieved_soundness does not match");
            check(prec == sol.achieved_prover_precision,
                  "achieved_prover_precision does not match");
            Rational objective =
                record.problem == "dcs2" ? Rational(1) - sound : Rational(1) - prec;
            check(objective == sol.objective, "objective does not match");
            check(completeness_value >= Rational(1) - record.eps_c,
                  "solution violates the completeness constraint");
            if (record.problem == "dcs")
                check(sound >= Rational(1) - record.eps_s_or_q,
                      "solution violates the soundness constraint");
            else
                check(prec <= Rational(1) - record.eps_s_or_q,
                      "solution violates the precision ceiling");
        }
    }
    return issues;
}

} // namespace csi
