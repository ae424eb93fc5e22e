#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "csi/generators.hpp"
#include "csi/io.hpp"
#include "csi/metrics.hpp"
#include "csi/reductions.hpp"
#include "csi/solvers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1; // also: verification mismatch
constexpr int kExitInputError = 2;
constexpr int kExitBudgetExceeded = 3;
constexpr int kExitInvalidInstance = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw csi::ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw csi::ParseError("cannot write '" + path + "'");
    out << content;
}

csi::Rational parse_rational_flag(const std::string& text, const char* flag) {
    auto r = csi::Rational::parse(text);
    if (!r)
        throw csi::ParseError(std::string("flag ") + flag + " expects a rational 'p/q', got '" +
                              text + "'");
    return *r;
}

std::size_t env_or(const char* name, std::size_t fallback) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0')
        return fallback;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end == nullptr || *end != '\0')
        return fallback;
    return static_cast<std::size_t>(parsed);
}

std::optional<std::string> timestamp_if(bool enabled) {
    if (!enabled)
        return std::nullopt;
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return std::string(buffer);
}

struct CommonFlags {
    std::string input;
    std::string output;
    bool timestamp = false;
};

csi::LoadedInstance load_instance_file(const std::string& path, std::string* bytes_out) {
    std::string bytes = read_file(path);
    if (bytes_out != nullptr)
        *bytes_out = bytes;
    auto loaded = csi::deserialize_instance(bytes);
    for (const auto& w : loaded.report.warnings)
        std::cerr << "warning: " << w.message << "\n";
    return loaded;
}

int run_generate_letters_digits(std::size_t n, const std::string& output) {
    csi::InstanceDocument doc;
    doc.instance = csi::letters_digits(n);
    doc.metadata = {{"generator", "letters-digits"}, {"n", n}};
    write_output(output, csi::serialize_instance(doc));
    return kExitOk;
}

int run_generate_random(const csi::RandomCsiParams& params, const std::string& output) {
    std::vector<csi::Id> repaired;
    csi::InstanceDocument doc;
    doc.instance = csi::random_csi(params, &repaired);
    doc.metadata = {
        {"generator", "random-csi"},
        {"rng", "mt19937_64 (C++11); edge iff draw % q < p, in-class datapoints first, "
                "certificates in id order; isolated in-class repaired with draw % m"},
        {"seed", params.seed},
        {"params",
         {{"n_in", params.n_in},
          {"n_out", params.n_out},
          {"m", params.m},
          {"p_in", params.p_in.str()},
          {"p_out", params.p_out.str()}}},
        {"repaired", repaired},
    };
    write_output(output, csi::serialize_instance(doc));
    return kExitOk;
}

int run_generate_zoo(const std::string& name, const std::string& output,
                     const std::string& artifact_output) {
    for (auto& entry : csi::gadget_zoo()) {
        if (entry.name != name)
            continue;
        csi::InstanceDocument doc;
        doc.instance = entry.instance;
        doc.metadata = {{"generator", "zoo"}, {"name", name}};
        write_output(output, csi::serialize_instance(doc));
        if (!artifact_output.empty()) {
            if (!entry.artifact)
                throw csi::ParseError("zoo entry '" + name + "' has no reduction artifact");
            write_output(artifact_output, csi::serialize_artifact(*entry.artifact));
        }
        return kExitOk;
    }
    throw csi::ParseError("unknown zoo entry '" + name + "'; available: T1, balanced-identity, "
                          "k3-dks-k2, mku-path");
}

int run_analyze(const CommonFlags& flags, std::size_t budget, unsigned threads,
                std::uint64_t greedy_seed) {
    std::string bytes;
    auto loaded = load_instance_file(flags.input, &bytes);
    const csi::CsInstance& inst = loaded.document.instance;

    csi::Json report;
    report["format_version"] = "1";
    report["kind"] = "analyze";
    std::string flag_string = "budget=" + std::to_string(budget) +
                              " threads=" + std::to_string(threads) +
                              " greedy_seed=" + std::to_string(greedy_seed);
    report["provenance"] = csi::make_provenance(bytes, flag_string, timestamp_if(flags.timestamp));
    report["instance_summary"] = {{"in_class", inst.in_class().size()},
                                  {"out_class", inst.out_class().size()},
                                  {"certificates", inst.certificates().size()},
                                  {"edges", inst.edges().size()}};

    csi::Json metrics;
    metrics["max_features_per_datapoint"] = csi::max_features_per_datapoint(inst);
    csi::Json precisions = csi::Json::object();
    for (const csi::Id& phi : inst.certificates()) {
        try {
            precisions[phi] = csi::certificate_precision(inst, phi).str();
        } catch (const csi::UndefinedMetricError&) {
            // isolated certificate: precision undefined, omitted from the map
        }
    }
    metrics["certificate_precision"] = std::move(precisions);
    report["metrics"] = std::move(metrics);

    bool within_budget = inst.certificates().size() <= budget;
    try {
        if (within_budget) {
            csi::AfcOptions options;
            options.max_certificates = budget;
            options.threads = threads;
            report["afc"] = csi::afc_to_json(csi::afc_exact(inst, options), "exact");
        } else {
            report["afc"] =
                csi::afc_to_json(csi::afc_greedy(inst, greedy_seed), "greedy-lower-bound");
        }
        report["afc"]["within_budget"] = within_budget;
    } catch (const csi::UndefinedMetricError& e) {
        report["afc"] = {{"method", within_budget ? "exact" : "greedy-lower-bound"},
                         {"defined", false},
                         {"within_budget", within_budget},
                         {"note", e.what()}};
    }

    csi::Json warnings = csi::Json::array();
    for (const auto& w : loaded.report.warnings)
        warnings.push_back(w.message);
    report["warnings"] = std::move(warnings);

    write_output(flags.output, report.dump(2) + "\n");
    return kExitOk;
}

int run_solve(const CommonFlags& flags, bool dcs2, const csi::Rational& eps_c,
              const csi::Rational& second, bool greedy, std::uint64_t seed, std::size_t budget,
              unsigned threads) {
    std::string bytes;
    auto loaded = load_instance_file(flags.input, &bytes);
    const csi::CsInstance& inst = loaded.document.instance;

    csi::SolveOptions options;
    options.max_certificates = budget;
    options.threads = threads;

    std::optional<csi::DcsSolution> solution;
    if (dcs2)
        solution = greedy ? csi::solve_dcs2_greedy(inst, eps_c, second, seed)
                          : csi::solve_dcs2_exact(inst, eps_c, second, options);
    else
        solution = greedy ? csi::solve_dcs_greedy(inst, eps_c, second, seed)
                          : csi::solve_dcs_exact(inst, eps_c, second, options);

    const std::string problem = dcs2 ? "dcs2" : "dcs";
    csi::Json report;
    report["format_version"] = "1";
    report["kind"] = "solve-" + problem;
    std::string flag_string = "eps_c=" + eps_c.str() + (dcs2 ? " q=" : " eps_s=") + second.str() +
                              " mode=" + (greedy ? "greedy" : "exact") +
                              " budget=" + std::to_string(budget) +
                              " threads=" + std::to_string(threads);
    if (greedy)
        flag_string += " seed=" + std::to_string(seed);
    report["provenance"] = csi::make_provenance(bytes, flag_string, timestamp_if(flags.timestamp));
    report["solution"] = csi::solution_to_json(problem, eps_c, second, solution);

    write_output(flags.output, report.dump(2) + "\n");
    return solution ? kExitOk : kExitInfeasible;
}

int run_reduce(bool mku, const CommonFlags& flags, std::size_t k) {
    std::string text = read_file(flags.input);
    csi::ReductionArtifact artifact;
    if (mku)
        artifact = csi::reduce_mku(csi::parse_set_system(text), k);
    else
        artifact = csi::reduce_dks(csi::parse_source_graph(text), k);
    write_output(flags.output, csi::serialize_artifact(artifact));
    return kExitOk;
}

int run_lift(const std::string& artifact_path, const std::string& report_path,
             const std::string& output) {
    auto artifact = csi::parse_artifact(read_file(artifact_path));
    csi::Json report = csi::Json::parse(read_file(report_path), nullptr, false);
    if (report.is_discarded() || !report.contains("solution"))
        throw csi::ParseError("report file does not contain a solution");
    auto record = csi::solution_from_json(report["solution"]);
    if (!record.solution) {
        std::cerr << "error: the report records an infeasible solve; nothing to lift\n";
        return kExitInfeasible;
    }

    csi::Json out;
    if (artifact.kind == csi::ReductionKind::DensestKSubgraph) {
        auto lift = csi::lift_dks(artifact, *record.solution);
        out["vertices"] = lift.vertices;
        out["edge_count"] = lift.edge_count;
    } else {
        auto lift = csi::lift_mku(artifact, *record.solution);
        out["set_indices"] = lift.set_indices;
        out["union_size"] = lift.union_size;
    }
    write_output(output, out.dump(2) + "\n");
    return kExitOk;
}

int run_oracle(bool mku, const CommonFlags& flags, std::size_t parameter, std::size_t guard) {
    std::string text = read_file(flags.input);
    std::size_t optimum = mku ? csi::mku_brute(csi::parse_set_system(text), parameter, guard)
                              : csi::dks_brute(csi::parse_source_graph(text), parameter, guard);
    csi::Json out;
    out["optimum"] = optimum;
    write_output(flags.output, out.dump(2) + "\n");
    return kExitOk;
}

int run_export_dot(const CommonFlags& flags, const std::string& report_path) {
    auto loaded = load_instance_file(flags.input, nullptr);
    std::optional<csi::DcsSolution> solution;
    if (!report_path.empty()) {
        csi::Json report = csi::Json::parse(read_file(report_path), nullptr, false);
        if (report.is_discarded() || !report.contains("solution"))
            throw csi::ParseError("report file does not contain a solution");
        solution = csi::solution_from_json(report["solution"]).solution;
    }
    write_output(flags.output,
                 csi::export_dot(loaded.document.instance, solution ? &*solution : nullptr));
    return kExitOk;
}

int run_verify(const std::string& instance_path, const std::string& report_path) {
    std::string bytes;
    auto loaded = load_instance_file(instance_path, &bytes);
    csi::Json report = csi::Json::parse(read_file(report_path), nullptr, false);
    if (report.is_discarded())
        throw csi::ParseError("malformed report JSON");

    std::vector<std::string> issues;
    if (report.contains("provenance") && report["provenance"].contains("input_hash") &&
        report["provenance"]["input_hash"].get<std::string>() != csi::content_hash(bytes))
        issues.push_back("input hash does not match the instance file");
    for (auto& issue : csi::verify_report(loaded.document.instance, report))
        issues.push_back(std::move(issue));

    if (issues.empty()) {
        std::cout << "report verified: every recorded metric matches\n";
        return kExitOk;
    }
    for (const auto& issue : issues)
        std::cout << "mismatch: " << issue << "\n";
    return kExitInfeasible;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certificate-selection instances: metrics, deceptive-selection solvers, "
                 "hardness-reduction gadgets"};
    app.require_subcommand(1);

    const std::size_t default_budget = env_or("CSI_ENUM_BUDGET", csi::kDefaultEnumBudget);
    const std::size_t default_guard = env_or("CSI_ENUM_BUDGET", csi::kDefaultOracleGuard);

    // generate
    auto* generate = app.add_subcommand("generate", "emit an instance file");
    generate->require_subcommand(1);
    std::string gen_output;
    auto* gen_ld = generate->add_subcommand("letters-digits", "the AFC-exploit family");
    std::size_t ld_n = 4;
    gen_ld->add_option("--n", ld_n, "family size")->required();
    gen_ld->add_option("-o,--output", gen_output, "output file (default stdout)");

    auto* gen_random = generate->add_subcommand("random", "seeded random tripartite instance");
    csi::RandomCsiParams random_params;
    std::string p_in_text = "1/2";
    std::string p_out_text = "1/2";
    gen_random->add_option("--n-in", random_params.n_in, "in-class datapoints")->required();
    gen_random->add_option("--n-out", random_params.n_out, "out-class datapoints")->required();
    gen_random->add_option("--m", random_params.m, "certificates")->required();
    gen_random->add_option("--p-in", p_in_text, "in-class edge probability p/q");
    gen_random->add_option("--p-out", p_out_text, "out-class edge probability p/q");
    gen_random->add_option("--seed", random_params.seed, "generator seed")->required();
    gen_random->add_option("-o,--output", gen_output, "output file (default stdout)");

    auto* gen_zoo = generate->add_subcommand("zoo", "fixed named instances");
    std::string zoo_name;
    std::string zoo_artifact_output;
    gen_zoo->add_option("--name", zoo_name, "T1 | balanced-identity | k3-dks-k2 | mku-path")
        ->required();
    gen_zoo->add_option("-o,--output", gen_output, "output file (default stdout)");
    gen_zoo->add_option("--artifact-out", zoo_artifact_output,
                        "also write the reduction artifact bundle");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "metrics and AFC report for an instance");
    CommonFlags analyze_flags;
    std::size_t analyze_budget = default_budget;
    unsigned analyze_threads = 1;
    std::uint64_t analyze_greedy_seed = 0;
    analyze->add_option("-i,--input", analyze_flags.input, "instance file")->required();
    analyze->add_option("-o,--output", analyze_flags.output, "report file (default stdout)");
    analyze->add_option("--budget", analyze_budget, "exact-AFC certificate budget");
    analyze->add_option("--threads", analyze_threads, "enumeration workers");
    analyze->add_option("--greedy-seed", analyze_greedy_seed, "seed for the greedy AFC bound");
    analyze->add_flag("--timestamp", analyze_flags.timestamp, "record a timestamp");

    // solve-dcs / solve-dcs2
    auto* solve_dcs = app.add_subcommand("solve-dcs", "deceptive certificate selection");
    auto* solve_dcs2 = app.add_subcommand("solve-dcs2", "detectability-minimizing variant");
    CommonFlags solve_flags[2];
    std::string eps_c_text[2], second_text[2];
    bool solve_exact[2] = {false, false};
    bool solve_greedy[2] = {false, false};
    std::uint64_t solve_seed[2] = {0, 0};
    std::size_t solve_budget[2] = {default_budget, default_budget};
    unsigned solve_threads[2] = {1, 1};
    for (int i = 0; i < 2; ++i) {
        CLI::App* cmd = i == 0 ? solve_dcs : solve_dcs2;
        cmd->add_option("-i,--input", solve_flags[i].input, "instance file")->required();
        cmd->add_option("-o,--output", solve_flags[i].output, "report file (default stdout)");
        cmd->add_option("--eps-c", eps_c_text[i], "completeness tolerance p/q")->required();
        if (i == 0)
            cmd->add_option("--eps-s", second_text[i], "soundness tolerance p/q")->required();
        else
            cmd->add_option("--q", second_text[i], "precision margin p/q")->required();
        cmd->add_flag("--exact", solve_exact[i], "exact enumeration (default)");
        cmd->add_flag("--greedy", solve_greedy[i], "greedy local search");
        cmd->add_option("--seed", solve_seed[i], "greedy seed");
        cmd->add_option("--budget", solve_budget[i], "exact enumeration certificate budget");
        cmd->add_option("--threads", solve_threads[i], "enumeration workers");
        cmd->add_flag("--timestamp", solve_flags[i].timestamp, "record a timestamp");
    }

    // reduce
    auto* reduce = app.add_subcommand("reduce", "build a hardness-reduction gadget");
    reduce->require_subcommand(1);
    CommonFlags reduce_flags;
    std::size_t reduce_k = 1;
    auto* reduce_dks_cmd = reduce->add_subcommand("dks", "densest-k-subgraph gadget");
    auto* reduce_mku_cmd = reduce->add_subcommand("mku", "min-k-union gadget");
    for (CLI::App* cmd : {reduce_dks_cmd, reduce_mku_cmd}) {
        cmd->add_option("-i,--input", reduce_flags.input, "source problem file")->required();
        cmd->add_option("--k", reduce_k, "source problem parameter k")->required();
        cmd->add_option("-o,--output", reduce_flags.output, "artifact file (default stdout)");
    }

    // lift
    auto* lift = app.add_subcommand("lift", "map a gadget solution back to the source problem");
    std::string lift_artifact, lift_report, lift_output;
    lift->add_option("-a,--artifact", lift_artifact, "artifact bundle file")->required();
    lift->add_option("-s,--solution", lift_report, "solve report file")->required();
    lift->add_option("-o,--output", lift_output, "output file (default stdout)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "brute-force source-problem optimum");
    oracle->require_subcommand(1);
    CommonFlags oracle_flags;
    std::size_t oracle_k = 1, oracle_l = 1;
    std::size_t oracle_guard = default_guard;
    auto* oracle_dks_cmd = oracle->add_subcommand("dks", "densest-k-subgraph optimum");
    oracle_dks_cmd->add_option("-i,--input", oracle_flags.input, "graph file")->required();
    oracle_dks_cmd->add_option("--k", oracle_k, "subgraph size")->required();
    oracle_dks_cmd->add_option("--guard", oracle_guard, "enumeration size guard");
    oracle_dks_cmd->add_option("-o,--output", oracle_flags.output, "output file");
    auto* oracle_mku_cmd = oracle->add_subcommand("mku", "min-l-union optimum");
    oracle_mku_cmd->add_option("-i,--input", oracle_flags.input, "set system file")->required();
    oracle_mku_cmd->add_option("--l", oracle_l, "number of sets")->required();
    oracle_mku_cmd->add_option("--guard", oracle_guard, "enumeration size guard");
    oracle_mku_cmd->add_option("-o,--output", oracle_flags.output, "output file");

    // export-dot
    auto* export_dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of an instance");
    CommonFlags dot_flags;
    std::string dot_report;
    export_dot_cmd->add_option("-i,--input", dot_flags.input, "instance file")->required();
    export_dot_cmd->add_option("-s,--solution", dot_report, "solve report to overlay");
    export_dot_cmd->add_option("-o,--output", dot_flags.output, "output file (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "recompute every metric a report claims");
    std::string verify_instance, verify_report_path;
    verify->add_option("-i,--input", verify_instance, "instance file")->required();
    verify->add_option("-r,--report", verify_report_path, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (gen_ld->parsed())
            return run_generate_letters_digits(ld_n, gen_output);
        if (gen_random->parsed()) {
            random_params.p_in = parse_rational_flag(p_in_text, "--p-in");
            random_params.p_out = parse_rational_flag(p_out_text, "--p-out");
            return run_generate_random(random_params, gen_output);
        }
        if (gen_zoo->parsed())
            return run_generate_zoo(zoo_name, gen_output, zoo_artifact_output);
        if (analyze->parsed())
            return run_analyze(analyze_flags, analyze_budget, analyze_threads,
                               analyze_greedy_seed);
        for (int i = 0; i < 2; ++i) {
            CLI::App* cmd = i == 0 ? solve_dcs : solve_dcs2;
            if (!cmd->parsed())
                continue;
            if (solve_exact[i] && solve_greedy[i])
                throw csi::ParseError("--exact and --greedy are mutually exclusive");
            return run_solve(solve_flags[i], i == 1,
                             parse_rational_flag(eps_c_text[i], "--eps-c"),
                             parse_rational_flag(second_text[i], i == 0 ? "--eps-s" : "--q"),
                             solve_greedy[i], solve_seed[i], solve_budget[i], solve_threads[i]);
        }
        if (reduce_dks_cmd->parsed())
            return run_reduce(false, reduce_flags, reduce_k);
        if (reduce_mku_cmd->parsed())
            return run_reduce(true, reduce_flags, reduce_k);
        if (lift->parsed())
            return run_lift(lift_artifact, lift_report, lift_output);
        if (oracle_dks_cmd->parsed())
            return run_oracle(false, oracle_flags, oracle_k, oracle_guard);
        if (oracle_mku_cmd->parsed())
            return run_oracle(true, oracle_flags, oracle_l, oracle_guard);
        if (export_dot_cmd->parsed())
            return run_export_dot(dot_flags, dot_report);
        if (verify->parsed())
            return run_verify(verify_instance, verify_report_path);
        std::cerr << "error: no subcommand\n";
        return kExitInputError;
    } catch (const csi::BudgetExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudgetExceeded;
    } catch (const csi::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& issue : e.issues())
            std::cerr << "  violation: " << issue << "\n";
        return kExitInvalidInstance;
    } catch (const csi::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
