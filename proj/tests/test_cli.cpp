#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "csi/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kTool = CSI_TOOL_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("csi-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    std::string cmd = kTool + " " + args + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("cli: generate then analyze reproduces the headline AFC") {
    TempDir tmp;
    std::string inst = tmp.file("ld4.json");
    std::string report = tmp.file("report.json");
    CHECK(run("generate letters-digits --n 4 -o " + inst) == 0);
    CHECK(run("analyze -i " + inst + " -o " + report) == 0);

    csi::Json j = csi::Json::parse(slurp(report));
    CHECK(j["afc"]["value"] == "4/1");
    CHECK(j["afc"]["method"] == "exact");
    CHECK(j["afc"]["within_budget"] == true);
    CHECK(j["metrics"]["certificate_precision"]["letter-1"] == "1/2");

    // determinism: rerunning produces byte-identical output
    std::string report2 = tmp.file("report2.json");
    CHECK(run("analyze -i " + inst + " -o " + report2) == 0);
    CHECK(slurp(report) == slurp(report2));

    // the report re-verifies against the instance
    CHECK(run("verify -i " + inst + " -r " + report) == 0);
}

TEST_CASE("cli: reduce, solve, lift round trip on the triangle") {
    TempDir tmp;
    std::string graph = tmp.file("k3.graph");
    spit(graph, "csi-graph 1\nvertices 1 2 3\n1 2\n1 3\n2 3\n");

    std::string artifact = tmp.file("artifact.json");
    CHECK(run("reduce dks -i " + graph + " --k 2 -o " + artifact) == 0);

    csi::Json bundle = csi::Json::parse(slurp(artifact));
    CHECK(bundle["eps_c"] == "1/7");
    CHECK(bundle["eps_s"] == "2/3");

    std::string inst = tmp.file("inst.json");
    csi::InstanceDocument doc;
    doc.instance = csi::parse_artifact(slurp(artifact)).instance;
    spit(inst, csi::serialize_instance(doc));

    std::string report = tmp.file("solve.json");
    CHECK(run("solve-dcs -i " + inst + " --eps-c 1/7 --eps-s 2/3 --exact -o " + report) == 0);
    csi::Json solved = csi::Json::parse(slurp(report));
    CHECK(solved["solution"]["objective"] == "1/6");

    std::string lifted = tmp.file("lift.json");
    CHECK(run("lift -a " + artifact + " -s " + report + " -o " + lifted) == 0);
    csi::Json answer = csi::Json::parse(slurp(lifted));
    CHECK(answer["edge_count"] == 1);
    CHECK(answer["vertices"].size() == 2);

    std::string oracle_out = tmp.file("oracle.json");
    CHECK(run("oracle dks -i " + graph + " --k 2 -o " + oracle_out) == 0);
    CHECK(csi::Json::parse(slurp(oracle_out))["optimum"] == 1);
}

TEST_CASE("cli: T1 solve and exit codes") {
    TempDir tmp;
    std::string inst = tmp.file("t1.json");
    CHECK(run("generate zoo --name T1 -o " + inst) == 0);

    std::string report = tmp.file("solve.json");
    CHECK(run("solve-dcs -i " + inst + " --eps-c 0/1 --eps-s 0/1 --exact -o " + report) == 0);
    CHECK(csi::Json::parse(slurp(report))["solution"]["objective"] == "0/1");

    // infeasible: a forced certificate covers the only out-class datapoint
    std::string forced = tmp.file("forced.json");
    spit(forced, R"({"format_version":"1","in_class":["x1"],"out_class":["y1"],
                    "certificates":["a"],"edges":[["x1","a"],["y1","a"]],"metadata":{}})");
    CHECK(run("solve-dcs -i " + forced + " --eps-c 0/1 --eps-s 0/1 -o " + tmp.file("x.json")) ==
          1);

    // input error: missing file and malformed json
    CHECK(run("analyze -i " + tmp.file("missing.json")) == 2);
    std::string garbage = tmp.file("garbage.json");
    spit(garbage, "{ not json");
    CHECK(run("analyze -i " + garbage) == 2);

    // invalid instance: unknown edge endpoint
    std::string invalid = tmp.file("invalid.json");
    spit(invalid, R"({"format_version":"1","in_class":["x1"],"out_class":["y1"],
                     "certificates":["a"],"edges":[["x1","ghost"],["x1","a"]],"metadata":{}})");
    CHECK(run("analyze -i " + invalid) == 4);

    // budget exceeded
    std::string ld = tmp.file("ld4.json");
    CHECK(run("generate letters-digits --n 4 -o " + ld) == 0);
    CHECK(run("solve-dcs -i " + ld + " --eps-c 1/5 --eps-s 1/5 --budget 2 -o " +
              tmp.file("y.json")) == 3);

    // bad rational flag
    CHECK(run("solve-dcs -i " + inst + " --eps-c nope --eps-s 0/1") == 2);

    // unknown zoo entry
    CHECK(run("generate zoo --name nope -o " + tmp.file("z.json")) == 2);
}

TEST_CASE("cli: greedy solves, dcs2, dot export, verify failure") {
    TempDir tmp;
    std::string ld = tmp.file("ld4.json");
    CHECK(run("generate letters-digits --n 4 -o " + ld) == 0);

    std::string greedy = tmp.file("greedy.json");
    CHECK(run("solve-dcs -i " + ld + " --eps-c 1/5 --eps-s 1/5 --greedy --seed 3 -o " + greedy) ==
          0);
    csi::Json g = csi::Json::parse(slurp(greedy));
    CHECK(g["solution"]["optimal"] == false);
    CHECK(run("verify -i " + ld + " -r " + greedy) == 0);

    std::string dcs2 = tmp.file("dcs2.json");
    CHECK(run("solve-dcs2 -i " + ld + " --eps-c 1/5 --q 1/2 --exact -o " + dcs2) == 0);
    CHECK(csi::Json::parse(slurp(dcs2))["solution"]["objective"] == "1/5");

    std::string dot = tmp.file("ld4.dot");
    CHECK(run("export-dot -i " + ld + " -s " + dcs2 + " -o " + dot) == 0);
    CHECK(slurp(dot).find("class=\"accepted\"") != std::string::npos);

    // tampered report fails verification with exit 1
    csi::Json tampered = csi::Json::parse(slurp(dcs2));
    tampered["solution"]["objective"] = "1/4";
    std::string bad = tmp.file("tampered.json");
    spit(bad, tampered.dump(2) + "\n");
    CHECK(run("verify -i " + ld + " -r " + bad) == 1);

    // random generation is seed-reproducible end to end
    std::string r1 = tmp.file("r1.json"), r2 = tmp.file("r2.json");
    std::string gen = "generate random --n-in 4 --n-out 4 --m 6 --p-in 1/2 --p-out 1/3 --seed 9";
    CHECK(run(gen + " -o " + r1) == 0);
    CHECK(run(gen + " -o " + r2) == 0);
    CHECK(slurp(r1) == slurp(r2));

    // mku flow
    std::string sets = tmp.file("sets.txt");
    spit(sets, "csi-sets 1\nuniverse 1 2 3 4\n1 2\n2 3\n3 4\n");
    std::string mku_artifact = tmp.file("mku.json");
    CHECK(run("reduce mku -i " + sets + " --k 1 -o " + mku_artifact) == 0);
    std::string mku_inst = tmp.file("mku-inst.json");
    csi::InstanceDocument doc;
    doc.instance = csi::parse_artifact(slurp(mku_artifact)).instance;
    spit(mku_inst, csi::serialize_instance(doc));
    std::string mku_report = tmp.file("mku-solve.json");
    CHECK(run("solve-dcs2 -i " + mku_inst + " --eps-c 1/7 --q 1/3 -o " + mku_report) == 0);
    CHECK(csi::Json::parse(slurp(mku_report))["solution"]["objective"] == "3/4");
    std::string mku_lift = tmp.file("mku-lift.json");
    CHECK(run("lift -a " + mku_artifact + " -s " + mku_report + " -o " + mku_lift) == 0);
    csi::Json lifted = csi::Json::parse(slurp(mku_lift));
    CHECK(lifted["union_size"] == 3);
    CHECK(run("oracle mku -i " + sets + " --l 2 -o " + tmp.file("mo.json")) == 0);
    CHECK(csi::Json::parse(slurp(tmp.file("mo.json")))["optimum"] == 3);
}
