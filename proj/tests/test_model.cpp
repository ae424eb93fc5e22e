#include "doctest.h"

#include <algorithm>

#include "csi/generators.hpp"
#include "csi/instance.hpp"
#include "test_util.hpp"

using namespace csi;
using testutil::make_t1;

TEST_CASE("validate accepts T1 and is idempotent") {
    auto t1 = make_t1();
    auto report = validate(t1);
    CHECK(report.valid());
    CHECK(report.warnings.empty());

    auto again = validate(t1);
    CHECK(again.violations.size() == report.violations.size());
    CHECK(again.warnings.size() == report.warnings.size());
}

TEST_CASE("validate reports an edge joining two certificates") {
    CsInstance bad({"x1", "x2"}, {"y1"}, {"a", "b"},
                   {{"x1", "a"}, {"x2", "a"}, {"x2", "b"}, {"y1", "b"}, {"a", "b"}});
    auto report = validate(bad);
    CHECK(!report.valid());
    CHECK(report.has("edge-joins-two-certificates"));
}

TEST_CASE("validate reports an empty in-class set") {
    CsInstance bad({}, {"y1"}, {"a", "b"}, {{"y1", "b"}});
    auto report = validate(bad);
    CHECK(!report.valid());
    CHECK(report.has("empty-in-class"));
}

TEST_CASE("validate catalogue: datapoint-datapoint edges, unknown ids, duplicates") {
    CHECK(validate(CsInstance({"x1"}, {"y1"}, {"a"}, {{"x1", "y1"}, {"x1", "a"}}))
              .has("edge-joins-two-datapoints"));
    CHECK(validate(CsInstance({"x1"}, {"y1"}, {"a"}, {{"x1", "zz"}, {"x1", "a"}, {"y1", "a"}}))
              .has("unknown-id"));
    CHECK(validate(CsInstance({"x1"}, {"y1"}, {"a"}, {{"a", "x1"}}))
              .has("edge-endpoints-swapped"));
    CHECK(validate(CsInstance({"x1", "x1"}, {"y1"}, {"a"}, {{"x1", "a"}})).has("duplicate-id"));
    CHECK(validate(CsInstance({"x1"}, {"x1"}, {"a"}, {{"x1", "a"}})).has("duplicate-id"));

    // duplicate edges collapse with a warning, not a violation
    CsInstance dup({"x1"}, {"y1"}, {"a"}, {{"x1", "a"}, {"x1", "a"}, {"y1", "a"}});
    auto report = validate(dup);
    CHECK(report.valid());
    CHECK(report.has("duplicate-edge"));
    CHECK(dup.edges().size() == 2);

    // degree-0 in-class datapoints are flagged as a warning
    CsInstance isolated({"x1", "x2"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    auto iso_report = validate(isolated);
    CHECK(iso_report.valid());
    CHECK(iso_report.has("isolated-in-class-datapoint"));
}

TEST_CASE("neighbors of datapoints, certificates and certificate sets") {
    auto t1 = make_t1();
    CHECK(neighbors(t1, "x2") == std::vector<Id>{"a", "b"});
    CHECK(neighbors(t1, "b") == std::vector<Id>{"x2", "y1"});
    std::vector<Id> f{"a", "b"};
    CHECK(neighbors(t1, std::span<const Id>(f)) == std::vector<Id>{"x1", "x2", "y1"});

    CHECK_THROWS_AS(neighbors(t1, "nope"), UnknownVertexError);
    std::vector<Id> not_certs{"x1"};
    CHECK_THROWS_AS(neighbors(t1, std::span<const Id>(not_certs)), Error);
}

TEST_CASE("max features per datapoint") {
    CHECK(max_features_per_datapoint(make_t1()) == 2);
    CHECK(max_features_per_datapoint(letters_digits(4)) == 4);

    // an isolated datapoint counts with degree 0; the max comes from the rest
    CsInstance isolated({"x1"}, {"y1", "y2"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK(max_features_per_datapoint(isolated) == 1);
}

TEST_CASE("neighbors is symmetric on every vertex pair") {
    for (const CsInstance& inst :
         {letters_digits(6), testutil::random_small_instance(1), testutil::random_small_instance(2)}) {
        std::vector<Id> datapoints = inst.in_class();
        datapoints.insert(datapoints.end(), inst.out_class().begin(), inst.out_class().end());
        for (const Id& d : datapoints) {
            auto dn = neighbors(inst, d);
            for (const Id& c : inst.certificates()) {
                auto cn = neighbors(inst, c);
                bool d_sees_c = std::find(dn.begin(), dn.end(), c) != dn.end();
                bool c_sees_d = std::find(cn.begin(), cn.end(), d) != cn.end();
                CHECK(d_sees_c == c_sees_d);
            }
        }
    }
}

TEST_CASE("prover and verifier defects") {
    auto t1 = make_t1();
    CHECK(!prover_defect(t1, testutil::prover({{"x1", "a"}, {"x2", "b"}})));
    CHECK(prover_defect(t1, testutil::prover({{"x1", "a"}})).has_value());      // not total
    CHECK(prover_defect(t1, testutil::prover({{"x1", "b"}, {"x2", "b"}})).has_value()); // non-edge
    CHECK(!verifier_defect(t1, testutil::accept({"a"})));
    CHECK(verifier_defect(t1, testutil::accept({"zz"})).has_value());
}

TEST_CASE("instances normalize to sorted deduplicated views") {
    CsInstance inst({"x2", "x1"}, {"y1"}, {"b", "a"},
                    {{"x2", "b"}, {"x1", "a"}, {"x2", "a"}, {"y1", "b"}, {"x2", "b"}});
    CHECK(inst.in_class() == std::vector<Id>{"x1", "x2"});
    CHECK(inst.certificates() == std::vector<Id>{"a", "b"});
    CHECK(inst.edges().size() == 4);
    CHECK(inst == make_t1());
}
