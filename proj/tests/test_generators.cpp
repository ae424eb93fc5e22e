#include "doctest.h"

#include <algorithm>

#include "csi/generators.hpp"
#include "csi/io.hpp"
#include "csi/metrics.hpp"
#include "test_util.hpp"

using namespace csi;
using testutil::rat;

TEST_CASE("letters_digits family counts and structure") {
    for (std::size_t n = 1; n <= 8; ++n) {
        auto inst = letters_digits(n);
        CHECK(inst.in_class().size() == n + 1);
        CHECK(inst.out_class().size() == n + 1);
        CHECK(inst.certificates().size() == 2 * n);
        CHECK(inst.edges().size() == 4 * n);
        auto report = validate(inst);
        CHECK(report.valid());
        CHECK(report.warnings.empty());
    }

    auto inst = letters_digits(4);
    CHECK(neighbors(inst, "letter-1") == std::vector<Id>{"in-letter-1", "out-letters-all"});
    CHECK(neighbors(inst, "digit-3") == std::vector<Id>{"in-digits-all", "out-digit-3"});
    CHECK(neighbors(inst, "in-digits-all") ==
          std::vector<Id>{"digit-1", "digit-2", "digit-3", "digit-4"});

    CHECK_THROWS_AS(letters_digits(0), Error);
}

TEST_CASE("random instances are reproducible and honor their parameters") {
    RandomCsiParams params;
    params.n_in = 5;
    params.n_out = 4;
    params.m = 6;
    params.p_in = rat(1, 2);
    params.p_out = rat(1, 3);
    params.seed = 42;

    auto a = random_csi(params);
    auto b = random_csi(params);
    CHECK(a == b);
    CHECK(serialize_instance({kInstanceFormatVersion, a, Json::object()}) ==
          serialize_instance({kInstanceFormatVersion, b, Json::object()}));

    params.seed = 43;
    auto c = random_csi(params);
    CHECK(!(a == c));

    // saturated probabilities force the precision of every certificate
    params.p_in = rat(1);
    params.p_out = rat(0);
    auto pure = random_csi(params);
    for (const Id& cert : pure.certificates())
        CHECK(certificate_precision(pure, cert) == rat(1));

    params.p_out = rat(1);
    auto dense = random_csi(params);
    for (const Id& cert : dense.certificates())
        CHECK(certificate_precision(dense, cert) ==
              rat(static_cast<long long>(params.n_in),
                  static_cast<long long>(params.n_in + params.n_out)));

    CHECK_THROWS_AS(random_csi({0, 1, 1, rat(1, 2), rat(1, 2), 1}), Error);
    CHECK_THROWS_AS(random_csi({1, 1, 1, rat(3, 2), rat(1, 2), 1}), Error);
}

TEST_CASE("isolated in-class datapoints are repaired") {
    RandomCsiParams params;
    params.n_in = 4;
    params.n_out = 3;
    params.m = 5;
    params.p_in = rat(0); // every in-class datapoint starts isolated
    params.p_out = rat(1, 2);
    params.seed = 11;

    std::vector<Id> repaired;
    auto inst = random_csi(params, &repaired);
    CHECK(repaired.size() == 4);
    auto report = validate(inst);
    CHECK(report.valid());
    CHECK(!report.has("isolated-in-class-datapoint"));
    for (std::size_t x = 0; x < inst.in_class().size(); ++x)
        CHECK(inst.in_adjacency(x).size() == 1);
}

TEST_CASE("every generated instance validates cleanly") {
    for (int i = 0; i < 50; ++i) {
        auto inst = testutil::random_small_instance(i);
        CHECK(validate(inst).valid());
    }
}

TEST_CASE("the zoo carries the fixed instances and reduction artifacts") {
    auto zoo = gadget_zoo();
    std::vector<std::string> names;
    for (const auto& entry : zoo)
        names.push_back(entry.name);
    CHECK(names == std::vector<std::string>{"T1", "balanced-identity", "k3-dks-k2", "mku-path"});

    CHECK(zoo[0].instance == testutil::make_t1());
    CHECK(!zoo[0].artifact.has_value());
    CHECK(zoo[1].instance == testutil::make_balanced());

    REQUIRE(zoo[2].artifact.has_value());
    CHECK(zoo[2].artifact->eps_c == rat(1, 7));
    CHECK(zoo[2].artifact->eps_s_or_q == rat(2, 3));
    CHECK(zoo[2].instance == zoo[2].artifact->instance);

    REQUIRE(zoo[3].artifact.has_value());
    CHECK(zoo[3].artifact->eps_c == rat(1, 7));
    CHECK(zoo[3].artifact->eps_s_or_q == rat(1, 3));
}
