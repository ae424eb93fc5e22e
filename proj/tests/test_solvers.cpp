#include "doctest.h"

#include <random>

#include "csi/generators.hpp"
#include "csi/metrics.hpp"
#include "csi/reductions.hpp"
#include "csi/solvers.hpp"
#include "naive_oracle.hpp"
#include "test_util.hpp"

using namespace csi;
using testutil::accept;
using testutil::make_t1;
using testutil::prover;
using testutil::rat;

namespace {

void check_solution_invariants(const CsInstance& inst, const DcsSolution& sol, bool dcs2) {
    CHECK(completeness(inst, sol.verifier, sol.prover) == sol.achieved_completeness);
    CHECK(soundness(inst, sol.verifier) == sol.achieved_soundness);
    CHECK(prover_precision(inst, sol.prover) == sol.achieved_prover_precision);
    Rational expected = dcs2 ? Rational(1) - sol.achieved_soundness
                             : Rational(1) - sol.achieved_prover_precision;
    CHECK(sol.objective == expected);
}

std::vector<Id> letter_set(std::size_t n) {
    std::vector<Id> out;
    for (std::size_t i = 1; i <= n; ++i)
        out.push_back("letter-" + std::to_string(i));
    return out;
}

} // namespace

TEST_CASE("optimal prover given verifier on T1") {
    auto t1 = make_t1();

    auto tight = optimal_prover_given_verifier(t1, accept({"a"}), rat(0));
    REQUIRE(tight.has_value());
    CHECK(tight->prover == prover({{"x1", "a"}, {"x2", "a"}}));
    CHECK(tight->precision == rat(1));

    auto slack = optimal_prover_given_verifier(t1, accept({"a"}), rat(1, 2));
    REQUIRE(slack.has_value());
    CHECK(slack->prover == prover({{"x1", "a"}, {"x2", "b"}}));
    CHECK(slack->precision == rat(3, 4));

    CHECK(!optimal_prover_given_verifier(t1, accept({}), rat(0)).has_value());

    CsInstance isolated({"x1", "x2"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK_THROWS_AS(optimal_prover_given_verifier(isolated, accept({"a"}), rat(0)),
                    NoProverError);
}

TEST_CASE("optimal prover matches full prover enumeration on 500 random trials") {
    std::mt19937_64 rng(17);
    const Rational eps_choices[] = {rat(0), rat(1, 4), rat(1, 2), rat(1)};
    int trials = 0;
    for (int i = 0; trials < 500; ++i) {
        auto inst = testutil::random_small_instance(40000 + i, 8, 4, 6);
        auto a = testutil::random_verifier(inst, rng);
        const Rational& eps_c = eps_choices[rng() % 4];
        ++trials;

        auto plan = optimal_prover_given_verifier(inst, a, eps_c);
        auto naive = oracle::min_precision_given(
            inst, a.accepted, oracle::Rat(eps_c.numerator().str()) /
                                  oracle::Rat(eps_c.denominator().str()));
        if (!naive) {
            CHECK(!plan.has_value());
            continue;
        }
        REQUIRE(plan.has_value());
        CHECK(oracle::eq(plan->precision, *naive));
        CHECK(completeness(inst, a, plan->prover) >= Rational(1) - eps_c);
    }
}

TEST_CASE("exact DCS on the letters/digits exploit") {
    auto ld = letters_digits(4);
    auto sol = solve_dcs_exact(ld, rat(1, 5), rat(1, 5));
    REQUIRE(sol.has_value());
    CHECK(sol->objective == rat(1, 2));
    CHECK(sol->achieved_completeness == rat(4, 5));
    CHECK(sol->achieved_soundness == rat(4, 5));
    CHECK(std::vector<Id>(sol->verifier.accepted.begin(), sol->verifier.accepted.end()) ==
          letter_set(4));
    CHECK(sol->optimal);
    check_solution_invariants(ld, *sol, false);
}

TEST_CASE("exact DCS on T1 and on the triangle reduction") {
    auto t1 = make_t1();
    auto sol = solve_dcs_exact(t1, rat(0), rat(0));
    REQUIRE(sol.has_value());
    CHECK(sol->objective == rat(0));
    CHECK(sol->verifier == accept({"a"}));
    CHECK(sol->achieved_prover_precision == rat(1));
    check_solution_invariants(t1, *sol, false);

    auto k3 = SourceGraph::create({"1", "2", "3"}, {{"1", "2"}, {"1", "3"}, {"2", "3"}});
    auto artifact = reduce_dks(k3, 2);
    auto k3_sol = solve_dcs_exact(artifact.instance, artifact.eps_c, artifact.eps_s_or_q);
    REQUIRE(k3_sol.has_value());
    CHECK(k3_sol->objective == rat(1, 6));
}

TEST_CASE("exact DCS flags infeasibility and budget overruns") {
    CsInstance forced({"x1"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK(!solve_dcs_exact(forced, rat(0), rat(0)).has_value());

    // instances whose prover space is empty are infeasible, not an error
    CsInstance isolated({"x1", "x2"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK(!solve_dcs_exact(isolated, rat(1), rat(1)).has_value());

    SolveOptions tight;
    tight.max_certificates = 4;
    CHECK_THROWS_AS(solve_dcs_exact(letters_digits(4), rat(1, 5), rat(1, 5), tight),
                    BudgetExceededError);
    CHECK_THROWS_WITH_AS(solve_dcs_exact(letters_digits(4), rat(1, 5), rat(1, 5), tight),
                         doctest::Contains("solve_dcs_greedy"), BudgetExceededError);
}

TEST_CASE("exact DCS matches the naive double enumeration on random instances") {
    std::mt19937_64 rng(23);
    const Rational eps[] = {rat(0), rat(1, 3), rat(1, 2)};
    int compared = 0;
    for (int i = 0; compared < 60; ++i) {
        auto inst = testutil::random_small_instance(60000 + i, 4, 4, 7);
        const Rational& eps_c = eps[rng() % 3];
        const Rational& eps_s = eps[rng() % 3];
        ++compared;

        auto naive = oracle::dcs(inst, oracle::Rat(eps_c.numerator().str()) /
                                           oracle::Rat(eps_c.denominator().str()),
                                 oracle::Rat(eps_s.numerator().str()) /
                                     oracle::Rat(eps_s.denominator().str()));
        auto sol = solve_dcs_exact(inst, eps_c, eps_s);
        CHECK(naive.feasible == sol.has_value());
        if (sol) {
            CHECK(oracle::eq(sol->objective, naive.objective));
            CHECK(sol->achieved_completeness >= Rational(1) - eps_c);
            CHECK(sol->achieved_soundness >= Rational(1) - eps_s);
            check_solution_invariants(inst, *sol, false);
        }
    }
}

TEST_CASE("exact DCS2 on the letters/digits exploit") {
    auto ld = letters_digits(4);
    auto sol = solve_dcs2_exact(ld, rat(1, 5), rat(1, 2));
    REQUIRE(sol.has_value());
    CHECK(sol->objective == rat(1, 5));
    CHECK(sol->achieved_prover_precision == rat(1, 2));
    check_solution_invariants(ld, *sol, true);
}

TEST_CASE("exact DCS2 on T1: feasibility is governed by the precision floor 3/4") {
    // The cheapest prover with full completeness uses {x1->a, x2->b} at
    // average precision 3/4 (verified against the naive oracle below), so the
    // precision ceiling 1 - q is reachable exactly for q <= 1/4.
    auto t1 = make_t1();
    auto naive_floor = oracle::min_precision_given(t1, {"a", "b"}, oracle::Rat(0));
    REQUIRE(naive_floor.has_value());
    CHECK(oracle::str(*naive_floor) == "3/4");

    CHECK(!solve_dcs2_exact(t1, rat(0), rat(1, 2)).has_value());
    CHECK(!solve_dcs2_exact(t1, rat(0), rat(1, 3)).has_value());

    auto at_floor = solve_dcs2_exact(t1, rat(0), rat(1, 4));
    REQUIRE(at_floor.has_value());
    CHECK(at_floor->objective == rat(1));
    CHECK(at_floor->verifier == accept({"a", "b"}));
    check_solution_invariants(t1, *at_floor, true);

    auto naive = oracle::dcs2(t1, oracle::Rat(0), oracle::Rat(1) / 4);
    CHECK(naive.feasible);
    CHECK(oracle::eq(at_floor->objective, naive.objective));
}

TEST_CASE("exact DCS2 on the min-k-union gadget") {
    auto sets = SetSystem::create({"1", "2", "3", "4"}, {{"1", "2"}, {"2", "3"}, {"3", "4"}});
    auto artifact = reduce_mku(sets, 1);
    auto sol = solve_dcs2_exact(artifact.instance, artifact.eps_c, artifact.eps_s_or_q);
    REQUIRE(sol.has_value());
    CHECK(sol->objective == rat(3, 4)); // mku_brute(S, 2) / |U| = 3/4
    check_solution_invariants(artifact.instance, *sol, true);
}

TEST_CASE("exact DCS2 matches the naive enumeration on random instances") {
    std::mt19937_64 rng(29);
    const Rational eps[] = {rat(0), rat(1, 3), rat(1, 2)};
    const Rational qs[] = {rat(0), rat(1, 4), rat(1, 2)};
    int compared = 0;
    for (int i = 0; compared < 40; ++i) {
        auto inst = testutil::random_small_instance(70000 + i, 4, 4, 6);
        const Rational& eps_c = eps[rng() % 3];
        const Rational& q = qs[rng() % 3];
        ++compared;

        auto naive = oracle::dcs2(inst, oracle::Rat(eps_c.numerator().str()) /
                                            oracle::Rat(eps_c.denominator().str()),
                                  oracle::Rat(q.numerator().str()) /
                                      oracle::Rat(q.denominator().str()));
        auto sol = solve_dcs2_exact(inst, eps_c, q);
        CHECK(naive.feasible == sol.has_value());
        if (sol) {
            CHECK(oracle::eq(sol->objective, naive.objective));
            check_solution_invariants(inst, *sol, true);
        }
    }
}

TEST_CASE("exact solvers are identical for any worker count") {
    auto inst = testutil::random_small_instance(123123, 6, 6, 12);
    SolveOptions one, four;
    four.threads = 4;

    auto s1 = solve_dcs_exact(inst, rat(1, 3), rat(1, 2), one);
    auto s4 = solve_dcs_exact(inst, rat(1, 3), rat(1, 2), four);
    REQUIRE(s1.has_value() == s4.has_value());
    if (s1) {
        CHECK(s1->verifier == s4->verifier);
        CHECK(s1->prover == s4->prover);
        CHECK(s1->objective == s4->objective);
    }

    auto d1 = solve_dcs2_exact(inst, rat(1, 3), rat(1, 4), one);
    auto d4 = solve_dcs2_exact(inst, rat(1, 3), rat(1, 4), four);
    REQUIRE(d1.has_value() == d4.has_value());
    if (d1) {
        CHECK(d1->verifier == d4->verifier);
        CHECK(d1->prover == d4->prover);
        CHECK(d1->objective == d4->objective);
    }
}

TEST_CASE("solvers fall back to big integers when degree lcms overflow") {
    // certificate degrees are distinct primes, so the scaled-precision table
    // does not fit the 64-bit fast path
    std::vector<Id> in_class = {"p1", "p2"};
    std::vector<Id> out_class;
    std::vector<Id> certs;
    std::vector<Edge> edges;
    const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
    for (int i = 0; i < 14; ++i) {
        Id c = "c" + std::string(1, static_cast<char>('a' + i));
        certs.push_back(c);
        edges.push_back({i % 2 == 0 ? "p1" : "p2", c});
        for (int j = 0; j < primes[i] - 1; ++j) {
            Id y = c + "-y" + std::to_string(j);
            out_class.push_back(y);
            edges.push_back({y, c});
        }
    }
    CsInstance inst(in_class, out_class, certs, edges);
    REQUIRE(validate(inst).valid());

    auto sol = solve_dcs_exact(inst, rat(0), rat(1));
    REQUIRE(sol.has_value());
    auto naive = oracle::dcs(inst, oracle::Rat(0), oracle::Rat(1));
    CHECK(naive.feasible);
    CHECK(oracle::eq(sol->objective, naive.objective));
    check_solution_invariants(inst, *sol, false);
}

TEST_CASE("greedy DCS finds the canonical solutions and stays below the optimum") {
    auto t1 = make_t1();
    auto t1_sol = solve_dcs_greedy(t1, rat(0), rat(0), 7);
    REQUIRE(t1_sol.has_value());
    CHECK(t1_sol->objective == rat(0));
    CHECK(!t1_sol->optimal);

    auto ld = letters_digits(4);
    auto ld_sol = solve_dcs_greedy(ld, rat(1, 5), rat(1, 5), 7);
    REQUIRE(ld_sol.has_value());
    CHECK(ld_sol->objective <= rat(1, 2));
    CHECK(ld_sol->achieved_completeness >= rat(4, 5));
    CHECK(ld_sol->achieved_soundness >= rat(4, 5));
    check_solution_invariants(ld, *ld_sol, false);

    std::mt19937_64 rng(31);
    const Rational eps[] = {rat(0), rat(1, 3), rat(1, 2)};
    int feasible_pairs = 0;
    for (int i = 0; i < 100; ++i) {
        auto inst = testutil::random_small_instance(80000 + i, 5, 5, 8);
        const Rational& eps_c = eps[rng() % 3];
        const Rational& eps_s = eps[rng() % 3];
        auto exact = solve_dcs_exact(inst, eps_c, eps_s);
        auto greedy = solve_dcs_greedy(inst, eps_c, eps_s, i);
        if (greedy) {
            REQUIRE(exact.has_value());
            CHECK(greedy->objective <= exact->objective);
            CHECK(greedy->achieved_completeness >= Rational(1) - eps_c);
            CHECK(greedy->achieved_soundness >= Rational(1) - eps_s);
            check_solution_invariants(inst, *greedy, false);
            ++feasible_pairs;
        }
    }
    CHECK(feasible_pairs > 40);

    // determinism
    auto a = solve_dcs_greedy(ld, rat(1, 5), rat(1, 5), 99);
    auto b = solve_dcs_greedy(ld, rat(1, 5), rat(1, 5), 99);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->verifier == b->verifier);
    CHECK(a->prover == b->prover);
}

TEST_CASE("greedy DCS2 respects the ceiling and detects infeasibility exactly") {
    auto t1 = make_t1();
    CHECK(!solve_dcs2_greedy(t1, rat(0), rat(1, 2), 5).has_value());

    auto sets = SetSystem::create({"1", "2", "3", "4"}, {{"1", "2"}, {"2", "3"}, {"3", "4"}});
    auto artifact = reduce_mku(sets, 1);
    auto greedy = solve_dcs2_greedy(artifact.instance, artifact.eps_c, artifact.eps_s_or_q, 5);
    REQUIRE(greedy.has_value());
    auto exact = solve_dcs2_exact(artifact.instance, artifact.eps_c, artifact.eps_s_or_q);
    REQUIRE(exact.has_value());
    CHECK(greedy->objective >= exact->objective);
    CHECK(greedy->achieved_prover_precision <= Rational(1) - artifact.eps_s_or_q);
    check_solution_invariants(artifact.instance, *greedy, true);

    std::mt19937_64 rng(37);
    for (int i = 0; i < 40; ++i) {
        auto inst = testutil::random_small_instance(90000 + i, 4, 4, 7);
        Rational eps_c = rat(static_cast<long long>(rng() % 2), 2);
        Rational q = rat(static_cast<long long>(rng() % 3), 4);
        auto exact_sol = solve_dcs2_exact(inst, eps_c, q);
        auto greedy_sol = solve_dcs2_greedy(inst, eps_c, q, i);
        CHECK(exact_sol.has_value() == greedy_sol.has_value());
        if (greedy_sol) {
            CHECK(greedy_sol->objective >= exact_sol->objective);
            check_solution_invariants(inst, *greedy_sol, true);
        }
    }
}

TEST_CASE("eps-CSI membership") {
    auto t1 = make_t1();
    CHECK(is_eps_csi(t1, rat(0), rat(0)));
    CHECK(is_eps_csi(letters_digits(4), rat(1, 5), rat(1, 5)));

    for (std::size_t k : {1u, 2u}) {
        auto k3 = SourceGraph::create({"1", "2", "3"}, {{"1", "2"}, {"1", "3"}, {"2", "3"}});
        auto artifact = reduce_dks(k3, k);
        CHECK(is_eps_csi(artifact.instance, artifact.eps_c, artifact.eps_s_or_q));
    }

    CsInstance forced({"x1"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK(!is_eps_csi(forced, rat(0), rat(0)));
    CHECK(is_eps_csi(forced, rat(0), rat(1)));
    CHECK(is_eps_csi(forced, rat(1), rat(0)));

    CsInstance isolated({"x1", "x2"}, {"y1"}, {"a"}, {{"x1", "a"}, {"y1", "a"}});
    CHECK(!is_eps_csi(isolated, rat(1), rat(1)));

    // the perfectly-sound screen answers without enumeration at any size
    csi::RandomCsiParams big;
    big.n_in = 6;
    big.n_out = 6;
    big.m = 40;
    big.p_in = rat(1, 2);
    big.p_out = rat(0);
    big.seed = 5;
    auto wide = random_csi(big);
    CHECK(is_eps_csi(wide, rat(0), rat(0)));

    big.p_out = rat(1);
    auto noisy = random_csi(big);
    SolveOptions options;
    CHECK_THROWS_AS(is_eps_csi(noisy, rat(0), rat(1, 2), options), BudgetExceededError);

    // enumeration fallback agrees with the solver on small instances
    std::mt19937_64 rng(41);
    for (int i = 0; i < 60; ++i) {
        auto inst = testutil::random_small_instance(95000 + i, 4, 4, 6);
        Rational eps_c = rat(static_cast<long long>(rng() % 3), 4);
        Rational eps_s = rat(static_cast<long long>(rng() % 3), 4);
        CHECK(is_eps_csi(inst, eps_c, eps_s) ==
              solve_dcs_exact(inst, eps_c, eps_s).has_value());
    }
}
