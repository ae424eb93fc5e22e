#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "csi/instance.hpp"
#include "csi/rational.hpp"

namespace csi {

/// Default certificate budget for exact subset enumerations (2^24 sets).
inline constexpr std::size_t kDefaultEnumBudget = 24;

/// Fraction of in-class datapoints whose assigned certificate is accepted.
Rational completeness(const CsInstance& instance, const VerifierAcceptance& a,
                      const ProverAssignment& m);

/// Fraction of out-class datapoints none of whose certificates is accepted;
/// a datapoint with empty neighborhood always counts as sound.
Rational soundness(const CsInstance& instance, const VerifierAcceptance& a);

/// Maximum completeness over all provers, with a maximizing prover: each
/// datapoint takes its lexicographically smallest accepted neighbor if one
/// exists, else its lexicographically smallest neighbor.
std::pair<Rational, ProverAssignment> best_completeness(const CsInstance& instance,
                                                        const VerifierAcceptance& a);

Rational certificate_precision(const CsInstance& instance, const Id& phi);
Rational set_precision(const CsInstance& instance, std::span<const Id> certificates);
Rational prover_precision(const CsInstance& instance, const ProverAssignment& m);
Rational verifier_precision(const CsInstance& instance, const VerifierAcceptance& a);

/// The closed form 1 - es/(1 - ec + es) with ec = 1 - max_M completeness and
/// es = 1 - soundness; coincides with verifier_precision on balanced
/// instances (|D1| = |D-1|).
Rational verifier_precision_formula(const CsInstance& instance, const VerifierAcceptance& a);

/// Pairwise correlation ratio of phi within the set F.
Rational afc_kappa(const CsInstance& instance, const Id& phi, std::span<const Id> certificates);

struct AfcWitness {
    struct Term {
        Id datapoint;
        Id certificate; // maximizer for this datapoint
        Rational kappa;
    };

    Rational value;
    std::vector<Id> witness_set;            // sorted
    std::vector<Term> per_datapoint_terms;  // sorted by datapoint id, one per member of F1*
};

struct AfcOptions {
    std::size_t max_certificates = kDefaultEnumBudget;
    unsigned threads = 1; // results are identical for any worker count
};

/// Evaluates the asymmetric-feature-correlation expression on a fixed
/// certificate set. Throws UndefinedMetricError if the set touches only one
/// class of datapoints.
AfcWitness afc_evaluate(const CsInstance& instance, std::span<const Id> certificates);

/// Exhaustive maximization over all nonempty certificate subsets touching
/// both classes. Ties break to the lexicographically smallest witness set.
AfcWitness afc_exact(const CsInstance& instance, const AfcOptions& options = {});

/// Greedy lower bound: grows certificate sets from seeded random starts and
/// keeps the best exactly-evaluated set. Deterministic given the seed.
AfcWitness afc_greedy(const CsInstance& instance, std::uint64_t seed);

} // namespace csi
