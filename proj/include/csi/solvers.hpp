#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "csi/instance.hpp"
#include "csi/metrics.hpp"
#include "csi/rational.hpp"

namespace csi {

/// A solution of one of the deceptive-certificate-selection problems.
/// All achieved_* values are recomputed through the metrics module when the
/// solution is assembled, so re-verification reproduces them exactly.
struct DcsSolution {
    VerifierAcceptance verifier;
    ProverAssignment prover;
    Rational objective; // 1 - Pr(M) for DCS, 1 - sound(A) for DCS2
    Rational achieved_completeness;
    Rational achieved_soundness;
    Rational achieved_prover_precision;
    bool optimal = false;
};

struct ProverPlan {
    ProverAssignment prover;
    Rational precision; // Pr(M), the minimum subject to the completeness bound
};

struct SolveOptions {
    std::size_t max_certificates = kDefaultEnumBudget;
    unsigned threads = 1; // results are identical for any worker count
};

/// Among provers with completeness(A, M) >= 1 - eps_c, returns one of
/// minimum average precision, or nullopt when no prover meets the bound.
/// Throws NoProverError when some in-class datapoint has no certificate.
std::optional<ProverPlan> optimal_prover_given_verifier(const CsInstance& instance,
                                                        const VerifierAcceptance& a,
                                                        const Rational& eps_c);

/// Exact DCS: maximize 1 - Pr(M) over verifier-prover pairs subject to
/// completeness >= 1 - eps_c and soundness >= 1 - eps_s. Enumerates all
/// accepted sets; nullopt means the instance is not an (eps_c, eps_s)-CSI.
std::optional<DcsSolution> solve_dcs_exact(const CsInstance& instance, const Rational& eps_c,
                                           const Rational& eps_s,
                                           const SolveOptions& options = {});

/// Exact DCS2: minimize 1 - sound(A) over verifiers admitting a prover with
/// completeness >= 1 - eps_c and Pr(M) <= 1 - q.
std::optional<DcsSolution> solve_dcs2_exact(const CsInstance& instance, const Rational& eps_c,
                                            const Rational& q, const SolveOptions& options = {});

/// Heuristic DCS: repairs the full-acceptance verifier to meet soundness,
/// then hill-climbs single-certificate flips. 8 restarts with seeds derived
/// from `seed`; deterministic. Feasible results satisfy both constraints.
std::optional<DcsSolution> solve_dcs_greedy(const CsInstance& instance, const Rational& eps_c,
                                            const Rational& eps_s, std::uint64_t seed);

/// Heuristic DCS2 counterpart: grows the perfectly-sound verifier until the
/// precision ceiling is met, then hill-climbs for soundness.
std::optional<DcsSolution> solve_dcs2_greedy(const CsInstance& instance, const Rational& eps_c,
                                             const Rational& q, std::uint64_t seed);

/// True iff some verifier-prover pair achieves completeness >= 1 - eps_c and
/// soundness >= 1 - eps_s. Cheap certificate-screen first, exhaustive
/// enumeration fallback under the budget.
bool is_eps_csi(const CsInstance& instance, const Rational& eps_c, const Rational& eps_s,
                const SolveOptions& options = {});

} // namespace csi
