#pragma once

// Naive, set-based reimplementation of every formula, used as an independent
// oracle by the test-suites. Works directly on the edge list with
// cpp_rational arithmetic and exhaustive enumeration; shares no code with the
// library's computation paths.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csi/instance.hpp"
#include "csi/rational.hpp"

namespace oracle {

using Rat = boost::multiprecision::cpp_rational;
using csi::CsInstance;
using csi::Id;

using Verifier = std::set<Id>;       // accepted certificates
using Prover = std::map<Id, Id>;     // in-class datapoint -> certificate

std::set<Id> nbrs(const CsInstance& inst, const Id& vertex);

Rat completeness(const CsInstance& inst, const Verifier& accepted, const Prover& prover);
Rat soundness(const CsInstance& inst, const Verifier& accepted);
Rat cert_precision(const CsInstance& inst, const Id& phi);
Rat set_precision(const CsInstance& inst, const std::set<Id>& certs);
Rat prover_precision(const CsInstance& inst, const Prover& prover);
Rat best_completeness(const CsInstance& inst, const Verifier& accepted);

std::optional<Rat> afc(const CsInstance& inst);

// Every prover assignment; throws when the product of neighborhood sizes
// exceeds the guard (the caller picks instances small enough).
std::vector<Prover> all_provers(const CsInstance& inst, std::size_t guard = 2000000);

// min Pr(M) subject to completeness(A, M) >= 1 - eps_c, by enumeration.
std::optional<Rat> min_precision_given(const CsInstance& inst, const Verifier& accepted,
                                       const Rat& eps_c, std::size_t guard = 2000000);

struct SolveResult {
    bool feasible = false;
    Rat objective;
};

SolveResult dcs(const CsInstance& inst, const Rat& eps_c, const Rat& eps_s,
                std::size_t guard = 2000000);
SolveResult dcs2(const CsInstance& inst, const Rat& eps_c, const Rat& q,
                 std::size_t guard = 2000000);

inline std::string str(const Rat& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

inline bool eq(const csi::Rational& a, const Rat& b) {
    return a.str() == str(b);
}

inline Rat ratio(long long num, long long den) {
    return Rat(num, den);
}

} // namespace oracle
