#include "csi/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "csi/detail/bits.hpp"

namespace csi {

namespace {

void require_verifier(const CsInstance& inst, const VerifierAcceptance& a) {
    if (auto defect = verifier_defect(inst, a))
        throw Error(*defect);
}

void require_prover(const CsInstance& inst, const ProverAssignment& m) {
    if (auto defect = prover_defect(inst, m))
        throw Error(*defect);
}

std::vector<char> accepted_flags(const CsInstance& inst, const VerifierAcceptance& a) {
    std::vector<char> flags(inst.certificates().size(), 0);
    for (const Id& phi : a.accepted)
        flags[*inst.index_of(VertexKind::Certificate, phi)] = 1;
    return flags;
}

struct CertDegrees {
    std::vector<long long> in_deg;
    std::vector<long long> out_deg;
};

CertDegrees cert_degrees(const CsInstance& inst) {
    CertDegrees d;
    std::size_t m = inst.certificates().size();
    d.in_deg.resize(m);
    d.out_deg.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
        d.in_deg[c] = static_cast<long long>(inst.certificate_in_adjacency(c).size());
        d.out_deg[c] = static_cast<long long>(inst.certificate_out_adjacency(c).size());
    }
    return d;
}

std::vector<std::uint32_t> resolve_certificate_set(const CsInstance& inst,
                                                   std::span<const Id> certificates) {
    std::set<std::uint32_t> idx;
    for (const Id& c : certificates) {
        auto kind = inst.kind_of(c);
        if (!kind)
            throw UnknownVertexError("unknown vertex id '" + c + "'");
        if (*kind != VertexKind::Certificate)
            throw Error("'" + c + "' is not a certificate");
        idx.insert(*inst.index_of(VertexKind::Certificate, c));
    }
    return {idx.begin(), idx.end()};
}

} // namespace

Rational completeness(const CsInstance& inst, const VerifierAcceptance& a,
                      const ProverAssignment& m) {
    require_verifier(inst, a);
    require_prover(inst, m);
    if (inst.in_class().empty())
        throw UndefinedMetricError("completeness undefined: no in-class datapoints");
    long long hits = 0;
    for (const Id& x : inst.in_class())
        if (a.accepted.count(m.assignment.at(x)))
            ++hits;
    return {hits, static_cast<long long>(inst.in_class().size())};
}

Rational soundness(const CsInstance& inst, const VerifierAcceptance& a) {
    require_verifier(inst, a);
    if (inst.out_class().empty())
        throw UndefinedMetricError("soundness undefined: no out-class datapoints");
    auto flags = accepted_flags(inst, a);
    long long sound = 0;
    for (std::size_t y = 0; y < inst.out_class().size(); ++y) {
        bool covered = false;
        for (std::uint32_t c : inst.out_adjacency(y))
            if (flags[c]) {
                covered = true;
                break;
            }
        if (!covered)
            ++sound;
    }
    return {sound, static_cast<long long>(inst.out_class().size())};
}

std::pair<Rational, ProverAssignment> best_completeness(const CsInstance& inst,
                                                        const VerifierAcceptance& a) {
    require_verifier(inst, a);
    if (inst.in_class().empty())
        throw UndefinedMetricError("completeness undefined: no in-class datapoints");
    auto flags = accepted_flags(inst, a);
    ProverAssignment m;
    long long hits = 0;
    for (std::size_t x = 0; x < inst.in_class().size(); ++x) {
        const auto& adj = inst.in_adjacency(x);
        if (adj.empty())
            throw NoProverError("no prover exists: in-class datapoint '" + inst.in_class()[x] +
                                "' has no adjacent certificate");
        std::uint32_t pick = adj.front();
        for (std::uint32_t c : adj)
            if (flags[c]) {
                pick = c;
                ++hits;
                break;
            }
        m.assignment[inst.in_class()[x]] = inst.certificates()[pick];
    }
    return {Rational(hits, static_cast<long long>(inst.in_class().size())), std::move(m)};
}

Rational certificate_precision(const CsInstance& inst, const Id& phi) {
    auto kind = inst.kind_of(phi);
    if (!kind)
        throw UnknownVertexError("unknown vertex id '" + phi + "'");
    if (*kind != VertexKind::Certificate)
        throw Error("'" + phi + "' is not a certificate");
    std::uint32_t c = *inst.index_of(VertexKind::Certificate, phi);
    long long in_deg = static_cast<long long>(inst.certificate_in_adjacency(c).size());
    long long deg = in_deg + static_cast<long long>(inst.certificate_out_adjacency(c).size());
    if (deg == 0)
        throw UndefinedMetricError("undefined precision: certificate '" + phi +
                                   "' has an empty neighborhood");
    return {in_deg, deg};
}

Rational set_precision(const CsInstance& inst, std::span<const Id> certificates) {
    auto idx = resolve_certificate_set(inst, certificates);
    detail::Bits in_u(inst.in_class().size());
    detail::Bits out_u(inst.out_class().size());
    for (std::uint32_t c : idx) {
        for (std::uint32_t d : inst.certificate_in_adjacency(c))
            in_u.set(d);
        for (std::uint32_t d : inst.certificate_out_adjacency(c))
            out_u.set(d);
    }
    long long in_count = static_cast<long long>(in_u.count());
    long long total = in_count + static_cast<long long>(out_u.count());
    if (total == 0)
        throw UndefinedMetricError("undefined precision: certificate set has an empty "
                                   "neighborhood");
    return {in_count, total};
}

Rational prover_precision(const CsInstance& inst, const ProverAssignment& m) {
    require_prover(inst, m);
    if (inst.in_class().empty())
        throw UndefinedMetricError("prover precision undefined: no in-class datapoints");
    Rational sum;
    for (const Id& x : inst.in_class())
        sum += certificate_precision(inst, m.assignment.at(x));
    return sum / Rational(static_cast<long long>(inst.in_class().size()));
}

Rational verifier_precision(const CsInstance& inst, const VerifierAcceptance& a) {
    require_verifier(inst, a);
    std::vector<Id> accepted(a.accepted.begin(), a.accepted.end());
    try {
        return set_precision(inst, accepted);
    } catch (const UndefinedMetricError&) {
        throw UndefinedMetricError("undefined verifier precision: accepted set has an empty "
                                   "neighborhood");
    }
}

Rational verifier_precision_formula(const CsInstance& inst, const VerifierAcceptance& a) {
    Rational ec_hat = Rational(1) - best_completeness(inst, a).first;
    Rational es_hat = Rational(1) - soundness(inst, a);
    Rational den = Rational(1) - ec_hat + es_hat;
    if (den == Rational(0))
        throw UndefinedMetricError("formula undefined: 1 - ec + es vanishes");
    return Rational(1) - es_hat / den;
}

Rational afc_kappa(const CsInstance& inst, const Id& phi, std::span<const Id> certificates) {
    auto idx = resolve_certificate_set(inst, certificates);
    auto phi_idx = inst.index_of(VertexKind::Certificate, phi);
    if (!phi_idx)
        throw UnknownVertexError("unknown certificate '" + phi + "'");
    if (!std::binary_search(idx.begin(), idx.end(), *phi_idx))
        throw Error("kappa requires phi to be a member of the set");

    detail::Bits in_u(inst.in_class().size());
    detail::Bits out_u(inst.out_class().size());
    for (std::uint32_t c : idx) {
        for (std::uint32_t d : inst.certificate_in_adjacency(c))
            in_u.set(d);
        for (std::uint32_t d : inst.certificate_out_adjacency(c))
            out_u.set(d);
    }
    long long in_f = static_cast<long long>(in_u.count());
    long long out_f = static_cast<long long>(out_u.count());
    long long in_phi = static_cast<long long>(inst.certificate_in_adjacency(*phi_idx).size());
    long long out_phi = static_cast<long long>(inst.certificate_out_adjacency(*phi_idx).size());
    if (out_f == 0 || in_phi == 0)
        throw UndefinedMetricError("kappa undefined for this (phi, F): zero denominator");
    return {out_phi * in_f, out_f * in_phi};
}

AfcWitness afc_evaluate(const CsInstance& inst, std::span<const Id> certificates) {
    auto idx = resolve_certificate_set(inst, certificates);
    if (idx.empty())
        throw UndefinedMetricError("AFC undefined for the empty certificate set");

    detail::Bits in_u(inst.in_class().size());
    detail::Bits out_u(inst.out_class().size());
    std::vector<char> member(inst.certificates().size(), 0);
    for (std::uint32_t c : idx) {
        member[c] = 1;
        for (std::uint32_t d : inst.certificate_in_adjacency(c))
            in_u.set(d);
        for (std::uint32_t d : inst.certificate_out_adjacency(c))
            out_u.set(d);
    }
    if (!in_u.any() || !out_u.any())
        throw UndefinedMetricError("AFC undefined for this certificate set: it does not touch "
                                   "both classes");

    long long in_f = static_cast<long long>(in_u.count());
    long long out_f = static_cast<long long>(out_u.count());
    auto deg = cert_degrees(inst);

    AfcWitness w;
    for (std::uint32_t c : idx)
        w.witness_set.push_back(inst.certificates()[c]);

    Rational sum;
    in_u.for_each([&](std::size_t y) {
        bool have = false;
        std::uint32_t best_cert = 0;
        Rational best;
        for (std::uint32_t c : inst.in_adjacency(y)) {
            if (!member[c])
                continue;
            Rational k(deg.out_deg[c] * in_f, out_f * deg.in_deg[c]);
            if (!have || k > best) {
                have = true;
                best = k;
                best_cert = c;
            }
        }
        // y is in N(F) and in-class, so some member certificate neighbors it
        w.per_datapoint_terms.push_back(
            {inst.in_class()[y], inst.certificates()[best_cert], best});
        sum += best;
    });
    w.value = sum / Rational(in_f);
    return w;
}

namespace {

struct AfcData {
    std::size_t m = 0, n_in = 0, n_out = 0;
    std::vector<detail::Bits> cert_in, cert_out;
    std::vector<std::vector<std::uint32_t>> in_dp_certs;
    CertDegrees deg;
};

AfcData build_afc_data(const CsInstance& inst) {
    AfcData d;
    d.m = inst.certificates().size();
    d.n_in = inst.in_class().size();
    d.n_out = inst.out_class().size();
    d.deg = cert_degrees(inst);
    d.cert_in.assign(d.m, detail::Bits(d.n_in));
    d.cert_out.assign(d.m, detail::Bits(d.n_out));
    for (std::size_t c = 0; c < d.m; ++c) {
        for (std::uint32_t x : inst.certificate_in_adjacency(c))
            d.cert_in[c].set(x);
        for (std::uint32_t y : inst.certificate_out_adjacency(c))
            d.cert_out[c].set(y);
    }
    d.in_dp_certs.resize(d.n_in);
    for (std::size_t x = 0; x < d.n_in; ++x)
        d.in_dp_certs[x] = inst.in_adjacency(x);
    return d;
}

template <class IntT>
struct AfcBest {
    bool found = false;
    IntT sum{};
    IntT out_count{};
    std::uint64_t mask = 0;
};

inline bool frac_less(std::int64_t s1, std::int64_t o1, std::int64_t s2, std::int64_t o2) {
    return static_cast<__int128>(s1) * o2 < static_cast<__int128>(s2) * o1;
}
inline bool frac_less(const BigInt& s1, const BigInt& o1, const BigInt& s2, const BigInt& o2) {
    return s1 * o2 < s2 * o1;
}
inline bool frac_equal(std::int64_t s1, std::int64_t o1, std::int64_t s2, std::int64_t o2) {
    return static_cast<__int128>(s1) * o2 == static_cast<__int128>(s2) * o1;
}
inline bool frac_equal(const BigInt& s1, const BigInt& o1, const BigInt& s2, const BigInt& o2) {
    return s1 * o2 == s2 * o1;
}

// Candidate order: larger value first, then smaller set sequence.
template <class IntT>
bool candidate_improves(const AfcBest<IntT>& best, const IntT& sum, const IntT& out_count,
                        std::uint64_t mask) {
    if (!best.found)
        return true;
    if (frac_less(best.sum, best.out_count, sum, out_count))
        return true;
    return frac_equal(best.sum, best.out_count, sum, out_count) &&
           detail::set_seq_less(mask, best.mask);
}

template <class IntT>
AfcBest<IntT> afc_scan_range(const AfcData& d, const std::vector<IntT>& r_scaled,
                             std::uint64_t lo, std::uint64_t hi) {
    AfcBest<IntT> best;
    detail::Bits in_u(d.n_in), out_u(d.n_out);
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
        if (mask == 0)
            continue;
        in_u.clear();
        out_u.clear();
        for (std::uint64_t rest = mask; rest;) {
            auto c = static_cast<std::uint32_t>(std::countr_zero(rest));
            rest &= rest - 1;
            in_u |= d.cert_in[c];
            out_u |= d.cert_out[c];
        }
        if (!in_u.any() || !out_u.any())
            continue;
        IntT out_count{static_cast<long long>(out_u.count())};
        IntT sum{0};
        in_u.for_each([&](std::size_t y) {
            const IntT* mx = nullptr;
            for (std::uint32_t c : d.in_dp_certs[y]) {
                if (!((mask >> c) & 1u))
                    continue;
                if (mx == nullptr || *mx < r_scaled[c])
                    mx = &r_scaled[c];
            }
            sum += *mx;
        });
        if (candidate_improves(best, sum, out_count, mask)) {
            best.found = true;
            best.sum = sum;
            best.out_count = out_count;
            best.mask = mask;
        }
    }
    return best;
}

template <class IntT>
AfcBest<IntT> afc_scan(const AfcData& d, const std::vector<IntT>& r_scaled, unsigned threads) {
    const std::uint64_t total = std::uint64_t{1} << d.m;
    unsigned workers = std::max(1u, threads);
    if (total < 4096)
        workers = 1;
    if (workers == 1)
        return afc_scan_range(d, r_scaled, 1, total);

    std::vector<AfcBest<IntT>> partial(workers);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        std::uint64_t lo = std::max<std::uint64_t>(1, t * chunk);
        std::uint64_t hi = std::min(total, (t + 1) * chunk);
        if (lo >= hi) {
            continue;
        }
        pool.emplace_back([&, t, lo, hi] { partial[t] = afc_scan_range(d, r_scaled, lo, hi); });
    }
    for (auto& th : pool)
        th.join();

    AfcBest<IntT> best;
    for (const auto& p : partial)
        if (p.found && candidate_improves(best, p.sum, p.out_count, p.mask))
            best = p;
    return best;
}

std::vector<Id> mask_to_ids(const CsInstance& inst, std::uint64_t mask) {
    std::vector<Id> ids;
    for (std::uint64_t rest = mask; rest;) {
        auto c = static_cast<std::uint32_t>(std::countr_zero(rest));
        rest &= rest - 1;
        ids.push_back(inst.certificates()[c]);
    }
    return ids;
}

} // namespace

AfcWitness afc_exact(const CsInstance& inst, const AfcOptions& options) {
    const std::size_t m = inst.certificates().size();
    if (m > options.max_certificates || m >= 63)
        throw BudgetExceededError("instance too large for exact AFC: " + std::to_string(m) +
                                  " certificates exceeds the enumeration budget of " +
                                  std::to_string(options.max_certificates));

    AfcData d = build_afc_data(inst);

    // Scale the per-certificate ratios out/in to a common denominator L so the
    // inner maxima and sums stay in integers.
    BigInt lcm{1};
    for (std::size_t c = 0; c < m; ++c)
        if (d.deg.in_deg[c] > 0)
            lcm = boost::multiprecision::lcm(lcm, BigInt(d.deg.in_deg[c]));
    const BigInt sum_bound = lcm * BigInt(static_cast<long long>(d.n_in)) *
                             BigInt(static_cast<long long>(std::max<std::size_t>(d.n_out, 1)));
    const bool fits64 = lcm <= BigInt(std::int64_t{1} << 31) &&
                        sum_bound <= BigInt(std::int64_t{1} << 61);

    std::uint64_t best_mask = 0;
    bool found = false;
    if (fits64) {
        const auto l64 = lcm.convert_to<std::int64_t>();
        std::vector<std::int64_t> r_scaled(m, 0);
        for (std::size_t c = 0; c < m; ++c)
            if (d.deg.in_deg[c] > 0)
                r_scaled[c] = d.deg.out_deg[c] * (l64 / d.deg.in_deg[c]);
        auto best = afc_scan(d, r_scaled, options.threads);
        found = best.found;
        best_mask = best.mask;
    } else {
        std::vector<BigInt> r_scaled(m, BigInt(0));
        for (std::size_t c = 0; c < m; ++c)
            if (d.deg.in_deg[c] > 0)
                r_scaled[c] = BigInt(d.deg.out_deg[c]) * (lcm / d.deg.in_deg[c]);
        auto best = afc_scan(d, r_scaled, options.threads);
        found = best.found;
        best_mask = best.mask;
    }
    if (!found)
        throw UndefinedMetricError("AFC undefined: no certificate set touches both classes");
    return afc_evaluate(inst, mask_to_ids(inst, best_mask));
}

AfcWitness afc_greedy(const CsInstance& inst, std::uint64_t seed) {
    const std::size_t m = inst.certificates().size();
    auto deg = cert_degrees(inst);
    bool touches_in = false, touches_out = false;
    std::vector<std::uint32_t> admissible_singletons;
    for (std::size_t c = 0; c < m; ++c) {
        touches_in = touches_in || deg.in_deg[c] > 0;
        touches_out = touches_out || deg.out_deg[c] > 0;
        if (deg.in_deg[c] > 0 && deg.out_deg[c] > 0)
            admissible_singletons.push_back(static_cast<std::uint32_t>(c));
    }
    if (!touches_in || !touches_out)
        throw UndefinedMetricError("AFC undefined: no certificate set touches both classes");

    auto ids_of = [&](const std::set<std::uint32_t>& s) {
        std::vector<Id> ids;
        for (std::uint32_t c : s)
            ids.push_back(inst.certificates()[c]);
        return ids;
    };

    bool have_best = false;
    AfcWitness best;
    auto consider = [&](const AfcWitness& w) {
        if (!have_best || w.value > best.value ||
            (w.value == best.value && w.witness_set < best.witness_set)) {
            best = w;
            have_best = true;
        }
    };

    std::mt19937_64 master(seed);
    constexpr int kRestarts = 8;
    for (int restart = 0; restart < kRestarts; ++restart) {
        std::mt19937_64 rng(master());
        std::set<std::uint32_t> current;
        if (!admissible_singletons.empty()) {
            current.insert(admissible_singletons[rng() % admissible_singletons.size()]);
        } else {
            for (std::uint32_t c = 0; c < m; ++c)
                current.insert(c);
        }
        AfcWitness cur = afc_evaluate(inst, ids_of(current));
        consider(cur);
        for (;;) {
            bool improved = false;
            std::uint32_t pick = 0;
            AfcWitness pick_witness;
            for (std::uint32_t c = 0; c < m; ++c) {
                if (current.count(c))
                    continue;
                auto trial = current;
                trial.insert(c);
                AfcWitness w = afc_evaluate(inst, ids_of(trial));
                consider(w);
                if (w.value > cur.value && (!improved || w.value > pick_witness.value)) {
                    improved = true;
                    pick = c;
                    pick_witness = w;
                }
            }
            if (!improved)
                break;
            current.insert(pick);
            cur = std::move(pick_witness);
        }
    }
    return best;
}

} // namespace csi
