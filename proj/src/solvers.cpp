#include "csi/solvers.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <thread>

#include "csi/detail/bits.hpp"

namespace csi {

namespace {

long long floor_times(const Rational& r, std::size_t n) {
    BigInt v = (r.numerator() * BigInt(static_cast<long long>(n))) / r.denominator();
    BigInt cap(static_cast<long long>(n));
    if (v > cap)
        v = cap;
    return v.convert_to<long long>();
}

void require_solver_inputs(const CsInstance& inst, const Rational& eps_c,
                           const Rational& second, const char* second_name) {
    if (inst.in_class().empty() || inst.out_class().empty() || inst.certificates().empty())
        throw Error("solver requires a valid instance with nonempty vertex sets");
    if (eps_c < Rational(0))
        throw Error("eps_c must be nonnegative");
    if (second < Rational(0))
        throw Error(std::string(second_name) + " must be nonnegative");
}

bool has_isolated_in_class(const CsInstance& inst) {
    for (std::size_t x = 0; x < inst.in_class().size(); ++x)
        if (inst.in_adjacency(x).empty())
            return true;
    return false;
}

template <class IntT>
struct SolveCtx {
    std::size_t n_in = 0, n_out = 0, m = 0;
    IntT scale{};                              // lcm of certificate degrees
    std::vector<IntT> cert_scaled;             // precision * scale per certificate
    std::vector<std::uint64_t> in_mask;        // per in-class dp: neighbor certificates
    std::vector<std::uint64_t> out_mask;       // per out-class dp
    std::vector<std::vector<std::uint32_t>> in_certs;
    std::vector<IntT> min_any;                 // per in-class dp
};

BigInt degree_lcm(const CsInstance& inst) {
    BigInt l{1};
    for (std::size_t c = 0; c < inst.certificates().size(); ++c) {
        long long deg = static_cast<long long>(inst.certificate_in_adjacency(c).size() +
                                               inst.certificate_out_adjacency(c).size());
        if (deg > 0)
            l = boost::multiprecision::lcm(l, BigInt(deg));
    }
    return l;
}

bool ctx_fits64(const CsInstance& inst, const BigInt& scale) {
    const BigInt cap31(std::int64_t{1} << 31);
    const BigInt cap59(std::int64_t{1} << 59);
    return scale <= cap31 &&
           scale * BigInt(static_cast<long long>(inst.in_class().size())) <= cap59;
}

template <class IntT>
SolveCtx<IntT> build_ctx(const CsInstance& inst, const BigInt& scale) {
    SolveCtx<IntT> ctx;
    ctx.n_in = inst.in_class().size();
    ctx.n_out = inst.out_class().size();
    ctx.m = inst.certificates().size();
    if constexpr (std::is_same_v<IntT, std::int64_t>)
        ctx.scale = scale.convert_to<std::int64_t>();
    else
        ctx.scale = scale;

    ctx.cert_scaled.assign(ctx.m, IntT{0});
    for (std::size_t c = 0; c < ctx.m; ++c) {
        auto in_deg = static_cast<long long>(inst.certificate_in_adjacency(c).size());
        auto deg = in_deg + static_cast<long long>(inst.certificate_out_adjacency(c).size());
        if (deg > 0)
            ctx.cert_scaled[c] = IntT(in_deg) * (ctx.scale / IntT(deg));
    }
    ctx.in_mask.assign(ctx.n_in, 0);
    ctx.in_certs.resize(ctx.n_in);
    ctx.min_any.assign(ctx.n_in, IntT{0});
    for (std::size_t x = 0; x < ctx.n_in; ++x) {
        ctx.in_certs[x] = inst.in_adjacency(x);
        bool first = true;
        for (std::uint32_t c : ctx.in_certs[x]) {
            ctx.in_mask[x] |= std::uint64_t{1} << c;
            if (first || ctx.cert_scaled[c] < ctx.min_any[x]) {
                ctx.min_any[x] = ctx.cert_scaled[c];
                first = false;
            }
        }
    }
    ctx.out_mask.assign(ctx.n_out, 0);
    for (std::size_t y = 0; y < ctx.n_out; ++y)
        for (std::uint32_t c : inst.out_adjacency(y))
            ctx.out_mask[y] |= std::uint64_t{1} << c;
    return ctx;
}

template <class IntT>
long long unsound_count(const SolveCtx<IntT>& ctx, std::uint64_t accepted) {
    long long n = 0;
    for (std::uint64_t m : ctx.out_mask)
        if (m & accepted)
            ++n;
    return n;
}

// Minimum scaled precision sum over provers meeting the completeness budget
// (number of datapoints allowed to map to a rejected certificate), or nullopt
// when even spending the whole budget cannot make the prover complete enough.
template <class IntT>
std::optional<IntT> inner_min_sum(const SolveCtx<IntT>& ctx, std::uint64_t accepted,
                                  long long budget, std::vector<IntT>& savings) {
    IntT total{0};
    long long mandatory = 0;
    savings.clear();
    for (std::size_t x = 0; x < ctx.n_in; ++x) {
        if ((ctx.in_mask[x] & accepted) == 0) {
            ++mandatory;
            total += ctx.min_any[x];
            continue;
        }
        bool first = true;
        IntT best{};
        for (std::uint32_t c : ctx.in_certs[x]) {
            if (!((accepted >> c) & 1u))
                continue;
            if (first || ctx.cert_scaled[c] < best) {
                best = ctx.cert_scaled[c];
                first = false;
            }
        }
        total += best;
        IntT sav = best - ctx.min_any[x];
        if (sav > IntT{0})
            savings.push_back(std::move(sav));
    }
    if (mandatory > budget)
        return std::nullopt;
    long long grant = budget - mandatory;
    if (grant > 0 && !savings.empty()) {
        if (static_cast<long long>(savings.size()) <= grant) {
            for (const auto& s : savings)
                total -= s;
        } else {
            std::nth_element(savings.begin(), savings.begin() + grant, savings.end(),
                             std::greater<>());
            for (long long i = 0; i < grant; ++i)
                total -= savings[static_cast<std::size_t>(i)];
        }
    }
    return total;
}

// Rebuilds the minimizing prover for a fixed accepted set with deterministic
// tie-breaks: budget goes to the largest savings (ties to the smaller
// datapoint id), each datapoint takes the lexicographically smallest of its
// minimum-precision admissible neighbors.
template <class IntT>
ProverAssignment materialize_prover(const CsInstance& inst, const SolveCtx<IntT>& ctx,
                                    std::uint64_t accepted, long long budget) {
    struct Grant {
        IntT saving;
        std::size_t x;
    };
    std::vector<Grant> grants;
    std::vector<char> free_choice(ctx.n_in, 0);
    for (std::size_t x = 0; x < ctx.n_in; ++x) {
        if ((ctx.in_mask[x] & accepted) == 0) {
            free_choice[x] = 1; // mandatory budget consumer
            --budget;
            continue;
        }
        bool first = true;
        IntT best{};
        for (std::uint32_t c : ctx.in_certs[x]) {
            if (!((accepted >> c) & 1u))
                continue;
            if (first || ctx.cert_scaled[c] < best) {
                best = ctx.cert_scaled[c];
                first = false;
            }
        }
        IntT sav = best - ctx.min_any[x];
        if (sav > IntT{0})
            grants.push_back({std::move(sav), x});
    }
    std::stable_sort(grants.begin(), grants.end(), [](const Grant& a, const Grant& b) {
        if (a.saving != b.saving)
            return b.saving < a.saving;
        return a.x < b.x;
    });
    for (const Grant& g : grants) {
        if (budget <= 0)
            break;
        free_choice[g.x] = 1;
        --budget;
    }

    ProverAssignment m;
    for (std::size_t x = 0; x < ctx.n_in; ++x) {
        bool first = true;
        std::uint32_t pick = 0;
        IntT best{};
        for (std::uint32_t c : ctx.in_certs[x]) {
            if (!free_choice[x] && !((accepted >> c) & 1u))
                continue;
            if (first || ctx.cert_scaled[c] < best) {
                best = ctx.cert_scaled[c];
                pick = c;
                first = false;
            }
        }
        m.assignment[inst.in_class()[x]] = inst.certificates()[pick];
    }
    return m;
}

template <class Best>
Best parallel_scan(std::size_t m, unsigned threads,
                   const std::function<Best(std::uint64_t, std::uint64_t)>& scan,
                   const std::function<bool(const Best&, const Best&)>& better) {
    const std::uint64_t total = std::uint64_t{1} << m;
    unsigned workers = std::max(1u, threads);
    if (total < 4096)
        workers = 1;
    if (workers == 1)
        return scan(0, total);

    std::vector<Best> partial(workers);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        std::uint64_t lo = t * chunk;
        std::uint64_t hi = std::min(total, (t + 1) * chunk);
        if (lo >= hi)
            continue;
        pool.emplace_back([&, t, lo, hi] { partial[t] = scan(lo, hi); });
    }
    for (auto& th : pool)
        th.join();
    // The candidate order is a strict total order over distinct masks, so the
    // merged winner is identical to the single-worker winner.
    Best best;
    for (const auto& p : partial)
        if (p.found && (!best.found || better(p, best)))
            best = p;
    return best;
}

VerifierAcceptance mask_to_verifier(const CsInstance& inst, std::uint64_t mask) {
    VerifierAcceptance a;
    for (std::uint64_t rest = mask; rest;) {
        auto c = static_cast<std::uint32_t>(std::countr_zero(rest));
        rest &= rest - 1;
        a.accepted.insert(inst.certificates()[c]);
    }
    return a;
}

DcsSolution assemble_solution(const CsInstance& inst, VerifierAcceptance a, ProverAssignment m,
                              bool dcs2_objective, bool optimal) {
    DcsSolution sol;
    sol.achieved_completeness = completeness(inst, a, m);
    sol.achieved_soundness = soundness(inst, a);
    sol.achieved_prover_precision = prover_precision(inst, m);
    sol.objective = dcs2_objective ? Rational(1) - sol.achieved_soundness
                                   : Rational(1) - sol.achieved_prover_precision;
    sol.verifier = std::move(a);
    sol.prover = std::move(m);
    sol.optimal = optimal;
    return sol;
}

void require_enum_budget(const CsInstance& inst, const SolveOptions& options, const char* hint) {
    std::size_t m = inst.certificates().size();
    if (m > options.max_certificates || m >= 63)
        throw BudgetExceededError("instance has " + std::to_string(m) +
                                  " certificates, beyond the exact enumeration budget of " +
                                  std::to_string(options.max_certificates) + "; " + hint);
}

template <class IntT>
struct DcsBest {
    bool found = false;
    IntT sum{};
    std::uint64_t mask = 0;
};

template <class IntT>
std::optional<std::pair<VerifierAcceptance, ProverAssignment>>
solve_dcs_typed(const CsInstance& inst, const BigInt& scale, long long compl_budget,
                long long sound_budget, const SolveOptions& options) {
    auto ctx = build_ctx<IntT>(inst, scale);
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
        DcsBest<IntT> best;
        std::vector<IntT> scratch;
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            if (unsound_count(ctx, mask) > sound_budget)
                continue;
            auto sum = inner_min_sum(ctx, mask, compl_budget, scratch);
            if (!sum)
                continue;
            if (!best.found || *sum < best.sum ||
                (*sum == best.sum && detail::set_seq_less(mask, best.mask))) {
                best.found = true;
                best.sum = std::move(*sum);
                best.mask = mask;
            }
        }
        return best;
    };
    auto better = [](const DcsBest<IntT>& x, const DcsBest<IntT>& y) {
        return x.sum < y.sum || (x.sum == y.sum && detail::set_seq_less(x.mask, y.mask));
    };
    auto best = parallel_scan<DcsBest<IntT>>(ctx.m, options.threads, scan, better);
    if (!best.found)
        return std::nullopt;
    return std::pair{mask_to_verifier(inst, best.mask),
                     materialize_prover(inst, ctx, best.mask, compl_budget)};
}

template <class IntT>
bool precision_within_ceiling(const IntT& sum, const SolveCtx<IntT>& ctx, const BigInt& q_num,
                              const BigInt& q_den) {
    // sum / (n_in * scale) <= (q_den - q_num) / q_den
    if constexpr (std::is_same_v<IntT, std::int64_t>) {
        auto lhs = static_cast<__int128>(sum) * q_den.convert_to<std::int64_t>();
        auto rhs = static_cast<__int128>((q_den - q_num).convert_to<std::int64_t>()) *
                   static_cast<__int128>(ctx.scale) * static_cast<std::int64_t>(ctx.n_in);
        return lhs <= rhs;
    } else {
        return BigInt(sum) * q_den <=
               (q_den - q_num) * ctx.scale * BigInt(static_cast<long long>(ctx.n_in));
    }
}

struct Dcs2Best {
    bool found = false;
    long long unsound = 0;
    std::uint64_t mask = 0;
};

template <class IntT>
std::optional<std::pair<VerifierAcceptance, ProverAssignment>>
solve_dcs2_typed(const CsInstance& inst, const BigInt& scale, long long compl_budget,
                 const Rational& q, const SolveOptions& options) {
    auto ctx = build_ctx<IntT>(inst, scale);
    const BigInt q_num = q.numerator();
    const BigInt q_den = q.denominator();
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
        Dcs2Best best;
        std::vector<IntT> scratch;
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            auto sum = inner_min_sum(ctx, mask, compl_budget, scratch);
            if (!sum || !precision_within_ceiling(*sum, ctx, q_num, q_den))
                continue;
            long long unsound = unsound_count(ctx, mask);
            if (!best.found || unsound < best.unsound ||
                (unsound == best.unsound && detail::set_seq_less(mask, best.mask))) {
                best.found = true;
                best.unsound = unsound;
                best.mask = mask;
            }
        }
        return best;
    };
    auto better = [](const Dcs2Best& x, const Dcs2Best& y) {
        return x.unsound < y.unsound ||
               (x.unsound == y.unsound && detail::set_seq_less(x.mask, y.mask));
    };
    auto best = parallel_scan<Dcs2Best>(ctx.m, options.threads, scan, better);
    if (!best.found)
        return std::nullopt;
    return std::pair{mask_to_verifier(inst, best.mask),
                     materialize_prover(inst, ctx, best.mask, compl_budget)};
}

bool q_fits64(const Rational& q) {
    const BigInt cap31(std::int64_t{1} << 31);
    return q.numerator() >= 0 && q.numerator() <= cap31 && q.denominator() <= cap31;
}

} // namespace

std::optional<ProverPlan> optimal_prover_given_verifier(const CsInstance& inst,
                                                        const VerifierAcceptance& a,
                                                        const Rational& eps_c) {
    if (auto defect = verifier_defect(inst, a))
        throw Error(*defect);
    if (inst.in_class().empty())
        throw Error("no in-class datapoints");
    if (eps_c < Rational(0))
        throw Error("eps_c must be nonnegative");
    for (std::size_t x = 0; x < inst.in_class().size(); ++x)
        if (inst.in_adjacency(x).empty())
            throw NoProverError("no prover exists: in-class datapoint '" + inst.in_class()[x] +
                                "' has no adjacent certificate");
    if (inst.certificates().size() >= 63)
        throw BudgetExceededError("optimal prover supports at most 62 certificates");

    std::uint64_t accepted = 0;
    for (const Id& phi : a.accepted)
        accepted |= std::uint64_t{1} << *inst.index_of(VertexKind::Certificate, phi);

    const long long budget = floor_times(eps_c, inst.in_class().size());
    const BigInt scale = degree_lcm(inst);
    ProverAssignment m;
    if (ctx_fits64(inst, scale)) {
        auto ctx = build_ctx<std::int64_t>(inst, scale);
        std::vector<std::int64_t> scratch;
        if (!inner_min_sum(ctx, accepted, budget, scratch))
            return std::nullopt;
        m = materialize_prover(inst, ctx, accepted, budget);
    } else {
        auto ctx = build_ctx<BigInt>(inst, scale);
        std::vector<BigInt> scratch;
        if (!inner_min_sum(ctx, accepted, budget, scratch))
            return std::nullopt;
        m = materialize_prover(inst, ctx, accepted, budget);
    }
    Rational precision = prover_precision(inst, m);
    return ProverPlan{std::move(m), std::move(precision)};
}

std::optional<DcsSolution> solve_dcs_exact(const CsInstance& inst, const Rational& eps_c,
                                           const Rational& eps_s, const SolveOptions& options) {
    require_solver_inputs(inst, eps_c, eps_s, "eps_s");
    require_enum_budget(inst, options, "use solve_dcs_greedy instead");
    if (has_isolated_in_class(inst))
        return std::nullopt; // no prover exists at all

    const long long compl_budget = floor_times(eps_c, inst.in_class().size());
    const long long sound_budget = floor_times(eps_s, inst.out_class().size());
    const BigInt scale = degree_lcm(inst);

    auto pair = ctx_fits64(inst, scale)
                    ? solve_dcs_typed<std::int64_t>(inst, scale, compl_budget, sound_budget,
                                                    options)
                    : solve_dcs_typed<BigInt>(inst, scale, compl_budget, sound_budget, options);
    if (!pair)
        return std::nullopt;
    return assemble_solution(inst, std::move(pair->first), std::move(pair->second),
                             /*dcs2_objective=*/false, /*optimal=*/true);
}

std::optional<DcsSolution> solve_dcs2_exact(const CsInstance& inst, const Rational& eps_c,
                                            const Rational& q, const SolveOptions& options) {
    require_solver_inputs(inst, eps_c, q, "q");
    require_enum_budget(inst, options, "use solve_dcs2_greedy instead");
    if (has_isolated_in_class(inst))
        return std::nullopt;

    const long long compl_budget = floor_times(eps_c, inst.in_class().size());
    const BigInt scale = degree_lcm(inst);

    auto pair = (ctx_fits64(inst, scale) && q_fits64(q))
                    ? solve_dcs2_typed<std::int64_t>(inst, scale, compl_budget, q, options)
                    : solve_dcs2_typed<BigInt>(inst, scale, compl_budget, q, options);
    if (!pair)
        return std::nullopt;
    return assemble_solution(inst, std::move(pair->first), std::move(pair->second),
                             /*dcs2_objective=*/true, /*optimal=*/true);
}

bool is_eps_csi(const CsInstance& inst, const Rational& eps_c, const Rational& eps_s,
                const SolveOptions& options) {
    require_solver_inputs(inst, eps_c, eps_s, "eps_s");
    if (has_isolated_in_class(inst))
        return false; // the prover space is empty
    if (eps_c >= Rational(1))
        return true; // the empty verifier is perfectly sound and any prover will do

    const Rational compl_floor = Rational(1) - eps_c;

    // Accepting exactly the certificates with no out-class neighbors is the
    // completeness-maximal perfectly sound verifier.
    VerifierAcceptance perfectly_sound;
    for (std::size_t c = 0; c < inst.certificates().size(); ++c)
        if (inst.certificate_out_adjacency(c).empty())
            perfectly_sound.accepted.insert(inst.certificates()[c]);
    if (best_completeness(inst, perfectly_sound).first >= compl_floor)
        return true;
    if (eps_s == Rational(0))
        return false;

    VerifierAcceptance all;
    for (const Id& c : inst.certificates())
        all.accepted.insert(c);
    if (eps_s >= Rational(1))
        return best_completeness(inst, all).first >= compl_floor;

    require_enum_budget(inst, options, "cannot decide eps-CSI membership exactly");

    const long long compl_budget = floor_times(eps_c, inst.in_class().size());
    const long long sound_budget = floor_times(eps_s, inst.out_class().size());
    auto ctx = build_ctx<std::int64_t>(inst, BigInt(1)); // precisions unused here
    const std::uint64_t total = std::uint64_t{1} << ctx.m;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (unsound_count(ctx, mask) > sound_budget)
            continue;
        long long misses = 0;
        bool ok = true;
        for (std::size_t x = 0; x < ctx.n_in && ok; ++x)
            if ((ctx.in_mask[x] & mask) == 0)
                ok = ++misses <= compl_budget;
        if (ok)
            return true;
    }
    return false;
}

namespace {

long long unsound_count_flags(const CsInstance& inst, const std::vector<char>& accepted) {
    long long n = 0;
    for (std::size_t y = 0; y < inst.out_class().size(); ++y)
        for (std::uint32_t c : inst.out_adjacency(y))
            if (accepted[c]) {
                ++n;
                break;
            }
    return n;
}

VerifierAcceptance flags_to_verifier(const CsInstance& inst, const std::vector<char>& accepted) {
    VerifierAcceptance a;
    for (std::size_t c = 0; c < accepted.size(); ++c)
        if (accepted[c])
            a.accepted.insert(inst.certificates()[c]);
    return a;
}

std::vector<Id> prover_sequence(const ProverAssignment& m) {
    std::vector<Id> seq;
    for (const auto& [x, phi] : m.assignment)
        seq.push_back(phi);
    return seq;
}

// order: larger objective first (DCS) / smaller first (DCS2), then smaller
// accepted sequence, then smaller prover sequence
bool solution_better(const DcsSolution& a, const DcsSolution& b, bool minimize_objective) {
    if (a.objective != b.objective)
        return minimize_objective ? a.objective < b.objective : a.objective > b.objective;
    std::vector<Id> sa(a.verifier.accepted.begin(), a.verifier.accepted.end());
    std::vector<Id> sb(b.verifier.accepted.begin(), b.verifier.accepted.end());
    if (sa != sb)
        return sa < sb;
    return prover_sequence(a.prover) < prover_sequence(b.prover);
}

constexpr int kGreedyRestarts = 8;

} // namespace

std::optional<DcsSolution> solve_dcs_greedy(const CsInstance& inst, const Rational& eps_c,
                                            const Rational& eps_s, std::uint64_t seed) {
    require_solver_inputs(inst, eps_c, eps_s, "eps_s");
    if (has_isolated_in_class(inst))
        return std::nullopt;

    const std::size_t m = inst.certificates().size();
    const long long sound_budget = floor_times(eps_s, inst.out_class().size());

    std::optional<DcsSolution> best;
    std::mt19937_64 master(seed);
    for (int restart = 0; restart < kGreedyRestarts; ++restart) {
        std::mt19937_64 rng(master());
        std::vector<char> accepted(m, 1);

        // Repair soundness by shedding the certificates that cover the most
        // out-class datapoints.
        while (unsound_count_flags(inst, accepted) > sound_budget) {
            std::vector<std::uint32_t> candidates;
            std::size_t best_cover = 0;
            for (std::uint32_t c = 0; c < m; ++c) {
                if (!accepted[c])
                    continue;
                std::size_t cover = inst.certificate_out_adjacency(c).size();
                if (candidates.empty() || cover > best_cover) {
                    candidates.assign(1, c);
                    best_cover = cover;
                } else if (cover == best_cover) {
                    candidates.push_back(c);
                }
            }
            std::uint32_t drop =
                restart == 0 ? candidates.front() : candidates[rng() % candidates.size()];
            accepted[drop] = 0;
        }

        auto verifier = flags_to_verifier(inst, accepted);
        auto plan = optimal_prover_given_verifier(inst, verifier, eps_c);
        if (!plan)
            continue; // this repair path lost completeness; try another order

        // Hill-climb single certificate flips while both constraints hold.
        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::uint32_t> order(m);
            for (std::uint32_t c = 0; c < m; ++c)
                order[c] = c;
            std::shuffle(order.begin(), order.end(), rng);
            for (std::uint32_t c : order) {
                accepted[c] ^= 1;
                bool ok = unsound_count_flags(inst, accepted) <= sound_budget;
                std::optional<ProverPlan> trial;
                if (ok) {
                    trial = optimal_prover_given_verifier(inst, flags_to_verifier(inst, accepted),
                                                          eps_c);
                    ok = trial.has_value() && trial->precision < plan->precision;
                }
                if (ok) {
                    plan = std::move(trial);
                    improved = true;
                    break;
                }
                accepted[c] ^= 1; // revert
            }
        }

        auto sol = assemble_solution(inst, flags_to_verifier(inst, accepted),
                                     std::move(plan->prover),
                                     /*dcs2_objective=*/false, /*optimal=*/false);
        if (!best || solution_better(sol, *best, /*minimize_objective=*/false))
            best = std::move(sol);
    }
    return best;
}

std::optional<DcsSolution> solve_dcs2_greedy(const CsInstance& inst, const Rational& eps_c,
                                             const Rational& q, std::uint64_t seed) {
    require_solver_inputs(inst, eps_c, q, "q");
    if (has_isolated_in_class(inst))
        return std::nullopt;

    const std::size_t m = inst.certificates().size();
    const Rational ceiling = Rational(1) - q;

    // Monotonicity in the accepted set makes full acceptance the feasibility
    // oracle: if it fails, no verifier admits an admissible prover.
    VerifierAcceptance all;
    for (const Id& c : inst.certificates())
        all.accepted.insert(c);
    auto full_plan = optimal_prover_given_verifier(inst, all, eps_c);
    if (!full_plan || full_plan->precision > ceiling)
        return std::nullopt;

    auto feasible = [&](const std::vector<char>& accepted,
                        std::optional<ProverPlan>& plan_out) {
        auto plan = optimal_prover_given_verifier(inst, flags_to_verifier(inst, accepted), eps_c);
        if (!plan || plan->precision > ceiling)
            return false;
        plan_out = std::move(plan);
        return true;
    };

    std::optional<DcsSolution> best;
    std::mt19937_64 master(seed);
    for (int restart = 0; restart < kGreedyRestarts; ++restart) {
        std::mt19937_64 rng(master());
        std::vector<char> accepted(m, 0);
        for (std::uint32_t c = 0; c < m; ++c)
            if (inst.certificate_out_adjacency(c).empty())
                accepted[c] = 1;

        std::optional<ProverPlan> plan;
        while (!feasible(accepted, plan)) {
            // Add the certificate that lowers the achievable precision most.
            std::vector<std::uint32_t> order;
            for (std::uint32_t c = 0; c < m; ++c)
                if (!accepted[c])
                    order.push_back(c);
            if (restart != 0)
                std::shuffle(order.begin(), order.end(), rng);
            bool have = false;
            std::uint32_t pick = 0;
            Rational pick_precision;
            for (std::uint32_t c : order) {
                accepted[c] = 1;
                auto trial =
                    optimal_prover_given_verifier(inst, flags_to_verifier(inst, accepted), eps_c);
                accepted[c] = 0;
                if (!trial)
                    continue;
                if (!have || trial->precision < pick_precision) {
                    have = true;
                    pick = c;
                    pick_precision = trial->precision;
                }
            }
            if (!have)
                pick = order.front(); // nothing feasible yet; keep growing
            accepted[pick] = 1;
        }

        long long unsound = unsound_count_flags(inst, accepted);
        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::uint32_t> order(m);
            for (std::uint32_t c = 0; c < m; ++c)
                order[c] = c;
            std::shuffle(order.begin(), order.end(), rng);
            for (std::uint32_t c : order) {
                accepted[c] ^= 1;
                std::optional<ProverPlan> trial;
                if (unsound_count_flags(inst, accepted) < unsound && feasible(accepted, trial)) {
                    plan = std::move(trial);
                    unsound = unsound_count_flags(inst, accepted);
                    improved = true;
                    break;
                }
                accepted[c] ^= 1;
            }
        }

        auto sol = assemble_solution(inst, flags_to_verifier(inst, accepted),
                                     std::move(plan->prover),
                                     /*dcs2_objective=*/true, /*optimal=*/false);
        if (!best || solution_better(sol, *best, /*minimize_objective=*/true))
            best = std::move(sol);
    }
    return best;
}

} // namespace csi
