#include "csi/reductions.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "csi/detail/bits.hpp"
#include "csi/metrics.hpp"

namespace csi {

namespace {

std::string padded(std::size_t value, std::size_t max_value) {
    std::size_t width = std::to_string(max_value).size();
    std::string s = std::to_string(value);
    return std::string(width - s.size(), '0') + s;
}

void check_instance(const CsInstance& inst, const char* what) {
    auto report = validate(inst);
    if (!report.valid())
        throw Error(std::string("internal error: ") + what + " produced an invalid instance: " +
                    report.violations.front().message);
}

void require_feasible(const ReductionArtifact& artifact, const DcsSolution& solution) {
    const CsInstance& inst = artifact.instance;
    if (auto defect = verifier_defect(inst, solution.verifier))
        throw Error("solution does not match the artifact: " + *defect);
    if (auto defect = prover_defect(inst, solution.prover))
        throw Error("solution does not match the artifact: " + *defect);

    Rational compl_floor = Rational(1) - artifact.eps_c;
    if (completeness(inst, solution.verifier, solution.prover) < compl_floor)
        throw Error("solution infeasible for the artifact: completeness below 1 - eps_c");
    if (artifact.kind == ReductionKind::DensestKSubgraph) {
        Rational sound_floor = Rational(1) - artifact.eps_s_or_q;
        if (soundness(inst, solution.verifier) < sound_floor)
            throw Error("solution infeasible for the artifact: soundness below 1 - eps_s");
    } else {
        Rational ceiling = Rational(1) - artifact.eps_s_or_q;
        if (prover_precision(inst, solution.prover) > ceiling)
            throw Error("solution infeasible for the artifact: prover precision above 1 - q");
    }
}

} // namespace

SourceGraph SourceGraph::create(std::vector<Id> vertices,
                                std::vector<std::pair<Id, Id>> edges) {
    SourceGraph g;
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    g.vertices = std::move(vertices);
    std::set<std::pair<Id, Id>> normalized;
    for (auto& [u, v] : edges) {
        if (u == v)
            throw Error("self-loop at vertex '" + u + "'");
        if (!std::binary_search(g.vertices.begin(), g.vertices.end(), u))
            throw Error("edge endpoint '" + u + "' is not a declared vertex");
        if (!std::binary_search(g.vertices.begin(), g.vertices.end(), v))
            throw Error("edge endpoint '" + v + "' is not a declared vertex");
        normalized.insert(u < v ? std::pair{u, v} : std::pair{v, u});
    }
    g.edges.assign(normalized.begin(), normalized.end());
    return g;
}

SetSystem SetSystem::create(std::vector<Id> universe, std::vector<std::vector<Id>> sets) {
    SetSystem s;
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    s.universe = std::move(universe);
    for (auto& one : sets) {
        std::sort(one.begin(), one.end());
        if (std::adjacent_find(one.begin(), one.end()) != one.end())
            throw Error("set contains a duplicate element");
        for (const Id& e : one)
            if (!std::binary_search(s.universe.begin(), s.universe.end(), e))
                throw Error("set element '" + e + "' is not in the universe");
        if (one.empty())
            throw Error("empty set in set system");
    }
    if (!sets.empty()) {
        s.uniformity = sets.front().size();
        for (const auto& one : sets)
            if (one.size() != s.uniformity)
                throw Error("non-uniform set system: expected every set to have " +
                            std::to_string(s.uniformity) + " elements");
    }
    s.sets = std::move(sets);
    return s;
}

ReductionArtifact reduce_dks(const SourceGraph& source, std::size_t k) {
    if (source.edges.empty())
        throw Error("reduction requires at least one edge");
    if (k < 1 || k > source.vertices.size())
        throw Error("k out of range: need 1 <= k <= |V| = " +
                    std::to_string(source.vertices.size()));

    ReductionArtifact artifact;
    artifact.kind = ReductionKind::DensestKSubgraph;
    artifact.k = k;
    const auto e_count = source.edges.size();
    artifact.eps_c = Rational(1, static_cast<long long>(2 * e_count + 1));
    artifact.eps_s_or_q = Rational(static_cast<long long>(k),
                                   static_cast<long long>(source.vertices.size()));

    std::vector<Id> in_class, out_class, certs;
    std::vector<Edge> edges;
    for (const Id& v : source.vertices) {
        artifact.vertex_map[v] = "y-" + v;
        out_class.push_back("y-" + v);
    }
    for (std::size_t i = 0; i < e_count; ++i) {
        const auto& [u, v] = source.edges[i];
        std::string tag = "e" + padded(i + 1, e_count);
        GadgetEntry g;
        g.source_index = i;
        g.source_edge = source.edges[i];
        g.phi0 = "phi0-" + tag;
        g.phi1 = "phi1-" + tag;
        g.in_points = {"x-" + tag, "xp-" + tag};
        in_class.insert(in_class.end(), g.in_points.begin(), g.in_points.end());
        certs.push_back(g.phi0);
        certs.push_back(g.phi1);
        for (const Id& x : g.in_points) {
            edges.push_back({x, g.phi0});
            edges.push_back({x, g.phi1});
        }
        edges.push_back({artifact.vertex_map[u], g.phi1});
        edges.push_back({artifact.vertex_map[v], g.phi1});
        artifact.gadgets.push_back(std::move(g));
    }
    artifact.instance = CsInstance(std::move(in_class), std::move(out_class), std::move(certs),
                                   std::move(edges));
    check_instance(artifact.instance, "reduce_dks");
    return artifact;
}

DksLift lift_dks(const ReductionArtifact& artifact, const DcsSolution& solution) {
    if (artifact.kind != ReductionKind::DensestKSubgraph)
        throw Error("artifact is not a densest-k-subgraph reduction");
    require_feasible(artifact, solution);

    std::set<Id> chosen;
    std::size_t used_edges = 0;
    for (const GadgetEntry& g : artifact.gadgets) {
        bool used = false;
        for (const Id& x : g.in_points)
            if (solution.prover.assignment.at(x) == g.phi1)
                used = true;
        if (used) {
            ++used_edges;
            chosen.insert(g.source_edge.first);
            chosen.insert(g.source_edge.second);
        }
    }

    std::vector<Id> all_vertices;
    all_vertices.reserve(artifact.vertex_map.size());
    for (const auto& [v, y] : artifact.vertex_map)
        all_vertices.push_back(v);
    std::size_t target = std::min(artifact.k, all_vertices.size());
    for (const Id& v : all_vertices) {
        if (chosen.size() >= target)
            break;
        chosen.insert(v);
    }

    DksLift lift;
    lift.vertices.assign(chosen.begin(), chosen.end());
    lift.edge_count = used_edges;
    return lift;
}

std::size_t dks_brute(const SourceGraph& source, std::size_t k, std::size_t guard) {
    const std::size_t n = source.vertices.size();
    if (n > guard || n >= 32)
        throw BudgetExceededError("densest-k-subgraph oracle guard exceeded: |V| = " +
                                  std::to_string(n) + " > " + std::to_string(guard));
    if (k < 1 || k > n)
        throw Error("k out of range: need 1 <= k <= |V| = " + std::to_string(n));

    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& [u, v] : source.edges) {
        auto ui = static_cast<std::uint32_t>(
            std::lower_bound(source.vertices.begin(), source.vertices.end(), u) -
            source.vertices.begin());
        auto vi = static_cast<std::uint32_t>(
            std::lower_bound(source.vertices.begin(), source.vertices.end(), v) -
            source.vertices.begin());
        adj[ui] |= 1u << vi;
        adj[vi] |= 1u << ui;
    }

    std::size_t best = 0;
    const std::uint32_t total = std::uint32_t{1} << n;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k)
            continue;
        std::size_t twice_edges = 0;
        for (std::uint32_t rest = mask; rest;) {
            auto v = static_cast<std::uint32_t>(std::countr_zero(rest));
            rest &= rest - 1;
            twice_edges += static_cast<std::size_t>(std::popcount(adj[v] & mask));
        }
        best = std::max(best, twice_edges / 2);
    }
    return best;
}

ReductionArtifact reduce_mku(const SetSystem& source, std::size_t k) {
    if (source.sets.empty())
        throw Error("reduction requires at least one set");
    if (k < 1 || k > source.sets.size())
        throw Error("k out of range: need 1 <= k <= |S| = " + std::to_string(source.sets.size()));
    const std::size_t r = source.uniformity;
    for (const auto& one : source.sets)
        if (one.size() != r)
            throw Error("non-uniform set system");

    ReductionArtifact artifact;
    artifact.kind = ReductionKind::MinKUnion;
    artifact.k = k;
    const auto s_count = source.sets.size();
    artifact.eps_c = Rational(1, static_cast<long long>(r * s_count + 1));
    artifact.eps_s_or_q =
        Rational(static_cast<long long>(k), static_cast<long long>(s_count));

    std::vector<Id> in_class, out_class, certs;
    std::vector<Edge> edges;
    for (const Id& e : source.universe) {
        artifact.vertex_map[e] = "y-" + e;
        out_class.push_back("y-" + e);
    }
    for (std::size_t i = 0; i < s_count; ++i) {
        std::string tag = "s" + padded(i + 1, s_count);
        GadgetEntry g;
        g.source_index = i;
        g.elements = source.sets[i];
        g.phi0 = "phi0-" + tag;
        g.phi1 = "phi1-" + tag;
        for (std::size_t j = 1; j <= r; ++j)
            g.in_points.push_back("x-" + tag + "-" + padded(j, r));
        in_class.insert(in_class.end(), g.in_points.begin(), g.in_points.end());
        certs.push_back(g.phi0);
        certs.push_back(g.phi1);
        for (const Id& x : g.in_points) {
            edges.push_back({x, g.phi0});
            edges.push_back({x, g.phi1});
        }
        for (const Id& e : g.elements)
            edges.push_back({artifact.vertex_map[e], g.phi1});
        artifact.gadgets.push_back(std::move(g));
    }
    artifact.instance = CsInstance(std::move(in_class), std::move(out_class), std::move(certs),
                                   std::move(edges));
    check_instance(artifact.instance, "reduce_mku");
    return artifact;
}

MkuLift lift_mku(const ReductionArtifact& artifact, const DcsSolution& solution) {
    if (artifact.kind != ReductionKind::MinKUnion)
        throw Error("artifact is not a min-k-union reduction");
    require_feasible(artifact, solution);

    MkuLift lift;
    std::set<Id> covered;
    for (const GadgetEntry& g : artifact.gadgets) {
        bool all_phi1 = true;
        for (const Id& x : g.in_points)
            if (solution.prover.assignment.at(x) != g.phi1)
                all_phi1 = false;
        if (all_phi1) {
            lift.set_indices.push_back(g.source_index);
            covered.insert(g.elements.begin(), g.elements.end());
        }
    }
    lift.union_size = covered.size();
    return lift;
}

std::size_t mku_brute(const SetSystem& source, std::size_t l, std::size_t guard) {
    const std::size_t n = source.sets.size();
    if (n > guard || n >= 32)
        throw BudgetExceededError("min-k-union oracle guard exceeded: |S| = " +
                                  std::to_string(n) + " > " + std::to_string(guard));
    if (l < 1 || l > n)
        throw Error("l out of range: need 1 <= l <= |S| = " + std::to_string(n));

    std::vector<detail::Bits> masks;
    masks.reserve(n);
    for (const auto& one : source.sets) {
        detail::Bits b(source.universe.size());
        for (const Id& e : one)
            b.set(static_cast<std::size_t>(
                std::lower_bound(source.universe.begin(), source.universe.end(), e) -
                source.universe.begin()));
        masks.push_back(std::move(b));
    }

    std::size_t best = source.universe.size() + 1;
    const std::uint32_t total = std::uint32_t{1} << n;
    detail::Bits covered(source.universe.size());
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != l)
            continue;
        covered.clear();
        for (std::uint32_t rest = mask; rest;) {
            auto i = static_cast<std::uint32_t>(std::countr_zero(rest));
            rest &= rest - 1;
            covered |= masks[i];
        }
        best = std::min(best, covered.count());
    }
    return best;
}

} // namespace csi
