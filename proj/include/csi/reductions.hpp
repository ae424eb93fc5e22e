#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csi/instance.hpp"
#include "csi/rational.hpp"
#include "csi/solvers.hpp"

namespace csi {

/// Default size guard for the brute-force source-problem oracles.
inline constexpr std::size_t kDefaultOracleGuard = 20;

/// Simple undirected graph: no self-loops, no multi-edges. Edges are stored
/// with endpoints in sorted order.
struct SourceGraph {
    std::vector<Id> vertices;                // sorted, unique
    std::vector<std::pair<Id, Id>> edges;    // sorted, unique, first < second

    static SourceGraph create(std::vector<Id> vertices, std::vector<std::pair<Id, Id>> edges);
};

/// Uniform set system over a universe of elements; sets keep their input
/// order and may repeat.
struct SetSystem {
    std::vector<Id> universe;                // sorted, unique
    std::vector<std::vector<Id>> sets;       // each sorted, size == uniformity
    std::size_t uniformity = 0;

    static SetSystem create(std::vector<Id> universe, std::vector<std::vector<Id>> sets);
};

/// One gadget of a reduction: the certificate pair and in-class datapoints
/// introduced for a source edge (DkS) or source set (MkU).
struct GadgetEntry {
    std::size_t source_index = 0;           // position in the source edge/set list
    Id phi0;
    Id phi1;
    std::vector<Id> in_points;
    std::pair<Id, Id> source_edge;          // DkS only
    std::vector<Id> elements;               // MkU only
};

enum class ReductionKind { DensestKSubgraph, MinKUnion };

struct ReductionArtifact {
    ReductionKind kind = ReductionKind::DensestKSubgraph;
    std::size_t k = 0;
    CsInstance instance;
    Rational eps_c;
    Rational eps_s_or_q;                    // eps_s for DkS, q for MkU
    std::vector<GadgetEntry> gadgets;       // by source index
    std::map<Id, Id> vertex_map;            // source vertex/element -> out-class id
};

/// Theorem-style gadget: per source edge two in-class datapoints and the
/// certificate pair (phi0 private, phi1 additionally touching the endpoint
/// out-class datapoints); eps_c = 1/(2|E|+1), eps_s = k/|V|.
ReductionArtifact reduce_dks(const SourceGraph& source, std::size_t k);

struct DksLift {
    std::vector<Id> vertices;      // sorted, exactly min(k, |V|) entries
    std::size_t edge_count = 0;    // distinct source edges whose phi1 the prover used
};

/// Reads a feasible gadget solution back into a vertex set of the source
/// graph; the induced subgraph contains at least edge_count edges.
DksLift lift_dks(const ReductionArtifact& artifact, const DcsSolution& solution);

/// Exact densest-k-subgraph value by exhaustive enumeration.
std::size_t dks_brute(const SourceGraph& source, std::size_t k,
                      std::size_t guard = kDefaultOracleGuard);

/// Per source set: r in-class datapoints and the certificate pair (phi1
/// additionally touching the set's element datapoints); eps_c = 1/(r|S|+1),
/// q = k/|S|.
ReductionArtifact reduce_mku(const SetSystem& source, std::size_t k);

struct MkuLift {
    std::vector<std::size_t> set_indices;  // sets whose phi1 served all r datapoints
    std::size_t union_size = 0;
};

/// Reads a feasible gadget solution back into a set selection; the union is
/// bounded by (1 - achieved soundness) * |U|.
MkuLift lift_mku(const ReductionArtifact& artifact, const DcsSolution& solution);

/// Exact min-l-union value by exhaustive enumeration (minimum union size
/// over all selections of l sets).
std::size_t mku_brute(const SetSystem& source, std::size_t l,
                      std::size_t guard = kDefaultOracleGuard);

} // namespace csi
