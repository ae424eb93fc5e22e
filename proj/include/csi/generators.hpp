#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csi/instance.hpp"
#include "csi/rational.hpp"
#include "csi/reductions.hpp"

namespace csi {

/// The letters/digits family: n single-letter in-class datapoints plus one
/// all-digits in-class datapoint, mirrored on the out-class side, with one
/// certificate per letter and per digit. Its exact AFC is n and the best
/// deceptive strategy reaches completeness = soundness = n/(n+1) with every
/// certificate at precision 1/2.
CsInstance letters_digits(std::size_t n);

struct RandomCsiParams {
    std::size_t n_in = 1;
    std::size_t n_out = 1;
    std::size_t m = 1;
    Rational p_in;   // in [0, 1]
    Rational p_out;  // in [0, 1]
    std::uint64_t seed = 0;
};

/// Seeded random tripartite instance. Edges are drawn with the pinned
/// portable generator (std::mt19937_64; an edge with probability a/b exists
/// iff draw % b < a), datapoints in id order, certificates in id order,
/// in-class before out-class. In-class datapoints left isolated are repaired
/// by attaching the certificate indexed draw % m so that provers exist; the
/// repaired ids are reported through `repaired` when given.
CsInstance random_csi(const RandomCsiParams& params, std::vector<Id>* repaired = nullptr);

struct ZooEntry {
    std::string name;
    CsInstance instance;
    std::optional<ReductionArtifact> artifact; // set for reduction-built entries
};

/// The fixed named instances used throughout the test-suite: "T1",
/// "balanced-identity", "k3-dks-k2", "mku-path".
std::vector<ZooEntry> gadget_zoo();

} // namespace csi
