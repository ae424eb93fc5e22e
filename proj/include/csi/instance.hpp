#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csi/error.hpp"

namespace csi {

using Id = std::string;

enum class VertexKind { InClass, OutClass, Certificate };

struct Edge {
    Id datapoint;
    Id certificate;

    auto operator<=>(const Edge&) const = default;
};

struct Violation {
    std::string code;    // stable machine-readable tag
    std::string message; // human-readable, includes the offending ids
    std::vector<Id> ids;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    bool valid() const { return violations.empty(); }
    bool has(const std::string& code) const {
        for (const auto& v : violations)
            if (v.code == code)
                return true;
        for (const auto& w : warnings)
            if (w.code == code)
                return true;
        return false;
    }
};

/// Tripartite certificate-selection instance: in-class datapoints,
/// certificates, out-class datapoints, and datapoint-certificate edges.
///
/// The constructor accepts arbitrary input and keeps it verbatim for
/// validate(); alongside it builds a normalized view (lexicographically
/// sorted vertex lists, deduplicated well-formed edges, adjacency indexes)
/// that every query and algorithm works on. Instances are immutable after
/// construction and safe to share across threads.
class CsInstance {
public:
    CsInstance() = default;
    CsInstance(std::vector<Id> in_class, std::vector<Id> out_class,
               std::vector<Id> certificates, std::vector<Edge> edges);

    // Normalized views: sorted lexicographically, duplicates removed.
    const std::vector<Id>& in_class() const { return in_; }
    const std::vector<Id>& out_class() const { return out_; }
    const std::vector<Id>& certificates() const { return certs_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Input exactly as given; only validate() should need these.
    const std::vector<Id>& raw_in_class() const { return raw_in_; }
    const std::vector<Id>& raw_out_class() const { return raw_out_; }
    const std::vector<Id>& raw_certificates() const { return raw_certs_; }
    const std::vector<Edge>& raw_edges() const { return raw_edges_; }

    std::optional<VertexKind> kind_of(const Id& id) const;

    // Index-based adjacency; indexes are positions in the sorted id lists,
    // so index order coincides with lexicographic id order.
    const std::vector<std::uint32_t>& in_adjacency(std::size_t in_index) const {
        return in_adj_[in_index];
    }
    const std::vector<std::uint32_t>& out_adjacency(std::size_t out_index) const {
        return out_adj_[out_index];
    }
    const std::vector<std::uint32_t>& certificate_in_adjacency(std::size_t cert_index) const {
        return cert_in_adj_[cert_index];
    }
    const std::vector<std::uint32_t>& certificate_out_adjacency(std::size_t cert_index) const {
        return cert_out_adj_[cert_index];
    }

    std::optional<std::uint32_t> index_of(VertexKind kind, const Id& id) const;

    friend bool operator==(const CsInstance& a, const CsInstance& b) {
        return a.in_ == b.in_ && a.out_ == b.out_ && a.certs_ == b.certs_ &&
               a.edges_ == b.edges_;
    }

private:
    std::vector<Id> raw_in_, raw_out_, raw_certs_;
    std::vector<Edge> raw_edges_;

    std::vector<Id> in_, out_, certs_;
    std::vector<Edge> edges_;
    std::map<Id, std::pair<VertexKind, std::uint32_t>> lookup_;
    std::vector<std::vector<std::uint32_t>> in_adj_, out_adj_, cert_in_adj_, cert_out_adj_;
};

/// Total assignment of a certificate to every in-class datapoint (Merlin).
struct ProverAssignment {
    std::map<Id, Id> assignment;

    friend bool operator==(const ProverAssignment& a, const ProverAssignment& b) {
        return a.assignment == b.assignment;
    }
};

/// Accept/reject labelling of the certificates (Arthur); `accepted` is the
/// preimage of "accept", everything else is rejected.
struct VerifierAcceptance {
    std::set<Id> accepted;

    friend bool operator==(const VerifierAcceptance& a, const VerifierAcceptance& b) {
        return a.accepted == b.accepted;
    }
};

/// Reports every invariant violation of the instance; an empty violation
/// list means the instance is valid. Degree-0 in-class datapoints and
/// duplicate edges are reported as warnings, not violations.
ValidationReport validate(const CsInstance& instance);

/// Adjacent vertex ids of a datapoint or certificate, sorted. Throws
/// UnknownVertexError for ids that are not part of the instance.
std::vector<Id> neighbors(const CsInstance& instance, const Id& vertex);

/// N(F) for a certificate set: the union of the members' neighborhoods.
std::vector<Id> neighbors(const CsInstance& instance, std::span<const Id> certificates);

/// Maximum degree over all datapoints of both classes.
std::size_t max_features_per_datapoint(const CsInstance& instance);

/// Checks that M is total over the in-class datapoints and only uses edges
/// of the instance; returns an explanation for the first defect found.
std::optional<std::string> prover_defect(const CsInstance& instance, const ProverAssignment& m);

/// Checks that accepted certificates exist; explains the first defect found.
std::optional<std::string> verifier_defect(const CsInstance& instance,
                                           const VerifierAcceptance& a);

} // namespace csi
