#include "csi/instance.hpp"

#include <algorithm>
#include <set>

namespace csi {

namespace {

std::vector<Id> sorted_unique(std::vector<Id> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

} // namespace

CsInstance::CsInstance(std::vector<Id> in_class, std::vector<Id> out_class,
                       std::vector<Id> certificates, std::vector<Edge> edges)
    : raw_in_(std::move(in_class)),
      raw_out_(std::move(out_class)),
      raw_certs_(std::move(certificates)),
      raw_edges_(std::move(edges)) {
    in_ = sorted_unique(raw_in_);
    out_ = sorted_unique(raw_out_);
    certs_ = sorted_unique(raw_certs_);

    // First declaration wins on id clashes; validate() reports the clash.
    for (std::uint32_t i = 0; i < in_.size(); ++i)
        lookup_.emplace(in_[i], std::pair{VertexKind::InClass, i});
    for (std::uint32_t i = 0; i < out_.size(); ++i)
        lookup_.emplace(out_[i], std::pair{VertexKind::OutClass, i});
    for (std::uint32_t i = 0; i < certs_.size(); ++i)
        lookup_.emplace(certs_[i], std::pair{VertexKind::Certificate, i});

    // Keep only well-formed (datapoint, certificate) edges in the index;
    // malformed ones stay visible through raw_edges()/validate().
    std::set<Edge> keep;
    for (const Edge& e : raw_edges_) {
        auto p = lookup_.find(e.datapoint);
        auto c = lookup_.find(e.certificate);
        if (p == lookup_.end() || c == lookup_.end())
            continue;
        if (c->second.first != VertexKind::Certificate)
            continue;
        if (p->second.first == VertexKind::Certificate)
            continue;
        keep.insert(e);
    }
    edges_.assign(keep.begin(), keep.end());

    in_adj_.resize(in_.size());
    out_adj_.resize(out_.size());
    cert_in_adj_.resize(certs_.size());
    cert_out_adj_.resize(certs_.size());
    for (const Edge& e : edges_) {
        auto [kind, di] = lookup_.at(e.datapoint);
        std::uint32_t ci = lookup_.at(e.certificate).second;
        if (kind == VertexKind::InClass) {
            in_adj_[di].push_back(ci);
            cert_in_adj_[ci].push_back(di);
        } else {
            out_adj_[di].push_back(ci);
            cert_out_adj_[ci].push_back(di);
        }
    }
    for (auto* adj : {&in_adj_, &out_adj_, &cert_in_adj_, &cert_out_adj_})
        for (auto& row : *adj)
            std::sort(row.begin(), row.end());
}

std::optional<VertexKind> CsInstance::kind_of(const Id& id) const {
    auto it = lookup_.find(id);
    if (it == lookup_.end())
        return std::nullopt;
    return it->second.first;
}

std::optional<std::uint32_t> CsInstance::index_of(VertexKind kind, const Id& id) const {
    auto it = lookup_.find(id);
    if (it == lookup_.end() || it->second.first != kind)
        return std::nullopt;
    return it->second.second;
}

ValidationReport validate(const CsInstance& inst) {
    ValidationReport report;
    auto violation = [&](std::string code, std::string message, std::vector<Id> ids = {}) {
        report.violations.push_back({std::move(code), std::move(message), std::move(ids)});
    };
    auto warning = [&](std::string code, std::string message, std::vector<Id> ids = {}) {
        report.warnings.push_back({std::move(code), std::move(message), std::move(ids)});
    };

    if (inst.raw_in_class().empty())
        violation("empty-in-class", "empty in-class set");
    if (inst.raw_out_class().empty())
        violation("empty-out-class", "empty out-class set");
    if (inst.raw_certificates().empty())
        violation("empty-certificates", "empty certificate set");

    // Duplicate ids, within a set or across the three sets.
    std::map<Id, int> occurrences;
    for (const auto& id : inst.raw_in_class())
        ++occurrences[id];
    for (const auto& id : inst.raw_out_class())
        ++occurrences[id];
    for (const auto& id : inst.raw_certificates())
        ++occurrences[id];
    for (const auto& [id, n] : occurrences)
        if (n > 1)
            violation("duplicate-id", "id '" + id + "' declared " + std::to_string(n) + " times",
                      {id});

    std::set<Edge> seen;
    for (const Edge& e : inst.raw_edges()) {
        auto pk = inst.kind_of(e.datapoint);
        auto ck = inst.kind_of(e.certificate);
        if (!pk || !ck) {
            std::vector<Id> bad;
            if (!pk)
                bad.push_back(e.datapoint);
            if (!ck)
                bad.push_back(e.certificate);
            std::string ids;
            for (const auto& b : bad)
                ids += (ids.empty() ? "'" : ", '") + b + "'";
            violation("unknown-id", "edge endpoint " + ids + " not declared", bad);
            continue;
        }
        bool p_cert = *pk == VertexKind::Certificate;
        bool c_cert = *ck == VertexKind::Certificate;
        if (p_cert && c_cert) {
            violation("edge-joins-two-certificates",
                      "edge joins two certificates: '" + e.datapoint + "' -- '" + e.certificate +
                          "'",
                      {e.datapoint, e.certificate});
            continue;
        }
        if (!p_cert && !c_cert) {
            violation("edge-joins-two-datapoints",
                      "edge joins two datapoints: '" + e.datapoint + "' -- '" + e.certificate +
                          "'",
                      {e.datapoint, e.certificate});
            continue;
        }
        if (p_cert) {
            violation("edge-endpoints-swapped",
                      "edge lists certificate '" + e.datapoint + "' in the datapoint position",
                      {e.datapoint, e.certificate});
            continue;
        }
        if (!seen.insert(e).second)
            warning("duplicate-edge",
                    "duplicate edge '" + e.datapoint + "' -- '" + e.certificate + "' collapsed",
                    {e.datapoint, e.certificate});
    }

    for (std::size_t i = 0; i < inst.in_class().size(); ++i)
        if (inst.in_adjacency(i).empty())
            warning("isolated-in-class-datapoint",
                    "in-class datapoint '" + inst.in_class()[i] +
                        "' has no adjacent certificate; no prover exists for it",
                    {inst.in_class()[i]});

    return report;
}

std::vector<Id> neighbors(const CsInstance& inst, const Id& vertex) {
    auto kind = inst.kind_of(vertex);
    if (!kind)
        throw UnknownVertexError("unknown vertex id '" + vertex + "'");
    std::vector<Id> out;
    if (*kind == VertexKind::Certificate) {
        std::uint32_t ci = *inst.index_of(VertexKind::Certificate, vertex);
        for (std::uint32_t di : inst.certificate_in_adjacency(ci))
            out.push_back(inst.in_class()[di]);
        for (std::uint32_t di : inst.certificate_out_adjacency(ci))
            out.push_back(inst.out_class()[di]);
        std::sort(out.begin(), out.end());
    } else if (*kind == VertexKind::InClass) {
        std::uint32_t di = *inst.index_of(VertexKind::InClass, vertex);
        for (std::uint32_t ci : inst.in_adjacency(di))
            out.push_back(inst.certificates()[ci]);
    } else {
        std::uint32_t di = *inst.index_of(VertexKind::OutClass, vertex);
        for (std::uint32_t ci : inst.out_adjacency(di))
            out.push_back(inst.certificates()[ci]);
    }
    return out;
}

std::vector<Id> neighbors(const CsInstance& inst, std::span<const Id> certificates) {
    std::set<Id> acc;
    for (const Id& c : certificates) {
        auto kind = inst.kind_of(c);
        if (!kind)
            throw UnknownVertexError("unknown vertex id '" + c + "'");
        if (*kind != VertexKind::Certificate)
            throw Error("'" + c + "' is not a certificate");
        for (Id& n : neighbors(inst, c))
            acc.insert(std::move(n));
    }
    return {acc.begin(), acc.end()};
}

std::size_t max_features_per_datapoint(const CsInstance& inst) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < inst.in_class().size(); ++i)
        best = std::max(best, inst.in_adjacency(i).size());
    for (std::size_t i = 0; i < inst.out_class().size(); ++i)
        best = std::max(best, inst.out_adjacency(i).size());
    return best;
}

std::optional<std::string> prover_defect(const CsInstance& inst, const ProverAssignment& m) {
    for (const Id& x : inst.in_class())
        if (!m.assignment.count(x))
            return "prover assigns nothing to in-class datapoint '" + x + "'";
    for (const auto& [x, phi] : m.assignment) {
        auto di = inst.index_of(VertexKind::InClass, x);
        if (!di)
            return "prover assigns to unknown in-class datapoint '" + x + "'";
        auto ci = inst.index_of(VertexKind::Certificate, phi);
        if (!ci)
            return "prover assigns unknown certificate '" + phi + "'";
        const auto& adj = inst.in_adjacency(*di);
        if (!std::binary_search(adj.begin(), adj.end(), *ci))
            return "prover uses non-edge '" + x + "' -> '" + phi + "'";
    }
    return std::nullopt;
}

std::optional<std::string> verifier_defect(const CsInstance& inst, const VerifierAcceptance& a) {
    for (const Id& phi : a.accepted)
        if (!inst.index_of(VertexKind::Certificate, phi))
            return "verifier accepts unknown certificate '" + phi + "'";
    return std::nullopt;
}

} // namespace csi
