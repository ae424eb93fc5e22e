#include "csi/generators.hpp"

#include <random>

namespace csi {

namespace {

std::string padded(std::size_t value, std::size_t max_value) {
    std::size_t width = std::to_string(max_value).size();
    std::string s = std::to_string(value);
    return std::string(width - s.size(), '0') + s;
}

} // namespace

CsInstance letters_digits(std::size_t n) {
    if (n < 1)
        throw Error("letters_digits requires n >= 1");

    std::vector<Id> in_class, out_class, certs;
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= n; ++i) {
        Id letter = "letter-" + padded(i, n);
        Id digit = "digit-" + padded(i, n);
        Id letter_point = "in-letter-" + padded(i, n);
        Id digit_point = "out-digit-" + padded(i, n);
        certs.push_back(letter);
        certs.push_back(digit);
        in_class.push_back(letter_point);
        out_class.push_back(digit_point);
        edges.push_back({letter_point, letter});
        edges.push_back({Id("out-letters-all"), letter});
        edges.push_back({digit_point, digit});
        edges.push_back({Id("in-digits-all"), digit});
    }
    in_class.push_back("in-digits-all");
    out_class.push_back("out-letters-all");
    return {std::move(in_class), std::move(out_class), std::move(certs), std::move(edges)};
}

CsInstance random_csi(const RandomCsiParams& params, std::vector<Id>* repaired) {
    if (params.n_in < 1 || params.n_out < 1 || params.m < 1)
        throw Error("random_csi requires n_in, n_out, m >= 1");
    for (const Rational* p : {&params.p_in, &params.p_out})
        if (*p < Rational(0) || *p > Rational(1))
            throw Error("edge probabilities must lie in [0, 1]");

    std::mt19937_64 rng(params.seed);
    auto coin = [&rng](const Rational& p) {
        auto den = p.denominator().convert_to<std::uint64_t>();
        auto num = p.numerator().convert_to<std::uint64_t>();
        return rng() % den < num;
    };

    std::vector<Id> in_class, out_class, certs;
    for (std::size_t i = 1; i <= params.n_in; ++i)
        in_class.push_back("in-" + padded(i, params.n_in));
    for (std::size_t i = 1; i <= params.n_out; ++i)
        out_class.push_back("out-" + padded(i, params.n_out));
    for (std::size_t i = 1; i <= params.m; ++i)
        certs.push_back("c-" + padded(i, params.m));

    std::vector<Edge> edges;
    std::vector<char> has_edge(params.n_in, 0);
    for (std::size_t i = 0; i < params.n_in; ++i)
        for (std::size_t j = 0; j < params.m; ++j)
            if (coin(params.p_in)) {
                edges.push_back({in_class[i], certs[j]});
                has_edge[i] = 1;
            }
    for (std::size_t i = 0; i < params.n_out; ++i)
        for (std::size_t j = 0; j < params.m; ++j)
            if (coin(params.p_out))
                edges.push_back({out_class[i], certs[j]});

    for (std::size_t i = 0; i < params.n_in; ++i) {
        if (has_edge[i])
            continue;
        std::size_t j = static_cast<std::size_t>(rng() % params.m);
        edges.push_back({in_class[i], certs[j]});
        if (repaired != nullptr)
            repaired->push_back(in_class[i]);
    }
    return {std::move(in_class), std::move(out_class), std::move(certs), std::move(edges)};
}

std::vector<ZooEntry> gadget_zoo() {
    std::vector<ZooEntry> zoo;

    zoo.push_back({"T1",
                   CsInstance({"x1", "x2"}, {"y1"}, {"a", "b"},
                              {{"x1", "a"}, {"x2", "a"}, {"x2", "b"}, {"y1", "b"}}),
                   std::nullopt});

    zoo.push_back({"balanced-identity",
                   CsInstance({"x1", "x2"}, {"y1", "y2"}, {"a"},
                              {{"x1", "a"}, {"x2", "a"}, {"y1", "a"}}),
                   std::nullopt});

    auto k3 = SourceGraph::create({"1", "2", "3"}, {{"1", "2"}, {"1", "3"}, {"2", "3"}});
    auto k3_artifact = reduce_dks(k3, 2);
    zoo.push_back({"k3-dks-k2", k3_artifact.instance, std::move(k3_artifact)});

    auto path = SetSystem::create({"1", "2", "3", "4"},
                                  {{"1", "2"}, {"2", "3"}, {"3", "4"}});
    auto mku_artifact = reduce_mku(path, 1);
    zoo.push_back({"mku-path", mku_artifact.instance, std::move(mku_artifact)});

    return zoo;
}

} // namespace csi
