#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace netmix::oracle {

namespace {

struct NodePair {
    std::size_t v, u;
};

// (2,1), (3,1), ..., (V,1), (3,2), ... in zero-based form
std::vector<NodePair> lower_triangle(std::size_t V) {
    std::vector<NodePair> out;
    for (std::size_t u = 0; u < V; ++u)
        for (std::size_t v = u + 1; v < V; ++v)
            out.push_back({v, u});
    return out;
}

std::size_t checked_nodes(const MixtureParameters& params) {
    const std::size_t L = static_cast<std::size_t>(params.Z.size());
    std::size_t V = 2;
    while (V * (V - 1) / 2 < L)
        ++V;
    if (V * (V - 1) / 2 != L)
        throw std::invalid_argument("oracle: Z length is not a triangular number");
    if (V > kMaxNodes)
        throw std::invalid_argument("oracle: enumeration limited to V <= 5");
    return V;
}

// pi_l^(h) for each component, straight from the definition
std::vector<std::vector<long double>> component_probabilities(const MixtureParameters& params) {
    const std::size_t V = checked_nodes(params);
    const auto pairs = lower_triangle(V);
    std::vector<std::vector<long double>> out;
    for (const auto& c : params.components) {
        std::vector<long double> pi;
        for (std::size_t l = 0; l < pairs.size(); ++l) {
            long double s = params.Z[static_cast<Eigen::Index>(l)];
            for (Eigen::Index r = 0; r < c.lambda.size(); ++r)
                s += static_cast<long double>(c.lambda[r]) * c.X(static_cast<Eigen::Index>(pairs[l].v), r) *
                     c.X(static_cast<Eigen::Index>(pairs[l].u), r);
            pi.push_back(1.0L / (1.0L + std::exp(-s)));
        }
        out.push_back(std::move(pi));
    }
    return out;
}

long double bernoulli_product(std::size_t code, const std::vector<long double>& pi) {
    long double p = 1.0L;
    for (std::size_t l = 0; l < pi.size(); ++l)
        p *= ((code >> l) & 1U) ? pi[l] : 1.0L - pi[l];
    return p;
}

ExactPmfTable mixture_table(const std::vector<std::vector<long double>>& pi,
                            const std::vector<long double>& weights, std::size_t V) {
    ExactPmfTable t;
    t.nodes = V;
    t.edges = V * (V - 1) / 2;
    const std::size_t configs = std::size_t{1} << t.edges;
    t.entries.assign(configs, 0.0L);
    for (std::size_t k = 0; k < configs; ++k) {
        long double p = 0.0L;
        for (std::size_t h = 0; h < pi.size(); ++h)
            p += weights[h] * bernoulli_product(k, pi[h]);
        t.entries[k] = p;
    }
    return t;
}

// Neumaier-compensated sum
long double compensated(const std::vector<long double>& xs) {
    long double sum = 0.0L, c = 0.0L;
    for (long double x : xs) {
        const long double t = sum + x;
        c += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

}  // namespace

long double ExactPmfTable::total() const { return compensated(entries); }

long double ExactPmfTable::edge_marginal(std::size_t l) const {
    std::vector<long double> picked;
    for (std::size_t k = 0; k < entries.size(); ++k)
        if ((k >> l) & 1U)
            picked.push_back(entries[k]);
    return compensated(picked);
}

EdgeVector configuration(std::size_t code, std::size_t edges) {
    EdgeVector a(edges);
    for (std::size_t l = 0; l < edges; ++l)
        a[l] = static_cast<std::uint8_t>((code >> l) & 1U);
    return a;
}

ExactPmfTable enumerate_pmf(const MixtureParameters& params, std::optional<int> y) {
    const std::size_t V = checked_nodes(params);
    const auto pi = component_probabilities(params);
    std::vector<long double> w(pi.size());
    for (std::size_t h = 0; h < pi.size(); ++h) {
        const auto hh = static_cast<Eigen::Index>(h);
        if (!y)
            w[h] = (1.0L - params.pY1) * params.nu0[hh] + static_cast<long double>(params.pY1) * params.nu1[hh];
        else
            w[h] = *y == 0 ? params.nu0[hh] : params.nu1[hh];
    }
    return mixture_table(pi, w, V);
}

ExactPmfTable enumerate_component_pmf(const MixtureParameters& params, std::size_t h) {
    const std::size_t V = checked_nodes(params);
    const auto pi = component_probabilities(params);
    return mixture_table({pi.at(h)}, {1.0L}, V);
}

Eigen::VectorXd exact_cramers_v(const MixtureParameters& params) {
    const ExactPmfTable cond[2] = {enumerate_pmf(params, 0), enumerate_pmf(params, 1)};
    const long double py[2] = {1.0L - params.pY1, params.pY1};
    const std::size_t L = cond[0].edges;
    Eigen::VectorXd rho(static_cast<Eigen::Index>(L));
    for (std::size_t l = 0; l < L; ++l) {
        // joint p(y, a_l) by marginalizing the enumerated tables
        long double joint[2][2];
        for (int y = 0; y < 2; ++y) {
            const long double present = cond[y].edge_marginal(l);
            const long double all = cond[y].total();
            joint[y][1] = py[y] * present;
            joint[y][0] = py[y] * (all - present);
        }
        const long double marg[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
        long double rho2 = 0.0L;
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a) {
                if (marg[a] <= 0.0L)
                    continue;
                const long double d = joint[y][a] / py[y] - marg[a];
                rho2 += py[y] * d * d / marg[a];
            }
        rho[static_cast<Eigen::Index>(l)] = static_cast<double>(std::sqrt(rho2));
    }
    return rho;
}

}  // namespace netmix::oracle
