#include "netmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/crc.hpp>
#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "netmix/polya_gamma.hpp"

namespace netmix {

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
                fn(i);
        });
}

struct ComponentSums {
    Eigen::MatrixXd omega;  // H x L, sum of omega over subjects in h
    Eigen::MatrixXd kappa;  // H x L, sum of (a - 1/2) over subjects in h
    std::vector<std::size_t> counts;
};

ComponentSums component_sums(const AugmentedState& state, const ChainData& data) {
    const auto H = static_cast<Eigen::Index>(state.params.mixture_size());
    const auto L = static_cast<Eigen::Index>(data.edges());
    ComponentSums s{Eigen::MatrixXd::Zero(H, L), Eigen::MatrixXd::Zero(H, L),
                    std::vector<std::size_t>(static_cast<std::size_t>(H), 0)};
    for (std::size_t i = 0; i < data.subjects(); ++i) {
        const auto h = state.assignments[i];
        s.omega.row(h) += state.omega.row(static_cast<Eigen::Index>(i));
        s.kappa.row(h).array() += data.edge_matrix().row(static_cast<Eigen::Index>(i)).array() - 0.5;
        ++s.counts[static_cast<std::size_t>(h)];
    }
    return s;
}

std::vector<std::size_t> group_counts(const AugmentedState& state, const ChainData& data, int y) {
    std::vector<std::size_t> counts(state.params.mixture_size(), 0);
    for (std::size_t i = 0; i < data.subjects(); ++i)
        if (data.label(i) == y)
            ++counts[static_cast<std::size_t>(state.assignments[i])];
    return counts;
}

// n x H matrix of component log-likelihoods: sum_l log(1 - pi_hl) + a_i . S_h
Eigen::MatrixXd component_log_likelihoods(const Eigen::MatrixXd& S, const ChainData& data) {
    Eigen::VectorXd base(S.rows());
    for (Eigen::Index h = 0; h < S.rows(); ++h) {
        double c = 0.0;
        for (Eigen::Index l = 0; l < S.cols(); ++l)
            c += log_logistic(-S(h, l));
        base[h] = c;
    }
    Eigen::MatrixXd ll = data.edge_matrix() * S.transpose();
    ll.rowwise() += base.transpose();
    return ll;
}

}  // namespace

void SamplerConfig::validate() const {
    if (thin < 1)
        throw std::invalid_argument("sampler thin must be at least 1");
    if (burn_in >= n_iter)
        throw std::invalid_argument(
            fmt::format("sampler burn_in ({}) must be smaller than n_iter ({})", burn_in, n_iter));
    if (kept() < 1)
        throw std::invalid_argument("sampler schedule keeps no draws");
}

std::uint32_t data_checksum(const std::vector<NetworkObservation>& subjects) {
    boost::crc_32_type crc;
    auto put_u64 = [&](std::uint64_t x) {
        unsigned char b[8];
        for (int k = 0; k < 8; ++k)
            b[k] = static_cast<unsigned char>(x >> (8 * k));
        crc.process_bytes(b, 8);
    };
    put_u64(subjects.empty() ? 0 : subjects.front().edges.size());
    put_u64(subjects.size());
    for (const auto& s : subjects) {
        const auto label = static_cast<unsigned char>(s.label);
        crc.process_bytes(&label, 1);
        crc.process_bytes(s.edges.data(), s.edges.size());
    }
    return crc.checksum();
}

ChainData::ChainData(const std::vector<NetworkObservation>& subjects)
    : map_(subjects.empty() ? throw std::invalid_argument("no subjects in data")
                            : EdgeIndexMap::nodes_for_edges(subjects.front().edges.size())) {
    fill(subjects);
}

ChainData::ChainData(const std::vector<NetworkObservation>& subjects, std::size_t nodes) : map_(nodes) {
    fill(subjects);
}

void ChainData::fill(const std::vector<NetworkObservation>& subjects) {
    const auto L = map_.edges();
    matrix_.resize(static_cast<Eigen::Index>(subjects.size()), static_cast<Eigen::Index>(L));
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const auto& s = subjects[i];
        if (s.edges.size() != L)
            throw std::invalid_argument(fmt::format("subject {} has {} edges, expected {} (V = {})",
                                                    s.subject_id, s.edges.size(), L, map_.nodes()));
        if (s.label != 0 && s.label != 1)
            throw std::invalid_argument(fmt::format("subject {} has label {}", s.subject_id, s.label));
        for (std::size_t l = 0; l < L; ++l) {
            if (s.edges[l] > 1)
                throw std::invalid_argument(fmt::format("subject {} has non-binary edge {}", s.subject_id, l));
            matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = s.edges[l];
        }
        raw_.push_back(s.edges);
        labels_.push_back(s.label);
        (s.label == 0 ? n0_ : n1_) += 1;
    }
    checksum_ = data_checksum(subjects);
}

Eigen::MatrixXd similarity_matrix(const MixtureParameters& params, const EdgeIndexMap& map) {
    Eigen::MatrixXd S(static_cast<Eigen::Index>(params.mixture_size()), static_cast<Eigen::Index>(map.edges()));
    for (std::size_t h = 0; h < params.mixture_size(); ++h)
        S.row(static_cast<Eigen::Index>(h)) = component_similarity(params.Z, params.components[h], map).transpose();
    return S;
}

AugmentedState initial_state(const ChainData& data, const HyperParameters& hyper, Rng& rng) {
    HyperParameters h = hyper;
    h.V = data.map().nodes();
    PriorDraw d = sample_prior(h, rng);
    AugmentedState s{std::move(d.params), std::move(d.theta), {}, {}};
    s.assignments.resize(data.subjects());
    std::vector<double> log_nu(s.params.mixture_size());
    for (std::size_t i = 0; i < data.subjects(); ++i) {
        const auto& nu = s.params.nu(data.label(i));
        for (std::size_t k = 0; k < log_nu.size(); ++k)
            log_nu[k] = std::log(nu[static_cast<Eigen::Index>(k)]);
        s.assignments[i] = static_cast<int>(categorical_log(rng, log_nu));
    }
    s.omega = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.subjects()),
                                    static_cast<Eigen::Index>(data.edges()));
    return s;
}

void update_assignments(AugmentedState& state, const ChainData& data, Rng& rng, unsigned threads) {
    const std::uint64_t key = rng();
    const std::size_t H = state.params.mixture_size();
    if (data.subjects() == 0)
        return;
    const Eigen::MatrixXd ll = component_log_likelihoods(similarity_matrix(state.params, data.map()), data);
    Eigen::MatrixXd log_nu(static_cast<Eigen::Index>(H), 2);
    log_nu.col(0) = state.params.nu0.array().log();
    log_nu.col(1) = state.params.nu1.array().log();
    parallel_for(data.subjects(), threads, [&](std::size_t i) {
        std::vector<double> w(H);
        const int y = data.label(i);
        for (std::size_t h = 0; h < H; ++h)
            w[h] = log_nu(static_cast<Eigen::Index>(h), y) + ll(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
        Rng sub = substream(key, i);
        state.assignments[i] = static_cast<int>(categorical_log(sub, w));
    });
}

void update_omega(AugmentedState& state, const ChainData& data, Rng& rng, unsigned threads) {
    const std::uint64_t key = rng();
    const Eigen::MatrixXd S = similarity_matrix(state.params, data.map());
    state.omega.resize(static_cast<Eigen::Index>(data.subjects()), static_cast<Eigen::Index>(data.edges()));
    parallel_for(data.subjects(), threads, [&](std::size_t i) {
        Rng sub = substream(key, i);
        const auto row = S.row(state.assignments[i]);
        for (Eigen::Index l = 0; l < S.cols(); ++l)
            state.omega(static_cast<Eigen::Index>(i), l) = polya_gamma_draw(row[l], sub);
    });
}

void update_Z(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng) {
    auto& p = state.params;
    const auto sums = component_sums(state, data);
    Eigen::MatrixXd D = similarity_matrix(p, data.map());
    D.rowwise() -= p.Z.transpose();
    const double prior_prec = 1.0 / hyper.z_var;
    for (Eigen::Index l = 0; l < p.Z.size(); ++l) {
        const double prec = prior_prec + sums.omega.col(l).sum();
        const double b = sums.kappa.col(l).sum() - sums.omega.col(l).dot(D.col(l)) + hyper.z_mean * prior_prec;
        p.Z[l] = b / prec + std_normal(rng) / std::sqrt(prec);
    }
}

void update_factors(AugmentedState& state, const ChainData& data, const HyperParameters& hyper,
                    Rng& rng) {
    auto& p = state.params;
    const auto& map = data.map();
    const auto V = static_cast<Eigen::Index>(map.nodes());
    const auto R = static_cast<Eigen::Index>(p.rank());
    const auto sums = component_sums(state, data);

    for (std::size_t h = 0; h < p.mixture_size(); ++h) {
        auto& comp = p.components[h];
        auto& theta = state.theta[h];
        const auto hh = static_cast<Eigen::Index>(h);

        // scaled coordinates: column r has prior precision tau_r = 1 / lambda_r
        Eigen::VectorXd log_tau(R);
        double acc = 0.0;
        for (Eigen::Index r = 0; r < R; ++r) {
            acc += std::log(theta[r]);
            log_tau[r] = acc;
        }
        Eigen::MatrixXd Xs = comp.X;
        for (Eigen::Index r = 0; r < R; ++r)
            Xs.col(r) *= std::exp(-0.5 * log_tau[r]);

        // pseudo-response and weight of each edge for this component
        const Eigen::VectorXd w = sums.omega.row(hh).transpose();
        const Eigen::VectorXd target = sums.kappa.row(hh).transpose() - w.cwiseProduct(p.Z);

        Eigen::MatrixXd prec(R, R);
        Eigen::VectorXd b(R), xi(R);
        for (Eigen::Index v = 0; v < V; ++v) {
            prec.setZero();
            prec.diagonal() = log_tau.array().exp().matrix();
            b.setZero();
            for (Eigen::Index u = 0; u < V; ++u) {
                if (u == v)
                    continue;
                const auto l = static_cast<Eigen::Index>(
                    u < v ? map.index(static_cast<std::size_t>(v), static_cast<std::size_t>(u))
                          : map.index(static_cast<std::size_t>(u), static_cast<std::size_t>(v)));
                const auto xu = Xs.row(u).transpose();
                if (w[l] != 0.0)
                    prec.selfadjointView<Eigen::Lower>().rankUpdate(xu, w[l]);
                b += target[l] * xu;
            }
            const Eigen::LLT<Eigen::MatrixXd> llt(prec);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error(fmt::format("factor precision not positive definite (component {}, node {})", h, v));
            for (Eigen::Index r = 0; r < R; ++r)
                xi[r] = std_normal(rng);
            Xs.row(v) = (llt.solve(b) + llt.matrixU().solve(xi)).transpose();
        }

        // multiplicative gamma auxiliaries, one at a time
        Eigen::VectorXd col_sq = Xs.colwise().squaredNorm().transpose();
        Eigen::VectorXd log_theta = theta.array().log().matrix();
        for (Eigen::Index m = 0; m < R; ++m) {
            const double shape = (m == 0 ? hyper.mig_a1 : hyper.mig_a2) +
                                 0.5 * static_cast<double>(V) * static_cast<double>(R - m);
            double rate = 1.0;
            double partial = 0.0;  // log tau_r without the m-th factor
            for (Eigen::Index r = 0; r < R; ++r) {
                if (r != m)
                    partial += log_theta[r];
                if (r >= m)
                    rate += 0.5 * std::exp(partial) * col_sq[r];
            }
            log_theta[m] = log_gamma_variate(rng, shape) - std::log(rate);
        }
        theta = log_theta.array().exp().matrix();
        comp.lambda = mig_weights(theta);
        acc = 0.0;
        for (Eigen::Index r = 0; r < R; ++r) {
            acc += log_theta[r];
            Xs.col(r) *= std::exp(0.5 * acc);
        }
        comp.X = std::move(Xs);
    }
}

double log_dirichlet_multinomial(std::span<const std::size_t> counts, double concentration) {
    const double H = static_cast<double>(counts.size());
    double N = 0.0;
    double out = 0.0;
    for (auto c : counts) {
        N += static_cast<double>(c);
        out += std::lgamma(static_cast<double>(c) + concentration) - std::lgamma(concentration);
    }
    return out + std::lgamma(H * concentration) - std::lgamma(N + H * concentration);
}

double posterior_prob_T1(std::span<const std::size_t> counts0, std::span<const std::size_t> counts1,
                         double concentration, double prior_T1) {
    if (counts0.size() != counts1.size())
        throw std::invalid_argument("count vectors differ in length");
    if (prior_T1 <= 0.0)
        return 0.0;
    if (prior_T1 >= 1.0)
        return 1.0;
    std::vector<std::size_t> pooled(counts0.size());
    for (std::size_t h = 0; h < pooled.size(); ++h)
        pooled[h] = counts0[h] + counts1[h];
    const double log_odds = std::log(prior_T1) - std::log1p(-prior_T1) +
                            log_dirichlet_multinomial(counts0, concentration) +
                            log_dirichlet_multinomial(counts1, concentration) -
                            log_dirichlet_multinomial(pooled, concentration);
    return logistic(log_odds);
}

void update_weights_and_T(AugmentedState& state, const ChainData& data, const HyperParameters& hyper,
                          Rng& rng) {
    auto& p = state.params;
    const auto c0 = group_counts(state, data, 0);
    const auto c1 = group_counts(state, data, 1);
    const double conc = hyper.concentration();
    const double pr1 = posterior_prob_T1(c0, c1, conc, hyper.prior_T1);
    p.T = uniform_open(rng) < pr1 ? 1 : 0;
    const auto H = static_cast<Eigen::Index>(c0.size());
    Eigen::VectorXd a0(H), a1(H);
    for (Eigen::Index h = 0; h < H; ++h) {
        a0[h] = conc + static_cast<double>(c0[static_cast<std::size_t>(h)]);
        a1[h] = conc + static_cast<double>(c1[static_cast<std::size_t>(h)]);
    }
    if (p.T == 1) {
        p.nu0 = dirichlet(rng, a0);
        p.nu1 = dirichlet(rng, a1);
    } else {
        p.nu0 = dirichlet(rng, (a0 + a1).array() - conc);
        p.nu1 = p.nu0;
    }
}

void update_pY(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng) {
    state.params.pY1 = beta_variate(rng, hyper.a1 + static_cast<double>(data.group_size(1)),
                                    hyper.a0 + static_cast<double>(data.group_size(0)));
}

void sweep(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng,
           unsigned threads) {
    // omega is drawn right after the assignments it depends on
    update_assignments(state, data, rng, threads);
    update_omega(state, data, rng, threads);
    update_Z(state, data, hyper, rng);
    update_factors(state, data, hyper, rng);
    update_weights_and_T(state, data, hyper, rng);
    update_pY(state, data, hyper, rng);
}

double log_joint(const AugmentedState& state, const ChainData& data, const HyperParameters& hyper) {
    const auto& p = state.params;
    double total = log_prior_density(p, state.theta, hyper);
    if (data.subjects() == 0)
        return total;
    const Eigen::MatrixXd ll = component_log_likelihoods(similarity_matrix(p, data.map()), data);
    for (std::size_t i = 0; i < data.subjects(); ++i) {
        const int y = data.label(i);
        const auto h = static_cast<Eigen::Index>(state.assignments[i]);
        total += std::log(p.p_group(y)) + std::log(p.nu(y)[h]) + ll(static_cast<Eigen::Index>(i), h);
    }
    return total;
}

PosteriorDraws run_chain(const std::vector<NetworkObservation>& data, HyperParameters hyper,
                         const SamplerConfig& config) {
    config.validate();
    const ChainData chain_data(data);
    if (hyper.V != 0 && hyper.V != chain_data.map().nodes())
        throw std::invalid_argument(
            fmt::format("hyperparameters expect V = {}, data has V = {}", hyper.V, chain_data.map().nodes()));
    hyper.V = chain_data.map().nodes();
    hyper.validate();

    PosteriorDraws out;
    out.meta.hyper = hyper;
    out.meta.config = config;
    out.meta.nodes = hyper.V;
    out.meta.subjects = chain_data.subjects();
    out.meta.n0 = chain_data.group_size(0);
    out.meta.n1 = chain_data.group_size(1);
    out.meta.data_checksum = chain_data.checksum();
    out.log_joint_trace.reserve(config.n_iter);
    out.draws.reserve(config.kept());

    Rng rng(config.seed);
    AugmentedState state = initial_state(chain_data, hyper, rng);
    for (std::size_t t = 0; t < config.n_iter; ++t) {
        sweep(state, chain_data, hyper, rng, config.threads);
        out.log_joint_trace.push_back(log_joint(state, chain_data, hyper));
        if (t >= config.burn_in && (t - config.burn_in + 1) % config.thin == 0) {
            DrawSnapshot snap{t + 1, state.params, state.theta, state.assignments, {}};
            if (config.record_pi)
                snap.pi = similarity_matrix(state.params, chain_data.map()).unaryExpr(
                    [](double s) { return logistic(s); });
            out.draws.push_back(std::move(snap));
        }
    }
    return out;
}

}  // namespace netmix
