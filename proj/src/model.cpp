// Copyright (c) 2026 the seqmult authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqmult/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqmult/threading.hpp"

namespace seqmult {

void HierarchicalPrior::validate() const {
    const int p = dim();
    if (p < 1) throw ValidationError("prior: alpha must have at least one coordinate");
    if (psi.dim() != p || psi_p.dim() != p)
        throw ValidationError("prior: psi and psi_p must be " + std::to_string(p) + "-dimensional");
    // Propriety for the (C-1)-dimensional inverse Wishart: dof > C-2.
    if (!(nu > p - 1.0) || !(nu_p > p - 1.0))
        throw ValidationError("prior: nu and nu_p must exceed C-2 for propriety");
}

HierarchicalPrior default_prior(int categories) {
    if (categories < 2) throw ValidationError("default_prior needs C >= 2");
    Vector uniform(static_cast<std::size_t>(categories),
                   1.0 / static_cast<double>(categories));
    HierarchicalPrior prior;
    prior.alpha = asymptotic_mean(uniform);
    prior.psi = SpdMatrix::identity(categories - 1);
    prior.psi_p = SpdMatrix::identity(categories - 1);
    prior.nu = 5.0;
    prior.nu_p = 5.0;
    return prior;
}

HierarchicalPrior prior_from_shares(const Vector& shares, double nu, double nu_p) {
    if (shares.size() < 2) throw ValidationError("prior shares need C >= 2");
    double total = 0.0;
    for (double s : shares) {
        if (s < 0.0) throw ValidationError("prior shares must be nonnegative");
        total += s;
    }
    if (total <= 0.0) throw ValidationError("prior shares must have positive mass");
    Vector p(shares);
    for (double& v : p) v /= total;
    HierarchicalPrior prior;
    prior.alpha = asymptotic_mean(p);
    prior.psi = SpdMatrix::identity(static_cast<int>(shares.size()) - 1);
    prior.psi_p = SpdMatrix::identity(static_cast<int>(shares.size()) - 1);
    prior.nu = nu;
    prior.nu_p = nu_p;
    return prior;
}

void GibbsConfig::validate() const {
    if (n_chains < 2) throw ValidationError("gibbs: at least 2 chains required");
    if (thin < 1) throw ValidationError("gibbs: thin must be >= 1");
    if (!(gr_threshold > 1.0)) throw ValidationError("gibbs: gr_threshold must exceed 1");
    if (burn_in < 0 || max_iters < 1 || n_samples < 1 || check_interval < 1)
        throw ValidationError("gibbs: nonpositive iteration setting");
}

std::vector<PosteriorDraw> ChainSet::pooled() const {
    std::vector<PosteriorDraw> out;
    std::size_t total = 0;
    for (const auto& c : chains) total += c.size();
    out.reserve(total);
    for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
    return out;
}

SpdMatrix sample_sigma_cond(const Vector& mu, const std::vector<TransformedObs>& data,
                            const HierarchicalPrior& prior, RngStream& rng) {
    Matrix scale = prior.psi.raw();
    for (const TransformedObs& obs : data) {
        const double w = static_cast<double>(obs.n) + 0.5;
        const Vector r = obs.L - mu;
        scale += w * outer(r, r);
    }
    return sample_inverse_wishart(SpdMatrix(symmetrize(scale), "Sigma conditional scale"),
                                  prior.nu + static_cast<double>(data.size()), rng);
}

SpdMatrix sample_sigma_p_cond(const Vector& mu, const HierarchicalPrior& prior, RngStream& rng) {
    const Vector r = mu - prior.alpha;
    Matrix scale = prior.psi_p.raw() + outer(r, r);
    return sample_inverse_wishart(SpdMatrix(symmetrize(scale), "Sigma_p conditional scale"),
                                  prior.nu_p + 1.0, rng);
}

MuCondParams mu_cond_params(const SpdMatrix& sigma, const SpdMatrix& sigma_p,
                            const std::vector<TransformedObs>& data,
                            const HierarchicalPrior& prior) {
    const Matrix sigma_p_inv = spd_inverse(sigma_p.raw(), "Sigma_p");
    const Matrix sigma_inv = spd_inverse(sigma.raw(), "Sigma");
    double sw = 0.0;
    Vector swl(static_cast<std::size_t>(prior.dim()), 0.0);
    for (const TransformedObs& obs : data) {
        const double w = static_cast<double>(obs.n) + 0.5;
        sw += w;
        swl = swl + w * obs.L;
    }
    Matrix v = sigma_p_inv + sw * sigma_inv;
    const Vector b = matvec(sigma_p_inv, prior.alpha) + matvec(sigma_inv, swl);
    const Matrix vchol = cholesky(symmetrize(v), "V_j");
    MuCondParams out;
    out.mean = chol_solve(vchol, b);
    out.cov = chol_inverse(vchol);
    return out;
}

Vector sample_mu_cond(const SpdMatrix& sigma, const SpdMatrix& sigma_p,
                      const std::vector<TransformedObs>& data, const HierarchicalPrior& prior,
                      RngStream& rng) {
    const Matrix sigma_p_inv = spd_inverse(sigma_p.raw(), "Sigma_p");
    const Matrix sigma_inv = spd_inverse(sigma.raw(), "Sigma");
    double sw = 0.0;
    Vector swl(static_cast<std::size_t>(prior.dim()), 0.0);
    for (const TransformedObs& obs : data) {
        const double w = static_cast<double>(obs.n) + 0.5;
        sw += w;
        swl = swl + w * obs.L;
    }
    Matrix v = sigma_p_inv + sw * sigma_inv;
    const Vector b = matvec(sigma_p_inv, prior.alpha) + matvec(sigma_inv, swl);
    const Matrix vchol = cholesky(symmetrize(v), "V_j");
    const Vector mean = chol_solve(vchol, b);
    // x = mean + L^{-T} z has covariance V^{-1}.
    Vector z(mean.size());
    for (double& zi : z) zi = rng.normal01();
    return mean + back_solve_transposed(vchol, z);
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
    const std::size_t m = chains.size();
    if (m < 2) throw ValidationError("gelman_rubin needs at least 2 chains");
    const std::size_t len = chains[0].size();
    if (len < 10) throw ValidationError("gelman_rubin needs chains of length >= 10");
    for (const auto& c : chains)
        if (c.size() != len) throw ValidationError("gelman_rubin needs equal-length chains");

    Vector means(m, 0.0);
    Vector vars(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (double x : chains[i]) s += x;
        means[i] = s / static_cast<double>(len);
        double ss = 0.0;
        for (double x : chains[i]) ss += (x - means[i]) * (x - means[i]);
        vars[i] = ss / static_cast<double>(len - 1);
    }
    double w = 0.0;
    for (double v : vars) w += v;
    w /= static_cast<double>(m);

    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b_over_l = 0.0;
    for (double mu : means) b_over_l += (mu - grand) * (mu - grand);
    b_over_l /= static_cast<double>(m - 1);

    if (w == 0.0) {
        if (b_over_l == 0.0) return 1.0;
        return std::numeric_limits<double>::infinity();
    }
    const double ld = static_cast<double>(len);
    return std::sqrt(((ld - 1.0) / ld * w + b_over_l) / w);
}

namespace {

// Weighted sufficient statistics of the transformed data; the Sigma scale
// matrix is rebuilt per iteration from the centered form
//   sum w (L-mu)(L-mu)' = M0 + sw (Lbar-mu)(Lbar-mu)'.
struct SuffStats {
    int j = 0;
    double sw = 0.0;
    Vector swl;
    Vector lbar;
    Matrix m0;
};

SuffStats make_suffstats(const std::vector<TransformedObs>& data, int p) {
    SuffStats s;
    s.j = static_cast<int>(data.size());
    s.swl.assign(static_cast<std::size_t>(p), 0.0);
    s.m0 = Matrix(p);
    for (const TransformedObs& obs : data) {
        const double w = static_cast<double>(obs.n) + 0.5;
        s.sw += w;
        s.swl = s.swl + w * obs.L;
    }
    s.lbar = s.sw > 0.0 ? (1.0 / s.sw) * s.swl : Vector(static_cast<std::size_t>(p), 0.0);
    for (const TransformedObs& obs : data) {
        const double w = static_cast<double>(obs.n) + 0.5;
        const Vector r = obs.L - s.lbar;
        s.m0 += w * outer(r, r);
    }
    return s;
}

struct ChainState {
    RngStream rng;
    Vector mu;
    Matrix sigma;
    Matrix sigma_p;
    // Monitored scalar histories (mu coordinates then log Sigma diagonal).
    std::vector<std::vector<double>> monitor;
    std::vector<PosteriorDraw> collected;

    explicit ChainState(RngStream r) : rng(std::move(r)) {}
};

class GibbsKernel {
public:
    GibbsKernel(const HierarchicalPrior& prior, const SuffStats& stats)
        : prior_(prior), stats_(stats), p_(prior.dim()),
          psi_p_mean_chol_(make_init_mu_cov(prior)) {}

    void init_chain(ChainState& c) const {
        c.mu = sample_mvn_chol(prior_.alpha, psi_p_mean_chol_, c.rng);
        c.sigma = sample_inverse_wishart(prior_.psi, prior_.nu, c.rng).raw();
        c.sigma_p = sample_inverse_wishart(prior_.psi_p, prior_.nu_p, c.rng).raw();
    }

    // One sweep in the fixed order mu -> Sigma -> Sigma_p.
    void sweep(ChainState& c) const {
        update_mu(c);
        update_sigma(c);
        update_sigma_p(c);
    }

    int monitored_scalars() const { return 2 * p_; }

    void record_monitor(ChainState& c) const {
        for (int k = 0; k < p_; ++k) c.monitor[static_cast<std::size_t>(k)].push_back(c.mu[static_cast<std::size_t>(k)]);
        for (int k = 0; k < p_; ++k)
            c.monitor[static_cast<std::size_t>(p_ + k)].push_back(std::log(c.sigma(k, k)));
    }

private:
    static Matrix make_init_mu_cov(const HierarchicalPrior& prior) {
        const int p = prior.dim();
        // Prior mean of Sigma_p when it exists, otherwise psi_p itself.
        Matrix cov = prior.psi_p.raw();
        if (prior.nu_p > p + 1.0) cov *= 1.0 / (prior.nu_p - p - 1.0);
        return cholesky(cov, "initial mu covariance");
    }

    void update_mu(ChainState& c) const {
        const Matrix sigma_p_inv = spd_inverse(c.sigma_p, "Sigma_p");
        const Matrix sigma_inv = spd_inverse(c.sigma, "Sigma");
        Matrix v = sigma_p_inv + stats_.sw * sigma_inv;
        const Vector b = matvec(sigma_p_inv, prior_.alpha) + matvec(sigma_inv, stats_.swl);
        const Matrix vchol = cholesky(symmetrize(v), "V_j");
        const Vector mean = chol_solve(vchol, b);
        Vector z(static_cast<std::size_t>(p_));
        for (double& zi : z) zi = c.rng.normal01();
        c.mu = mean + back_solve_transposed(vchol, z);
    }

    void update_sigma(ChainState& c) const {
        const Vector r = stats_.lbar - c.mu;
        Matrix scale = prior_.psi.raw() + stats_.m0 + stats_.sw * outer(r, r);
        c.sigma = sample_inverse_wishart(SpdMatrix(symmetrize(scale), "Sigma conditional scale"),
                                         prior_.nu + static_cast<double>(stats_.j), c.rng)
                      .raw();
    }

    void update_sigma_p(ChainState& c) const {
        const Vector r = c.mu - prior_.alpha;
        Matrix scale = prior_.psi_p.raw() + outer(r, r);
        c.sigma_p = sample_inverse_wishart(SpdMatrix(symmetrize(scale), "Sigma_p conditional scale"),
                                           prior_.nu_p + 1.0, c.rng)
                        .raw();
    }

    const HierarchicalPrior& prior_;
    const SuffStats& stats_;
    int p_;
    Matrix psi_p_mean_chol_;
};

} // namespace

ChainSet run_gibbs(const std::vector<TransformedObs>& data, const HierarchicalPrior& prior,
                   const GibbsConfig& config, const RngStream& rng) {
    prior.validate();
    config.validate();
    const int p = prior.dim();
    for (const TransformedObs& obs : data)
        if (static_cast<int>(obs.L.size()) != p)
            throw ValidationError("run_gibbs: transformed observation dimension mismatch");

    const SuffStats stats = make_suffstats(data, p);
    const GibbsKernel kernel(prior, stats);

    std::vector<ChainState> chains;
    chains.reserve(static_cast<std::size_t>(config.n_chains));
    for (int c = 0; c < config.n_chains; ++c) {
        chains.emplace_back(rng.derive(static_cast<std::uint64_t>(c)));
        chains.back().monitor.resize(static_cast<std::size_t>(kernel.monitored_scalars()));
    }

    parallel_for(config.n_chains, [&](int c) {
        ChainState& chain = chains[static_cast<std::size_t>(c)];
        kernel.init_chain(chain);
        for (int it = 0; it < config.burn_in; ++it) kernel.sweep(chain);
    });

    ChainSet result;
    long iters = config.burn_in;
    bool converged = false;
    std::vector<double> rhats;
    while (!converged) {
        if (iters + config.check_interval > config.max_iters) {
            throw ConvergenceError(
                "Gibbs sampler did not converge within " + std::to_string(config.max_iters) +
                    " iterations (worst R-hat " +
                    std::to_string(rhats.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                 : *std::max_element(rhats.begin(), rhats.end())) +
                    ")",
                rhats);
        }
        parallel_for(config.n_chains, [&](int c) {
            ChainState& chain = chains[static_cast<std::size_t>(c)];
            for (int it = 0; it < config.check_interval; ++it) {
                kernel.sweep(chain);
                if ((it + 1) % config.thin == 0) kernel.record_monitor(chain);
            }
        });
        iters += config.check_interval;

        rhats.clear();
        converged = true;
        for (int k = 0; k < kernel.monitored_scalars(); ++k) {
            std::vector<std::vector<double>> scalar_chains;
            scalar_chains.reserve(chains.size());
            for (const ChainState& chain : chains)
                scalar_chains.push_back(chain.monitor[static_cast<std::size_t>(k)]);
            const double r = gelman_rubin(scalar_chains);
            rhats.push_back(r);
            if (!(r < config.gr_threshold)) converged = false;
        }
        result.rhat_history.emplace_back(iters, rhats);
    }
    result.rhat_final = rhats;
    result.convergence_iteration = iters;

    // Collection phase: only draws taken after the gate opened are returned.
    const int keep_per_chain =
        (config.n_samples + config.n_chains - 1) / config.n_chains;
    parallel_for(config.n_chains, [&](int c) {
        ChainState& chain = chains[static_cast<std::size_t>(c)];
        chain.collected.reserve(static_cast<std::size_t>(keep_per_chain));
        for (int k = 0; k < keep_per_chain; ++k) {
            for (int it = 0; it < config.thin; ++it) kernel.sweep(chain);
            chain.collected.push_back(PosteriorDraw{
                chain.mu, SpdMatrix(chain.sigma, "Sigma draw"),
                SpdMatrix(chain.sigma_p, "Sigma_p draw")});
        }
    });
    result.iterations_run = iters + static_cast<long>(keep_per_chain) * config.thin;

    result.chains.reserve(chains.size());
    for (ChainState& chain : chains) result.chains.push_back(std::move(chain.collected));
    return result;
}

ChainSet run_gibbs(const BatchSeries& series, int upto, const HierarchicalPrior& prior,
                   const GibbsConfig& config, const RngStream& rng) {
    if (upto < 1 || upto > series.rounds())
        throw ValidationError("run_gibbs: round prefix out of range");
    std::vector<TransformedObs> data;
    data.reserve(static_cast<std::size_t>(upto));
    for (int j = 0; j < upto; ++j) data.push_back(transform(series.round(j), config.vst_a));
    return run_gibbs(data, prior, config, rng);
}

} // namespace seqmult
