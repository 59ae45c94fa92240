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

#include "seqmult/vst.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace seqmult {

TransformedObs transform(const std::vector<long long>& counts, long long n, double a) {
    const int c = static_cast<int>(counts.size());
    if (c < 2) throw ValidationError("transform needs at least 2 categories");
    if (!(a > 0.0)) throw ValidationError("transform constant a must be positive");
    long long total = 0;
    for (long long x : counts) total += x;
    if (total != n)
        throw ValidationError("inconsistent batch: counts sum to " + std::to_string(total) +
                              " but n is " + std::to_string(n));
    const double denom = 1.0 + 2.0 * a / static_cast<double>(n);
    TransformedObs obs;
    obs.n = n;
    obs.a = a;
    obs.L.resize(static_cast<std::size_t>(c - 1));
    for (int i = 0; i < c - 1; ++i) {
        const double phat = static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                            static_cast<double>(n);
        double arg = (2.0 * phat - 1.0) / denom;
        // |2 phat - 1| <= 1 < denom when a > 0, so the argument is interior.
        assert(arg > -1.0 && arg < 1.0);
        arg = std::clamp(arg, -1.0, 1.0);
        obs.L[static_cast<std::size_t>(i)] = std::asin(arg);
    }
    return obs;
}

TransformedObs transform(const Round& round, double a) {
    return transform(round.counts, round.n, a);
}

Vector inverse_transform(const TransformedObs& obs) {
    const std::size_t cm1 = obs.L.size();
    const double denom = 1.0 + 2.0 * obs.a / static_cast<double>(obs.n);
    Vector p(cm1 + 1, 0.0);
    bool clamped = false;
    double head = 0.0;
    for (std::size_t i = 0; i < cm1; ++i) {
        double v = 0.5 * (1.0 + denom * std::sin(obs.L[i]));
        if (v < 0.0 || v > 1.0) {
            clamped = true;
            v = std::clamp(v, 0.0, 1.0);
        }
        p[i] = v;
        head += v;
    }
    if (head <= 1.0) {
        p[cm1] = 1.0 - head;
    } else {
        clamped = true;
        p[cm1] = 0.0;
    }
    if (clamped) {
        double total = 0.0;
        for (double v : p) total += v;
        if (total <= 0.0) {
            // All of the mass was clamped away; fall back to the last cell.
            p.assign(cm1 + 1, 0.0);
            p[cm1] = 1.0;
        } else if (total > 1.0) {
            for (double& v : p) v /= total;
        }
    }
    return p;
}

Vector asymptotic_mean(const Vector& p) {
    if (p.size() < 2) throw ValidationError("asymptotic_mean needs a simplex vector, C >= 2");
    Vector mu(p.size() - 1);
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        mu[i] = std::asin(std::clamp(2.0 * p[i] - 1.0, -1.0, 1.0));
    return mu;
}

namespace {

void require_interior(const Vector& p, const char* who) {
    for (double v : p)
        if (!(v > 0.0 && v < 1.0))
            throw ValidationError(std::string(who) + " requires p strictly inside the simplex");
}

} // namespace

SpdMatrix limiting_corr_iid(const Vector& p) {
    if (p.size() < 2) throw ValidationError("limiting_corr_iid needs C >= 2");
    require_interior(p, "limiting_corr_iid");
    const int cm1 = static_cast<int>(p.size()) - 1;
    Matrix m(cm1);
    for (int i = 0; i < cm1; ++i) {
        m(i, i) = 1.0;
        for (int j = 0; j < i; ++j) {
            const double pi = p[static_cast<std::size_t>(i)];
            const double pj = p[static_cast<std::size_t>(j)];
            const double v = -std::sqrt(pi * pj / ((1.0 - pi) * (1.0 - pj)));
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return SpdMatrix(m, "limiting correlation");
}

SpdMatrix multinomial_cov_iid(const Vector& p) {
    if (p.size() < 2) throw ValidationError("multinomial_cov_iid needs C >= 2");
    require_interior(p, "multinomial_cov_iid");
    const int cm1 = static_cast<int>(p.size()) - 1;
    Matrix m(cm1);
    for (int i = 0; i < cm1; ++i) {
        const double pi = p[static_cast<std::size_t>(i)];
        m(i, i) = pi * (1.0 - pi);
        for (int j = 0; j < i; ++j) {
            const double v = -pi * p[static_cast<std::size_t>(j)];
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return SpdMatrix(m, "multinomial covariance");
}

Matrix extend_eps_cov(const SpdMatrix& eps_cov) {
    const int cm1 = eps_cov.dim();
    Matrix full(cm1 + 1);
    for (int i = 0; i < cm1; ++i)
        for (int j = 0; j < cm1; ++j) full(i, j) = eps_cov(i, j);
    // eps_C = -sum of the others.
    for (int i = 0; i < cm1; ++i) {
        double s = 0.0;
        for (int j = 0; j < cm1; ++j) s += eps_cov(i, j);
        full(i, cm1) = -s;
        full(cm1, i) = -s;
    }
    double s = 0.0;
    for (int i = 0; i < cm1; ++i)
        for (int j = 0; j < cm1; ++j) s += eps_cov(i, j);
    full(cm1, cm1) = s;
    return full;
}

namespace {

Matrix multinomial_block_full(const Vector& p) {
    const int c = static_cast<int>(p.size());
    Matrix m(c);
    for (int i = 0; i < c; ++i) {
        const double pi = p[static_cast<std::size_t>(i)];
        m(i, i) = pi * (1.0 - pi);
        for (int j = 0; j < i; ++j) {
            const double v = -pi * p[static_cast<std::size_t>(j)];
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

} // namespace

MomentResult unconditional_moments(const Vector& p, long long n, const SpdMatrix& eps_cov) {
    if (static_cast<int>(p.size()) != eps_cov.dim() + 1)
        throw ValidationError("unconditional_moments: dim(p) must be dim(eps_cov) + 1");
    const double nd = static_cast<double>(n);
    MomentResult out;
    out.mean = nd * p;
    out.cov = nd * multinomial_block_full(p) + (nd * (nd - 1.0)) * extend_eps_cov(eps_cov);
    return out;
}

MomentResult cumulative_moments(const Vector& p, const std::vector<long long>& ns,
                                const std::vector<SpdMatrix>& eps_covs) {
    if (ns.size() != eps_covs.size())
        throw ValidationError("cumulative_moments: one eps covariance per round required");
    if (ns.empty()) throw ValidationError("cumulative_moments: round list is empty");
    double total = 0.0;
    Matrix eps_part(static_cast<int>(p.size()));
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double nd = static_cast<double>(ns[i]);
        total += nd;
        eps_part += (nd * (nd - 1.0)) * extend_eps_cov(eps_covs[i]);
    }
    MomentResult out;
    out.mean = total * p;
    out.cov = total * multinomial_block_full(p) + eps_part;
    return out;
}

} // namespace seqmult
