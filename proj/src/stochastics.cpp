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

#include "seqmult/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

namespace seqmult {

double sample_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw InvalidParameterError("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}
        const double g = sample_gamma(shape + 1.0, rng);
        return g * std::pow(rng.uniform_open01(), 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze method.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal01();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_chisq(double dof, RngStream& rng) {
    if (!(dof > 0.0)) throw InvalidParameterError("chi-squared dof must be positive");
    return 2.0 * sample_gamma(0.5 * dof, rng);
}

namespace {

// Stirling tail correction log(k!) - Stirling, as used by the BTRS sampler.
double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272,  0.0413406959554092,  0.0276779256849983, 0.02079067210376509,
        0.0166446911898211,  0.0138761288230707,  0.0118967099458917, 0.0104112652619720,
        0.00925546218271273, 0.00833056343336287};
    if (k <= 9.0) return table[static_cast<int>(k)];
    const double kp1sq = (k + 1.0) * (k + 1.0);
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / (k + 1.0);
}

// Inversion by sequential search; valid when n*p is modest and q^n does not
// underflow.
long long binomial_inversion(long long n, double p, RngStream& rng) {
    const double q = 1.0 - p;
    const double s = p / q;
    double r = std::pow(q, static_cast<double>(n));
    const double a = (static_cast<double>(n) + 1.0) * s;
    double u = rng.uniform01();
    long long x = 0;
    while (u > r) {
        u -= r;
        ++x;
        if (x > n) return n; // guards accumulated rounding at the far tail
        r *= a / static_cast<double>(x) - s;
    }
    return x;
}

// Hormann's BTRS transformed-rejection sampler; requires p <= 0.5, n*p >= 10.
long long binomial_btrs(long long n, double p, RngStream& rng) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double r = p / q;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((nd + 1.0) * p);
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kd);
        if (kd < 0.0 || kd > nd) continue;
        v = std::log(v * alpha / (a / (us * us) + b));
        const double upper =
            (m + 0.5) * std::log((m + 1.0) / (r * (nd - m + 1.0))) +
            (nd + 1.0) * std::log((nd - m + 1.0) / (nd - kd + 1.0)) +
            (kd + 0.5) * std::log(r * (nd - kd + 1.0) / (kd + 1.0)) +
            stirling_tail(m) + stirling_tail(nd - m) - stirling_tail(kd) - stirling_tail(nd - kd);
        if (v <= upper) return static_cast<long long>(kd);
    }
}

} // namespace

long long sample_binomial(long long n, double p, RngStream& rng) {
    if (n < 0) throw InvalidParameterError("binomial n must be nonnegative");
    if (p < 0.0 || p > 1.0 || !std::isfinite(p))
        throw InvalidParameterError("binomial p must lie in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
    if (static_cast<double>(n) * p < 10.0) return binomial_inversion(n, p, rng);
    return binomial_btrs(n, p, rng);
}

long long sample_poisson(double lambda, RngStream& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidParameterError("poisson rate must be nonnegative");
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) {
        // Knuth: multiply uniforms until the product drops below e^{-lambda}.
        const double limit = std::exp(-lambda);
        long long k = 0;
        double prod = rng.uniform_open01();
        while (prod > limit) {
            ++k;
            prod *= rng.uniform_open01();
        }
        return k;
    }
    // Hormann's PTRS transformed rejection.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        const double v = rng.uniform01();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kd * log_lambda - lambda - std::lgamma(kd + 1.0))
            return static_cast<long long>(kd);
    }
}

namespace {

// Indices with an exactly-zero covariance row/column are point mass at the
// mean; the strictly positive block is factored with the jitter policy.
struct DegeneratePartition {
    std::vector<int> live;
    Matrix live_chol;
};

DegeneratePartition partition_and_factor(const SpdMatrix& cov) {
    const int n = cov.dim();
    DegeneratePartition part;
    for (int i = 0; i < n; ++i) {
        if (cov(i, i) != 0.0) {
            part.live.push_back(i);
        } else {
            for (int j = 0; j < n; ++j)
                if (cov(i, j) != 0.0)
                    throw ValidationError(
                        "covariance has a zero diagonal entry with nonzero off-diagonals");
        }
    }
    const int k = static_cast<int>(part.live.size());
    if (k > 0) {
        Matrix sub(k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = cov(part.live[static_cast<std::size_t>(i)],
                                                        part.live[static_cast<std::size_t>(j)]);
        part.live_chol = cholesky(sub, "covariance");
    }
    return part;
}

} // namespace

Vector sample_mvn(const Vector& mean, const SpdMatrix& cov, RngStream& rng) {
    if (static_cast<int>(mean.size()) != cov.dim())
        throw ValidationError("sample_mvn: mean/covariance dimension mismatch");
    const DegeneratePartition part = partition_and_factor(cov);
    Vector out(mean);
    const int k = static_cast<int>(part.live.size());
    if (k == 0) return out;
    Vector z(static_cast<std::size_t>(k));
    for (double& zi : z) zi = rng.normal01();
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += part.live_chol(i, j) * z[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(part.live[static_cast<std::size_t>(i)])] += s;
    }
    return out;
}

Vector sample_mvn_chol(const Vector& mean, const Matrix& chol_lower, RngStream& rng) {
    const int n = chol_lower.dim();
    Vector z(static_cast<std::size_t>(n));
    for (double& zi : z) zi = rng.normal01();
    Vector out(mean);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += chol_lower(i, j) * z[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] += s;
    }
    return out;
}

SpdMatrix sample_inverse_wishart(const SpdMatrix& scale, double dof, RngStream& rng) {
    const int p = scale.dim();
    if (dof < static_cast<double>(p))
        throw InvalidParameterError("inverse Wishart dof " + std::to_string(dof) +
                                    " too small for dimension " + std::to_string(p));
    // Bartlett: W = (G A)(G A)' ~ Wishart(scale^{-1}, dof) with G = chol(scale^{-1}).
    // The draw is S = W^{-1} = M^{-T} M^{-1} for M = G A.
    const Matrix scale_chol = cholesky(scale.raw(), "inverse Wishart scale");
    const Matrix g = cholesky(chol_inverse(scale_chol), "inverse Wishart inverse scale");
    Matrix a(p);
    for (int i = 0; i < p; ++i) {
        a(i, i) = std::sqrt(sample_chisq(dof - static_cast<double>(i), rng));
        for (int j = 0; j < i; ++j) a(i, j) = rng.normal01();
    }
    Matrix m(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = j; k <= i; ++k) s += g(i, k) * a(k, j);
            m(i, j) = s;
        }
    const Matrix minv = lower_tri_inverse(m);
    Matrix out(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = std::max(i, j); k < p; ++k) s += minv(k, i) * minv(k, j);
            out(i, j) = s;
            out(j, i) = s;
        }
    return SpdMatrix(out, "inverse Wishart draw");
}

Vector sample_dirichlet(const Vector& concentration, RngStream& rng) {
    if (concentration.empty()) throw InvalidParameterError("dirichlet needs at least one component");
    for (double c : concentration)
        if (!(c > 0.0)) throw InvalidParameterError("dirichlet concentrations must be positive");
    Vector out(concentration.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Rejecting exact zeros keeps the draw strictly interior.
        double g;
        do {
            g = sample_gamma(concentration[i], rng);
        } while (g <= 0.0);
        out[i] = g;
        total += g;
    }
    for (double& x : out) x /= total;
    return out;
}

std::vector<long long> sample_multinomial(long long n, const Vector& probs, RngStream& rng) {
    if (n < 1) throw InvalidParameterError("multinomial n must be at least 1");
    const std::size_t c = probs.size();
    if (c == 0) throw InvalidParameterError("multinomial needs at least one category");
    double total = 0.0;
    for (double p : probs) {
        if (p < -1e-9 || !std::isfinite(p))
            throw InvalidParameterError("multinomial probabilities must be nonnegative");
        total += std::max(p, 0.0);
    }
    if (std::fabs(total - 1.0) > 1e-9 && total <= 0.0)
        throw InvalidParameterError("multinomial probabilities must sum to a positive value");
    std::vector<long long> counts(c, 0);
    long long remaining = n;
    double mass = total;
    for (std::size_t i = 0; i + 1 < c && remaining > 0; ++i) {
        const double pi = std::max(probs[i], 0.0);
        const double cond = std::clamp(pi / mass, 0.0, 1.0);
        const long long x = sample_binomial(remaining, cond, rng);
        counts[i] = x;
        remaining -= x;
        mass -= pi;
        if (mass <= 0.0) break;
    }
    counts[c - 1] += remaining;
    return counts;
}

bool simplex_support_ok(const Vector& p, const Vector& eps) {
    const std::size_t cm1 = eps.size();
    double eps_sum = 0.0;
    for (std::size_t i = 0; i < cm1; ++i) {
        const double pc = p[i] + eps[i];
        if (pc < 0.0 || pc > 1.0) return false;
        eps_sum += eps[i];
    }
    const double plast = p[cm1] - eps_sum;
    return plast >= 0.0 && plast <= 1.0;
}

Vector sample_truncated_mvn_on_simplex(const Vector& p, const SpdMatrix& cov, RngStream& rng,
                                       long max_attempts) {
    const int cm1 = cov.dim();
    if (static_cast<int>(p.size()) != cm1 + 1)
        throw ValidationError("truncated sampler needs dim(p) = dim(cov) + 1");
    for (double pc : p)
        if (!(pc > 0.0 && pc < 1.0))
            throw ValidationError("truncated sampler requires p strictly inside the simplex");
    const Vector zero(static_cast<std::size_t>(cm1), 0.0);
    const DegeneratePartition part = partition_and_factor(cov);
    const int k = static_cast<int>(part.live.size());
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        Vector eps(zero);
        if (k > 0) {
            Vector z(static_cast<std::size_t>(k));
            for (double& zi : z) zi = rng.normal01();
            for (int i = 0; i < k; ++i) {
                double s = 0.0;
                for (int j = 0; j <= i; ++j) s += part.live_chol(i, j) * z[static_cast<std::size_t>(j)];
                eps[static_cast<std::size_t>(part.live[static_cast<std::size_t>(i)])] = s;
            }
        }
        if (simplex_support_ok(p, eps)) return eps;
    }
    throw RejectionBudgetError(
        "truncated normal support too tight: no acceptance in " + std::to_string(max_attempts) +
            " attempts",
        0.0);
}

} // namespace seqmult
