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

#include "seqmult/linalg.hpp"

#include <cmath>
#include <cstddef>

namespace seqmult {

Matrix& Matrix::operator+=(const Matrix& o) {
    if (o.dim_ != dim_) throw ValidationError("matrix dimension mismatch in +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

bool is_symmetric(const Matrix& m, double rel_tol) {
    const int n = m.dim();
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    if (scale == 0.0) return true;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
    return true;
}

Matrix symmetrize(const Matrix& m) {
    Matrix out(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
    return out;
}

Vector matvec(const Matrix& m, const Vector& v) {
    const int n = m.dim();
    if (static_cast<int>(v.size()) != n) throw ValidationError("matvec dimension mismatch");
    Vector out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += m(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    const int n = a.dim();
    if (b.dim() != n) throw ValidationError("matmul dimension mismatch");
    Matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix outer(const Vector& u, const Vector& v) {
    const int n = static_cast<int>(u.size());
    if (v.size() != u.size()) throw ValidationError("outer dimension mismatch");
    Matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return out;
}

double trace(const Matrix& m) {
    double t = 0.0;
    for (int i = 0; i < m.dim(); ++i) t += m(i, i);
    return t;
}

double quad_form(const Matrix& m, const Vector& v) {
    return dot(v, matvec(m, v));
}

Vector operator+(const Vector& a, const Vector& b) {
    Vector out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Vector operator-(const Vector& a, const Vector& b) {
    Vector out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Vector operator*(double s, const Vector& a) {
    Vector out(a);
    for (double& x : out) x *= s;
    return out;
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

namespace {

// Plain Cholesky; returns false on a nonpositive pivot.
bool try_cholesky(const Matrix& m, Matrix& lower) {
    const int n = m.dim();
    lower = Matrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                lower(i, i) = std::sqrt(s);
            } else {
                lower(i, j) = s / lower(j, j);
            }
        }
    }
    return true;
}

} // namespace

Matrix cholesky(const Matrix& m, std::string_view what) {
    Matrix lower;
    if (try_cholesky(m, lower)) return lower;
    // Jitter retry: 1e-10 * trace/dim on the diagonal, once.
    const int n = m.dim();
    const double jitter = 1e-10 * trace(m) / std::max(n, 1);
    Matrix adjusted = m;
    for (int i = 0; i < n; ++i) adjusted(i, i) += jitter;
    if (jitter > 0.0 && try_cholesky(adjusted, lower)) return lower;
    throw FactorizationError("Cholesky factorization failed for " + std::string(what) +
                             " (not positive definite after jitter)");
}

Vector forward_solve(const Matrix& lower, const Vector& b) {
    const int n = lower.dim();
    Vector y(b);
    for (int i = 0; i < n; ++i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= lower(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / lower(i, i);
    }
    return y;
}

Vector back_solve_transposed(const Matrix& lower, const Vector& y) {
    const int n = lower.dim();
    Vector x(y);
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= lower(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / lower(i, i);
    }
    return x;
}

Vector chol_solve(const Matrix& lower, const Vector& b) {
    return back_solve_transposed(lower, forward_solve(lower, b));
}

Matrix lower_tri_inverse(const Matrix& lower) {
    const int n = lower.dim();
    Matrix inv(n);
    for (int j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / lower(j, j);
        for (int i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s += lower(i, k) * inv(k, j);
            inv(i, j) = -s / lower(i, i);
        }
    }
    return inv;
}

Matrix chol_inverse(const Matrix& lower) {
    const Matrix linv = lower_tri_inverse(lower);
    const int n = lower.dim();
    // A^{-1} = L^{-T} L^{-1}
    Matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = i; k < n; ++k) s += linv(k, i) * linv(k, j);
            out(i, j) = s;
            out(j, i) = s;
        }
    return out;
}

double chol_logdet(const Matrix& lower) {
    double s = 0.0;
    for (int i = 0; i < lower.dim(); ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

Matrix spd_inverse(const Matrix& m, std::string_view what) {
    return chol_inverse(cholesky(m, what));
}

SpdMatrix::SpdMatrix(Matrix m, std::string_view name) {
    if (!is_symmetric(m))
        throw ValidationError(std::string(name) + " is not symmetric to 1e-12 relative tolerance");
    m_ = symmetrize(std::move(m));
}

SpdMatrix::SpdMatrix(double scalar) : m_(1) { m_(0, 0) = scalar; }

} // namespace seqmult
