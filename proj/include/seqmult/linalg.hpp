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

#ifndef SEQMULT_LINALG_HPP
#define SEQMULT_LINALG_HPP

#include <string>
#include <string_view>
#include <vector>

#include "seqmult/errors.hpp"

namespace seqmult {

using Vector = std::vector<double>;

// Dense square matrix, row-major.  Dimensions here are C-1 or C, i.e. tiny,
// so everything below is plain loops.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int dim, double fill = 0.0)
        : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, fill) {}

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const Vector& d) {
        Matrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const { return dim_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * dim_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * dim_ + c]; }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    bool operator==(const Matrix& o) const { return dim_ == o.dim_ && data_ == o.data_; }

private:
    int dim_ = 0;
    std::vector<double> data_;
};

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);
Matrix symmetrize(const Matrix& m);

Vector matvec(const Matrix& m, const Vector& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix outer(const Vector& u, const Vector& v);
double trace(const Matrix& m);
// v' M v
double quad_form(const Matrix& m, const Vector& v);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

// Lower-triangular Cholesky factor of an SPD matrix.  On pivot failure adds
// 1e-10 * trace/dim to the diagonal and retries once; a second failure throws
// FactorizationError naming `what`.
Matrix cholesky(const Matrix& m, std::string_view what = "matrix");

// Solves L y = b then L' x = y for a lower-triangular factor L.
Vector forward_solve(const Matrix& lower, const Vector& b);
Vector back_solve_transposed(const Matrix& lower, const Vector& y);
Vector chol_solve(const Matrix& lower, const Vector& b);
// A^{-1} from its Cholesky factor.
Matrix chol_inverse(const Matrix& lower);
// log(det(A)) from its Cholesky factor.
double chol_logdet(const Matrix& lower);
// Inverse of a lower-triangular matrix (for Bartlett-style constructions).
Matrix lower_tri_inverse(const Matrix& lower);

Matrix spd_inverse(const Matrix& m, std::string_view what = "matrix");

// Symmetric validated wrapper for the covariance/scale matrices that cross
// module boundaries.  Symmetry is required to 1e-12 relative tolerance;
// positive definiteness is enforced wherever a factorization happens (exact
// zero rows/columns are legal and denote point-mass directions).
class SpdMatrix {
public:
    SpdMatrix() = default;
    explicit SpdMatrix(Matrix m, std::string_view name = "matrix");
    // 1x1 convenience.
    explicit SpdMatrix(double scalar);

    static SpdMatrix identity(int dim) { return SpdMatrix(Matrix::identity(dim)); }

    int dim() const { return m_.dim(); }
    double operator()(int r, int c) const { return m_(r, c); }
    const Matrix& raw() const { return m_; }

    bool operator==(const SpdMatrix& o) const { return m_ == o.m_; }

private:
    Matrix m_;
};

} // namespace seqmult

#endif // SEQMULT_LINALG_HPP
