#pragma once

#include "dsmon/core/common.hpp"

#include <span>
#include <vector>

namespace dsmon::linalg {

Vector singular_values(const Matrix& m);
Index rank(const Matrix& m, const NumericPolicy& policy);

/// Orthonormal basis of the column space. Singular values are compared against
/// max(sigma_max, scale), so a product that is zero up to rounding has rank 0 when
/// the caller passes the norm of the factors as scale.
Matrix orth(const Matrix& m, const NumericPolicy& policy, double scale = 0.0);
/// Orthonormal basis of the kernel.
Matrix null_space(const Matrix& m, const NumericPolicy& policy, double scale = 0.0);
/// Orthonormal basis of the kernel of m^T.
Matrix left_null_space(const Matrix& m, const NumericPolicy& policy);
/// Completes an orthonormal basis (n x d) to the orthogonal complement (n x n-d).
Matrix complement(const Matrix& basis, Index ambient);
Matrix pinv(const Matrix& m, const NumericPolicy& policy);

double max_abs(const Matrix& m);

/// sigma_min / sigma_max of a complex matrix (0 for empty or zero matrices).
double sigma_ratio(const CMatrix& m);
Index complex_rank(const CMatrix& m, const NumericPolicy& policy);

/// Solves A X + X B = C by the Kronecker formulation.
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

/// Symmetric square root of a PSD matrix (negative eigenvalues clipped).
Matrix psd_sqrt(const Matrix& m);
bool is_psd(const Matrix& m, double tol);

Matrix select_columns(const Matrix& m, std::span<const Index> cols);
Matrix select_rows(const Matrix& m, std::span<const Index> rows);
Matrix select_block(const Matrix& m, std::span<const Index> rows, std::span<const Index> cols);

Matrix block_diagonal(const std::vector<Matrix>& blocks);
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

}  // namespace dsmon::linalg
