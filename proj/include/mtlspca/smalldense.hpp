#pragma once

// Dense symmetric linear algebra for the small (mk x mk) theory matrices,
// plus the top-eigenvector extraction used by the PCA projector.

#include <Eigen/Dense>

namespace mtlspca {

struct EigenDecomposition {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // orthonormal columns; largest-magnitude entry of each is positive
    // Set when two consecutive eigenvalues are closer than 1e-8 * ||A||. Individual
    // vectors inside such a cluster are not unique; only the spanned subspace is.
    bool degenerate = false;
};

// Matrices up to this order go through cyclic Jacobi; larger ones through
// Householder tridiagonalisation + implicit QR.
inline constexpr Eigen::Index kJacobiMaxOrder = 64;

// Throws InputError if A is not square, not finite, or not symmetric to 1e-12 (relative).
void check_symmetric(const Eigen::MatrixXd& a, const char* what);

EigenDecomposition sym_eig(const Eigen::MatrixXd& a);

// Cyclic Jacobi on its own; exposed so tests can compare the two solvers.
EigenDecomposition jacobi_eig(const Eigen::MatrixXd& a);

// Flip each column so its largest-magnitude entry is positive (first one wins ties).
void normalize_signs(Eigen::MatrixXd& vectors);

// Principal square root of a PSD matrix. Eigenvalues in [-1e-6, 0) are
// clipped to zero (tolerance scaled by max(1, |lambda_max|)); anything more
// negative raises NotPsdError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);

// Solve A X = B for symmetric positive definite A. Raises SingularError when
// the smallest eigenvalue of A is below 1e-12.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Orthonormal basis (p x tau) of the dominant tau-dimensional eigenspace of
// X X^T / p, computed through whichever Gram matrix (X^T X or X X^T) is smaller.
Eigen::MatrixXd top_subspace(const Eigen::MatrixXd& x, Eigen::Index tau);

// Top-k eigenpairs of a symmetric matrix by Lanczos with full
// reorthogonalisation. Used for large Gram matrices.
EigenDecomposition lanczos_top(const Eigen::MatrixXd& a, Eigen::Index k);

}  // namespace mtlspca
