#pragma once

#include <Eigen/Dense>

#include "cascade/rng.hpp"

namespace cascade {

/// Inverse of a positive-definite matrix M, maintained directly: only M^-1 is
/// ever stored. Starts at the identity (M0 = I_d) and is resymmetrized as
/// (A + A^T)/2 after every update so Cholesky stays viable over long runs.
struct PDMatrixInverse {
  Eigen::MatrixXd inv;

  static PDMatrixInverse identity(int dim);
  int dim() const { return static_cast<int>(inv.rows()); }
};

/// Applies M <- M + sigma^-2 x x^T on the stored inverse in O(d^2):
///   M^-1 <- M^-1 - (M^-1 x x^T M^-1) / (x^T M^-1 x + sigma^2).
PDMatrixInverse rank_one_update(const PDMatrixInverse& state,
                                const Eigen::VectorXd& x, double sigma);

/// Lower-triangular Cholesky factor of a symmetric PD matrix. Throws
/// std::runtime_error naming the pivot index if a pivot is not positive.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

/// One draw from N(mean, cov) as mean + L z, with L the Cholesky factor of
/// cov and z i.i.d. standard normals from `rng`.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const PDMatrixInverse& cov, Rng& rng);

/// Rank-d factors of a truncated SVD: A ~ U diag(S) V^T.
struct SvdFactors {
  Eigen::MatrixXd u;  // rows x d, orthonormal columns
  Eigen::VectorXd s;  // d singular values, non-increasing, >= 0
  Eigen::MatrixXd v;  // cols x d, orthonormal columns
};

/// Best rank-d approximation via orthogonal (subspace) power iteration with
/// d+4 oversampling, at most 50 sweeps, tolerance 1e-9 on the singular
/// values. The starting block is drawn from a fixed internal seed, so the
/// result is a deterministic function of (A, d). Sign convention: the
/// largest-magnitude entry of each column of V is non-negative (first such
/// entry on magnitude ties).
SvdFactors truncated_svd(const Eigen::MatrixXd& a, int d);

}  // namespace cascade
