#include "cascade/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cascade {

PDMatrixInverse PDMatrixInverse::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("PDMatrixInverse: dim must be >= 1");
  return PDMatrixInverse{Eigen::MatrixXd::Identity(dim, dim)};
}

PDMatrixInverse rank_one_update(const PDMatrixInverse& state,
                                const Eigen::VectorXd& x, double sigma) {
  const int d = state.dim();
  if (x.size() != d) {
    throw std::invalid_argument("rank_one_update: x has length " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(d));
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("rank_one_update: x has non-finite entries");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("rank_one_update: sigma must be positive");
  }

  const Eigen::VectorXd mx = state.inv * x;
  const double denom = x.dot(mx) + sigma * sigma;
  Eigen::MatrixXd next = state.inv - (mx * mx.transpose()) / denom;
  next = ((next + next.transpose()) * 0.5).eval();
  return PDMatrixInverse{std::move(next)};
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw std::runtime_error("cholesky_lower: non-positive pivot at index " +
                               std::to_string(j));
    }
    l(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double sum = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / l(j, j);
    }
  }
  return l;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const PDMatrixInverse& cov, Rng& rng) {
  if (mean.size() != cov.dim()) {
    throw std::invalid_argument("sample_mvn: mean/cov dimension mismatch");
  }
  const Eigen::MatrixXd l = cholesky_lower(cov.inv);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + l * z;
}

namespace {

// Deterministic orthonormal completion for singular directions with a zero
// singular value: pick standard basis vectors, project against the columns
// already in place, keep the first with enough mass left.
void fill_orthonormal(Eigen::MatrixXd& m, Eigen::Index col) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index cand = 0; cand < n; ++cand) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(cand) = 1.0;
    for (Eigen::Index k = 0; k < col; ++k) {
      v -= m.col(k).dot(v) * m.col(k);
    }
    const double norm = v.norm();
    if (norm > 0.5) {
      m.col(col) = v / norm;
      return;
    }
  }
  throw std::runtime_error("truncated_svd: could not complete orthonormal basis");
}

}  // namespace

SvdFactors truncated_svd(const Eigen::MatrixXd& a, int d) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  const Eigen::Index min_dim = std::min(rows, cols);
  if (d < 1 || d > min_dim) {
    throw std::invalid_argument("truncated_svd: d=" + std::to_string(d) +
                                " out of range for " + std::to_string(rows) +
                                "x" + std::to_string(cols) + " matrix");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("truncated_svd: matrix has non-finite entries");
  }

  constexpr int kOversample = 4;
  constexpr int kMaxSweeps = 50;
  constexpr double kTol = 1e-9;
  const Eigen::Index p = std::min<Eigen::Index>(d + kOversample, min_dim);

  // Fixed-seed start so the factorization is a pure function of (a, d).
  Rng rng(0xCA5CADEULL);
  Eigen::MatrixXd q(rows, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) q(i, j) = rng.normal();

  auto orthonormalize = [](const Eigen::MatrixXd& y) -> Eigen::MatrixXd {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd thin_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
    return thin_q;
  };

  q = orthonormalize(a * (a.transpose() * q) + q);  // one seeded warm sweep
  Eigen::VectorXd prev_s = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd rotated = q;
  Eigen::VectorXd eigs = Eigen::VectorXd::Zero(p);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    q = orthonormalize(a * (a.transpose() * q));

    // Rayleigh-Ritz on the current subspace.
    const Eigen::MatrixXd b = a.transpose() * q;        // cols x p
    const Eigen::MatrixXd t = b.transpose() * b;        // p x p, = Q^T A A^T Q
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("truncated_svd: eigensolver failed");
    }
    // Eigen returns eigenvalues ascending; we want non-increasing.
    eigs = es.eigenvalues().reverse();
    rotated = q * es.eigenvectors().rowwise().reverse();

    Eigen::VectorXd s_now(p);
    for (Eigen::Index i = 0; i < p; ++i)
      s_now(i) = std::sqrt(std::max(eigs(i), 0.0));
    const double scale = std::max(s_now(0), 1.0);
    if ((s_now - prev_s).cwiseAbs().maxCoeff() <= kTol * scale) {
      prev_s = s_now;
      break;
    }
    prev_s = s_now;
    q = rotated;
  }

  SvdFactors out;
  out.u = rotated.leftCols(d);
  out.s = prev_s.head(d);
  out.v.resize(cols, d);

  const double s_max = out.s.size() > 0 ? out.s(0) : 0.0;
  const double zero_cut = std::max(s_max, 1.0) * 1e-13;
  for (int j = 0; j < d; ++j) {
    if (out.s(j) > zero_cut) {
      out.v.col(j) = a.transpose() * out.u.col(j) / out.s(j);
      out.v.col(j).normalize();
    } else {
      out.s(j) = 0.0;
      fill_orthonormal(out.v, j);
    }
  }

  // Sign convention: largest-magnitude entry of each V column non-negative.
  for (int j = 0; j < d; ++j) {
    Eigen::Index arg = 0;
    out.v.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.v(arg, j) < 0.0) {
      out.v.col(j) = -out.v.col(j);
      out.u.col(j) = -out.u.col(j);
    }
  }
  return out;
}

}  // namespace cascade
