#include "folo/rpca.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "folo/error.hpp"

namespace folo {

namespace {

void check_finite(const Eigen::MatrixXd& y) {
  if (!y.allFinite()) throw Error("rpca: input contains non-finite entries");
}

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& x) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error("rpca: SVD failed on a " + std::to_string(x.rows()) + "x" +
                std::to_string(x.cols()) + " matrix");
  }
  return svd;
}

}  // namespace

double default_xi(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw Error("default_xi: dimensions must be positive");
  return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& x, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error("soft_threshold: tau must be nonnegative and finite");
  }
  return x.unaryExpr([tau](double v) {
    const double m = std::abs(v) - tau;
    return m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
  });
}

SvtResult singular_value_threshold(const Eigen::MatrixXd& x, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error("singular_value_threshold: tau must be nonnegative and finite");
  }
  check_finite(x);
  const auto svd = thin_svd(x);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tau) {
      sv(i) -= tau;
      ++rank;
    } else {
      sv(i) = 0.0;
    }
  }
  SvtResult out;
  out.retained_rank = rank;
  out.value = svd.matrixU().leftCols(rank) * sv.head(rank).asDiagonal() *
              svd.matrixV().leftCols(rank).transpose();
  if (rank == 0) out.value = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  return out;
}

RpcaResult rpca_exact_alm(const Eigen::MatrixXd& y, const RpcaConfig& cfg) {
  if (y.rows() < 1 || y.cols() < 1) throw Error("rpca: empty input");
  check_finite(y);
  if (!(cfg.xi > 0.0) || !std::isfinite(cfg.xi)) throw Error("rpca: xi must be positive");
  if (!(cfg.tol_primal > 0.0) || !(cfg.tol_primal < 1.0)) {
    throw Error("rpca: tol_primal must lie in (0, 1)");
  }
  if (cfg.max_outer_iters < 1 || cfg.max_inner_iters < 1) {
    throw Error("rpca: iteration limits must be at least 1");
  }
  if (cfg.mu0 && !(*cfg.mu0 > 0.0)) throw Error("rpca: mu0 must be positive");
  if (cfg.rho && !(*cfg.rho > 1.0)) throw Error("rpca: rho must exceed 1");

  RpcaResult res;
  res.low_rank = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  res.sparse = Eigen::MatrixXd::Zero(y.rows(), y.cols());

  const double norm_y = y.norm();
  if (norm_y == 0.0) {
    res.converged = true;
    return res;
  }

  const double sigma1 = thin_svd(y).singularValues()(0);
  const double dual_scale = std::max(sigma1, y.cwiseAbs().maxCoeff() / cfg.xi);
  double mu = cfg.mu0.value_or(1.25 / sigma1);
  const double rho = cfg.rho.value_or(1.6);

  res.diagnostics.mu0 = mu;
  res.diagnostics.rho = rho;
  res.diagnostics.dual_scale = dual_scale;

  Eigen::MatrixXd lambda = y / dual_scale;
  Eigen::MatrixXd& low = res.low_rank;
  Eigen::MatrixXd& sp = res.sparse;
  const double inner_tol = 1e-6 * norm_y;

  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    double nuclear = 0.0;
    for (int inner = 0; inner < cfg.max_inner_iters; ++inner) {
      const auto svd = thin_svd(y - sp + lambda / mu);
      Eigen::VectorXd sv = svd.singularValues();
      Eigen::Index rank = 0;
      nuclear = 0.0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1.0 / mu) {
          sv(i) -= 1.0 / mu;
          nuclear += sv(i);
          ++rank;
        } else {
          sv(i) = 0.0;
        }
      }
      Eigen::MatrixXd low_next;
      if (rank == 0) {
        low_next = Eigen::MatrixXd::Zero(y.rows(), y.cols());
      } else {
        low_next = svd.matrixU().leftCols(rank) * sv.head(rank).asDiagonal() *
                   svd.matrixV().leftCols(rank).transpose();
      }
      Eigen::MatrixXd sp_next = soft_threshold(y - low_next + lambda / mu, cfg.xi / mu);
      const double change = std::max((low_next - low).norm(), (sp_next - sp).norm());
      low.swap(low_next);
      sp.swap(sp_next);
      ++res.diagnostics.inner_iterations;
      if (change < inner_tol) break;
    }

    const Eigen::MatrixXd gap = y - low - sp;
    res.residual = gap.norm() / norm_y;
    res.outer_iterations = outer + 1;
    res.diagnostics.residual_history.push_back(res.residual);
    res.diagnostics.objective_history.push_back(nuclear + cfg.xi * sp.lpNorm<1>());

    lambda += mu * gap;
    mu *= rho;

    if (res.residual < cfg.tol_primal) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace folo
