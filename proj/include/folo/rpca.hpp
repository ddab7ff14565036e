#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace folo {

// Sparsity weight used when the caller does not pick one: 1/sqrt(max dim).
double default_xi(Eigen::Index rows, Eigen::Index cols);

// Entrywise shrinkage: sign(x) * max(|x| - tau, 0). Proximal map of tau*|.|_1.
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& x, double tau);

// Singular value shrinkage: U * max(S - tau, 0) * V^T. Proximal map of the
// nuclear norm. retained_rank counts singular values strictly above tau.
struct SvtResult {
  Eigen::MatrixXd value;
  Eigen::Index retained_rank = 0;
};
SvtResult singular_value_threshold(const Eigen::MatrixXd& x, double tau);

struct RpcaConfig {
  double xi = 0.0;           // sparsity weight, must be > 0
  double tol_primal = 1e-7;  // stop when |Y-L-S|_F / |Y|_F falls below
  int max_outer_iters = 100;
  int max_inner_iters = 100;
  std::optional<double> mu0;  // penalty start; default 1.25 / sigma1(Y)
  std::optional<double> rho;  // penalty growth; default 1.6
};

struct RpcaDiagnostics {
  double mu0 = 0.0;
  double rho = 0.0;
  double dual_scale = 0.0;  // max(sigma1(Y), |Y|_inf / xi), scales Lambda0
  std::vector<double> residual_history;   // relative primal residual per outer pass
  std::vector<double> objective_history;  // |L|_* + xi |S|_1 per outer pass
  int inner_iterations = 0;
};

struct RpcaResult {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  int outer_iterations = 0;
  double residual = 0.0;  // final relative primal residual
  bool converged = false;
  RpcaDiagnostics diagnostics;
};

// Exact augmented-Lagrange solver for
//   min |L|_* + xi |S|_1  subject to  Y = L + S.
// Each outer pass alternates singular-value and entrywise shrinkage until the
// iterates stall, then updates the multiplier and grows the penalty. Failing
// to reach tol_primal in max_outer_iters leaves converged = false and returns
// the best iterate; it is not an error.
RpcaResult rpca_exact_alm(const Eigen::MatrixXd& y, const RpcaConfig& cfg);

}  // namespace folo
