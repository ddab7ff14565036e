#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

namespace folo {

// x' = A x + B u, y = C x, x(0-) = 0. A must be stable with distinct
// eigenvalues; both are checked by eigendecompose, not at construction.
struct LtiSystem {
  Eigen::MatrixXd a;  // n x n
  Eigen::MatrixXd b;  // n x r
  Eigen::MatrixXd c;  // m x n

  int states() const { return static_cast<int>(a.rows()); }
  int inputs() const { return static_cast<int>(b.cols()); }
  int outputs() const { return static_cast<int>(c.rows()); }

  // Shape and finiteness checks; throws Error on violation.
  void validate() const;
};

// Sinusoidal forcing on one input column: u_l(t) = amplitude * sin(omega t).
// theta is carried for completeness; the modal engine requires theta == 0.
struct ForcedInput {
  int input_index = 0;
  double amplitude = 0.0;  // nonzero
  double omega = 0.0;      // rad/s, nonzero
  double theta = 0.0;
};

// Right eigenvectors are unit columns of `right`; rows of `left` are scaled
// so left.row(i) * right.col(i) == 1. Residue products are invariant to that
// normalization choice.
struct EigenStructure {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  std::vector<int> real_modes;  // indices with Im == 0
  std::vector<int> pair_modes;  // one index per conjugate pair (Im > 0)
};

// Dense eigendecomposition with guards: rejects unstable spectra and
// eigenvalue collisions closer than 1e-9 relative to the spectral radius,
// and verifies A is reconstructed by the eigenbasis to 1e-8.
EigenStructure eigendecompose(const LtiSystem& sys);

// Splits conjugate pairs into near-resonant and non-resonant sets around a
// target mode. The target is the poorly damped pair (damping ratio below
// damping_ratio_max) whose frequency is closest to omega_d; if none
// qualifies, target stays -1 and every pair counts as non-resonant.
struct ClassifyOptions {
  std::optional<double> kappa;  // default 0.5*sigma_target + 0.02*omega_target
  std::optional<int> target;    // explicit target mode index
  double damping_ratio_max = 0.05;
};

struct ModeClassification {
  int target = -1;
  double omega_target = 0.0;
  double sigma_target = 0.0;
  double kappa = 0.0;
  std::vector<int> nonresonant_pairs;  // |Im lambda_i - omega_target| > kappa
  std::vector<int> resonant_pairs;     // remainder, always contains target
};

ModeClassification classify_modes(const EigenStructure& eig, double omega_d,
                                  const ClassifyOptions& opts = {});

// Residues c_k r_i l_i b_l of the transfer path input l -> output k, one per
// eigenvalue, so H(s) = sum_i residue_i / (s - lambda_i).
Eigen::VectorXcd transfer_residues(const LtiSystem& sys, const EigenStructure& eig,
                                   int output_index, int input_index);

// Direct resolvent evaluation C (sI - A)^-1 B, no eigenbasis involved.
std::complex<double> transfer_value(const LtiSystem& sys, std::complex<double> s,
                                    int output_index, int input_index);

}  // namespace folo
