#include "folo/lti.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "folo/error.hpp"

namespace folo {

void LtiSystem::validate() const {
  if (a.rows() < 1 || a.rows() != a.cols()) throw Error("lti: A must be square and nonempty");
  if (b.rows() != a.rows() || b.cols() < 1) {
    throw Error("lti: B must have one row per state and at least one column");
  }
  if (c.cols() != a.rows() || c.rows() < 1) {
    throw Error("lti: C must have one column per state and at least one row");
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw Error("lti: system matrices contain non-finite entries");
  }
}

EigenStructure eigendecompose(const LtiSystem& sys) {
  sys.validate();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(sys.a);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecompose: eigensolver failed on a " + std::to_string(sys.states()) +
                "-state system");
  }

  EigenStructure eig;
  eig.eigenvalues = solver.eigenvalues();
  eig.right = solver.eigenvectors();

  const Eigen::Index n = eig.eigenvalues.size();
  const double radius = eig.eigenvalues.cwiseAbs().maxCoeff();

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eig.eigenvalues(i).real() < 0.0)) {
      throw Error("eigendecompose: system is not stable, eigenvalue " + std::to_string(i) +
                  " has real part " + std::to_string(eig.eigenvalues(i).real()));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(eig.eigenvalues(i) - eig.eigenvalues(j)) <= 1e-9 * radius) {
        throw Error("eigendecompose: eigenvalues " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide; distinct eigenvalues are required");
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    eig.right.col(i) /= eig.right.col(i).norm();
  }
  // Rows of the inverse are left eigenvectors with l_i r_i = 1 by construction.
  eig.left = eig.right.inverse();

  const Eigen::MatrixXcd rebuilt =
      eig.right * eig.eigenvalues.asDiagonal() * eig.left;
  const double rel = (rebuilt - sys.a.cast<std::complex<double>>()).norm() /
                     std::max(sys.a.norm(), 1e-300);
  if (rel > 1e-8) {
    throw Error("eigendecompose: eigenbasis reconstructs A to only " + std::to_string(rel) +
                " relative error; basis too ill-conditioned");
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.eigenvalues(i).imag() == 0.0) {
      eig.real_modes.push_back(static_cast<int>(i));
    } else if (eig.eigenvalues(i).imag() > 0.0) {
      eig.pair_modes.push_back(static_cast<int>(i));
    }
  }
  return eig;
}

ModeClassification classify_modes(const EigenStructure& eig, double omega_d,
                                  const ClassifyOptions& opts) {
  if (!(omega_d > 0.0) || !std::isfinite(omega_d)) {
    throw Error("classify_modes: drive frequency must be positive");
  }
  if (opts.kappa && !(*opts.kappa > 0.0)) {
    throw Error("classify_modes: kappa must be positive");
  }

  ModeClassification cls;
  int target = -1;
  if (opts.target) {
    target = *opts.target;
    bool is_pair = false;
    for (int i : eig.pair_modes) is_pair = is_pair || (i == target);
    if (!is_pair) {
      throw Error("classify_modes: explicit target " + std::to_string(target) +
                  " is not a positive-imaginary pair index");
    }
  } else {
    double best = 0.0;
    for (int i : eig.pair_modes) {
      const auto lam = eig.eigenvalues(i);
      const double ratio = -lam.real() / std::abs(lam);
      if (ratio >= opts.damping_ratio_max) continue;
      const double dist = std::abs(lam.imag() - omega_d);
      if (target < 0 || dist < best) {
        target = i;
        best = dist;
      }
    }
  }

  if (target < 0) {
    // No poorly damped pair: nothing qualifies as resonant.
    cls.nonresonant_pairs = eig.pair_modes;
    return cls;
  }

  cls.target = target;
  cls.omega_target = eig.eigenvalues(target).imag();
  cls.sigma_target = -eig.eigenvalues(target).real();
  cls.kappa = opts.kappa.value_or(0.5 * cls.sigma_target + 0.02 * cls.omega_target);
  for (int i : eig.pair_modes) {
    if (std::abs(eig.eigenvalues(i).imag() - cls.omega_target) > cls.kappa) {
      cls.nonresonant_pairs.push_back(i);
    } else {
      cls.resonant_pairs.push_back(i);
    }
  }
  return cls;
}

Eigen::VectorXcd transfer_residues(const LtiSystem& sys, const EigenStructure& eig,
                                   int output_index, int input_index) {
  if (output_index < 0 || output_index >= sys.outputs()) {
    throw Error("transfer_residues: output index " + std::to_string(output_index) +
                " out of range");
  }
  if (input_index < 0 || input_index >= sys.inputs()) {
    throw Error("transfer_residues: input index " + std::to_string(input_index) +
                " out of range");
  }
  const Eigen::RowVectorXcd ck =
      sys.c.row(output_index).cast<std::complex<double>>() * eig.right;
  const Eigen::VectorXcd lb = eig.left * sys.b.col(input_index).cast<std::complex<double>>();
  Eigen::VectorXcd residues(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < residues.size(); ++i) {
    residues(i) = ck(i) * lb(i);
  }
  return residues;
}

std::complex<double> transfer_value(const LtiSystem& sys, std::complex<double> s,
                                    int output_index, int input_index) {
  if (output_index < 0 || output_index >= sys.outputs()) {
    throw Error("transfer_value: output index out of range");
  }
  if (input_index < 0 || input_index >= sys.inputs()) {
    throw Error("transfer_value: input index out of range");
  }
  Eigen::MatrixXcd shifted = -sys.a.cast<std::complex<double>>();
  shifted.diagonal().array() += s;
  const Eigen::VectorXcd x =
      shifted.partialPivLu().solve(sys.b.col(input_index).cast<std::complex<double>>());
  return (sys.c.row(output_index).cast<std::complex<double>>() * x)(0);
}

}  // namespace folo
