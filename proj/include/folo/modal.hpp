#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "folo/lti.hpp"
#include "folo/measurement.hpp"

namespace folo {

// One real eigenvalue's share of a channel response:
//   y(t) = amp_decay * e^(lambda t) + amp_steady * sin(omega_d t + phase).
struct RealComponent {
  int mode = 0;
  double residue = 0.0;  // c_k r_i l_i b_l, real for a real mode
  double lambda = 0.0;
  double phase = 0.0;  // angle of (-lambda - j omega_d)
  double amp_decay = 0.0;
  double amp_steady = 0.0;
  Eigen::VectorXd series;  // sampled y
};

// One conjugate pair's share, lambda = -sigma + j omega:
//   y(t) = amp_transient e^(-sigma t) cos(omega t + theta - psi)
//        + amp_steady cos(omega_d t + phi - alpha).
// For near-resonant pairs the flat-phase approximation
//   y_res(t) = envelope_scale (1 - e^(-sigma t)) sin(omega_d t + theta)
// is sampled alongside the exact series.
struct PairComponent {
  int mode = 0;
  std::complex<double> residue;  // c_k r_i l_i b_l
  double sigma = 0.0;
  double omega = 0.0;
  double theta = 0.0;  // angle of the residue
  double psi = 0.0;
  double phi = 0.0;
  double alpha = 0.0;
  double amp_transient = 0.0;
  double amp_steady = 0.0;
  bool resonant = false;
  double envelope_scale = 0.0;  // P |residue| / sigma, resonant pairs only
  Eigen::VectorXd series;       // exact sampled y
  Eigen::VectorXd resonance;    // approximate sampled y, resonant pairs only
};

struct ChannelComponents {
  int output_index = 0;
  std::vector<RealComponent> real_modes;
  std::vector<PairComponent> pairs;
};

struct ModalComponents {
  Eigen::VectorXd times;  // j / fs for j = 0 .. floor(duration * fs)
  double fs = 0.0;
  double duration = 0.0;
  ForcedInput input;
  ModeClassification classification;
  std::vector<ChannelComponents> channels;
};

// Closed-form response of the listed output rows to sinusoidal forcing from
// rest, split per eigenvalue. Requires input.theta == 0 and rejects a drive
// that lands on a real mode's singularity |lambda^2 + omega_d^2| ~ 0.
ModalComponents simulate_modal(const LtiSystem& sys, const EigenStructure& eig,
                               const ModeClassification& cls, const ForcedInput& input,
                               const std::vector<int>& outputs, double duration_s,
                               double fs);

// Exact totals: sum of every real and pair series. Channels x samples.
Eigen::MatrixXd total_response(const ModalComponents& mc);

// Totals with each resonant pair replaced by its flat-phase approximation.
Eigen::MatrixXd approx_response(const ModalComponents& mc);

// Real modes plus non-resonant pairs only; what remains once the resonance
// is stripped. The row peaks of this matrix point at the forcing location.
Eigen::MatrixXd resonance_free(const ModalComponents& mc);

// Sum of the approximate resonant-pair series. Errors when the
// classification found no resonant pair.
Eigen::MatrixXd resonance_matrix(const ModalComponents& mc);

// Factorization certificate for the resonance matrix: per resonant pair i,
//   f rows: (1 - e^(-sigma_i t)) sin(omega_d t), (1 - e^(-sigma_i t)) cos(omega_d t)
//   g cols: envelope_scale_k cos(theta_k,i), envelope_scale_k sin(theta_k,i)
// so resonance_matrix == g * f. With one resonant pair the matrix has rank
// at most two.
struct ResonanceFactors {
  Eigen::MatrixXd g;  // channels x 2p
  Eigen::MatrixXd f;  // 2p x samples
};
ResonanceFactors resonance_factors(const ModalComponents& mc);

// Convenience wrapper: exact totals for all outputs stamped with channel
// metadata, ready for CSV serialization or localization.
MeasurementMatrix simulate_measurements(const LtiSystem& sys, const EigenStructure& eig,
                                        const ModeClassification& cls,
                                        const ForcedInput& input,
                                        const std::vector<Channel>& channels,
                                        double duration_s, double fs);

}  // namespace folo
