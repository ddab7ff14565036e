#include "folo/modal.hpp"

#include <cmath>
#include <complex>

#include "folo/error.hpp"

namespace folo {

namespace {

using cplx = std::complex<double>;

Eigen::VectorXd sample_times(double duration_s, double fs) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error("simulate: duration must be positive");
  }
  if (!(fs > 0.0) || !std::isfinite(fs)) throw Error("simulate: sample rate must be positive");
  const auto count = static_cast<Eigen::Index>(std::floor(duration_s * fs)) + 1;
  if (count < 2) throw Error("simulate: window shorter than two samples");
  Eigen::VectorXd t(count);
  for (Eigen::Index j = 0; j < count; ++j) t(j) = static_cast<double>(j) / fs;
  return t;
}

// Real mode: residue R and lambda < 0 with drive P sin(wd t) give
//   y(t) = R P wd / (lambda^2 + wd^2) e^(lambda t)
//        + R P / sqrt(lambda^2 + wd^2) sin(wd t + phase),
// phase = angle(-lambda - j wd).
RealComponent real_component(int mode, double residue, double lambda, double p, double wd,
                             const Eigen::VectorXd& t) {
  const double denom = lambda * lambda + wd * wd;
  if (denom <= 1e-12 * (lambda * lambda + wd * wd + 1.0) || denom == 0.0) {
    throw Error("simulate: drive frequency collides with real mode " + std::to_string(mode));
  }
  RealComponent rc;
  rc.mode = mode;
  rc.residue = residue;
  rc.lambda = lambda;
  rc.phase = std::atan2(-wd, -lambda);
  rc.amp_decay = residue * p * wd / denom;
  rc.amp_steady = residue * p / std::sqrt(denom);
  rc.series.resize(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    rc.series(j) = rc.amp_decay * std::exp(lambda * t(j)) +
                   rc.amp_steady * std::sin(wd * t(j) + rc.phase);
  }
  return rc;
}

// Conjugate pair lambda = -sigma + j omega with complex residue R:
// transient 2 Re[R P wd / (lambda^2 + wd^2) e^(lambda t)] plus the steady
// sinusoid from the poles at +-j wd. Both are expressed through amplitude
// and phase constants so the terms stay inspectable.
PairComponent pair_component(int mode, cplx residue, cplx lambda, double p, double wd,
                             const Eigen::VectorXd& t) {
  PairComponent pc;
  pc.mode = mode;
  pc.residue = residue;
  pc.sigma = -lambda.real();
  pc.omega = lambda.imag();
  pc.theta = std::arg(residue);

  const cplx d1 = lambda * lambda + wd * wd;  // equals (sig^2+wd^2-om^2) - 2j sig om
  if (std::abs(d1) <= 1e-12 * (std::norm(lambda) + wd * wd)) {
    throw Error("simulate: drive frequency collides with pair mode " + std::to_string(mode));
  }
  pc.psi = std::arg(d1);
  pc.amp_transient = 2.0 * p * wd * std::abs(residue) / std::abs(d1);

  const double sg = pc.sigma, om = pc.omega, th = pc.theta;
  const cplx den(sg * sg + om * om - wd * wd, 2.0 * sg * wd);
  const double num_re = sg * std::cos(th) - om * std::sin(th);
  const double num_im = wd * std::cos(th);
  pc.phi = std::arg(std::conj(den));
  pc.alpha = std::atan2(num_re, num_im);  // angle of (wd cos th + j (sg cos th - om sin th))
  pc.amp_steady =
      2.0 * p * std::abs(residue) * std::hypot(num_re, num_im) / std::abs(den);

  pc.series.resize(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    pc.series(j) = pc.amp_transient * std::exp(-sg * t(j)) * std::cos(om * t(j) + th - pc.psi) +
                   pc.amp_steady * std::cos(wd * t(j) + pc.phi - pc.alpha);
  }
  return pc;
}

void add_resonance(PairComponent& pc, double p, double wd, const Eigen::VectorXd& t) {
  pc.resonant = true;
  pc.envelope_scale = p * std::abs(pc.residue) / pc.sigma;
  pc.resonance.resize(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    pc.resonance(j) = pc.envelope_scale * (1.0 - std::exp(-pc.sigma * t(j))) *
                      std::sin(wd * t(j) + pc.theta);
  }
}

bool contains(const std::vector<int>& v, int x) {
  for (int e : v)
    if (e == x) return true;
  return false;
}

}  // namespace

ModalComponents simulate_modal(const LtiSystem& sys, const EigenStructure& eig,
                               const ModeClassification& cls, const ForcedInput& input,
                               const std::vector<int>& outputs, double duration_s,
                               double fs) {
  sys.validate();
  if (input.theta != 0.0) {
    throw Error("simulate: nonzero drive phase is not supported by the closed form");
  }
  if (input.amplitude == 0.0 || !std::isfinite(input.amplitude)) {
    throw Error("simulate: drive amplitude must be nonzero and finite");
  }
  if (!(input.omega > 0.0) || !std::isfinite(input.omega)) {
    throw Error("simulate: drive frequency must be positive");
  }
  if (input.input_index < 0 || input.input_index >= sys.inputs()) {
    throw Error("simulate: input index " + std::to_string(input.input_index) +
                " out of range");
  }
  if (outputs.empty()) throw Error("simulate: no output rows requested");

  ModalComponents mc;
  mc.times = sample_times(duration_s, fs);
  mc.fs = fs;
  mc.duration = duration_s;
  mc.input = input;
  mc.classification = cls;

  for (int k : outputs) {
    if (k < 0 || k >= sys.outputs()) {
      throw Error("simulate: output index " + std::to_string(k) + " out of range");
    }
    ChannelComponents ch;
    ch.output_index = k;
    const Eigen::VectorXcd residues = transfer_residues(sys, eig, k, input.input_index);

    for (int i : eig.real_modes) {
      const cplx r = residues(i);
      // Residues of real modes of a real system are real up to round-off.
      ch.real_modes.push_back(real_component(i, r.real(), eig.eigenvalues(i).real(),
                                             input.amplitude, input.omega, mc.times));
    }
    for (int i : eig.pair_modes) {
      PairComponent pc = pair_component(i, residues(i), eig.eigenvalues(i), input.amplitude,
                                        input.omega, mc.times);
      if (contains(cls.resonant_pairs, i)) {
        add_resonance(pc, input.amplitude, input.omega, mc.times);
      }
      ch.pairs.push_back(std::move(pc));
    }
    mc.channels.push_back(std::move(ch));
  }
  return mc;
}

Eigen::MatrixXd total_response(const ModalComponents& mc) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mc.channels.size()), mc.times.size());
  for (std::size_t k = 0; k < mc.channels.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (const auto& rcomp : mc.channels[k].real_modes) out.row(row) += rcomp.series;
    for (const auto& pcomp : mc.channels[k].pairs) out.row(row) += pcomp.series;
  }
  return out;
}

Eigen::MatrixXd approx_response(const ModalComponents& mc) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mc.channels.size()), mc.times.size());
  for (std::size_t k = 0; k < mc.channels.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (const auto& rcomp : mc.channels[k].real_modes) out.row(row) += rcomp.series;
    for (const auto& pcomp : mc.channels[k].pairs) {
      out.row(row) += pcomp.resonant ? pcomp.resonance : pcomp.series;
    }
  }
  return out;
}

Eigen::MatrixXd resonance_free(const ModalComponents& mc) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mc.channels.size()), mc.times.size());
  for (std::size_t k = 0; k < mc.channels.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (const auto& rcomp : mc.channels[k].real_modes) out.row(row) += rcomp.series;
    for (const auto& pcomp : mc.channels[k].pairs) {
      if (!pcomp.resonant) out.row(row) += pcomp.series;
    }
  }
  return out;
}

Eigen::MatrixXd resonance_matrix(const ModalComponents& mc) {
  if (mc.classification.resonant_pairs.empty()) {
    throw Error("resonance_matrix: no resonance component under the current bandwidth");
  }
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mc.channels.size()), mc.times.size());
  for (std::size_t k = 0; k < mc.channels.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (const auto& pcomp : mc.channels[k].pairs) {
      if (pcomp.resonant) out.row(row) += pcomp.resonance;
    }
  }
  return out;
}

ResonanceFactors resonance_factors(const ModalComponents& mc) {
  const auto& resonant = mc.classification.resonant_pairs;
  if (resonant.empty()) {
    throw Error("resonance_factors: no resonance component under the current bandwidth");
  }
  const auto m = static_cast<Eigen::Index>(mc.channels.size());
  const auto p = static_cast<Eigen::Index>(resonant.size());
  ResonanceFactors rf;
  rf.g.resize(m, 2 * p);
  rf.f.resize(2 * p, mc.times.size());

  const double wd = mc.input.omega;
  for (Eigen::Index pi = 0; pi < p; ++pi) {
    const int mode = resonant[static_cast<std::size_t>(pi)];
    double sigma = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const PairComponent* pc = nullptr;
      for (const auto& cand : mc.channels[static_cast<std::size_t>(k)].pairs) {
        if (cand.mode == mode) pc = &cand;
      }
      if (pc == nullptr || !pc->resonant) {
        throw Error("resonance_factors: channel is missing the resonant pair series");
      }
      sigma = pc->sigma;
      rf.g(k, 2 * pi) = pc->envelope_scale * std::cos(pc->theta);
      rf.g(k, 2 * pi + 1) = pc->envelope_scale * std::sin(pc->theta);
    }
    for (Eigen::Index j = 0; j < mc.times.size(); ++j) {
      const double env = 1.0 - std::exp(-sigma * mc.times(j));
      rf.f(2 * pi, j) = env * std::sin(wd * mc.times(j));
      rf.f(2 * pi + 1, j) = env * std::cos(wd * mc.times(j));
    }
  }
  return rf;
}

MeasurementMatrix simulate_measurements(const LtiSystem& sys, const EigenStructure& eig,
                                        const ModeClassification& cls,
                                        const ForcedInput& input,
                                        const std::vector<Channel>& channels,
                                        double duration_s, double fs) {
  if (channels.size() != static_cast<std::size_t>(sys.outputs())) {
    throw Error("simulate: channel metadata count " + std::to_string(channels.size()) +
                " does not match output count " + std::to_string(sys.outputs()));
  }
  std::vector<int> outputs(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) outputs[k] = static_cast<int>(k);
  const ModalComponents mc =
      simulate_modal(sys, eig, cls, input, outputs, duration_s, fs);

  MeasurementMatrix m;
  m.channels = channels;
  m.values = total_response(mc);
  m.fs_hz = fs;
  m.start_s = 0.0;
  return m;
}

}  // namespace folo
