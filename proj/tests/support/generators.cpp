#include "support/generators.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "folo/modal.hpp"

namespace testsupport {

folo::Topology ring_topology(int m) {
  std::vector<int> buses;
  std::vector<std::pair<int, int>> lines;
  for (int i = 1; i <= m; ++i) {
    buses.push_back(i);
    lines.emplace_back(i, i % m + 1);
  }
  return folo::make_topology(buses, lines);
}

std::vector<folo::Channel> vm_channels(int m) {
  std::vector<folo::Channel> out;
  for (int i = 1; i <= m; ++i) out.push_back({i, folo::MeasurementType::vm()});
  return out;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi_inclusive) {
  return std::uniform_int_distribution<int>(lo, hi_inclusive)(rng);
}

struct ModeLayout {
  Eigen::MatrixXd a;
  int n_nonres = 0;
  int n_real = 0;
};

// Block-diagonal A: the resonant pair first, then non-resonant pairs, then
// real modes. Frequencies are kept mutually separated so the spectrum stays
// distinct.
ModeLayout build_modes(std::mt19937_64& rng, double sigma_r, double omega_r, int n_nonres,
                       int n_real, double nonres_sigma_lo, double nonres_sigma_hi,
                       double nonres_omega_lo, double nonres_omega_hi) {
  ModeLayout ml;
  ml.n_nonres = n_nonres;
  ml.n_real = n_real;
  const int n = 2 + 2 * n_nonres + n_real;
  ml.a = Eigen::MatrixXd::Zero(n, n);
  ml.a(0, 0) = -sigma_r;
  ml.a(0, 1) = omega_r;
  ml.a(1, 0) = -omega_r;
  ml.a(1, 1) = -sigma_r;

  std::vector<double> oms;
  int k = 2;
  for (int i = 0; i < n_nonres; ++i) {
    const double sg = uniform(rng, nonres_sigma_lo, nonres_sigma_hi);
    double om = uniform(rng, nonres_omega_lo, nonres_omega_hi);
    auto crowded = [&](double cand) {
      for (double o : oms) {
        if (std::abs(cand - o) < 0.8) return true;
      }
      return std::abs(cand - omega_r) < 1.0;
    };
    while (crowded(om)) om = uniform(rng, nonres_omega_lo, nonres_omega_hi);
    oms.push_back(om);
    ml.a(k, k) = -sg;
    ml.a(k, k + 1) = om;
    ml.a(k + 1, k) = -om;
    ml.a(k + 1, k + 1) = -sg;
    k += 2;
  }

  std::vector<double> lambdas;
  for (int i = 0; i < n_real; ++i) {
    double lam = -uniform(rng, 0.5, 2.0);
    auto crowded = [&](double cand) {
      for (double l : lambdas) {
        if (std::abs(cand - l) < 0.05) return true;
      }
      return false;
    };
    while (crowded(lam)) lam = -uniform(rng, 0.5, 2.0);
    lambdas.push_back(lam);
    ml.a(k, k) = lam;
    ++k;
  }
  return ml;
}

Eigen::MatrixXd input_column(std::mt19937_64& rng, int n_nonres, int n_real) {
  const int n = 2 + 2 * n_nonres + n_real;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 1);
  b(0, 0) = uniform(rng, 0.6, 1.0);
  int k = 2;
  for (int i = 0; i < n_nonres; ++i) {
    b(k, 0) = uniform(rng, 1.2, 2.0);
    b(k + 1, 0) = uniform(rng, -0.5, 0.5);
    k += 2;
  }
  for (int i = 0; i < n_real; ++i) {
    b(k, 0) = uniform(rng, 1.2, 2.0);
    ++k;
  }
  return b;
}

}  // namespace

GeneratedCase make_counter_intuitive_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeneratedCase gc;

  const int m = uniform_int(rng, 10, 16);
  const int n_nonres = uniform_int(rng, 2, 3);
  const int n_real = uniform_int(rng, 0, 2);
  gc.sigma_r = uniform(rng, 0.015, 0.03);
  gc.omega_r = uniform(rng, 1.8, 3.0);

  const ModeLayout ml =
      build_modes(rng, gc.sigma_r, gc.omega_r, n_nonres, n_real, 0.3, 0.9, 3.8, 8.0);
  const int n = static_cast<int>(ml.a.rows());

  gc.source_row = uniform_int(rng, 0, m - 1);
  gc.far_row = (gc.source_row + m / 2) % m;
  gc.source_bus = gc.source_row + 1;

  gc.system.a = ml.a;
  gc.system.b = input_column(rng, n_nonres, n_real);

  // The source row barely sees the resonant pair; a bus half a ring away sees
  // it loudest; only the source sees the other modes strongly.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, n);
  for (int ch = 0; ch < m; ++ch) {
    double a_r;
    if (ch == gc.source_row) {
      a_r = uniform(rng, 0.05, 0.15);
    } else if (ch == gc.far_row) {
      a_r = uniform(rng, 2.0, 2.8);
    } else {
      a_r = uniform(rng, 0.8, 1.7);
    }
    double ph = uniform(rng, 0.0, 2.0 * M_PI);
    c(ch, 0) = a_r * std::cos(ph);
    c(ch, 1) = a_r * std::sin(ph);
    int k = 2;
    for (int i = 0; i < n_nonres; ++i) {
      const double a =
          ch == gc.source_row ? uniform(rng, 3.5, 6.0) : uniform(rng, 0.02, 0.15);
      ph = uniform(rng, 0.0, 2.0 * M_PI);
      c(ch, k) = a * std::cos(ph);
      c(ch, k + 1) = a * std::sin(ph);
      k += 2;
    }
    for (int i = 0; i < n_real; ++i) {
      const double a =
          ch == gc.source_row ? uniform(rng, 3.5, 6.0) : uniform(rng, 0.02, 0.15);
      c(ch, k) = uniform(rng, 0.0, 1.0) < 0.5 ? -a : a;
      ++k;
    }
  }
  gc.system.c = c;

  gc.channels = vm_channels(m);
  gc.topology = ring_topology(m);
  gc.forcing.input_index = 0;
  gc.forcing.amplitude = 0.05;
  gc.forcing.omega = gc.omega_r + uniform(rng, -0.01, 0.01);
  gc.forcing.theta = 0.0;
  return gc;
}

GeneratedCase make_random_resonant_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeneratedCase gc;

  const int n = uniform_int(rng, 6, 12);
  const int m = uniform_int(rng, 5, 20);
  const int max_extra_pairs = (n - 2) / 2;
  const int n_nonres = uniform_int(rng, 0, max_extra_pairs);
  const int n_real = n - 2 - 2 * n_nonres;
  gc.sigma_r = uniform(rng, 0.015, 0.03);
  gc.omega_r = uniform(rng, 1.8, 3.0);

  const ModeLayout ml =
      build_modes(rng, gc.sigma_r, gc.omega_r, n_nonres, n_real, 0.3, 0.9, 3.8, 8.0);

  gc.system.a = ml.a;
  gc.system.b = input_column(rng, n_nonres, n_real);
  gc.system.c = Eigen::MatrixXd::NullaryExpr(
      m, n, [&rng]() { return uniform(rng, -1.5, 1.5); });

  gc.source_row = 0;
  gc.far_row = 0;
  gc.source_bus = 1;
  gc.channels = vm_channels(m);
  gc.topology = ring_topology(m);
  gc.forcing.input_index = 0;
  gc.forcing.amplitude = 0.05;
  gc.forcing.omega = gc.omega_r + uniform(rng, -0.01, 0.01);
  gc.forcing.theta = 0.0;
  return gc;
}

folo::MeasurementMatrix render_case(const GeneratedCase& gc, double duration_s, double fs) {
  const folo::EigenStructure eig = folo::eigendecompose(gc.system);
  const folo::ModeClassification cls = folo::classify_modes(eig, gc.forcing.omega);
  return folo::simulate_measurements(gc.system, eig, cls, gc.forcing, gc.channels,
                                     duration_s, fs);
}

}  // namespace testsupport
