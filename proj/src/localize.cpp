#include "folo/localize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "folo/error.hpp"
#include "folo/json_writer.hpp"

namespace folo {

namespace {

std::string format_nonconvergence(double residual, int iterations) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "RPCA did not converge: residual %.3e after %d iterations",
                residual, iterations);
  return buf;
}

}  // namespace

LocalizationReport locate(const MeasurementMatrix& y, const LocalizeConfig& cfg) {
  if (y.values.size() == 0) throw Error("locate: empty measurement matrix");
  if (y.channels.size() != static_cast<std::size_t>(y.values.rows())) {
    throw Error("locate: channel metadata does not match row count");
  }
  if (!(cfg.window_s > 0.0) || !std::isfinite(cfg.window_s)) {
    throw Error("locate: analysis window must be positive");
  }
  if (cfg.top_k < 1) throw Error("locate: ranking length must be at least 1");
  if (cfg.xi && !(*cfg.xi > 0.0)) throw Error("locate: xi must be positive");

  LocalizationReport report;

  // Analysis window from the start of the record.
  const auto wanted = static_cast<Eigen::Index>(std::floor(cfg.window_s * y.fs_hz)) + 1;
  if (wanted < 2) throw Error("locate: analysis window covers fewer than two samples");
  Eigen::Index ncols = y.values.cols();
  if (wanted < ncols) {
    ncols = wanted;
  } else if (wanted > ncols) {
    report.warnings.push_back("locate: record shorter than analysis window, using all " +
                              std::to_string(ncols) + " samples");
  }
  MeasurementMatrix window;
  window.channels = y.channels;
  window.values = y.values.leftCols(ncols);
  window.fs_hz = y.fs_hz;
  window.start_s = y.start_s;
  if (window.values.cwiseAbs().maxCoeff() == 0.0) {
    throw Error("locate: no oscillation present");
  }

  NormalizedMeasurementMatrix yn = normalize(window);
  for (const auto& w : yn.warnings) report.warnings.push_back(w);
  report.scale_factors = yn.scale_factors;

  RpcaConfig rcfg = cfg.rpca;
  rcfg.xi = cfg.xi ? *cfg.xi
                   : default_xi(static_cast<int>(yn.matrix.values.rows()),
                                static_cast<int>(yn.matrix.values.cols()));
  report.xi = rcfg.xi;

  const RpcaResult res = rpca_exact_alm(yn.matrix.values, rcfg);
  report.converged = res.converged;
  report.residual = res.residual;
  if (!res.converged) {
    report.warnings.push_back(format_nonconvergence(res.residual, res.outer_iterations));
  }

  const Eigen::MatrixXd& s = res.sparse;
  Eigen::Index best_row = 0, best_col = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      const double v = std::abs(s(i, j));
      if (v > best) {
        best = v;
        best_row = i;
        best_col = j;
      }
    }
  }
  if (best == 0.0) report.warnings.push_back("locate: sparse component is zero");

  report.source_row = static_cast<int>(best_row);
  report.source_col = static_cast<int>(best_col);
  report.source_channel = window.channels[static_cast<std::size_t>(best_row)];

  std::vector<RankEntry> entries(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    RankEntry& e = entries[static_cast<std::size_t>(i)];
    e.channel = window.channels[static_cast<std::size_t>(i)];
    e.row = static_cast<int>(i);
    e.peak_abs_s = s.row(i).cwiseAbs().maxCoeff();
    e.row_energy = s.row(i).squaredNorm();
  }
  std::stable_sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    return a.peak_abs_s > b.peak_abs_s;
  });
  const auto keep = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(cfg.top_k));
  entries.resize(keep);
  report.ranking = std::move(entries);
  return report;
}

std::string report_to_json(const LocalizationReport& report, const std::string& config_json) {
  JsonWriter w;
  w.begin_object();
  w.field("source_bus", report.source_channel.bus);
  w.field("source_type", report.source_channel.type.str());
  w.field("source_row", report.source_row);
  w.field("source_col", report.source_col);
  w.field("xi", report.xi);
  w.field("converged", report.converged);
  w.field("residual", report.residual);
  w.begin_array("ranking");
  for (const auto& e : report.ranking) {
    w.begin_object_in_array();
    w.field("channel", e.channel.str());
    w.field("row", e.row);
    w.field("peak_abs_s", e.peak_abs_s);
    w.field("row_energy", e.row_energy);
    w.end_object();
  }
  w.end_array();
  w.begin_array("warnings");
  for (const auto& msg : report.warnings) w.element(msg);
  w.end_array();
  w.begin_array("scale_factors");
  for (const auto& [type, scale] : report.scale_factors) {
    w.begin_object_in_array();
    w.field("type", type.str());
    w.field("scale", scale);
    w.end_object();
  }
  w.end_array();
  w.field("norm_kind", NormalizedMeasurementMatrix::norm_kind);
  if (!config_json.empty()) w.field_raw("config", config_json);
  w.end_object();
  return w.str() + "\n";
}

MeasurementMatrix add_noise(const MeasurementMatrix& y, double snr_db, std::uint64_t seed,
                            std::vector<std::string>* warnings) {
  if (y.values.size() == 0) throw Error("add_noise: empty measurement matrix");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw Error("add_noise: snr must be finite or +inf");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) return y;

  const double matrix_power = y.values.squaredNorm() / static_cast<double>(y.values.size());
  const double factor = std::pow(10.0, -snr_db / 10.0);

  MeasurementMatrix out = y;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < y.values.rows(); ++i) {
    double power = y.values.row(i).squaredNorm() / static_cast<double>(y.values.cols());
    if (power == 0.0) {
      power = matrix_power;
      if (warnings != nullptr) {
        warnings->push_back("add_noise: zero-power row " + std::to_string(i) +
                            ", noise scaled to matrix-wide power");
      }
    }
    const double stddev = std::sqrt(power * factor);
    for (Eigen::Index j = 0; j < y.values.cols(); ++j) {
      out.values(i, j) += stddev * unit(rng);
    }
  }
  return out;
}

EvaluationReport evaluate(const std::vector<SuiteCase>& suite, const LocalizeConfig& cfg,
                          int n0) {
  if (suite.empty()) throw Error("evaluate: empty suite");
  if (n0 < 0) throw Error("evaluate: vicinity radius must be nonnegative");

  EvaluationReport out;
  out.n0 = n0;
  int exact = 0, vicinity = 0;
  for (const auto& sc : suite) {
    const LocalizationReport rep = locate(sc.measurements, cfg);
    CaseVerdict v;
    v.name = sc.name;
    v.true_bus = sc.true_bus;
    v.identified_bus = rep.source_channel.bus;
    v.identified_type = rep.source_channel.type;
    v.source_row = rep.source_row;
    v.distance = graph_distance(sc.topology, sc.true_bus, rep.source_channel.bus);
    v.exact_hit = v.distance == 0;
    v.vicinity_hit = v.distance != kInfiniteDistance && v.distance <= n0;
    v.converged = rep.converged;
    exact += v.exact_hit ? 1 : 0;
    vicinity += v.vicinity_hit ? 1 : 0;
    out.cases.push_back(std::move(v));
  }
  out.exact_accuracy = static_cast<double>(exact) / static_cast<double>(suite.size());
  out.vicinity_accuracy = static_cast<double>(vicinity) / static_cast<double>(suite.size());
  return out;
}

std::string evaluation_to_json(const EvaluationReport& report, const std::string& config_json) {
  JsonWriter w;
  w.begin_object();
  w.field("n0", report.n0);
  w.field("exact_accuracy", report.exact_accuracy);
  w.field("vicinity_accuracy", report.vicinity_accuracy);
  w.begin_array("cases");
  for (const auto& c : report.cases) {
    w.begin_object_in_array();
    w.field("name", c.name);
    w.field("true_bus", c.true_bus);
    w.field("identified_bus", c.identified_bus);
    w.field("identified_type", c.identified_type.str());
    w.field("source_row", c.source_row);
    if (c.distance == kInfiniteDistance) {
      w.field_null("distance");
    } else {
      w.field("distance", c.distance);
    }
    w.field("exact_hit", c.exact_hit);
    w.field("vicinity_hit", c.vicinity_hit);
    w.field("converged", c.converged);
    w.end_object();
  }
  w.end_array();
  if (!config_json.empty()) w.field_raw("config", config_json);
  w.end_object();
  return w.str() + "\n";
}

}  // namespace folo
