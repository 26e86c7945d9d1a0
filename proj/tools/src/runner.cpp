#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "cdklab/kernel.hpp"
#include "cdklab/perturbation.hpp"
#include "cdklab/stieltjes.hpp"

namespace cdklab::cli {

namespace {

std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string jnum(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string jnum(const std::optional<double>& v) { return v ? jnum(*v) : "null"; }

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string jnum_array(const std::vector<double>& vs) {
  std::string out = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += jnum(vs[i]);
  }
  return out + "]";
}

// CSV quoting only when the cell needs it, so numeric columns stay bare.
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ScalingMode scaling_mode(const ExperimentConfig& config) {
  return config.mode == "by_diag" ? ScalingMode::ByDiag : ScalingMode::ByN;
}

// Short form for human-facing labels; row data stays at full precision.
std::string label_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

std::vector<std::pair<Complex, Complex>> grid_pairs(const ExperimentConfig& config) {
  std::vector<std::pair<Complex, Complex>> pairs;
  pairs.reserve(config.grid_a.size() * config.grid_b.size());
  for (const Complex a : config.grid_a) {
    for (const Complex b : config.grid_b) pairs.emplace_back(a, b);
  }
  return pairs;
}

struct PerturbationSpec {
  Perturbation value;
  std::string label;
};

PerturbationSpec make_perturbation(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.amplitude) {
    RandomDiagonal rd;
    rd.amplitude = *config.amplitude;
    rd.exponent = config.exponent.value_or(1.0);
    rd.dist = config.dist == "gaussian"  ? Dist::Gaussian
              : config.dist == "uniform" ? Dist::UniformSymmetric
                                         : Dist::Rademacher;
    rd.seed = seed;
    rd.horizon = config.effective_horizon();
    std::ostringstream label;
    label << "random(" << config.dist << ",amplitude=" << label_double(rd.amplitude)
          << ",exponent=" << label_double(rd.exponent) << ")";
    return {rd, label.str()};
  }
  if (!config.betas_text.empty()) {
    Diagonal d;
    d.betas = parse_betas(config.betas_text, 2 * config.max_n() + 2);
    return {std::move(d), "diagonal(" + config.betas_text + ")"};
  }
  return {RankOne{config.beta1.value_or(0.0)},
          "rank_one(beta1=" + label_double(config.beta1.value_or(0.0)) + ")"};
}

Row base_row(const ExperimentConfig& config, const std::string& measure_label) {
  Row row;
  row.experiment_id = config.experiment_id;
  row.measure = measure_label;
  return row;
}

void fill_sample(Row& row, const KernelSample& sample) {
  row.value_re = std::real(sample.value);
  row.value_im = std::imag(sample.value);
  row.target_re = std::real(sample.target);
  row.target_im = std::imag(sample.target);
  row.abs_err = sample.abs_err;
}

// Shared row sweep for the kernel-sample subcommands: one row per
// (seed?, x0, n, grid pair), evaluated in parallel, failures downgraded to a
// status note on the row.
template <class Eval>
std::vector<Row> kernel_rows(const ExperimentConfig& config, const std::string& measure_label,
                             const std::string& perturbation_label,
                             const std::vector<std::optional<std::uint64_t>>& seeds,
                             Eval&& eval) {
  const auto pairs = grid_pairs(config);
  struct Task {
    std::optional<std::uint64_t> seed;
    double x0;
    std::size_t n;
    Complex a;
    Complex b;
  };
  std::vector<Task> tasks;
  tasks.reserve(seeds.size() * config.x0.size() * config.n_list.size() * pairs.size());
  for (const auto& seed : seeds) {
    for (const double x0 : config.x0) {
      for (const std::size_t n : config.n_list) {
        for (const auto& [a, b] : pairs) tasks.push_back({seed, x0, n, a, b});
      }
    }
  }
  std::vector<Row> rows(tasks.size());
  parallel_for(tasks.size(), config.effective_threads(), [&](std::size_t i) {
    const Task& t = tasks[i];
    Row row = base_row(config, measure_label);
    row.perturbation = perturbation_label;
    row.seed = t.seed;
    row.x0 = t.x0;
    row.n = t.n;
    row.re_a = std::real(t.a);
    row.im_a = std::imag(t.a);
    row.re_b = std::real(t.b);
    row.im_b = std::imag(t.b);
    row.mode = config.mode;
    try {
      fill_sample(row, eval(t.seed, t.x0, t.a, t.b, t.n));
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    rows[i] = std::move(row);
  });
  return rows;
}

std::string verdict_name(PointMassVerdict v) {
  switch (v) {
    case PointMassVerdict::Diverges: return "diverges";
    case PointMassVerdict::Saturates: return "saturates";
    case PointMassVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string report_json(const UniversalityReport& rep) {
  std::ostringstream out;
  out << "{\"x0\":" << jnum(rep.x0) << ",\"n\":[";
  for (std::size_t i = 0; i < rep.n_list.size(); ++i) {
    if (i) out << ",";
    out << rep.n_list[i];
  }
  out << "],\"rho_hat\":" << jnum_array(rep.rho_hat)
      << ",\"sup_err\":" << jnum_array(rep.sup_err)
      << ",\"diag_trace\":" << jnum_array(rep.diag_trace)
      << ",\"point_mass_verdict\":" << json_escape(verdict_name(rep.verdict))
      << ",\"saturation_value\":"
      << (rep.saturation_value ? jnum(*rep.saturation_value) : "null")
      << ",\"status\":" << json_escape(rep.status) << "}";
  return out.str();
}

// rho_hat of the first-kind kernel at one n; NaN when the weight is missing.
double rho_hat_or_nan(const JacobiParameters& params, double x0, std::size_t n) {
  try {
    const WeightBundle wb = weights(params, x0);
    double diag = 0.0;
    recur_p(params, x0, n, [&](std::size_t, double p) { diag += p * p; });
    return diag * wb.w / static_cast<double>(n);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

double sup_abs_err(const std::vector<Row>& rows, std::size_t n,
                   std::optional<std::uint64_t> seed, std::optional<double> x0) {
  double sup = 0.0;
  bool any = false;
  for (const Row& row : rows) {
    if (row.status != "ok" || row.n != n) continue;
    if (seed && row.seed != seed) continue;
    if (x0 && row.x0 != x0) continue;
    if (row.abs_err) {
      sup = std::max(sup, *row.abs_err);
      any = true;
    }
  }
  return any ? sup : std::nan("");
}

RunOutput run_universality(const ExperimentConfig& config) {
  const JacobiParameters params = make_measure(config);
  RunOutput out;
  out.rows = kernel_rows(config, config.measure, "", {std::nullopt},
                         [&](std::optional<std::uint64_t>, double x0, Complex a, Complex b,
                             std::size_t n) {
                           return scaled_kernel(params, x0, a, b, n, scaling_mode(config));
                         });
  std::ostringstream summary;
  summary << "{\"reports\":[";
  const auto pairs = grid_pairs(config);
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    if (i) summary << ",";
    try {
      summary << report_json(universality_report(params, config.x0[i], config.n_list, pairs));
    } catch (const std::exception& e) {
      summary << "{\"x0\":" << jnum(config.x0[i]) << ",\"error\":" << json_escape(e.what())
              << "}";
    }
  }
  summary << "]}";
  out.summary = summary.str();
  return out;
}

RunOutput run_second_kind(const ExperimentConfig& config) {
  const JacobiParameters params = make_measure(config);
  RunOutput out;
  out.rows = kernel_rows(config, config.measure, "", {std::nullopt},
                         [&](std::optional<std::uint64_t>, double x0, Complex a, Complex b,
                             std::size_t n) {
                           return second_kind_kernel(params, x0, a, b, n);
                         });
  std::ostringstream summary;
  summary << "{\"points\":[";
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    if (i) summary << ",";
    summary << "{\"x0\":" << jnum(config.x0[i]) << ",\"rho_hat\":[";
    for (std::size_t j = 0; j < config.n_list.size(); ++j) {
      if (j) summary << ",";
      summary << jnum(rho_hat_or_nan(params, config.x0[i], config.n_list[j]));
    }
    summary << "],\"sup_err\":[";
    for (std::size_t j = 0; j < config.n_list.size(); ++j) {
      if (j) summary << ",";
      summary << jnum(sup_abs_err(out.rows, config.n_list[j], std::nullopt, config.x0[i]));
    }
    summary << "]}";
  }
  summary << "]}";
  out.summary = summary.str();
  return out;
}

RunOutput run_perturb(const ExperimentConfig& config) {
  const JacobiParameters base = make_measure(config);
  const PerturbationSpec spec = make_perturbation(config, config.seeds.front());
  const JacobiParameters applied = apply(base, spec.value);
  RunOutput out;
  out.rows = kernel_rows(config, config.measure, spec.label, {std::nullopt},
                         [&](std::optional<std::uint64_t>, double x0, Complex a, Complex b,
                             std::size_t n) {
                           return scaled_kernel(applied, x0, a, b, n, scaling_mode(config));
                         });
  std::ostringstream summary;
  summary << "{\"perturbation\":" << json_escape(spec.label) << ",\"points\":[";
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    if (i) summary << ",";
    const double x0 = config.x0[i];
    const double rho_base = rho_hat_or_nan(base, x0, config.max_n());
    const double rho_pert = rho_hat_or_nan(applied, x0, config.max_n());
    summary << "{\"x0\":" << jnum(x0) << ",\"rho_hat_base\":" << jnum(rho_base)
            << ",\"rho_hat_perturbed\":" << jnum(rho_pert)
            << ",\"rho_ratio\":" << jnum(rho_pert / rho_base);
    try {
      const VarParTrace trace = variation_of_parameters(base, applied, x0, config.max_n());
      summary << ",\"varpar\":{\"converged\":" << jbool(trace.converged)
              << ",\"u1_limit\":" << jnum(trace.u1_limit)
              << ",\"u2_limit\":" << jnum(trace.u2_limit) << "}";
    } catch (const std::exception& e) {
      summary << ",\"varpar\":{\"error\":" << json_escape(e.what()) << "}";
    }
    summary << "}";
  }
  summary << "]}";
  out.summary = summary.str();
  return out;
}

RunOutput run_random_perturb(const ExperimentConfig& config) {
  const JacobiParameters base = make_measure(config);
  std::vector<std::optional<std::uint64_t>> seeds;
  std::vector<JacobiParameters> applied;
  std::string label;
  for (const std::uint64_t seed : config.seeds) {
    const PerturbationSpec spec = make_perturbation(config, seed);
    label = spec.label;
    seeds.emplace_back(seed);
    applied.push_back(apply(base, spec.value));
  }
  RunOutput out;
  out.rows = kernel_rows(config, config.measure, label, seeds,
                         [&](std::optional<std::uint64_t> seed, double x0, Complex a,
                             Complex b, std::size_t n) {
                           const auto it =
                               std::find(config.seeds.begin(), config.seeds.end(), *seed);
                           const auto& params = applied[it - config.seeds.begin()];
                           return scaled_kernel(params, x0, a, b, n, scaling_mode(config));
                         });

  std::ostringstream summary;
  summary << "{\"perturbation\":" << json_escape(label) << ",\"seeds\":[";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    if (i) summary << ",";
    summary << "{\"seed\":" << config.seeds[i] << ",\"sup_err\":"
            << jnum(sup_abs_err(out.rows, config.max_n(), config.seeds[i], std::nullopt))
            << "}";
  }
  summary << "],\"l2\":";
  const PerturbationSpec first = make_perturbation(config, config.seeds.front());
  const L2Report l2 = l2_condition_partial(base, std::get<RandomDiagonal>(first.value),
                                           config.x0.front(), config.l2_n);
  summary << "{\"x0\":" << jnum(config.x0.front()) << ",\"n\":" << l2.n
          << ",\"s_n\":" << jnum(l2.s_n) << ",\"s_2n\":" << jnum(l2.s_2n)
          << ",\"rel_increment\":" << jnum(l2.rel_increment)
          << ",\"converged\":" << jbool(l2.converged) << "}}";
  out.summary = summary.str();
  return out;
}

RunOutput run_stieltjes(const ExperimentConfig& config) {
  const JacobiParameters params = make_measure(config);
  RunOutput out;
  std::ostringstream summary;
  summary << "{\"points\":[";
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    const double x0 = config.x0[i];
    Row row = base_row(config, config.measure);
    row.x0 = x0;
    row.mode = "boundary";
    const BoundaryValue bv = boundary_F(params, x0);
    const WeightBundle wb = weights_from_boundary(bv, config.beta1);
    row.value_re = std::real(bv.F);
    row.value_im = std::imag(bv.F);
    row.abs_err = bv.err_estimate;
    if (!bv.converged) row.status = "boundary value did not stabilize";
    out.rows.push_back(std::move(row));
    if (i) summary << ",";
    summary << "{\"x0\":" << jnum(x0) << ",\"F_re\":" << jnum(std::real(bv.F))
            << ",\"F_im\":" << jnum(std::imag(bv.F)) << ",\"w\":" << jnum(wb.w)
            << ",\"w_tilde\":" << jnum(wb.w_tilde) << ",\"w_beta\":" << jnum(wb.w_beta)
            << ",\"err_estimate\":" << jnum(bv.err_estimate)
            << ",\"converged\":" << jbool(bv.converged) << "}";
  }
  summary << "]}";
  out.summary = summary.str();
  return out;
}

RunOutput run_eigenvalue(const ExperimentConfig& config) {
  const JacobiParameters base = make_measure(config);
  const double beta = *config.beta1;
  const auto [ess_lo, ess_hi] = base.essential_spectrum();
  double max_a = base.tail_a();
  for (double v : base.head_a()) max_a = std::max(max_a, v);
  double max_b = std::abs(base.tail_b());
  for (double v : base.head_b()) max_b = std::max(max_b, std::abs(v));
  const double bound = max_b + std::abs(beta) + 2.0 * max_a + 1.0;

  RunOutput out;
  std::ostringstream summary;
  summary << "{\"beta1\":" << jnum(beta) << ",\"found\":[";
  bool first = true;
  const auto probe = [&](double lo, double hi) {
    if (!(lo < hi)) return;
    std::optional<Eigenpair> pair;
    std::string error;
    try {
      pair = eigenvalue_and_mass(base, beta, lo, hi);
    } catch (const std::exception& e) {
      error = e.what();
    }
    if (!pair) {
      if (!error.empty()) {
        Row row = base_row(config, config.measure);
        row.mode = "eigenvalue";
        row.perturbation = "rank_one(beta1=" + label_double(beta) + ")";
        row.status = error;
        out.rows.push_back(std::move(row));
      }
      return;
    }
    Row row = base_row(config, config.measure);
    row.mode = "eigenvalue";
    row.perturbation = "rank_one(beta1=" + label_double(beta) + ")";
    row.value_re = pair->energy;
    row.value_im = 0.0;
    row.target_re = pair->mass;
    row.abs_err = pair->residual;
    out.rows.push_back(std::move(row));
    if (!first) summary << ",";
    first = false;
    summary << "{\"energy\":" << jnum(pair->energy) << ",\"mass\":" << jnum(pair->mass)
            << ",\"residual\":" << jnum(pair->residual)
            << ",\"f_prime\":" << jnum(pair->f_prime) << "}";
  };
  const double margin_lo = 1e-9 * (1.0 + std::abs(ess_lo));
  const double margin_hi = 1e-9 * (1.0 + std::abs(ess_hi));
  probe(-bound, ess_lo - margin_lo);
  probe(ess_hi + margin_hi, bound);
  summary << "]}";
  if (out.rows.empty()) {
    Row row = base_row(config, config.measure);
    row.mode = "eigenvalue";
    row.perturbation = "rank_one(beta1=" + label_double(beta) + ")";
    row.status = "no eigenvalue in the searched brackets";
    out.rows.push_back(std::move(row));
  }
  out.summary = summary.str();
  return out;
}

RunOutput run_identity_check(const ExperimentConfig& config) {
  const IdentityCheck check =
      sinc_identity_check(*config.rho, *config.a, *config.b, config.quad_tol);
  const Complex third =
      sinc_identity_third_form(*config.rho, *config.a, *config.b, config.quad_tol);
  const double third_dev = std::abs(third - check.lhs);

  RunOutput out;
  Row row = base_row(config, "");
  row.mode = "identity";
  row.re_a = std::real(*config.a);
  row.im_a = std::imag(*config.a);
  row.re_b = std::real(*config.b);
  row.im_b = std::imag(*config.b);
  row.value_re = std::real(check.lhs);
  row.value_im = std::imag(check.lhs);
  row.target_re = std::real(check.rhs_neg);
  row.target_im = std::imag(check.rhs_neg);
  row.abs_err = check.max_dev;
  const bool ok = check.converged && check.max_dev <= config.quad_tol;
  if (!ok) row.status = "identity deviation exceeds tolerance";
  out.rows.push_back(std::move(row));
  out.mandatory_failed = !ok;

  std::ostringstream summary;
  summary << "{\"rho\":" << jnum(*config.rho) << ",\"max_dev\":" << jnum(check.max_dev)
          << ",\"err_estimate\":" << jnum(check.err_estimate)
          << ",\"converged\":" << jbool(check.converged)
          << ",\"third_form_re\":" << jnum(std::real(third))
          << ",\"third_form_im\":" << jnum(std::imag(third))
          << ",\"third_dev\":" << jnum(third_dev) << "}";
  out.summary = summary.str();
  return out;
}

RunOutput run_varpar(const ExperimentConfig& config) {
  const JacobiParameters base = make_measure(config);
  const PerturbationSpec spec = make_perturbation(config, config.seeds.front());
  const JacobiParameters applied = apply(base, spec.value);
  RunOutput out;
  std::ostringstream summary;
  summary << "{\"perturbation\":" << json_escape(spec.label) << ",\"points\":[";
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    const double x0 = config.x0[i];
    Row row = base_row(config, config.measure);
    row.perturbation = spec.label;
    row.x0 = x0;
    row.n = config.max_n();
    row.mode = "varpar";
    if (config.amplitude) row.seed = config.seeds.front();
    if (i) summary << ",";
    try {
      const VarParTrace trace = variation_of_parameters(base, applied, x0, config.max_n());
      row.value_re = trace.u1_limit;
      row.value_im = trace.u2_limit;
      if (!trace.converged) row.status = "coefficients still drifting";
      summary << "{\"x0\":" << jnum(x0) << ",\"u1_limit\":" << jnum(trace.u1_limit)
              << ",\"u2_limit\":" << jnum(trace.u2_limit)
              << ",\"converged\":" << jbool(trace.converged) << "}";
    } catch (const std::exception& e) {
      row.status = e.what();
      summary << "{\"x0\":" << jnum(x0) << ",\"error\":" << json_escape(e.what()) << "}";
    }
    out.rows.push_back(std::move(row));
  }
  summary << "]}";
  out.summary = summary.str();
  return out;
}

}  // namespace

RunOutput run_subcommand(const ExperimentConfig& config) {
  if (config.subcommand == "universality") return run_universality(config);
  if (config.subcommand == "second-kind") return run_second_kind(config);
  if (config.subcommand == "perturb") return run_perturb(config);
  if (config.subcommand == "random-perturb") return run_random_perturb(config);
  if (config.subcommand == "stieltjes") return run_stieltjes(config);
  if (config.subcommand == "eigenvalue") return run_eigenvalue(config);
  if (config.subcommand == "identity-check") return run_identity_check(config);
  if (config.subcommand == "varpar") return run_varpar(config);
  throw ConfigError("subcommand", "unknown subcommand '" + config.subcommand + "'");
}

void sort_rows(std::vector<Row>& rows) {
  const auto key = [](const Row& r) {
    return std::make_tuple(r.x0, r.n, r.re_a, r.im_a, r.re_b, r.im_b, r.seed);
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const Row& lhs, const Row& rhs) { return key(lhs) < key(rhs); });
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string to_csv(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "experiment_id,measure,perturbation,seed,x0,n,re_a,im_a,re_b,im_b,mode,"
         "value_re,value_im,target_re,target_im,abs_err,status\n";
  for (const Row& r : rows) {
    out << csv_escape(r.experiment_id) << ',' << csv_escape(r.measure) << ','
        << csv_escape(r.perturbation) << ',';
    if (r.seed) out << *r.seed;
    out << ',' << csv_cell(r.x0) << ',';
    if (r.n) out << *r.n;
    out << ',' << csv_cell(r.re_a) << ',' << csv_cell(r.im_a) << ',' << csv_cell(r.re_b)
        << ',' << csv_cell(r.im_b) << ',' << csv_escape(r.mode) << ','
        << csv_cell(r.value_re) << ',' << csv_cell(r.value_im) << ','
        << csv_cell(r.target_re) << ',' << csv_cell(r.target_im) << ','
        << csv_cell(r.abs_err) << ',' << csv_escape(r.status) << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<Row>& rows, const std::string& summary) {
  std::ostringstream out;
  out << "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (i) out << ",";
    out << "{\"experiment_id\":" << json_escape(r.experiment_id)
        << ",\"measure\":" << json_escape(r.measure)
        << ",\"perturbation\":" << json_escape(r.perturbation) << ",\"seed\":";
    if (r.seed) {
      out << *r.seed;
    } else {
      out << "null";
    }
    out << ",\"x0\":" << jnum(r.x0) << ",\"n\":";
    if (r.n) {
      out << *r.n;
    } else {
      out << "null";
    }
    out << ",\"re_a\":" << jnum(r.re_a) << ",\"im_a\":" << jnum(r.im_a)
        << ",\"re_b\":" << jnum(r.re_b) << ",\"im_b\":" << jnum(r.im_b)
        << ",\"mode\":" << json_escape(r.mode) << ",\"value_re\":" << jnum(r.value_re)
        << ",\"value_im\":" << jnum(r.value_im) << ",\"target_re\":" << jnum(r.target_re)
        << ",\"target_im\":" << jnum(r.target_im) << ",\"abs_err\":" << jnum(r.abs_err)
        << ",\"status\":" << json_escape(r.status) << "}";
  }
  out << "],\"summary\":" << (summary.empty() ? "{}" : summary) << "}\n";
  return out.str();
}

int run_and_emit(const ExperimentConfig& config) {
  RunOutput result = run_subcommand(config);
  sort_rows(result.rows);
  const std::string body = config.format == "csv" ? to_csv(result.rows)
                                                  : to_json(result.rows, result.summary);
  if (config.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw ConfigError("out", "cannot write '" + config.out + "'");
    file << body;
    if (config.format == "csv") {
      const std::string sidecar = config.out + ".summary.json";
      std::ofstream sfile(sidecar, std::ios::binary);
      if (!sfile) throw ConfigError("out", "cannot write '" + sidecar + "'");
      sfile << (result.summary.empty() ? "{}" : result.summary) << "\n";
    }
  }
  return result.mandatory_failed ? 2 : 0;
}

}  // namespace cdklab::cli
