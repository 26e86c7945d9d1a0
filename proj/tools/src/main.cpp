#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

namespace {

using cdklab::cli::ConfigError;
using cdklab::cli::ExperimentConfig;

// String-typed staging for every flag so that "not given" is distinguishable
// from a default; config-file values apply first, explicit flags override.
struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::string> measure;
  std::optional<std::string> head_a;
  std::optional<std::string> head_b;
  std::optional<double> tail_a;
  std::optional<double> tail_b;
  std::optional<std::string> x0;
  std::optional<std::string> n;
  std::optional<std::string> grid;
  std::optional<std::string> grid_a;
  std::optional<std::string> grid_b;
  std::optional<std::string> mode;
  std::optional<double> beta1;
  std::optional<std::string> betas;
  std::optional<double> amplitude;
  std::optional<double> exponent;
  std::optional<std::string> dist;
  std::optional<std::string> seed;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> l2_n;
  std::optional<double> rho;
  std::optional<std::string> a;
  std::optional<std::string> b;
  std::optional<double> quad_tol;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> threads;
  std::optional<std::string> experiment_id;
};

void add_flags(CLI::App& cmd, Flags& flags) {
  cmd.add_option("--config", flags.config_path, "key = value file applied before flags");
  cmd.add_option("--measure", flags.measure, "free | chebyshev1 | custom");
  cmd.add_option("--head-a", flags.head_a, "comma list a_1,a_2,... (measure custom)");
  cmd.add_option("--head-b", flags.head_b, "comma list b_1,b_2,... (measure custom)");
  cmd.add_option("--tail-a", flags.tail_a, "constant a_n past the head");
  cmd.add_option("--tail-b", flags.tail_b, "constant b_n past the head");
  cmd.add_option("--x0", flags.x0, "comma list of scaling centers");
  cmd.add_option("--n", flags.n, "comma list of degrees");
  cmd.add_option("--grid", flags.grid, "comma list of offsets for both arguments");
  cmd.add_option("--grid-a", flags.grid_a, "offsets for the first argument");
  cmd.add_option("--grid-b", flags.grid_b, "offsets for the second argument");
  cmd.add_option("--mode", flags.mode, "by_n | by_diag");
  cmd.add_option("--beta1", flags.beta1, "rank-one coupling on b_1");
  cmd.add_option("--betas", flags.betas, "diagonal perturbation: comma list or c/k^p");
  cmd.add_option("--amplitude", flags.amplitude, "random perturbation amplitude");
  cmd.add_option("--exponent", flags.exponent, "sigma_k = amplitude * k^-exponent");
  cmd.add_option("--dist", flags.dist, "rademacher | uniform | gaussian");
  cmd.add_option("--seed", flags.seed, "comma list of RNG seeds");
  cmd.add_option("--horizon", flags.horizon, "largest materialized random index");
  cmd.add_option("--l2-n", flags.l2_n, "partial-sum length for the l2 diagnostic");
  cmd.add_option("--rho", flags.rho, "density parameter of the identity check");
  cmd.add_option("--a", flags.a, "complex a, e.g. 0.5+1i (identity check)");
  cmd.add_option("--b", flags.b, "complex b, Im b < 0 (identity check)");
  cmd.add_option("--quad-tol", flags.quad_tol, "quadrature tolerance");
  cmd.add_option("--out", flags.out, "output path (default stdout)");
  cmd.add_option("--format", flags.format, "csv | json");
  cmd.add_option("--threads", flags.threads, "worker threads (env CDKLAB_THREADS)");
  cmd.add_option("--experiment-id", flags.experiment_id, "id stamped on every row");
}

ExperimentConfig resolve(const std::string& subcommand, const Flags& flags) {
  ExperimentConfig config;
  config.subcommand = subcommand;
  config.experiment_id = subcommand;
  if (flags.config_path) {
    config.apply_config_map(cdklab::cli::parse_config_file(*flags.config_path));
  }
  using cdklab::cli::parse_complex;
  using cdklab::cli::parse_complex_list;
  using cdklab::cli::parse_double_list;
  using cdklab::cli::parse_seed_list;
  using cdklab::cli::parse_size_list;
  if (flags.measure) config.measure = *flags.measure;
  if (flags.head_a) config.head_a = parse_double_list(*flags.head_a);
  if (flags.head_b) config.head_b = parse_double_list(*flags.head_b);
  if (flags.tail_a) config.tail_a = *flags.tail_a;
  if (flags.tail_b) config.tail_b = *flags.tail_b;
  if (flags.x0) config.x0 = parse_double_list(*flags.x0);
  if (flags.n) config.n_list = parse_size_list(*flags.n);
  if (flags.grid) {
    config.grid_a = parse_complex_list(*flags.grid);
    config.grid_b = config.grid_a;
  }
  if (flags.grid_a) config.grid_a = parse_complex_list(*flags.grid_a);
  if (flags.grid_b) config.grid_b = parse_complex_list(*flags.grid_b);
  if (flags.mode) config.mode = *flags.mode;
  if (flags.beta1) config.beta1 = *flags.beta1;
  if (flags.betas) config.betas_text = *flags.betas;
  if (flags.amplitude) config.amplitude = *flags.amplitude;
  if (flags.exponent) config.exponent = *flags.exponent;
  if (flags.dist) config.dist = *flags.dist;
  if (flags.seed) config.seeds = parse_seed_list(*flags.seed);
  if (flags.horizon) config.horizon = *flags.horizon;
  if (flags.l2_n) config.l2_n = *flags.l2_n;
  if (flags.rho) config.rho = *flags.rho;
  if (flags.a) config.a = parse_complex(*flags.a);
  if (flags.b) config.b = parse_complex(*flags.b);
  if (flags.quad_tol) config.quad_tol = *flags.quad_tol;
  if (flags.out) config.out = *flags.out;
  if (flags.format) config.format = *flags.format;
  if (flags.threads) config.threads = *flags.threads;
  if (flags.experiment_id) config.experiment_id = *flags.experiment_id;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Christoffel-Darboux kernel laboratory"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"universality", "scaled kernel vs sine target over an offset grid"},
      {"second-kind", "second-kind kernel vs its reweighted target"},
      {"perturb", "deterministic diagonal / rank-one perturbation sweep"},
      {"random-perturb", "random decaying diagonal perturbation over seeds"},
      {"stieltjes", "boundary values F(x+i0) and derived weights"},
      {"eigenvalue", "rank-one eigenvalue and point mass outside the band"},
      {"identity-check", "whole-line sinc integral identity (mandatory gate)"},
      {"varpar", "variation-of-parameters coefficients of the perturbed solution"},
  };
  Flags flags[std::size(entries)];
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* cmd = app.add_subcommand(entries[i].name, entries[i].help);
    add_flags(*cmd, flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 1;
  }

  try {
    for (std::size_t i = 0; i < std::size(entries); ++i) {
      if (app.get_subcommand(entries[i].name)->parsed()) {
        return cdklab::cli::run_and_emit(resolve(entries[i].name, flags[i]));
      }
    }
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";  // already rendered as `field: message`
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
