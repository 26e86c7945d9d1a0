#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdklab/jacobi.hpp"

namespace cdklab::cli {

// Configuration problem tied to a field path; rendered as `field: message`
// and mapped to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// One value from the flat TOML-style config: scalar string/number/bool or a
// homogeneous array of strings/numbers.
struct ConfigValue {
  enum class Kind { String, Number, Bool, NumberArray, StringArray };
  Kind kind = Kind::String;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<double> nums;
  std::vector<std::string> strs;
};

using ConfigMap = std::map<std::string, ConfigValue>;

// Parses `key = value` lines: quoted strings, numbers, true/false, and
// [..] arrays, with # comments. Unknown keys are rejected by the caller.
ConfigMap parse_config_file(const std::string& path);

// "0.5+1i", "-0.3-0.8i", "2", "1.5i", "i" and friends.
Complex parse_complex(const std::string& text);

// Comma-separated scalars.
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<Complex> parse_complex_list(const std::string& text);

// Either an explicit comma list ("0.1,-0.2,0.05") or the power-law shorthand
// "c/k^p", materialized to `length` entries when the shorthand is used.
std::vector<double> parse_betas(const std::string& text, std::size_t length);

struct ExperimentConfig {
  std::string subcommand;
  std::string experiment_id;  // defaults to the subcommand name

  std::string measure = "free";  // free | chebyshev1 | custom
  std::vector<double> head_a;
  std::vector<double> head_b;
  double tail_a = 0.5;
  double tail_b = 0.0;

  std::vector<double> x0{0.0};
  std::vector<std::size_t> n_list{4096};
  std::vector<Complex> grid_a{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<Complex> grid_b{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::string mode = "by_n";  // by_n | by_diag

  std::optional<double> beta1;
  std::string betas_text;  // materialized via parse_betas at run time

  std::optional<double> amplitude;
  std::optional<double> exponent;
  std::string dist = "rademacher";  // rademacher | uniform | gaussian
  std::vector<std::uint64_t> seeds{1};
  std::optional<std::size_t> horizon;  // default: 2 * max(n)

  std::size_t l2_n = 10000;

  std::optional<double> rho;
  std::optional<Complex> a;
  std::optional<Complex> b;
  double quad_tol = 1e-6;

  std::string out;             // empty: rows to stdout, no summary sidecar
  std::string format = "csv";  // csv | json
  std::size_t threads = 0;     // 0: resolve from CDKLAB_THREADS, else 1

  // Applies `key = value` entries; unknown keys raise ConfigError.
  void apply_config_map(const ConfigMap& map);

  // Cross-field checks for the chosen subcommand; ConfigError on violation.
  void validate() const;

  std::size_t max_n() const;
  std::size_t effective_horizon() const;  // horizon or 2 * max(n)
  std::size_t effective_threads() const;  // threads, env, or 1
};

JacobiParameters make_measure(const ExperimentConfig& config);

}  // namespace cdklab::cli
