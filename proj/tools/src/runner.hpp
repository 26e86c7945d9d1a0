#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace cdklab::cli {

// One output record; absent fields stay empty in CSV and null in JSON. The
// column set is shared by every subcommand, so downstream tooling can stack
// tables from different experiments.
struct Row {
  std::string experiment_id;
  std::string measure;
  std::string perturbation;
  std::optional<std::uint64_t> seed;
  std::optional<double> x0;
  std::optional<std::size_t> n;
  std::optional<double> re_a;
  std::optional<double> im_a;
  std::optional<double> re_b;
  std::optional<double> im_b;
  std::string mode;
  std::optional<double> value_re;
  std::optional<double> value_im;
  std::optional<double> target_re;
  std::optional<double> target_im;
  std::optional<double> abs_err;
  std::string status = "ok";
};

struct RunOutput {
  std::vector<Row> rows;
  std::string summary;  // JSON object text, deterministic field order
  bool mandatory_failed = false;
};

RunOutput run_subcommand(const ExperimentConfig& config);

// Deterministic order: (x0, n, re_a, im_a, re_b, im_b, seed), absent first;
// stable for rows that tie on the whole key.
void sort_rows(std::vector<Row>& rows);

std::string format_double(double value);  // %.17g, round-trip exact
std::string to_csv(const std::vector<Row>& rows);
std::string to_json(const std::vector<Row>& rows, const std::string& summary);

// Runs, sorts, emits to config.out (or stdout), returns the process exit code.
// CSV output writes the summary into a sidecar `<out>.summary.json`.
int run_and_emit(const ExperimentConfig& config);

}  // namespace cdklab::cli
