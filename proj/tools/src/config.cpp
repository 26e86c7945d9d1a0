#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cdklab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

// Drops a trailing comment, respecting double-quoted spans.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + t + "'");
  }
  if (used != t.size()) throw ConfigError(field, "trailing characters in number '" + t + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

ConfigValue parse_value(const std::string& raw, const std::string& key) {
  const std::string text = trim(raw);
  ConfigValue v;
  if (text.empty()) throw ConfigError(key, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ConfigError(key, "unterminated string");
    v.kind = ConfigValue::Kind::String;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = ConfigValue::Kind::Bool;
    v.boolean = text == "true";
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError(key, "unterminated array");
    const auto parts = split_commas(text.substr(1, text.size() - 2));
    const bool strings = !parts.empty() && parts.front().front() == '"';
    if (strings) {
      v.kind = ConfigValue::Kind::StringArray;
      for (const auto& p : parts) {
        if (p.size() < 2 || p.front() != '"' || p.back() != '"') {
          throw ConfigError(key, "mixed or malformed string array");
        }
        v.strs.push_back(p.substr(1, p.size() - 2));
      }
    } else {
      v.kind = ConfigValue::Kind::NumberArray;
      for (const auto& p : parts) v.nums.push_back(parse_number(p, key));
    }
    return v;
  }
  v.kind = ConfigValue::Kind::Number;
  v.num = parse_number(text, key);
  return v;
}

std::size_t to_index(double v, const std::string& field) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw ConfigError(field, "expected a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  ConfigMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config", "line " + std::to_string(lineno) + ": empty key");
    }
    map[key] = parse_value(body.substr(eq + 1), key);
  }
  return map;
}

Complex parse_complex(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("complex", "empty value");
  const char tail = t.back();
  if (tail != 'i' && tail != 'I' && tail != 'j') {
    return Complex(parse_number(t, "complex"), 0.0);
  }
  const std::string body = t.substr(0, t.size() - 1);
  // Split at the last +/- that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto imag_of = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_number(s, "complex");
  };
  if (split == std::string::npos) return Complex(0.0, imag_of(body));
  return Complex(parse_number(body.substr(0, split), "complex"),
                 imag_of(body.substr(split)));
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split_commas(text)) out.push_back(parse_number(p, "list"));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& p : split_commas(text)) out.push_back(to_index(parse_number(p, "list"), "list"));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& p : split_commas(text)) {
    out.push_back(static_cast<std::uint64_t>(to_index(parse_number(p, "seed"), "seed")));
  }
  return out;
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  for (const auto& p : split_commas(text)) out.push_back(parse_complex(p));
  return out;
}

std::vector<double> parse_betas(const std::string& text, std::size_t length) {
  const std::string t = trim(text);
  const std::size_t slash = t.find('/');
  if (slash != std::string::npos) {
    const std::string head = trim(t.substr(0, slash));
    std::string tail = trim(t.substr(slash + 1));
    const std::size_t caret = tail.find('^');
    double power = 1.0;
    if (caret != std::string::npos) {
      power = parse_number(tail.substr(caret + 1), "betas");
      tail = trim(tail.substr(0, caret));
    }
    if (tail != "k") throw ConfigError("betas", "power-law form must be c/k^p");
    const double c = parse_number(head, "betas");
    std::vector<double> out(length);
    for (std::size_t k = 1; k <= length; ++k) {
      out[k - 1] = c * std::pow(static_cast<double>(k), -power);
    }
    return out;
  }
  return parse_double_list(t);
}

void ExperimentConfig::apply_config_map(const ConfigMap& map) {
  const auto want = [](const ConfigValue& v, ConfigValue::Kind kind, const std::string& key) {
    if (v.kind != kind) throw ConfigError(key, "unexpected value type");
    return &v;
  };
  for (const auto& [key, value] : map) {
    if (key == "experiment_id") {
      experiment_id = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "measure") {
      measure = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "head_a") {
      head_a = want(value, ConfigValue::Kind::NumberArray, key)->nums;
    } else if (key == "head_b") {
      head_b = want(value, ConfigValue::Kind::NumberArray, key)->nums;
    } else if (key == "tail_a") {
      tail_a = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "tail_b") {
      tail_b = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "x0") {
      x0 = want(value, ConfigValue::Kind::NumberArray, key)->nums;
    } else if (key == "n") {
      n_list.clear();
      for (double v : want(value, ConfigValue::Kind::NumberArray, key)->nums) {
        n_list.push_back(to_index(v, key));
      }
    } else if (key == "grid") {
      grid_a.clear();
      for (double v : want(value, ConfigValue::Kind::NumberArray, key)->nums) {
        grid_a.emplace_back(v, 0.0);
      }
      grid_b = grid_a;
    } else if (key == "mode") {
      mode = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "beta1") {
      beta1 = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "betas") {
      betas_text = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "amplitude") {
      amplitude = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "exponent") {
      exponent = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "dist") {
      dist = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "seeds") {
      seeds.clear();
      for (double v : want(value, ConfigValue::Kind::NumberArray, key)->nums) {
        seeds.push_back(static_cast<std::uint64_t>(to_index(v, key)));
      }
    } else if (key == "horizon") {
      horizon = to_index(want(value, ConfigValue::Kind::Number, key)->num, key);
    } else if (key == "l2_n") {
      l2_n = to_index(want(value, ConfigValue::Kind::Number, key)->num, key);
    } else if (key == "rho") {
      rho = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "a") {
      a = parse_complex(want(value, ConfigValue::Kind::String, key)->str);
    } else if (key == "b") {
      b = parse_complex(want(value, ConfigValue::Kind::String, key)->str);
    } else if (key == "quad_tol") {
      quad_tol = want(value, ConfigValue::Kind::Number, key)->num;
    } else if (key == "out") {
      out = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "format") {
      format = want(value, ConfigValue::Kind::String, key)->str;
    } else if (key == "threads") {
      threads = to_index(want(value, ConfigValue::Kind::Number, key)->num, key);
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
}

void ExperimentConfig::validate() const {
  if (measure != "free" && measure != "chebyshev1" && measure != "custom") {
    throw ConfigError("measure", "must be free, chebyshev1, or custom");
  }
  if (measure == "custom" && !(tail_a > 0.0)) {
    throw ConfigError("tail_a", "must be positive");
  }
  if (format != "csv" && format != "json") {
    throw ConfigError("format", "must be csv or json");
  }
  if (mode != "by_n" && mode != "by_diag") {
    throw ConfigError("mode", "must be by_n or by_diag");
  }
  if (n_list.empty()) throw ConfigError("n", "ladder must be nonempty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw ConfigError("n", "entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw ConfigError("n", "ladder must be strictly increasing");
    }
  }
  if (x0.empty()) throw ConfigError("x0", "must be nonempty");
  if (grid_a.empty() || grid_b.empty()) throw ConfigError("grid", "must be nonempty");
  if (!(quad_tol > 0.0)) throw ConfigError("quad_tol", "must be positive");

  if (subcommand == "perturb" || subcommand == "varpar") {
    const bool has_deterministic = beta1.has_value() || !betas_text.empty();
    const bool has_random = amplitude.has_value();
    if (subcommand == "perturb" && !has_deterministic) {
      throw ConfigError("beta1", "perturb needs --beta1 or --betas");
    }
    if (subcommand == "varpar" && !has_deterministic && !has_random) {
      throw ConfigError("beta1", "varpar needs --beta1, --betas, or --amplitude");
    }
  }
  if (subcommand == "random-perturb" || (subcommand == "varpar" && amplitude.has_value())) {
    if (!amplitude.has_value()) throw ConfigError("amplitude", "required for random perturbations");
    if (!exponent.has_value()) throw ConfigError("exponent", "required for random perturbations");
    if (dist != "rademacher" && dist != "uniform" && dist != "gaussian") {
      throw ConfigError("dist", "must be rademacher, uniform, or gaussian");
    }
    if (seeds.empty()) throw ConfigError("seed", "must be nonempty");
    if (effective_horizon() < max_n()) {
      throw ConfigError("horizon", "must cover the largest n (" + std::to_string(max_n()) + ")");
    }
  }
  if (subcommand == "eigenvalue") {
    if (!beta1.has_value() || *beta1 == 0.0) {
      throw ConfigError("beta1", "eigenvalue needs a nonzero beta1");
    }
  }
  if (subcommand == "identity-check") {
    if (!rho.has_value() || !(*rho > 0.0)) throw ConfigError("rho", "must be positive");
    if (!a.has_value() || !(std::imag(*a) > 0.0)) throw ConfigError("a", "must have Im a > 0");
    if (!b.has_value() || !(std::imag(*b) < 0.0)) throw ConfigError("b", "must have Im b < 0");
  }
}

std::size_t ExperimentConfig::max_n() const {
  return n_list.empty() ? 0 : n_list.back();
}

std::size_t ExperimentConfig::effective_horizon() const {
  return horizon.value_or(2 * max_n());
}

std::size_t ExperimentConfig::effective_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("CDKLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

JacobiParameters make_measure(const ExperimentConfig& config) {
  if (config.measure == "custom") {
    try {
      return JacobiParameters(config.head_a, config.head_b, config.tail_a, config.tail_b);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("measure", e.what());
    }
  }
  return catalog(config.measure);
}

}  // namespace cdklab::cli
