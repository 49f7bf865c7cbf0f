#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hornlab/horn_geometry.hpp"

namespace hornlab::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kBoundCheckFailure = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (lo, hi, points, log|linear).
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int points = 2;
  bool log_spacing = true;
  std::vector<double> values() const;
};

struct RunConfig {
  HornParams params;
  struct {
    int i = 1;
    double mu = 1.0;
    double r_min = 2e-3;
    int n_grid = 64;
  } mode;
  struct {
    int i = 1;
    double r_out = 3.0;
    int count = 8;
  } eigs;
  struct {
    GridSpec r_grid{0.02, 0.13, 64, true};
    GridSpec R_grid{0.02, 0.2, 16, true};
    std::string field = "series";  ///< "series" or "unit"
  } freq;
  struct {
    std::vector<double> coeffs{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> initial_r, initial_u;  ///< piecewise-linear u0; replaces coeffs when set
    std::vector<double> t_list{0.25, 0.5, 1.0};
    GridSpec r_grid{0.003, 0.1, 32, true};
  } heat;
  struct {
    double r0 = 1.0;
    double t0 = 0.5;
    int kmax = 16;
  } analyticity;
  std::string output = "hornlab_out";
  struct {
    double ode = 1e-10;
    double quad = 1e-8;
    double root = 1e-10;
  } tolerances;
};

/// The full default document; user documents may only use keys present here.
nlohmann::json default_config_json();

/// Merges `user` over the defaults, applies "a.b.c=value" overrides (value parsed as JSON,
/// falling back to a string) and validates. Throws ConfigError.
RunConfig load_config(const nlohmann::json& user, const std::vector<std::string>& overrides,
                      nlohmann::json* effective = nullptr);

const std::vector<std::string>& commands();

/// Runs one command, writes its artifacts and manifest.json into out_dir, returns the exit code.
int run(const std::string& command, const RunConfig& config, const nlohmann::json& config_echo,
        const std::filesystem::path& out_dir);

/// `hornlab <command> --config <file> [--out <dir>] [--set key=value ...]`.
int main(int argc, char** argv);

}  // namespace hornlab::cli
