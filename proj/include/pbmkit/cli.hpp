#pragma once

#include "pbmkit/serialization.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pbm::cli {

enum ExitCode : int { Ok = 0, CheckFailed = 1, ConfigError = 2, NumericalError = 3 };

/// Every field mirrors a JSON key of the same name in a --config document;
/// command-line flags override file values.
struct ExperimentConfig {
    std::string command;
    int n = 3;
    int k = 2;
    double p = 0.5;
    double t = 0.5;
    std::optional<int> grid_res;
    std::optional<std::string> grid_method;
    std::uint64_t seed = 0;
    std::string psi = "x1sq-centered";
    double amplitude = 1.0;
    double s_min = -2.0;
    double s_max = 2.0;
    int s_steps = 21;
    std::optional<std::string> out;
    std::optional<std::string> json;
    std::optional<double> tol;
    std::optional<Json> body;
    int n_min = 3;
    int n_max = 10;
    bool sweep = false;
    double sweep_factor = 0.5;
    int instances = 10;

    Json to_json() const;
    /// Overwrites the fields present in `j`.
    void merge(const Json& j);
    /// Throws ConfigurationError with an actionable message.
    void validate() const;
};

/// Entry point of the command-line tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pbm::cli
