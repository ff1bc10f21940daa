/// @file config.hpp
/// @brief Sectioned key = value run configuration.
///
///   [grid]        dim, nx, ny, lx, ly
///   [model]       n, kappa, s, epsilon, cutoff, chi
///   [coefficients] lambda, mu            (field specs)
///   [initial]     u0, v0, seed           (field specs)
///   [time]        T, dt, policy, cfl, output_every
///   [tolerances]  c_tol, cg_tol
///   [sweep]       epsilon0, levels, sample_every
///
/// `#` and `;` start comments, also after a value when preceded by a space.
/// Relative `file` paths in field specs resolve against the directory of the
/// config file.

#pragma once

#include "kslg/exponents.hpp"
#include "kslg/problem.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kslg {

struct ConfigError {
    int line = 0;     ///< 0 when the error is not tied to a line (missing key)
    std::string key;  ///< section.key, or the section name
    std::string message;

    std::string str() const;
};

struct AppConfig {
    ProblemSpec problem;
    exponents::ParamConfig params;  ///< n, s, kappa; alpha and mu1 when mu is a prototype
    double c_tol = 0.1;
    std::size_t output_every = 10;
    double epsilon0 = 1.0;
    int sweep_levels = 4;
    std::size_t sample_every = 1;
    std::string text;  ///< the source, copied next to run outputs
};

struct ConfigResult {
    std::optional<AppConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value(); }
};

ConfigResult parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Unreadable files yield a single error with line 0.
ConfigResult parse_config_file(const std::filesystem::path& path);

/// Levenshtein distance.
std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace kslg
