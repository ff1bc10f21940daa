/// @file app.hpp
/// @brief Subcommands of the `kslg` executable. Each returns the process exit
/// code: 0 when every verdict passes, 1 when one fails, 2 on usage or
/// configuration errors. Diagnostics go to `err`, data to files (or `out` for
/// the exponent queries).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace kslg::app {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;

struct ExponentsOptions {
    std::optional<int> n;
    std::optional<std::string> s;
    std::optional<std::string> kappa;
    std::optional<std::string> alpha;
    std::string mode;             ///< general | prototype; empty picks prototype when only alpha is given
    std::string emit = "verdict";  ///< verdict | set | region-csv
    int steps = 20;               ///< region-csv lattice resolution per axis
    std::string kappa_max = "4";
    std::string param_max = "4";  ///< upper end of the alpha or s axis
    std::filesystem::path out;    ///< region-csv destination; stdout when empty
};

int exponents_command(const ExponentsOptions& opt, std::ostream& out, std::ostream& err);

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out = "kslg-out";
    std::optional<std::uint64_t> seed;
};

/// Writes config.ini, run_info.ini, coefficients.bin, snapshots/step_<n>.bin,
/// diagnostics.csv, verdicts.csv and fields_final.csv under `out`; a failed
/// run additionally leaves FAILED with the reason.
int run_command(const RunOptions& opt, std::ostream& err);

struct WeakcheckOptions {
    std::filesystem::path traj;
    std::optional<double> tol;  ///< c_tol; defaults to the run's tolerances.c_tol
    std::filesystem::path out;  ///< defaults to <traj>/weakcheck.csv
};

int weakcheck_command(const WeakcheckOptions& opt, std::ostream& err);

struct SweepOptions {
    std::filesystem::path config;
    std::optional<int> levels;
    std::filesystem::path out = "kslg-sweep";
    bool wallclock = false;
    std::optional<std::uint64_t> seed;
};

int sweep_command(const SweepOptions& opt, std::ostream& err);

struct RefineOptions {
    std::filesystem::path config;
    int levels = 3;
    std::filesystem::path out = "kslg-refine";
    std::optional<std::uint64_t> seed;
};

int refine_command(const RefineOptions& opt, std::ostream& err);

}  // namespace kslg::app
