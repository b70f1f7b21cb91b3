#pragma once

// Batch experiments driven by a JSON configuration file.
//
// Top-level keys shared by every experiment:
//   "experiment": optional, must name the subcommand being run
//   "seed":       unsigned integer (default 0; --seed overrides)
//   "threads":    positive integer (default 1; --threads overrides)
//   "output":     path of the CSV to write (default stdout; --out overrides)
//
// Density spec (objects may carry an optional "name" used in tables):
//   {"family": "gaussian", "mean": [..], "cov": [[..], ..]}    or "variance": v for v*I
//   {"family": "logistic", "locations": [..], "scales": [..]}
//   {"family": "mixture", "weights": [..], "components": [density, ..]}
//   {"family": "kde", "points": [[..], ..], "bandwidth": h}
//
// Kernel spec: "hyvarinen" | "logcosh" | "convex-quadratic" | "zero"
//   or {"profile": <name>, "scale": s} (scale only for logcosh).
//
// Rule spec: "hyvarinen" | "log" | "logcosh"
//   or {"kind": "hyvarinen" | "log" | "radial" | "general", "profile": <kernel spec>}
//   or {"kind": "blend", "alpha": a, "inner": <rule spec>}.
//
// Engine spec:
//   {"type": "quadrature", "nodes": 401, "box_sd": 12}
//   {"type": "monte-carlo", "samples": 100000, "chunk": 8192}   (seeded by "seed")
//
// Per experiment:
//   score-eval:       "densities": [density], "rules": [rule], "points": [[..]]
//   divergence-table: "pairs": [{"p": density, "q": density}], "kernels": [kernel], "engine"
//   sure-experiment:  "dim": d, "prior": {"weights", "means", "variances"} or {"variance": v},
//                     "thetas": [[..]] or "truths": [gaussian density], "samples": n, "engine"
//   bandwidth:        "samples": [[..]] or "samples_file": path, "rule", "grid": [..],
//                     "truth": density (optional), "engine"
//   check-suite:      "checks": [names] (optional, default all)
//
// Unknown keys anywhere are rejected before any computation starts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scoring/densities.hpp"
#include "scoring/kernels.hpp"
#include "scoring/numerics.hpp"
#include "scoring/scores.hpp"

namespace scoring::experiments {

enum class ExperimentKind { ScoreEval, DivergenceTable, SureExperiment, Bandwidth, CheckSuite };

std::string_view kind_name(ExperimentKind kind) noexcept;
/// Throws ConfigError for unknown names.
ExperimentKind parse_kind(std::string_view name);

/// Invalid configuration. field() is a JSON-pointer-like path to the culprit.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> output;
};

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::CheckSuite;
    nlohmann::json body = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::optional<std::string> output;
    /// Relative paths inside the config resolve against this directory.
    std::filesystem::path base_dir;
};

/// Reads shared keys, applies overrides and validates the experiment body
/// (by building every density, rule and engine it names). Throws ConfigError.
ExperimentConfig make_config(ExperimentKind kind, const nlohmann::json& document, const Overrides& overrides,
                             std::filesystem::path base_dir = {});

DensityPtr parse_density(const nlohmann::json& spec, const std::string& path);
std::string density_label(const nlohmann::json& spec, const Density& density);
RadialProfile parse_profile(const nlohmann::json& spec, const std::string& path);
/// `dim` sizes the kernel of a "general" rule.
ScoringRule parse_rule(const nlohmann::json& spec, const std::string& path, std::size_t dim = 1);
EngineConfig parse_engine(const nlohmann::json& spec, std::uint64_t seed, std::size_t threads,
                          const std::string& path);

struct RunResult
{
    int exit_code = 0;
    /// CSV with a header row.
    std::string table;
    /// One line per failed check.
    std::vector<std::string> failures;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs a validated experiment. Numerical failures propagate as exceptions
/// whose message names the module and operation.
RunResult run(const ExperimentConfig& config);

/// Names accepted in the check-suite "checks" list.
std::vector<std::string> check_names();

/// 17 significant digits.
std::string format_number(double v);

}  // namespace scoring::experiments
