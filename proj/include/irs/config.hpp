#pragma once

// Sectioned key-value configuration files:
//
//   # comment
//   [scenario]
//   irs_rows = 16
//   beta_d = inf
//   [optimizer]
//   levels = 4
//   [sweep]
//   variable = tx_power
//   values = 0:2:30          # start:step:stop, or a comma-separated list
//   schemes = no_irs, full_csi, grouped_2x2, position_based
//   [run]
//   seed = 7
//
// Sections mirror the library types (Scenario, optimizer settings, SweepSpec).
// Unknown sections or keys, duplicates, malformed values and invariant
// violations are rejected with the key and line number.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "irs/experiments.hpp"

namespace irs {

class ConfigError : public std::runtime_error
{
public:
    // line 0 denotes a command-line override.
    ConfigError(std::size_t line, std::string key, const std::string& message);

    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

struct OptimizerSettings
{
    Scheme scheme = Scheme::full_csi();
    RefinementOptions refinement;
    bool random_init = false;
    std::uint64_t init_seed = 0;
    std::uint64_t brute_force_budget = kDefaultBruteForceBudget;
};

struct Config
{
    Scenario scenario;
    OptimizerSettings optimizer;
    std::optional<SweepSpec> sweep; // present when the file has a [sweep] section
    std::uint64_t seed = 1;         // channel draw for single runs
};

// `overrides` are "section.key=value" strings applied on top of the file.
Config parse_config(std::string_view text, std::span<const std::string> overrides = {});
Config load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

// Default sweep grids per swept variable.
std::vector<double> default_sweep_values(SweptVariable variable);

} // namespace irs
