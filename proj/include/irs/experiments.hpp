#pragma once

// Seeded Monte Carlo sweeps over the stochastic scenario.
//
// Trial t of a sweep draws its channels from Rng(trial_seed(master_seed, t)).
// The seed does not depend on the scheme or on the swept value, so every scheme
// and every sweep point sees the same fading realizations trial-for-trial
// (paired comparisons and common random numbers along the sweep axis).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "irs/channel.hpp"
#include "irs/optimizer.hpp"

namespace irs {

struct Scheme
{
    enum class Kind
    {
        no_irs,
        full_csi,
        grouped,
        position_based,
    };

    Kind kind = Kind::full_csi;
    GroupingSpec grouping{}; // used by Kind::grouped only

    static Scheme no_irs() { return {Kind::no_irs, {}}; }
    static Scheme full_csi() { return {Kind::full_csi, {}}; }
    static Scheme grouped(int rows, int cols) { return {Kind::grouped, {rows, cols}}; }
    static Scheme position_based() { return {Kind::position_based, {}}; }

    // "no_irs", "full_csi", "grouped_2x2", "position_based"
    std::string name() const;
    // Accepts the names above and "grouped(2x2)".
    static Scheme parse(std::string_view text);

    friend bool operator==(const Scheme&, const Scheme&) = default;
};

enum class SweptVariable
{
    vehicle_offset_c_v, // metres
    tx_power,           // dBm
    quantization_bits,  // L = 2^bits
};

std::string_view to_string(SweptVariable v);
SweptVariable parse_swept_variable(std::string_view text);

struct SweepSpec
{
    Scenario base_scenario;
    SweptVariable variable = SweptVariable::tx_power;
    std::vector<double> values;
    std::vector<Scheme> schemes;
    int trials = 500;
    std::uint64_t master_seed = 1;
    unsigned threads = 0; // 0: hardware concurrency
    bool record_traces = false;

    void validate() const;
};

// Scenario and optimizer settings at one sweep point.
struct SweepPoint
{
    Scenario scenario;
    RefinementOptions options;
};

SweepPoint apply_sweep_value(const Scenario& base, const RefinementOptions& options, SweptVariable variable,
                             double value);

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

ChannelSet draw_channels(const Scenario& scenario, std::uint64_t seed);

struct SchemeOutcome
{
    double rate = 0.0; // achieved on the true channels, direct evaluation
    RefinementReport report;
};

SchemeOutcome evaluate_scheme(const Scenario& scenario, const ChannelSet& channels, const Scheme& scheme,
                              const RefinementOptions& options);

struct TrialOutcome
{
    double rate = 0.0;
    std::uint64_t channel_digest = 0;
};

// Draws one channel set from `seed` and applies the scheme to it.
TrialOutcome run_trial(const Scenario& scenario, const Scheme& scheme, const RefinementOptions& options,
                       std::uint64_t seed);

struct ResultRow
{
    std::string scheme;
    double value = 0.0;
    double mean_rate = 0.0;
    double std_error = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct TraceRecord
{
    std::string scheme;
    double value = 0.0;
    std::vector<double> rate_trace;
};

struct ExperimentResult
{
    // Scheme-major, then sweep value, in spec order.
    std::vector<ResultRow> rows;
    // Per-row per-trial achieved rates, indexed like rows.
    std::vector<std::vector<double>> samples;
    // Trial 0 of every row, when requested.
    std::vector<TraceRecord> traces;

    const ResultRow& row(std::string_view scheme, double value) const;
    const std::vector<double>& samples_for(std::string_view scheme, double value) const;
};

ExperimentResult run_sweep(const SweepSpec& spec, const RefinementOptions& options);

// Rate trace of full-CSI successive refinement from all-zero phases on one seeded draw.
std::vector<double> convergence_trace(const Scenario& scenario, const RefinementOptions& options,
                                      std::uint64_t seed);

// Header: scheme,value,mean_rate_bps_hz,std_error,trials,seed
std::string format_result_table(const ExperimentResult& result);
// Full structured dump (rows, per-trial samples, traces) as JSON.
std::string format_result_json(const ExperimentResult& result, const SweepSpec& spec);

struct MeanStats
{
    double mean = 0.0;
    double std_error = 0.0;
};

// Sample mean and standard error (n - 1 denominator; zero for one sample).
MeanStats mean_and_std_error(std::span<const double> samples);
// Statistics of a[i] - b[i].
MeanStats paired_difference(std::span<const double> a, std::span<const double> b);

} // namespace irs
