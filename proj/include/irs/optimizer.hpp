#pragma once

// Discrete IRS phase optimization: successive refinement (cyclic coordinate
// ascent over elements), an exhaustive oracle, and two reduced-information
// schemes (element grouping and position-based LOS beamforming).

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "irs/channel.hpp"
#include "irs/link.hpp"

namespace irs {

// {k * 2pi / L : k = 0..L-1}
std::vector<double> phase_set(int levels);

// Index whose phase is nearest to `angle` in circular distance; ties go to the smaller index.
int quantize_phase(double angle, int levels);

// |angle_a - angle_b| wrapped into [0, pi].
double circular_distance(double angle_a, double angle_b);

struct RefinementOptions
{
    int levels = 4;
    double epsilon = 1e-6; // bit/s/Hz
    int max_outer_iters = 100;

    void validate() const;
};

struct RefinementReport
{
    PhaseConfig final_phases;
    // Rate after each outer iteration; entry 0 is the initialization.
    std::vector<double> rate_trace;
    int iterations = 0;
    bool converged = false;
    // Position-based runs only: the trace on the LOS estimate the optimizer actually saw.
    // rate_trace then holds the same iterates re-evaluated on the true channels.
    std::vector<double> estimate_trace;

    double final_rate() const { return rate_trace.empty() ? 0.0 : rate_trace.back(); }
};

// Called after each outer iteration with the 1-based iteration number and current phases.
using IterationHook = std::function<void(int, const PhaseConfig&)>;

// Successive refinement on a prepared quadratic form. kappa_n is maintained
// incrementally through g = A v + b, so one coordinate update costs O(N).
// A coordinate only moves when that strictly raises the gain by more than
// rounding noise; a zero kappa_n leaves the phase unchanged.
RefinementReport refine(const QuadraticForm& form, const PhaseConfig& init, const RefinementOptions& options,
                        const LinkBudget& budget, const IterationHook& hook = {});

// Full-CSI successive refinement. Default initialization is all-zero phases.
RefinementReport successive_refinement(const ChannelSet& channels, const LinkBudget& budget,
                                       const RefinementOptions& options,
                                       const std::optional<PhaseConfig>& init = std::nullopt);

PhaseConfig random_phases(std::size_t n, int levels, std::uint64_t seed);

struct BruteForceResult
{
    PhaseConfig phases;
    double gain = 0.0;
    double rate = 0.0;
};

inline constexpr std::uint64_t kDefaultBruteForceBudget = 1'000'000;

// Exhaustive search over all L^N configurations in lexicographic order; the
// lexicographically first maximizer wins. Throws std::length_error when L^N > budget.
BruteForceResult brute_force(const ChannelSet& channels, int levels, const LinkBudget& budget,
                             std::uint64_t max_configs = kDefaultBruteForceBudget);

struct GroupingSpec
{
    int group_rows = 1;
    int group_cols = 1;

    // Throws std::invalid_argument unless the group tiles the array exactly.
    void validate_for(ArrayShape irs) const;
    ArrayShape reduced_shape(ArrayShape irs) const;

    friend bool operator==(const GroupingSpec&, const GroupingSpec&) = default;
};

// Column g of the result is the sum of the cascade columns of every member of group g.
// Groups are numbered row-major over the reduced array.
CMatrix grouped_cascade(const CMatrix& cascade, ArrayShape irs, const GroupingSpec& grouping);

// Copies each group's phase index to all of its member elements.
PhaseConfig expand_grouped_phases(const PhaseConfig& reduced, ArrayShape irs, const GroupingSpec& grouping);

// Optimizes one shared phase per group against the summed group channels, then
// expands to all N elements. Initialization is all-zero.
RefinementReport optimize_grouped(const ChannelSet& channels, ArrayShape irs, const GroupingSpec& grouping,
                                  const LinkBudget& budget, const RefinementOptions& options);

// Optimizes against the geometric LOS channels of `scenario` only; the reported
// rate_trace is re-evaluated on `true_channels` with the chosen phases.
RefinementReport optimize_position_based(const Scenario& scenario, const ChannelSet& true_channels,
                                         const RefinementOptions& options);

} // namespace irs
