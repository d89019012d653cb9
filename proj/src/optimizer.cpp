#include "irs/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "irs/kernels.hpp"
#include "irs/rng.hpp"

namespace irs {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Improvements below this fraction of the current gain are indistinguishable
// from the rounding error of the incremental g = A v + b update.
constexpr double kImprovementFloor = 1e-12;

void require_levels(int levels)
{
    if (levels < 1)
        throw std::invalid_argument("number of phase levels must be >= 1, got " + std::to_string(levels));
}

// Re{v^H g} + Re{v^H b} + c, which equals v^H A v + 2 Re{v^H b} + c when g = A v + b.
double gain_from_state(const QuadraticForm& form, std::span<const cplx> v, std::span<const cplx> g)
{
    return kernels::dotc(v, g).real() + kernels::dotc(v, form.b).real() + form.c;
}

} // namespace

std::vector<double> phase_set(int levels)
{
    require_levels(levels);
    std::vector<double> out(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k)
        out[static_cast<std::size_t>(k)] = k * (two_pi / levels);
    return out;
}

double circular_distance(double angle_a, double angle_b)
{
    return std::abs(std::remainder(angle_a - angle_b, two_pi));
}

int quantize_phase(double angle, int levels)
{
    require_levels(levels);
    const double step = two_pi / levels;
    int best = 0;
    double best_dist = circular_distance(angle, 0.0);
    for (int k = 1; k < levels; ++k) {
        const double d = circular_distance(angle, k * step);
        if (d < best_dist) {
            best = k;
            best_dist = d;
        }
    }
    return best;
}

void RefinementOptions::validate() const
{
    require_levels(levels);
    if (!(epsilon > 0.0))
        throw std::invalid_argument("convergence threshold epsilon must be positive");
    if (max_outer_iters < 1)
        throw std::invalid_argument("max_outer_iters must be >= 1");
}

RefinementReport refine(const QuadraticForm& form, const PhaseConfig& init, const RefinementOptions& options,
                        const LinkBudget& budget, const IterationHook& hook)
{
    options.validate();
    budget.validate();
    init.validate();
    const std::size_t n_elems = form.size();
    if (init.size() != n_elems)
        throw DimensionError("initial phases have " + std::to_string(init.size()) + " entries, problem has " +
                             std::to_string(n_elems));
    if (init.levels != options.levels)
        throw std::invalid_argument("initial phases use " + std::to_string(init.levels) + " levels, optimizer " +
                                    std::to_string(options.levels));

    const int levels = options.levels;
    std::vector<int> all_indices(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k)
        all_indices[static_cast<std::size_t>(k)] = k;
    const CVector unit = reflection_vector(PhaseConfig{all_indices, levels});
    const double step = two_pi / levels;

    PhaseConfig phases = init;
    CVector v = reflection_vector(phases);
    CVector g = form.b;
    for (std::size_t j = 0; j < n_elems; ++j)
        kernels::axpy(v[j], form.a.col(j), g);

    RefinementReport report;
    double gain = gain_from_state(form, v, g);
    report.rate_trace.push_back(rate_from_gain(gain, budget));

    for (int iter = 1; iter <= options.max_outer_iters; ++iter) {
        const double floor = kImprovementFloor * std::max(gain, std::numeric_limits<double>::min());
        for (std::size_t n = 0; n < n_elems; ++n) {
            const cplx kappa = g[n] - form.a(n, n) * v[n];
            if (kappa == cplx{})
                continue;
            const double target = std::arg(kappa);
            const int current = phases.indices[n];
            const int best = quantize_phase(target, levels);
            if (best == current || circular_distance(target, current * step) <= circular_distance(target, best * step))
                continue;
            const cplx delta = unit[static_cast<std::size_t>(best)] - v[n];
            if (2.0 * (std::conj(delta) * kappa).real() <= floor)
                continue;
            kernels::axpy(delta, form.a.col(n), g);
            v[n] = unit[static_cast<std::size_t>(best)];
            phases.indices[n] = best;
        }
        gain = gain_from_state(form, v, g);
        report.rate_trace.push_back(rate_from_gain(gain, budget));
        report.iterations = iter;
        if (hook)
            hook(iter, phases);
        const auto k = report.rate_trace.size();
        if (std::abs(report.rate_trace[k - 1] - report.rate_trace[k - 2]) <= options.epsilon) {
            report.converged = true;
            break;
        }
    }
    report.final_phases = std::move(phases);
    return report;
}

RefinementReport successive_refinement(const ChannelSet& channels, const LinkBudget& budget,
                                       const RefinementOptions& options, const std::optional<PhaseConfig>& init)
{
    const QuadraticForm form = build_quadratic_form(channels);
    return refine(form, init ? *init : PhaseConfig::zeros(form.size(), options.levels), options, budget);
}

PhaseConfig random_phases(std::size_t n, int levels, std::uint64_t seed)
{
    require_levels(levels);
    Rng rng(seed);
    PhaseConfig p{std::vector<int>(n), levels};
    for (auto& idx : p.indices)
        idx = std::min(levels - 1, static_cast<int>(rng.uniform() * levels));
    return p;
}

BruteForceResult brute_force(const ChannelSet& channels, int levels, const LinkBudget& budget,
                             std::uint64_t max_configs)
{
    require_levels(levels);
    budget.validate();
    const QuadraticForm form = build_quadratic_form(channels);
    const std::size_t n = form.size();

    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > max_configs / static_cast<std::uint64_t>(levels)) {
            throw std::length_error("brute force search space " + std::to_string(levels) + "^" + std::to_string(n) +
                                    " exceeds the budget of " + std::to_string(max_configs) + " configurations");
        }
        total *= static_cast<std::uint64_t>(levels);
    }

    PhaseConfig current = PhaseConfig::zeros(n, levels);
    std::vector<int> all_indices(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k)
        all_indices[static_cast<std::size_t>(k)] = k;
    const CVector unit = reflection_vector(PhaseConfig{all_indices, levels});
    CVector v(n, unit[0]);

    BruteForceResult best{current, -std::numeric_limits<double>::infinity(), 0.0};
    for (std::uint64_t count = 0; count < total; ++count) {
        const double gain = form.evaluate(v);
        if (gain > best.gain) {
            best.gain = gain;
            best.phases = current;
        }
        // Odometer increment, last element fastest: lexicographic order.
        for (std::size_t pos = n; pos-- > 0;) {
            auto& idx = current.indices[pos];
            idx = (idx + 1) % levels;
            v[pos] = unit[static_cast<std::size_t>(idx)];
            if (idx != 0)
                break;
        }
    }
    best.rate = rate_from_gain(best.gain, budget);
    return best;
}

void GroupingSpec::validate_for(ArrayShape irs) const
{
    if (group_rows < 1 || group_cols < 1)
        throw std::invalid_argument("group_rows and group_cols must be >= 1");
    if (irs.rows % group_rows != 0)
        throw std::invalid_argument("group_rows=" + std::to_string(group_rows) + " does not divide irs_rows=" +
                                    std::to_string(irs.rows));
    if (irs.cols % group_cols != 0)
        throw std::invalid_argument("group_cols=" + std::to_string(group_cols) + " does not divide irs_cols=" +
                                    std::to_string(irs.cols));
}

ArrayShape GroupingSpec::reduced_shape(ArrayShape irs) const
{
    validate_for(irs);
    return {irs.rows / group_rows, irs.cols / group_cols};
}

namespace {

std::size_t group_of(int row, int col, ArrayShape reduced, const GroupingSpec& g)
{
    return static_cast<std::size_t>((row / g.group_rows) * reduced.cols + col / g.group_cols);
}

} // namespace

CMatrix grouped_cascade(const CMatrix& cascade, ArrayShape irs, const GroupingSpec& grouping)
{
    const ArrayShape reduced = grouping.reduced_shape(irs);
    if (cascade.cols() != static_cast<std::size_t>(irs.size()))
        throw DimensionError("cascade has " + std::to_string(cascade.cols()) + " columns, IRS shape has " +
                             std::to_string(irs.size()) + " elements");
    CMatrix out(cascade.rows(), static_cast<std::size_t>(reduced.size()));
    std::vector<bool> seeded(out.cols(), false);
    for (int r = 0; r < irs.rows; ++r) {
        for (int c = 0; c < irs.cols; ++c) {
            const std::size_t gidx = group_of(r, c, reduced, grouping);
            const auto src = cascade.col(static_cast<std::size_t>(r * irs.cols + c));
            auto dst = out.col(gidx);
            if (!seeded[gidx]) {
                std::copy(src.begin(), src.end(), dst.begin());
                seeded[gidx] = true;
            } else {
                kernels::axpy(cplx{1.0, 0.0}, src, dst);
            }
        }
    }
    return out;
}

PhaseConfig expand_grouped_phases(const PhaseConfig& reduced, ArrayShape irs, const GroupingSpec& grouping)
{
    const ArrayShape rs = grouping.reduced_shape(irs);
    if (reduced.size() != static_cast<std::size_t>(rs.size()))
        throw DimensionError("reduced phase vector does not match the grouping");
    PhaseConfig full{std::vector<int>(static_cast<std::size_t>(irs.size())), reduced.levels};
    for (int r = 0; r < irs.rows; ++r)
        for (int c = 0; c < irs.cols; ++c)
            full.indices[static_cast<std::size_t>(r * irs.cols + c)] = reduced.indices[group_of(r, c, rs, grouping)];
    return full;
}

RefinementReport optimize_grouped(const ChannelSet& channels, ArrayShape irs, const GroupingSpec& grouping,
                                  const LinkBudget& budget, const RefinementOptions& options)
{
    grouping.validate_for(irs);
    if (channels.irs_elements() != static_cast<std::size_t>(irs.size()))
        throw DimensionError("channel set has " + std::to_string(channels.irs_elements()) +
                             " IRS elements, array shape has " + std::to_string(irs.size()));
    const CMatrix reduced_phi = grouped_cascade(cascade_matrix(channels), irs, grouping);
    const QuadraticForm form = quadratic_form_from_cascade(reduced_phi, channels.h_d);
    RefinementReport report = refine(form, PhaseConfig::zeros(form.size(), options.levels), options, budget);
    report.final_phases = expand_grouped_phases(report.final_phases, irs, grouping);
    return report;
}

RefinementReport optimize_position_based(const Scenario& scenario, const ChannelSet& true_channels,
                                         const RefinementOptions& options)
{
    true_channels.validate();
    const ChannelSet estimate = los_channels(scenario);
    if (estimate.bs_antennas() != true_channels.bs_antennas() ||
        estimate.irs_elements() != true_channels.irs_elements())
        throw DimensionError("scenario geometry implies " + std::to_string(estimate.bs_antennas()) + "x" +
                             std::to_string(estimate.irs_elements()) + " channels, true channels are " +
                             std::to_string(true_channels.bs_antennas()) + "x" +
                             std::to_string(true_channels.irs_elements()));
    const LinkBudget budget = LinkBudget::of(scenario);
    const PhaseConfig init = PhaseConfig::zeros(estimate.irs_elements(), options.levels);

    std::vector<double> achieved{rate(true_channels, init, budget)};
    auto hook = [&](int, const PhaseConfig& phases) { achieved.push_back(rate(true_channels, phases, budget)); };
    RefinementReport report = refine(build_quadratic_form(estimate), init, options, budget, hook);
    report.estimate_trace = std::move(report.rate_trace);
    report.rate_trace = std::move(achieved);
    return report;
}

} // namespace irs
