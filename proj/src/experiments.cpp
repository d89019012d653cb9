#include "irs/experiments.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace irs {

std::string Scheme::name() const
{
    switch (kind) {
    case Kind::no_irs: return "no_irs";
    case Kind::full_csi: return "full_csi";
    case Kind::grouped: return "grouped_" + std::to_string(grouping.group_rows) + "x" + std::to_string(grouping.group_cols);
    case Kind::position_based: return "position_based";
    }
    return "unknown";
}

Scheme Scheme::parse(std::string_view text)
{
    if (text == "no_irs")
        return no_irs();
    if (text == "full_csi")
        return full_csi();
    if (text == "position_based")
        return position_based();

    std::string_view dims;
    if (text.starts_with("grouped_"))
        dims = text.substr(8);
    else if (text.starts_with("grouped(") && text.ends_with(")"))
        dims = text.substr(8, text.size() - 9);
    else
        throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");

    const auto x = dims.find('x');
    int rows = 0, cols = 0;
    const auto r1 = std::from_chars(dims.data(), dims.data() + (x == std::string_view::npos ? 0 : x), rows);
    const auto r2 = x == std::string_view::npos ? std::from_chars_result{nullptr, std::errc::invalid_argument}
                                                 : std::from_chars(dims.data() + x + 1, dims.data() + dims.size(), cols);
    if (x == std::string_view::npos || r1.ec != std::errc{} || r1.ptr != dims.data() + x || r2.ec != std::errc{} ||
        r2.ptr != dims.data() + dims.size() || rows < 1 || cols < 1)
        throw std::invalid_argument("malformed grouped scheme '" + std::string(text) + "', expected grouped_<r>x<c>");
    return grouped(rows, cols);
}

std::string_view to_string(SweptVariable v)
{
    switch (v) {
    case SweptVariable::vehicle_offset_c_v: return "vehicle_offset_c_v";
    case SweptVariable::tx_power: return "tx_power";
    case SweptVariable::quantization_bits: return "quantization_bits";
    }
    return "unknown";
}

SweptVariable parse_swept_variable(std::string_view text)
{
    for (auto v : {SweptVariable::vehicle_offset_c_v, SweptVariable::tx_power, SweptVariable::quantization_bits})
        if (text == to_string(v))
            return v;
    throw std::invalid_argument("unknown swept variable '" + std::string(text) + "'");
}

void SweepSpec::validate() const
{
    base_scenario.validate();
    if (values.empty())
        throw std::invalid_argument("sweep needs at least one value");
    if (schemes.empty())
        throw std::invalid_argument("sweep needs at least one scheme");
    if (trials < 1)
        throw std::invalid_argument("trials must be >= 1");
    for (const auto& s : schemes)
        if (s.kind == Scheme::Kind::grouped)
            s.grouping.validate_for(base_scenario.irs);
    for (double v : values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("sweep values must be finite");
        apply_sweep_value(base_scenario, {}, variable, v);
    }
}

SweepPoint apply_sweep_value(const Scenario& base, const RefinementOptions& options, SweptVariable variable,
                             double value)
{
    SweepPoint p{base, options};
    switch (variable) {
    case SweptVariable::vehicle_offset_c_v: p.scenario.c_v = value; break;
    case SweptVariable::tx_power: p.scenario.tx_power_w = dbm_to_watts(value); break;
    case SweptVariable::quantization_bits:
        if (!(value >= 0.0 && value <= 16.0) || value != std::floor(value))
            throw std::invalid_argument("quantization_bits values must be integers in [0, 16]");
        p.options.levels = 1 << static_cast<int>(value);
        break;
    }
    return p;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index)
{
    return derive_seed(master_seed, {trial_index});
}

ChannelSet draw_channels(const Scenario& scenario, std::uint64_t seed)
{
    Rng rng(seed);
    return rician_channels(scenario, rng);
}

SchemeOutcome evaluate_scheme(const Scenario& scenario, const ChannelSet& channels, const Scheme& scheme,
                              const RefinementOptions& options)
{
    const LinkBudget budget = LinkBudget::of(scenario);
    SchemeOutcome out;
    switch (scheme.kind) {
    case Scheme::Kind::no_irs: {
        ChannelSet silent = channels;
        std::fill(silent.h_v.begin(), silent.h_v.end(), cplx{});
        const PhaseConfig zeros = PhaseConfig::zeros(channels.irs_elements(), options.levels);
        out.rate = rate(silent, zeros, budget);
        out.report.final_phases = zeros;
        out.report.rate_trace = {out.rate};
        out.report.converged = true;
        return out;
    }
    case Scheme::Kind::full_csi: out.report = successive_refinement(channels, budget, options); break;
    case Scheme::Kind::grouped:
        out.report = optimize_grouped(channels, scenario.irs, scheme.grouping, budget, options);
        break;
    case Scheme::Kind::position_based: out.report = optimize_position_based(scenario, channels, options); break;
    }
    out.rate = rate(channels, out.report.final_phases, budget);
    return out;
}

TrialOutcome run_trial(const Scenario& scenario, const Scheme& scheme, const RefinementOptions& options,
                       std::uint64_t seed)
{
    const ChannelSet channels = draw_channels(scenario, seed);
    return {evaluate_scheme(scenario, channels, scheme, options).rate, digest(channels)};
}

MeanStats mean_and_std_error(std::span<const double> samples)
{
    MeanStats s;
    if (samples.empty())
        return s;
    double sum = 0.0;
    for (double x : samples)
        sum += x;
    s.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples)
            ss += (x - s.mean) * (x - s.mean);
        const double n = static_cast<double>(samples.size());
        s.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return s;
}

MeanStats paired_difference(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("paired samples differ in length");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return mean_and_std_error(d);
}

const ResultRow& ExperimentResult::row(std::string_view scheme, double value) const
{
    for (const auto& r : rows)
        if (r.scheme == scheme && r.value == value)
            return r;
    throw std::out_of_range("no result row for scheme '" + std::string(scheme) + "'");
}

const std::vector<double>& ExperimentResult::samples_for(std::string_view scheme, double value) const
{
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].scheme == scheme && rows[i].value == value)
            return samples[i];
    throw std::out_of_range("no samples for scheme '" + std::string(scheme) + "'");
}

ExperimentResult run_sweep(const SweepSpec& spec, const RefinementOptions& options)
{
    spec.validate();
    options.validate();

    const std::size_t n_values = spec.values.size();
    const std::size_t n_schemes = spec.schemes.size();
    const std::size_t n_trials = static_cast<std::size_t>(spec.trials);

    std::vector<SweepPoint> points;
    points.reserve(n_values);
    for (double v : spec.values)
        points.push_back(apply_sweep_value(spec.base_scenario, options, spec.variable, v));

    // rates[(scheme * n_values + value) * n_trials + trial]
    std::vector<double> rates(n_schemes * n_values * n_trials);
    std::vector<std::vector<double>> traces(spec.record_traces ? n_schemes * n_values : 0);

    const std::size_t n_tasks = n_values * n_trials;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= n_tasks)
                return;
            const std::size_t vi = task / n_trials;
            const std::size_t trial = task % n_trials;
            try {
                const SweepPoint& point = points[vi];
                const ChannelSet channels = draw_channels(point.scenario, trial_seed(spec.master_seed, trial));
                for (std::size_t si = 0; si < n_schemes; ++si) {
                    SchemeOutcome out = evaluate_scheme(point.scenario, channels, spec.schemes[si], point.options);
                    rates[(si * n_values + vi) * n_trials + trial] = out.rate;
                    if (spec.record_traces && trial == 0)
                        traces[si * n_values + vi] = std::move(out.report.rate_trace);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n_tasks);
                return;
            }
        }
    };

    unsigned n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    ExperimentResult result;
    for (std::size_t si = 0; si < n_schemes; ++si) {
        const std::string name = spec.schemes[si].name();
        for (std::size_t vi = 0; vi < n_values; ++vi) {
            const auto first = rates.begin() + static_cast<std::ptrdiff_t>((si * n_values + vi) * n_trials);
            std::vector<double> samples(first, first + static_cast<std::ptrdiff_t>(n_trials));
            const MeanStats stats = mean_and_std_error(samples);
            result.rows.push_back({name, spec.values[vi], stats.mean, stats.std_error, spec.trials, spec.master_seed});
            result.samples.push_back(std::move(samples));
            if (spec.record_traces)
                result.traces.push_back({name, spec.values[vi], std::move(traces[si * n_values + vi])});
        }
    }
    return result;
}

std::vector<double> convergence_trace(const Scenario& scenario, const RefinementOptions& options,
                                      std::uint64_t seed)
{
    const ChannelSet channels = draw_channels(scenario, seed);
    return successive_refinement(channels, LinkBudget::of(scenario), options).rate_trace;
}

namespace {

void append_number(std::string& out, double value)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

} // namespace

std::string format_result_table(const ExperimentResult& result)
{
    std::string out = "scheme,value,mean_rate_bps_hz,std_error,trials,seed\n";
    for (const auto& r : result.rows) {
        out += r.scheme;
        out += ',';
        append_number(out, r.value);
        out += ',';
        append_number(out, r.mean_rate);
        out += ',';
        append_number(out, r.std_error);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

std::string format_result_json(const ExperimentResult& result, const SweepSpec& spec)
{
    using nlohmann::json;
    json doc;
    doc["swept_variable"] = std::string(to_string(spec.variable));
    doc["values"] = spec.values;
    doc["trials"] = spec.trials;
    doc["master_seed"] = spec.master_seed;
    json schemes = json::array();
    for (const auto& s : spec.schemes)
        schemes.push_back(s.name());
    doc["schemes"] = schemes;

    json rows = json::array();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        rows.push_back({{"scheme", r.scheme},
                        {"value", r.value},
                        {"mean_rate_bps_hz", r.mean_rate},
                        {"std_error", r.std_error},
                        {"trials", r.trials},
                        {"seed", r.seed},
                        {"samples", result.samples[i]}});
    }
    doc["rows"] = rows;

    json traces = json::array();
    for (const auto& t : result.traces)
        traces.push_back({{"scheme", t.scheme}, {"value", t.value}, {"rate_trace", t.rate_trace}});
    doc["traces"] = traces;
    return doc.dump(2) + "\n";
}

} // namespace irs
