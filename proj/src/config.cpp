#include "irs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace irs {

ConfigError::ConfigError(std::size_t line, std::string key, const std::string& message)
    : std::runtime_error((line ? "config line " + std::to_string(line) : std::string("override")) + ": key '" + key +
                         "': " + message),
      line_(line), key_(std::move(key))
{
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry
{
    std::string value;
    std::size_t line = 0;
};

using Entries = std::map<std::string, Entry, std::less<>>;

// Parsed values throw std::invalid_argument; the caller attaches key and line.
double to_double(std::string_view text)
{
    double v = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+')
        ++first;
    auto res = std::from_chars(first, text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw std::invalid_argument("expected a finite number, got '" + std::string(text) + "'");
    return v;
}

double to_positive(std::string_view text)
{
    const double v = to_double(text);
    if (!(v > 0.0))
        throw std::invalid_argument("must be positive, got '" + std::string(text) + "'");
    return v;
}

std::int64_t to_int(std::string_view text)
{
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
    return v;
}

int to_int_at_least(std::string_view text, int minimum)
{
    const auto v = to_int(text);
    if (v < minimum || v > 1'000'000'000)
        throw std::invalid_argument("must be an integer >= " + std::to_string(minimum) + ", got '" +
                                    std::string(text) + "'");
    return static_cast<int>(v);
}

std::uint64_t to_u64(std::string_view text)
{
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

bool to_bool(std::string_view text)
{
    if (text == "true" || text == "yes" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "0")
        return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

KFactor to_kfactor(std::string_view text)
{
    if (text == "inf" || text == "infinite" || text == "infinity")
        return KFactor::infinite();
    const double v = to_double(text);
    if (v < 0.0)
        throw std::invalid_argument("K-factor must be >= 0 or 'inf', got '" + std::string(text) + "'");
    return KFactor::linear(v);
}

std::vector<std::string_view> split_list(std::string_view text)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty())
            out.push_back(item);
        if (comma == std::string_view::npos)
            break;
        text = text.substr(comma + 1);
    }
    return out;
}

std::vector<double> to_values(std::string_view text)
{
    if (text.find(':') != std::string_view::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
            throw std::invalid_argument("range must be start:step:stop, got '" + std::string(text) + "'");
        const double start = to_double(trim(text.substr(0, c1)));
        const double step = to_double(trim(text.substr(c1 + 1, c2 - c1 - 1)));
        const double stop = to_double(trim(text.substr(c2 + 1)));
        if (step == 0.0 || (stop - start) / step < 0.0)
            throw std::invalid_argument("range step does not reach stop in '" + std::string(text) + "'");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000)
            throw std::invalid_argument("range has too many points");
        std::vector<double> out;
        for (long i = 0; i < count; ++i)
            out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::vector<double> out;
    for (auto item : split_list(text))
        out.push_back(to_double(item));
    if (out.empty())
        throw std::invalid_argument("value list is empty");
    return out;
}

std::vector<Scheme> to_schemes(std::string_view text)
{
    std::vector<Scheme> out;
    for (auto item : split_list(text))
        out.push_back(Scheme::parse(item));
    if (out.empty())
        throw std::invalid_argument("scheme list is empty");
    return out;
}

// Settings collected from all entries before cross-field validation.
struct Builder
{
    Config config;
    SweepSpec sweep;
    bool has_sweep = false;
    std::optional<double> tx_power_dbm, tx_power_w;
    std::optional<double> noise_power_w;
    double bandwidth_hz = 100e6, noise_figure_db = 7.0, temperature_k = 290.0;
    bool noise_components_set = false;
    std::optional<int> group_rows, group_cols;
    std::optional<int> phase_bits;
    bool levels_set = false;
    bool values_set = false;
    std::string init = "zero";
};

using Setter = std::function<void(Builder&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"scenario.bs_rows", [](Builder& b, auto v) { b.config.scenario.bs.rows = to_int_at_least(v, 1); }},
        {"scenario.bs_cols", [](Builder& b, auto v) { b.config.scenario.bs.cols = to_int_at_least(v, 1); }},
        {"scenario.irs_rows", [](Builder& b, auto v) { b.config.scenario.irs.rows = to_int_at_least(v, 1); }},
        {"scenario.irs_cols", [](Builder& b, auto v) { b.config.scenario.irs.cols = to_int_at_least(v, 1); }},
        {"scenario.a_irs", [](Builder& b, auto v) { b.config.scenario.a_irs = to_double(v); }},
        {"scenario.a_bs", [](Builder& b, auto v) { b.config.scenario.a_bs = to_double(v); }},
        {"scenario.a_v", [](Builder& b, auto v) { b.config.scenario.a_v = to_double(v); }},
        {"scenario.b_bs", [](Builder& b, auto v) { b.config.scenario.b_bs = to_double(v); }},
        {"scenario.c_bs", [](Builder& b, auto v) { b.config.scenario.c_bs = to_double(v); }},
        {"scenario.b_v", [](Builder& b, auto v) { b.config.scenario.b_v = to_double(v); }},
        {"scenario.c_v", [](Builder& b, auto v) { b.config.scenario.c_v = to_double(v); }},
        {"scenario.f_c", [](Builder& b, auto v) { b.config.scenario.carrier_hz = to_positive(v); }},
        {"scenario.element_spacing", [](Builder& b, auto v) { b.config.scenario.element_spacing_m = to_positive(v); }},
        {"scenario.beta_r", [](Builder& b, auto v) { b.config.scenario.beta_r = to_kfactor(v); }},
        {"scenario.beta_v", [](Builder& b, auto v) { b.config.scenario.beta_v = to_kfactor(v); }},
        {"scenario.beta_d", [](Builder& b, auto v) { b.config.scenario.beta_d = to_kfactor(v); }},
        {"scenario.tx_power_dbm", [](Builder& b, auto v) { b.tx_power_dbm = to_double(v); }},
        {"scenario.tx_power_w", [](Builder& b, auto v) { b.tx_power_w = to_positive(v); }},
        {"scenario.noise_power_w", [](Builder& b, auto v) { b.noise_power_w = to_positive(v); }},
        {"scenario.bandwidth_hz",
         [](Builder& b, auto v) {
             b.bandwidth_hz = to_positive(v);
             b.noise_components_set = true;
         }},
        {"scenario.noise_figure_db",
         [](Builder& b, auto v) {
             b.noise_figure_db = to_double(v);
             b.noise_components_set = true;
         }},
        {"scenario.temperature_k",
         [](Builder& b, auto v) {
             b.temperature_k = to_positive(v);
             b.noise_components_set = true;
         }},

        {"optimizer.scheme", [](Builder& b, auto v) { b.config.optimizer.scheme = Scheme::parse(v); }},
        {"optimizer.levels",
         [](Builder& b, auto v) {
             b.config.optimizer.refinement.levels = to_int_at_least(v, 1);
             b.levels_set = true;
         }},
        {"optimizer.phase_bits",
         [](Builder& b, auto v) {
             const int bits = to_int_at_least(v, 0);
             if (bits > 16)
                 throw std::invalid_argument("phase_bits must be <= 16");
             b.phase_bits = bits;
         }},
        {"optimizer.epsilon", [](Builder& b, auto v) { b.config.optimizer.refinement.epsilon = to_positive(v); }},
        {"optimizer.max_outer_iters",
         [](Builder& b, auto v) { b.config.optimizer.refinement.max_outer_iters = to_int_at_least(v, 1); }},
        {"optimizer.group_rows", [](Builder& b, auto v) { b.group_rows = to_int_at_least(v, 1); }},
        {"optimizer.group_cols", [](Builder& b, auto v) { b.group_cols = to_int_at_least(v, 1); }},
        {"optimizer.init",
         [](Builder& b, auto v) {
             if (v != "zero" && v != "random")
                 throw std::invalid_argument("init must be 'zero' or 'random'");
             b.init = std::string(v);
         }},
        {"optimizer.init_seed", [](Builder& b, auto v) { b.config.optimizer.init_seed = to_u64(v); }},
        {"optimizer.brute_force_budget",
         [](Builder& b, auto v) { b.config.optimizer.brute_force_budget = std::max<std::uint64_t>(1, to_u64(v)); }},

        {"sweep.variable", [](Builder& b, auto v) { b.sweep.variable = parse_swept_variable(v); }},
        {"sweep.values",
         [](Builder& b, auto v) {
             b.sweep.values = to_values(v);
             b.values_set = true;
         }},
        {"sweep.schemes", [](Builder& b, auto v) { b.sweep.schemes = to_schemes(v); }},
        {"sweep.trials", [](Builder& b, auto v) { b.sweep.trials = to_int_at_least(v, 1); }},
        {"sweep.master_seed", [](Builder& b, auto v) { b.sweep.master_seed = to_u64(v); }},
        {"sweep.threads", [](Builder& b, auto v) { b.sweep.threads = static_cast<unsigned>(to_int_at_least(v, 0)); }},
        {"sweep.record_traces", [](Builder& b, auto v) { b.sweep.record_traces = to_bool(v); }},

        {"run.seed", [](Builder& b, auto v) { b.config.seed = to_u64(v); }},
    };
    return table;
}

void add_entry(Entries& entries, std::string key, std::string value, std::size_t line)
{
    if (!setters().contains(key))
        throw ConfigError(line, key, "unknown key");
    if (auto it = entries.find(key); it != entries.end() && it->second.line != 0 && line != 0)
        throw ConfigError(line, key, "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
    entries[key] = Entry{std::move(value), line};
}

Entries read_entries(std::string_view text, bool& has_sweep_section)
{
    Entries entries;
    std::string section;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const auto end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(number, std::string(line), "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "scenario" && section != "optimizer" && section != "sweep" && section != "run")
                throw ConfigError(number, section, "unknown section");
            if (section == "sweep")
                has_sweep_section = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(number, std::string(line), "expected 'key = value'");
        if (section.empty())
            throw ConfigError(number, std::string(trim(line.substr(0, eq))), "key outside of any section");
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        add_entry(entries, key, std::string(trim(line.substr(eq + 1))), number);
    }
    return entries;
}

const Entry* find(const Entries& entries, std::string_view key)
{
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

// Line/key of the first present key, for diagnostics of cross-field checks.
std::pair<std::size_t, std::string> locate(const Entries& entries, std::initializer_list<std::string_view> keys)
{
    for (auto k : keys)
        if (const Entry* e = find(entries, k))
            return {e->line, std::string(k)};
    return {0, std::string(*keys.begin())};
}

} // namespace

std::vector<double> default_sweep_values(SweptVariable variable)
{
    std::vector<double> out;
    switch (variable) {
    case SweptVariable::vehicle_offset_c_v:
        for (int c = -20; c <= 20; ++c)
            out.push_back(c);
        break;
    case SweptVariable::tx_power:
        for (int p = 0; p <= 30; p += 2)
            out.push_back(p);
        break;
    case SweptVariable::quantization_bits: out = {1, 2, 3}; break;
    }
    return out;
}

Config parse_config(std::string_view text, std::span<const std::string> overrides)
{
    bool has_sweep_section = false;
    Entries entries = read_entries(text, has_sweep_section);
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError(0, o, "override must be section.key=value");
        const std::string key{trim(std::string_view(o).substr(0, eq))};
        add_entry(entries, key, std::string(trim(std::string_view(o).substr(eq + 1))), 0);
        if (key.starts_with("sweep."))
            has_sweep_section = true;
    }

    Builder b;
    b.sweep.schemes = {Scheme::no_irs(), Scheme::full_csi()};
    for (const auto& [key, entry] : entries) {
        try {
            setters().at(key)(b, entry.value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(entry.line, key, e.what());
        }
    }

    Config& cfg = b.config;
    Scenario& s = cfg.scenario;

    if (b.tx_power_dbm && b.tx_power_w) {
        auto [line, key] = locate(entries, {"scenario.tx_power_w"});
        throw ConfigError(line, key, "conflicts with scenario.tx_power_dbm; set only one");
    }
    if (b.tx_power_dbm)
        s.tx_power_w = dbm_to_watts(*b.tx_power_dbm);
    if (b.tx_power_w)
        s.tx_power_w = *b.tx_power_w;

    if (b.noise_power_w && b.noise_components_set) {
        auto [line, key] = locate(entries, {"scenario.noise_power_w"});
        throw ConfigError(line, key, "conflicts with bandwidth_hz/noise_figure_db/temperature_k; set only one form");
    }
    s.noise_power_w =
        b.noise_power_w ? *b.noise_power_w : thermal_noise_power(b.bandwidth_hz, b.noise_figure_db, b.temperature_k);

    try {
        s.validate();
    } catch (const std::exception& e) {
        auto [line, key] = locate(entries, {"scenario.tx_power_dbm", "scenario.noise_figure_db"});
        throw ConfigError(line, key, e.what());
    }

    auto& ref = cfg.optimizer.refinement;
    if (b.phase_bits && b.levels_set) {
        auto [line, key] = locate(entries, {"optimizer.phase_bits"});
        throw ConfigError(line, key, "conflicts with optimizer.levels; set only one");
    }
    if (b.phase_bits)
        ref.levels = 1 << *b.phase_bits;

    // Explicit group dimensions refine (or imply) the grouped scheme.
    if (b.group_rows || b.group_cols) {
        if (cfg.optimizer.scheme.kind != Scheme::Kind::grouped) {
            if (find(entries, "optimizer.scheme") == nullptr)
                cfg.optimizer.scheme = Scheme::grouped(1, 1);
        }
        if (cfg.optimizer.scheme.kind == Scheme::Kind::grouped) {
            if (b.group_rows)
                cfg.optimizer.scheme.grouping.group_rows = *b.group_rows;
            if (b.group_cols)
                cfg.optimizer.scheme.grouping.group_cols = *b.group_cols;
        }
        const GroupingSpec g{b.group_rows.value_or(1), b.group_cols.value_or(1)};
        try {
            g.validate_for(s.irs);
        } catch (const std::exception& e) {
            const bool rows_bad = b.group_rows && s.irs.rows % *b.group_rows != 0;
            auto [line, key] = rows_bad ? locate(entries, {"optimizer.group_rows"})
                                        : locate(entries, {"optimizer.group_cols", "optimizer.group_rows"});
            throw ConfigError(line, key, std::string("grouping does not divide the IRS array: ") + e.what());
        }
    }
    if (cfg.optimizer.scheme.kind == Scheme::Kind::grouped) {
        try {
            cfg.optimizer.scheme.grouping.validate_for(s.irs);
        } catch (const std::exception& e) {
            auto [line, key] = locate(entries, {"optimizer.scheme", "optimizer.group_rows", "scenario.irs_rows"});
            throw ConfigError(line, key, std::string("grouping does not divide the IRS array: ") + e.what());
        }
    }

    if (b.init == "random") {
        cfg.optimizer.random_init = true;
    }

    if (has_sweep_section) {
        b.sweep.base_scenario = s;
        if (!b.values_set)
            b.sweep.values = default_sweep_values(b.sweep.variable);
        try {
            b.sweep.validate();
        } catch (const std::exception& e) {
            auto [line, key] = locate(entries, {"sweep.schemes", "sweep.values", "sweep.variable"});
            throw ConfigError(line, key, e.what());
        }
        cfg.sweep = std::move(b.sweep);
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path, std::span<const std::string> overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

} // namespace irs
