#include "irs/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace irs {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// ---------------------------------------------------------------------------
// KFactor

KFactor KFactor::linear(double value)
{
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("Rician K-factor must be finite and non-negative");
    return KFactor{Kind::finite, value};
}

double KFactor::value() const
{
    if (is_infinite())
        throw std::logic_error("infinite K-factor has no finite value");
    return value_;
}

double KFactor::los_amplitude() const
{
    return is_infinite() ? 1.0 : std::sqrt(value_ / (1.0 + value_));
}

double KFactor::scatter_amplitude() const
{
    return is_infinite() ? 0.0 : std::sqrt(1.0 / (1.0 + value_));
}

std::string KFactor::to_string() const
{
    if (is_infinite())
        return "inf";
    std::ostringstream os;
    os << value_;
    return os.str();
}

double thermal_noise_power(double bandwidth_hz, double noise_figure_db, double temperature_k)
{
    constexpr double boltzmann = 1.380649e-23;
    return boltzmann * temperature_k * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// ---------------------------------------------------------------------------
// Scenario / ChannelSet

void Scenario::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw std::invalid_argument(what);
    };
    require(bs.rows >= 1 && bs.cols >= 1, "bs_rows and bs_cols must be >= 1");
    require(irs.rows >= 1 && irs.cols >= 1, "irs_rows and irs_cols must be >= 1");
    for (double v : {a_irs, a_bs, a_v, b_bs, c_bs, b_v, c_v})
        require(std::isfinite(v), "device heights and offsets must be finite");
    require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "f_c must be positive");
    require(std::isfinite(element_spacing_m) && element_spacing_m >= 0.0, "element_spacing must be positive");
    require(std::isfinite(tx_power_w) && tx_power_w > 0.0, "tx_power must be positive");
    require(std::isfinite(noise_power_w) && noise_power_w > 0.0, "noise_power must be positive");
}

void ChannelSet::validate() const
{
    if (h_r.rows() != h_d.size() || h_r.cols() != h_v.size())
        throw DimensionError("channel set dimensions disagree: H_r is " + std::to_string(h_r.rows()) + "x" +
                             std::to_string(h_r.cols()) + ", h_d has " + std::to_string(h_d.size()) +
                             ", h_v has " + std::to_string(h_v.size()));
    if (h_d.empty() || h_v.empty())
        throw DimensionError("channel set needs M >= 1 and N >= 1");
    auto finite = [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    for (const auto& z : h_r.data())
        if (!finite(z))
            throw std::invalid_argument("H_r has a non-finite entry");
    for (const auto& z : h_v)
        if (!finite(z))
            throw std::invalid_argument("h_v has a non-finite entry");
    for (const auto& z : h_d)
        if (!finite(z))
            throw std::invalid_argument("h_d has a non-finite entry");
}

std::uint64_t digest(const ChannelSet& channels)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](double d) {
        auto bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    auto feed_all = [&feed](std::span<const cplx> values) {
        for (const auto& z : values) {
            feed(z.real());
            feed(z.imag());
        }
    };
    feed(static_cast<double>(channels.h_r.rows()));
    feed(static_cast<double>(channels.h_r.cols()));
    feed_all(channels.h_r.data());
    feed_all(channels.h_v);
    feed_all(channels.h_d);
    return h;
}

// ---------------------------------------------------------------------------
// Geometry

ArrayFrame irs_frame() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }
ArrayFrame bs_frame() { return {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}; }

DevicePositions device_positions(const Scenario& s)
{
    return {
        .bs = {s.b_bs, -s.c_bs, s.a_bs},
        .irs = {0.0, 0.0, s.a_irs},
        .vehicle = {s.b_v, s.c_v, s.a_v},
    };
}

AnglePair angles_between(const Vec3& from, const Vec3& to, const ArrayFrame& frame)
{
    const Vec3 d = to - from;
    const double r = norm(d);
    if (!(r > 0.0))
        throw std::invalid_argument("angles_between: points coincide");
    const double along_normal = dot(d, frame.normal) / r;
    const double along_cols = dot(d, frame.column_axis) / r;
    const double along_rows = std::clamp(dot(d, frame.row_axis) / r, -1.0, 1.0);

    AnglePair a;
    a.elevation = std::asin(along_rows);
    a.azimuth = std::atan2(along_cols, along_normal);
    if (a.azimuth <= -std::numbers::pi)
        a.azimuth = std::numbers::pi;
    return a;
}

CVector steering_vector(ArrayShape shape, double spacing, double wavelength, const AnglePair& angles)
{
    const double k = 2.0 * std::numbers::pi / wavelength * spacing;
    const double u = std::sin(angles.elevation);
    const double w = std::cos(angles.elevation) * std::sin(angles.azimuth);
    CVector a(static_cast<std::size_t>(shape.size()));
    for (int p = 0; p < shape.rows; ++p)
        for (int q = 0; q < shape.cols; ++q)
            a[static_cast<std::size_t>(p * shape.cols + q)] = std::polar(1.0, k * (p * u + q * w));
    return a;
}

double path_loss_umi_los_db(double distance_m, double carrier_hz)
{
    if (!(distance_m > 0.0))
        throw std::invalid_argument("path loss distance must be positive");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("path loss carrier frequency must be positive");
    const double d = std::max(distance_m, 1.0);
    return 32.4 + 21.0 * std::log10(d) + 20.0 * std::log10(carrier_hz / 1e9);
}

double path_loss_umi_los(double distance_m, double carrier_hz)
{
    return std::pow(10.0, -path_loss_umi_los_db(distance_m, carrier_hz) / 10.0);
}

// ---------------------------------------------------------------------------
// Channel synthesis

namespace {

// sqrt(PL) * exp(-j 2pi d / lambda)
cplx link_coefficient(double distance, const Scenario& s)
{
    const double amplitude = std::sqrt(path_loss_umi_los(distance, s.carrier_hz));
    const double phase = -2.0 * std::numbers::pi * std::fmod(distance / s.wavelength(), 1.0);
    return std::polar(amplitude, phase);
}

} // namespace

ChannelSet los_channels(const Scenario& s)
{
    s.validate();
    const auto pos = device_positions(s);
    const double lambda = s.wavelength();
    const double spacing = s.spacing();

    // IRS -> BS: arrival at the BS, departure from the IRS.
    const CVector a_bs_from_irs = steering_vector(s.bs, spacing, lambda, angles_between(pos.bs, pos.irs, bs_frame()));
    const CVector a_irs_to_bs = steering_vector(s.irs, spacing, lambda, angles_between(pos.irs, pos.bs, irs_frame()));
    const CVector a_irs_from_v =
        steering_vector(s.irs, spacing, lambda, angles_between(pos.irs, pos.vehicle, irs_frame()));
    const CVector a_bs_from_v = steering_vector(s.bs, spacing, lambda, angles_between(pos.bs, pos.vehicle, bs_frame()));

    const cplx g_r = link_coefficient(norm(pos.bs - pos.irs), s);
    const cplx g_v = link_coefficient(norm(pos.irs - pos.vehicle), s);
    const cplx g_d = link_coefficient(norm(pos.bs - pos.vehicle), s);

    ChannelSet ch;
    const std::size_t m = a_bs_from_irs.size();
    const std::size_t n = a_irs_to_bs.size();
    ch.h_r = CMatrix(m, n);
    for (std::size_t c = 0; c < n; ++c) {
        const cplx scale = g_r * std::conj(a_irs_to_bs[c]);
        for (std::size_t r = 0; r < m; ++r)
            ch.h_r(r, c) = scale * a_bs_from_irs[r];
    }
    ch.h_v.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ch.h_v[i] = g_v * a_irs_from_v[i];
    ch.h_d.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        ch.h_d[i] = g_d * a_bs_from_v[i];
    return ch;
}

namespace {

void add_scatter(std::span<cplx> entries, const KFactor& k, double path_gain, Rng& rng)
{
    if (k.is_infinite())
        return;
    const double los = k.los_amplitude();
    const double scatter = k.scatter_amplitude() * std::sqrt(path_gain);
    for (auto& z : entries)
        z = los * z + scatter * rng.complex_normal();
}

} // namespace

ChannelSet rician_channels(const Scenario& s, Rng& rng)
{
    ChannelSet ch = los_channels(s);
    const auto pos = device_positions(s);
    add_scatter(ch.h_r.data(), s.beta_r, path_loss_umi_los(norm(pos.bs - pos.irs), s.carrier_hz), rng);
    add_scatter(ch.h_v, s.beta_v, path_loss_umi_los(norm(pos.irs - pos.vehicle), s.carrier_hz), rng);
    add_scatter(ch.h_d, s.beta_d, path_loss_umi_los(norm(pos.bs - pos.vehicle), s.carrier_hz), rng);
    return ch;
}

} // namespace irs
