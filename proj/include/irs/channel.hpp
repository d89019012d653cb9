#pragma once

// Scene geometry and channel synthesis for the BS / IRS / vehicle uplink.
//
// Coordinate frame (the only place these conventions are defined):
//   - origin at the base of the IRS; z is height
//   - IRS at (0, 0, a_irs) in the YZ plane, panel normal +x, rows stacked along +z,
//     columns along +y
//   - BS at (b_bs, -c_bs, a_bs), panel parallel to the XZ plane with normal +y
//     (facing the IRS and the road), rows along +z, columns along -x
//   - vehicle at (b_v, c_v, a_v), single isotropic antenna
// Element (0, 0) of each array is its phase reference and sits at the device position.

#include <cstdint>
#include <string>

#include "irs/rng.hpp"
#include "irs/types.hpp"

namespace irs {

// Rician K-factor: ratio of LOS to scattered power. Infinite means purely LOS.
class KFactor
{
public:
    enum class Kind
    {
        finite,
        infinite,
    };

    static KFactor linear(double value);
    static KFactor infinite() { return KFactor{Kind::infinite, 0.0}; }

    bool is_infinite() const { return kind_ == Kind::infinite; }
    // Finite value; throws for the infinite factor.
    double value() const;

    // sqrt(K / (1 + K)) and sqrt(1 / (1 + K)).
    double los_amplitude() const;
    double scatter_amplitude() const;

    std::string to_string() const;

    friend bool operator==(const KFactor&, const KFactor&) = default;

private:
    KFactor(Kind kind, double value) : kind_(kind), value_(value) {}

    Kind kind_;
    double value_;
};

// Thermal noise k*T*B*NF in watts.
double thermal_noise_power(double bandwidth_hz, double noise_figure_db, double temperature_k = 290.0);
double dbm_to_watts(double dbm);

inline constexpr double kSpeedOfLight = 299792458.0;

struct Scenario
{
    ArrayShape bs{4, 2};
    ArrayShape irs{16, 16};

    double a_irs = 1.0;
    double a_bs = 2.0;
    double a_v = 1.0;
    double b_bs = 20.0;
    double c_bs = 10.0;
    double b_v = 1.5;
    double c_v = 0.0;

    double carrier_hz = 24.2e9;
    // Zero selects half a wavelength.
    double element_spacing_m = 0.0;

    KFactor beta_r = KFactor::linear(2.0);
    KFactor beta_v = KFactor::linear(1.0);
    KFactor beta_d = KFactor::infinite();

    double tx_power_w = 0.1;
    double noise_power_w = thermal_noise_power(100e6, 7.0);

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double spacing() const { return element_spacing_m > 0.0 ? element_spacing_m : 0.5 * wavelength(); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct ChannelSet
{
    CMatrix h_r; // IRS -> BS, M x N
    CVector h_v; // vehicle -> IRS, N
    CVector h_d; // vehicle -> BS, M

    std::size_t bs_antennas() const { return h_d.size(); }
    std::size_t irs_elements() const { return h_v.size(); }

    // Throws DimensionError on inconsistent sizes, std::invalid_argument on non-finite entries.
    void validate() const;

    friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
};

// FNV-1a over the raw bytes of every entry.
std::uint64_t digest(const ChannelSet& channels);

struct AnglePair
{
    double azimuth = 0.0;   // (-pi, pi], measured from the panel normal toward the column axis
    double elevation = 0.0; // [-pi/2, pi/2], measured from the horizontal plane toward the row axis
};

// Orthonormal panel axes.
struct ArrayFrame
{
    Vec3 normal;
    Vec3 column_axis;
    Vec3 row_axis;
};

ArrayFrame irs_frame();
ArrayFrame bs_frame();

struct DevicePositions
{
    Vec3 bs;
    Vec3 irs;
    Vec3 vehicle;
};

DevicePositions device_positions(const Scenario& scenario);

// Direction of `to` as seen from `from` in the array's local frame.
AnglePair angles_between(const Vec3& from, const Vec3& to, const ArrayFrame& frame);

// Element (p, q) carries exp(j * 2pi/lambda * spacing * (p * u + q * w)) with
// u = sin(elevation) along the row axis and w = cos(elevation) sin(azimuth) along
// the column axis. Row-major element order.
CVector steering_vector(ArrayShape shape, double spacing, double wavelength, const AnglePair& angles);

// UMi street canyon LOS, pre-breakpoint branch:
//   PL = 32.4 + 21 log10(d_3D) + 20 log10(f_c / 1 GHz)   [dB]
// Distances below 1 m are clamped to 1 m.
double path_loss_umi_los_db(double distance_m, double carrier_hz);
// Linear power gain 10^(-PL/10).
double path_loss_umi_los(double distance_m, double carrier_hz);

// Pure LOS channels including path loss and the exp(-j 2pi d / lambda) propagation phase.
ChannelSet los_channels(const Scenario& scenario);

// Rician channels: sqrt(K/(1+K)) LOS + sqrt(1/(1+K)) sqrt(PL) CN(0, 1) per entry.
// Draw order: H_r (column-major), h_v, h_d; links with infinite K draw nothing.
ChannelSet rician_channels(const Scenario& scenario, Rng& rng);

} // namespace irs
