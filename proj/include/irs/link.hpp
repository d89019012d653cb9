#pragma once

// Effective channel, MRC combining, SNR/rate, and the quadratic-form view of the
// channel gain used by the phase optimizer:
//
//   ||h_d + H_r diag(v) h_v||^2 = v^H A v + 2 Re{v^H b} + c
//   Phi = H_r diag(h_v),  A = Phi^H Phi,  b = Phi^H h_d,  c = ||h_d||^2

#include <span>
#include <vector>

#include "irs/channel.hpp"
#include "irs/types.hpp"

namespace irs {

// Discrete IRS phase state; element i is rotated by indices[i] * 2pi / levels.
struct PhaseConfig
{
    std::vector<int> indices;
    int levels = 1;

    static PhaseConfig zeros(std::size_t n, int levels);

    std::size_t size() const { return indices.size(); }
    double phase(std::size_t i) const;
    // Throws std::invalid_argument if levels < 1 or an index is outside [0, levels).
    void validate() const;

    friend bool operator==(const PhaseConfig&, const PhaseConfig&) = default;
};

// v = [exp(j theta_1), ..., exp(j theta_N)]
CVector reflection_vector(const PhaseConfig& phases);

// h_d + H_r diag(v) h_v
CVector effective_channel(const ChannelSet& channels, std::span<const cplx> v);
CVector effective_channel(const ChannelSet& channels, const PhaseConfig& phases);

// ||effective_channel||^2, evaluated directly.
double channel_gain(const ChannelSet& channels, const PhaseConfig& phases);

struct QuadraticForm
{
    CMatrix a; // N x N Hermitian PSD
    CVector b;
    double c = 0.0;

    std::size_t size() const { return b.size(); }
    // v^H A v + 2 Re{v^H b} + c
    double evaluate(std::span<const cplx> v) const;
};

// Phi = H_r diag(h_v), M x N.
CMatrix cascade_matrix(const ChannelSet& channels);

QuadraticForm build_quadratic_form(const ChannelSet& channels);
QuadraticForm quadratic_form_from_cascade(const CMatrix& cascade, std::span<const cplx> direct);

// Gain seen as a function of v_n alone: 2 Re{conj(v_n) kappa_n} + tau_n, valid for |v_n| = 1.
struct LocalTerms
{
    cplx kappa;
    double tau = 0.0;
};

// Evaluates both terms from their defining sums (O(N^2)); for verification, not the hot path.
LocalTerms element_local_terms(const QuadraticForm& form, std::span<const cplx> v, std::size_t n);

struct LinkBudget
{
    double tx_power_w = 1.0;
    double noise_power_w = 1.0;

    static LinkBudget of(const Scenario& s) { return {s.tx_power_w, s.noise_power_w}; }
    void validate() const;
};

double snr_from_gain(double gain, const LinkBudget& budget);
double rate_from_gain(double gain, const LinkBudget& budget);

// P ||h_eff||^2 / N0
double snr(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget);
// Same quantity obtained by applying the unit-norm MRC combiner w = h_eff / ||h_eff||
// and measuring P |w^H h_eff|^2 / (N0 ||w||^2).
double snr_mrc(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget);
// log2(1 + SNR) in bit/s/Hz
double rate(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget);

} // namespace irs
