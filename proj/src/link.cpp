#include "irs/link.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "irs/kernels.hpp"

namespace irs {

PhaseConfig PhaseConfig::zeros(std::size_t n, int levels)
{
    PhaseConfig p{std::vector<int>(n, 0), levels};
    p.validate();
    return p;
}

double PhaseConfig::phase(std::size_t i) const
{
    return indices.at(i) * (2.0 * std::numbers::pi / levels);
}

void PhaseConfig::validate() const
{
    if (levels < 1)
        throw std::invalid_argument("phase levels must be >= 1");
    for (std::size_t i = 0; i < indices.size(); ++i)
        if (indices[i] < 0 || indices[i] >= levels)
            throw std::invalid_argument("phase index " + std::to_string(indices[i]) + " at element " +
                                        std::to_string(i) + " outside [0, " + std::to_string(levels) + ")");
}

CVector reflection_vector(const PhaseConfig& phases)
{
    phases.validate();
    static constexpr cplx quarter_turns[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    CVector v(phases.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int idx = phases.indices[i];
        // Multiples of pi/2 are exact so that 1- and 2-bit configurations carry no rounding.
        if ((4 * idx) % phases.levels == 0)
            v[i] = quarter_turns[4 * idx / phases.levels];
        else
            v[i] = std::polar(1.0, phases.phase(i));
    }
    return v;
}

CVector effective_channel(const ChannelSet& channels, std::span<const cplx> v)
{
    channels.validate();
    if (v.size() != channels.irs_elements())
        throw DimensionError("reflection vector has " + std::to_string(v.size()) + " entries, IRS has " +
                             std::to_string(channels.irs_elements()));
    CVector h = channels.h_d;
    for (std::size_t n = 0; n < v.size(); ++n)
        kernels::axpy(channels.h_v[n] * v[n], channels.h_r.col(n), h);
    return h;
}

CVector effective_channel(const ChannelSet& channels, const PhaseConfig& phases)
{
    return effective_channel(channels, reflection_vector(phases));
}

double channel_gain(const ChannelSet& channels, const PhaseConfig& phases)
{
    return kernels::norm2(effective_channel(channels, phases));
}

double QuadraticForm::evaluate(std::span<const cplx> v) const
{
    if (v.size() != size())
        throw DimensionError("vector length does not match quadratic form");
    CVector av(size());
    for (std::size_t j = 0; j < size(); ++j)
        kernels::axpy(v[j], a.col(j), av);
    return kernels::dotc(v, av).real() + 2.0 * kernels::dotc(v, b).real() + c;
}

CMatrix cascade_matrix(const ChannelSet& channels)
{
    channels.validate();
    CMatrix phi(channels.h_r.rows(), channels.h_r.cols());
    for (std::size_t n = 0; n < phi.cols(); ++n) {
        const auto src = channels.h_r.col(n);
        auto dst = phi.col(n);
        for (std::size_t m = 0; m < phi.rows(); ++m)
            dst[m] = src[m] * channels.h_v[n];
    }
    return phi;
}

QuadraticForm build_quadratic_form(const ChannelSet& channels)
{
    return quadratic_form_from_cascade(cascade_matrix(channels), channels.h_d);
}

QuadraticForm quadratic_form_from_cascade(const CMatrix& cascade, std::span<const cplx> direct)
{
    if (cascade.rows() != direct.size())
        throw DimensionError("cascade rows do not match direct channel length");
    const std::size_t n = cascade.cols();
    QuadraticForm q;
    q.a = CMatrix(n, n);
    q.b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const cplx aij = kernels::dotc(cascade.col(i), cascade.col(j));
            q.a(i, j) = aij;
            q.a(j, i) = std::conj(aij);
        }
        q.a(j, j) = kernels::norm2(cascade.col(j));
        q.b[j] = kernels::dotc(cascade.col(j), direct);
    }
    q.c = kernels::norm2(direct);
    return q;
}

LocalTerms element_local_terms(const QuadraticForm& form, std::span<const cplx> v, std::size_t n)
{
    const std::size_t size = form.size();
    if (v.size() != size)
        throw DimensionError("vector length does not match quadratic form");
    if (n >= size)
        throw std::out_of_range("element index " + std::to_string(n) + " out of range for N=" + std::to_string(size));

    LocalTerms t;
    t.kappa = form.b[n];
    for (std::size_t j = 0; j < size; ++j)
        if (j != n)
            t.kappa += form.a(n, j) * v[j];

    double rest = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        if (i == n)
            continue;
        for (std::size_t j = 0; j < size; ++j)
            if (j != n)
                rest += (std::conj(v[i]) * form.a(i, j) * v[j]).real();
        linear += (std::conj(v[i]) * form.b[i]).real();
    }
    t.tau = rest + 2.0 * linear + form.a(n, n).real() + form.c;
    return t;
}

void LinkBudget::validate() const
{
    if (!(tx_power_w > 0.0) || !std::isfinite(tx_power_w))
        throw std::invalid_argument("transmit power must be positive");
    if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w))
        throw std::invalid_argument("noise power must be positive");
}

double snr_from_gain(double gain, const LinkBudget& budget)
{
    budget.validate();
    return budget.tx_power_w * gain / budget.noise_power_w;
}

double rate_from_gain(double gain, const LinkBudget& budget)
{
    return std::log2(1.0 + snr_from_gain(gain, budget));
}

double snr(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget)
{
    return snr_from_gain(channel_gain(channels, phases), budget);
}

double snr_mrc(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget)
{
    budget.validate();
    const CVector h = effective_channel(channels, phases);
    const double h_norm = std::sqrt(kernels::norm2(h));
    if (h_norm == 0.0)
        return 0.0;
    CVector w(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        w[i] = h[i] / h_norm;
    const double signal = std::norm(kernels::dotc(w, h));
    return budget.tx_power_w * signal / (budget.noise_power_w * kernels::norm2(w));
}

double rate(const ChannelSet& channels, const PhaseConfig& phases, const LinkBudget& budget)
{
    return std::log2(1.0 + snr(channels, phases, budget));
}

} // namespace irs
