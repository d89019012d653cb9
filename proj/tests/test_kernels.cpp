#include <doctest.h>

#include <vector>

#include "irs/kernels.hpp"
#include "irs/rng.hpp"

using namespace irs;

namespace {

CVector random_vector(std::size_t n, Rng& rng, double scale = 1.0)
{
    CVector v(n);
    for (auto& z : v)
        z = scale * rng.complex_normal();
    return v;
}

// std::complex arithmetic, independent of either kernel variant.
cplx reference_dotc(const CVector& x, const CVector& y)
{
    cplx acc{};
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::conj(x[i]) * y[i];
    return acc;
}

double scale_of(const CVector& x, const CVector& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += std::abs(x[i]) * std::abs(y[i]);
    return std::max(s, 1e-300);
}

} // namespace

TEST_CASE("scalar kernels match std::complex reference")
{
    Rng rng(11);
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 16u, 33u, 256u}) {
        const CVector x = random_vector(n, rng), y = random_vector(n, rng);
        const cplx got = kernels::scalar::dotc(x.data(), y.data(), n);
        CHECK(std::abs(got - reference_dotc(x, y)) <= 1e-14 * scale_of(x, y));

        const cplx a{0.3, -1.7};
        CVector y2 = y;
        kernels::scalar::axpy(a, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(y2[i] - (y[i] + a * x[i])) <= 1e-15 * (std::abs(y[i]) + std::abs(a * x[i])));

        double ref = 0.0;
        for (const auto& z : x)
            ref += std::norm(z);
        CHECK(kernels::scalar::norm2(x.data(), n) == doctest::Approx(ref).epsilon(1e-14));
    }
}

#ifdef IRS_HAVE_AVX2
TEST_CASE("avx2 kernels are equivalent to the scalar reference")
{
    if (!kernels::isa_supported(kernels::Isa::avx2)) {
        MESSAGE("AVX2/FMA not available on this CPU; skipping");
        return;
    }
    Rng rng(23);
    // Every remainder class of the 4-wide and 2-wide loops, plus scale extremes.
    for (std::size_t n = 0; n <= 67; ++n) {
        for (double scale : {1.0, 1e-150, 1e120}) {
            const CVector x = random_vector(n, rng, scale), y = random_vector(n, rng, 1.0 / scale);
            const cplx s = kernels::scalar::dotc(x.data(), y.data(), n);
            const cplx v = kernels::avx2::dotc(x.data(), y.data(), n);
            CHECK(std::abs(s - v) <= 1e-14 * scale_of(x, y));

            const cplx a = rng.complex_normal();
            CVector ys = y, yv = y;
            kernels::scalar::axpy(a, x.data(), ys.data(), n);
            kernels::avx2::axpy(a, x.data(), yv.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * (std::abs(y[i]) + std::abs(a) * std::abs(x[i])));

            const double ns = kernels::scalar::norm2(x.data(), n);
            const double nv = kernels::avx2::norm2(x.data(), n);
            CHECK(std::abs(ns - nv) <= 1e-14 * ns);
        }
    }
}
#endif

TEST_CASE("dispatch honours set_isa and reports names")
{
    const auto original = kernels::active_isa();
    kernels::set_isa(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
    CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");

    const CVector x{{1, 2}, {3, -4}, {0.5, 0.25}};
    const CVector y{{-1, 1}, {2, 2}, {4, -8}};
    const cplx want = reference_dotc(x, y);
    CHECK(std::abs(kernels::dotc(x, y) - want) < 1e-14);

    if (kernels::isa_supported(kernels::Isa::avx2)) {
        kernels::set_isa(kernels::Isa::avx2);
        CHECK(kernels::active_isa() == kernels::Isa::avx2);
        CHECK(std::abs(kernels::dotc(x, y) - want) < 1e-14);
    } else {
        CHECK_THROWS_AS(kernels::set_isa(kernels::Isa::avx2), std::invalid_argument);
    }
    kernels::set_isa(original);
}
