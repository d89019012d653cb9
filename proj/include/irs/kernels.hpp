#pragma once

// Complex BLAS-1 style kernels used on the optimizer hot path.
//
// Each kernel has a portable scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active variant is picked once at startup from the CPU
// features and can be overridden with IRS_KERNELS=scalar|avx2 or set_isa().
// The variants agree to within floating-point reassociation error, not bitwise.

#include <span>
#include <string_view>

#include "irs/types.hpp"

namespace irs::kernels {

enum class Isa
{
    scalar,
    avx2,
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// Best supported ISA, or the IRS_KERNELS override when it names a supported one.
Isa detect_isa();
Isa active_isa();

// Not thread-safe with respect to concurrent kernel calls; call before spawning work.
void set_isa(Isa isa);

// sum_i conj(x_i) * y_i
cplx dotc(std::span<const cplx> x, std::span<const cplx> y);
// y += a * x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
// sum_i |x_i|^2
double norm2(std::span<const cplx> x);

namespace scalar {
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
double norm2(const cplx* x, std::size_t n);
} // namespace scalar

#ifdef IRS_HAVE_AVX2
namespace avx2 {
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
double norm2(const cplx* x, std::size_t n);
} // namespace avx2
#endif

} // namespace irs::kernels
