#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "irs/kernels.hpp"

namespace irs::kernels {

namespace {

struct KernelTable
{
    Isa isa;
    cplx (*dotc)(const cplx*, const cplx*, std::size_t);
    void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
    double (*norm2)(const cplx*, std::size_t);
};

constexpr KernelTable scalar_table{Isa::scalar, &scalar::dotc, &scalar::axpy, &scalar::norm2};
#ifdef IRS_HAVE_AVX2
constexpr KernelTable avx2_table{Isa::avx2, &avx2::dotc, &avx2::axpy, &avx2::norm2};
#endif

const KernelTable* table_for(Isa isa)
{
#ifdef IRS_HAVE_AVX2
    if (isa == Isa::avx2)
        return &avx2_table;
#endif
    return &scalar_table;
}

std::atomic<const KernelTable*>& active_table()
{
    static std::atomic<const KernelTable*> table{table_for(detect_isa())};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(IRS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa detect_isa()
{
    if (const char* env = std::getenv("IRS_KERNELS")) {
        const std::string want{env};
        if (want == "scalar")
            return Isa::scalar;
        if (want == "avx2" && isa_supported(Isa::avx2))
            return Isa::avx2;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return active_table().load(std::memory_order_relaxed)->isa; }

void set_isa(Isa isa)
{
    if (!isa_supported(isa))
        throw std::invalid_argument("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
    active_table().store(table_for(isa), std::memory_order_relaxed);
}

cplx dotc(std::span<const cplx> x, std::span<const cplx> y)
{
    assert(x.size() == y.size());
    return active_table().load(std::memory_order_relaxed)->dotc(x.data(), y.data(), x.size());
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y)
{
    assert(x.size() == y.size());
    active_table().load(std::memory_order_relaxed)->axpy(a, x.data(), y.data(), x.size());
}

double norm2(std::span<const cplx> x)
{
    return active_table().load(std::memory_order_relaxed)->norm2(x.data(), x.size());
}

} // namespace irs::kernels
