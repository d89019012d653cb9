// Built with -mavx2 -mfma; only reached through the runtime dispatcher.

#include <immintrin.h>

#include "irs/kernels.hpp"

namespace irs::kernels::avx2 {

namespace {

// std::complex<double> is layout-compatible with double[2]; one __m256d holds two values.
inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

cplx dotc(const cplx* x, const cplx* y, std::size_t n)
{
    // re_acc lanes: [xr*yr, xi*yi, ...]; im_acc lanes: [xr*yi, xi*yr, ...]
    __m256d re_acc0 = _mm256_setzero_pd(), re_acc1 = _mm256_setzero_pd();
    __m256d im_acc0 = _mm256_setzero_pd(), im_acc1 = _mm256_setzero_pd();
    const double* xp = raw(x);
    const double* yp = raw(y);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
        const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
        const __m256d y1 = _mm256_loadu_pd(yp + 2 * i + 4);
        re_acc0 = _mm256_fmadd_pd(x0, y0, re_acc0);
        re_acc1 = _mm256_fmadd_pd(x1, y1, re_acc1);
        im_acc0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), im_acc0);
        im_acc1 = _mm256_fmadd_pd(x1, _mm256_permute_pd(y1, 0b0101), im_acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
        re_acc0 = _mm256_fmadd_pd(x0, y0, re_acc0);
        im_acc0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), im_acc0);
    }

    const __m256d re_acc = _mm256_add_pd(re_acc0, re_acc1);
    const __m256d im_acc = _mm256_add_pd(im_acc0, im_acc1);
    // imag = sum(even lanes) - sum(odd lanes)
    const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    double re = hsum(re_acc);
    double im = hsum(_mm256_mul_pd(im_acc, sign));

    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n)
{
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const double* xp = raw(x);
    double* yp = raw(y);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        const __m256d t = _mm256_mul_pd(ai, _mm256_permute_pd(xv, 0b0101)); // [ai*xi, ai*xr]
        const __m256d prod = _mm256_fmaddsub_pd(ar, xv, t);                  // [ar*xr - ai*xi, ar*xi + ai*xr]
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, prod));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + (a.real() * xr - a.imag() * xi), y[i].imag() + (a.real() * xi + a.imag() * xr)};
    }
}

double norm2(const cplx* x, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    const double* xp = raw(x);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
        acc0 = _mm256_fmadd_pd(x0, x0, acc0);
        acc1 = _mm256_fmadd_pd(x1, x1, acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

} // namespace irs::kernels::avx2
