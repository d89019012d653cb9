#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace irs {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Dense complex matrix, column-major. Columns are contiguous so that per-element
// operations on the IRS dimension (one column per reflecting element) vectorize.
class CMatrix
{
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<cplx> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
    std::span<const cplx> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v);

// Planar array dimensions. Elements are indexed row-major: i = row * cols + col.
struct ArrayShape
{
    int rows = 1;
    int cols = 1;

    int size() const { return rows * cols; }
    friend bool operator==(const ArrayShape&, const ArrayShape&) = default;
};

class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace irs
