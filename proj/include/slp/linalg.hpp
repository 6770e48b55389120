#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace slp {

using Vec = std::vector<double>;
using cplx = std::complex<double>;

// Dense row-major matrix of doubles. The systems in this project are tiny
// (at most a few hundred rows/columns), so there is no view or expression
// machinery, just contiguous storage with checked construction.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Vec matvec(const Mat& a, const Vec& x);            // a * x
Vec matvec_transpose(const Mat& a, const Vec& y);  // a^T * y

double dot(const Vec& a, const Vec& b);
double norm2_sq(const Vec& a);
double norm2(const Vec& a);
double inf_norm(const Vec& a);

Vec scaled(const Vec& a, double s);

// Largest singular value of a, via power iteration on a^T a with a fixed
// deterministic start vector. Converges when the Rayleigh estimate is stable
// to rel_tol.
double spectral_norm(const Mat& a, double rel_tol = 1e-8, int max_iters = 20000);

// Solves the dense n-by-n complex system A z = rhs with partial-pivot
// Gaussian elimination. A is row-major and consumed by value. Throws
// std::invalid_argument on a (numerically) singular pivot.
std::vector<cplx> solve_complex(std::vector<cplx> a, std::vector<cplx> rhs, int n);

}  // namespace slp
