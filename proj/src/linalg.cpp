#include "slp/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace slp {

Vec matvec(const Mat& a, const Vec& x) {
    if (static_cast<int>(x.size()) != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(a.rows());
    for (int r = 0; r < a.rows(); ++r) {
        double acc = 0.0;
        for (int c = 0; c < a.cols(); ++c) acc += a(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

Vec matvec_transpose(const Mat& a, const Vec& y) {
    if (static_cast<int>(y.size()) != a.rows()) throw std::invalid_argument("matvec_transpose: dimension mismatch");
    // Column-wise dot products: each output entry is an independent
    // reduction in row order, so the result does not depend on how columns
    // are grouped into blocks or which thread computes them.
    Vec g(a.cols());
    for (int c = 0; c < a.cols(); ++c) {
        double acc = 0.0;
        for (int r = 0; r < a.rows(); ++r) acc += a(r, c) * y[r];
        g[c] = acc;
    }
    return g;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2_sq(const Vec& a) { return dot(a, a); }

double norm2(const Vec& a) { return std::sqrt(norm2_sq(a)); }

double inf_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

Vec scaled(const Vec& a, double s) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

double spectral_norm(const Mat& a, double rel_tol, int max_iters) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Vec v(a.cols(), 1.0 / std::sqrt(static_cast<double>(a.cols())));
    double est = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vec u = matvec(a, v);
        Vec w = matvec_transpose(a, u);
        double wn = norm2(w);
        if (wn == 0.0) return 0.0;  // v in the null space and nothing to chase: a^T a v = 0
        double rayleigh = dot(v, w);  // = v^T a^T a v, current sigma^2 estimate
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
        if (it > 0 && std::fabs(rayleigh - est) <= rel_tol * std::fabs(rayleigh)) {
            est = rayleigh;
            break;
        }
        est = rayleigh;
    }
    return std::sqrt(est);
}

std::vector<cplx> solve_complex(std::vector<cplx> a, std::vector<cplx> rhs, int n) {
    if (static_cast<int>(a.size()) != n * n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_complex: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double mag = std::abs(a[static_cast<std::size_t>(r) * n + k]);
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best < 1e-300) throw std::invalid_argument("solve_complex: singular matrix");
        if (piv != k) {
            for (int c = k; c < n; ++c) std::swap(a[static_cast<std::size_t>(piv) * n + c], a[static_cast<std::size_t>(k) * n + c]);
            std::swap(rhs[piv], rhs[k]);
        }
        cplx d = a[static_cast<std::size_t>(k) * n + k];
        for (int r = k + 1; r < n; ++r) {
            cplx f = a[static_cast<std::size_t>(r) * n + k] / d;
            if (f == cplx(0.0, 0.0)) continue;
            a[static_cast<std::size_t>(r) * n + k] = 0.0;
            for (int c = k + 1; c < n; ++c) a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(k) * n + c];
            rhs[r] -= f * rhs[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        cplx acc = rhs[k];
        for (int c = k + 1; c < n; ++c) acc -= a[static_cast<std::size_t>(k) * n + c] * rhs[c];
        rhs[k] = acc / a[static_cast<std::size_t>(k) * n + k];
    }
    return rhs;
}

}  // namespace slp
