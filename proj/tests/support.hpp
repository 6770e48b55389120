#pragma once

// Shared helpers for the unit tests and the acceptance harness: constraint
// systems built through the public pipeline from seeded streams, plus an
// independent matrix-forming reference for the block x-update.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slp/ci_system.hpp"
#include "slp/harness.hpp"
#include "slp/pif_solver.hpp"
#include "slp/rng.hpp"

namespace testsup {

inline slp::CISystem random_system(std::uint64_t seed, int users, int antennas, slp::ModKind kind, int order,
                                   double gamma = 1.0, double sigma = 1.0) {
    slp::RandomStream ch_stream(seed, 0);
    slp::ComplexChannel ch = slp::gen_channel(users, antennas, ch_stream);
    slp::ConstellationSpec spec = slp::make_constellation(kind, order);
    slp::RandomStream sym_stream(seed, 1);
    std::vector<int> idx(users);
    for (int& v : idx) v = sym_stream.next_below(order);
    return slp::build_ci_system(ch, idx, spec, slp::Vec{gamma}, slp::Vec{sigma});
}

inline slp::Vec random_vec(slp::RandomStream& st, int n, double scale = 1.0) {
    slp::Vec v(n);
    for (double& x : v) x = st.next_gaussian() * scale;
    return v;
}

// Plain partial-pivot Gaussian elimination on a row-major square matrix.
inline slp::Vec solve_dense(std::vector<double> a, slp::Vec rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[static_cast<std::size_t>(r) * n + col]) >
                std::fabs(a[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        if (std::fabs(a[static_cast<std::size_t>(piv) * n + col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(col) * n + c], a[static_cast<std::size_t>(piv) * n + c]);
            std::swap(rhs[col], rhs[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] / a[static_cast<std::size_t>(col) * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    slp::Vec x(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= a[static_cast<std::size_t>(r) * n + c] * x[c];
        x[r] = acc / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

// The block x-update done the long way: per block i, form the quadratic
// system (2 I + rho A_i^T A_i + P_i) x_i = A_i^T lambda
//   + rho A_i^T (b + c - sum_{j != i} A_j x_j) + P_i x_i
// with P_i = tau I - rho A_i^T A_i assembled explicitly, and run a dense
// solve. The off-block sum is accumulated column by column rather than as
// A x - A_i x_i, so this shares no cancellation shortcuts with the
// closed-form route it is checked against.
inline slp::Vec explicit_block_update(const slp::CISystem& sys, const slp::SolverState& st, double rho, double tau,
                                      const slp::BlockPartition& part) {
    int m = sys.rows();
    slp::Vec xnew(static_cast<std::size_t>(sys.cols()), 0.0);
    std::vector<char> in_block(static_cast<std::size_t>(sys.cols()), 0);
    for (const auto& blk : part.blocks) {
        int nb = static_cast<int>(blk.size());
        for (int c : blk) in_block[static_cast<std::size_t>(c)] = 1;

        std::vector<double> gram(static_cast<std::size_t>(nb) * nb, 0.0);
        for (int a = 0; a < nb; ++a)
            for (int b2 = 0; b2 < nb; ++b2) {
                double acc = 0.0;
                for (int r = 0; r < m; ++r) acc += sys.A(r, blk[a]) * sys.A(r, blk[b2]);
                gram[static_cast<std::size_t>(a) * nb + b2] = acc;
            }
        std::vector<double> mat(static_cast<std::size_t>(nb) * nb);
        for (int a = 0; a < nb; ++a)
            for (int b2 = 0; b2 < nb; ++b2) {
                double g = gram[static_cast<std::size_t>(a) * nb + b2];
                double prox = (a == b2 ? tau : 0.0) - rho * g;
                mat[static_cast<std::size_t>(a) * nb + b2] = (a == b2 ? 2.0 : 0.0) + rho * g + prox;
            }

        slp::Vec rhs(static_cast<std::size_t>(nb), 0.0);
        for (int a = 0; a < nb; ++a) {
            double acc = 0.0;
            for (int r = 0; r < m; ++r) {
                double off = 0.0;
                for (int c = 0; c < sys.cols(); ++c)
                    if (!in_block[static_cast<std::size_t>(c)]) off += sys.A(r, c) * st.x[c];
                acc += sys.A(r, blk[a]) * (st.lambda[r] + rho * (sys.b[r] + st.c[r] - off));
            }
            acc += tau * st.x[blk[a]];
            for (int b2 = 0; b2 < nb; ++b2)
                acc -= rho * gram[static_cast<std::size_t>(a) * nb + b2] * st.x[blk[b2]];
            rhs[a] = acc;
        }

        slp::Vec xb = solve_dense(std::move(mat), std::move(rhs), nb);
        for (int a = 0; a < nb; ++a) xnew[blk[a]] = xb[a];
        for (int c : blk) in_block[static_cast<std::size_t>(c)] = 0;
    }
    return xnew;
}

}  // namespace testsup
