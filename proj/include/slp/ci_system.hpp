#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "slp/constellation.hpp"
#include "slp/linalg.hpp"

namespace slp {

// Flat-fading downlink channel: one length-antennas row per user.
struct ComplexChannel {
    int users = 0;
    int antennas = 0;
    std::vector<cplx> rows;  // row-major, users * antennas

    cplx at(int user, int antenna) const { return rows[static_cast<std::size_t>(user) * antennas + antenna]; }
};

// Real-valued constraint system A x >= b (elementwise), with eq_mask marking
// rows that must hold with equality. x stacks the transmit vector as
// [Re x~; Im x~], so x has 2 * antennas entries. Each user contributes
// rows_per_user consecutive rows (2 in general, 1 for BPSK where the symbol
// has no real-part degree of freedom left after derotation).
struct CISystem {
    Mat A;
    Vec b;
    std::vector<std::uint8_t> eq_mask;
    Vec gamma;  // per-user SINR thresholds (linear)
    Vec sigma;  // per-user noise standard deviations
    int users = 0;
    int antennas = 0;
    int rows_per_user = 2;
    ModKind kind = ModKind::PSK;
    int order = 4;

    int rows() const { return A.rows(); }
    int cols() const { return A.cols(); }
    int row_user(int row) const { return row / rows_per_user; }
};

// [[Re h~^T, -Im h~^T], [Im h~^T, Re h~^T]]: the 2 x 2Nt real map such that
// H_k x equals [Re(h~^T x~); Im(h~^T x~)].
Mat complex_to_real_channel(const ComplexChannel& ch, int user);

// Real 2x2 image of multiplication by 1/s~ (conformal). Throws on s~ = 0.
Mat symbol_rotation(cplx s);

// [[1, -cot(pi/M)], [1, cot(pi/M)]]: maps the derotated received point to the
// two half-plane margins of the PSK decision cone. M >= 4.
Mat psk_cone_matrix(int order);

// Builds the constructive-interference constraint system for one slot.
//
// PSK: rows(user k) = psk_cone_matrix * symbol_rotation(s~_k) * H_k, both
// inequalities, b = sqrt(gamma_k) * sigma_k. BPSK keeps only the real-part
// row. Square QAM: the derotation is per coordinate, dividing the real row by
// Re s~_k and the imaginary row by Im s~_k (signed, so the margin always
// points outward); a coordinate with interior neighbours becomes an equality
// row. On outer-vertex symbols this reduces exactly to the QPSK cone rows.
//
// gamma and sigma may be length users or length 1 (broadcast). Symbol indices
// are into spec.points.
CISystem build_ci_system(const ComplexChannel& ch, const std::vector<int>& symbol_indices,
                         const ConstellationSpec& spec, const Vec& gamma, const Vec& sigma);

enum class PartitionStrategy { PerScalar, PerAntenna, Contiguous };

// Disjoint column blocks covering 0..cols-1 in order. PerScalar: one column
// per block. PerAntenna: pairs (n, n + antennas) so each block holds the real
// and imaginary coordinates of one antenna. Contiguous: n_blocks nearly-equal
// runs of columns.
struct BlockPartition {
    std::vector<std::vector<int>> blocks;
    int total_cols = 0;
};

BlockPartition make_partition(const CISystem& sys, PartitionStrategy strategy, int n_blocks = 1);

// r = A x - b.
Vec evaluate_constraints(const CISystem& sys, const Vec& x);

// Largest constraint violation: max over rows of (b - Ax)+ for inequalities
// and |Ax - b| for equalities.
double max_infeasibility(const CISystem& sys, const Vec& x);

// Plain-text fixture round trip (full double precision).
void dump_system(const CISystem& sys, std::ostream& out);
CISystem load_system(std::istream& in);

}  // namespace slp
