#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "slp/rng.hpp"

namespace slp {

enum class ModKind { PSK, SquareQAM };

// Whether a constellation coordinate (real or imaginary part) may be pushed
// outward by interference without leaving its decision region, or has to be
// met exactly because neighbours exist on both sides.
enum class CoordDof { Flexible, Fixed };

struct ConstellationSpec {
    ModKind kind;
    int order;  // M
    std::vector<std::complex<double>> points;  // unit average energy
    std::vector<std::uint32_t> bit_labels;     // Gray label per point; empty if M is not a power of two
    int bits_per_symbol;                       // log2(M), or 0 when no bit labels exist
    double max_amp;                            // largest |Re| (= largest |Im|) over all points
};

// PSK points sit at angles pi/M + 2*pi*m/M (so QPSK is {(+-1 +- j)/sqrt(2)}).
// Square QAM uses the odd integer grid scaled to unit average energy, indexed
// iRe * sqrt(M) + iIm. Gray labels: reflected per axis for QAM (real-axis bits
// first), reflected along the circle for PSK. Throws std::invalid_argument
// for orders below 2, non-square QAM, or QAM below 4.
ConstellationSpec make_constellation(ModKind kind, int order);

// Per-coordinate degrees of freedom of a constellation point: a coordinate at
// the outer edge of the grid is Flexible (constructive interference may grow
// it), an interior coordinate is Fixed. All PSK coordinates are Flexible by
// convention (the cone handles the geometry). The symbol must be one of
// spec.points (within 1e-12).
struct CiDof {
    CoordDof re;
    CoordDof im;
};
CiDof ci_dof(const ConstellationSpec& spec, std::complex<double> symbol);

// Nearest constellation point in Euclidean distance; ties break to the lowest
// index. Total on finite inputs.
int detect(const ConstellationSpec& spec, std::complex<double> received);

int hamming_distance(std::uint32_t a, std::uint32_t b);

// One slot's worth of symbols for K users over n_slots channel uses,
// drawn uniformly (slot-major, user-minor) from the given stream.
struct SymbolFrame {
    int users = 0;
    int slots = 0;
    std::vector<int> indices;  // users * slots entries, index(k, s) = s * users + k

    int index(int user, int slot) const { return indices[static_cast<std::size_t>(slot) * users + user]; }
};

SymbolFrame draw_frame(const ConstellationSpec& spec, int users, int slots, RandomStream& stream);

// index,re,im,bits rows, one per point, for plotting scripts.
void dump_csv(const ConstellationSpec& spec, std::ostream& out);

}  // namespace slp
