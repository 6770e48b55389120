#include "slp/constellation.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace slp {

namespace {

std::uint32_t gray(std::uint32_t n) { return n ^ (n >> 1); }

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_int(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

}  // namespace

ConstellationSpec make_constellation(ModKind kind, int order) {
    ConstellationSpec spec;
    spec.kind = kind;
    spec.order = order;
    if (kind == ModKind::PSK) {
        if (order < 2) throw std::invalid_argument("make_constellation: PSK order must be >= 2");
        spec.points.reserve(order);
        for (int m = 0; m < order; ++m) {
            double ang = std::numbers::pi / order + 2.0 * std::numbers::pi * m / order;
            spec.points.emplace_back(std::cos(ang), std::sin(ang));
        }
        if (is_pow2(order)) {
            spec.bits_per_symbol = log2_int(order);
            spec.bit_labels.reserve(order);
            for (int m = 0; m < order; ++m) spec.bit_labels.push_back(gray(static_cast<std::uint32_t>(m)));
        } else {
            spec.bits_per_symbol = 0;
        }
    } else {
        int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
        if (order < 4 || side * side != order)
            throw std::invalid_argument("make_constellation: QAM order must be a perfect square >= 4");
        // Odd integer grid {-(side-1), ..., -1, 1, ..., side-1} on both axes,
        // normalized to unit average energy.
        double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
        spec.points.reserve(order);
        for (int i_re = 0; i_re < side; ++i_re)
            for (int i_im = 0; i_im < side; ++i_im)
                spec.points.emplace_back((2 * i_re - side + 1) * scale, (2 * i_im - side + 1) * scale);
        if (is_pow2(order)) {
            spec.bits_per_symbol = log2_int(order);
            int half = spec.bits_per_symbol / 2;
            spec.bit_labels.reserve(order);
            for (int i_re = 0; i_re < side; ++i_re)
                for (int i_im = 0; i_im < side; ++i_im)
                    spec.bit_labels.push_back((gray(static_cast<std::uint32_t>(i_re)) << half) |
                                              gray(static_cast<std::uint32_t>(i_im)));
        } else {
            spec.bits_per_symbol = 0;
        }
    }
    double amp = 0.0;
    for (auto p : spec.points) amp = std::max(amp, std::max(std::fabs(p.real()), std::fabs(p.imag())));
    spec.max_amp = amp;
    return spec;
}

CiDof ci_dof(const ConstellationSpec& spec, std::complex<double> symbol) {
    bool found = false;
    for (auto p : spec.points) {
        if (std::fabs(p.real() - symbol.real()) <= 1e-12 && std::fabs(p.imag() - symbol.imag()) <= 1e-12) {
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("ci_dof: symbol is not a constellation point");
    if (spec.kind == ModKind::PSK) return {CoordDof::Flexible, CoordDof::Flexible};
    CiDof dof;
    dof.re = std::fabs(std::fabs(symbol.real()) - spec.max_amp) <= 1e-12 ? CoordDof::Flexible : CoordDof::Fixed;
    dof.im = std::fabs(std::fabs(symbol.imag()) - spec.max_amp) <= 1e-12 ? CoordDof::Flexible : CoordDof::Fixed;
    return dof;
}

int detect(const ConstellationSpec& spec, std::complex<double> received) {
    int best = 0;
    double best_d = std::norm(received - spec.points[0]);
    for (int i = 1; i < spec.order; ++i) {
        double d = std::norm(received - spec.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

int hamming_distance(std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a ^ b); }

SymbolFrame draw_frame(const ConstellationSpec& spec, int users, int slots, RandomStream& stream) {
    if (users <= 0 || slots <= 0) throw std::invalid_argument("draw_frame: users and slots must be positive");
    SymbolFrame frame;
    frame.users = users;
    frame.slots = slots;
    frame.indices.resize(static_cast<std::size_t>(users) * slots);
    for (int s = 0; s < slots; ++s)
        for (int k = 0; k < users; ++k) frame.indices[static_cast<std::size_t>(s) * users + k] = stream.next_below(spec.order);
    return frame;
}

void dump_csv(const ConstellationSpec& spec, std::ostream& out) {
    out << "index,re,im,bits\n";
    char buf[128];
    for (int i = 0; i < spec.order; ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,", i, spec.points[i].real(), spec.points[i].imag());
        out << buf;
        if (spec.bits_per_symbol > 0) {
            for (int b = spec.bits_per_symbol - 1; b >= 0; --b) out << ((spec.bit_labels[i] >> b) & 1u ? '1' : '0');
        }
        out << '\n';
    }
}

}  // namespace slp
