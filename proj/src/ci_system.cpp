#include "slp/ci_system.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace slp {

Mat complex_to_real_channel(const ComplexChannel& ch, int user) {
    if (user < 0 || user >= ch.users) throw std::invalid_argument("complex_to_real_channel: user out of range");
    Mat h(2, 2 * ch.antennas);
    for (int n = 0; n < ch.antennas; ++n) {
        cplx v = ch.at(user, n);
        h(0, n) = v.real();
        h(0, n + ch.antennas) = -v.imag();
        h(1, n) = v.imag();
        h(1, n + ch.antennas) = v.real();
    }
    return h;
}

Mat symbol_rotation(cplx s) {
    if (s == cplx(0.0, 0.0)) throw std::invalid_argument("symbol_rotation: zero symbol");
    cplx inv = 1.0 / s;
    Mat r(2, 2);
    r(0, 0) = inv.real();
    r(0, 1) = -inv.imag();
    r(1, 0) = inv.imag();
    r(1, 1) = inv.real();
    return r;
}

Mat psk_cone_matrix(int order) {
    if (order < 4) throw std::invalid_argument("psk_cone_matrix: order must be >= 4");
    double cot = 1.0 / std::tan(std::numbers::pi / order);
    Mat t(2, 2);
    t(0, 0) = 1.0;
    t(0, 1) = -cot;
    t(1, 0) = 1.0;
    t(1, 1) = cot;
    return t;
}

namespace {

Vec broadcast(const Vec& v, int users, const char* what) {
    if (static_cast<int>(v.size()) == users) return v;
    if (v.size() == 1) return Vec(users, v[0]);
    throw std::invalid_argument(std::string("build_ci_system: ") + what + " must have 1 or K entries");
}

// rows = m2x2 * h (2 x 2Nt), written into A starting at row r0.
void emplace_rows(Mat& a, int r0, const Mat& m2x2, const Mat& h) {
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < h.cols(); ++c) a(r0 + i, c) = m2x2(i, 0) * h(0, c) + m2x2(i, 1) * h(1, c);
}

}  // namespace

CISystem build_ci_system(const ComplexChannel& ch, const std::vector<int>& symbol_indices,
                         const ConstellationSpec& spec, const Vec& gamma, const Vec& sigma) {
    int users = ch.users;
    if (users <= 0 || ch.antennas <= 0) throw std::invalid_argument("build_ci_system: empty channel");
    if (static_cast<int>(symbol_indices.size()) != users)
        throw std::invalid_argument("build_ci_system: need one symbol per user");
    Vec g = broadcast(gamma, users, "gamma");
    Vec sg = broadcast(sigma, users, "sigma");
    for (int k = 0; k < users; ++k) {
        if (g[k] <= 0.0 || sg[k] <= 0.0) throw std::invalid_argument("build_ci_system: gamma and sigma must be positive");
        if (symbol_indices[k] < 0 || symbol_indices[k] >= spec.order)
            throw std::invalid_argument("build_ci_system: symbol index out of range");
    }

    CISystem sys;
    sys.users = users;
    sys.antennas = ch.antennas;
    sys.gamma = g;
    sys.sigma = sg;
    sys.kind = spec.kind;
    sys.order = spec.order;
    sys.rows_per_user = (spec.kind == ModKind::PSK && spec.order == 2) ? 1 : 2;

    int rows = sys.rows_per_user * users;
    sys.A = Mat(rows, 2 * ch.antennas);
    sys.b.assign(rows, 0.0);
    sys.eq_mask.assign(rows, 0);

    for (int k = 0; k < users; ++k) {
        cplx s = spec.points[symbol_indices[k]];
        Mat h = complex_to_real_channel(ch, k);
        double thr = std::sqrt(g[k]) * sg[k];
        int r0 = sys.rows_per_user * k;
        if (spec.kind == ModKind::PSK) {
            Mat rot = symbol_rotation(s);
            if (spec.order == 2) {
                // Only the in-phase margin survives; the full row pair would
                // duplicate it with an unconstrained quadrature direction.
                for (int c = 0; c < h.cols(); ++c) sys.A(r0, c) = rot(0, 0) * h(0, c) + rot(0, 1) * h(1, c);
            } else {
                Mat rows2(2, 2);
                Mat cone = psk_cone_matrix(spec.order);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) rows2(i, j) = cone(i, 0) * rot(0, j) + cone(i, 1) * rot(1, j);
                emplace_rows(sys.A, r0, rows2, h);
            }
        } else {
            if (std::fabs(s.real()) < 1e-12 || std::fabs(s.imag()) < 1e-12)
                throw std::invalid_argument("build_ci_system: QAM symbol with a zero coordinate");
            Mat d(2, 2);
            d(0, 0) = 1.0 / s.real();
            d(1, 1) = 1.0 / s.imag();
            emplace_rows(sys.A, r0, d, h);
            CiDof dof = ci_dof(spec, s);
            sys.eq_mask[r0] = dof.re == CoordDof::Fixed;
            sys.eq_mask[r0 + 1] = dof.im == CoordDof::Fixed;
        }
        for (int i = 0; i < sys.rows_per_user; ++i) sys.b[r0 + i] = thr;
    }
    return sys;
}

BlockPartition make_partition(const CISystem& sys, PartitionStrategy strategy, int n_blocks) {
    BlockPartition p;
    int cols = sys.cols();
    p.total_cols = cols;
    switch (strategy) {
        case PartitionStrategy::PerScalar:
            for (int c = 0; c < cols; ++c) p.blocks.push_back({c});
            break;
        case PartitionStrategy::PerAntenna:
            for (int n = 0; n < sys.antennas; ++n) p.blocks.push_back({n, n + sys.antennas});
            break;
        case PartitionStrategy::Contiguous: {
            if (n_blocks <= 0 || n_blocks > cols)
                throw std::invalid_argument("make_partition: block count must be in [1, cols]");
            int base = cols / n_blocks, extra = cols % n_blocks;
            int c = 0;
            for (int i = 0; i < n_blocks; ++i) {
                int len = base + (i < extra ? 1 : 0);
                std::vector<int> blk(len);
                for (int j = 0; j < len; ++j) blk[j] = c++;
                p.blocks.push_back(std::move(blk));
            }
            break;
        }
    }
    return p;
}

Vec evaluate_constraints(const CISystem& sys, const Vec& x) {
    Vec r = matvec(sys.A, x);
    for (int i = 0; i < sys.rows(); ++i) r[i] -= sys.b[i];
    return r;
}

double max_infeasibility(const CISystem& sys, const Vec& x) {
    Vec r = evaluate_constraints(sys, x);
    double worst = 0.0;
    for (int i = 0; i < sys.rows(); ++i) {
        double v = sys.eq_mask[i] ? std::fabs(r[i]) : std::max(-r[i], 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

const char* mod_name(ModKind kind, int order, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%s%d", kind == ModKind::PSK ? "psk" : "qam", order);
    return buf;
}

}  // namespace

void dump_system(const CISystem& sys, std::ostream& out) {
    char buf[64];
    out << "# ci-system v1\n";
    out << "K " << sys.users << "\n";
    out << "Nt " << sys.antennas << "\n";
    out << "modulation " << mod_name(sys.kind, sys.order, buf, sizeof buf) << "\n";
    out << "rows_per_user " << sys.rows_per_user << "\n";
    auto put_vec = [&](const char* name, const Vec& v) {
        out << name;
        for (double x : v) {
            std::snprintf(buf, sizeof buf, " %.17g", x);
            out << buf;
        }
        out << "\n";
    };
    put_vec("gamma", sys.gamma);
    put_vec("sigma", sys.sigma);
    out << "A\n";
    for (int r = 0; r < sys.rows(); ++r) {
        for (int c = 0; c < sys.cols(); ++c) {
            std::snprintf(buf, sizeof buf, c ? " %.17g" : "%.17g", sys.A(r, c));
            out << buf;
        }
        out << "\n";
    }
    put_vec("b", sys.b);
    out << "eqmask";
    for (auto m : sys.eq_mask) out << ' ' << (m ? 1 : 0);
    out << "\n";
}

namespace {

// Pulls the next token, skipping whitespace and '#' comments to end of line.
bool next_token(std::istream& in, std::string& tok) {
    char c;
    tok.clear();
    while (in.get(c)) {
        if (c == '#') {
            while (in.get(c) && c != '\n') {
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return true;
            continue;
        }
        tok += c;
    }
    return !tok.empty();
}

double parse_num(const std::string& tok) {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("load_system: bad number '" + tok + "'");
    return v;
}

}  // namespace

CISystem load_system(std::istream& in) {
    CISystem sys;
    std::string tok;
    auto expect = [&](const char* what) {
        if (!next_token(in, tok)) throw std::invalid_argument(std::string("load_system: truncated input, expected ") + what);
    };
    auto expect_key = [&](const char* key) {
        expect(key);
        if (tok != key) throw std::invalid_argument("load_system: expected '" + std::string(key) + "', got '" + tok + "'");
    };
    expect_key("K");
    expect("user count");
    sys.users = static_cast<int>(parse_num(tok));
    expect_key("Nt");
    expect("antenna count");
    sys.antennas = static_cast<int>(parse_num(tok));
    if (sys.users <= 0 || sys.antennas <= 0) throw std::invalid_argument("load_system: K and Nt must be positive");
    expect_key("modulation");
    expect("modulation name");
    if (tok.rfind("psk", 0) == 0) {
        sys.kind = ModKind::PSK;
        sys.order = static_cast<int>(parse_num(tok.substr(3)));
    } else if (tok.rfind("qam", 0) == 0) {
        sys.kind = ModKind::SquareQAM;
        sys.order = static_cast<int>(parse_num(tok.substr(3)));
    } else {
        throw std::invalid_argument("load_system: unknown modulation '" + tok + "'");
    }
    expect_key("rows_per_user");
    expect("rows per user");
    sys.rows_per_user = static_cast<int>(parse_num(tok));
    if (sys.rows_per_user != 1 && sys.rows_per_user != 2) throw std::invalid_argument("load_system: rows_per_user must be 1 or 2");
    sys.gamma.resize(sys.users);
    sys.sigma.resize(sys.users);
    expect_key("gamma");
    for (double& v : sys.gamma) {
        expect("gamma value");
        v = parse_num(tok);
    }
    expect_key("sigma");
    for (double& v : sys.sigma) {
        expect("sigma value");
        v = parse_num(tok);
    }
    int rows = sys.rows_per_user * sys.users;
    expect_key("A");
    sys.A = Mat(rows, 2 * sys.antennas);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < 2 * sys.antennas; ++c) {
            expect("matrix entry");
            sys.A(r, c) = parse_num(tok);
        }
    expect_key("b");
    sys.b.resize(rows);
    for (double& v : sys.b) {
        expect("b value");
        v = parse_num(tok);
    }
    expect_key("eqmask");
    sys.eq_mask.resize(rows);
    for (auto& m : sys.eq_mask) {
        expect("eqmask value");
        int v = static_cast<int>(parse_num(tok));
        if (v != 0 && v != 1) throw std::invalid_argument("load_system: eqmask entries must be 0 or 1");
        m = static_cast<std::uint8_t>(v);
    }
    if (next_token(in, tok)) throw std::invalid_argument("load_system: trailing content '" + tok + "'");
    return sys;
}

}  // namespace slp
