#include "slp/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace slp {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ScenarioError("bad numeric value for '" + key + "': " + v);
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ScenarioError("bad integer value for '" + key + "': " + v);
    }
}

long long parse_positive(const std::string& key, const std::string& v) {
    long long x = parse_int(key, v);
    if (x <= 0) throw ScenarioError("'" + key + "' must be positive, got " + v);
    return x;
}

void set_field(Scenario& sc, const std::string& key, const std::string& raw) {
    std::string value = trim(raw);
    if (key == "scenarioId") {
        if (value.empty()) throw ScenarioError("scenarioId must not be empty");
        sc.id = value;
    } else if (key == "users") {
        sc.users = static_cast<int>(parse_positive(key, value));
    } else if (key == "antennas") {
        sc.antennas = static_cast<int>(parse_positive(key, value));
    } else if (key == "modulation") {
        parse_modulation(lower(value), sc.mod_kind, sc.mod_order);
    } else if (key == "mode") {
        std::string m = lower(value);
        if (m == "pm")
            sc.mode = SlpMode::PowerMin;
        else if (m == "sb")
            sc.mode = SlpMode::SinrBalance;
        else
            throw ScenarioError("mode must be pm or sb, got '" + value + "'");
        sc.mode_explicit = true;
    } else if (key == "sweepDb") {
        std::vector<double> vals;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) throw ScenarioError("sweepDb has an empty entry");
            vals.push_back(parse_double(key, item));
        }
        if (vals.empty()) throw ScenarioError("sweepDb must list at least one value");
        sc.sweep_db = std::move(vals);
    } else if (key == "budget") {
        double b = parse_double(key, value);
        if (b <= 0.0) throw ScenarioError("budget must be positive");
        sc.budget = b;
    } else if (key == "realizations") {
        sc.realizations = static_cast<int>(parse_positive(key, value));
    } else if (key == "slots") {
        sc.slots = static_cast<int>(parse_positive(key, value));
    } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "solver") {
        std::string s = lower(value);
        if (s == "pif")
            sc.solver = SolverChoice::Pif;
        else if (s == "oracle")
            sc.solver = SolverChoice::Oracle;
        else if (s == "zf")
            sc.solver = SolverChoice::Zf;
        else
            throw ScenarioError("solver must be pif, oracle or zf, got '" + value + "'");
    } else if (key == "rho") {
        sc.rho = parse_double(key, value);
    } else if (key == "beta") {
        sc.beta = parse_double(key, value);
    } else if (key == "tau") {
        sc.tau = parse_double(key, value);
    } else if (key == "deltaTol") {
        sc.delta_tol = parse_double(key, value);
    } else if (key == "fixedIters") {
        sc.fixed_iters = static_cast<int>(parse_positive(key, value));
    } else if (key == "maxIters") {
        sc.max_iters = static_cast<int>(parse_positive(key, value));
    } else if (key == "partition") {
        std::string p = lower(value);
        if (p == "scalar")
            sc.partition = PartitionStrategy::PerScalar;
        else if (p == "antenna")
            sc.partition = PartitionStrategy::PerAntenna;
        else if (p == "contiguous")
            sc.partition = PartitionStrategy::Contiguous;
        else
            throw ScenarioError("partition must be scalar, antenna or contiguous, got '" + value + "'");
    } else if (key == "blocks") {
        sc.n_blocks = static_cast<int>(parse_positive(key, value));
    } else {
        throw ScenarioError("unknown scenario key '" + key + "'");
    }
}

}  // namespace

void parse_modulation(const std::string& name, ModKind& kind, int& order) {
    auto digits = [](const std::string& s) -> int {
        if (s.empty()) return -1;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
        return std::stoi(s);
    };
    if (name == "bpsk") {
        kind = ModKind::PSK;
        order = 2;
        return;
    }
    if (name == "qpsk") {
        kind = ModKind::PSK;
        order = 4;
        return;
    }
    int n = -1;
    if (name.rfind("psk", 0) == 0 && (n = digits(name.substr(3))) > 0) {
        kind = ModKind::PSK;
    } else if (name.rfind("qam", 0) == 0 && (n = digits(name.substr(3))) > 0) {
        kind = ModKind::SquareQAM;
    } else if (name.size() > 3 && name.compare(name.size() - 3, 3, "psk") == 0 &&
               (n = digits(name.substr(0, name.size() - 3))) > 0) {
        kind = ModKind::PSK;
    } else if (name.size() > 3 && name.compare(name.size() - 3, 3, "qam") == 0 &&
               (n = digits(name.substr(0, name.size() - 3))) > 0) {
        kind = ModKind::SquareQAM;
    } else {
        throw ScenarioError("unknown modulation '" + name + "'");
    }
    order = n;
    // Surface nonsense orders here rather than deep in the run.
    try {
        make_constellation(kind, order);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("bad modulation '") + name + "': " + e.what());
    }
}

std::string modulation_name(ModKind kind, int order) {
    if (kind == ModKind::PSK && order == 2) return "bpsk";
    if (kind == ModKind::PSK && order == 4) return "qpsk";
    std::ostringstream os;
    os << order << (kind == ModKind::PSK ? "psk" : "qam");
    return os.str();
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario sc;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(origin + ":" + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = line.substr(eq + 1);
        if (key.empty()) throw ScenarioError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw ScenarioError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        try {
            set_field(sc, key, value);
        } catch (const ScenarioError& e) {
            throw ScenarioError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return sc;
}

void apply_override(Scenario& sc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ScenarioError("override must be key=value, got '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ScenarioError("override with empty key: '" + assignment + "'");
    set_field(sc, key, assignment.substr(eq + 1));
}

namespace {

void put_num(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
}

}  // namespace

void write_results_csv(const RunResult& res, std::ostream& out) {
    out << "scenarioId,sweepValue,avgPower,BER,avgMu,avgIters,maxInfeas,wallMillis\n";
    for (const SweepPoint& p : res.points) {
        out << res.scenario_id << ',';
        put_num(out, p.sweep_value);
        out << ',';
        put_num(out, p.avg_power);
        out << ',';
        put_num(out, p.ber);
        out << ',';
        put_num(out, p.avg_mu);
        out << ',';
        put_num(out, p.avg_iters);
        out << ',';
        put_num(out, p.avg_max_infeas);
        out << ',';
        put_num(out, p.wall_millis);
        out << '\n';
    }
}

void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& out) {
    out << "iter,objective,delta,maxInfeas,kktResidual\n";
    for (const IterationRecord& r : trace) {
        out << r.iter << ',';
        put_num(out, r.objective);
        out << ',';
        put_num(out, r.delta);
        out << ',';
        put_num(out, r.max_infeas);
        out << ',';
        put_num(out, r.kkt_residual);
        out << '\n';
    }
}

}  // namespace slp
