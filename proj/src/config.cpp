#include "bqmc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bqmc/error.hpp"
#include "bqmc/rng.hpp"

namespace bqmc {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    throw ConfigError("field '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& value) {
    double x = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc{} || ptr != end || !std::isfinite(x)) bad_value(key, value, "expected a finite number");
    return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t x = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, "expected a non-negative integer");
    return x;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, "expected true or false");
}

// Shortest text that parses back to the same double.
std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

template <class Parse>
auto parse_enum(const std::string& key, const std::string& value, Parse parse) {
    try {
        return parse(value);
    } catch (const ConfigError& e) {
        bad_value(key, value, e.what());
    }
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
    static const std::vector<std::string> keys{
        "tag",           "model.s0",        "model.v0",         "model.r",          "model.kappa",
        "model.theta",   "model.sigma",     "model.rho",        "model.t",          "time.m",
        "payoff.kind",   "payoff.k",        "barrier.kind",     "barrier.b1",       "barrier.b2",
        "methods",       "pointset.kind",   "pointset.n",       "pointset.shifts",  "pointset.direction_file",
        "pointset.lattice_file", "rootfind", "seed",            "output.dir"};
    return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "tag") {
        if (value.empty() || value.find_first_of(" \t/\\") != std::string::npos)
            bad_value(key, value, "expected a non-empty name without spaces or slashes");
        tag = value;
    } else if (key == "model.s0") model.s0 = to_double(key, value);
    else if (key == "model.v0") model.v0 = to_double(key, value);
    else if (key == "model.r") model.r = to_double(key, value);
    else if (key == "model.kappa") model.kappa = to_double(key, value);
    else if (key == "model.theta") model.theta = to_double(key, value);
    else if (key == "model.sigma") model.sigma = to_double(key, value);
    else if (key == "model.rho") model.rho = to_double(key, value);
    else if (key == "model.t") model.maturity = to_double(key, value);
    else if (key == "time.m") steps = to_unsigned(key, value);
    else if (key == "payoff.kind") payoff.kind = parse_enum(key, value, parse_payoff_kind);
    else if (key == "payoff.k") payoff.strike = to_double(key, value);
    else if (key == "barrier.kind") barrier.kind = parse_enum(key, value, parse_barrier_kind);
    else if (key == "barrier.b1") barrier.level = to_double(key, value);
    else if (key == "barrier.b2") barrier.lower = to_double(key, value);
    else if (key == "methods") {
        methods.clear();
        for (const auto& item : split(value, ','))
            if (!item.empty()) methods.push_back(parse_enum(key, item, parse_method));
        if (methods.empty()) bad_value(key, value, "expected at least one method");
    } else if (key == "pointset.kind") point_kind = parse_enum(key, value, parse_point_kind);
    else if (key == "pointset.n") points = to_unsigned(key, value);
    else if (key == "pointset.shifts") shifts = to_unsigned(key, value);
    else if (key == "pointset.direction_file") direction_file = value;
    else if (key == "pointset.lattice_file") lattice_file = value;
    else if (key == "rootfind") rootfind = to_bool(key, value);
    else if (key == "seed") seed = to_unsigned(key, value);
    else if (key == "output.dir") output_dir = value;
    else throw ConfigError("unknown field '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
    if (key == "tag") return tag;
    if (key == "model.s0") return format_double(model.s0);
    if (key == "model.v0") return format_double(model.v0);
    if (key == "model.r") return format_double(model.r);
    if (key == "model.kappa") return format_double(model.kappa);
    if (key == "model.theta") return format_double(model.theta);
    if (key == "model.sigma") return format_double(model.sigma);
    if (key == "model.rho") return format_double(model.rho);
    if (key == "model.t") return format_double(model.maturity);
    if (key == "time.m") return std::to_string(steps);
    if (key == "payoff.kind") return to_string(payoff.kind);
    if (key == "payoff.k") return format_double(payoff.strike);
    if (key == "barrier.kind") return to_string(barrier.kind);
    if (key == "barrier.b1") return format_double(barrier.level);
    if (key == "barrier.b2") return format_double(barrier.lower);
    if (key == "methods") {
        std::string s;
        for (Method m : methods) s += (s.empty() ? "" : ", ") + to_string(m);
        return s;
    }
    if (key == "pointset.kind") return to_string(point_kind);
    if (key == "pointset.n") return std::to_string(points);
    if (key == "pointset.shifts") return std::to_string(shifts);
    if (key == "pointset.direction_file") return direction_file;
    if (key == "pointset.lattice_file") return lattice_file;
    if (key == "rootfind") return rootfind ? "true" : "false";
    if (key == "seed") return std::to_string(seed);
    if (key == "output.dir") return output_dir.string();
    throw ConfigError("unknown field '" + key + "'");
}

PricingProblem ExperimentConfig::problem() const { return {model, time_grid(), payoff, barrier}; }

std::vector<Method> ExperimentConfig::effective_methods() const {
    std::vector<Method> out;
    for (Method m : methods)
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    const bool has_cs = std::find(out.begin(), out.end(), Method::QMC_LT_CS) != out.end();
    const bool has_rf = std::find(out.begin(), out.end(), Method::QMC_LT_CS_RF) != out.end();
    if (rootfind && has_cs && !has_rf) out.push_back(Method::QMC_LT_CS_RF);
    return out;
}

PointSetSpec ExperimentConfig::qmc_points() const {
    return {point_kind, 2 * steps, points, shifts, derive_key(seed, 1), true};
}

PointSetSpec ExperimentConfig::mc_points() const {
    return {PointKind::PseudoRandom, 2 * steps, points, shifts, derive_key(seed, 2), true};
}

PointSet ExperimentConfig::make_qmc_points() const {
    const auto spec = qmc_points();
    std::shared_ptr<const SobolTable> sobol;
    std::shared_ptr<const LatticeVector> lattice;
    if (spec.kind == PointKind::Sobol)
        sobol = std::make_shared<SobolTable>(SobolTable::load(
            direction_file.empty() ? default_direction_file() : std::filesystem::path(direction_file), spec.dimension));
    if (spec.kind == PointKind::Lattice)
        lattice = std::make_shared<LatticeVector>(LatticeVector::load(
            lattice_file.empty() ? default_lattice_file() : std::filesystem::path(lattice_file), spec.dimension));
    return PointSet(spec, std::move(sobol), std::move(lattice));
}

PointSet ExperimentConfig::make_mc_points() const { return PointSet(mc_points(), nullptr, nullptr); }

void ExperimentConfig::validate() const {
    if (steps < 1) throw ConfigError("field 'time.m': at least one time step is required");
    if (methods.empty()) throw ConfigError("field 'methods': no method selected");
    if (points < 1) throw ConfigError("field 'pointset.n': must be positive");
    if (shifts < 2) throw ConfigError("field 'pointset.shifts': at least two shifts are needed for a standard deviation");
    if (point_kind == PointKind::Lattice && (points & (points - 1)) != 0)
        throw ConfigError("field 'pointset.n': lattice point counts must be powers of two");
    try {
        model.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    try {
        payoff.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("payoff: ") + e.what());
    }
    try {
        barrier.validate(model.s0);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("barrier: ") + e.what());
    }
    qmc_points().validate();
}

std::vector<ExperimentConfig> ExperimentConfig::expand() const {
    ExperimentConfig base = *this;
    base.has_grid = false;
    base.grid.clear();
    std::vector<ExperimentConfig> out{base};
    if (!has_grid) return out;
    if (grid.empty()) return {};
    for (const auto& axis : grid) {
        std::vector<ExperimentConfig> next;
        for (const auto& cfg : out) {
            for (const auto& tuple : axis.tuples) {
                ExperimentConfig c = cfg;
                for (std::size_t i = 0; i < axis.keys.size(); ++i) c.set(axis.keys[i], tuple[i]);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in{std::string(text)};
    bool in_grid = false;
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto where = origin + ":" + std::to_string(lineno) + ": ";
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line != "[grid]") throw ConfigError("unknown section '" + line + "'");
                if (in_grid) throw ConfigError("duplicate [grid] section");
                in_grid = cfg.has_grid = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
            const auto lhs = trim(std::string_view(line).substr(0, eq));
            const auto rhs = trim(std::string_view(line).substr(eq + 1));
            if (!in_grid) {
                cfg.set(lhs, rhs);
                continue;
            }
            GridAxis axis;
            axis.keys = split(lhs, ',');
            for (const auto& k : axis.keys) {
                if (k == "methods" || k == "tag")
                    throw ConfigError("field '" + k + "' cannot vary in a grid");
                (void)cfg.get(k);  // rejects unknown keys
            }
            for (const auto& tuple_text : split(rhs, '|')) {
                auto tuple = split_ws(tuple_text);
                if (tuple.size() != axis.keys.size())
                    throw ConfigError("grid tuple '" + tuple_text + "' has " + std::to_string(tuple.size()) +
                                      " values for " + std::to_string(axis.keys.size()) + " keys");
                ExperimentConfig probe = cfg;
                for (std::size_t i = 0; i < tuple.size(); ++i) probe.set(axis.keys[i], tuple[i]);
                axis.tuples.push_back(std::move(tuple));
            }
            cfg.grid.push_back(std::move(axis));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string serialize(const ExperimentConfig& config) {
    std::string out;
    for (const auto& key : ExperimentConfig::known_keys()) {
        const auto value = config.get(key);
        if (value.empty()) continue;  // optional file overrides
        out += key + " = " + value + "\n";
    }
    if (config.has_grid) {
        out += "[grid]\n";
        for (const auto& axis : config.grid) {
            std::string keys, tuples;
            for (const auto& k : axis.keys) keys += (keys.empty() ? "" : ", ") + k;
            for (const auto& t : axis.tuples) {
                std::string item;
                for (const auto& v : t) item += (item.empty() ? "" : " ") + v;
                tuples += (tuples.empty() ? "" : " | ") + item;
            }
            out += keys + " = " + tuples + "\n";
        }
    }
    return out;
}

}  // namespace bqmc
