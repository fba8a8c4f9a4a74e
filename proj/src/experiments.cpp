#include "bqmc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "bqmc/error.hpp"
#include "bqmc/simd/kernels.hpp"

#ifndef BQMC_VERSION
#define BQMC_VERSION "dev"
#endif

namespace bqmc {

const char* library_version() { return BQMC_VERSION; }

std::vector<TableRow> run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    const auto wanted = config.effective_methods();
    std::vector<Method> all = wanted;
    if (std::find(all.begin(), all.end(), Method::MC) == all.end()) all.insert(all.begin(), Method::MC);

    const Engine engine(config.problem());
    const auto results = engine.run_many(all, config.make_qmc_points(), config.make_mc_points(), threads);
    const EstimatorResult& mc = results[0].method == Method::MC
                                    ? results[0]
                                    : *std::find_if(results.begin(), results.end(),
                                                    [](const auto& r) { return r.method == Method::MC; });
    std::vector<TableRow> rows;
    for (Method m : wanted) {
        const auto& r = *std::find_if(results.begin(), results.end(), [&](const auto& x) { return x.method == m; });
        rows.push_back({config.model, config.payoff.strike, config.barrier, r, variance_ratio(mc, r), config.seed});
    }
    return rows;
}

std::vector<TableRow> run_table(const ExperimentConfig& config, int threads) {
    std::vector<TableRow> rows;
    for (const auto& cfg : config.expand()) {
        auto part = run_experiment(cfg, threads);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string sig6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string format_table_row(const TableRow& row) {
    const auto& m = row.model;
    const bool barrier = row.barrier.kind != BarrierKind::None;
    std::string ratio = std::isfinite(row.ratio) ? std::to_string(std::llround(100.0 * row.ratio)) : "inf";
    return num(m.v0) + "," + num(m.theta) + "," + num(m.sigma) + "," + num(m.rho) + "," + num(m.s0) + "," +
           num(row.strike) + "," + (barrier ? num(row.barrier.level) : "") + "," +
           (row.barrier.two_level() ? num(row.barrier.lower) : "") + "," + to_string(row.result.method) + "," +
           ratio + "," + sig6(row.result.mean) + "," + sig6(row.result.std_error()) + "," +
           std::to_string(row.result.n) + "," + std::to_string(row.result.shifts) + "," + std::to_string(row.seed);
}

void write_table(std::ostream& out, std::span<const TableRow> rows) {
    out << kTableHeader << '\n';
    for (const auto& row : rows) out << format_table_row(row) << '\n';
}

std::map<Method, std::vector<ConvergencePoint>> run_convergence(const ExperimentConfig& config,
                                                                std::span<const std::size_t> n_list,
                                                                int threads) {
    if (n_list.empty()) throw ConfigError("empty list of sample sizes");
    ExperimentConfig cfg = config;
    cfg.points = *std::max_element(n_list.begin(), n_list.end());
    cfg.validate();
    const auto qmc = cfg.make_qmc_points();
    if (cfg.points > qmc.capacity())
        throw ConfigError("N = " + std::to_string(cfg.points) + " exceeds the point set capacity " +
                          std::to_string(qmc.capacity()));
    const Engine engine(cfg.problem());
    return engine.convergence(cfg.effective_methods(), qmc, cfg.make_mc_points(), n_list, threads);
}

std::vector<std::filesystem::path> write_convergence(const std::filesystem::path& dir, const std::string& tag,
                                                     const std::map<Method, std::vector<ConvergencePoint>>& data) {
    std::vector<std::filesystem::path> written;
    for (const auto& [method, series] : data) {
        const auto path = dir / (tag + "_CONV_" + short_tag(method) + ".txt");
        const auto tmp = std::filesystem::path(path.string() + ".tmp");
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
            char buf[64];
            for (const auto& p : series) {
                std::snprintf(buf, sizeof buf, "%zu %.10e\n", p.n, p.std_of_means);
                out << buf;
            }
        }
        std::filesystem::rename(tmp, path);
        written.push_back(path);
    }
    return written;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
    auto to_size = [&](std::string_view s) {
        std::size_t x = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || ptr != s.data() + s.size() || x == 0)
            throw ConfigError("--n: bad sample size '" + std::string(s) + "'");
        if ((x & (x - 1)) != 0) throw ConfigError("--n: " + std::string(s) + " is not a power of two");
        return x;
    };
    std::vector<std::size_t> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto lo = to_size(std::string_view(text).substr(0, dots));
        const auto hi = to_size(std::string_view(text).substr(dots + 2));
        if (lo > hi) throw ConfigError("--n: empty range '" + text + "'");
        for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
    } else {
        std::size_t start = 0;
        for (;;) {
            const auto comma = text.find(',', start);
            out.push_back(to_size(std::string_view(text).substr(start, comma == std::string::npos ? text.npos : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!std::is_sorted(out.begin(), out.end())) throw ConfigError("--n: sizes must ascend");
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::filesystem::path& path, const std::string& command, const ExperimentConfig& config,
                    std::span<const std::filesystem::path> outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["tag"] = config.tag;
    j["config_hash"] = "fnv1a64:" + config_hash(config);
    j["config"] = serialize(config);
    j["seed"] = config.seed;
    j["version"] = library_version();
    j["simd"] = std::string(simd::isa_name(simd::active_isa()));
    j["compiler"] = __VERSION__;
    auto& files = j["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs) files.push_back(p.filename().string());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

}  // namespace bqmc
