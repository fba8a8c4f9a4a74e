#include "bqmc/qrng.hpp"

#include <bit>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bqmc/error.hpp"
#include "bqmc/rng.hpp"

#ifndef BQMC_DATA_DIR
#define BQMC_DATA_DIR "data"
#endif

namespace bqmc {

namespace {

constexpr std::uint64_t kTagDigitalShift = 0x5d1;
constexpr std::uint64_t kTagLatticeShift = 0x1a7;
constexpr std::uint64_t kTagPseudo = 0x3c0;

bool is_data_line(const std::string& line) {
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    }
    return false;
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("BQMC_DATA_DIR")) return env;
    return BQMC_DATA_DIR;
}

}  // namespace

std::string to_string(PointKind kind) {
    switch (kind) {
        case PointKind::Sobol: return "sobol";
        case PointKind::Lattice: return "lattice";
        case PointKind::PseudoRandom: return "random";
    }
    return "?";
}

PointKind parse_point_kind(const std::string& text) {
    if (text == "sobol") return PointKind::Sobol;
    if (text == "lattice") return PointKind::Lattice;
    if (text == "random" || text == "pseudorandom") return PointKind::PseudoRandom;
    throw ConfigError("unknown point set kind '" + text + "'");
}

void PointSetSpec::validate() const {
    if (dimension < 1) throw ConfigError("point set dimension must be >= 1");
    if (count < 1) throw ConfigError("point set count must be >= 1");
    if (shifts < 1) throw ConfigError("point set shifts must be >= 1");
}

SobolTable SobolTable::parse(std::istream& in, std::size_t max_dimension) {
    SobolTable table;
    auto& dirs = table.directions_;
    dirs.reserve(kBits * (max_dimension ? max_dimension : 1024));
    for (int k = 0; k < kBits; ++k) dirs.push_back(std::uint32_t{1} << (kBits - 1 - k));

    std::string line;
    std::size_t lineno = 0;
    while ((max_dimension == 0 || table.dimensions() < max_dimension) && std::getline(in, line)) {
        ++lineno;
        if (!is_data_line(line)) continue;
        std::istringstream row(line);
        unsigned long d = 0, s = 0, a = 0;
        if (!(row >> d >> s >> a) || s < 1 || s > static_cast<unsigned long>(kBits))
            throw ConfigError("direction numbers, line " + std::to_string(lineno) + ": malformed header fields");
        std::uint32_t v[kBits];
        for (unsigned long k = 0; k < s; ++k) {
            unsigned long mk = 0;
            if (!(row >> mk) || mk % 2 == 0 || mk >= (1UL << (k + 1)))
                throw ConfigError("direction numbers, line " + std::to_string(lineno) + ": invalid m_" +
                                  std::to_string(k + 1));
            v[k] = static_cast<std::uint32_t>(mk) << (kBits - 1 - k);
        }
        for (unsigned long k = s; k < static_cast<unsigned long>(kBits); ++k) {
            std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
            for (unsigned long i = 1; i < s; ++i)
                if ((a >> (s - 1 - i)) & 1UL) x ^= v[k - i];
            v[k] = x;
        }
        dirs.insert(dirs.end(), v, v + kBits);
    }
    return table;
}

SobolTable SobolTable::load(const std::filesystem::path& path, std::size_t max_dimension) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open direction-number file '" + path.string() + "'");
    return parse(in, max_dimension);
}

LatticeVector::LatticeVector(std::vector<std::uint64_t> generator, int log2_max_points)
    : generator_(std::move(generator)), log2_max_points_(log2_max_points) {
    if (log2_max_points_ < 0 || log2_max_points_ > 40) throw ConfigError("lattice size out of range");
}

LatticeVector LatticeVector::parse(std::istream& in, std::size_t max_dimension) {
    std::vector<std::uint64_t> g;
    std::string line;
    while ((max_dimension == 0 || g.size() < max_dimension) && std::getline(in, line)) {
        if (!is_data_line(line)) continue;
        g.push_back(std::stoull(line));
    }
    return LatticeVector(std::move(g));
}

LatticeVector LatticeVector::load(const std::filesystem::path& path, std::size_t max_dimension) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lattice file '" + path.string() + "'");
    return parse(in, max_dimension);
}

std::filesystem::path default_direction_file() { return data_dir() / "new-joe-kuo-1024.txt"; }
std::filesystem::path default_lattice_file() { return data_dir() / "lattice-kuo-1024.txt"; }

PointSet::PointSet(PointSetSpec spec, std::shared_ptr<const SobolTable> sobol,
                   std::shared_ptr<const LatticeVector> lattice)
    : spec_(spec), sobol_(std::move(sobol)), lattice_(std::move(lattice)) {
    spec_.validate();
    switch (spec_.kind) {
        case PointKind::Sobol:
            if (!sobol_) throw ConfigError("Sobol point set requires direction numbers");
            if (spec_.dimension > sobol_->dimensions())
                throw ConfigError("dimension " + std::to_string(spec_.dimension) + " exceeds the " +
                                  std::to_string(sobol_->dimensions()) + " available Sobol dimensions");
            break;
        case PointKind::Lattice:
            if (!lattice_) throw ConfigError("lattice point set requires a generating vector");
            if (spec_.dimension > lattice_->dimensions())
                throw ConfigError("dimension " + std::to_string(spec_.dimension) +
                                  " exceeds the lattice generating vector length");
            if (!std::has_single_bit(spec_.count))
                throw ConfigError("lattice point count must be a power of two");
            break;
        case PointKind::PseudoRandom:
            break;
    }
    if (spec_.count > capacity())
        throw ConfigError("point count " + std::to_string(spec_.count) + " exceeds point set capacity " +
                          std::to_string(capacity()));
}

PointSet PointSet::with_default_tables(PointSetSpec spec) {
    std::shared_ptr<const SobolTable> sobol;
    std::shared_ptr<const LatticeVector> lattice;
    if (spec.kind == PointKind::Sobol)
        sobol = std::make_shared<SobolTable>(SobolTable::load(default_direction_file(), spec.dimension));
    if (spec.kind == PointKind::Lattice)
        lattice = std::make_shared<LatticeVector>(LatticeVector::load(default_lattice_file(), spec.dimension));
    return PointSet(spec, std::move(sobol), std::move(lattice));
}

std::uint64_t PointSet::capacity() const {
    switch (spec_.kind) {
        case PointKind::Sobol: return std::uint64_t{1} << SobolTable::kBits;
        case PointKind::Lattice: return lattice_->max_points();
        case PointKind::PseudoRandom: return std::uint64_t{1} << 62;
    }
    return 0;
}

std::vector<std::uint32_t> PointSet::digital_shift(std::size_t shift_index) const {
    std::vector<std::uint32_t> s(spec_.dimension, 0);
    if (!spec_.randomize) return s;
    const auto key = derive_key(derive_key(spec_.seed, kTagDigitalShift), shift_index);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = static_cast<std::uint32_t>(counter_u64(key, j) >> 32);
    return s;
}

std::vector<double> PointSet::lattice_shift(std::size_t shift_index) const {
    std::vector<double> s(spec_.dimension, 0.0);
    if (!spec_.randomize) return s;
    const auto key = derive_key(derive_key(spec_.seed, kTagLatticeShift), shift_index);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = static_cast<double>(counter_u64(key, j) >> 11) * 0x1.0p-53;
    return s;
}

std::uint32_t PointSet::sobol_integer(std::size_t dim, std::uint64_t gray) const {
    std::uint32_t x = 0;
    for (int bit = 0; gray != 0; ++bit, gray >>= 1)
        if (gray & 1U) x ^= sobol_->direction(dim, bit);
    return x;
}

UniformPoint PointSet::generate_point(std::size_t shift_index, std::size_t point_index) const {
    UniformPoint u(spec_.dimension);
    fill(shift_index, point_index, 1, u);
    return u;
}

void PointSet::fill(std::size_t shift_index, std::size_t first, std::size_t count,
                    std::span<double> out) const {
    const std::size_t dim = spec_.dimension;
    if (shift_index >= spec_.shifts) throw ConfigError("shift index out of range");
    if (first + count > spec_.count) throw ConfigError("point index out of range");
    if (out.size() < count * dim) throw ConfigError("output buffer too small");

    switch (spec_.kind) {
        case PointKind::Sobol: {
            const auto shift = digital_shift(shift_index);
            std::vector<std::uint32_t> x(dim);
            for (std::size_t j = 0; j < dim; ++j) x[j] = sobol_integer(j, first ^ (first >> 1));
            for (std::size_t p = 0; p < count; ++p) {
                if (p > 0) {
                    // Gray-code step from index i-1 to i flips the lowest zero bit of i-1.
                    const int c = std::countr_one(static_cast<std::uint64_t>(first + p - 1));
                    for (std::size_t j = 0; j < dim; ++j) x[j] ^= sobol_->direction(j, c);
                }
                double* row = out.data() + p * dim;
                for (std::size_t j = 0; j < dim; ++j) row[j] = static_cast<double>(x[j] ^ shift[j]) * 0x1.0p-32;
            }
            break;
        }
        case PointKind::Lattice: {
            const auto shift = lattice_shift(shift_index);
            const int bits = lattice_->log2_max_points();
            const std::uint64_t mask = lattice_->max_points() - 1;
            const double scale = 1.0 / static_cast<double>(lattice_->max_points());
            for (std::size_t p = 0; p < count; ++p) {
                const std::uint64_t i = first + p;
                // Radical inverse of i in base 2, as an integer numerator over 2^bits.
                std::uint64_t rev = 0;
                for (int b = 0; b < bits; ++b) rev |= ((i >> b) & 1U) << (bits - 1 - b);
                double* row = out.data() + p * dim;
                for (std::size_t j = 0; j < dim; ++j) {
                    double v = static_cast<double>((rev * (*lattice_)[j]) & mask) * scale + shift[j];
                    if (v >= 1.0) v -= 1.0;
                    row[j] = v;
                }
            }
            break;
        }
        case PointKind::PseudoRandom: {
            const auto shift_key = derive_key(derive_key(spec_.seed, kTagPseudo), shift_index);
            for (std::size_t p = 0; p < count; ++p) {
                const auto key = derive_key(shift_key, first + p);
                double* row = out.data() + p * dim;
                for (std::size_t j = 0; j < dim; ++j) row[j] = counter_uniform(key, j);
            }
            break;
        }
    }
}

}  // namespace bqmc
