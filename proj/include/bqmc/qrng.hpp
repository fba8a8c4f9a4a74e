#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bqmc {

enum class PointKind { Sobol, Lattice, PseudoRandom };

std::string to_string(PointKind kind);
PointKind parse_point_kind(const std::string& text);

struct PointSetSpec {
    PointKind kind = PointKind::Sobol;
    std::size_t dimension = 1;
    std::size_t count = 1;
    std::size_t shifts = 1;
    std::uint64_t seed = 0;
    // When false the deterministic (unshifted) point set is returned for every
    // shift index. PseudoRandom points are always random.
    bool randomize = true;

    void validate() const;
};

using UniformPoint = std::vector<double>;

/// Sobol direction numbers, 32 bits per coordinate.
///
/// Rows follow the Joe-Kuo text layout `d s a m_1 ... m_s` for d >= 2; the
/// first dimension is the van der Corput sequence and is implicit. A header
/// line starting with a non-digit is skipped.
class SobolTable {
public:
    static constexpr int kBits = 32;

    static SobolTable parse(std::istream& in, std::size_t max_dimension = 0);
    static SobolTable load(const std::filesystem::path& path, std::size_t max_dimension = 0);

    std::size_t dimensions() const { return directions_.size() / kBits; }

    // Direction integer v_{bit} (bit = 0 is the most significant) for a dimension.
    std::uint32_t direction(std::size_t dim, int bit) const { return directions_[dim * kBits + bit]; }

private:
    std::vector<std::uint32_t> directions_;
};

/// Generating vector of a base-2 extensible rank-1 lattice.
class LatticeVector {
public:
    static constexpr int kMaxLog2Points = 20;

    explicit LatticeVector(std::vector<std::uint64_t> generator, int log2_max_points = kMaxLog2Points);

    static LatticeVector parse(std::istream& in, std::size_t max_dimension = 0);
    static LatticeVector load(const std::filesystem::path& path, std::size_t max_dimension = 0);

    std::size_t dimensions() const { return generator_.size(); }
    std::uint64_t max_points() const { return std::uint64_t{1} << log2_max_points_; }
    int log2_max_points() const { return log2_max_points_; }
    std::uint64_t operator[](std::size_t dim) const { return generator_[dim]; }

private:
    std::vector<std::uint64_t> generator_;
    int log2_max_points_;
};

/// Default data files shipped with the library (overridable via configuration).
std::filesystem::path default_direction_file();
std::filesystem::path default_lattice_file();

/// Randomized point set. Stateless after construction and safe to share.
///
/// Sobol points are produced in Gray-code order and randomized by a digital
/// (XOR) shift. Lattice points use radical-inverse ordering, so the first N
/// points of the sequence are the N-point lattice for every power of two N,
/// randomized by a shift modulo 1. Shift vectors derive from (seed, shift).
class PointSet {
public:
    PointSet(PointSetSpec spec, std::shared_ptr<const SobolTable> sobol,
             std::shared_ptr<const LatticeVector> lattice);

    // Loads the default tables required by spec.kind.
    static PointSet with_default_tables(PointSetSpec spec);

    const PointSetSpec& spec() const { return spec_; }
    std::size_t dimension() const { return spec_.dimension; }

    UniformPoint generate_point(std::size_t shift_index, std::size_t point_index) const;

    // Points [first, first + count) of a shift, row-major into out
    // (count * dimension values). Sequential generation is O(dimension) per point.
    void fill(std::size_t shift_index, std::size_t first, std::size_t count,
              std::span<double> out) const;

    // Largest count this point set can serve.
    std::uint64_t capacity() const;

private:
    std::vector<std::uint32_t> digital_shift(std::size_t shift_index) const;
    std::vector<double> lattice_shift(std::size_t shift_index) const;
    std::uint32_t sobol_integer(std::size_t dim, std::uint64_t gray) const;

    PointSetSpec spec_;
    std::shared_ptr<const SobolTable> sobol_;
    std::shared_ptr<const LatticeVector> lattice_;
};

}  // namespace bqmc
