#ifndef LMS_CELLS_HPP
#define LMS_CELLS_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "combinatorics.hpp"
#include "rng.hpp"

namespace lms {

/// Thrown when a lazily explored structure outgrows its configured cap.
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline void validate_cell(const Cell& c, int n) {
    if (c.empty()) throw std::invalid_argument("cell: empty");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] < 1 || c[i] > n) throw std::invalid_argument("cell: vertex out of range");
        if (i > 0 && c[i] <= c[i - 1]) throw std::invalid_argument("cell: not strictly increasing");
    }
}

/// Deterministic presence test for d-cells, a pure function of
/// (p, seed, rank).  present iff mix64(seed ^ rank*golden) < floor(p*2^64),
/// which couples samples monotonically in p for a fixed seed.
class PresenceOracle {
public:
    PresenceOracle() : seed_(0), always_(false), never_(true), threshold_(0) {}
    PresenceOracle(double p, std::uint64_t seed) : seed_(seed) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
        always_ = false;
        never_ = false;
        threshold_ = 0;
        long double t = std::floor((long double)p * 18446744073709551616.0L);
        if (t >= 18446744073709551616.0L) always_ = true;
        else if (t <= 0.0L) never_ = true;
        else threshold_ = (std::uint64_t)t;
    }

    bool present(std::uint64_t rank) const {
        if (always_) return true;
        if (never_) return false;
        return mix64(seed_ ^ (rank * kGolden)) < threshold_;
    }

private:
    std::uint64_t seed_;
    bool always_, never_;
    std::uint64_t threshold_;
};

enum class SampleMode { materialized, lazy };

/// One draw of the random complex: complete skeleton up to dimension d-1,
/// each d-cell present independently with probability p.
class ComplexSample {
public:
    ComplexSample(int n, int d, double p, std::uint64_t seed, SampleMode mode)
        : n_(n), d_(d), p_(p), seed_(seed), mode_(mode), oracle_(p, seed),
          table_(n, d + 1) {
        if (d < 2) throw std::invalid_argument("d must be >= 2");
        if (n < d + 1) throw std::invalid_argument("n must be >= d+1");
        num_dcells_ = binom(n, d + 1);
        num_cells_ = binom(n, d);
        if (mode_ == SampleMode::materialized) {
            for (std::uint64_t r = 0; r < num_dcells_; ++r)
                if (oracle_.present(r)) present_.push_back(r);
        }
    }

    int n() const { return n_; }
    int d() const { return d_; }
    double p() const { return p_; }
    std::uint64_t seed() const { return seed_; }
    SampleMode mode() const { return mode_; }
    std::uint64_t num_dcells() const { return num_dcells_; }
    /// Number of (d-1)-cells, i.e. the adjacency dimension C(n,d).
    std::uint64_t dim() const { return num_cells_; }
    const BinomTable& table() const { return table_; }

    /// Present d-cell ranks in increasing order (materialized mode only).
    const std::vector<std::uint64_t>& present_ranks() const {
        if (mode_ != SampleMode::materialized)
            throw std::logic_error("present_ranks: sample is lazy");
        return present_;
    }

    bool contains_rank(std::uint64_t rank) const {
        if (rank >= num_dcells_) throw std::out_of_range("d-cell rank out of range");
        if (mode_ == SampleMode::materialized)
            return std::binary_search(present_.begin(), present_.end(), rank);
        return oracle_.present(rank);
    }

    bool contains_dcell(const Cell& tau) const {
        if ((int)tau.size() != d_ + 1) throw std::invalid_argument("contains_dcell: wrong dimension");
        validate_cell(tau, n_);
        return contains_rank(table_.rank(tau));
    }

    /// Present count; scans the full rank range when lazy.
    std::uint64_t count_present() const {
        if (mode_ == SampleMode::materialized) return present_.size();
        std::uint64_t c = 0;
        for (std::uint64_t r = 0; r < num_dcells_; ++r)
            if (oracle_.present(r)) ++c;
        return c;
    }

private:
    int n_, d_;
    double p_;
    std::uint64_t seed_;
    SampleMode mode_;
    PresenceOracle oracle_;
    BinomTable table_;
    std::uint64_t num_dcells_, num_cells_;
    std::vector<std::uint64_t> present_;
};

inline ComplexSample sample_complex(int n, int d, double p, std::uint64_t seed,
                                    SampleMode mode = SampleMode::materialized) {
    return ComplexSample(n, d, p, seed, mode);
}

} // namespace lms

#endif
