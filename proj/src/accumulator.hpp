#pragma once

#include <cstdint>
#include <vector>

#include "msl/measure.hpp"

namespace msl::detail {

constexpr std::int64_t kDenseLimit = std::int64_t{1} << 27;

// Accumulates masses on cell indices; dense when the index range is known and small.
class Accumulator {
public:
    // expected: rough number of add() calls; very sparse workloads skip the dense buffer.
    Accumulator(std::int64_t lo, std::int64_t hi, std::int64_t expected = -1) : lo_(lo) {
        if (hi >= lo && hi - lo < kDenseLimit && (expected < 0 || (hi - lo) / 16 <= expected)) {
            dense_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
            use_dense_ = true;
        }
    }

    void add(std::int64_t k, double m) {
        if (use_dense_) {
            dense_[static_cast<std::size_t>(k - lo_)] += m;
        } else {
            sparse_.push_back({k, m});
        }
    }

    DyadicMeasure1D finish(int level) {
        if (!use_dense_) return DyadicMeasure1D::from_cells(level, std::move(sparse_), false);
        std::vector<Cell> cells;
        for (std::size_t j = 0; j < dense_.size(); ++j) {
            if (dense_[j] > 0.0) cells.push_back({lo_ + static_cast<std::int64_t>(j), dense_[j]});
        }
        return DyadicMeasure1D::from_sorted(level, std::move(cells));
    }

private:
    std::int64_t lo_;
    bool use_dense_ = false;
    std::vector<double> dense_;
    std::vector<Cell> sparse_;
};

}  // namespace msl::detail
