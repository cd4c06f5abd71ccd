#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "raptor/rng.hpp"

namespace raptor {

// Dense GF(2) matrix, rows bit-packed into 64-bit words (LSB = column 0 of
// the word). Bits past `cols` in the last word of a row are kept zero.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols);

    static BitMatrix identity(int n);
    static BitMatrix from_rows(const std::vector<std::vector<std::uint8_t>>& rows);
    static BitMatrix random_bernoulli(int rows, int cols, double eta, Rng& rng);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return wpr_; }

    bool get(int r, int c) const {
        return (data_[static_cast<std::size_t>(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(int r, int c, bool v) {
        std::uint64_t& w = data_[static_cast<std::size_t>(r) * wpr_ + (c >> 6)];
        const std::uint64_t bit = std::uint64_t{1} << (c & 63);
        w = v ? (w | bit) : (w & ~bit);
    }

    std::span<const std::uint64_t> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * wpr_, static_cast<std::size_t>(wpr_)};
    }
    std::span<std::uint64_t> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * wpr_, static_cast<std::size_t>(wpr_)};
    }

    // dst ^= src, whole-row word XOR.
    void xor_row(int dst, int src);
    void swap_rows(int a, int b);

    bool row_is_zero(int r) const;
    int row_weight(int r) const;

    std::vector<std::uint8_t> row_bits(int r) const;

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    int wpr_ = 0; // words per row
    std::vector<std::uint64_t> data_;
};

// Product over GF(2); requires a.cols == b.rows.
BitMatrix mul(const BitMatrix& a, const BitMatrix& b);

// Vertical concatenation, top rows first; requires equal column counts.
BitMatrix stack(const BitMatrix& top, const BitMatrix& bottom);

// Row rank by forward elimination on an internal copy.
int rank(const BitMatrix& m);

struct GfSolveResult {
    enum class Status { solved, rank_deficient, inconsistent };
    Status status = Status::rank_deficient;
    std::vector<std::uint8_t> x; // unique solution when status == solved
    int rank = 0;
};

// Solves a*x = y. Unique solution requires full column rank; an unsolvable
// right-hand side is reported as inconsistent, a rank-deficient system by
// its achieved rank. Requires a.rows == y.size().
GfSolveResult solve(const BitMatrix& a, const std::vector<std::uint8_t>& y);

// Gauss-Jordan elimination of a copy of `a` with `rhs` carried along
// (rhs may have any number of columns; requires rhs.rows == a.rows).
// After return, `a_out` is in reduced row-echelon form, `pivot_cols[i]` is
// the pivot column of row i, and `consistent` reports whether every zero row
// of a_out has a zero rhs row.
struct GfElimination {
    BitMatrix a;
    BitMatrix rhs;
    std::vector<int> pivot_cols;
    int rank = 0;
    bool consistent = true;
};
GfElimination eliminate(const BitMatrix& a, const BitMatrix& rhs);

} // namespace raptor
