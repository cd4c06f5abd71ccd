#include "raptor/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace raptor {

namespace {

int words_for(int cols) { return cols == 0 ? 0 : (cols + 63) / 64; }

} // namespace

BitMatrix::BitMatrix(int rows, int cols) : rows_(rows), cols_(cols), wpr_(words_for(cols)) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("BitMatrix: negative dimension");
    data_.assign(static_cast<std::size_t>(rows_) * wpr_, 0);
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<std::uint8_t>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
    BitMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
        for (int j = 0; j < c; ++j)
            if (rows[i][j])
                m.set(i, j, true);
    }
    return m;
}

BitMatrix BitMatrix::random_bernoulli(int rows, int cols, double eta, Rng& rng) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("random_bernoulli: eta outside [0,1]");
    BitMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (rng.next_bernoulli(eta))
                m.set(i, j, true);
    return m;
}

void BitMatrix::xor_row(int dst, int src) {
    std::uint64_t* d = data_.data() + static_cast<std::size_t>(dst) * wpr_;
    const std::uint64_t* s = data_.data() + static_cast<std::size_t>(src) * wpr_;
    for (int w = 0; w < wpr_; ++w)
        d[w] ^= s[w];
}

void BitMatrix::swap_rows(int a, int b) {
    if (a == b)
        return;
    std::uint64_t* ra = data_.data() + static_cast<std::size_t>(a) * wpr_;
    std::uint64_t* rb = data_.data() + static_cast<std::size_t>(b) * wpr_;
    for (int w = 0; w < wpr_; ++w)
        std::swap(ra[w], rb[w]);
}

bool BitMatrix::row_is_zero(int r) const {
    const std::uint64_t* p = data_.data() + static_cast<std::size_t>(r) * wpr_;
    for (int w = 0; w < wpr_; ++w)
        if (p[w])
            return false;
    return true;
}

int BitMatrix::row_weight(int r) const {
    const std::uint64_t* p = data_.data() + static_cast<std::size_t>(r) * wpr_;
    int weight = 0;
    for (int w = 0; w < wpr_; ++w)
        weight += std::popcount(p[w]);
    return weight;
}

std::vector<std::uint8_t> BitMatrix::row_bits(int r) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(cols_));
    for (int j = 0; j < cols_; ++j)
        out[static_cast<std::size_t>(j)] = get(r, j) ? 1 : 0;
    return out;
}

BitMatrix mul(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("mul: dimension mismatch (" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + ")");
    BitMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        auto orow = out.row(i);
        for (int wi = 0; wi < a.words_per_row(); ++wi) {
            std::uint64_t w = arow[wi];
            while (w) {
                const int t = wi * 64 + std::countr_zero(w);
                w &= w - 1;
                auto brow = b.row(t);
                for (std::size_t x = 0; x < brow.size(); ++x)
                    orow[x] ^= brow[x];
            }
        }
    }
    return out;
}

BitMatrix stack(const BitMatrix& top, const BitMatrix& bottom) {
    if (top.cols() != bottom.cols() && top.rows() != 0 && bottom.rows() != 0)
        throw std::invalid_argument("stack: column mismatch");
    const int cols = top.rows() != 0 ? top.cols() : bottom.cols();
    BitMatrix out(top.rows() + bottom.rows(), cols);
    for (int i = 0; i < top.rows(); ++i)
        std::copy(top.row(i).begin(), top.row(i).end(), out.row(i).begin());
    for (int i = 0; i < bottom.rows(); ++i)
        std::copy(bottom.row(i).begin(), bottom.row(i).end(), out.row(top.rows() + i).begin());
    return out;
}

int rank(const BitMatrix& m) {
    BitMatrix a = m; // keep the input observably unmodified
    int r = 0;
    for (int col = 0; col < a.cols() && r < a.rows(); ++col) {
        int pivot = -1;
        for (int i = r; i < a.rows(); ++i)
            if (a.get(i, col)) {
                pivot = i;
                break;
            }
        if (pivot < 0)
            continue;
        a.swap_rows(r, pivot);
        for (int i = r + 1; i < a.rows(); ++i)
            if (a.get(i, col))
                a.xor_row(i, r);
        ++r;
    }
    return r;
}

GfElimination eliminate(const BitMatrix& a_in, const BitMatrix& rhs_in) {
    if (a_in.rows() != rhs_in.rows())
        throw std::invalid_argument("eliminate: rhs row mismatch");
    GfElimination e{a_in, rhs_in, {}, 0, true};
    BitMatrix& a = e.a;
    BitMatrix& rhs = e.rhs;
    int r = 0;
    for (int col = 0; col < a.cols() && r < a.rows(); ++col) {
        int pivot = -1;
        for (int i = r; i < a.rows(); ++i)
            if (a.get(i, col)) {
                pivot = i;
                break;
            }
        if (pivot < 0)
            continue;
        a.swap_rows(r, pivot);
        rhs.swap_rows(r, pivot);
        for (int i = 0; i < a.rows(); ++i)
            if (i != r && a.get(i, col)) {
                a.xor_row(i, r);
                rhs.xor_row(i, r);
            }
        e.pivot_cols.push_back(col);
        ++r;
    }
    e.rank = r;
    for (int i = r; i < a.rows(); ++i)
        if (!rhs.row_is_zero(i)) {
            e.consistent = false;
            break;
        }
    return e;
}

GfSolveResult solve(const BitMatrix& a, const std::vector<std::uint8_t>& y) {
    if (a.rows() != static_cast<int>(y.size()))
        throw std::invalid_argument("solve: length of y must equal a.rows");
    BitMatrix rhs(a.rows(), 1);
    for (int i = 0; i < a.rows(); ++i)
        if (y[static_cast<std::size_t>(i)])
            rhs.set(i, 0, true);
    GfElimination e = eliminate(a, rhs);
    GfSolveResult res;
    res.rank = e.rank;
    if (e.rank < a.cols()) {
        res.status = e.consistent ? GfSolveResult::Status::rank_deficient
                                  : GfSolveResult::Status::inconsistent;
        return res;
    }
    if (!e.consistent) {
        res.status = GfSolveResult::Status::inconsistent;
        return res;
    }
    res.status = GfSolveResult::Status::solved;
    res.x.assign(static_cast<std::size_t>(a.cols()), 0);
    for (int i = 0; i < e.rank; ++i)
        res.x[static_cast<std::size_t>(e.pivot_cols[static_cast<std::size_t>(i)])] =
            e.rhs.get(i, 0) ? 1 : 0;
    return res;
}

} // namespace raptor
