#include "raptor/codec.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace raptor {

RaptorConfig::RaptorConfig(int k_, int n_, double eta_, DegreeDistribution omega_)
    : k(k_), n(n_), eta(eta_), omega(std::move(omega_)) {
    if (k < 1)
        throw std::invalid_argument("RaptorConfig: k must be >= 1");
    if (n < k)
        throw std::invalid_argument("RaptorConfig: n must be >= k");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("RaptorConfig: eta outside [0,1]");
    if (omega.support() != n)
        throw std::invalid_argument("RaptorConfig: omega support must equal n");
}

Precode gen_precode(const RaptorConfig& cfg, Rng& rng) {
    const int k = cfg.k;
    const int n = cfg.n;
    BitMatrix p = BitMatrix::random_bernoulli(k, n - k, cfg.eta, rng);

    BitMatrix g_pre(n, k);
    for (int i = 0; i < k; ++i)
        g_pre.set(i, i, true);
    for (int j = 0; j < n - k; ++j)
        for (int i = 0; i < k; ++i)
            if (p.get(i, j))
                g_pre.set(k + j, i, true);

    BitMatrix h(n - k, n);
    for (int j = 0; j < n - k; ++j) {
        for (int i = 0; i < k; ++i)
            if (p.get(i, j))
                h.set(j, i, true);
        h.set(j, k + j, true);
    }
    return Precode{std::move(g_pre), std::move(h)};
}

std::vector<int> lt_row_support(const RaptorConfig& cfg, Rng& rng) {
    const int n = cfg.n;
    const int d = cfg.omega.sample(rng);
    // partial Fisher-Yates: d distinct positions without replacement
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> support;
    support.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        support.push_back(idx[static_cast<std::size_t>(i)]);
    }
    std::sort(support.begin(), support.end());
    return support;
}

BitMatrix draw_lt_matrix(const RaptorConfig& cfg, int m, Rng& rng) {
    BitMatrix g(m, cfg.n);
    for (int i = 0; i < m; ++i)
        for (int pos : lt_row_support(cfg, rng))
            g.set(i, pos, true);
    return g;
}

CodedBlock encode(const RaptorConfig& cfg, const Precode& precode, const BitMatrix& source,
                  int m, Rng& rng) {
    if (source.rows() != cfg.k)
        throw std::invalid_argument("encode: source must have k rows");
    if (source.cols() < 1)
        throw std::invalid_argument("encode: packet length must be >= 1");
    BitMatrix g_lt = draw_lt_matrix(cfg, m, rng);
    const BitMatrix intermediate = mul(precode.g_pre, source); // n x L
    BitMatrix payloads = mul(g_lt, intermediate);              // m x L
    return CodedBlock{std::move(g_lt), std::move(payloads)};
}

bool decodable(const BitMatrix& g_lt, const Precode& precode) {
    return rank(mul(g_lt, precode.g_pre)) == precode.g_pre.cols();
}

DecodeResult decode(const CodedBlock& block, const Precode& precode) {
    const int n = precode.g_pre.rows();
    const int k = precode.g_pre.cols();
    if (block.g_lt.cols() != n)
        throw std::invalid_argument("decode: g_lt column count must equal n");
    if (block.g_lt.rows() != block.payloads.rows())
        throw std::invalid_argument("decode: payload count must equal g_lt rows");

    const BitMatrix a = stack(block.g_lt, precode.h);
    const BitMatrix rhs = stack(block.payloads, BitMatrix(n - k, block.payloads.cols()));
    GfElimination e = eliminate(a, rhs);

    DecodeResult res;
    res.rank = e.rank;
    if (e.rank < n) {
        res.status = DecodeResult::Status::rank_deficient;
        assert(!decodable(block.g_lt, precode));
        return res;
    }
    if (!e.consistent) {
        res.status = DecodeResult::Status::inconsistent;
        return res;
    }
    assert(decodable(block.g_lt, precode));
    // pivots cover all n columns in order; the intermediate block is rows 0..n-1
    res.status = DecodeResult::Status::decoded;
    res.source = BitMatrix(k, block.payloads.cols());
    for (int i = 0; i < k; ++i)
        std::copy(e.rhs.row(i).begin(), e.rhs.row(i).end(), res.source.row(i).begin());
    return res;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
    return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8) |
           (static_cast<std::uint32_t>(in[at + 2]) << 16) |
           (static_cast<std::uint32_t>(in[at + 3]) << 24);
}

void pack_row(std::vector<std::uint8_t>& out, const BitMatrix& m, int row) {
    const int nbytes = (m.cols() + 7) / 8;
    for (int b = 0; b < nbytes; ++b) {
        std::uint8_t byte = 0;
        for (int bit = 0; bit < 8; ++bit) {
            const int col = b * 8 + bit;
            if (col < m.cols() && m.get(row, col))
                byte |= static_cast<std::uint8_t>(1u << bit);
        }
        out.push_back(byte);
    }
}

void unpack_row(const std::vector<std::uint8_t>& in, std::size_t& at, BitMatrix& m, int row) {
    const int nbytes = (m.cols() + 7) / 8;
    for (int b = 0; b < nbytes; ++b) {
        const std::uint8_t byte = in[at++];
        for (int bit = 0; bit < 8; ++bit) {
            const int col = b * 8 + bit;
            if (col < m.cols() && ((byte >> bit) & 1u))
                m.set(row, col, true);
        }
    }
}

} // namespace

std::vector<std::uint8_t> serialize(const CodedBlock& block, int k) {
    std::vector<std::uint8_t> out;
    const int m = block.g_lt.rows();
    put_u32(out, static_cast<std::uint32_t>(k));
    put_u32(out, static_cast<std::uint32_t>(block.g_lt.cols()));
    put_u32(out, static_cast<std::uint32_t>(m));
    put_u32(out, static_cast<std::uint32_t>(block.payloads.cols()));
    for (int i = 0; i < m; ++i)
        pack_row(out, block.g_lt, i);
    for (int i = 0; i < m; ++i)
        pack_row(out, block.payloads, i);
    return out;
}

DeserializedBlock deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16)
        throw std::invalid_argument("deserialize: truncated header");
    const int k = static_cast<int>(get_u32(bytes, 0));
    const int n = static_cast<int>(get_u32(bytes, 4));
    const int m = static_cast<int>(get_u32(bytes, 8));
    const int l = static_cast<int>(get_u32(bytes, 12));
    const std::size_t need = 16 + static_cast<std::size_t>(m) * ((n + 7) / 8) +
                             static_cast<std::size_t>(m) * ((l + 7) / 8);
    if (bytes.size() != need)
        throw std::invalid_argument("deserialize: length does not match header");
    CodedBlock block{BitMatrix(m, n), BitMatrix(m, l)};
    std::size_t at = 16;
    for (int i = 0; i < m; ++i)
        unpack_row(bytes, at, block.g_lt, i);
    for (int i = 0; i < m; ++i)
        unpack_row(bytes, at, block.payloads, i);
    return DeserializedBlock{std::move(block), k};
}

} // namespace raptor
