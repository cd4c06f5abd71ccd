#pragma once

#include <cstdint>
#include <vector>

#include "raptor/degree.hpp"
#include "raptor/gf2.hpp"
#include "raptor/rng.hpp"

namespace raptor {

// Parameters of a (k, C, Omega) Raptor code with an (n, k, eta) systematic
// random pre-code. Validated on construction: 1 <= k <= n, eta in [0,1],
// omega supported on 1..n.
struct RaptorConfig {
    int k;
    int n;
    double eta;
    DegreeDistribution omega;

    RaptorConfig(int k, int n, double eta, DegreeDistribution omega);
};

// Generator [I_k | P]^T (n x k) and parity check [P | I_{n-k}] ((n-k) x n)
// sharing the same P, so h * g_pre = 0 by construction.
struct Precode {
    BitMatrix g_pre;
    BitMatrix h;
};

// An LT-coded block: row i of g_lt selects the intermediate packets XORed
// into payload row i. Payload rows all have the same bit length L.
struct CodedBlock {
    BitMatrix g_lt;     // m x n
    BitMatrix payloads; // m x L
};

Precode gen_precode(const RaptorConfig& cfg, Rng& rng);

// One LT row: degree d ~ Omega, then d distinct positions uniform in 0..n-1.
// Returned as the sorted support; row weight is exactly d.
std::vector<int> lt_row_support(const RaptorConfig& cfg, Rng& rng);

// m LT rows as an m x n matrix.
BitMatrix draw_lt_matrix(const RaptorConfig& cfg, int m, Rng& rng);

// XOR-encode k source packets (rows of `source`, k x L) into m coded packets.
CodedBlock encode(const RaptorConfig& cfg, const Precode& precode, const BitMatrix& source,
                  int m, Rng& rng);

// Full-decode criterion: rank(g_lt * g_pre) == k (equivalently the stacked
// (g_lt; h) matrix has rank n).
bool decodable(const BitMatrix& g_lt, const Precode& precode);

struct DecodeResult {
    enum class Status { decoded, rank_deficient, inconsistent };
    Status status = Status::rank_deficient;
    BitMatrix source; // k x L when decoded
    int rank = 0;     // achieved rank of the stacked system
};

// Gaussian elimination on the stacked (g_lt; h) system with all payload bit
// columns carried as one multi-column right-hand side. Succeeds exactly when
// decodable(...) holds; a corrupted payload on a full-rank system reports
// Status::inconsistent.
DecodeResult decode(const CodedBlock& block, const Precode& precode);

// Length-prefixed binary layout: header {k, n, m, L} as little-endian u32,
// then g_lt rows packed LSB-first (ceil(n/8) bytes each), then payload rows
// (ceil(L/8) bytes each).
std::vector<std::uint8_t> serialize(const CodedBlock& block, int k);
struct DeserializedBlock {
    CodedBlock block;
    int k;
};
DeserializedBlock deserialize(const std::vector<std::uint8_t>& bytes);

} // namespace raptor
