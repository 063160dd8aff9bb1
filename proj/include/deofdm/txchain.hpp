#ifndef DEOFDM_TXCHAIN_HPP
#define DEOFDM_TXCHAIN_HPP

#include "deofdm/common.hpp"

namespace deofdm {

// Feed-forward convolutional code, zero-tail terminated. Generators are
// octal-coded with the MSB multiplying the newest input bit.
struct ConvCodeSpec {
    int constraint_length = 7;
    std::vector<uint32_t> generators = {0133, 0171};  // octal literals

    int memory() const { return constraint_length - 1; }
    int num_states() const { return 1 << memory(); }
    int rate_den() const { return static_cast<int>(generators.size()); }

    static ConvCodeSpec k7_133_171() { return ConvCodeSpec{}; }
    // Rate-1, memoryless pass-through; decodes to its own input.
    static ConvCodeSpec identity() { return ConvCodeSpec{1, {01}}; }

    void validate() const;
    // Output bits of one branch: state = previous memory() input bits
    // (most recent in the MSB), in = current input bit.
    uint32_t branch_output(uint32_t state, int in) const;
    uint32_t next_state(uint32_t state, int in) const;
};

// Encode with zero-tail termination: memory() flush zeros are appended
// internally, so the output length is rate_den() * (|info| + memory()).
BitVec conv_encode(const BitVec& info_bits, const ConvCodeSpec& spec);

// Seed-deterministic uniform random permutation (Fisher-Yates).
struct InterleaverPerm {
    uint64_t seed = 0;
    std::vector<uint32_t> perm;

    size_t length() const { return perm.size(); }
};

InterleaverPerm make_interleaver(uint64_t seed, size_t length);

// interleave: out[i] = in[perm[i]]; deinterleave is the exact inverse.
template <typename T>
std::vector<T> interleave(const std::vector<T>& in, const InterleaverPerm& p) {
    if (in.size() != p.length()) throw std::invalid_argument("interleave: length mismatch");
    std::vector<T> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[i] = in[p.perm[i]];
    return out;
}

template <typename T>
std::vector<T> deinterleave(const std::vector<T>& in, const InterleaverPerm& p) {
    if (in.size() != p.length()) throw std::invalid_argument("deinterleave: length mismatch");
    std::vector<T> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[p.perm[i]] = in[i];
    return out;
}

// Permutes soft-message positions, same convention as the bit versions.
SoftSeq interleave_soft(const SoftSeq& in, const InterleaverPerm& p);
SoftSeq deinterleave_soft(const SoftSeq& in, const InterleaverPerm& p);

// Gray-labeled PSK constellation. Symbol index i sits at exp(j*2*pi*i/Q);
// labels[i] holds the bit pair (b0 in bit 1, b1 in bit 0 for Q=4).
struct PskMapSpec {
    int Q = 4;
    std::vector<cplx> points;
    std::vector<uint32_t> labels;

    int bits_per_symbol() const;
    // Gray QPSK anchored at (0,0) -> 1, (0,1) -> j, (1,1) -> -1, (1,0) -> -j.
    static PskMapSpec qpsk_gray();

    uint32_t label_of(int symbol_index) const { return labels[symbol_index]; }
    int index_of_label(uint32_t label) const;
};

// Maps consecutive bit groups to PSK symbols. Throws on a length that is
// not a multiple of bits_per_symbol().
std::vector<cplx> map_psk(const BitVec& bits, const PskMapSpec& spec);
std::vector<int> map_psk_indices(const BitVec& bits, const PskMapSpec& spec);

// Hard nearest-point demapping (test/benchmark helper).
BitVec demap_psk_hard(const std::vector<cplx>& symbols, const PskMapSpec& spec);

// Differential encoding per subcarrier row: X(m,0) = 1,
// X(m,n) = A(m,n) * X(m,n-1). Output has one extra column.
SymbolGrid diff_encode(const SymbolGrid& A);

}  // namespace deofdm

#endif
