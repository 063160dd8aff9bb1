#include "deofdm/txchain.hpp"

#include <bit>

namespace deofdm {

void ConvCodeSpec::validate() const {
    if (constraint_length < 1) throw std::invalid_argument("constraint_length < 1");
    if (generators.empty()) throw std::invalid_argument("no generator polynomials");
    const uint32_t mask = (constraint_length >= 32) ? ~0u : ((1u << constraint_length) - 1);
    for (uint32_t g : generators)
        if ((g & mask) != g) throw std::invalid_argument("generator exceeds constraint length");
}

uint32_t ConvCodeSpec::branch_output(uint32_t state, int in) const {
    const uint32_t reg = (static_cast<uint32_t>(in) << memory()) | state;
    uint32_t out = 0;
    for (uint32_t g : generators)
        out = (out << 1) | (std::popcount(reg & g) & 1u);
    return out;  // first generator in the MSB
}

uint32_t ConvCodeSpec::next_state(uint32_t state, int in) const {
    return ((static_cast<uint32_t>(in) << memory()) | state) >> 1;
}

BitVec conv_encode(const BitVec& info_bits, const ConvCodeSpec& spec) {
    spec.validate();
    if (info_bits.empty()) throw std::invalid_argument("empty message");

    const int m = spec.memory();
    const int den = spec.rate_den();
    BitVec out;
    out.reserve(den * (info_bits.size() + m));

    uint32_t state = 0;
    auto push_branch = [&](int in) {
        const uint32_t o = spec.branch_output(state, in);
        for (int g = den - 1; g >= 0; --g) out.push_back((o >> g) & 1u);
        state = spec.next_state(state, in);
    };
    for (uint8_t b : info_bits) push_branch(b & 1);
    for (int i = 0; i < m; ++i) push_branch(0);
    return out;
}

InterleaverPerm make_interleaver(uint64_t seed, size_t length) {
    if (length < 1) throw std::invalid_argument("interleaver length < 1");
    InterleaverPerm p;
    p.seed = seed;
    p.perm.resize(length);
    for (size_t i = 0; i < length; ++i) p.perm[i] = static_cast<uint32_t>(i);
    Rng rng(mix_seed(seed, 0x1eaf));
    for (size_t i = length - 1; i > 0; --i) {
        const size_t j = rng.bounded(i + 1);
        std::swap(p.perm[i], p.perm[j]);
    }
    return p;
}

SoftSeq interleave_soft(const SoftSeq& in, const InterleaverPerm& p) {
    if (in.len != p.length()) throw std::invalid_argument("interleave: length mismatch");
    SoftSeq out(in.arity, in.len, 0.0);
    for (size_t i = 0; i < in.len; ++i)
        for (int k = 0; k < in.arity; ++k) out.at(i)[k] = in.at(p.perm[i])[k];
    return out;
}

SoftSeq deinterleave_soft(const SoftSeq& in, const InterleaverPerm& p) {
    if (in.len != p.length()) throw std::invalid_argument("deinterleave: length mismatch");
    SoftSeq out(in.arity, in.len, 0.0);
    for (size_t i = 0; i < in.len; ++i)
        for (int k = 0; k < in.arity; ++k) out.at(p.perm[i])[k] = in.at(i)[k];
    return out;
}

int PskMapSpec::bits_per_symbol() const {
    int b = 0;
    while ((1 << b) < Q) ++b;
    return b;
}

PskMapSpec PskMapSpec::qpsk_gray() {
    PskMapSpec s;
    s.Q = 4;
    s.points.resize(4);
    for (int i = 0; i < 4; ++i)
        s.points[i] = std::polar(1.0, 2.0 * kPi * i / 4.0);
    // label bits (b0,b1) packed as b0*2 + b1, Gray order around the circle
    s.labels = {0b00, 0b01, 0b11, 0b10};
    return s;
}

int PskMapSpec::index_of_label(uint32_t label) const {
    for (int i = 0; i < Q; ++i)
        if (labels[i] == label) return i;
    throw std::invalid_argument("label not in PSK table");
}

std::vector<int> map_psk_indices(const BitVec& bits, const PskMapSpec& spec) {
    const int bps = spec.bits_per_symbol();
    if (bits.size() % bps != 0) throw std::invalid_argument("bit count not a multiple of bits per symbol");
    std::vector<int> idx(bits.size() / bps);
    for (size_t t = 0; t < idx.size(); ++t) {
        uint32_t label = 0;
        for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[t * bps + b] & 1u);
        idx[t] = spec.index_of_label(label);
    }
    return idx;
}

std::vector<cplx> map_psk(const BitVec& bits, const PskMapSpec& spec) {
    const auto idx = map_psk_indices(bits, spec);
    std::vector<cplx> out(idx.size());
    for (size_t t = 0; t < idx.size(); ++t) out[t] = spec.points[idx[t]];
    return out;
}

BitVec demap_psk_hard(const std::vector<cplx>& symbols, const PskMapSpec& spec) {
    const int bps = spec.bits_per_symbol();
    BitVec out;
    out.reserve(symbols.size() * bps);
    for (const cplx& y : symbols) {
        int best = 0;
        double best_d = std::norm(y - spec.points[0]);
        for (int i = 1; i < spec.Q; ++i) {
            const double d = std::norm(y - spec.points[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        const uint32_t label = spec.labels[best];
        for (int b = bps - 1; b >= 0; --b) out.push_back((label >> b) & 1u);
    }
    return out;
}

SymbolGrid diff_encode(const SymbolGrid& A) {
    SymbolGrid X(A.rows, A.cols + 1);
    for (size_t m = 0; m < A.rows; ++m) X.at(m, 0) = {1.0, 0.0};
    for (size_t n = 0; n < A.cols; ++n)
        for (size_t m = 0; m < A.rows; ++m)
            X.at(m, n + 1) = A.at(m, n) * X.at(m, n);
    return X;
}

}  // namespace deofdm
