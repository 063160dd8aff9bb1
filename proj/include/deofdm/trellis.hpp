#ifndef DEOFDM_TRELLIS_HPP
#define DEOFDM_TRELLIS_HPP

#include <span>

#include "deofdm/txchain.hpp"

namespace deofdm {

// Finite-state machine over a fixed input alphabet. Every state has exactly
// num_inputs outgoing edges; for the trellises used here the incoming degree
// is num_inputs as well.
struct TrellisSpec {
    int num_states = 1;
    int num_inputs = 1;
    std::vector<int32_t> next;  // num_states * num_inputs, next[s*I + q]

    int to(int s, int q) const { return next[s * num_inputs + q]; }

    // (prev_state, input) pairs feeding each state, built on demand.
    struct InEdge {
        int32_t from;
        int32_t input;
    };
    std::vector<std::vector<InEdge>> incoming() const;

    void validate() const;

    // Q-state differential PSK trellis: input q drives state s -> (s+q) mod Q.
    static TrellisSpec depsk(int Q);
    // Branch structure of a terminated convolutional code (inputs 0/1).
    static TrellisSpec conv(const ConvCodeSpec& code);
};

// Forward-backward posteriors for one trellis segment.
//
// Stage n (1-based over 1..N) consumes metrics[(n-1)*S*I + s*I + q], the
// log branch value of the edge leaving state s with input q. alpha0 and
// beta_end are log-domain boundary weights of size num_states. Per-stage
// renormalization keeps the recursions in range; the dropped constants are
// re-accumulated into log_evidence = log sum_s alpha_N(s) beta_end(s).
struct BcjrResult {
    size_t num_stages = 0;
    int num_states = 0;
    int num_inputs = 0;
    // edge posteriors, normalized per stage, same layout as the metrics
    std::vector<double> edge_post;
    double log_evidence = 0.0;

    double post(size_t stage, int s, int q) const {
        return edge_post[stage * num_states * num_inputs + s * num_inputs + q];
    }
    // log posterior of input q at a stage, marginalized over edges
    std::vector<double> input_marginal(size_t stage) const;
};

BcjrResult log_bcjr(const TrellisSpec& spec, std::span<const double> metrics,
                    std::span<const double> alpha0, std::span<const double> beta_end);

// Forward-backward on the Q-state differential trellis (input q drives
// s -> s+q mod Q), with the branch metric split into a destination-state
// likelihood and an input prior:
//   gamma_n(s -> j) = lik[(n-1)*Q + j] + prior[(n-1)*Q + q],  j = (s+q) mod Q.
// The terminal weight is uniform, exp(log_beta_const) per state. Same
// posteriors and evidence as log_bcjr on the equivalent metric tensor, in a
// form tight enough for the per-row inner loops of the receiver.
struct DepskFbResult {
    std::vector<double> post;  // N*Q input marginals, normalized per stage
    double log_evidence = 0.0;
};
DepskFbResult depsk_forward_backward(int Q, size_t N, const double* lik, const double* prior,
                                     const double* alpha0, double log_beta_const);

// ---------------------------------------------------------------------------
// DE-PSK symbol demodulation with known channel
// ---------------------------------------------------------------------------

// Boundary condition for the first observation of a segment.
struct SegmentStart {
    enum Kind { known_reference, from_observation } kind = known_reference;
};

// Joint symbol posteriors p(A_n | Y) for a row of N+1 observations (index 0
// is the segment's differential anchor). With kind=known_reference the
// anchor is X=1 (alpha = delta_0); with from_observation the anchor state is
// inferred from Y[0] and H[0] alone. Branch metric:
//   log gamma = -|Y_n - H_n X_n|^2 / sigma2 + log p(A_n)
// (the 1/(pi sigma2) constant cancels in normalization and is dropped).
SoftSeq coherent_depsk_demod(std::span<const cplx> Y_row, std::span<const cplx> H_row,
                             double sigma2, const SoftSeq& priors, int Q,
                             SegmentStart start = {});

// ---------------------------------------------------------------------------
// Convolutional SISO decoding
// ---------------------------------------------------------------------------

struct SisoResult {
    SoftSeq info;   // per-branch input posteriors (includes tail branches)
    SoftSeq coded;  // per coded bit posteriors, length = branches * rate_den
};

// BCJR over the code trellis with branch metric = product of the coded-bit
// likelihoods emitted on the branch. Zero-tail termination: the final
// memory() branches admit only input 0, and beta ends in state 0.
SisoResult conv_siso_decode(const SoftSeq& coded_likelihoods, const ConvCodeSpec& code);

// ---------------------------------------------------------------------------
// Soft bit <-> symbol conversion and extrinsic bookkeeping
// ---------------------------------------------------------------------------

// Bit marginals of symbol posteriors under the map's labeling.
SoftSeq symbol_to_bit(const SoftSeq& symbols, const PskMapSpec& map);

// Symbol distribution from independent per-bit probabilities.
SoftSeq bit_to_symbol(const SoftSeq& bits, const PskMapSpec& map);

// Log-domain division joint/prior, renormalized and floored per position.
SoftSeq extrinsic_divide(const SoftSeq& joint, const SoftSeq& prior);

}  // namespace deofdm

#endif
