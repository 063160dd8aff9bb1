#ifndef DEOFDM_BLINDRX_HPP
#define DEOFDM_BLINDRX_HPP

#include "deofdm/channel.hpp"
#include "deofdm/trellis.hpp"

namespace deofdm {

// L equispaced phase hypotheses 2*pi*l/L joint with the Q-ary symbol phase.
struct PhaseQuantization {
    int L = 32;
    int Q = 4;

    int num_subtrellises() const { return L / Q; }
    double hypothesis(int l) const { return 2.0 * kPi * l / L; }
    void validate() const;
};

// Partition of the L states into L/Q disconnected sub-trellises; sub-trellis
// tau owns states {tau + p*L/Q : p = 0..Q-1} and every transition stays
// inside its subset.
struct SubTrellisPartition {
    int L = 0;
    int Q = 0;
    std::vector<std::vector<int>> states;  // [tau][p] -> global state index

    int tau_of(int state) const { return state % (L / Q); }
};

struct DecomposedTrellis {
    TrellisSpec spec;  // full L-state trellis, input q drives l -> l + q*L/Q
    SubTrellisPartition partition;
};

DecomposedTrellis build_decomposed_trellis(const PhaseQuantization& q);

// Per-block amplitude estimate and per-frame noise variance.
struct ChannelEstimates {
    double gain_hat = 1.0;
    double sigma2_hat = 1.0;
};

// Mean |Y|^2 over the received null tones.
double estimate_noise_variance(std::span<const cplx> null_tones);

// sqrt(max(mean |Y|^2 - sigma2_hat, 0)) over a block of observations.
double estimate_gain(std::span<const cplx> block, double sigma2_hat);

// An M x (N+1) time-frequency tile of the active-subcarrier grid. Column 0
// is the differential anchor shared with the previous block.
struct TwoDBlock {
    size_t frame = 0;  // frame index within a super-frame
    size_t m0 = 0;     // first active-subcarrier row
    size_t rows = 0;   // M
    size_t n0 = 0;     // first observation column (data column index - 1)
    size_t stages = 0; // N: data symbols demodulated by this block
};

// Result of running one sub-trellis over one subcarrier row.
struct SubTrellisRun {
    double log_evidence = 0.0;  // log p(Y_row, tau) up to a tau-independent constant
    SoftSeq post;               // p(A_n | Y_row, tau), n = 1..N
};

// Restricted BCJR on sub-trellis tau. Blind boundary: alpha(S_0) is the
// observation likelihood of Y_row[0] under each state's phase, beta ends
// uniform (1/L).
SubTrellisRun subtrellis_evidence(std::span<const cplx> Y_row, int tau,
                                  const PhaseQuantization& q, const ChannelEstimates& est,
                                  const SoftSeq& priors);

// log p(tau | Y_1..Y_M): sum of per-row log evidences, normalized over tau.
// priors_rows[m] supplies the symbol priors of row m.
std::vector<double> phase_posterior_2d(const std::vector<std::vector<cplx>>& rows,
                                       const PhaseQuantization& q, const ChannelEstimates& est,
                                       const std::vector<SoftSeq>& priors_rows);

struct BlockDemodResult {
    std::vector<SoftSeq> post_rows;  // per row: p(A_{m,n} | block), n = 1..N
    std::vector<double> tau_log_post;
};

// Mixture over sub-trellises: p(A | block) = sum_tau p(tau|block) p(A|Y_m,tau).
BlockDemodResult blind_demod_2d(const std::vector<std::vector<cplx>>& rows,
                                const PhaseQuantization& q, const ChannelEstimates& est,
                                const std::vector<SoftSeq>& priors_rows);

// ---------------------------------------------------------------------------
// Turbo demodulation/decoding controller
// ---------------------------------------------------------------------------

enum class RxMode { blind, perfect_csi };

struct TurboConfig {
    RxMode mode = RxMode::blind;
    int L = 32;
    int M = 64;          // subcarrier rows per block
    int N = 10;          // data symbols per block (inner code length)
    int iterations = 3;  // turbo iterations after the initial pass
    ConvCodeSpec code = ConvCodeSpec::k7_133_171();
    PskMapSpec map = PskMapSpec::qpsk_gray();
    InterleaverPerm perm;       // length must equal coded bits per super-frame
    double sigma2_true = 1.0;   // used by perfect-CSI mode
    double sigma2_floor = 1e-12;
};

struct BlockDiag {
    size_t frame, m0, rows, n0, stages;
    double gain_hat;
    double tau_entropy_bits;  // entropy of p(tau | block) at iteration 0
};

struct TurboResult {
    // hard information-bit decisions recorded after iteration 0..iterations
    std::vector<BitVec> decoded;
    std::vector<double> sigma2_hat;  // per frame (blind mode)
    std::vector<BlockDiag> blocks;
};

// Full receiver: channel estimation, blockwise (blind or coherent)
// demodulation, soft bit conversion, extrinsic exchange with the outer SISO
// decoder. Estimates are computed once before iteration 0 and frozen; the
// sub-trellis posteriors are recomputed every iteration.
TurboResult turbo_demod_decode(const std::vector<SymbolGrid>& frames, const OfdmFormat& fmt,
                               const TurboConfig& cfg,
                               const std::vector<ChannelRealization>* realizations = nullptr);

// Block tiling used by the receiver: time windows of up to N data symbols
// overlapping by one observation column, frequency runs of up to M rows
// (final run ragged).
std::vector<TwoDBlock> tile_blocks(const OfdmFormat& fmt, size_t num_frames, int M, int N);

}  // namespace deofdm

#endif
