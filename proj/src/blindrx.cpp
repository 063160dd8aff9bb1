#include "deofdm/blindrx.hpp"

namespace deofdm {

void PhaseQuantization::validate() const {
    if (Q < 2) throw std::invalid_argument("Q < 2");
    if (L < Q || L % Q != 0) throw std::invalid_argument("L must be a positive multiple of Q");
}

DecomposedTrellis build_decomposed_trellis(const PhaseQuantization& q) {
    q.validate();
    const int L = q.L, Q = q.Q;
    const int stride = L / Q;

    DecomposedTrellis d;
    d.spec.num_states = L;
    d.spec.num_inputs = Q;
    d.spec.next.resize(static_cast<size_t>(L) * Q);
    for (int l = 0; l < L; ++l)
        for (int in = 0; in < Q; ++in)
            d.spec.next[l * Q + in] = (l + in * stride) % L;

    d.partition.L = L;
    d.partition.Q = Q;
    d.partition.states.resize(stride);
    for (int tau = 0; tau < stride; ++tau) {
        d.partition.states[tau].resize(Q);
        for (int p = 0; p < Q; ++p) d.partition.states[tau][p] = tau + p * stride;
    }
    return d;
}

double estimate_noise_variance(std::span<const cplx> null_tones) {
    if (null_tones.empty()) throw std::invalid_argument("no null tones");
    double acc = 0.0;
    for (const cplx& y : null_tones) acc += std::norm(y);
    return acc / static_cast<double>(null_tones.size());
}

double estimate_gain(std::span<const cplx> block, double sigma2_hat) {
    if (block.empty()) throw std::invalid_argument("empty block");
    double acc = 0.0;
    for (const cplx& y : block) acc += std::norm(y);
    const double power = acc / static_cast<double>(block.size()) - sigma2_hat;
    return power > 0.0 ? std::sqrt(power) : 0.0;
}

SubTrellisRun subtrellis_evidence(std::span<const cplx> Y_row, int tau,
                                  const PhaseQuantization& q, const ChannelEstimates& est,
                                  const SoftSeq& priors) {
    q.validate();
    const int Q = q.Q;
    const int stride = q.num_subtrellises();
    if (tau < 0 || tau >= stride) throw std::invalid_argument("tau out of range");
    if (est.sigma2_hat <= 0.0 || est.gain_hat < 0.0)
        throw std::invalid_argument("estimates out of range");
    if (Y_row.size() < 2) throw std::invalid_argument("row too short");
    const size_t N = Y_row.size() - 1;
    if (priors.arity != Q || priors.len != N) throw std::invalid_argument("prior shape mismatch");

    // sub-state p maps to global state tau + p*stride with phase 2pi*l/L
    std::vector<cplx> points(Q);
    for (int p = 0; p < Q; ++p)
        points[p] = est.gain_hat * std::polar(1.0, q.hypothesis(tau + p * stride));

    std::vector<double> lik(N * Q);
    for (size_t n = 1; n <= N; ++n)
        for (int p = 0; p < Q; ++p)
            lik[(n - 1) * Q + p] = log_floor(-std::norm(Y_row[n] - points[p]) / est.sigma2_hat);

    std::vector<double> a0(Q);
    for (int p = 0; p < Q; ++p)
        a0[p] = log_floor(-std::norm(Y_row[0] - points[p]) / est.sigma2_hat);

    const auto r = depsk_forward_backward(Q, N, lik.data(), priors.logp.data(), a0.data(),
                                          -std::log(static_cast<double>(q.L)));
    SubTrellisRun run;
    run.log_evidence = r.log_evidence;
    run.post = SoftSeq(Q, N, 0.0);
    run.post.logp = r.post;
    return run;
}

namespace {

// A starved sub-trellis means the hypothesis is numerically impossible given
// the floored metrics; it enters the mixture with zero posterior weight.
bool run_subtrellis(const std::vector<cplx>& row, int tau, const PhaseQuantization& q,
                    const ChannelEstimates& est, const SoftSeq& priors, SubTrellisRun& out) {
    try {
        out = subtrellis_evidence(row, tau, q, est, priors);
        return true;
    } catch (const std::runtime_error&) {
        out.log_evidence = -std::numeric_limits<double>::infinity();
        out.post = SoftSeq::uniform(q.Q, row.size() - 1);
        return false;
    }
}

}  // namespace

std::vector<double> phase_posterior_2d(const std::vector<std::vector<cplx>>& rows,
                                       const PhaseQuantization& q, const ChannelEstimates& est,
                                       const std::vector<SoftSeq>& priors_rows) {
    const int T = q.num_subtrellises();
    std::vector<double> logp(T, 0.0);
    SubTrellisRun run;
    for (size_t m = 0; m < rows.size(); ++m)
        for (int tau = 0; tau < T; ++tau) {
            run_subtrellis(rows[m], tau, q, est, priors_rows[m], run);
            logp[tau] += run.log_evidence;
        }
    if (!std::isfinite(log_sum_exp(logp))) throw std::runtime_error("trellis starvation");
    normalize_log(logp.data(), logp.size());
    return logp;
}

BlockDemodResult blind_demod_2d(const std::vector<std::vector<cplx>>& rows,
                                const PhaseQuantization& q, const ChannelEstimates& est,
                                const std::vector<SoftSeq>& priors_rows) {
    if (rows.empty()) throw std::invalid_argument("empty block");
    if (priors_rows.size() != rows.size()) throw std::invalid_argument("priors/rows mismatch");
    const int T = q.num_subtrellises();
    const int Q = q.Q;
    const size_t M = rows.size();
    const size_t N = rows[0].size() - 1;

    // one pass over all (row, tau) runs; evidence feeds the tau posterior,
    // conditional posteriors are mixed afterwards
    std::vector<std::vector<SubTrellisRun>> runs(M);
    std::vector<double> tau_post(T, 0.0);
    for (size_t m = 0; m < M; ++m) {
        if (rows[m].size() != N + 1) throw std::invalid_argument("ragged block rows");
        runs[m].resize(T);
        for (int tau = 0; tau < T; ++tau) {
            run_subtrellis(rows[m], tau, q, est, priors_rows[m], runs[m][tau]);
            tau_post[tau] += runs[m][tau].log_evidence;
        }
    }
    if (!std::isfinite(log_sum_exp(tau_post))) throw std::runtime_error("trellis starvation");
    normalize_log(tau_post.data(), tau_post.size());

    BlockDemodResult out;
    out.tau_log_post = tau_post;
    out.post_rows.reserve(M);
    for (size_t m = 0; m < M; ++m) {
        SoftSeq mix(Q, N, -std::numeric_limits<double>::infinity());
        for (int tau = 0; tau < T; ++tau) {
            const SoftSeq& cond = runs[m][tau].post;
            for (size_t n = 0; n < N; ++n) {
                double* dst = mix.at(n);
                const double* src = cond.at(n);
                for (int a = 0; a < Q; ++a)
                    dst[a] = log_sum_exp(dst[a], tau_post[tau] + src[a]);
            }
        }
        mix.normalize_all();
        out.post_rows.push_back(std::move(mix));
    }
    return out;
}

std::vector<TwoDBlock> tile_blocks(const OfdmFormat& fmt, size_t num_frames, int M, int N) {
    if (M < 1 || M > fmt.m_active) throw std::invalid_argument("M exceeds active subcarriers");
    if (N < 1 || N > fmt.n_data_syms) throw std::invalid_argument("N exceeds available frame symbols");
    std::vector<TwoDBlock> blocks;
    for (size_t f = 0; f < num_frames; ++f) {
        size_t n0 = 0;
        while (n0 < static_cast<size_t>(fmt.n_data_syms)) {
            const size_t stages = std::min<size_t>(N, fmt.n_data_syms - n0);
            size_t m0 = 0;
            while (m0 < static_cast<size_t>(fmt.m_active)) {
                const size_t rows = std::min<size_t>(M, fmt.m_active - m0);
                blocks.push_back({f, m0, rows, n0, stages});
                m0 += rows;
            }
            n0 += stages;
        }
    }
    return blocks;
}

namespace {

// flattened symbol position of data symbol (frame f, active row m, data col n)
inline size_t sym_pos(const OfdmFormat& fmt, size_t f, size_t m, size_t n_data) {
    return f * fmt.data_symbols_per_frame() + (n_data - 1) * fmt.m_active + m;
}

SoftSeq slice_priors(const SoftSeq& all, const OfdmFormat& fmt, const TwoDBlock& b, size_t r) {
    SoftSeq s(all.arity, b.stages, 0.0);
    for (size_t n = 0; n < b.stages; ++n) {
        const size_t pos = sym_pos(fmt, b.frame, b.m0 + r, b.n0 + 1 + n);
        std::copy(all.at(pos), all.at(pos) + all.arity, s.at(n));
    }
    return s;
}

void scatter_post(SoftSeq& all, const OfdmFormat& fmt, const TwoDBlock& b, size_t r,
                  const SoftSeq& post) {
    for (size_t n = 0; n < b.stages; ++n) {
        const size_t pos = sym_pos(fmt, b.frame, b.m0 + r, b.n0 + 1 + n);
        std::copy(post.at(n), post.at(n) + all.arity, all.at(pos));
    }
}

}  // namespace

TurboResult turbo_demod_decode(const std::vector<SymbolGrid>& frames, const OfdmFormat& fmt,
                               const TurboConfig& cfg,
                               const std::vector<ChannelRealization>* realizations) {
    fmt.validate();
    if (frames.empty()) throw std::invalid_argument("no frames");
    const size_t D = frames.size();
    const int Q = cfg.map.Q;
    if (cfg.mode == RxMode::perfect_csi && (!realizations || realizations->size() != D))
        throw std::invalid_argument("perfect-CSI mode requires one realization per frame");
    if (cfg.iterations < 0) throw std::invalid_argument("negative iteration count");

    const size_t total_syms = D * fmt.data_symbols_per_frame();
    const size_t Kc = total_syms * cfg.map.bits_per_symbol();
    if (cfg.perm.length() != Kc)
        throw std::invalid_argument("interleaver length != coded bits per super-frame");

    TurboResult result;

    std::vector<SymbolGrid> act(D);
    std::vector<double> sigma2_frame(D);
    for (size_t f = 0; f < D; ++f) {
        act[f] = extract_active(frames[f], fmt);
        if (cfg.mode == RxMode::blind) {
            const auto nulls = extract_null(frames[f], fmt);
            sigma2_frame[f] = std::max(estimate_noise_variance(nulls), cfg.sigma2_floor);
        } else {
            sigma2_frame[f] = std::max(cfg.sigma2_true, cfg.sigma2_floor);
        }
    }
    if (cfg.mode == RxMode::blind) result.sigma2_hat = sigma2_frame;

    const auto blocks = tile_blocks(fmt, D, cfg.M, cfg.N);
    PhaseQuantization pq{cfg.L, Q};
    if (cfg.mode == RxMode::blind) pq.validate();

    // frozen per-block gains (blind mode)
    std::vector<double> gains(blocks.size(), 0.0);
    if (cfg.mode == RxMode::blind) {
        std::vector<cplx> slab;
        for (size_t b = 0; b < blocks.size(); ++b) {
            const TwoDBlock& blk = blocks[b];
            slab.clear();
            for (size_t n = 0; n <= blk.stages; ++n)
                for (size_t r = 0; r < blk.rows; ++r)
                    slab.push_back(act[blk.frame].at(blk.m0 + r, blk.n0 + n));
            gains[b] = estimate_gain(slab, sigma2_frame[blk.frame]);
        }
    }

    SoftSeq sym_prior = SoftSeq::uniform(Q, total_syms);
    SoftSeq ext_dec_d = SoftSeq::uniform(2, Kc);  // decoder extrinsic on d

    std::vector<cplx> y_row, h_row;
    std::vector<std::vector<cplx>> rows;
    std::vector<SoftSeq> priors_rows;

    for (int it = 0; it <= cfg.iterations; ++it) {
        SoftSeq post_sym(Q, total_syms, 0.0);

        for (size_t b = 0; b < blocks.size(); ++b) {
            const TwoDBlock& blk = blocks[b];
            const SymbolGrid& A = act[blk.frame];

            if (cfg.mode == RxMode::blind) {
                rows.assign(blk.rows, {});
                priors_rows.clear();
                priors_rows.reserve(blk.rows);
                for (size_t r = 0; r < blk.rows; ++r) {
                    rows[r].resize(blk.stages + 1);
                    for (size_t n = 0; n <= blk.stages; ++n)
                        rows[r][n] = A.at(blk.m0 + r, blk.n0 + n);
                    priors_rows.push_back(slice_priors(sym_prior, fmt, blk, r));
                }
                const ChannelEstimates est{gains[b], sigma2_frame[blk.frame]};
                const auto res = blind_demod_2d(rows, pq, est, priors_rows);
                for (size_t r = 0; r < blk.rows; ++r)
                    scatter_post(post_sym, fmt, blk, r, res.post_rows[r]);
                if (it == 0) {
                    double h = 0.0;
                    for (double lp : res.tau_log_post) {
                        const double p = std::exp(lp);
                        if (p > 0.0) h -= p * lp;
                    }
                    result.blocks.push_back({blk.frame, blk.m0, blk.rows, blk.n0, blk.stages,
                                             gains[b], h / std::log(2.0)});
                }
            } else {
                const ChannelRealization& real = (*realizations)[blk.frame];
                const SegmentStart start{blk.n0 == 0 ? SegmentStart::known_reference
                                                     : SegmentStart::from_observation};
                y_row.resize(blk.stages + 1);
                h_row.resize(blk.stages + 1);
                for (size_t r = 0; r < blk.rows; ++r) {
                    const int full_row = fmt.active_set[blk.m0 + r];
                    for (size_t n = 0; n <= blk.stages; ++n) {
                        y_row[n] = A.at(blk.m0 + r, blk.n0 + n);
                        h_row[n] = real.H.at(full_row, blk.n0 + n);
                    }
                    const SoftSeq pri = slice_priors(sym_prior, fmt, blk, r);
                    const SoftSeq post = coherent_depsk_demod(y_row, h_row,
                                                              sigma2_frame[blk.frame], pri, Q, start);
                    scatter_post(post_sym, fmt, blk, r, post);
                }
            }
        }

        SoftSeq post_d = symbol_to_bit(post_sym, cfg.map);
        SoftSeq ext_dem_d = extrinsic_divide(post_d, ext_dec_d);
        SoftSeq ext_dem_c = deinterleave_soft(ext_dem_d, cfg.perm);
        SisoResult dec = conv_siso_decode(ext_dem_c, cfg.code);

        const size_t branches = Kc / cfg.code.rate_den();
        const size_t info_len = branches - cfg.code.memory();
        const auto hard = dec.info.harden();
        BitVec bits(info_len);
        for (size_t i = 0; i < info_len; ++i) bits[i] = static_cast<uint8_t>(hard[i]);
        result.decoded.push_back(std::move(bits));

        if (it < cfg.iterations) {
            SoftSeq ext_dec_c = extrinsic_divide(dec.coded, ext_dem_c);
            ext_dec_d = interleave_soft(ext_dec_c, cfg.perm);
            sym_prior = bit_to_symbol(ext_dec_d, cfg.map);
        }
    }
    return result;
}

}  // namespace deofdm
