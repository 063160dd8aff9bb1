#include "deofdm/trellis.hpp"

namespace deofdm {

void TrellisSpec::validate() const {
    if (num_states < 1 || num_inputs < 1) throw std::invalid_argument("bad trellis dimensions");
    if (next.size() != static_cast<size_t>(num_states) * num_inputs)
        throw std::invalid_argument("transition table size mismatch");
    for (int32_t t : next)
        if (t < 0 || t >= num_states) throw std::invalid_argument("transition out of range");
}

std::vector<std::vector<TrellisSpec::InEdge>> TrellisSpec::incoming() const {
    std::vector<std::vector<InEdge>> in(num_states);
    for (int s = 0; s < num_states; ++s)
        for (int q = 0; q < num_inputs; ++q) in[to(s, q)].push_back({s, q});
    return in;
}

TrellisSpec TrellisSpec::depsk(int Q) {
    TrellisSpec t;
    t.num_states = Q;
    t.num_inputs = Q;
    t.next.resize(static_cast<size_t>(Q) * Q);
    for (int s = 0; s < Q; ++s)
        for (int q = 0; q < Q; ++q) t.next[s * Q + q] = (s + q) % Q;
    return t;
}

TrellisSpec TrellisSpec::conv(const ConvCodeSpec& code) {
    code.validate();
    TrellisSpec t;
    t.num_states = code.num_states();
    t.num_inputs = 2;
    t.next.resize(static_cast<size_t>(t.num_states) * 2);
    for (int s = 0; s < t.num_states; ++s)
        for (int q = 0; q < 2; ++q) t.next[s * 2 + q] = static_cast<int32_t>(code.next_state(s, q));
    return t;
}

std::vector<double> BcjrResult::input_marginal(size_t stage) const {
    std::vector<double> out(num_inputs, kLogZero);
    const double* e = edge_post.data() + stage * num_states * num_inputs;
    for (int s = 0; s < num_states; ++s)
        for (int q = 0; q < num_inputs; ++q)
            out[q] = log_sum_exp(out[q], e[s * num_inputs + q]);
    normalize_log(out.data(), out.size());
    return out;
}

BcjrResult log_bcjr(const TrellisSpec& spec, std::span<const double> metrics,
                    std::span<const double> alpha0, std::span<const double> beta_end) {
    const int S = spec.num_states;
    const int I = spec.num_inputs;
    const size_t edges = static_cast<size_t>(S) * I;
    if (metrics.size() % edges != 0) throw std::invalid_argument("metric tensor size mismatch");
    const size_t N = metrics.size() / edges;
    if (alpha0.size() != static_cast<size_t>(S) || beta_end.size() != static_cast<size_t>(S))
        throw std::invalid_argument("boundary vector size mismatch");

    const auto in_edges = spec.incoming();

    // forward, renormalized per stage; constants accumulate into log_acc
    std::vector<double> alpha(static_cast<size_t>(N + 1) * S);
    double log_acc = 0.0;
    {
        std::vector<double> a0(alpha0.begin(), alpha0.end());
        for (double& x : a0) x = log_floor(x);
        log_acc += normalize_log(a0.data(), S);
        std::copy(a0.begin(), a0.end(), alpha.begin());
    }
    std::vector<double> work(S);
    const double ninf = -std::numeric_limits<double>::infinity();
    for (size_t n = 1; n <= N; ++n) {
        const double* g = metrics.data() + (n - 1) * edges;
        const double* ap = alpha.data() + (n - 1) * S;
        // a stage starves when no edge pairs a live source with a live metric
        bool alive = false;
        for (int j = 0; j < S; ++j) {
            double acc = ninf;
            for (const auto& e : in_edges[j]) {
                const double a = ap[e.from];
                const double m = g[e.from * I + e.input];
                acc = log_sum_exp(acc, a + m);
                alive = alive || (a > kLogZero && m > kLogZero);
            }
            work[j] = acc;
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        log_acc += normalize_log(work.data(), S);
        std::copy(work.begin(), work.end(), alpha.begin() + n * S);
    }

    // backward
    std::vector<double> beta(static_cast<size_t>(N + 1) * S);
    {
        std::vector<double> bN(beta_end.begin(), beta_end.end());
        for (double& x : bN) x = log_floor(x);
        normalize_log(bN.data(), S);
        std::copy(bN.begin(), bN.end(), beta.begin() + N * S);
    }
    for (size_t n = N; n >= 1; --n) {
        const double* g = metrics.data() + (n - 1) * edges;
        const double* bn = beta.data() + n * S;
        bool alive = false;
        for (int s = 0; s < S; ++s) {
            double acc = ninf;
            for (int q = 0; q < I; ++q) {
                const double m = g[s * I + q];
                const double b = bn[spec.to(s, q)];
                acc = log_sum_exp(acc, m + b);
                alive = alive || (m > kLogZero && b > kLogZero);
            }
            work[s] = acc;
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        normalize_log(work.data(), S);
        std::copy(work.begin(), work.end(), beta.begin() + (n - 1) * S);
    }

    BcjrResult r;
    r.num_stages = N;
    r.num_states = S;
    r.num_inputs = I;
    r.edge_post.resize(N * edges);
    for (size_t n = 1; n <= N; ++n) {
        const double* g = metrics.data() + (n - 1) * edges;
        const double* ap = alpha.data() + (n - 1) * S;
        const double* bn = beta.data() + n * S;
        double* e = r.edge_post.data() + (n - 1) * edges;
        for (int s = 0; s < S; ++s)
            for (int q = 0; q < I; ++q)
                e[s * I + q] = ap[s] + g[s * I + q] + bn[spec.to(s, q)];
        normalize_log(e, edges);
    }

    // evidence uses the un-normalized terminal beta weights
    {
        const double* aN = alpha.data() + N * S;
        double ev = kLogZero;
        for (int s = 0; s < S; ++s) ev = log_sum_exp(ev, aN[s] + log_floor(beta_end[s]));
        r.log_evidence = ev + log_acc;
    }
    return r;
}

DepskFbResult depsk_forward_backward(int Q, size_t N, const double* lik, const double* prior,
                                     const double* alpha0, double log_beta_const) {
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> alpha(static_cast<size_t>(N + 1) * Q);
    std::vector<double> work(Q), beta(Q, 0.0), tmp(Q);

    double acc = 0.0;
    {
        double m = ninf;
        for (int j = 0; j < Q; ++j) {
            alpha[j] = log_floor(alpha0[j]);
            m = std::max(m, alpha[j]);
        }
        for (int j = 0; j < Q; ++j) alpha[j] = log_floor(alpha[j] - m);
        acc += m;
    }

    // forward, renormalized by the stage maximum
    for (size_t n = 1; n <= N; ++n) {
        const double* ln = lik + (n - 1) * Q;
        const double* pn = prior + (n - 1) * Q;
        const double* ap = alpha.data() + (n - 1) * Q;
        double* an = alpha.data() + n * Q;
        bool alive = false;
        double m = ninf;
        for (int j = 0; j < Q; ++j) {
            double s = ninf;
            for (int q = 0; q < Q; ++q) {
                const double a = ap[(j - q + Q) % Q];
                s = log_sum_exp(s, a + pn[q]);
                alive = alive || (a > kLogZero && ln[j] + pn[q] > kLogZero);
            }
            an[j] = ln[j] + s;
            m = std::max(m, an[j]);
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        for (int j = 0; j < Q; ++j) an[j] = log_floor(an[j] - m);
        acc += m;
    }

    DepskFbResult r;
    r.post.resize(N * Q);
    r.log_evidence = acc + log_sum_exp(alpha.data() + N * Q, Q) + log_beta_const;

    // backward, emitting the input marginal of each stage on the way
    for (size_t n = N; n >= 1; --n) {
        const double* ln = lik + (n - 1) * Q;
        const double* pn = prior + (n - 1) * Q;
        const double* ap = alpha.data() + (n - 1) * Q;
        for (int j = 0; j < Q; ++j) tmp[j] = ln[j] + beta[j];
        double* out = r.post.data() + (n - 1) * Q;
        for (int q = 0; q < Q; ++q) {
            double s = ninf;
            for (int src = 0; src < Q; ++src)
                s = log_sum_exp(s, ap[src] + tmp[(src + q) % Q]);
            out[q] = s + pn[q];
        }
        normalize_log(out, Q);
        if (n == 1) break;

        bool alive = false;
        double m = ninf;
        for (int s = 0; s < Q; ++s) {
            double acc_b = ninf;
            for (int q = 0; q < Q; ++q) {
                const double g = ln[(s + q) % Q] + pn[q];
                acc_b = log_sum_exp(acc_b, g + beta[(s + q) % Q]);
                alive = alive || (g > kLogZero && beta[(s + q) % Q] > kLogZero);
            }
            work[s] = acc_b;
            m = std::max(m, acc_b);
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        for (int s = 0; s < Q; ++s) beta[s] = log_floor(work[s] - m);
    }
    return r;
}

SoftSeq coherent_depsk_demod(std::span<const cplx> Y_row, std::span<const cplx> H_row,
                             double sigma2, const SoftSeq& priors, int Q,
                             SegmentStart start) {
    if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
    if (Y_row.size() != H_row.size() || Y_row.size() < 2)
        throw std::invalid_argument("observation/channel row mismatch");
    const size_t N = Y_row.size() - 1;
    if (priors.arity != Q || priors.len != N) throw std::invalid_argument("prior shape mismatch");

    std::vector<cplx> constel(Q);
    for (int i = 0; i < Q; ++i) constel[i] = std::polar(1.0, 2.0 * kPi * i / Q);

    // likelihood of the destination symbol per stage
    std::vector<double> lik(N * Q);
    for (size_t n = 1; n <= N; ++n)
        for (int j = 0; j < Q; ++j)
            lik[(n - 1) * Q + j] = log_floor(-std::norm(Y_row[n] - H_row[n] * constel[j]) / sigma2);

    std::vector<double> a0(Q, kLogZero);
    if (start.kind == SegmentStart::known_reference) {
        a0[0] = 0.0;
    } else {
        for (int j = 0; j < Q; ++j)
            a0[j] = log_floor(-std::norm(Y_row[0] - H_row[0] * constel[j]) / sigma2);
    }

    const auto r = depsk_forward_backward(Q, N, lik.data(), priors.logp.data(), a0.data(),
                                          -std::log(static_cast<double>(Q)));
    SoftSeq out(Q, N, 0.0);
    out.logp = r.post;
    return out;
}

SisoResult conv_siso_decode(const SoftSeq& coded_likelihoods, const ConvCodeSpec& code) {
    code.validate();
    const int den = code.rate_den();
    if (coded_likelihoods.arity != 2) throw std::invalid_argument("coded likelihoods must be binary");
    if (coded_likelihoods.len % den != 0)
        throw std::invalid_argument("coded length not divisible by code rate");
    const size_t branches = coded_likelihoods.len / den;
    const int mem = code.memory();
    if (branches < static_cast<size_t>(mem)) throw std::invalid_argument("codeword shorter than tail");

    const int S = code.num_states();
    const double ninf = -std::numeric_limits<double>::infinity();

    // per-(state, input) tables
    std::vector<int32_t> nxt(static_cast<size_t>(S) * 2);
    std::vector<uint32_t> outb(static_cast<size_t>(S) * 2);
    for (int s = 0; s < S; ++s)
        for (int q = 0; q < 2; ++q) {
            nxt[s * 2 + q] = static_cast<int32_t>(code.next_state(s, q));
            outb[s * 2 + q] = code.branch_output(s, q);
        }
    // exactly two incoming edges per state for a binary-input shift register
    std::vector<int32_t> in_from(static_cast<size_t>(S) * 2);
    std::vector<int32_t> in_q(static_cast<size_t>(S) * 2);
    {
        std::vector<int> fill(S, 0);
        for (int s = 0; s < S; ++s)
            for (int q = 0; q < 2; ++q) {
                const int j = nxt[s * 2 + q];
                in_from[j * 2 + fill[j]] = s;
                in_q[j * 2 + fill[j]] = q;
                ++fill[j];
            }
    }

    // branch metric = sum of coded-bit log-likelihoods on the branch;
    // tail branches admit only input 0 (zero-tail termination)
    std::vector<double> gamma(branches * S * 2);
    for (size_t b = 0; b < branches; ++b) {
        const bool tail = b >= branches - mem;
        double* g = gamma.data() + b * S * 2;
        for (int s = 0; s < S; ++s)
            for (int q = 0; q < 2; ++q) {
                if (tail && q != 0) {
                    g[s * 2 + q] = kLogZero;
                    continue;
                }
                const uint32_t out = outb[s * 2 + q];
                double acc = 0.0;
                for (int gi = 0; gi < den; ++gi)
                    acc += coded_likelihoods.at(b * den + gi)[(out >> (den - 1 - gi)) & 1u];
                g[s * 2 + q] = log_floor(acc);
            }
    }

    // forward, max-renormalized
    std::vector<double> alpha(static_cast<size_t>(branches + 1) * S, kLogZero);
    alpha[0] = 0.0;
    for (size_t b = 0; b < branches; ++b) {
        const double* g = gamma.data() + b * S * 2;
        const double* ap = alpha.data() + b * S;
        double* an = alpha.data() + (b + 1) * S;
        bool alive = false;
        double m = ninf;
        for (int j = 0; j < S; ++j) {
            const double a0 = ap[in_from[j * 2 + 0]] + g[in_from[j * 2 + 0] * 2 + in_q[j * 2 + 0]];
            const double a1 = ap[in_from[j * 2 + 1]] + g[in_from[j * 2 + 1] * 2 + in_q[j * 2 + 1]];
            const double v = log_sum_exp(a0, a1);
            alive = alive || (ap[in_from[j * 2 + 0]] > kLogZero &&
                              g[in_from[j * 2 + 0] * 2 + in_q[j * 2 + 0]] > kLogZero) ||
                    (ap[in_from[j * 2 + 1]] > kLogZero &&
                     g[in_from[j * 2 + 1] * 2 + in_q[j * 2 + 1]] > kLogZero);
            an[j] = v;
            m = std::max(m, v);
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        for (int j = 0; j < S; ++j) an[j] = log_floor(an[j] - m);
    }

    SisoResult res;
    res.info = SoftSeq(2, branches, 0.0);
    res.coded = SoftSeq(2, coded_likelihoods.len, 0.0);

    // backward with in-place marginalization per stage: edge masses are
    // grouped in the linear domain by input bit and by each coded bit
    std::vector<double> beta(S, kLogZero), work(S), w(static_cast<size_t>(S) * 2);
    beta[0] = 0.0;  // zero-tail termination
    std::vector<double> ginfo(2), gcode(static_cast<size_t>(den) * 2);
    for (size_t b = branches; b >= 1; --b) {
        const size_t bi = b - 1;
        const double* g = gamma.data() + bi * S * 2;
        const double* ap = alpha.data() + bi * S;

        double m = ninf;
        for (int s = 0; s < S; ++s)
            for (int q = 0; q < 2; ++q) {
                const double v = ap[s] + g[s * 2 + q] + beta[nxt[s * 2 + q]];
                w[s * 2 + q] = v;
                m = std::max(m, v);
            }
        std::fill(ginfo.begin(), ginfo.end(), 0.0);
        std::fill(gcode.begin(), gcode.end(), 0.0);
        for (int s = 0; s < S; ++s)
            for (int q = 0; q < 2; ++q) {
                const double lw = std::exp(w[s * 2 + q] - m);
                ginfo[q] += lw;
                const uint32_t out = outb[s * 2 + q];
                for (int gi = 0; gi < den; ++gi) gcode[gi * 2 + ((out >> (den - 1 - gi)) & 1u)] += lw;
            }
        const double tot = ginfo[0] + ginfo[1];
        res.info.at(bi)[0] = log_floor(std::log(ginfo[0] / tot));
        res.info.at(bi)[1] = log_floor(std::log(ginfo[1] / tot));
        for (int gi = 0; gi < den; ++gi) {
            const double t2 = gcode[gi * 2] + gcode[gi * 2 + 1];
            res.coded.at(bi * den + gi)[0] = log_floor(std::log(gcode[gi * 2] / t2));
            res.coded.at(bi * den + gi)[1] = log_floor(std::log(gcode[gi * 2 + 1] / t2));
        }

        if (bi == 0) break;
        bool alive = false;
        double mb = ninf;
        for (int s = 0; s < S; ++s) {
            const double b0 = g[s * 2 + 0] + beta[nxt[s * 2 + 0]];
            const double b1 = g[s * 2 + 1] + beta[nxt[s * 2 + 1]];
            const double v = log_sum_exp(b0, b1);
            alive = alive || (g[s * 2 + 0] > kLogZero && beta[nxt[s * 2 + 0]] > kLogZero) ||
                    (g[s * 2 + 1] > kLogZero && beta[nxt[s * 2 + 1]] > kLogZero);
            work[s] = v;
            mb = std::max(mb, v);
        }
        if (!alive) throw std::runtime_error("trellis starvation");
        for (int s = 0; s < S; ++s) beta[s] = log_floor(work[s] - mb);
    }
    return res;
}

SoftSeq symbol_to_bit(const SoftSeq& symbols, const PskMapSpec& map) {
    if (symbols.arity != map.Q) throw std::invalid_argument("arity != Q");
    const int bps = map.bits_per_symbol();
    SoftSeq bits(2, symbols.len * bps, 0.0);
    for (size_t t = 0; t < symbols.len; ++t) {
        const double* ps = symbols.at(t);
        for (int b = 0; b < bps; ++b) {
            double acc[2] = {kLogZero, kLogZero};
            for (int i = 0; i < map.Q; ++i) {
                const int bit = (map.labels[i] >> (bps - 1 - b)) & 1u;
                acc[bit] = log_sum_exp(acc[bit], ps[i]);
            }
            double* dst = bits.at(t * bps + b);
            dst[0] = acc[0];
            dst[1] = acc[1];
            normalize_log(dst, 2);
        }
    }
    return bits;
}

SoftSeq bit_to_symbol(const SoftSeq& bits, const PskMapSpec& map) {
    const int bps = map.bits_per_symbol();
    if (bits.arity != 2 || bits.len % bps != 0) throw std::invalid_argument("bad bit message shape");
    SoftSeq symbols(map.Q, bits.len / bps, 0.0);
    for (size_t t = 0; t < symbols.len; ++t) {
        double* ps = symbols.at(t);
        for (int i = 0; i < map.Q; ++i) {
            double acc = 0.0;
            for (int b = 0; b < bps; ++b) {
                const int bit = (map.labels[i] >> (bps - 1 - b)) & 1u;
                acc += bits.at(t * bps + b)[bit];
            }
            ps[i] = log_floor(acc);
        }
        normalize_log(ps, map.Q);
    }
    return symbols;
}

SoftSeq extrinsic_divide(const SoftSeq& joint, const SoftSeq& prior) {
    if (joint.arity != prior.arity || joint.len != prior.len)
        throw std::invalid_argument("extrinsic_divide: shape mismatch");
    SoftSeq out(joint.arity, joint.len, 0.0);
    for (size_t t = 0; t < joint.len; ++t) {
        const double* j = joint.at(t);
        const double* p = prior.at(t);
        double* o = out.at(t);
        for (int k = 0; k < joint.arity; ++k) o[k] = log_floor(j[k] - p[k]);
        normalize_log(o, joint.arity);
    }
    return out;
}

}  // namespace deofdm
