// Acceptance suite: one pass/fail line per criterion.
//
//   1  BCJR posteriors equal exhaustive path enumeration (1e-9)
//   2  2D blind demod with M=1 equals the flat L-state trellis (1e-9)
//   3  iterative gain over AWGN with perfect CSI (~2 dB at N=4, ~3 dB at N=10)
//   4  blind phase quantization: L=8 > L=4, L=32 ~ L=64, M=64 near CSI
//   5  fully blind receiver over TU6: block-size ordering and CSI gap
//   6  blind noise-variance and gain estimator accuracy
//   7  structural invariants and the noiseless end-to-end smoke test
//
// 1, 2, 6, 7 run in seconds; 3-5 are Monte Carlo BER reproductions and take
// tens of minutes. Use --only 1,2,6,7 to skip the long ones.
#include <cstring>
#include <iostream>
#include <sstream>

#include "deofdm/harness.hpp"
#include "oracles.hpp"

using namespace deofdm;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << " [" << name << "]: " << (pass ? "PASS" : "FAIL");
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

std::string fmt1(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// criterion 1: oracle equivalence
// ---------------------------------------------------------------------------

bool depsk_trellis_vs_enumeration(Rng& rng, size_t N) {
    const auto spec = TrellisSpec::depsk(4);
    std::vector<double> metrics(N * 16), a0(4), bN(4);
    for (auto& v : metrics) v = -6.0 * rng.uniform();
    for (auto& v : a0) v = -2.0 * rng.uniform();
    for (auto& v : bN) v = -2.0 * rng.uniform();
    const auto r = log_bcjr(spec, metrics, a0, bN);
    const auto ref = oracle::enumerate_paths(
        4, 4, [&](int s, int q) { return spec.to(s, q); }, metrics, a0, bN);
    for (size_t n = 0; n < N; ++n)
        if (oracle::max_rel_err_logp(r.edge_post.data() + n * 16, ref.edge_post.data() + n * 16,
                                     16) > 1e-9)
            return false;
    return oracle::close_rel(r.log_evidence, ref.log_evidence, 1e-9);
}

bool conv_vs_enumeration(Rng& rng) {
    const auto code = ConvCodeSpec::k7_133_171();
    const size_t k = 10, coded_len = 2 * (k + 6);
    std::vector<std::array<double, 2>> lik(coded_len);
    SoftSeq soft(2, coded_len, 0.0);
    for (size_t j = 0; j < coded_len; ++j) {
        const double u = 0.05 + 0.9 * rng.uniform();
        lik[j] = {u, 1.0 - u};
        soft.at(j)[0] = std::log(u);
        soft.at(j)[1] = std::log(1.0 - u);
    }
    const auto dec = conv_siso_decode(soft, code);
    const auto ref = oracle::enumerate_messages(k, lik);
    for (size_t j = 0; j < k; ++j)
        if (!oracle::close_rel(std::exp(dec.info.at(j)[1]), ref.info_p1[j], 1e-9)) return false;
    for (size_t j = 0; j < coded_len; ++j)
        if (!oracle::close_rel(std::exp(dec.coded.at(j)[1]), ref.coded_p1[j], 1e-9)) return false;
    return true;
}

const PskMapSpec kMap = PskMapSpec::qpsk_gray();

struct BlindRow {
    std::vector<cplx> Y;
    std::vector<int> a;
};

BlindRow make_row(Rng& rng, size_t N, double gain, double phi, double sigma2) {
    BlindRow row;
    row.Y.resize(N + 1);
    row.a.resize(N);
    const cplx h = std::polar(gain, phi);
    cplx x(1.0, 0.0);
    for (size_t n = 0; n <= N; ++n) {
        if (n) {
            row.a[n - 1] = static_cast<int>(rng.bounded(4));
            x *= kMap.points[row.a[n - 1]];
        }
        row.Y[n] = h * x + (sigma2 > 0 ? rng.cgaussian(sigma2) : cplx(0, 0));
    }
    return row;
}

SoftSeq random_priors(Rng& rng, size_t N) {
    SoftSeq p(4, N, 0.0);
    for (size_t n = 0; n < N; ++n) {
        for (int q = 0; q < 4; ++q) p.at(n)[q] = std::log(0.05 + rng.uniform());
        normalize_log(p.at(n), 4);
    }
    return p;
}

// exhaustive evidence + marginals inside one sub-trellis (probability domain)
bool subtrellis_vs_enumeration(Rng& rng, int L, size_t N) {
    const PhaseQuantization pq{L, 4};
    const int stride = L / 4;
    const auto row = make_row(rng, N, 1.0, 2.0 * kPi * rng.uniform(), 0.5);
    const ChannelEstimates est{0.9 + 0.2 * rng.uniform(), 0.5};
    const auto priors = random_priors(rng, N);

    for (int tau = 0; tau < stride; ++tau) {
        const auto run = subtrellis_evidence(row.Y, tau, pq, est, priors);

        std::vector<std::vector<double>> marg(N, std::vector<double>(4, 0.0));
        double total = 0.0;
        std::vector<int> a(N, 0);
        for (int p0 = 0; p0 < 4; ++p0) {
            std::fill(a.begin(), a.end(), 0);
            for (;;) {
                double logw = -std::norm(row.Y[0] - est.gain_hat * std::polar(1.0, pq.hypothesis(
                                                                       tau + p0 * stride))) /
                              est.sigma2_hat;
                int p = p0;
                for (size_t n = 0; n < N; ++n) {
                    p = (p + a[n]) % 4;
                    logw += -std::norm(row.Y[n + 1] -
                                       est.gain_hat *
                                           std::polar(1.0, pq.hypothesis(tau + p * stride))) /
                            est.sigma2_hat;
                    logw += priors.at(n)[a[n]];
                }
                const double w = std::exp(logw) / L;
                total += w;
                for (size_t n = 0; n < N; ++n) marg[n][a[n]] += w;
                size_t pos = 0;
                while (pos < N && ++a[pos] == 4) a[pos++] = 0;
                if (pos == N) break;
            }
        }
        if (!oracle::close_rel(run.log_evidence, std::log(total), 1e-9)) return false;
        for (size_t n = 0; n < N; ++n) {
            for (double& v : marg[n]) v /= total;
            if (oracle::max_rel_err_logp(run.post.at(n), marg[n].data(), 4) > 1e-9) return false;
        }
    }
    return true;
}

bool criterion1() {
    Rng rng(1001);
    for (size_t N : {2u, 4u, 6u})
        for (int t = 0; t < 8; ++t)
            if (!depsk_trellis_vs_enumeration(rng, N)) return false;
    for (int t = 0; t < 8; ++t)
        if (!conv_vs_enumeration(rng)) return false;
    for (int L : {8, 16})
        for (size_t N : {2u, 4u})
            for (int t = 0; t < 5; ++t)
                if (!subtrellis_vs_enumeration(rng, L, N)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// criterion 2: decomposition exactness
// ---------------------------------------------------------------------------

bool criterion2() {
    Rng rng(1002);
    const int L = 8, Q = 4, stride = L / Q;
    const PhaseQuantization pq{L, Q};
    const auto d = build_decomposed_trellis(pq);

    for (int trial = 0; trial < 100; ++trial) {
        const size_t N = 3 + rng.bounded(4);
        const auto row = make_row(rng, N, 1.0, 2.0 * kPi * rng.uniform(), 0.5);
        const ChannelEstimates est{0.9 + 0.2 * rng.uniform(), 0.5};
        const auto priors = random_priors(rng, N);

        std::vector<double> metrics(N * L * Q), lik(L);
        for (size_t n = 1; n <= N; ++n) {
            for (int l = 0; l < L; ++l)
                lik[l] = -std::norm(row.Y[n] - est.gain_hat * std::polar(1.0, pq.hypothesis(l))) /
                         est.sigma2_hat;
            double* g = metrics.data() + (n - 1) * L * Q;
            for (int s = 0; s < L; ++s)
                for (int q = 0; q < Q; ++q)
                    g[s * Q + q] = lik[(s + q * stride) % L] + priors.at(n - 1)[q];
        }
        std::vector<double> a0(L), bN(L, -std::log(static_cast<double>(L)));
        for (int l = 0; l < L; ++l)
            a0[l] = -std::norm(row.Y[0] - est.gain_hat * std::polar(1.0, pq.hypothesis(l))) /
                    est.sigma2_hat;
        const auto flat = log_bcjr(d.spec, metrics, a0, bN);
        const auto mix = blind_demod_2d({row.Y}, pq, est, {priors});

        for (size_t n = 0; n < N; ++n) {
            const auto flat_marg = flat.input_marginal(n);
            for (int q = 0; q < Q; ++q)
                if (!oracle::close_rel(std::exp(flat_marg[q]), std::exp(mix.post_rows[0].at(n)[q]),
                                       1e-9))
                    return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// criterion 6: estimator accuracy
// ---------------------------------------------------------------------------

bool criterion6(std::string& detail) {
    Rng rng(1012);
    bool pass = true;

    // sigma2 from 10240 null tones: per-draw accuracy at three noise levels,
    // plus the mean absolute error over 50 draws (estimator sd at this size
    // is 0.99%, so the 2% bound is a ~2-sigma statement per draw)
    double worst_sigma = 0.0;
    for (double sigma2 : {1.0, 0.3, 0.1}) {
        std::vector<cplx> tones(10240);
        for (auto& v : tones) v = rng.cgaussian(sigma2);
        const double rel = std::abs(estimate_noise_variance(tones) - sigma2) / sigma2;
        worst_sigma = std::max(worst_sigma, rel);
    }
    pass = pass && worst_sigma < 0.02;

    double mean_abs = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<cplx> tones(10240);
        for (auto& v : tones) v = rng.cgaussian(0.5);
        mean_abs += std::abs(estimate_noise_variance(tones) - 0.5) / 0.5;
    }
    pass = pass && mean_abs / 50 < 0.01;

    // gain on 64x8 blocks at 10 dB over 1000 trials
    const double sigma2 = snr_to_sigma2(10.0);
    double acc = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> block(64 * 9);
        for (auto& v : block)
            v = std::polar(1.0, 2.0 * kPi * rng.uniform()) + rng.cgaussian(sigma2);
        acc += estimate_gain(block, sigma2);
    }
    const double gain_rel = std::abs(acc / trials - 1.0);
    pass = pass && gain_rel < 0.05;

    detail = "sigma2 rel err " + fmt1(worst_sigma * 100) + "%, gain rel err " +
             fmt1(gain_rel * 100) + "%";
    return pass;
}

// ---------------------------------------------------------------------------
// criterion 7: structural invariants
// ---------------------------------------------------------------------------

bool criterion7(std::string& detail) {
    Rng rng(1007);

    // sub-trellis closure for all supported L
    for (int L : {4, 8, 16, 32, 64}) {
        const auto d = build_decomposed_trellis({L, 4});
        const int stride = L / 4;
        for (int s = 0; s < L; ++s)
            for (int q = 0; q < 4; ++q)
                if (d.spec.to(s, q) % stride != s % stride) {
                    detail = "closure violated at L=" + std::to_string(L);
                    return false;
                }
    }

    // OFDM round trip
    for (const auto& fmt : {OfdmFormat::toy(), OfdmFormat::mode1()}) {
        SymbolGrid g(fmt.m_fft, fmt.cols());
        for (auto& v : g.v) v = {rng.gaussian(), rng.gaussian()};
        const auto rx = ofdm_demodulate(ofdm_modulate(g, fmt), fmt);
        double worst = 0.0;
        for (size_t i = 0; i < g.v.size(); ++i)
            worst = std::max(worst, std::abs(rx.v[i] - g.v[i]));
        if (worst > 1e-9) {
            detail = "OFDM round trip error " + std::to_string(worst);
            return false;
        }
    }

    // Y = H (x) X for a time-invariant TU6 within the cyclic prefix
    {
        const auto fmt = OfdmFormat::toy();
        const auto prof = Tu6Profile::cost207(0.0);
        SymbolGrid g(fmt.m_active, fmt.cols());
        for (auto& v : g.v) v = std::polar(1.0, 2.0 * kPi * rng.uniform());
        const auto full = place_subcarriers(g, fmt);
        auto tx = ofdm_modulate(full, fmt);
        const auto real = apply_tu6(tx, prof, fmt, rng.next_u64());
        const auto Y = ofdm_demodulate(tx, fmt);
        double worst = 0.0;
        for (int n = 0; n < fmt.cols(); ++n)
            for (int m = 0; m < fmt.m_fft; ++m)
                worst = std::max(worst, std::abs(Y.at(m, n) - real.H.at(m, n) * full.at(m, n)));
        if (worst > 1e-8) {
            detail = "post-DFT model residual " + std::to_string(worst);
            return false;
        }
    }

    // zero-BER smoke test at sigma2 = 1e-12 through the full pipeline
    SimConfig cfg;
    cfg.format = "toy";
    cfg.channel = "awgn";
    cfg.iterations = 2;
    cfg.workers = 1;
    cfg.L = 32;
    cfg.M = 16;
    cfg.N = 10;
    for (const char* mode : {"perfect-csi", "blind"}) {
        cfg.mode = mode;
        const auto r = run_trial(cfg, 120.0, 0);
        for (uint64_t e : r.errors)
            if (e != 0) {
                detail = std::string("smoke errors in mode ") + mode;
                return false;
            }
    }
    detail = "closure, round trip, post-DFT model, noiseless smoke";
    return true;
}

// ---------------------------------------------------------------------------
// BER measurement helpers for criteria 3-5
// ---------------------------------------------------------------------------

struct Curve {
    std::vector<double> snr;
    std::vector<double> ber;  // same length
};

Curve curve_at_iteration(const std::vector<BerRecord>& recs, int iteration) {
    Curve c;
    for (const auto& r : recs)
        if (r.iteration == iteration) {
            c.snr.push_back(r.snr_db);
            c.ber.push_back(r.ber());
        }
    return c;
}

std::vector<BerRecord> run_sweep(SimConfig cfg) {
    cfg.validate();
    return sweep(cfg);
}

SimConfig fig_base() {
    SimConfig c;
    c.format = "toy";
    c.iterations = 3;
    c.num_runs = 700;
    c.es_errors = 200;
    c.es_min_frames = 30;
    c.master_seed = 17;
    return c;
}

uint64_t info_bits_per_frame(const SimConfig& cfg) {
    const OfdmFormat fmt = cfg.make_format();
    return fmt.data_symbols_per_frame() * 2 / 2 - 6;
}

struct PointResult {
    double ber = 1.0;
    uint64_t errors = 0;
    uint64_t bits = 0;
};

// BER of one iteration curve at one SNR: accumulates frames until the curve
// has err_target errors or bits_cap information bits have been observed.
PointResult measure_point(SimConfig cfg, double snr, int iteration, uint64_t err_target,
                          uint64_t bits_cap) {
    cfg.snr_db = {snr};
    cfg.early_stop = true;
    cfg.es_errors = static_cast<int>(err_target);
    cfg.es_iteration = iteration;
    cfg.es_min_frames = 8;
    cfg.num_runs = static_cast<int>((bits_cap + info_bits_per_frame(cfg) - 1) /
                                    info_bits_per_frame(cfg));
    const auto recs = run_sweep(cfg);
    for (const auto& r : recs)
        if (r.iteration == iteration) return {r.ber(), r.bit_errors, r.bits};
    return {};
}

// SNR at which an iteration curve crosses the target BER, located by
// bisection to a 0.125 dB bracket and interpolated log-linearly. The
// waterfalls at desk scale drop several decades per 0.5 dB, so fixed grids
// cannot bracket the crossing with meaningful error counts.
double find_crossing(const SimConfig& base, int iteration, double target, double lo, double hi,
                     std::string& err) {
    const uint64_t bits_cap = static_cast<uint64_t>(3.0 * 200.0 / target);
    auto meas = [&](double snr) { return measure_point(base, snr, iteration, 200, bits_cap); };

    PointResult plo = meas(lo);
    for (int guard = 0; plo.ber < target && guard < 2; ++guard) {
        lo -= 1.0;
        plo = meas(lo);
    }
    PointResult phi = meas(hi);
    for (int guard = 0; phi.ber >= target && guard < 2; ++guard) {
        hi += 1.0;
        phi = meas(hi);
    }
    if (plo.ber < target || phi.ber >= target) {
        err = "could not bracket BER " + std::to_string(target) + " in [" + fmt1(lo) + ", " +
              fmt1(hi) + "]";
        return std::numeric_limits<double>::quiet_NaN();
    }
    while (hi - lo > 0.1251) {
        const double mid = 0.5 * (lo + hi);
        const PointResult pm = meas(mid);
        if (pm.ber >= target) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
            phi = pm;
        }
    }
    // log-linear interpolation inside the final bracket; an error-free end
    // is read as half an error over its observed bits
    const double b0 = plo.ber;
    const double b1 = std::max(phi.ber, 0.5 / static_cast<double>(phi.bits));
    const double t = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
    return lo + std::min(1.0, std::max(0.0, t)) * (hi - lo);
}

// ---------------------------------------------------------------------------
// criterion 3: iterative gain over AWGN with perfect CSI
// ---------------------------------------------------------------------------

double g_csi_n10_it3_crossing = std::numeric_limits<double>::quiet_NaN();

double csi_n10_it3_crossing(std::string& err) {
    if (std::isnan(g_csi_n10_it3_crossing)) {
        SimConfig c = fig_base();
        c.channel = "awgn";
        c.mode = "perfect-csi";
        c.N = 10;
        g_csi_n10_it3_crossing = find_crossing(c, 3, 1e-4, 2.0, 4.0, err);
    }
    return g_csi_n10_it3_crossing;
}

bool criterion3(std::string& detail) {
    std::string err;
    SimConfig c = fig_base();
    c.channel = "awgn";
    c.mode = "perfect-csi";

    c.N = 10;
    const double s0_n10 = find_crossing(c, 0, 1e-4, 4.0, 6.5, err);
    const double s3_n10 = csi_n10_it3_crossing(err);
    c.N = 4;
    const double s0_n4 = find_crossing(c, 0, 1e-4, 4.0, 7.0, err);
    const double s3_n4 = find_crossing(c, 3, 1e-4, 2.5, 4.5, err);

    const double gain10 = s0_n10 - s3_n10;
    const double gain4 = s0_n4 - s3_n4;
    detail = "gain N=10: " + fmt1(gain10) + " dB (it0 " + fmt1(s0_n10) + " -> it3 " +
             fmt1(s3_n10) + "), N=4: " + fmt1(gain4) + " dB (it0 " + fmt1(s0_n4) + " -> it3 " +
             fmt1(s3_n4) + ")";
    if (std::isnan(gain10) || std::isnan(gain4)) {
        detail += "; " + err;
        return false;
    }
    return std::abs(gain10 - 3.0) <= 0.5 && std::abs(gain4 - 2.0) <= 0.5 && gain10 > gain4;
}

// ---------------------------------------------------------------------------
// criterion 4: blind receiver under a random frame-constant phase
// ---------------------------------------------------------------------------

bool criterion4(std::string& detail) {
    std::string err;

    // (a) L=8 strictly better than L=4 at every SNR in 3..6 dB (paired seeds)
    SimConfig c = fig_base();
    c.channel = "block-phase";
    c.mode = "blind";
    c.M = 1;
    c.N = 10;
    c.num_runs = 400;
    c.snr_db = {3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};

    c.L = 4;
    const auto rec_l4 = run_sweep(c);
    c.L = 8;
    const auto rec_l8 = run_sweep(c);
    const Curve c4 = curve_at_iteration(rec_l4, 3), c8 = curve_at_iteration(rec_l8, 3);
    bool a_pass = true;
    for (size_t i = 0; i < c4.snr.size(); ++i)
        a_pass = a_pass && c8.ber[i] < c4.ber[i];

    // (b) L=32 within 0.2 dB of L=64 at BER 1e-4 (M=1)
    c.L = 32;
    const double s32 = find_crossing(c, 3, 1e-4, 3.0, 5.5, err);
    c.L = 64;
    const double s64 = find_crossing(c, 3, 1e-4, 3.0, 5.5, err);
    const bool b_pass = !std::isnan(s32) && !std::isnan(s64) && std::abs(s32 - s64) <= 0.2;

    // (c) L=32, M=64 within 0.3 dB of the perfect-CSI crossing at BER 1e-4.
    // The CSI reference is the AWGN N=10 curve: the coherent demodulator is
    // invariant to a common rotation of (Y, H), so its BER under the
    // frame-constant phase equals the AWGN one.
    c.L = 32;
    c.M = 64;
    const double s_m64 = find_crossing(c, 3, 1e-4, 2.0, 4.5, err);
    const double s_csi = csi_n10_it3_crossing(err);
    const bool c_pass = !std::isnan(s_m64) && !std::isnan(s_csi) && s_m64 - s_csi <= 0.3;

    detail = "L8<L4 " + std::string(a_pass ? "yes" : "no") +
             "; |L32-L64| = " + fmt1(std::abs(s32 - s64)) +
             " dB; M64 vs CSI = " + fmt1(s_m64 - s_csi) + " dB";
    if (!err.empty()) detail += "; " + err;
    return a_pass && b_pass && c_pass;
}

// ---------------------------------------------------------------------------
// criterion 5: fully blind receiver over TU6
// ---------------------------------------------------------------------------

// Runs on Mode I dimensions: the toy sample rate rounds the COST 207 delays
// onto ~2 taps, flattening the channel; at 2.048 Msamples/s the profile keeps
// its frequency selectivity, which is what this criterion exercises.
bool criterion5(std::string& detail) {
    std::string err;
    SimConfig c = fig_base();
    c.format = "mode1";
    c.channel = "tu6";
    c.doppler_hz = 10.0;
    c.mode = "blind";
    c.num_runs = 60;
    c.es_errors = 400;
    c.es_min_frames = 12;

    // (a) BER improves monotonically along (16,4) -> (64,4) -> (64,7) at a
    // mid-range SNR; common random numbers pair the comparison
    c.snr_db = {9.0};
    c.M = 16;
    c.N = 4;
    const auto rec_16x4 = run_sweep(c);
    c.M = 64;
    c.N = 4;
    const auto rec_64x4 = run_sweep(c);
    c.M = 64;
    c.N = 7;
    const auto rec_64x7 = run_sweep(c);
    const double b16 = curve_at_iteration(rec_16x4, 3).ber[0];
    const double b64a = curve_at_iteration(rec_64x4, 3).ber[0];
    const double b64b = curve_at_iteration(rec_64x7, 3).ber[0];
    const bool a_pass = b16 >= b64a && b64a >= b64b && b16 > b64b;

    // (b) 64x7 blind within 1 dB of perfect CSI at BER 1e-3
    c.M = 64;
    c.N = 7;
    const double s_blind = find_crossing(c, 3, 1e-3, 8.5, 11.0, err);
    c.mode = "perfect-csi";
    const double s_csi = find_crossing(c, 3, 1e-3, 7.5, 10.5, err);
    const bool b_pass = !std::isnan(s_blind) && !std::isnan(s_csi) && s_blind - s_csi <= 1.0;

    detail = "BER@9dB " + std::to_string(b16) + " >= " + std::to_string(b64a) + " >= " +
             std::to_string(b64b) + "; 64x7 CSI gap " + fmt1(s_blind - s_csi) + " dB (" +
             fmt1(s_blind) + " vs " + fmt1(s_csi) + ")";
    if (!err.empty()) detail += "; " + err;
    return a_pass && b_pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::string arg = argv[++i];
            for (size_t p = 0; p < arg.size();) {
                only.push_back(std::atoi(arg.c_str() + p));
                const size_t comma = arg.find(',', p);
                if (comma == std::string::npos) break;
                p = comma + 1;
            }
        }
    }
    auto wanted = [&](int criterion) {
        if (only.empty()) return true;
        for (int o : only)
            if (o == criterion) return true;
        return false;
    };

    try {
        std::string detail;
        if (wanted(1)) report(1, "oracle equivalence", criterion1(), "rel err <= 1e-9");
        if (wanted(2)) report(2, "decomposition exactness", criterion2(), "100 instances, 1e-9");
        if (wanted(6)) {
            detail.clear();
            report(6, "estimator accuracy", criterion6(detail), detail);
        }
        if (wanted(7)) {
            detail.clear();
            report(7, "structural invariants", criterion7(detail), detail);
        }
        if (wanted(3)) {
            detail.clear();
            report(3, "iterative gain, AWGN perfect CSI", criterion3(detail), detail);
        }
        if (wanted(4)) {
            detail.clear();
            report(4, "blind phase quantization", criterion4(detail), detail);
        }
        if (wanted(5)) {
            detail.clear();
            report(5, "blind receiver over TU6", criterion5(detail), detail);
        }
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << std::endl;
        return 2;
    }
    return g_failures == 0 ? 0 : 1;
}
