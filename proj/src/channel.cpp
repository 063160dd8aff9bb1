#include "deofdm/channel.hpp"

namespace deofdm {

double snr_to_sigma2(double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db not finite");
    return std::pow(10.0, -snr_db / 10.0);
}

NoiseSpec NoiseSpec::from_snr_db(double snr_db) {
    return NoiseSpec{snr_db, snr_to_sigma2(snr_db)};
}

void apply_awgn(std::vector<cplx>& samples, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("negative noise variance");
    if (sigma2 == 0.0) return;
    for (cplx& s : samples) s += rng.cgaussian(sigma2);
}

std::vector<double> Tu6Profile::powers_linear() const {
    std::vector<double> p(tap_powers_db.size());
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        p[i] = std::pow(10.0, tap_powers_db[i] / 10.0);
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

Tu6Profile Tu6Profile::cost207(double doppler_hz) {
    Tu6Profile p;
    p.tap_delays_s = {0.0, 0.2e-6, 0.5e-6, 1.6e-6, 2.3e-6, 5.0e-6};
    p.tap_powers_db = {-3.0, 0.0, -2.0, -6.0, -8.0, -10.0};
    p.doppler_hz = doppler_hz;
    p.num_oscillators = 32;
    return p;
}

ChannelRealization apply_block_phase(std::vector<cplx>& samples, double phi,
                                     const OfdmFormat& fmt) {
    const cplx rot = std::polar(1.0, phi);
    for (cplx& s : samples) s *= rot;
    ChannelRealization r;
    r.H = SymbolGrid(fmt.m_fft, fmt.cols(), rot);
    r.profile = "block-phase";
    return r;
}

ChannelRealization apply_random_block_phase(std::vector<cplx>& samples,
                                            const OfdmFormat& fmt, Rng& rng) {
    return apply_block_phase(samples, 2.0 * kPi * rng.uniform(), fmt);
}

JakesTap::JakesTap(double power, double doppler_hz, int num_osc, Rng& rng) {
    omega_.resize(num_osc);
    psi_.resize(num_osc);
    const double theta = 2.0 * kPi * rng.uniform();  // random angle rotation
    for (int k = 0; k < num_osc; ++k) {
        const double alpha = (2.0 * kPi * k + theta) / num_osc;
        omega_[k] = 2.0 * kPi * doppler_hz * std::cos(alpha);
        psi_[k] = 2.0 * kPi * rng.uniform();
    }
    amp_ = std::sqrt(power / num_osc);
}

cplx JakesTap::value(double t_seconds) const {
    cplx acc(0.0, 0.0);
    for (size_t k = 0; k < omega_.size(); ++k)
        acc += std::polar(1.0, omega_[k] * t_seconds + psi_[k]);
    return amp_ * acc;
}

void JakesTap::series(double t0, double dt, size_t n, cplx* out) const {
    // one rotating phasor per oscillator; drift over ~1e5 steps is ~1e-11
    const size_t K = omega_.size();
    std::vector<cplx> ph(K), step(K);
    for (size_t k = 0; k < K; ++k) {
        ph[k] = std::polar(1.0, omega_[k] * t0 + psi_[k]);
        step[k] = std::polar(1.0, omega_[k] * dt);
    }
    for (size_t t = 0; t < n; ++t) {
        cplx acc(0.0, 0.0);
        for (size_t k = 0; k < K; ++k) {
            acc += ph[k];
            ph[k] *= step[k];
        }
        out[t] = amp_ * acc;
    }
}

ChannelRealization apply_tu6(std::vector<cplx>& samples, const Tu6Profile& profile,
                             const OfdmFormat& fmt, uint64_t seed) {
    const size_t n_taps = profile.num_taps();
    if (n_taps == 0) throw std::invalid_argument("empty tap profile");
    if (profile.doppler_hz < 0.0) throw std::invalid_argument("negative Doppler");

    const auto powers = profile.powers_linear();
    std::vector<int> delays(n_taps);
    bool isi = false;
    for (size_t i = 0; i < n_taps; ++i) {
        delays[i] = static_cast<int>(std::lround(profile.tap_delays_s[i] * fmt.sample_rate_hz));
        if (delays[i] > fmt.n_cp) isi = true;
    }

    Rng rng(mix_seed(seed, 0x70b6));
    std::vector<JakesTap> taps;
    taps.reserve(n_taps);
    for (size_t i = 0; i < n_taps; ++i)
        taps.emplace_back(powers[i], profile.doppler_hz, profile.num_oscillators, rng);

    const double dt = 1.0 / fmt.sample_rate_hz;
    const size_t n = samples.size();

    // tap values per sample, then the delay-line sum
    std::vector<std::vector<cplx>> h(n_taps, std::vector<cplx>(n));
    for (size_t i = 0; i < n_taps; ++i) taps[i].series(0.0, dt, n, h[i].data());

    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (size_t i = 0; i < n_taps; ++i) {
        const int d = delays[i];
        for (size_t t = static_cast<size_t>(d); t < n; ++t)
            out[t] += h[i][t] * samples[t - d];
    }
    samples.swap(out);

    // frequency response at each OFDM symbol midpoint
    ChannelRealization r;
    r.H = SymbolGrid(fmt.m_fft, fmt.cols());
    r.seed = seed;
    r.profile = "tu6";
    r.isi_warning = isi;
    const size_t per = fmt.samples_per_symbol();
    for (int col = 0; col < fmt.cols(); ++col) {
        const double t_mid = (col * per + per / 2.0) * dt;
        std::vector<cplx> h_mid(n_taps);
        for (size_t i = 0; i < n_taps; ++i) h_mid[i] = taps[i].value(t_mid);
        for (int m = 0; m < fmt.m_fft; ++m) {
            cplx acc(0.0, 0.0);
            for (size_t i = 0; i < n_taps; ++i)
                acc += h_mid[i] * std::polar(1.0, -2.0 * kPi * m * delays[i] / static_cast<double>(fmt.m_fft));
            r.H.at(m, col) = acc;
        }
    }
    return r;
}

}  // namespace deofdm
