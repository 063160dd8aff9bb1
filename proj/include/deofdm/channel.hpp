#ifndef DEOFDM_CHANNEL_HPP
#define DEOFDM_CHANNEL_HPP

#include "deofdm/ofdm.hpp"

namespace deofdm {

struct NoiseSpec {
    double snr_db = 0.0;
    double sigma2_w = 1.0;

    static NoiseSpec from_snr_db(double snr_db);
};

// SNR = E|X|^2 / sigma_w^2 with unit-energy PSK through the unitary modulator.
double snr_to_sigma2(double snr_db);

// Adds circularly symmetric complex Gaussian noise of variance sigma2.
void apply_awgn(std::vector<cplx>& samples, double sigma2, Rng& rng);

// Per-tap Rayleigh fading with a Jakes Doppler spectrum, sum-of-sinusoids.
struct Tu6Profile {
    std::vector<double> tap_delays_s;   // seconds
    std::vector<double> tap_powers_db;  // relative powers, normalized on use
    double doppler_hz = 10.0;
    int num_oscillators = 32;

    size_t num_taps() const { return tap_delays_s.size(); }
    // Linear powers normalized to unit total mean power.
    std::vector<double> powers_linear() const;
    // COST 207 typical-urban 6-tap reference profile.
    static Tu6Profile cost207(double doppler_hz = 10.0);
};

// True per-(m,n) frequency response plus generation metadata. Used only by
// the perfect-CSI benchmark and model-verification tests.
struct ChannelRealization {
    SymbolGrid H;          // m_fft x (n_data_syms+1)
    double sigma2 = 0.0;   // noise variance applied alongside this channel
    uint64_t seed = 0;
    std::string profile;
    bool isi_warning = false;  // some tap delay exceeded the cyclic prefix
};

// Multiplies every sample by exp(j*phi). Returns the realization with
// constant H = exp(j*phi).
ChannelRealization apply_block_phase(std::vector<cplx>& samples, double phi,
                                     const OfdmFormat& fmt);

// Draws phi uniformly in [0, 2pi) from rng, then applies it.
ChannelRealization apply_random_block_phase(std::vector<cplx>& samples,
                                            const OfdmFormat& fmt, Rng& rng);

// Time-varying tapped delay line y_t = sum_i h_i(t) x_{t-d_i} (noise not
// included). Tap delays are rounded to the sample grid. The realization
// holds the frequency response of the taps frozen at each OFDM symbol
// midpoint.
ChannelRealization apply_tu6(std::vector<cplx>& samples, const Tu6Profile& profile,
                             const OfdmFormat& fmt, uint64_t seed);

// Tap process generator, exposed for the statistical tests.
// h(t) = sqrt(power/K) * sum_k exp(j(2*pi*fd*cos(alpha_k)*t + psi_k)) with
// the arrival angles alpha_k evenly spread and randomly rotated per seed.
class JakesTap {
public:
    JakesTap(double power, double doppler_hz, int num_osc, Rng& rng);
    cplx value(double t_seconds) const;
    // n consecutive samples starting at t0 with spacing dt.
    void series(double t0, double dt, size_t n, cplx* out) const;

private:
    std::vector<double> omega_;  // 2*pi*fd*cos(alpha_k)
    std::vector<double> psi_;
    double amp_ = 0.0;
};

}  // namespace deofdm

#endif
