#include <doctest.h>

#include "deofdm/channel.hpp"
#include "oracles.hpp"

using namespace deofdm;

TEST_CASE("snr_to_sigma2") {
    CHECK(snr_to_sigma2(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(snr_to_sigma2(10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(snr_to_sigma2(3.0) == doctest::Approx(0.5011872336272722).epsilon(1e-12));
    const auto spec = NoiseSpec::from_snr_db(10.0);
    CHECK(spec.snr_db == 10.0);
    CHECK(spec.sigma2_w == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("apply_awgn: sigma2 = 0 is the identity") {
    Rng rng(31);
    std::vector<cplx> x = {{1, 2}, {3, -4}};
    auto y = x;
    apply_awgn(y, 0.0, rng);
    CHECK(y == x);
    CHECK_THROWS_AS(apply_awgn(y, -1.0, rng), std::invalid_argument);
}

TEST_CASE("apply_awgn: noise statistics over 1e6 samples") {
    Rng rng(32);
    const size_t n = 1000000;
    std::vector<cplx> x(n, cplx(0.0, 0.0));
    apply_awgn(x, 1.0, rng);
    double var = 0.0, cross = 0.0;
    for (const cplx& v : x) {
        var += std::norm(v);
        cross += v.real() * v.imag();
    }
    var /= n;
    cross /= n;
    CHECK(var == doctest::Approx(1.0).epsilon(0.005));
    CHECK(std::abs(cross) < 3.0 / std::sqrt(static_cast<double>(n)) * 0.5 + 1.5e-3);
}

TEST_CASE("apply_block_phase: identity, sign flip, modulus preserved") {
    const auto fmt = OfdmFormat::custom(16, 4, 2, 16e3);
    Rng rng(33);
    std::vector<cplx> x(64);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};

    auto a = x;
    apply_block_phase(a, 0.0, fmt);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(a[i] - x[i]) < 1e-15);

    auto b = x;
    apply_block_phase(b, kPi, fmt);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(b[i] + x[i]) < 1e-12);

    auto c = x;
    const auto real = apply_block_phase(c, 1.234, fmt);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(std::abs(c[i]) - std::abs(x[i])) < 1e-12);
    for (const cplx& h : real.H.v) CHECK(std::abs(h - std::polar(1.0, 1.234)) < 1e-15);
}

TEST_CASE("apply_tu6: zero Doppler single tap is a constant scalar channel") {
    const auto fmt = OfdmFormat::custom(64, 16, 4, 64e3);
    Tu6Profile prof;
    prof.tap_delays_s = {0.0};
    prof.tap_powers_db = {0.0};
    prof.doppler_hz = 0.0;
    Rng rng(34);
    std::vector<cplx> x(fmt.frame_samples());
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
    const auto orig = x;
    const auto real = apply_tu6(x, prof, fmt, 99);

    const cplx h = real.H.at(0, 0);
    CHECK(std::abs(h) > 1e-3);
    for (const cplx& v : real.H.v) CHECK(std::abs(v - h) < 1e-9);
    for (size_t t = 0; t < x.size(); ++t) CHECK(std::abs(x[t] - h * orig[t]) < 1e-9);
}

TEST_CASE("apply_tu6: zero Doppler response constant in n, matches Y = H (x) X") {
    const auto fmt = OfdmFormat::toy();
    const auto prof = Tu6Profile::cost207(0.0);
    Rng rng(35);
    SymbolGrid g(fmt.m_active, fmt.cols());
    for (auto& v : g.v) v = std::polar(1.0, 2.0 * kPi * rng.uniform());
    const auto full = place_subcarriers(g, fmt);
    auto tx = ofdm_modulate(full, fmt);
    const auto real = apply_tu6(tx, prof, fmt, 1234);
    const auto Y = ofdm_demodulate(tx, fmt);

    // constant across columns, selective across rows
    for (int m = 0; m < fmt.m_fft; ++m)
        for (int n = 1; n < fmt.cols(); ++n)
            CHECK(std::abs(real.H.at(m, n) - real.H.at(m, 0)) < 1e-9);
    double spread = 0.0;
    for (int m = 1; m < fmt.m_fft; ++m)
        spread = std::max(spread, std::abs(real.H.at(m, 0) - real.H.at(0, 0)));
    CHECK(spread > 1e-3);

    double worst = 0.0;
    for (int n = 0; n < fmt.cols(); ++n)
        for (int m = 0; m < fmt.m_fft; ++m)
            worst = std::max(worst,
                             std::abs(Y.at(m, n) - real.H.at(m, n) * full.at(m, n)));
    CHECK(worst < 1e-8);
}

TEST_CASE("apply_tu6: reproducible bit-exactly from the seed") {
    const auto fmt = OfdmFormat::custom(64, 16, 3, 64e3);
    const auto prof = Tu6Profile::cost207(10.0);
    Rng rng(36);
    std::vector<cplx> x(fmt.frame_samples());
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
    auto a = x, b = x;
    const auto ra = apply_tu6(a, prof, fmt, 555);
    const auto rb = apply_tu6(b, prof, fmt, 555);
    CHECK(a == b);
    CHECK(ra.H.v == rb.H.v);
}

TEST_CASE("apply_tu6: delay beyond the cyclic prefix flags ISI") {
    const auto fmt = OfdmFormat::custom(64, 4, 2, 64e3);
    Tu6Profile prof;
    prof.tap_delays_s = {0.0, 10.0 / 64e3};  // 10 samples > N_cp = 4
    prof.tap_powers_db = {0.0, -3.0};
    prof.doppler_hz = 0.0;
    std::vector<cplx> x(fmt.frame_samples(), cplx(1.0, 0.0));
    const auto real = apply_tu6(x, prof, fmt, 1);
    CHECK(real.isi_warning);
}

TEST_CASE("JakesTap: autocorrelation follows J0(2 pi fd tau)") {
    const double fd = 50.0;
    const int n_real = 6000;
    const std::vector<double> taus = {0.002, 0.006, 0.010, 0.016, 0.020};
    std::vector<cplx> acc(taus.size(), cplx(0.0, 0.0));
    Rng rng(37);
    for (int r = 0; r < n_real; ++r) {
        JakesTap tap(1.0, fd, 32, rng);
        const cplx h0 = std::conj(tap.value(0.0));
        for (size_t i = 0; i < taus.size(); ++i) acc[i] += tap.value(taus[i]) * h0;
    }
    for (size_t i = 0; i < taus.size(); ++i) {
        const double expect = std::cyl_bessel_j(0.0, 2.0 * kPi * fd * taus[i]);
        CHECK(std::abs(acc[i].real() / n_real - expect) < 0.05);
        CHECK(std::abs(acc[i].imag() / n_real) < 0.05);
    }
}

TEST_CASE("Tu6Profile: mean tap powers match the profile") {
    const auto prof = Tu6Profile::cost207(100.0);
    const auto powers = prof.powers_linear();
    double total_profile = 0.0;
    for (double p : powers) total_profile += p;
    CHECK(total_profile == doctest::Approx(1.0).epsilon(1e-12));

    // time-and-ensemble average over 1000 seeds, 1 s span
    std::vector<double> mean_power(prof.num_taps(), 0.0);
    const int n_seeds = 1000, n_t = 200;
    for (int s = 0; s < n_seeds; ++s) {
        Rng rng(mix_seed(38, s));
        for (size_t i = 0; i < prof.num_taps(); ++i) {
            JakesTap tap(powers[i], prof.doppler_hz, prof.num_oscillators, rng);
            double acc = 0.0;
            for (int t = 0; t < n_t; ++t) acc += std::norm(tap.value(t * 0.005));
            mean_power[i] += acc / n_t;
        }
    }
    double total = 0.0;
    for (size_t i = 0; i < prof.num_taps(); ++i) {
        mean_power[i] /= n_seeds;
        total += mean_power[i];
        CHECK(std::abs(mean_power[i] - powers[i]) < 0.03 * powers[i]);
    }
    CHECK(std::abs(total - 1.0) < 0.02);
}
