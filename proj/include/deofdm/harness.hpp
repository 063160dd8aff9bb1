#ifndef DEOFDM_HARNESS_HPP
#define DEOFDM_HARNESS_HPP

#include "deofdm/blindrx.hpp"

namespace deofdm {

constexpr const char* kVersion = "deofdm 0.1.0";

struct SimConfig {
    std::string format = "toy";  // toy | mode1 | custom
    int m_fft = 256;             // custom format dims
    int n_cp = 64;
    int n_data_syms = 19;
    double sample_rate_hz = 0.0;  // 0 => m_fft * 1 kHz

    std::string channel = "awgn";  // awgn | block-phase | tu6
    double phase_rad = -1.0;       // <0 => random per trial
    double doppler_hz = 10.0;

    std::string mode = "blind";  // blind | perfect-csi
    int L = 32;
    int M = 64;
    int N = 10;
    int iterations = 3;

    std::vector<double> snr_db = {4.0};
    int num_runs = 100;
    int frame_depth = 1;
    uint64_t master_seed = 1;
    uint64_t interleaver_seed = 7;

    bool early_stop = true;
    int es_errors = 200;
    int es_min_frames = 30;
    int es_iteration = -1;  // stop on this iteration's error count; -1: all

    int workers = 0;  // 0 => hardware concurrency
    bool wilson = false;

    OfdmFormat make_format() const;
    RxMode rx_mode() const;
    void validate() const;
};

struct BerRecord {
    double snr_db = 0.0;
    int iteration = 0;
    uint64_t bit_errors = 0;
    uint64_t bits = 0;
    uint64_t frames = 0;
    double seconds = 0.0;

    double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

struct TrialResult {
    std::vector<uint64_t> errors;  // per iteration 0..T
    uint64_t bits = 0;             // info bits per iteration
    uint64_t frames = 0;
};

// One end-to-end transmission: random info bits -> tx chain -> channel ->
// receiver. Seeds derive from (master_seed, run_index) only, so the same
// trial index sees the same bits/channel/noise shape at every SNR point.
// rx_out, when given, receives the receiver result including diagnostics.
TrialResult run_trial(const SimConfig& cfg, double snr_db, uint64_t run_index,
                      TurboResult* rx_out = nullptr);

// Structured-text diagnostics of one trial: per-frame sigma2_hat and
// per-block gain_hat / tau posterior entropy lines.
std::string diag_trial_text(const SimConfig& cfg, double snr_db, uint64_t run_index);

// Monte Carlo sweep over cfg.snr_db. Trials are scheduled in fixed-size
// batches so the early-stop decision (>= es_errors on every iteration curve
// and >= es_min_frames) is independent of thread completion order.
std::vector<BerRecord> sweep(const SimConfig& cfg);

// CSV with header snr_db,iteration,bit_errors,bits,ber,frames,seconds,
// rows ordered (snr asc, iteration asc). With wilson=true appends
// wilson_lo,wilson_hi columns. A JSON manifest (config echo, seed, version)
// is written next to the CSV at <path>.manifest.json.
void write_results(const std::vector<BerRecord>& records, const std::string& path,
                   const SimConfig& cfg);

std::string results_to_csv(const std::vector<BerRecord>& records, bool wilson);

// Flat key=value config text (# comments). Unknown keys are rejected.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config_file(const std::string& path);

// Named built-in configurations.
std::vector<std::string> preset_names();
SimConfig preset(const std::string& name);
std::string preset_description(const std::string& name);

// 95% Wilson score interval for k successes out of n.
std::pair<double, double> wilson_interval(uint64_t k, uint64_t n);

}  // namespace deofdm

#endif
