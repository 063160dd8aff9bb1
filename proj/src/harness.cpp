#include "deofdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace deofdm {

OfdmFormat SimConfig::make_format() const {
    if (format == "mode1") return OfdmFormat::mode1();
    if (format == "toy") return OfdmFormat::toy();
    if (format == "custom") {
        const double fs = sample_rate_hz > 0.0 ? sample_rate_hz : m_fft * 1e3;
        return OfdmFormat::custom(m_fft, n_cp, n_data_syms, fs);
    }
    throw std::invalid_argument("unknown format: " + format);
}

RxMode SimConfig::rx_mode() const {
    if (mode == "blind") return RxMode::blind;
    if (mode == "perfect-csi") return RxMode::perfect_csi;
    throw std::invalid_argument("unknown receiver mode: " + mode);
}

void SimConfig::validate() const {
    const OfdmFormat fmt = make_format();
    rx_mode();
    if (channel != "awgn" && channel != "block-phase" && channel != "tu6")
        throw std::invalid_argument("unknown channel: " + channel);
    if (num_runs < 1) throw std::invalid_argument("num_runs < 1");
    if (frame_depth < 1) throw std::invalid_argument("frame_depth < 1");
    if (iterations < 0) throw std::invalid_argument("iterations < 0");
    if (N < 1 || N > fmt.n_data_syms) throw std::invalid_argument("N out of range for format");
    if (M < 1 || M > fmt.m_active) throw std::invalid_argument("M out of range for format");
    if (rx_mode() == RxMode::blind) PhaseQuantization{L, 4}.validate();
    if (snr_db.empty()) throw std::invalid_argument("empty SNR list");
}

namespace {

struct System {
    OfdmFormat fmt;
    ConvCodeSpec code = ConvCodeSpec::k7_133_171();
    PskMapSpec map = PskMapSpec::qpsk_gray();
    InterleaverPerm perm;
    size_t coded_bits = 0;
    size_t info_bits = 0;
};

System build_system(const SimConfig& cfg) {
    System s;
    s.fmt = cfg.make_format();
    s.coded_bits = static_cast<size_t>(cfg.frame_depth) * s.fmt.data_symbols_per_frame() *
                   s.map.bits_per_symbol();
    s.info_bits = s.coded_bits / s.code.rate_den() - s.code.memory();
    s.perm = make_interleaver(cfg.interleaver_seed, s.coded_bits);
    return s;
}

}  // namespace

TrialResult run_trial(const SimConfig& cfg, double snr_db, uint64_t run_index,
                      TurboResult* rx_out) {
    cfg.validate();
    const System sys = build_system(cfg);
    const OfdmFormat& fmt = sys.fmt;
    const double sigma2 = snr_to_sigma2(snr_db);
    const size_t D = cfg.frame_depth;

    const uint64_t trial_seed = mix_seed(cfg.master_seed, run_index);
    Rng bits_rng(mix_seed(trial_seed, 0xb175));
    Rng chan_rng(mix_seed(trial_seed, 0xc4a2));

    // transmit chain
    BitVec info(sys.info_bits);
    for (auto& b : info) b = static_cast<uint8_t>(bits_rng.bit());
    const BitVec coded = conv_encode(info, sys.code);
    const BitVec d = interleave(coded, sys.perm);
    const std::vector<cplx> symbols = map_psk(d, sys.map);

    std::vector<SymbolGrid> rx_frames(D);
    std::vector<ChannelRealization> reals(D);
    const size_t per_frame = fmt.data_symbols_per_frame();
    for (size_t f = 0; f < D; ++f) {
        SymbolGrid A(fmt.m_active, fmt.n_data_syms);
        std::copy(symbols.begin() + f * per_frame, symbols.begin() + (f + 1) * per_frame,
                  A.v.begin());
        const SymbolGrid X = diff_encode(A);
        const SymbolGrid full = place_subcarriers(X, fmt);
        std::vector<cplx> tx = ofdm_modulate(full, fmt);

        if (cfg.channel == "awgn") {
            reals[f].H = SymbolGrid(fmt.m_fft, fmt.cols(), cplx(1.0, 0.0));
            reals[f].profile = "awgn";
        } else if (cfg.channel == "block-phase") {
            const double phi = cfg.phase_rad >= 0.0 ? cfg.phase_rad
                                                    : 2.0 * kPi * chan_rng.uniform();
            reals[f] = apply_block_phase(tx, phi, fmt);
        } else {
            const Tu6Profile prof = Tu6Profile::cost207(cfg.doppler_hz);
            reals[f] = apply_tu6(tx, prof, fmt, chan_rng.next_u64());
        }
        reals[f].sigma2 = sigma2;
        apply_awgn(tx, sigma2, chan_rng);
        rx_frames[f] = ofdm_demodulate(tx, fmt);
    }

    TurboConfig tcfg;
    tcfg.mode = cfg.rx_mode();
    tcfg.L = cfg.L;
    tcfg.M = cfg.M;
    tcfg.N = cfg.N;
    tcfg.iterations = cfg.iterations;
    tcfg.code = sys.code;
    tcfg.map = sys.map;
    tcfg.perm = sys.perm;
    tcfg.sigma2_true = sigma2;

    const TurboResult rx = turbo_demod_decode(rx_frames, fmt, tcfg,
                                              tcfg.mode == RxMode::perfect_csi ? &reals : nullptr);

    TrialResult res;
    res.bits = sys.info_bits;
    res.frames = D;
    res.errors.resize(rx.decoded.size(), 0);
    for (size_t it = 0; it < rx.decoded.size(); ++it) {
        uint64_t e = 0;
        for (size_t i = 0; i < sys.info_bits; ++i)
            if (rx.decoded[it][i] != info[i]) ++e;
        res.errors[it] = e;
    }
    if (rx_out) *rx_out = rx;
    return res;
}

std::string diag_trial_text(const SimConfig& cfg, double snr_db, uint64_t run_index) {
    TurboResult rx;
    const TrialResult r = run_trial(cfg, snr_db, run_index, &rx);
    std::ostringstream os;
    os.precision(6);
    os << "trial run=" << run_index << " snr_db=" << snr_db << " frames=" << r.frames << "\n";
    for (size_t f = 0; f < rx.sigma2_hat.size(); ++f)
        os << "frame=" << f << " sigma2_hat=" << rx.sigma2_hat[f] << "\n";
    for (const auto& b : rx.blocks)
        os << "block frame=" << b.frame << " m0=" << b.m0 << " rows=" << b.rows
           << " n0=" << b.n0 << " stages=" << b.stages << " gain_hat=" << b.gain_hat
           << " tau_entropy_bits=" << b.tau_entropy_bits << "\n";
    for (size_t it = 0; it < r.errors.size(); ++it)
        os << "iteration=" << it << " bit_errors=" << r.errors[it] << " bits=" << r.bits << "\n";
    return os.str();
}

std::vector<BerRecord> sweep(const SimConfig& cfg) {
    cfg.validate();
    const int iters = cfg.iterations + 1;
    int workers = cfg.workers;
    if (workers <= 0) {
        const char* env = std::getenv("SIM_WORKERS");
        if (env && *env) workers = std::atoi(env);
    }
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;

    std::vector<BerRecord> out;
    for (double snr : cfg.snr_db) {
        const auto t_start = std::chrono::steady_clock::now();
        std::vector<uint64_t> errors(iters, 0);
        uint64_t bits = 0, frames = 0;
        std::mutex merge_mtx;

        // fixed-size batches keep the early-stop decision deterministic
        const uint64_t batch = static_cast<uint64_t>(std::max(2 * workers, 8));
        uint64_t scheduled = 0;
        while (scheduled < static_cast<uint64_t>(cfg.num_runs)) {
            const uint64_t lo = scheduled;
            const uint64_t hi = std::min<uint64_t>(cfg.num_runs, scheduled + batch);
            scheduled = hi;

            std::atomic<uint64_t> next{lo};
            auto worker = [&]() {
                for (;;) {
                    const uint64_t idx = next.fetch_add(1);
                    if (idx >= hi) break;
                    const TrialResult r = run_trial(cfg, snr, idx);
                    std::lock_guard<std::mutex> lk(merge_mtx);
                    for (int it = 0; it < iters; ++it) errors[it] += r.errors[it];
                    bits += r.bits;
                    frames += r.frames;
                }
            };
            std::vector<std::thread> pool;
            const int nthreads = static_cast<int>(std::min<uint64_t>(workers, hi - lo));
            pool.reserve(nthreads);
            for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            if (cfg.early_stop && frames >= static_cast<uint64_t>(cfg.es_min_frames)) {
                const uint64_t watched =
                    (cfg.es_iteration >= 0 && cfg.es_iteration < iters)
                        ? errors[cfg.es_iteration]
                        : *std::min_element(errors.begin(), errors.end());
                if (watched >= static_cast<uint64_t>(cfg.es_errors)) break;
            }
        }

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        for (int it = 0; it < iters; ++it)
            out.push_back({snr, it, errors[it], bits, frames, secs});
    }
    return out;
}

std::pair<double, double> wilson_interval(uint64_t k, uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5% quantile
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

static void format_double(std::ostringstream& os, double v) {
    std::ostringstream tmp;
    tmp.precision(12);
    tmp << v;
    os << tmp.str();
}

std::string results_to_csv(const std::vector<BerRecord>& records, bool wilson) {
    std::vector<BerRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const BerRecord& a, const BerRecord& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        return a.iteration < b.iteration;
    });
    std::ostringstream os;
    os << "snr_db,iteration,bit_errors,bits,ber,frames,seconds";
    if (wilson) os << ",wilson_lo,wilson_hi";
    os << "\n";
    for (const auto& r : sorted) {
        format_double(os, r.snr_db);
        os << "," << r.iteration << "," << r.bit_errors << "," << r.bits << ",";
        format_double(os, r.ber());
        os << "," << r.frames << ",";
        format_double(os, r.seconds);
        if (wilson) {
            const auto [lo, hi] = wilson_interval(r.bit_errors, r.bits);
            os << ",";
            format_double(os, lo);
            os << ",";
            format_double(os, hi);
        }
        os << "\n";
    }
    return os.str();
}

static nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["format"] = c.format;
    j["m_fft"] = c.m_fft;
    j["n_cp"] = c.n_cp;
    j["n_data_syms"] = c.n_data_syms;
    j["sample_rate_hz"] = c.sample_rate_hz;
    j["channel"] = c.channel;
    j["phase_rad"] = c.phase_rad;
    j["doppler_hz"] = c.doppler_hz;
    j["mode"] = c.mode;
    j["L"] = c.L;
    j["M"] = c.M;
    j["N"] = c.N;
    j["iterations"] = c.iterations;
    j["snr_db"] = c.snr_db;
    j["num_runs"] = c.num_runs;
    j["frame_depth"] = c.frame_depth;
    j["master_seed"] = c.master_seed;
    j["interleaver_seed"] = c.interleaver_seed;
    j["early_stop"] = c.early_stop;
    j["es_errors"] = c.es_errors;
    j["es_min_frames"] = c.es_min_frames;
    j["es_iteration"] = c.es_iteration;
    j["wilson"] = c.wilson;
    return j;
}

void write_results(const std::vector<BerRecord>& records, const std::string& path,
                   const SimConfig& cfg) {
    {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        f << results_to_csv(records, cfg.wilson);
        if (!f) throw std::runtime_error("write failed: " + path);
    }
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = config_to_json(cfg);
    manifest["records"] = records.size();
    std::ofstream mf(path + ".manifest.json");
    if (!mf) throw std::runtime_error("cannot open manifest for writing");
    mf << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// config text
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean: " + v);
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "format") c.format = val;
        else if (key == "m_fft") c.m_fft = std::stoi(val);
        else if (key == "n_cp") c.n_cp = std::stoi(val);
        else if (key == "n_data_syms") c.n_data_syms = std::stoi(val);
        else if (key == "sample_rate_hz") c.sample_rate_hz = std::stod(val);
        else if (key == "channel") c.channel = val;
        else if (key == "phase") c.phase_rad = (val == "random") ? -1.0 : std::stod(val);
        else if (key == "doppler_hz") c.doppler_hz = std::stod(val);
        else if (key == "mode") c.mode = val;
        else if (key == "L") c.L = std::stoi(val);
        else if (key == "M") c.M = std::stoi(val);
        else if (key == "N") c.N = std::stoi(val);
        else if (key == "iterations") c.iterations = std::stoi(val);
        else if (key == "snr_db") c.snr_db = parse_double_list(val);
        else if (key == "num_runs") c.num_runs = std::stoi(val);
        else if (key == "frame_depth") c.frame_depth = std::stoi(val);
        else if (key == "master_seed") c.master_seed = std::stoull(val);
        else if (key == "interleaver_seed") c.interleaver_seed = std::stoull(val);
        else if (key == "early_stop") c.early_stop = parse_bool(val);
        else if (key == "es_errors") c.es_errors = std::stoi(val);
        else if (key == "es_min_frames") c.es_min_frames = std::stoi(val);
        else if (key == "es_iteration") c.es_iteration = std::stoi(val);
        else if (key == "workers") c.workers = std::stoi(val);
        else if (key == "wilson") c.wilson = parse_bool(val);
        else throw std::invalid_argument("unknown config key: " + key);
    }
    c.validate();
    return c;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

namespace {

struct PresetDef {
    const char* name;
    const char* descr;
    SimConfig (*make)();
};

SimConfig preset_smoke() {
    SimConfig c;
    c.format = "toy";
    c.channel = "awgn";
    c.mode = "perfect-csi";
    c.N = 10;
    c.iterations = 1;
    c.snr_db = {8.0};
    c.num_runs = 2;
    return c;
}

SimConfig preset_fig4_n10() {
    SimConfig c;
    c.format = "toy";
    c.channel = "awgn";
    c.mode = "perfect-csi";
    c.N = 10;
    c.iterations = 3;
    c.snr_db = {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0};
    c.num_runs = 700;
    return c;
}

SimConfig preset_fig4_n4() {
    SimConfig c = preset_fig4_n10();
    c.N = 4;
    c.snr_db = {3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5};
    return c;
}

SimConfig preset_fig5() {
    SimConfig c;
    c.format = "toy";
    c.channel = "block-phase";
    c.mode = "blind";
    c.L = 32;
    c.M = 1;
    c.N = 10;
    c.iterations = 3;
    c.snr_db = {3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    c.num_runs = 700;
    return c;
}

SimConfig preset_fig6() {
    SimConfig c;
    c.format = "toy";
    c.channel = "tu6";
    c.doppler_hz = 10.0;
    c.mode = "blind";
    c.L = 32;
    c.M = 64;
    c.N = 7;
    c.iterations = 3;
    c.snr_db = {6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0};
    c.num_runs = 400;
    return c;
}

SimConfig preset_mode1() {
    SimConfig c;
    c.format = "mode1";
    c.channel = "awgn";
    c.mode = "perfect-csi";
    c.N = 10;
    c.iterations = 3;
    c.snr_db = {3.0, 4.0, 5.0};
    c.num_runs = 20;
    return c;
}

const PresetDef kPresets[] = {
    {"smoke", "quick end-to-end sanity run (toy, AWGN, perfect CSI)", preset_smoke},
    {"fig4-awgn-n10", "iterative gain over AWGN, perfect CSI, N=10", preset_fig4_n10},
    {"fig4-awgn-n4", "iterative gain over AWGN, perfect CSI, N=4", preset_fig4_n4},
    {"fig5-phase-quant", "blind phase-quantized receiver, random frame phase", preset_fig5},
    {"fig6-tu6-64x7", "fully blind receiver over TU6, 64x7 blocks", preset_fig6},
    {"mode1", "DAB Mode I dimensions, AWGN, perfect CSI", preset_mode1},
};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.push_back(p.name);
    return out;
}

SimConfig preset(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name) return p.make();
    throw std::invalid_argument("unknown preset: " + name);
}

std::string preset_description(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name) return p.descr;
    throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace deofdm
