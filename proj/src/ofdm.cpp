#include "deofdm/ofdm.hpp"

#include <cstring>
#include <fstream>

namespace deofdm {

void OfdmFormat::validate() const {
    if (m_fft < 8 || (m_fft & (m_fft - 1)) != 0) throw std::invalid_argument("m_fft must be a power of two >= 8");
    if (m_fft % 8 != 0) throw std::invalid_argument("m_fft must be divisible by 8");
    if (n_cp < 0 || n_cp >= m_fft) throw std::invalid_argument("n_cp out of range");
    if (n_data_syms < 1) throw std::invalid_argument("n_data_syms < 1");
    if (static_cast<int>(active_set.size()) != m_active)
        throw std::invalid_argument("active_set size != m_active");
}

std::vector<int> active_indices(int m_fft) {
    std::vector<int> idx;
    idx.reserve(3 * m_fft / 4);
    for (int k = m_fft / 8 + 1; k <= m_fft / 2; ++k) idx.push_back(k);
    for (int k = m_fft / 2 + 2; k <= 7 * m_fft / 8 + 1; ++k) idx.push_back(k);
    return idx;
}

static OfdmFormat make_format(int m_fft, int n_cp, int n_data_syms, double fs) {
    OfdmFormat f;
    f.m_fft = m_fft;
    f.n_cp = n_cp;
    f.n_data_syms = n_data_syms;
    f.sample_rate_hz = fs;
    f.active_set = active_indices(m_fft);
    f.m_active = static_cast<int>(f.active_set.size());
    f.validate();
    return f;
}

OfdmFormat OfdmFormat::mode1() { return make_format(2048, 504, 19, 2.048e6); }

OfdmFormat OfdmFormat::toy() { return make_format(256, 64, 19, 256e3); }

OfdmFormat OfdmFormat::custom(int m_fft, int n_cp, int n_data_syms, double fs) {
    return make_format(m_fft, n_cp, n_data_syms, fs);
}

SymbolGrid place_subcarriers(const SymbolGrid& X, const OfdmFormat& fmt) {
    if (X.rows != static_cast<size_t>(fmt.m_active))
        throw std::invalid_argument("place_subcarriers: row count != m_active");
    SymbolGrid full(fmt.m_fft, X.cols);
    for (size_t n = 0; n < X.cols; ++n)
        for (size_t i = 0; i < X.rows; ++i)
            full.at(fmt.active_set[i], n) = X.at(i, n);
    return full;
}

SymbolGrid extract_active(const SymbolGrid& full, const OfdmFormat& fmt) {
    if (full.rows != static_cast<size_t>(fmt.m_fft))
        throw std::invalid_argument("extract_active: row count != m_fft");
    SymbolGrid X(fmt.m_active, full.cols);
    for (size_t n = 0; n < full.cols; ++n)
        for (size_t i = 0; i < X.rows; ++i)
            X.at(i, n) = full.at(fmt.active_set[i], n);
    return X;
}

std::vector<cplx> extract_null(const SymbolGrid& full, const OfdmFormat& fmt) {
    if (full.rows != static_cast<size_t>(fmt.m_fft))
        throw std::invalid_argument("extract_null: row count != m_fft");
    std::vector<uint8_t> is_active(fmt.m_fft, 0);
    for (int k : fmt.active_set) is_active[k] = 1;
    std::vector<cplx> out;
    out.reserve(static_cast<size_t>(fmt.num_null()) * full.cols);
    for (size_t n = 0; n < full.cols; ++n)
        for (int k = 0; k < fmt.m_fft; ++k)
            if (!is_active[k]) out.push_back(full.at(k, n));
    return out;
}

void fft_unitary(cplx* data, size_t n, bool inverse) {
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = data[i + k];
                const cplx t = w * data[i + k + len / 2];
                data[i + k] = u + t;
                data[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < n; ++i) data[i] *= scale;
}

std::vector<cplx> ofdm_modulate(const SymbolGrid& full, const OfdmFormat& fmt) {
    if (full.rows != static_cast<size_t>(fmt.m_fft))
        throw std::invalid_argument("ofdm_modulate: grid rows != m_fft");
    const size_t M = fmt.m_fft;
    const size_t cp = fmt.n_cp;
    std::vector<cplx> out(full.cols * (M + cp));
    std::vector<cplx> sym(M);
    for (size_t n = 0; n < full.cols; ++n) {
        std::memcpy(sym.data(), full.col(n), M * sizeof(cplx));
        fft_unitary(sym.data(), M, true);
        cplx* dst = out.data() + n * (M + cp);
        for (size_t t = 0; t < cp; ++t) dst[t] = sym[M - cp + t];
        std::memcpy(dst + cp, sym.data(), M * sizeof(cplx));
    }
    return out;
}

SymbolGrid ofdm_demodulate(const std::vector<cplx>& samples, const OfdmFormat& fmt) {
    const size_t M = fmt.m_fft;
    const size_t cp = fmt.n_cp;
    const size_t per = M + cp;
    if (samples.size() % per != 0) throw std::invalid_argument("ofdm_demodulate: length mismatch");
    const size_t cols = samples.size() / per;
    SymbolGrid Y(M, cols);
    for (size_t n = 0; n < cols; ++n) {
        std::memcpy(Y.col(n), samples.data() + n * per + cp, M * sizeof(cplx));
        fft_unitary(Y.col(n), M, false);
    }
    return Y;
}

static constexpr char kDumpMagic[4] = {'D', 'E', 'G', '1'};

void write_grid_dump(const std::string& path, const SymbolGrid& full, const OfdmFormat& fmt) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    uint32_t hdr[3] = {static_cast<uint32_t>(fmt.m_fft),
                       static_cast<uint32_t>(fmt.n_data_syms),
                       static_cast<uint32_t>(fmt.n_cp)};
    f.write(kDumpMagic, 4);
    f.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    // row-major on disk
    for (size_t m = 0; m < full.rows; ++m)
        for (size_t n = 0; n < full.cols; ++n) {
            const double re = full.at(m, n).real();
            const double im = full.at(m, n).imag();
            f.write(reinterpret_cast<const char*>(&re), 8);
            f.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!f) throw std::runtime_error("write failed: " + path);
}

SymbolGrid read_grid_dump(const std::string& path, OfdmFormat* fmt_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[4];
    uint32_t hdr[3];
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    if (!f || std::memcmp(magic, kDumpMagic, 4) != 0)
        throw std::runtime_error("bad grid dump header: " + path);
    const size_t rows = hdr[0];
    const size_t cols = hdr[1] + 1;
    SymbolGrid g(rows, cols);
    for (size_t m = 0; m < rows; ++m)
        for (size_t n = 0; n < cols; ++n) {
            double re, im;
            f.read(reinterpret_cast<char*>(&re), 8);
            f.read(reinterpret_cast<char*>(&im), 8);
            g.at(m, n) = {re, im};
        }
    if (!f) throw std::runtime_error("truncated grid dump: " + path);
    if (fmt_out) {
        *fmt_out = OfdmFormat::custom(hdr[0], hdr[2], hdr[1],
                                      static_cast<double>(hdr[0]) * 1e3);
    }
    return g;
}

}  // namespace deofdm
