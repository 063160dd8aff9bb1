#ifndef DEOFDM_OFDM_HPP
#define DEOFDM_OFDM_HPP

#include "deofdm/common.hpp"

namespace deofdm {

// OFDM frame geometry. A frame carries n_data_syms data-bearing OFDM symbols
// plus the n=0 differential reference symbol, i.e. n_data_syms + 1 columns
// on the air.
struct OfdmFormat {
    int m_fft = 2048;        // DFT size
    int m_active = 1536;     // active subcarriers
    int n_cp = 504;          // cyclic prefix length in samples
    int n_data_syms = 19;    // data-bearing OFDM symbols per frame
    double sample_rate_hz = 2.048e6;
    std::vector<int> active_set;  // ascending row indices of active bins

    int num_null() const { return m_fft - m_active; }
    int cols() const { return n_data_syms + 1; }
    int samples_per_symbol() const { return m_fft + n_cp; }
    size_t frame_samples() const { return static_cast<size_t>(cols()) * samples_per_symbol(); }
    size_t data_symbols_per_frame() const { return static_cast<size_t>(m_active) * n_data_syms; }

    // DAB Mode I dimensions.
    static OfdmFormat mode1();
    // Desk-scale format with the same subcarrier spacing (1 kHz).
    static OfdmFormat toy();
    static OfdmFormat custom(int m_fft, int n_cp, int n_data_syms, double sample_rate_hz);

    void validate() const;
};

// Active-bin index set: [M/8+1, M/2] u [M/2+2, 7M/8+1]. The gap at M/2+1 is
// the nulled DC bin; everything outside is guard band.
std::vector<int> active_indices(int m_fft);

// Scatter an M_a x C grid onto the full M_f x C grid (null rows zero).
SymbolGrid place_subcarriers(const SymbolGrid& X, const OfdmFormat& fmt);

// Gather the active rows back out of a full grid.
SymbolGrid extract_active(const SymbolGrid& full, const OfdmFormat& fmt);

// All null-tone observations of a frame, column-major.
std::vector<cplx> extract_null(const SymbolGrid& full, const OfdmFormat& fmt);

// Unitary IDFT per column + cyclic prefix, concatenated in time order.
std::vector<cplx> ofdm_modulate(const SymbolGrid& full, const OfdmFormat& fmt);

// CP removal + unitary DFT per symbol; returns the full M_f x C grid.
SymbolGrid ofdm_demodulate(const std::vector<cplx>& samples, const OfdmFormat& fmt);

// Unitary radix-2 FFT, in place. n must be a power of two.
// inverse=false applies exp(-j2pi kt/n)/sqrt(n), inverse=true its adjoint.
void fft_unitary(cplx* data, size_t n, bool inverse);

// Binary frame dump: 16-byte header (magic "DEG1", u32 m_fft, u32 n_data_syms,
// u32 n_cp) followed by the full grid row-major as little-endian f64 (re,im)
// pairs.
void write_grid_dump(const std::string& path, const SymbolGrid& full, const OfdmFormat& fmt);
SymbolGrid read_grid_dump(const std::string& path, OfdmFormat* fmt_out = nullptr);

}  // namespace deofdm

#endif
