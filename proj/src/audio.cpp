#include "tracenorm/audio.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include "tracenorm/errors.hpp"

namespace tracenorm {

namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// iterative radix-2 FFT, in place; size must be a power of two
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / double(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> even = a[i + k];
                const std::complex<double> odd = a[i + k + len / 2] * w;
                a[i + k] = even + odd;
                a[i + k + len / 2] = even - odd;
                w *= wlen;
            }
        }
    }
}

// mel-spaced boundary frequencies: n_filters + 2 points from 0 to Nyquist
std::vector<double> mel_boundaries(std::size_t n_filters, double sample_rate) {
    const double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> f(n_filters + 2);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = mel_to_hz(mel_max * double(i) / double(n_filters + 1));
    return f;
}

// orthonormal DCT-II of x, coefficients 0..n-1
std::vector<double> dct2_ortho(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i] * std::cos(M_PI * double(j) * (2.0 * double(i) + 1.0) / (2.0 * double(n)));
        out[j] = s * (j == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n)));
    }
    return out;
}

} // namespace

AudioSegment normalized(AudioSegment seg) {
    if (seg.samples.empty()) throw std::invalid_argument("normalized: empty segment");
    double mean = 0.0;
    for (double s : seg.samples) mean += s;
    mean /= double(seg.samples.size());
    double var = 0.0;
    for (double s : seg.samples) var += (s - mean) * (s - mean);
    var /= double(seg.samples.size());
    if (var <= 0.0) throw std::invalid_argument("normalized: constant signal has no variance");
    const double inv_std = 1.0 / std::sqrt(var);
    for (double& s : seg.samples) s = (s - mean) * inv_std;
    return seg;
}

std::size_t frame_length_for(double sample_rate, double frame_seconds) {
    if (sample_rate <= 0.0 || frame_seconds <= 0.0)
        throw std::invalid_argument("frame_length_for: rate and duration must be positive");
    const auto len = static_cast<std::size_t>(std::llround(frame_seconds * sample_rate));
    if (len == 0) throw std::invalid_argument("frame_length_for: frame would be empty");
    return len;
}

Matrix frame_segment(const AudioSegment& seg, std::size_t frame_len, std::size_t n_frames) {
    if (frame_len == 0 || n_frames == 0)
        throw std::invalid_argument("frame_segment: frame_len and n_frames must be positive");
    if (seg.samples.size() < frame_len * n_frames)
        throw std::invalid_argument("frame_segment: segment has " +
                                    std::to_string(seg.samples.size()) + " samples, needs " +
                                    std::to_string(frame_len * n_frames));
    Matrix out(n_frames, frame_len);
    for (std::size_t i = 0; i < n_frames; ++i)
        for (std::size_t j = 0; j < frame_len; ++j) out(i, j) = seg.samples[i * frame_len + j];
    return out;
}

std::vector<double> mel_center_frequencies(std::size_t n_filters, double sample_rate) {
    std::vector<double> f = mel_boundaries(n_filters, sample_rate);
    return {f.begin() + 1, f.end() - 1};
}

std::vector<double> mel_filter_energies(std::span<const double> frame, double sample_rate,
                                        std::size_t n_filters) {
    if (frame.size() < 32)
        throw std::invalid_argument("mel_filter_energies: frame must hold at least 32 samples");
    if (sample_rate <= 0.0)
        throw std::invalid_argument("mel_filter_energies: sample rate must be positive");

    const std::size_t n_fft = next_pow2(frame.size());
    std::vector<std::complex<double>> buf(n_fft, 0.0);
    for (std::size_t k = 0; k < frame.size(); ++k) {
        const double w =
            0.54 - 0.46 * std::cos(2.0 * M_PI * double(k) / double(frame.size() - 1));
        buf[k] = frame[k] * w;
    }
    fft_pow2(buf);

    const std::size_t n_bins = n_fft / 2 + 1;
    std::vector<double> magnitude(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) magnitude[k] = std::abs(buf[k]);

    const std::vector<double> f = mel_boundaries(n_filters, sample_rate);
    std::vector<double> energies(n_filters, 0.0);
    const double bin_hz = sample_rate / double(n_fft);
    for (std::size_t i = 0; i < n_filters; ++i) {
        const double lo = f[i], mid = f[i + 1], hi = f[i + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double hz = double(k) * bin_hz;
            double w = 0.0;
            if (hz > lo && hz < mid)
                w = (hz - lo) / (mid - lo);
            else if (hz >= mid && hz < hi)
                w = (hi - hz) / (hi - mid);
            energies[i] += w * magnitude[k];
        }
    }
    return energies;
}

Matrix mfcc_rows(const Matrix& frames, double sample_rate) {
    require_nonempty(frames, "mfcc_rows");
    require_finite(frames, "mfcc_rows");
    if (frames.cols() < 32)
        throw std::invalid_argument("mfcc_rows: rows must hold at least 32 samples");

    constexpr std::size_t kFilters = 26;
    constexpr std::size_t kCepstra = 12;
    Matrix out(frames.rows(), kCepstra + 1);
    std::vector<double> row(frames.cols());
    for (std::size_t i = 0; i < frames.rows(); ++i) {
        double energy = 0.0;
        for (std::size_t j = 0; j < frames.cols(); ++j) {
            row[j] = frames(i, j);
            energy += row[j] * row[j];
        }
        std::vector<double> fb = mel_filter_energies(row, sample_rate, kFilters);
        for (double& e : fb) e = std::log(std::max(e, kLogFloor));
        const std::vector<double> cepstra = dct2_ortho(fb);
        for (std::size_t c = 0; c < kCepstra; ++c) out(i, c) = cepstra[c + 1];
        out(i, kCepstra) = std::log(std::max(energy, kLogFloor));
    }
    return out;
}

Matrix add_wgn(const Matrix& m, double snr_db, std::uint64_t seed) {
    require_nonempty(m, "add_wgn");
    require_finite(m, "add_wgn");
    if (m.is_zero()) throw std::invalid_argument("add_wgn: SNR is undefined for a zero matrix");

    const double fro = frobenius_norm(m);
    const double signal_power = fro * fro / double(m.size());
    const double noise_var = signal_power / std::pow(10.0, snr_db / 10.0);

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
    Matrix out = m;
    for (double& v : out.values()) v += noise(gen);
    return out;
}

Matrix add_large_errors(const Matrix& m, double fraction, std::uint64_t seed) {
    require_nonempty(m, "add_large_errors");
    require_finite(m, "add_large_errors");
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("add_large_errors: fraction must be in (0, 1]");

    const auto count = static_cast<std::size_t>(std::llround(fraction * double(m.size())));
    Matrix out = m;
    if (count == 0) return out;

    const double magnitude = 5.0 * max_abs(m);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> value(-magnitude, magnitude);
    // partial Fisher-Yates over the entry indices picks distinct positions
    std::vector<std::size_t> idx(m.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t pick = k + gen() % (idx.size() - k);
        std::swap(idx[k], idx[pick]);
        out.values()[idx[k]] = value(gen);
    }
    return out;
}

Matrix extract_feature(const AudioSegment& seg, const FeatureConfig& cfg) {
    const std::size_t frame_len = frame_length_for(seg.sample_rate, cfg.frame_seconds);
    Matrix frames = frame_segment(seg, frame_len, cfg.n_frames);
    if (cfg.use_rpca) {
        RpcaConfig rpca_cfg;
        rpca_cfg.lambda = cfg.rpca_lambda;
        rpca_cfg.tol = cfg.rpca_tol;
        rpca_cfg.max_iter = cfg.rpca_max_iter;
        frames = rpca_ialm(frames, rpca_cfg).a;
    }
    return mfcc_rows(frames, seg.sample_rate);
}

} // namespace tracenorm
