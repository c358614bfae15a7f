#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tracenorm/matrix.hpp"
#include "tracenorm/rpca.hpp"

namespace tracenorm {

/// A mono audio clip. Consumers expect normalized amplitude (zero mean, unit
/// variance); normalized() produces that from raw samples.
struct AudioSegment {
    std::vector<double> samples;
    double sample_rate = 8000.0;
};

/// Rescale to zero mean and unit variance. Throws on constant signals.
AudioSegment normalized(AudioSegment seg);

/// Samples per frame for a given duration (default 20 ms), rounded.
std::size_t frame_length_for(double sample_rate, double frame_seconds = 0.020);

/// Stack n_frames consecutive non-overlapping frames as matrix rows; row i
/// holds samples [i*frame_len, (i+1)*frame_len). Surplus samples are dropped.
Matrix frame_segment(const AudioSegment& seg, std::size_t frame_len, std::size_t n_frames);

/// Peak frequencies of the triangular mel filters spanning 0 Hz to Nyquist.
std::vector<double> mel_center_frequencies(std::size_t n_filters, double sample_rate);

/// Triangular mel filterbank applied to the magnitude spectrum of one
/// Hamming-windowed frame (zero-padded to a power of two).
std::vector<double> mel_filter_energies(std::span<const double> frame, double sample_rate,
                                        std::size_t n_filters = 26);

/// Per row: 12 cepstral coefficients (DCT of the floored log filterbank,
/// dropping the order-0 term) plus the log frame energy as a 13th column.
Matrix mfcc_rows(const Matrix& frames, double sample_rate);

/// Add white Gaussian noise whose variance hits the requested SNR against
/// the mean entry power of m. Deterministic for a fixed seed.
Matrix add_wgn(const Matrix& m, double snr_db, std::uint64_t seed);

/// Replace round(fraction * m.size()) distinct entries, chosen uniformly,
/// with draws from uniform[-5*max_abs(m), +5*max_abs(m)].
Matrix add_large_errors(const Matrix& m, double fraction, std::uint64_t seed);

struct FeatureConfig {
    std::size_t n_frames = 50;
    double frame_seconds = 0.020;
    bool use_rpca = false;
    double rpca_lambda = 0.0;  // 0: 1/sqrt(max(m, n)) of the frame matrix
    double rpca_tol = 1e-7;
    int rpca_max_iter = 500;
};

/// frame_segment, optionally replaced by its RPCA low-rank component, then
/// mfcc_rows.
Matrix extract_feature(const AudioSegment& seg, const FeatureConfig& cfg = {});

} // namespace tracenorm
