#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracenorm/audio.hpp"
#include "tracenorm/classifier.hpp"
#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// One manifest line: a WAV or matrix-text file with its label and split.
struct ManifestEntry {
    std::string path;
    double label = 0.0;  // -1 or +1
    bool train = true;
};

/// CSV with header "path,label,split"; relative paths resolve against the
/// manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// An in-memory dataset element. sample_rate > 0 marks an audio frame matrix
/// that still needs the MFCC transform after any corruption/cleanup step;
/// matrix-file entries carry sample_rate 0 and are used as features directly.
struct DatasetItem {
    std::string name;
    Matrix x;
    double label = 0.0;
    bool train = true;
    double sample_rate = 0.0;
};

/// Materialize manifest entries: WAV files are normalized and framed per cfg,
/// matrix files are loaded as-is.
std::vector<DatasetItem> load_items(std::span<const ManifestEntry> entries,
                                    const FeatureConfig& cfg = {});

struct CorruptionSpec {
    enum class Kind { none, wgn, large_errors };
    Kind kind = Kind::none;
    double snr_db = 0.0;
    double fraction = 0.0;
};

/// Per-item feature pipeline: corrupt (seeded per item), optionally replace
/// the matrix by its RPCA low-rank component, then MFCC for audio items.
struct PipelineConfig {
    CorruptionSpec corruption;
    bool use_rpca = false;
    double rpca_lambda = 0.0;  // 0: 1/sqrt(max(m, n))
    double rpca_tol = 1e-7;
    int rpca_max_iter = 500;
    std::uint64_t seed = 0;
};

LabeledSample finalize_item(const DatasetItem& item, const PipelineConfig& cfg,
                            std::uint64_t item_index);

/// Two-class synthetic source standing in for a labeled audio corpus. Every
/// sample of a class is sum_k a_k u_k v_k^T over that class's fixed rank-r
/// factors, with per-sample coefficients a_k ~ N(1, coeff_std^2), plus dense
/// N(0, noise_sigma^2). noise_sigma 0 keeps each matrix exactly rank r.
struct SynthConfig {
    std::size_t rows = 20;
    std::size_t cols = 15;
    std::size_t rank = 2;
    std::size_t train_per_class = 30;
    std::size_t test_per_class = 20;
    double coeff_std = 0.25;
    double noise_sigma = 0.0;
    std::uint64_t seed = 7;
};

std::vector<DatasetItem> make_synthetic_dataset(const SynthConfig& cfg);

/// Write items as matrix-text files plus a manifest.csv into dir (created if
/// missing). Returns the manifest path.
std::string write_dataset(const std::string& dir, std::span<const DatasetItem> items);

/// Seeded Fisher-Yates permutation of 0..count-1.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed);

/// Deterministic per-item RNG stream derived from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

} // namespace tracenorm
