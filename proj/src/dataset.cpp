#include "tracenorm/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tracenorm/errors.hpp"
#include "tracenorm/matrix_io.hpp"
#include "tracenorm/rpca.hpp"
#include "tracenorm/wav.hpp"

namespace fs = std::filesystem;

namespace tracenorm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return tail == suffix;
}

} // namespace

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open manifest '" + path + "'");
    const fs::path base = fs::path(path).parent_path();

    std::string line;
    if (!std::getline(is, line)) throw FormatError("manifest '" + path + "' is empty");
    if (trim(line) != "path,label,split")
        throw FormatError("manifest '" + path + "': expected header 'path,label,split'");

    std::vector<ManifestEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string path_field, label_field, split_field;
        if (!std::getline(ss, path_field, ',') || !std::getline(ss, label_field, ',') ||
            !std::getline(ss, split_field))
            throw FormatError("manifest line " + std::to_string(line_no) +
                              ": expected 'path,label,split'");
        ManifestEntry e;
        e.path = trim(path_field);
        if (e.path.empty())
            throw FormatError("manifest line " + std::to_string(line_no) + ": empty path");
        const std::string label = trim(label_field);
        if (label == "1" || label == "+1")
            e.label = 1.0;
        else if (label == "-1")
            e.label = -1.0;
        else
            throw FormatError("manifest line " + std::to_string(line_no) + ": label '" + label +
                              "' must be +1 or -1");
        const std::string split = trim(split_field);
        if (split == "train")
            e.train = true;
        else if (split == "test")
            e.train = false;
        else
            throw FormatError("manifest line " + std::to_string(line_no) + ": split '" + split +
                              "' must be train or test");
        const fs::path p(e.path);
        if (p.is_relative()) e.path = (base / p).string();
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw FormatError("manifest '" + path + "' lists no entries");
    return entries;
}

std::vector<DatasetItem> load_items(std::span<const ManifestEntry> entries,
                                    const FeatureConfig& cfg) {
    std::vector<DatasetItem> items;
    items.reserve(entries.size());
    for (const ManifestEntry& e : entries) {
        DatasetItem item;
        item.name = e.path;
        item.label = e.label;
        item.train = e.train;
        if (has_suffix(e.path, ".wav")) {
            AudioSegment seg = load_wav(e.path);
            const std::size_t frame_len = frame_length_for(seg.sample_rate, cfg.frame_seconds);
            item.x = frame_segment(seg, frame_len, cfg.n_frames);
            item.sample_rate = seg.sample_rate;
        } else {
            item.x = load_matrix(e.path);
            item.sample_rate = 0.0;
        }
        items.push_back(std::move(item));
    }
    return items;
}

LabeledSample finalize_item(const DatasetItem& item, const PipelineConfig& cfg,
                            std::uint64_t item_index) {
    Matrix x = item.x;
    switch (cfg.corruption.kind) {
        case CorruptionSpec::Kind::none:
            break;
        case CorruptionSpec::Kind::wgn:
            x = add_wgn(x, cfg.corruption.snr_db, mix_seed(cfg.seed, item_index));
            break;
        case CorruptionSpec::Kind::large_errors:
            x = add_large_errors(x, cfg.corruption.fraction, mix_seed(cfg.seed, item_index));
            break;
    }
    if (cfg.use_rpca) {
        RpcaConfig rpca_cfg;
        rpca_cfg.lambda = cfg.rpca_lambda;
        rpca_cfg.tol = cfg.rpca_tol;
        rpca_cfg.max_iter = cfg.rpca_max_iter;
        x = rpca_ialm(x, rpca_cfg).a;
    }
    if (item.sample_rate > 0.0) x = mfcc_rows(x, item.sample_rate);
    return {std::move(x), item.label};
}

std::vector<DatasetItem> make_synthetic_dataset(const SynthConfig& cfg) {
    if (cfg.rows == 0 || cfg.cols == 0) throw std::invalid_argument("synth: empty dimensions");
    if (cfg.rank == 0 || cfg.rank > std::min(cfg.rows, cfg.cols))
        throw std::invalid_argument("synth: rank must lie in [1, min(rows, cols)]");
    if (cfg.train_per_class == 0)
        throw std::invalid_argument("synth: need at least one training sample per class");

    std::mt19937_64 gen(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<DatasetItem> items;

    for (double label : {1.0, -1.0}) {
        Matrix u(cfg.rows, cfg.rank), v(cfg.cols, cfg.rank);
        for (double& x : u.values()) x = normal(gen);
        for (double& x : v.values()) x = normal(gen);
        const std::string cls = label > 0 ? "pos" : "neg";
        const std::size_t total = cfg.train_per_class + cfg.test_per_class;
        for (std::size_t i = 0; i < total; ++i) {
            Matrix x(cfg.rows, cfg.cols);
            for (std::size_t k = 0; k < cfg.rank; ++k) {
                const double a = 1.0 + cfg.coeff_std * normal(gen);
                for (std::size_t r = 0; r < cfg.rows; ++r)
                    for (std::size_t c = 0; c < cfg.cols; ++c) x(r, c) += a * u(r, k) * v(c, k);
            }
            if (cfg.noise_sigma > 0.0)
                for (double& e : x.values()) e += cfg.noise_sigma * normal(gen);

            DatasetItem item;
            const bool train = i < cfg.train_per_class;
            const std::size_t ordinal = train ? i : i - cfg.train_per_class;
            char name[64];
            std::snprintf(name, sizeof(name), "%s_%s_%03zu.txt", cls.c_str(),
                          train ? "train" : "test", ordinal);
            item.name = name;
            item.x = std::move(x);
            item.label = label;
            item.train = train;
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::string write_dataset(const std::string& dir, std::span<const DatasetItem> items) {
    fs::create_directories(dir);
    const fs::path base(dir);
    std::string manifest_path = (base / "manifest.csv").string();
    std::ofstream manifest(manifest_path);
    if (!manifest) throw FormatError("cannot open '" + manifest_path + "' for writing");
    manifest << "path,label,split\n";
    for (const DatasetItem& item : items) {
        const std::string file = fs::path(item.name).filename().string();
        save_matrix((base / file).string(), item.x);
        manifest << file << ',' << (item.label > 0 ? "+1" : "-1") << ','
                 << (item.train ? "train" : "test") << '\n';
    }
    if (!manifest) throw FormatError("write to '" + manifest_path + "' failed");
    return manifest_path;
}

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    for (std::size_t k = 0; k < count; ++k) idx[k] = k;
    std::mt19937_64 gen(seed);
    for (std::size_t k = count; k > 1; --k) std::swap(idx[k - 1], idx[gen() % k]);
    return idx;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace tracenorm
