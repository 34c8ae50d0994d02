#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "medmark/corpus.hpp"
#include "medmark/errors.hpp"
#include "medmark/image_io.hpp"
#include "medmark/metrics.hpp"
#include "medmark/parallel.hpp"
#include "medmark/stats.hpp"
#include "medmark/version.hpp"
#include "medmark/watermark.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit codes: 0 success, 1 usage/input error, 2 partial failure, 3 detection-negative
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitNotDetected = 3;

struct RunConfig {
    double step = 0.036;
    int block_size = 4;
    int coeff_row = 2;
    int coeff_col = 2;
    double threshold = 0.95;
    std::string tau = "auto";
    std::string delta = "auto";
    std::string features = "builtin";
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = auto
    std::string subband = "LL";

    medmark::EmbedConfig embed_config() const {
        medmark::EmbedConfig cfg;
        cfg.block_size = block_size;
        cfg.coeff_row = coeff_row;
        cfg.coeff_col = coeff_col;
        cfg.quant_step = step;
        if (subband == "LL") cfg.subband = medmark::Subband::LL;
        else if (subband == "LH") cfg.subband = medmark::Subband::LH;
        else if (subband == "HL") cfg.subband = medmark::Subband::HL;
        else if (subband == "HH") cfg.subband = medmark::Subband::HH;
        else throw medmark::ArgumentError("unknown subband: " + subband);
        return cfg;
    }

    // Echoed into every report. Thread count intentionally left out: outputs
    // are identical for any worker count, and the echo must not break that.
    json echo() const {
        json j;
        j["step"] = step;
        j["block_size"] = block_size;
        j["coeff"] = {coeff_row, coeff_col};
        j["subband"] = subband;
        j["threshold"] = threshold;
        j["tau"] = tau;
        j["delta"] = delta;
        j["features"] = features;
        j["seed"] = seed;
        return j;
    }
};

double parse_threshold_value(const std::string& s, const char* name) {
    if (s == "auto") return medmark::kAutoThreshold;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw medmark::ArgumentError(std::string(name) + " must be a number or 'auto'");
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json base_report(const std::string& command, const RunConfig& rc) {
    json j;
    j["command"] = command;
    j["version"] = medmark::kVersion;
    j["timestamp"] = utc_timestamp();
    j["config"] = rc.echo();
    return j;
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

// Plain key=value file; '#' starts a comment. Flags given on the command
// line override file values.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw medmark::IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

struct FlagSources {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> file_values;

    // file value applies only when the flag was not given on the command line
    template <typename T>
    void merge(const std::string& flag, const std::string& key, T& target) {
        if (app->count(flag) > 0) return;
        const auto it = file_values.find(key);
        if (it == file_values.end()) return;
        std::istringstream ss(it->second);
        T v;
        if (ss >> v) target = v;
    }

    void merge_str(const std::string& flag, const std::string& key, std::string& target) {
        if (app->count(flag) > 0) return;
        const auto it = file_values.find(key);
        if (it != file_values.end()) target = it->second;
    }
};

void apply_common(CLI::App* cmd, const std::string& config_path, RunConfig& rc, std::string& coeff_text) {
    FlagSources src;
    src.app = cmd;
    if (!config_path.empty()) src.file_values = parse_config_file(config_path);

    src.merge("--step", "step", rc.step);
    src.merge("--block-size", "block-size", rc.block_size);
    src.merge("--threshold", "threshold", rc.threshold);
    src.merge_str("--tau", "tau", rc.tau);
    src.merge_str("--delta", "delta", rc.delta);
    src.merge_str("--features", "features", rc.features);
    src.merge("--seed", "seed", rc.seed);
    src.merge_str("--coeff", "coeff", coeff_text);
    src.merge_str("--subband", "subband", rc.subband);
    src.merge("--threads", "threads", rc.threads);

    if (cmd->count("--threads") == 0 && src.file_values.find("threads") == src.file_values.end()) {
        if (const char* env = std::getenv("MEDMARK_THREADS")) {
            try {
                rc.threads = std::stoi(env);
            } catch (const std::exception&) {
                throw medmark::ArgumentError("MEDMARK_THREADS is not a number");
            }
        }
    }

    if (!coeff_text.empty()) {
        const auto comma = coeff_text.find(',');
        if (comma == std::string::npos) throw medmark::ArgumentError("--coeff expects row,col");
        try {
            rc.coeff_row = std::stoi(coeff_text.substr(0, comma));
            rc.coeff_col = std::stoi(coeff_text.substr(comma + 1));
        } catch (const std::exception&) {
            throw medmark::ArgumentError("--coeff expects row,col");
        }
    }

    medmark::set_threads(rc.threads);
}

// ---- embed ---------------------------------------------------------------

int cmd_embed(const std::string& in_dir, const std::string& out_dir, const std::string& text,
              const RunConfig& rc) {
    const medmark::DatasetManifest manifest = medmark::scan_dataset(in_dir);
    if (manifest.entries.empty()) {
        std::cerr << "embed: no inputs under " << in_dir << "\n";
        return kExitUsage;
    }

    const medmark::EmbedConfig cfg = rc.embed_config();
    const medmark::WatermarkPayload payload = medmark::WatermarkPayload::from_text(text);

    for (const auto& e : manifest.entries) {
        fs::create_directories((fs::path(out_dir) / e.path).parent_path());
    }

    const std::size_t n = manifest.entries.size();
    struct FileResult {
        json j;
        bool ok = false;
    };
    std::vector<FileResult> results(n);

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::string rel = manifest.entries[idx].path;
        json fj;
        fj["path"] = rel;
        try {
            const medmark::ImageGray img = medmark::load_image(manifest.full_path(idx));
            const medmark::ImageGray marked = medmark::embed(img, payload, cfg);
            medmark::save_image(marked, (fs::path(out_dir) / rel).string(), img.source_bit_depth);

            const auto p = medmark::psnr(img, marked);
            fj["psnr_db"] = p ? json(*p) : json(nullptr);
            const std::size_t cap = medmark::watermark_capacity(img.width, img.height, cfg);
            fj["capacity_bits"] = cap;
            fj["repetitions"] = cap / payload.bits.size();
            fj["status"] = "ok";
            results[idx].ok = true;
        } catch (const std::exception& ex) {
            fj["status"] = "skipped";
            fj["error"] = ex.what();
        }
        results[idx].j = std::move(fj);
    }

    json rep = base_report("embed", rc);
    rep["input_root"] = in_dir;
    rep["output_root"] = out_dir;
    rep["payload_text"] = text;
    rep["payload_bits"] = payload.bits.size();
    rep["files"] = json::array();
    std::size_t ok = 0;
    for (const auto& r : results) {
        rep["files"].push_back(r.j);
        if (r.ok) ++ok;
        else std::cerr << "embed: skipped " << r.j["path"].get<std::string>() << ": "
                       << r.j["error"].get<std::string>() << "\n";
    }
    rep["ok_count"] = ok;
    rep["skipped_count"] = n - ok;
    emit(rep);
    return ok == n ? kExitOk : kExitPartial;
}

// ---- extract / detect ------------------------------------------------------

int cmd_extract(const std::string& in_dir, std::optional<std::size_t> bit_length, const RunConfig& rc) {
    const medmark::DatasetManifest manifest = medmark::scan_dataset(in_dir);
    if (manifest.entries.empty()) {
        std::cerr << "extract: no inputs under " << in_dir << "\n";
        return kExitUsage;
    }
    const medmark::EmbedConfig cfg = rc.embed_config();

    const std::size_t n = manifest.entries.size();
    std::vector<json> rows(n);
    std::vector<char> good(n, 0);

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        json fj;
        fj["path"] = manifest.entries[idx].path;
        try {
            const auto res = medmark::extract(medmark::load_image(manifest.full_path(idx)), cfg,
                                              bit_length, rc.threshold);
            fj["decoded_text"] = res.decoded_text ? json(*res.decoded_text) : json(nullptr);
            fj["bit_accuracy"] = res.bit_accuracy;
            fj["detected"] = res.detected;
            fj["votes_per_bit"] = res.votes_per_bit;
            good[idx] = res.decoded_text.has_value() ? 1 : 0;
        } catch (const std::exception& ex) {
            fj["decoded_text"] = nullptr;
            fj["detected"] = false;
            fj["error"] = ex.what();
        }
        rows[idx] = std::move(fj);
    }

    json rep = base_report("extract", rc);
    rep["input_root"] = in_dir;
    rep["files"] = json::array();
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
        rep["files"].push_back(rows[i]);
        all = all && good[i];
    }
    emit(rep);
    return all ? kExitOk : kExitNotDetected;
}

int cmd_detect(const std::string& in_dir, const std::string& text, const RunConfig& rc) {
    const medmark::DatasetManifest manifest = medmark::scan_dataset(in_dir);
    if (manifest.entries.empty()) {
        std::cerr << "detect: no inputs under " << in_dir << "\n";
        return kExitUsage;
    }
    const medmark::EmbedConfig cfg = rc.embed_config();
    const medmark::WatermarkPayload expected = medmark::WatermarkPayload::from_text(text);

    const std::size_t n = manifest.entries.size();
    std::vector<json> rows(n);
    std::vector<char> hit(n, 0);

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        json fj;
        fj["path"] = manifest.entries[idx].path;
        try {
            const auto res = medmark::detect(medmark::load_image(manifest.full_path(idx)), expected, cfg,
                                             rc.threshold);
            fj["bit_accuracy"] = res.bit_accuracy;
            fj["detected"] = res.detected;
            hit[idx] = res.detected ? 1 : 0;
        } catch (const std::exception& ex) {
            // unreadable files count as not detected
            fj["bit_accuracy"] = 0.0;
            fj["detected"] = false;
            fj["error"] = ex.what();
        }
        rows[idx] = std::move(fj);
    }

    json rep = base_report("detect", rc);
    rep["input_root"] = in_dir;
    rep["expected_text"] = text;
    rep["files"] = json::array();
    std::size_t detected = 0;
    for (std::size_t i = 0; i < n; ++i) {
        rep["files"].push_back(rows[i]);
        detected += hit[i];
    }
    rep["detected_count"] = detected;
    emit(rep);
    return detected == n ? kExitOk : kExitNotDetected;
}

// ---- quality ---------------------------------------------------------------

json quality_to_json(const medmark::QualityReport& q) {
    json j;
    j["fidelity"] = q.fidelity;
    j["variety_bytes"] = q.variety_bytes ? json(*q.variety_bytes) : json(nullptr);
    j["fid"] = q.fid;
    j["privacy"] = q.privacy ? json(*q.privacy) : json(nullptr);
    j["psnr_mean_db"] = q.psnr_mean_db ? json(*q.psnr_mean_db) : json(nullptr);
    j["psnr_infinite"] = q.psnr_infinite;
    j["tau_used"] = q.tau_used;
    j["delta_used"] = q.delta_used;
    return j;
}

json relative_delta(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a || !b) return nullptr;
    if (*a == 0.0) return *b == 0.0 ? json(0.0) : json(nullptr);
    return json((*b - *a) / std::abs(*a));
}

int cmd_quality(const std::string& real_src, const std::string& synth_src,
                const std::string& paired_original, const std::string& compare_src,
                bool synth_role_real, const RunConfig& rc) {
    std::size_t feature_dim = 288;
    if (rc.features != "builtin") {
        const auto colon = rc.features.find(':');
        if (rc.features.rfind("builtin:", 0) == 0) {
            feature_dim = std::stoul(rc.features.substr(colon + 1));
        } else {
            throw medmark::ArgumentError(
                "--features accepts 'builtin' or 'builtin:<dim>'; pass .feat files as sources");
        }
    }

    medmark::QualityConfig qc;
    qc.tau = parse_threshold_value(rc.tau, "tau");
    qc.delta = parse_threshold_value(rc.delta, "delta");
    qc.feature_dim = feature_dim;
    qc.include_privacy = !synth_role_real;
    qc.feature_source = rc.features;

    const medmark::MetricSource real = medmark::load_metric_source(real_src, feature_dim);
    const medmark::MetricSource synth = medmark::load_metric_source(synth_src, feature_dim);
    std::optional<medmark::MetricSource> paired;
    if (!paired_original.empty()) paired = medmark::load_metric_source(paired_original, feature_dim);

    const medmark::QualityReport q =
        medmark::quality_report(real, synth, qc, paired ? &*paired : nullptr);

    json rep = base_report("quality", rc);
    rep["real_source"] = real_src;
    rep["synth_source"] = synth_src;
    rep.update(quality_to_json(q));

    if (!compare_src.empty()) {
        // same real side and same resolved thresholds, so deltas isolate the
        // difference between the two synthetic sets
        medmark::QualityConfig qc2 = qc;
        qc2.tau = q.tau_used;
        qc2.delta = q.delta_used;
        const medmark::MetricSource synth2 = medmark::load_metric_source(compare_src, feature_dim);
        const medmark::QualityReport q2 =
            medmark::quality_report(real, synth2, qc2, paired ? &*paired : nullptr);
        rep["compare_source"] = compare_src;
        rep["compare"] = quality_to_json(q2);
        json deltas;
        deltas["fidelity"] = relative_delta(q.fidelity, q2.fidelity);
        deltas["variety_bytes"] = relative_delta(q.variety_bytes, q2.variety_bytes);
        deltas["fid"] = relative_delta(q.fid, q2.fid);
        deltas["privacy"] = relative_delta(q.privacy, q2.privacy);
        rep["deltas_relative"] = deltas;
    }
    emit(rep);
    return kExitOk;
}

// ---- utility-stats -----------------------------------------------------------

struct Predictions {
    std::map<std::string, std::pair<int, int>> rows;  // id -> (label, pred)
};

Predictions read_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw medmark::IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw medmark::FormatError("empty prediction file: " + path);
    // tolerate \r\n
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,label,pred") throw medmark::FormatError("expected header 'id,label,pred' in " + path);

    Predictions p;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw medmark::FormatError(path + ":" + std::to_string(lineno) + ": expected id,label,pred");
        }
        const std::string id = line.substr(0, c1);
        int label, pred;
        try {
            label = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
            pred = std::stoi(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw medmark::FormatError(path + ":" + std::to_string(lineno) + ": label/pred must be 0 or 1");
        }
        if (!p.rows.emplace(id, std::make_pair(label, pred)).second) {
            throw medmark::FormatError(path + ": duplicate id '" + id + "'");
        }
    }
    if (p.rows.empty()) throw medmark::FormatError("no prediction rows in " + path);
    return p;
}

int cmd_utility_stats(const std::string& baseline_csv, const std::string& augmented_csv,
                      const std::string& method_name, const RunConfig& rc) {
    const Predictions base = read_predictions(baseline_csv);
    const Predictions aug = read_predictions(augmented_csv);

    std::vector<int> labels, preds_a, preds_b;
    for (const auto& [id, row] : base.rows) {
        const auto it = aug.rows.find(id);
        if (it == aug.rows.end()) throw medmark::ArgumentError("id '" + id + "' missing from " + augmented_csv);
        if (it->second.first != row.first) {
            throw medmark::ArgumentError("label mismatch for id '" + id + "'");
        }
        labels.push_back(row.first);
        preds_a.push_back(row.second);
        preds_b.push_back(it->second.second);
    }
    if (aug.rows.size() != base.rows.size()) {
        throw medmark::ArgumentError("prediction files cover different id sets");
    }

    const medmark::PairedOutcomes po = medmark::paired_outcomes(labels, preds_a, preds_b);
    const double acc_a = static_cast<double>(po.n10 + po.n11) / static_cast<double>(po.total());
    const double acc_b = static_cast<double>(po.n01 + po.n11) / static_cast<double>(po.total());
    const double delta = medmark::zero_normalized_deltas(acc_a, {acc_b})[0];

    json rep = base_report("utility-stats", rc);
    rep["baseline_accuracy"] = acc_a;
    rep["augmented_accuracy"] = acc_b;
    rep["delta_vs_baseline"] = delta;
    rep["items"] = po.total();

    if (po.b() + po.c() == 0) {
        rep["mcnemar"] = nullptr;
        rep["significant_0_05"] = nullptr;
        rep["note"] = "no discordant pairs; McNemar is undefined";
    } else {
        medmark::McNemarMethod method = medmark::McNemarMethod::Chi2CC;
        if (method_name == "exact") method = medmark::McNemarMethod::Exact;
        else if (method_name == "auto") method = medmark::McNemarMethod::Auto;
        else if (method_name != "chi2") throw medmark::ArgumentError("--method must be chi2, exact or auto");

        const medmark::McNemarResult mec = medmark::mcnemar(po, method);
        json mj;
        mj["b"] = po.b();
        mj["c"] = po.c();
        mj["statistic"] = mec.statistic;
        mj["p_value"] = mec.p_value;
        mj["method"] = mec.method_used == medmark::McNemarMethod::Exact ? "exact" : "chi2_cc";
        rep["mcnemar"] = mj;
        rep["significant_0_05"] = mec.p_value < 0.05;
    }
    emit(rep);
    return kExitOk;
}

// ---- residual / gen-corpus -----------------------------------------------------

int cmd_residual(const std::string& original, const std::string& watermarked, const std::string& out,
                 const RunConfig& rc) {
    const medmark::ImageGray a = medmark::load_image(original);
    const medmark::ImageGray b = medmark::load_image(watermarked);
    const medmark::ImageGray r = medmark::residual(a, b);
    medmark::save_image(r, out, 8);

    json rep = base_report("residual", rc);
    rep["original"] = original;
    rep["watermarked"] = watermarked;
    rep["output"] = out;
    emit(rep);
    return kExitOk;
}

int cmd_gen_corpus(const std::string& out_dir, std::uint64_t n, const RunConfig& rc) {
    medmark::gen_corpus(out_dir, n, rc.seed);
    json rep = base_report("gen-corpus", rc);
    rep["output_root"] = out_dir;
    rep["count"] = n;
    emit(rep);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"medmark: invisible watermarking and quality metrics for grayscale medical images"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string config_path, coeff_text;
    std::string in_dir, out_dir, text, real_src, synth_src, paired_original, compare_src;
    std::string baseline_csv, augmented_csv, method = "chi2";
    std::string orig_path, marked_path, out_path;
    std::uint64_t corpus_n = 0;
    long long extract_bits = -1;
    bool synth_role_real = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--step", rc.step, "QIM quantization step");
        cmd->add_option("--block-size", rc.block_size, "DCT block edge length");
        cmd->add_option("--coeff", coeff_text, "carrier coefficient as row,col");
        cmd->add_option("--subband", rc.subband, "carrier subband: LL, LH, HL or HH");
        cmd->add_option("--threshold", rc.threshold, "detection threshold on bit accuracy");
        cmd->add_option("--tau", rc.tau, "fidelity distance threshold or 'auto'");
        cmd->add_option("--delta", rc.delta, "privacy distance threshold or 'auto'");
        cmd->add_option("--features", rc.features, "feature extractor: builtin or builtin:<dim>");
        cmd->add_option("--seed", rc.seed, "RNG seed for corpus generation");
        cmd->add_option("--threads", rc.threads, "worker count (0 = auto, MEDMARK_THREADS as fallback)");
        cmd->add_option("--config", config_path, "key=value config file; flags override it");
        return cmd;
    };

    CLI::App* embed = add_common(app.add_subcommand("embed", "watermark every image in a directory"));
    embed->add_option("in_dir", in_dir)->required();
    embed->add_option("out_dir", out_dir)->required();
    embed->add_option("--text", text, "payload text")->required();

    CLI::App* extract = add_common(app.add_subcommand("extract", "blind-extract payloads"));
    extract->add_option("in_dir", in_dir)->required();
    extract->add_option("--length", extract_bits, "known payload bit length");

    CLI::App* detect = add_common(app.add_subcommand("detect", "verify a known payload"));
    detect->add_option("in_dir", in_dir)->required();
    detect->add_option("--text", text, "expected payload text")->required();

    CLI::App* quality = add_common(app.add_subcommand("quality", "fidelity/variety/FID/privacy report"));
    quality->add_option("real", real_src)->required();
    quality->add_option("synth", synth_src)->required();
    quality->add_option("--paired-original", paired_original, "original images paired with synth for PSNR");
    quality->add_option("--compare", compare_src, "second synthetic source; appends relative deltas");
    quality->add_flag("--synth-role-real", synth_role_real, "synth side is real data; omit privacy");

    CLI::App* ustats = add_common(app.add_subcommand("utility-stats", "McNemar + accuracy deltas from prediction CSVs"));
    ustats->add_option("baseline_csv", baseline_csv)->required();
    ustats->add_option("augmented_csv", augmented_csv)->required();
    ustats->add_option("--method", method, "chi2 (default), exact or auto");

    CLI::App* residual = add_common(app.add_subcommand("residual", "normalized difference image"));
    residual->add_option("original", orig_path)->required();
    residual->add_option("watermarked", marked_path)->required();
    residual->add_option("output", out_path)->required();

    CLI::App* gen = add_common(app.add_subcommand("gen-corpus", "deterministic procedural test corpus"));
    gen->add_option("out_dir", out_dir)->required();
    gen->add_option("--n", corpus_n, "image count")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc_parse = app.exit(e);
        return rc_parse == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_common(active, config_path, rc, coeff_text);

        if (active == embed) return cmd_embed(in_dir, out_dir, text, rc);
        if (active == extract) {
            std::optional<std::size_t> len;
            if (extract_bits >= 0) len = static_cast<std::size_t>(extract_bits);
            return cmd_extract(in_dir, len, rc);
        }
        if (active == detect) return cmd_detect(in_dir, text, rc);
        if (active == quality) {
            return cmd_quality(real_src, synth_src, paired_original, compare_src, synth_role_real, rc);
        }
        if (active == ustats) return cmd_utility_stats(baseline_csv, augmented_csv, method, rc);
        if (active == residual) return cmd_residual(orig_path, marked_path, out_path, rc);
        if (active == gen) return cmd_gen_corpus(out_dir, corpus_n, rc);
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
