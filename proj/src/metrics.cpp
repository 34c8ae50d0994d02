#define EIGEN_DONT_PARALLELIZE  // fixed-order reductions keep reports bit-reproducible

#include "medmark/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>

#include "medmark/compress.hpp"

namespace fs = std::filesystem;

namespace medmark {

namespace {

constexpr double kEigenvalueTol = -1e-8;

double median(std::vector<double> v) {
    if (v.empty()) throw ArgumentError("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::MatrixXd to_matrix(const std::vector<double>& cov, std::size_t d) {
    Eigen::MatrixXd m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cov[r * d + c];
    }
    return m;
}

// Eigendecomposition with the PSD clip: round-off negatives go to zero,
// anything below the tolerance is a real defect.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) throw NumericalError(std::string("eigendecomposition failed for ") + what);
    Eigen::VectorXd ev = eig.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < kEigenvalueTol) throw NumericalError(std::string(what) + " is not positive semidefinite");
        ev[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
    }
    return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

double sqrt_trace_psd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) throw NumericalError(std::string("eigendecomposition failed for ") + what);
    double t = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double ev = eig.eigenvalues()[i];
        if (ev < kEigenvalueTol) throw NumericalError(std::string(what) + " is not positive semidefinite");
        if (ev > 0.0) t += std::sqrt(ev);
    }
    return t;
}

std::vector<double> loo_nn_distances(const FeatureSet& fs) {
    if (fs.n < 2) throw ArgumentError("auto threshold needs at least two reference rows");
    return nearest_neighbor_distances(fs, fs, /*exclude_self=*/true);
}

}  // namespace

GaussianStats fit_gaussian(const FeatureSet& fs) {
    fs.validate();
    if (fs.n < 2) throw ArgumentError("covariance needs at least two rows");

    GaussianStats g;
    g.n = fs.n;
    g.d = fs.d;
    g.mean.assign(fs.d, 0.0);
    for (std::size_t i = 0; i < fs.n; ++i) {
        const double* row = fs.row(i);
        for (std::size_t j = 0; j < fs.d; ++j) g.mean[j] += row[j];
    }
    for (double& m : g.mean) m /= static_cast<double>(fs.n);

    Eigen::MatrixXd centered(fs.n, fs.d);
    for (std::size_t i = 0; i < fs.n; ++i) {
        const double* row = fs.row(i);
        for (std::size_t j = 0; j < fs.d; ++j) {
            centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j] - g.mean[j];
        }
    }
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(fs.n - 1);
    cov = 0.5 * (cov + cov.transpose());

    g.cov.resize(fs.d * fs.d);
    for (std::size_t r = 0; r < fs.d; ++r) {
        for (std::size_t c = 0; c < fs.d; ++c) {
            g.cov[r * fs.d + c] = cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return g;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    if (a.d != b.d) throw ArgumentError("Gaussian dimensions differ");
    if (a.d == 0) throw ArgumentError("empty Gaussian");

    double mean_sq = 0.0;
    for (std::size_t i = 0; i < a.d; ++i) {
        const double diff = a.mean[i] - b.mean[i];
        mean_sq += diff * diff;
    }

    const Eigen::MatrixXd sa = to_matrix(a.cov, a.d);
    const Eigen::MatrixXd sb = to_matrix(b.cov, b.d);
    const Eigen::MatrixXd root_a = psd_sqrt(sa, "first covariance");
    Eigen::MatrixXd inner = root_a * sb * root_a;
    inner = 0.5 * (inner + inner.transpose());
    const double cross = sqrt_trace_psd(inner, "covariance product");

    const double result = mean_sq + sa.trace() + sb.trace() - 2.0 * cross;
    return result > 0.0 ? result : 0.0;
}

std::vector<double> nearest_neighbor_distances(const FeatureSet& queries, const FeatureSet& base,
                                               bool exclude_self) {
    queries.validate();
    base.validate();
    if (queries.d != base.d) throw ArgumentError("feature dimensions differ");
    if (exclude_self && base.n < 2) throw ArgumentError("leave-one-out needs at least two rows");

    const std::size_t d = queries.d;
    std::vector<double> out(queries.n);

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(queries.n); ++i) {
        const double* q = queries.row(static_cast<std::size_t>(i));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < base.n; ++j) {
            if (exclude_self && j == static_cast<std::size_t>(i)) continue;
            const double* r = base.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = q[k] - r[k];
                acc += diff * diff;
            }
            best = std::min(best, acc);
        }
        out[static_cast<std::size_t>(i)] = std::sqrt(best);
    }
    return out;
}

double fidelity(const FeatureSet& real, const FeatureSet& synth, double tau) {
    if (tau <= 0.0 && tau != kAutoThreshold) throw ArgumentError("tau must be positive or auto");
    if (tau == kAutoThreshold) tau = median(loo_nn_distances(real));
    const std::vector<double> dists = nearest_neighbor_distances(synth, real);
    std::size_t realistic = 0;
    for (double dist : dists) {
        if (dist <= tau) ++realistic;
    }
    return static_cast<double>(realistic) / static_cast<double>(dists.size());
}

double privacy(const FeatureSet& synth, const FeatureSet& train, double delta) {
    if (delta <= 0.0 && delta != kAutoThreshold) throw ArgumentError("delta must be positive or auto");
    if (delta == kAutoThreshold) delta = median(loo_nn_distances(train));
    const std::vector<double> dists = nearest_neighbor_distances(synth, train);
    std::size_t kept = 0;
    for (double dist : dists) {
        if (dist >= delta) ++kept;
    }
    return static_cast<double>(kept) / static_cast<double>(dists.size());
}

double variety(const DatasetManifest& manifest) {
    if (manifest.entries.empty()) throw ArgumentError("variety of an empty manifest");

    const std::size_t n = manifest.entries.size();
    std::vector<std::size_t> sizes(n, 0);
    std::vector<std::string> failures(n);

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            sizes[static_cast<std::size_t>(i)] = lossless_compress_size(load_image(manifest.full_path(static_cast<std::size_t>(i))));
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (const std::string& f : failures) {
        if (!f.empty()) throw IoError("variety: " + f);
    }

    std::uint64_t total = 0;
    for (std::size_t s : sizes) total += s;
    return static_cast<double>(total) / static_cast<double>(n);
}

std::optional<double> psnr(const ImageGray& a, const ImageGray& b) {
    if (a.width != b.width || a.height != b.height) throw ArgumentError("psnr inputs have mismatched dimensions");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        sum_sq += d * d;
    }
    if (sum_sq == 0.0) return std::nullopt;  // infinite
    const double mse = sum_sq / static_cast<double>(a.pixel_count());
    return 10.0 * std::log10(1.0 / mse);
}

MetricSource load_metric_source(const std::string& path, std::size_t feature_dim) {
    MetricSource src;
    if (fs::is_directory(path)) {
        DatasetManifest manifest = scan_dataset(path);
        if (manifest.entries.empty()) throw ArgumentError("no images found in " + path);

        const std::size_t n = manifest.entries.size();
        src.features.n = n;
        src.features.d = feature_dim;
        src.features.values.assign(n * feature_dim, 0.0);
        src.features.ids.resize(n);
        std::vector<std::string> failures(n);

#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            try {
                const std::vector<double> f = extract_features_builtin(load_image(manifest.full_path(idx)), feature_dim);
                std::copy(f.begin(), f.end(), src.features.row(idx));
            } catch (const std::exception& e) {
                failures[idx] = e.what();
            }
        }
        for (const std::string& f : failures) {
            if (!f.empty()) throw IoError("feature extraction: " + f);
        }
        for (std::size_t i = 0; i < n; ++i) src.features.ids[i] = manifest.entries[i].path;
        src.manifest = std::move(manifest);
    } else if (fs::is_regular_file(path)) {
        src.features = read_features(path);
    } else {
        throw IoError("no such source: " + path);
    }
    return src;
}

QualityReport quality_report(const MetricSource& real, const MetricSource& synth,
                             const QualityConfig& cfg, const MetricSource* paired_original) {
    real.features.validate();
    synth.features.validate();
    if (real.features.d != synth.features.d) {
        throw ArgumentError("feature dimension mismatch: real d=" + std::to_string(real.features.d) +
                            ", synth d=" + std::to_string(synth.features.d));
    }

    QualityReport rep;
    rep.config = cfg;
    rep.tau_used = cfg.tau == kAutoThreshold ? median(loo_nn_distances(real.features)) : cfg.tau;
    rep.delta_used = cfg.delta == kAutoThreshold ? median(loo_nn_distances(real.features)) : cfg.delta;

    rep.fidelity = fidelity(real.features, synth.features, rep.tau_used);
    rep.fid = frechet_distance(fit_gaussian(real.features), fit_gaussian(synth.features));
    if (cfg.include_privacy) rep.privacy = privacy(synth.features, real.features, rep.delta_used);
    if (synth.manifest) rep.variety_bytes = variety(*synth.manifest);

    if (paired_original) {
        if (!synth.manifest || !paired_original->manifest) {
            throw ArgumentError("PSNR pairing needs image directories on both sides");
        }
        // pair by relative path; both manifests are sorted
        double sum = 0.0;
        std::size_t finite = 0, paired = 0;
        for (const auto& e : synth.manifest->entries) {
            const auto& orig = paired_original->manifest->entries;
            const auto it = std::lower_bound(orig.begin(), orig.end(), e.path,
                                             [](const ManifestEntry& a, const std::string& p) { return a.path < p; });
            if (it == orig.end() || it->path != e.path) continue;
            ++paired;
            const std::size_t oi = static_cast<std::size_t>(it - orig.begin());
            const auto p = psnr(load_image(paired_original->manifest->full_path(oi)),
                                load_image(synth.manifest->full_path(static_cast<std::size_t>(&e - synth.manifest->entries.data()))));
            if (p) {
                sum += *p;
                ++finite;
            } else {
                rep.psnr_infinite = true;
            }
        }
        if (paired == 0) throw ArgumentError("no common paths between synth and paired original");
        if (finite > 0) rep.psnr_mean_db = sum / static_cast<double>(finite);
    }
    return rep;
}

}  // namespace medmark
