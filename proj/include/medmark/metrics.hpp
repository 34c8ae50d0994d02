#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medmark/features.hpp"
#include "medmark/image_io.hpp"

namespace medmark {

struct GaussianStats {
    std::vector<double> mean;  // d
    std::vector<double> cov;   // d x d row-major, symmetric
    std::size_t n = 0;
    std::size_t d = 0;
};

// Sample mean and covariance with 1/(n-1) normalization, symmetrized as
// (C + C^T)/2. Requires n >= 2.
GaussianStats fit_gaussian(const FeatureSet& fs);

// Frechet distance between Gaussians:
//   ||mu1-mu2||^2 + Tr(S1 + S2 - 2*(S1*S2)^(1/2))
// The matrix square root is computed through the symmetric form
// S1^(1/2) * S2 * S1^(1/2) with eigendecompositions of symmetric PSD
// matrices; eigenvalues below -1e-8 are a numerical error, smaller negative
// ones are clipped to 0. The result is clamped at 0.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

// Euclidean distance from every query row to its nearest base row.
// exclude_self skips base row j == query row i (leave-one-out on one set).
std::vector<double> nearest_neighbor_distances(const FeatureSet& queries, const FeatureSet& base,
                                               bool exclude_self = false);

// Threshold "auto": the median of real-to-real leave-one-out NN distances.
inline constexpr double kAutoThreshold = -1.0;

// Fraction of synthetic rows whose NN distance to the real set is <= tau.
double fidelity(const FeatureSet& real, const FeatureSet& synth, double tau = kAutoThreshold);

// Fraction of synthetic rows whose NN distance to the training set is >= delta
// (the non-memorized fraction).
double privacy(const FeatureSet& synth, const FeatureSet& train, double delta = kAutoThreshold);

// Mean lossless compressed size in bytes over the manifest's images; one
// compressor configuration for every image, so only values computed by the
// same build are comparable.
double variety(const DatasetManifest& manifest);

// 10*log10(1/MSE) on the [0,1] scale; nullopt marks identical images
// (infinite PSNR).
std::optional<double> psnr(const ImageGray& a, const ImageGray& b);

struct QualityConfig {
    double tau = kAutoThreshold;
    double delta = kAutoThreshold;
    std::size_t feature_dim = 288;
    bool include_privacy = true;  // off when the evaluated set is itself real data
    std::string feature_source = "builtin";
};

struct QualityReport {
    double fidelity = 0.0;
    std::optional<double> variety_bytes;  // absent when the source has no images
    double fid = 0.0;
    std::optional<double> privacy;
    std::optional<double> psnr_mean_db;
    bool psnr_infinite = false;
    double tau_used = 0.0;
    double delta_used = 0.0;
    QualityConfig config;
};

// A metric source is a directory of images (features via the builtin
// extractor) or a .feat file written by an external extractor.
struct MetricSource {
    FeatureSet features;
    std::optional<DatasetManifest> manifest;  // present for directory sources
};

MetricSource load_metric_source(const std::string& path, std::size_t feature_dim = 288);

// Assembles fidelity, variety, FID and privacy for a real/synthetic pair;
// psnr_mean is filled when a paired original set is supplied (matched by
// manifest path).
QualityReport quality_report(const MetricSource& real, const MetricSource& synth,
                             const QualityConfig& cfg = {},
                             const MetricSource* paired_original = nullptr);

}  // namespace medmark
