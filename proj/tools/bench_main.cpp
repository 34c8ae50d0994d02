// Compares the OpenMP kernels against the serial reference implementations:
// wall time, speedup, and the maximum absolute divergence (which must be 0 --
// the kernels promise bit-identical results for any schedule).
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#else
#include <chrono>
#endif

#include "medmark/metrics.hpp"
#include "medmark/parallel.hpp"
#include "medmark/reference.hpp"
#include "medmark/transforms.hpp"
#include "medmark/watermark.hpp"

using namespace medmark;

namespace {

double now_seconds() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
#endif
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ImageGray random_image(int w, int h, std::mt19937_64& rng) {
    ImageGray img(w, h);
    for (double& p : img.pixels) p = 0.05 + 0.9 * uniform01(rng);
    return img;
}

FeatureSet random_features(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    FeatureSet fs;
    fs.n = n;
    fs.d = d;
    fs.values.resize(n * d);
    fs.ids.resize(n, "x");
    for (double& v : fs.values) v = uniform01(rng);
    return fs;
}

void report(const std::string& name, double serial_s, double parallel_s, double max_diff) {
    std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx   max|diff| %g\n",
                name.c_str(), serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, max_diff);
}

template <typename F>
double timed(F&& fn, int repeats = 3) {
    fn();  // warm up caches and the thread pool
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

}  // namespace

int main() {
    std::mt19937_64 rng(12345);
    std::printf("threads: %d\n", effective_threads());

    {
        const ImageGray img = random_image(2048, 2048, rng);
        SubbandDecomposition a, b;
        const double ts = timed([&] { a = reference::dwt_haar_forward_serial(img); });
        const double tp = timed([&] { b = dwt_haar_forward(img); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.ll.data.size(); ++i) {
            diff = std::max(diff, std::abs(a.ll.data[i] - b.ll.data[i]));
            diff = std::max(diff, std::abs(a.hh.data[i] - b.hh.data[i]));
        }
        report("dwt_haar_forward 2048^2", ts, tp, diff);

        ImageGray ia, ib;
        const double tis = timed([&] { ia = reference::dwt_haar_inverse_serial(a); });
        const double tip = timed([&] { ib = dwt_haar_inverse(b); });
        diff = 0.0;
        for (std::size_t i = 0; i < ia.pixels.size(); ++i) diff = std::max(diff, std::abs(ia.pixels[i] - ib.pixels[i]));
        report("dwt_haar_inverse 2048^2", tis, tip, diff);
    }

    {
        const ImageGray img = random_image(2048, 2048, rng);
        const WatermarkPayload payload = WatermarkPayload::from_text("synthetic");
        const EmbedConfig cfg;
        ImageGray a, b;
        const double ts = timed([&] { a = reference::embed_serial(img, payload, cfg); });
        const double tp = timed([&] { b = embed(img, payload, cfg); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.pixels.size(); ++i) diff = std::max(diff, std::abs(a.pixels[i] - b.pixels[i]));
        report("embed 2048^2", ts, tp, diff);
    }

    {
        const FeatureSet queries = random_features(1500, 288, rng);
        const FeatureSet base = random_features(1500, 288, rng);
        std::vector<double> a, b;
        const double ts = timed([&] { a = reference::nearest_neighbor_distances_serial(queries, base); });
        const double tp = timed([&] { b = nearest_neighbor_distances(queries, base); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report("nn_distances 1500x1500x288", ts, tp, diff);
    }

    return 0;
}
