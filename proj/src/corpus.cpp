#include "medmark/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "medmark/errors.hpp"
#include "medmark/image_io.hpp"

namespace fs = std::filesystem;

namespace medmark {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// mt19937_64 output is pinned by the standard; distributions are not, so all
// variates below are derived from raw 64-bit draws only.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

struct Ellipse {
    double cx, cy, rx, ry, angle, delta;
};

}  // namespace

namespace {

// Base phantom recipe. Class 1 images are brighter and busier than class 0
// so the two pseudo-classes are well separated in feature space.
ImageGray gen_phantom(std::uint64_t seed, std::uint64_t index, int pseudo_class, int width, int height) {
    std::uint64_t mix = seed;
    (void)splitmix64(mix);
    mix ^= index * 0xD1B54A32D192ED03ull + static_cast<std::uint64_t>(pseudo_class) * 0x8CB92BA72F3D8DD7ull;
    std::mt19937_64 rng(splitmix64(mix));

    const bool cls_b = pseudo_class != 0;

    // smooth gradient background with a radial bowl
    const double base = cls_b ? uniform(rng, 0.46, 0.60) : uniform(rng, 0.38, 0.52);
    const double gx = uniform(rng, -0.12, 0.12);
    const double gy = uniform(rng, -0.12, 0.12);
    const double bowl = uniform(rng, -0.08, 0.14);

    // soft-edged ellipse phantoms
    const int count = cls_b ? uniform_int(rng, 5, 8) : uniform_int(rng, 2, 4);
    std::vector<Ellipse> ellipses(static_cast<std::size_t>(count));
    for (Ellipse& e : ellipses) {
        e.cx = uniform(rng, 0.18, 0.82) * width;
        e.cy = uniform(rng, 0.18, 0.82) * height;
        e.rx = uniform(rng, cls_b ? 0.07 : 0.05, cls_b ? 0.20 : 0.16) * width;
        e.ry = uniform(rng, cls_b ? 0.07 : 0.05, cls_b ? 0.20 : 0.16) * height;
        e.angle = uniform(rng, 0.0, 3.14159265358979323846);
        const double mag = cls_b ? uniform(rng, 0.14, 0.30) : uniform(rng, 0.08, 0.20);
        e.delta = uniform01(rng) < (cls_b ? 0.8 : 0.5) ? mag : -mag;
    }

    // low-frequency structure: coarse white noise, bilinearly upsampled
    constexpr int kGrid = 33;
    const double lf_amp = uniform(rng, 0.015, 0.045);
    std::vector<double> grid(kGrid * kGrid);
    for (double& v : grid) v = uniform(rng, -lf_amp, lf_amp);

    // fine sensor noise: keeps prediction residuals busy enough that the
    // watermark's level flips barely register in compressed size
    const double sensor_amp = 8.0 / 255.0;

    ImageGray img(width, height);
    for (int y = 0; y < height; ++y) {
        const double ny = (y + 0.5) / height - 0.5;
        for (int x = 0; x < width; ++x) {
            const double nx = (x + 0.5) / width - 0.5;
            double v = base + gx * nx + gy * ny + bowl * (1.0 - 2.0 * (nx * nx + ny * ny));

            for (const Ellipse& e : ellipses) {
                const double dx = x - e.cx;
                const double dy = y - e.cy;
                const double ca = std::cos(e.angle), sa = std::sin(e.angle);
                const double u = (dx * ca + dy * sa) / e.rx;
                const double w = (-dx * sa + dy * ca) / e.ry;
                const double rho = std::sqrt(u * u + w * w);
                if (rho < 2.0) v += e.delta / (1.0 + std::exp((rho - 1.0) / 0.08));
            }

            // bilinear sample of the coarse grid
            const double fx = static_cast<double>(x) / width * (kGrid - 1);
            const double fy = static_cast<double>(y) / height * (kGrid - 1);
            const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
            const int x1 = std::min(x0 + 1, kGrid - 1), y1 = std::min(y0 + 1, kGrid - 1);
            const double ax = fx - x0, ay = fy - y0;
            const double top = grid[y0 * kGrid + x0] + ax * (grid[y0 * kGrid + x1] - grid[y0 * kGrid + x0]);
            const double bot = grid[y1 * kGrid + x0] + ax * (grid[y1 * kGrid + x1] - grid[y1 * kGrid + x0]);
            v += top + ay * (bot - top);

            v += uniform(rng, -sensor_amp, sensor_amp);

            // keep a saturation margin so later embedding never clamps
            img.at(x, y) = 0.03 + 0.94 * std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

}  // namespace

ImageGray gen_corpus_image(std::uint64_t seed, std::uint64_t index, int pseudo_class,
                           int width, int height) {
    if (width <= 0 || height <= 0) throw ArgumentError("corpus image dimensions must be positive");

    // Two in five class-1 images are jittered near-duplicates of the class-0
    // image with the same index: a "memorized" subpopulation. It keeps the
    // nearest-neighbor distance distribution bimodal (duplicates land far
    // below any class-0 spacing threshold, genuine class-1 phantoms far
    // above), so fidelity and privacy read as stable mid-range fractions.
    if (pseudo_class != 0 && index % 5 < 2) {
        ImageGray img = gen_phantom(seed, index, 0, width, height);
        std::uint64_t mix = seed;
        (void)splitmix64(mix);
        mix ^= index * 0x9E6C63D0876A3EF5ull + 0xA3EC647659359ACDull;
        std::mt19937_64 rng(splitmix64(mix));
        const double gain = uniform(rng, 0.97, 1.03);
        const double offset = uniform(rng, -0.012, 0.012);
        const double jitter_amp = 4.0 / 255.0;
        for (double& p : img.pixels) {
            const double v = gain * p + offset + uniform(rng, -jitter_amp, jitter_amp);
            p = std::clamp(v, 0.02, 0.98);
        }
        return img;
    }
    return gen_phantom(seed, index, pseudo_class, width, height);
}

void gen_corpus(const std::string& out_dir, std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("corpus size must be at least 1");

    const fs::path root(out_dir);
    fs::create_directories(root / "classA");
    fs::create_directories(root / "classB");

    const std::uint64_t n_a = (n + 1) / 2;
    std::vector<std::string> failures(n);

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const int cls = idx < n_a ? 0 : 1;
        const std::uint64_t local = cls == 0 ? idx : idx - n_a;
        char name[32];
        std::snprintf(name, sizeof(name), "img_%05llu.png", static_cast<unsigned long long>(local));
        const fs::path path = root / (cls == 0 ? "classA" : "classB") / name;
        try {
            save_image(gen_corpus_image(seed, local, cls), path.string(), 8);
        } catch (const std::exception& e) {
            failures[idx] = e.what();
        }
    }
    for (const std::string& f : failures) {
        if (!f.empty()) throw IoError("corpus generation: " + f);
    }
}

}  // namespace medmark
