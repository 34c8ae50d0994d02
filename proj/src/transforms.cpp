#include "medmark/transforms.hpp"

#include <cmath>
#include <numbers>

namespace medmark {

Plane& subband_plane(SubbandDecomposition& sub, Subband which) {
    switch (which) {
        case Subband::LL: return sub.ll;
        case Subband::LH: return sub.lh;
        case Subband::HL: return sub.hl;
        default: return sub.hh;
    }
}

const Plane& subband_plane(const SubbandDecomposition& sub, Subband which) {
    switch (which) {
        case Subband::LL: return sub.ll;
        case Subband::LH: return sub.lh;
        case Subband::HL: return sub.hl;
        default: return sub.hh;
    }
}

namespace {

// Edge-replicated sample: coordinates past the edge read the last row/col.
inline double padded_at(const Plane& p, int x, int y) {
    if (x >= p.width) x = p.width - 1;
    if (y >= p.height) y = p.height - 1;
    return p.at(x, y);
}

SubbandDecomposition haar_forward_impl(const Plane& src) {
    const int hw = (src.width + 1) / 2;
    const int hh = (src.height + 1) / 2;

    SubbandDecomposition sub;
    sub.original_width = src.width;
    sub.original_height = src.height;
    sub.ll = Plane(hw, hh);
    sub.lh = Plane(hw, hh);
    sub.hl = Plane(hw, hh);
    sub.hh = Plane(hw, hh);

    // raw pointers and local dims keep the outlined loop body free of
    // reloads the compiler cannot hoist past the stores
    double* pll = sub.ll.data.data();
    double* plh = sub.lh.data.data();
    double* phl = sub.hl.data.data();
    double* phh = sub.hh.data.data();

#pragma omp parallel for schedule(static)
    for (int by = 0; by < hh; ++by) {
        for (int bx = 0; bx < hw; ++bx) {
            const double a = padded_at(src, 2 * bx, 2 * by);
            const double b = padded_at(src, 2 * bx + 1, 2 * by);
            const double c = padded_at(src, 2 * bx, 2 * by + 1);
            const double d = padded_at(src, 2 * bx + 1, 2 * by + 1);
            const std::size_t i = static_cast<std::size_t>(by) * hw + bx;
            pll[i] = (a + b + c + d) * 0.5;
            phl[i] = (a - b + c - d) * 0.5;
            plh[i] = (a + b - c - d) * 0.5;
            phh[i] = (a - b - c + d) * 0.5;
        }
    }
    return sub;
}

Plane haar_inverse_impl(const SubbandDecomposition& sub) {
    const Plane& ll = sub.ll;
    if (sub.lh.width != ll.width || sub.lh.height != ll.height ||
        sub.hl.width != ll.width || sub.hl.height != ll.height ||
        sub.hh.width != ll.width || sub.hh.height != ll.height) {
        throw ArgumentError("subband planes have mismatched dimensions");
    }
    if (sub.original_width <= 0 || sub.original_height <= 0 ||
        sub.original_width > 2 * ll.width || sub.original_height > 2 * ll.height) {
        throw ArgumentError("original dimensions inconsistent with subband size");
    }

    Plane out(sub.original_width, sub.original_height);
    const int ow = out.width, oh = out.height;
    const int lw = ll.width, lh = ll.height;
    double* po = out.data.data();
    const double* pll = ll.data.data();
    const double* phl = sub.hl.data.data();
    const double* plh = sub.lh.data.data();
    const double* phh = sub.hh.data.data();

#pragma omp parallel for schedule(static)
    for (int by = 0; by < lh; ++by) {
        for (int bx = 0; bx < lw; ++bx) {
            const std::size_t i = static_cast<std::size_t>(by) * lw + bx;
            const double s = pll[i];
            const double h = phl[i];
            const double v = plh[i];
            const double dd = phh[i];
            const double a = (s + h + v + dd) * 0.5;
            const double b = (s - h + v - dd) * 0.5;
            const double c = (s + h - v - dd) * 0.5;
            const double d = (s - h - v + dd) * 0.5;
            const int x = 2 * bx, y = 2 * by;
            double* row = po + static_cast<std::size_t>(y) * ow + x;
            row[0] = a;
            if (x + 1 < ow) row[1] = b;
            if (y + 1 < oh) {
                row[ow] = c;
                if (x + 1 < ow) row[ow + 1] = d;
            }
        }
    }
    return out;
}

}  // namespace

SubbandDecomposition dwt_haar_forward(const ImageGray& img) {
    Plane p;
    p.width = img.width;
    p.height = img.height;
    p.data = img.pixels;
    return haar_forward_impl(p);
}

ImageGray dwt_haar_inverse(const SubbandDecomposition& sub) {
    Plane p = haar_inverse_impl(sub);
    ImageGray img;
    img.width = p.width;
    img.height = p.height;
    img.pixels = std::move(p.data);
    return img;
}

SubbandDecomposition dwt_haar_forward_plane(const Plane& p) { return haar_forward_impl(p); }

Plane dwt_haar_inverse_plane(const SubbandDecomposition& sub) { return haar_inverse_impl(sub); }

Dct2::Dct2(int size) : n_(size) {
    if (size < 2) throw ArgumentError("DCT block size must be at least 2");
    basis_.resize(static_cast<std::size_t>(n_) * n_);
    const double a0 = std::sqrt(1.0 / n_);
    const double ak = std::sqrt(2.0 / n_);
    for (int k = 0; k < n_; ++k) {
        for (int j = 0; j < n_; ++j) {
            basis_[static_cast<std::size_t>(k) * n_ + j] =
                (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n_));
        }
    }
}

void Dct2::forward(const double* in, double* out) const {
    const int n = n_;
    std::vector<double> tmp(static_cast<std::size_t>(n) * n);
    // tmp = X * C^T (transform rows)
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += in[r * n + j] * basis_[static_cast<std::size_t>(k) * n + j];
            tmp[static_cast<std::size_t>(r) * n + k] = s;
        }
    }
    // out = C * tmp (transform columns)
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += basis_[static_cast<std::size_t>(k) * n + r] * tmp[static_cast<std::size_t>(r) * n + c];
            out[k * n + c] = s;
        }
    }
}

void Dct2::inverse(const double* in, double* out) const {
    const int n = n_;
    std::vector<double> tmp(static_cast<std::size_t>(n) * n);
    // tmp = C^T * Y
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += basis_[static_cast<std::size_t>(k) * n + r] * in[k * n + c];
            tmp[static_cast<std::size_t>(r) * n + c] = s;
        }
    }
    // out = tmp * C
    for (int r = 0; r < n; ++r) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += tmp[static_cast<std::size_t>(r) * n + k] * basis_[static_cast<std::size_t>(k) * n + j];
            out[r * n + j] = s;
        }
    }
}

std::vector<double> Dct2::forward(const std::vector<double>& block) const {
    if (block.size() != static_cast<std::size_t>(n_) * n_) throw ArgumentError("block is not size x size");
    std::vector<double> out(block.size());
    forward(block.data(), out.data());
    return out;
}

std::vector<double> Dct2::inverse(const std::vector<double>& coeffs) const {
    if (coeffs.size() != static_cast<std::size_t>(n_) * n_) throw ArgumentError("coefficient block is not size x size");
    std::vector<double> out(coeffs.size());
    inverse(coeffs.data(), out.data());
    return out;
}

}  // namespace medmark
