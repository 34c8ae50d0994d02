#pragma once

#include <vector>

#include "medmark/image.hpp"

namespace medmark {

// One plane of DWT coefficients (or any 2-D double grid that is not a
// canonical [0,1] image).
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Single-level orthonormal Haar decomposition. All four planes have the same
// dimensions (ceil of half the padded input); the original size is kept so
// the inverse can crop the replication padding away.
struct SubbandDecomposition {
    Plane ll, lh, hl, hh;
    int original_width = 0;
    int original_height = 0;
};

enum class Subband { LL, LH, HL, HH };

Plane& subband_plane(SubbandDecomposition& sub, Subband which);
const Plane& subband_plane(const SubbandDecomposition& sub, Subband which);

// Per 2x2 block with a=top-left, b=top-right, c=bottom-left, d=bottom-right:
//   LL = (a+b+c+d)/2   HL = (a-b+c-d)/2
//   LH = (a+b-c-d)/2   HH = (a-b-c+d)/2
// Odd dimensions are handled by edge replication to even size.
SubbandDecomposition dwt_haar_forward(const ImageGray& img);

// Exact inverse of dwt_haar_forward; the result is cropped back to the
// original dimensions. Pixels are NOT clamped (callers decide).
ImageGray dwt_haar_inverse(const SubbandDecomposition& sub);

// Same transforms on a raw coefficient plane (values outside [0,1] allowed).
SubbandDecomposition dwt_haar_forward_plane(const Plane& p);
Plane dwt_haar_inverse_plane(const SubbandDecomposition& sub);

// Orthonormal 2-D DCT-II on an n x n block: 1-D basis
// C[k][j] = alpha(k) * cos(pi*(2j+1)*k/(2n)), alpha(0)=sqrt(1/n),
// alpha(k>0)=sqrt(2/n). Forward is C*X*C^T, inverse is C^T*Y*C.
class Dct2 {
public:
    explicit Dct2(int size);

    int size() const { return n_; }

    // in/out are n*n row-major; forward/inverse may alias in == out.
    void forward(const double* in, double* out) const;
    void inverse(const double* in, double* out) const;

    std::vector<double> forward(const std::vector<double>& block) const;
    std::vector<double> inverse(const std::vector<double>& coeffs) const;

private:
    int n_;
    std::vector<double> basis_;  // row k holds the k-th cosine basis vector
};

}  // namespace medmark
