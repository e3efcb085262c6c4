#pragma once

#include "luxp/color.hpp"
#include "luxp/image.hpp"

#include <vector>

namespace luxp {

// Full-reference metrics. Both images must have the same shape and colour
// space tag; values are computed in double precision with a fixed reduction
// order, so results do not depend on scheduling.

/// Mean per-pixel angle in degrees between RGB vectors. Pixels where either
/// vector has norm below 1e-8 contribute 0.
double rgb_angular_error(const ImageBuffer& test, const ImageBuffer& reference);

double rmse(const ImageBuffer& test, const ImageBuffer& reference);

/// 20 log10(1 / rmse) with peak 1.0; +infinity for identical images.
double psnr(const ImageBuffer& test, const ImageBuffer& reference);

/// RMSE after the least-squares global scale alpha = <t,r>/<t,t> is applied
/// to `test` (alpha = 0 for an all-zero test image).
double si_rmse(const ImageBuffer& test, const ImageBuffer& reference);

/// Mean SSIM on BT.601 luma with an 11x11 Gaussian window (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2, valid-region filtering. Needs at least 11x11.
double ssim(const ImageBuffer& test, const ImageBuffer& reference);

/// Pixel-domain visual information fidelity over four scales on luma scaled
/// to [0,255], with sigma_n^2 = 2. Needs at least 41x41 pixels.
double vif(const ImageBuffer& test, const ImageBuffer& reference);

/// Mean CIEDE2000 difference; images must be sRGB-encoded.
double delta_e(const ImageBuffer& test, const ImageBuffer& reference);

/// CIEDE2000 colour difference with kL = kC = kH = 1.
double ciede2000(const Lab& first, const Lab& second);

/// A single-channel plane, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// ITU-R BT.601 luma Y = 0.299 R + 0.587 G + 0.114 B, multiplied by `scale`.
Plane luma(const ImageBuffer& img, double scale = 1.0);

/// Normalised 1-D Gaussian taps; the 2-D window is the outer product.
std::vector<double> gaussian_taps(int size, double sigma);

} // namespace luxp
