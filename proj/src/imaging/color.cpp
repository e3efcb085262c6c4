#include "luxp/color.hpp"

#include "luxp/error.hpp"

#include <algorithm>
#include <cmath>

namespace luxp {

double srgb_to_linear(double v) {
    if (v <= 0.04045) return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) return 12.92 * v;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

ImageBuffer srgb_to_linear(const ImageBuffer& img) {
    if (img.space() != ColorSpace::SrgbEncoded) fail_validation("srgb_to_linear expects an sRGB-encoded image");
    std::vector<double> out(img.data().begin(), img.data().end());
    for (double& v : out) v = srgb_to_linear(v);
    return ImageBuffer(img.width(), img.height(), ColorSpace::Linear, std::move(out));
}

ImageBuffer linear_to_srgb(const ImageBuffer& img) {
    if (img.space() != ColorSpace::Linear) fail_validation("linear_to_srgb expects a linear image");
    std::vector<double> out(img.data().begin(), img.data().end());
    for (double& v : out) v = std::clamp(linear_to_srgb(v), 0.0, 1.0);
    return ImageBuffer(img.width(), img.height(), ColorSpace::SrgbEncoded, std::move(out));
}

ImageBuffer tonemap_gamma(const ImageBuffer& img, double exposure, double gamma) {
    if (img.space() != ColorSpace::Linear) fail_validation("tonemap_gamma expects a linear image");
    if (!(exposure > 0.0) || !std::isfinite(exposure)) fail_validation("exposure must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail_validation("gamma must be positive");
    const double inv_gamma = 1.0 / gamma;
    std::vector<double> out(img.data().begin(), img.data().end());
    for (double& v : out) v = std::clamp(std::pow(exposure * v, inv_gamma), 0.0, 1.0);
    return ImageBuffer(img.width(), img.height(), ColorSpace::SrgbEncoded, std::move(out));
}

Xyz linear_rgb_to_xyz(double r, double g, double b) {
    return {0.4124564 * r + 0.3575761 * g + 0.1804375 * b,
            0.2126729 * r + 0.7151522 * g + 0.0721750 * b,
            0.0193339 * r + 0.1191920 * g + 0.9503041 * b};
}

Lab xyz_to_lab(const Xyz& xyz) {
    // D65 reference white, 2 degree observer
    constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
    constexpr double delta = 6.0 / 29.0;
    auto f = [](double t) {
        return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
    };
    const double fx = f(xyz.X / xn), fy = f(xyz.Y / yn), fz = f(xyz.Z / zn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Lab srgb_to_lab(double r, double g, double b) {
    return xyz_to_lab(linear_rgb_to_xyz(srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)));
}

} // namespace luxp
