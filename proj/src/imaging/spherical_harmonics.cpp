#include "luxp/spherical_harmonics.hpp"

#include "luxp/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace luxp {

Panorama::Panorama(ImageBuffer image) : image_(std::move(image)) {
    if (image_.space() != ColorSpace::Linear) fail_validation("panorama must hold linear radiance");
    if (image_.width() != 2 * image_.height())
        fail_validation("equirectangular panorama needs width = 2 x height, got " +
                        std::to_string(image_.width()) + "x" + std::to_string(image_.height()));
}

Direction pixel_direction(int px, int py, int width, int height) {
    using std::numbers::pi;
    const double lat = pi / 2 - (py + 0.5) * pi / height;
    const double lon = -pi + (px + 0.5) * 2 * pi / width;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double sh1_basis(int index, const Direction& d) {
    static const double k0 = 0.5 / std::sqrt(std::numbers::pi);
    static const double k1 = std::sqrt(3.0 / (4.0 * std::numbers::pi));
    switch (index) {
    case 0: return k0;
    case 1: return k1 * d.y;
    case 2: return k1 * d.z;
    case 3: return k1 * d.x;
    default: fail_validation("SH basis index out of range");
    }
}

std::array<double, 12> Sh1Coefficients::flatten() const {
    std::array<double, 12> v{};
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < sh1_basis_count; ++k) v[c * sh1_basis_count + k] = coeffs[c][k];
    return v;
}

Sh1Coefficients sh1_project(const Panorama& pano) {
    using std::numbers::pi;
    const ImageBuffer& img = pano.image();
    const int w = img.width(), h = img.height();
    const double dtheta = pi / h, dphi = 2 * pi / w;

    Sh1Coefficients out;
    for (int y = 0; y < h; ++y) {
        // sin(polar angle) = cos(latitude)
        const double weight = std::cos(pi / 2 - (y + 0.5) * dtheta) * dtheta * dphi;
        for (int x = 0; x < w; ++x) {
            const Direction d = pixel_direction(x, y, w, h);
            double basis[sh1_basis_count];
            for (int k = 0; k < sh1_basis_count; ++k) basis[k] = sh1_basis(k, d) * weight;
            for (int c = 0; c < 3; ++c) {
                const double radiance = img.at(x, y, c);
                for (int k = 0; k < sh1_basis_count; ++k) out.coeffs[c][k] += radiance * basis[k];
            }
        }
    }
    return out;
}

} // namespace luxp
