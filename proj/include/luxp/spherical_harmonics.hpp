#pragma once

#include "luxp/image.hpp"

#include <array>

namespace luxp {

/// Equirectangular environment map: width = 2 * height, linear radiance.
/// Row 0 is the zenith (latitude +pi/2); column 0 starts at longitude -pi.
class Panorama {
public:
    explicit Panorama(ImageBuffer image);

    const ImageBuffer& image() const { return image_; }

private:
    ImageBuffer image_;
};

struct Direction {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0; // up
};

/// Unit direction through the centre of pixel (px, py) of a width x height
/// equirectangular map.
Direction pixel_direction(int px, int py, int width, int height);

/// Bands l <= 1 of the real orthonormal SH basis, ordered
/// (0,0), (1,-1), (1,0), (1,1).
inline constexpr int sh1_basis_count = 4;
double sh1_basis(int index, const Direction& d);

struct Sh1Coefficients {
    /// coeffs[channel][basis]
    std::array<std::array<double, sh1_basis_count>, 3> coeffs{};

    /// Channel-major 12-vector used as the clustering feature.
    std::array<double, 12> flatten() const;

    bool operator==(const Sh1Coefficients&) const = default;
};

/// Solid-angle weighted projection onto the first two SH bands:
/// c = sum_p L(p) Y(dir(p)) sin(theta) dtheta dphi.
Sh1Coefficients sh1_project(const Panorama& pano);

} // namespace luxp
