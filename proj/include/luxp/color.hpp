#pragma once

#include "luxp/image.hpp"

namespace luxp {

/// IEC 61966-2-1 transfer functions on a single sample.
double srgb_to_linear(double encoded);
double linear_to_srgb(double linear);

/// Decode an SrgbEncoded image to Linear. Throws if the tag is wrong.
ImageBuffer srgb_to_linear(const ImageBuffer& img);

/// Encode a Linear image to SrgbEncoded; radiance above 1 is clipped to 1.
ImageBuffer linear_to_srgb(const ImageBuffer& img);

/// clamp((exposure * in)^(1/gamma), 0, 1) per sample, tagged SrgbEncoded.
ImageBuffer tonemap_gamma(const ImageBuffer& img, double exposure, double gamma = 2.2);

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct Xyz {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
};

/// Linear sRGB (BT.709 primaries) to CIE XYZ, D65 white with Y = 1.
Xyz linear_rgb_to_xyz(double r, double g, double b);

/// CIE 1976 L*a*b* relative to the D65 white point.
Lab xyz_to_lab(const Xyz& xyz);

/// Convenience: encoded sRGB triple in [0,1] to Lab.
Lab srgb_to_lab(double r, double g, double b);

} // namespace luxp
