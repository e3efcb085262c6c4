#include "luxp/metrics.hpp"

#include "internal.hpp"
#include "luxp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace luxp {

using detail::check_pair;

void detail::check_pair(const ImageBuffer& test, const ImageBuffer& reference) {
    if (!test.same_shape(reference))
        fail_validation("image dimensions differ: " + std::to_string(test.width()) + "x" +
                        std::to_string(test.height()) + " vs " + std::to_string(reference.width()) + "x" +
                        std::to_string(reference.height()));
    if (test.space() != reference.space()) fail_validation("images are tagged with different colour spaces");
}

double rgb_angular_error(const ImageBuffer& test, const ImageBuffer& reference) {
    check_pair(test, reference);
    auto t = test.data();
    auto r = reference.data();
    double sum = 0.0;
    for (std::size_t p = 0; p < test.pixel_count(); ++p) {
        const double* a = &t[p * 3];
        const double* b = &r[p * 3];
        const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
        if (na < 1e-8 || nb < 1e-8) continue;
        // atan2 of |a x b| and a.b stays accurate near 0 where acos does not
        const double cx = a[1] * b[2] - a[2] * b[1];
        const double cy = a[2] * b[0] - a[0] * b[2];
        const double cz = a[0] * b[1] - a[1] * b[0];
        sum += std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
    }
    return sum / static_cast<double>(test.pixel_count()) * 180.0 / std::numbers::pi;
}

double rmse(const ImageBuffer& test, const ImageBuffer& reference) {
    check_pair(test, reference);
    auto t = test.data();
    auto r = reference.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = t[i] - r[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(t.size()));
}

double psnr(const ImageBuffer& test, const ImageBuffer& reference) {
    const double e = rmse(test, reference);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(1.0 / e);
}

double si_rmse(const ImageBuffer& test, const ImageBuffer& reference) {
    check_pair(test, reference);
    auto t = test.data();
    auto r = reference.data();
    double tt = 0.0, tr = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tt += t[i] * t[i];
        tr += t[i] * r[i];
    }
    const double alpha = tt > 0.0 ? tr / tt : 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = alpha * t[i] - r[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(t.size()));
}

Plane luma(const ImageBuffer& img, double scale) {
    Plane out{img.width(), img.height(), std::vector<double>(img.pixel_count())};
    auto d = img.data();
    for (std::size_t p = 0; p < out.values.size(); ++p)
        out.values[p] = scale * (0.299 * d[p * 3] + 0.587 * d[p * 3 + 1] + 0.114 * d[p * 3 + 2]);
    return out;
}

std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> taps(size);
    const double centre = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = i - centre;
        taps[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& v : taps) v /= sum;
    return taps;
}

Plane detail::filter_valid(const Plane& in, const std::vector<double>& taps) {
    const int n = static_cast<int>(taps.size());
    const int ow = in.width - n + 1, oh = in.height - n + 1;
    if (ow < 1 || oh < 1)
        fail_validation("image of " + std::to_string(in.width) + "x" + std::to_string(in.height) +
                        " is smaller than the " + std::to_string(n) + "-tap filter window");
    Plane horizontal{ow, in.height, std::vector<double>(static_cast<std::size_t>(ow) * in.height)};
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += taps[k] * in.at(x + k, y);
            horizontal.values[static_cast<std::size_t>(y) * ow + x] = s;
        }
    Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += taps[k] * horizontal.at(x, y + k);
            out.values[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

Plane detail::multiply(const Plane& a, const Plane& b) {
    Plane out{a.width, a.height, std::vector<double>(a.values.size())};
    for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

} // namespace luxp
