#include "internal.hpp"
#include "luxp/metrics.hpp"

#include <cmath>

namespace luxp {

namespace {

Plane decimate(const Plane& in) {
    const int w = (in.width + 1) / 2, h = (in.height + 1) / 2;
    Plane out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.values[static_cast<std::size_t>(y) * w + x] = in.at(2 * x, 2 * y);
    return out;
}

} // namespace

double vif(const ImageBuffer& test, const ImageBuffer& reference) {
    detail::check_pair(test, reference);
    constexpr double sigma_n_sq = 2.0;
    constexpr double eps = 1e-10;

    Plane ref = luma(reference, 255.0);
    Plane dist = luma(test, 255.0);
    double num = 0.0, den = 0.0;

    for (int scale = 1; scale <= 4; ++scale) {
        const int n = (1 << (5 - scale)) + 1;
        const auto window = gaussian_taps(n, n / 5.0);
        if (scale > 1) {
            ref = decimate(detail::filter_valid(ref, window));
            dist = decimate(detail::filter_valid(dist, window));
        }
        const Plane mu1 = detail::filter_valid(ref, window);
        const Plane mu2 = detail::filter_valid(dist, window);
        const Plane s11 = detail::filter_valid(detail::multiply(ref, ref), window);
        const Plane s22 = detail::filter_valid(detail::multiply(dist, dist), window);
        const Plane s12 = detail::filter_valid(detail::multiply(ref, dist), window);

        for (std::size_t i = 0; i < mu1.values.size(); ++i) {
            double sigma1_sq = std::max(0.0, s11.values[i] - mu1.values[i] * mu1.values[i]);
            double sigma2_sq = std::max(0.0, s22.values[i] - mu2.values[i] * mu2.values[i]);
            const double sigma12 = s12.values[i] - mu1.values[i] * mu2.values[i];

            double g = sigma12 / (sigma1_sq + eps);
            double sv_sq = sigma2_sq - g * sigma12;
            if (sigma1_sq < eps) {
                g = 0.0;
                sv_sq = sigma2_sq;
                sigma1_sq = 0.0;
            }
            if (sigma2_sq < eps) {
                g = 0.0;
                sv_sq = 0.0;
            }
            if (g < 0.0) {
                sv_sq = sigma2_sq;
                g = 0.0;
            }
            sv_sq = std::max(sv_sq, eps);

            num += std::log10(1.0 + g * g * sigma1_sq / (sv_sq + sigma_n_sq));
            den += std::log10(1.0 + sigma1_sq / sigma_n_sq);
        }
    }
    // a flat reference carries no information; an equally flat test loses none
    if (den <= 0.0) return num <= 0.0 ? 1.0 : 0.0;
    return num / den;
}

} // namespace luxp
