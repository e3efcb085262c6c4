#include "internal.hpp"
#include "luxp/metrics.hpp"

namespace luxp {

double ssim(const ImageBuffer& test, const ImageBuffer& reference) {
    detail::check_pair(test, reference);
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    static const std::vector<double> window = gaussian_taps(11, 1.5);

    const Plane x = luma(test);
    const Plane y = luma(reference);
    const Plane mu_x = detail::filter_valid(x, window);
    const Plane mu_y = detail::filter_valid(y, window);
    const Plane xx = detail::filter_valid(detail::multiply(x, x), window);
    const Plane yy = detail::filter_valid(detail::multiply(y, y), window);
    const Plane xy = detail::filter_valid(detail::multiply(x, y), window);

    double sum = 0.0;
    for (std::size_t i = 0; i < mu_x.values.size(); ++i) {
        const double mx = mu_x.values[i], my = mu_y.values[i];
        const double var_x = xx.values[i] - mx * mx;
        const double var_y = yy.values[i] - my * my;
        const double cov = xy.values[i] - mx * my;
        sum += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    return sum / static_cast<double>(mu_x.values.size());
}

} // namespace luxp
