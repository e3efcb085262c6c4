#include "internal.hpp"
#include "luxp/error.hpp"
#include "luxp/metrics.hpp"

#include <cmath>
#include <numbers>

namespace luxp {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

double hue_degrees(double b, double a_prime) {
    if (b == 0.0 && a_prime == 0.0) return 0.0;
    double h = std::atan2(b, a_prime) / deg;
    return h < 0.0 ? h + 360.0 : h;
}

} // namespace

double ciede2000(const Lab& p, const Lab& q) {
    const double pow25_7 = std::pow(25.0, 7.0);
    const double c1 = std::hypot(p.a, p.b), c2 = std::hypot(q.a, q.b);
    const double c_mean7 = std::pow((c1 + c2) / 2.0, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c_mean7 / (c_mean7 + pow25_7)));

    const double a1 = (1.0 + g) * p.a, a2 = (1.0 + g) * q.a;
    const double cp1 = std::hypot(a1, p.b), cp2 = std::hypot(a2, q.b);
    const double h1 = hue_degrees(p.b, a1), h2 = hue_degrees(q.b, a2);

    const double dl = q.L - p.L;
    const double dc = cp2 - cp1;
    double dh = 0.0;
    if (cp1 * cp2 != 0.0) {
        dh = h2 - h1;
        if (dh > 180.0) dh -= 360.0;
        else if (dh < -180.0) dh += 360.0;
    }
    const double dH = 2.0 * std::sqrt(cp1 * cp2) * std::sin(dh / 2.0 * deg);

    const double l_mean = (p.L + q.L) / 2.0;
    const double c_mean = (cp1 + cp2) / 2.0;
    double h_mean = h1 + h2;
    if (cp1 * cp2 != 0.0) {
        if (std::abs(h1 - h2) <= 180.0) h_mean = (h1 + h2) / 2.0;
        else if (h1 + h2 < 360.0) h_mean = (h1 + h2 + 360.0) / 2.0;
        else h_mean = (h1 + h2 - 360.0) / 2.0;
    }

    const double t = 1.0 - 0.17 * std::cos((h_mean - 30.0) * deg) + 0.24 * std::cos(2.0 * h_mean * deg) +
                     0.32 * std::cos((3.0 * h_mean + 6.0) * deg) - 0.20 * std::cos((4.0 * h_mean - 63.0) * deg);
    const double d_theta = 30.0 * std::exp(-std::pow((h_mean - 275.0) / 25.0, 2.0));
    const double c_mean_7 = std::pow(c_mean, 7.0);
    const double rc = 2.0 * std::sqrt(c_mean_7 / (c_mean_7 + pow25_7));
    const double l50 = (l_mean - 50.0) * (l_mean - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * c_mean;
    const double sh = 1.0 + 0.015 * c_mean * t;
    const double rt = -std::sin(2.0 * d_theta * deg) * rc;

    const double tl = dl / sl, tc = dc / sc, th = dH / sh;
    return std::sqrt(std::max(0.0, tl * tl + tc * tc + th * th + rt * tc * th));
}

double delta_e(const ImageBuffer& test, const ImageBuffer& reference) {
    detail::check_pair(test, reference);
    if (test.space() != ColorSpace::SrgbEncoded) fail_validation("delta_e expects sRGB-encoded images");
    auto t = test.data();
    auto r = reference.data();
    double sum = 0.0;
    for (std::size_t p = 0; p < test.pixel_count(); ++p) {
        const Lab a = srgb_to_lab(t[p * 3], t[p * 3 + 1], t[p * 3 + 2]);
        const Lab b = srgb_to_lab(r[p * 3], r[p * 3 + 1], r[p * 3 + 2]);
        sum += ciede2000(a, b);
    }
    return sum / static_cast<double>(test.pixel_count());
}

} // namespace luxp
