#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

using luxp::ImageBuffer;

std::vector<double> luma(const ImageBuffer& img, double scale) {
    std::vector<double> out;
    out.reserve(img.pixel_count());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.push_back(scale * (0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2)));
    return out;
}

namespace {

struct Field {
    int w = 0, h = 0;
    std::vector<double> v;
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

std::vector<double> gaussian_2d(int n, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(n) * n);
    const double c = (n - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r2 = (i - c) * (i - c) + (j - c) * (j - c);
            k[static_cast<std::size_t>(i) * n + j] = std::exp(-r2 / (2 * sigma * sigma));
            sum += k[static_cast<std::size_t>(i) * n + j];
        }
    for (double& x : k) x /= sum;
    return k;
}

// Weighted local moments over every full window position.
struct Moments {
    Field mu_a, mu_b, var_a, var_b, cov;
};

Moments local_moments(const Field& a, const Field& b, int n, double sigma) {
    const auto k = gaussian_2d(n, sigma);
    const int ow = a.w - n + 1, oh = a.h - n + 1;
    if (ow <= 0 || oh <= 0) throw std::runtime_error("image smaller than window");
    Moments m;
    for (Field* f : {&m.mu_a, &m.mu_b, &m.var_a, &m.var_b, &m.cov}) {
        f->w = ow;
        f->h = oh;
        f->v.assign(static_cast<std::size_t>(ow) * oh, 0.0);
    }
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double ma = 0, mb = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double w = k[static_cast<std::size_t>(i) * n + j];
                    ma += w * a.at(x + j, y + i);
                    mb += w * b.at(x + j, y + i);
                }
            double va = 0, vb = 0, c = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double w = k[static_cast<std::size_t>(i) * n + j];
                    const double da = a.at(x + j, y + i) - ma, db = b.at(x + j, y + i) - mb;
                    va += w * da * da;
                    vb += w * db * db;
                    c += w * da * db;
                }
            const std::size_t o = static_cast<std::size_t>(y) * ow + x;
            m.mu_a.v[o] = ma;
            m.mu_b.v[o] = mb;
            m.var_a.v[o] = va;
            m.var_b.v[o] = vb;
            m.cov.v[o] = c;
        }
    return m;
}

Field blur_and_halve(const Field& f, int n, double sigma) {
    const auto k = gaussian_2d(n, sigma);
    const int ow = f.w - n + 1, oh = f.h - n + 1;
    Field out;
    out.w = (ow + 1) / 2;
    out.h = (oh + 1) / 2;
    for (int y = 0; y < oh; y += 2)
        for (int x = 0; x < ow; x += 2) {
            double s = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) s += k[static_cast<std::size_t>(i) * n + j] * f.at(x + j, y + i);
            out.v.push_back(s);
        }
    return out;
}

} // namespace

double dense_ssim(const ImageBuffer& test, const ImageBuffer& reference) {
    const Field a{test.width(), test.height(), luma(test, 1.0)};
    const Field b{reference.width(), reference.height(), luma(reference, 1.0)};
    const Moments m = local_moments(a, b, 11, 1.5);
    const double c1 = 1e-4, c2 = 9e-4;
    double total = 0;
    for (std::size_t i = 0; i < m.mu_a.v.size(); ++i) {
        const double ma = m.mu_a.v[i], mb = m.mu_b.v[i];
        const double l = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        const double cs = (2 * m.cov.v[i] + c2) / (m.var_a.v[i] + m.var_b.v[i] + c2);
        total += l * cs;
    }
    return total / static_cast<double>(m.mu_a.v.size());
}

double dense_vif(const ImageBuffer& test, const ImageBuffer& reference) {
    Field r{reference.width(), reference.height(), luma(reference, 255.0)};
    Field d{test.width(), test.height(), luma(test, 255.0)};
    const double noise = 2.0, tiny = 1e-10;
    double num = 0, den = 0;
    for (int s = 1; s <= 4; ++s) {
        const int n = static_cast<int>(std::pow(2, 5 - s)) + 1;
        const double sigma = n / 5.0;
        if (s > 1) {
            r = blur_and_halve(r, n, sigma);
            d = blur_and_halve(d, n, sigma);
        }
        const Moments m = local_moments(r, d, n, sigma);
        for (std::size_t i = 0; i < m.mu_a.v.size(); ++i) {
            double s1 = std::max(0.0, m.var_a.v[i]);
            const double s2 = std::max(0.0, m.var_b.v[i]);
            const double s12 = m.cov.v[i];
            double g = s12 / (s1 + tiny);
            double sv = s2 - g * s12;
            if (s1 < tiny) {
                g = 0;
                sv = s2;
                s1 = 0;
            }
            if (s2 < tiny) {
                g = 0;
                sv = 0;
            }
            if (g < 0) {
                sv = s2;
                g = 0;
            }
            if (sv <= tiny) sv = tiny;
            num += std::log10(1 + g * g * s1 / (sv + noise));
            den += std::log10(1 + s1 / noise);
        }
    }
    return num / den;
}

double grid_si_rmse(const ImageBuffer& test, const ImageBuffer& reference, double lo, double hi, double step) {
    const auto t = test.data();
    const auto r = reference.data();
    double best = std::numeric_limits<double>::infinity();
    const long steps = std::lround((hi - lo) / step);
    for (long k = 0; k <= steps; ++k) {
        const double alpha = lo + step * static_cast<double>(k);
        double acc = 0;
        for (std::size_t i = 0; i < t.size(); ++i) acc += (alpha * t[i] - r[i]) * (alpha * t[i] - r[i]);
        best = std::min(best, std::sqrt(acc / static_cast<double>(t.size())));
    }
    return best;
}

QpSolution svr_dual_barrier(const std::vector<double>& kernel, const std::vector<double>& y, double eps, double cost) {
    const int n = static_cast<int>(y.size());
    const int m = 2 * n;
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = kernel[static_cast<std::size_t>(i) * n + j];
    Eigen::MatrixXd q(m, m);
    q << k, -k, -k, k;
    Eigen::VectorXd c(m);
    for (int i = 0; i < n; ++i) {
        c(i) = eps - y[i];
        c(n + i) = eps + y[i];
    }
    Eigen::RowVectorXd a(m);
    a << Eigen::RowVectorXd::Ones(n), -Eigen::RowVectorXd::Ones(n);

    auto objective = [&](const Eigen::VectorXd& z) { return 0.5 * z.dot(q * z) + c.dot(z); };
    auto barrier = [&](const Eigen::VectorXd& z, double t) {
        double phi = 0;
        for (int i = 0; i < m; ++i) {
            if (z(i) <= 0 || z(i) >= cost) return std::numeric_limits<double>::infinity();
            phi -= std::log(z(i)) + std::log(cost - z(i));
        }
        return t * objective(z) + phi;
    };

    Eigen::VectorXd z = Eigen::VectorXd::Constant(m, cost / 2);
    for (double t = 1.0; 2.0 * m / t > 1e-13; t *= 8.0) {
        for (int iter = 0; iter < 200; ++iter) {
            Eigen::VectorXd grad = t * (q * z + c);
            Eigen::MatrixXd hess = t * q;
            for (int i = 0; i < m; ++i) {
                grad(i) += -1.0 / z(i) + 1.0 / (cost - z(i));
                hess(i, i) += 1.0 / (z(i) * z(i)) + 1.0 / ((cost - z(i)) * (cost - z(i)));
            }
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
            kkt.topLeftCorner(m, m) = hess;
            kkt.block(0, m, m, 1) = a.transpose();
            kkt.block(m, 0, 1, m) = a;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
            rhs.head(m) = -grad;
            rhs(m) = -a.dot(z); // infeasible-start step pulls rounding drift back onto sum b = 0
            // symmetric diagonal scaling keeps the system well conditioned near the box faces
            Eigen::VectorXd scale = Eigen::VectorXd::Ones(m + 1);
            for (int i = 0; i < m; ++i) scale(i) = 1.0 / std::sqrt(hess(i, i));
            const Eigen::MatrixXd scaled = scale.asDiagonal() * kkt * scale.asDiagonal();
            const Eigen::VectorXd sol = scale.asDiagonal() * scaled.fullPivLu().solve(scale.asDiagonal() * rhs);
            const Eigen::VectorXd dz = sol.head(m);
            const double decrement = -grad.dot(dz);
            if (decrement / 2 < 1e-14 && std::abs(a.dot(z)) < 1e-14) break;
            double step = 1.0;
            const double f0 = barrier(z, t);
            while (barrier(z + step * dz, t) > f0 - 0.25 * step * decrement) {
                step *= 0.5;
                if (step < 1e-20) break;
            }
            z += step * dz;
        }
    }
    QpSolution out;
    out.beta.resize(n);
    for (int i = 0; i < n; ++i) out.beta[i] = z(i) - z(n + i);
    out.objective = objective(z);
    return out;
}

double sphere_integral(const std::function<double(double, double, double)>& f, int n_theta) {
    // theta: polar angle from +z, phi: azimuth; midpoint rule on both
    const int n_phi = 2 * n_theta;
    const double dt = std::numbers::pi / n_theta, dp = 2 * std::numbers::pi / n_phi;
    double total = 0;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = (i + 0.5) * dt;
        for (int j = 0; j < n_phi; ++j) {
            const double phi = (j + 0.5) * dp;
            total += f(theta, phi, std::sin(theta)) * std::sin(theta) * dt * dp;
        }
    }
    return total;
}

double real_sh(int l, int m, double theta, double phi) {
    if (l == 0) return 0.5 * std::sqrt(1.0 / std::numbers::pi);
    const double k = std::sqrt(3.0 / (4.0 * std::numbers::pi));
    if (m == -1) return k * std::sin(theta) * std::sin(phi);
    if (m == 0) return k * std::cos(theta);
    return k * std::sin(theta) * std::cos(phi);
}


double ciede2000(const std::array<double, 3>& lab1, const std::array<double, 3>& lab2) {
    using C = std::complex<double>;
    constexpr double rad = std::numbers::pi / 180.0;
    const double cbar = (std::abs(C(lab1[1], lab1[2])) + std::abs(C(lab2[1], lab2[2]))) / 2.0;
    const double cbar7 = std::pow(cbar, 7);
    const double g = 0.5 * (1.0 - std::sqrt(cbar7 / (cbar7 + 6103515625.0)));
    const C z1((1.0 + g) * lab1[1], lab1[2]);
    const C z2((1.0 + g) * lab2[1], lab2[2]);
    const double c1 = std::abs(z1), c2 = std::abs(z2);

    // hue difference as the argument of z2 * conj(z1), which lies in (-pi, pi]
    double dh = 0.0;
    if (c1 > 0.0 && c2 > 0.0) dh = std::arg(z2 * std::conj(z1));
    const double dH = 2.0 * std::sqrt(c1 * c2) * std::sin(dh / 2.0);

    // mean hue: direction of the bisector of the two hue angles
    auto angle = [](const C& z) {
        if (z == C(0.0, 0.0)) return 0.0;
        double a = std::arg(z);
        return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
    };
    double hbar;
    if (c1 == 0.0 || c2 == 0.0) {
        hbar = angle(z1) + angle(z2);
    } else {
        hbar = angle(z1) + dh / 2.0;
        if (hbar < 0.0) hbar += 2.0 * std::numbers::pi;
        if (hbar >= 2.0 * std::numbers::pi) hbar -= 2.0 * std::numbers::pi;
        // at exactly opposite hues the plain average is taken
        const double h1 = angle(z1), h2 = angle(z2);
        if (std::abs(std::abs(h1 - h2) - std::numbers::pi) < 1e-9) hbar = (h1 + h2) / 2.0;
    }
    const double hd = hbar / rad;

    const double lbar = (lab1[0] + lab2[0]) / 2.0;
    const double cpbar = (c1 + c2) / 2.0;
    const double T = 1.0 - 0.17 * std::cos(rad * (hd - 30.0)) + 0.24 * std::cos(rad * 2.0 * hd) +
                     0.32 * std::cos(rad * (3.0 * hd + 6.0)) - 0.20 * std::cos(rad * (4.0 * hd - 63.0));
    const double sl = 1.0 + 0.015 * (lbar - 50.0) * (lbar - 50.0) / std::sqrt(20.0 + (lbar - 50.0) * (lbar - 50.0));
    const double sc = 1.0 + 0.045 * cpbar;
    const double sh = 1.0 + 0.015 * cpbar * T;
    const double cp7 = std::pow(cpbar, 7);
    const double rt = -2.0 * std::sqrt(cp7 / (cp7 + 6103515625.0)) *
                      std::sin(rad * 60.0 * std::exp(-((hd - 275.0) / 25.0) * ((hd - 275.0) / 25.0)));
    const double x = (lab2[0] - lab1[0]) / sl, y = (c2 - c1) / sc, z = dH / sh;
    return std::sqrt(x * x + y * y + z * z + rt * y * z);
}

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
    auto lin = [](double v) { return v > 0.04045 ? std::pow((v + 0.055) / 1.055, 2.4) : v / 12.92; };
    Eigen::Matrix3d m;
    m << 0.4124564, 0.3575761, 0.1804375, 0.2126729, 0.7151522, 0.0721750, 0.0193339, 0.1191920, 0.9503041;
    const Eigen::Vector3d xyz = m * Eigen::Vector3d(lin(r), lin(g), lin(b));
    const Eigen::Vector3d white(0.95047, 1.0, 1.08883);
    auto f = [](double t) {
        const double d = 6.0 / 29.0;
        return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
    };
    const double fx = f(xyz[0] / white[0]), fy = f(xyz[1] / white[1]), fz = f(xyz[2] / white[2]);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

} // namespace oracle
