#include "luxp/svr.hpp"

#include "luxp/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace luxp {

namespace {

constexpr double tau = 1e-12;

struct Problem {
    std::size_t n = 0;              // training points
    std::vector<double> kernel;     // n x n
    std::vector<double> targets;
    double epsilon = 0.0;
    double cost = 0.0;
};

// libsvm-style layout: variable t < n is alpha_t (sign +1), t >= n is
// alpha*_{t-n} (sign -1).
struct SmoState {
    std::vector<double> alpha;
    std::vector<double> gradient;
    std::vector<signed char> sign;
    long iterations = 0;
    double violation = 0.0;
};

double kij(const Problem& p, std::size_t t, std::size_t s) { return p.kernel[(t % p.n) * p.n + (s % p.n)]; }

bool in_up(const SmoState& st, std::size_t t, double c) {
    return st.sign[t] > 0 ? st.alpha[t] < c : st.alpha[t] > 0.0;
}

bool in_low(const SmoState& st, std::size_t t, double c) {
    return st.sign[t] > 0 ? st.alpha[t] > 0.0 : st.alpha[t] < c;
}

SmoState run_smo(const Problem& p, double tolerance, long max_iterations) {
    const std::size_t l = 2 * p.n;
    const double c = p.cost;
    SmoState st;
    st.alpha.assign(l, 0.0);
    st.sign.resize(l);
    st.gradient.resize(l);
    for (std::size_t i = 0; i < p.n; ++i) {
        st.sign[i] = 1;
        st.sign[i + p.n] = -1;
        st.gradient[i] = p.epsilon - p.targets[i];
        st.gradient[i + p.n] = p.epsilon + p.targets[i];
    }

    while (st.iterations < max_iterations) {
        // maximal violating pair
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = l, j = l;
        for (std::size_t t = 0; t < l; ++t) {
            const double v = -st.sign[t] * st.gradient[t];
            if (in_up(st, t, c) && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low(st, t, c) && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        st.violation = (i == l || j == l) ? 0.0 : g_max - g_min;
        if (i == l || j == l || st.violation < tolerance) break;
        ++st.iterations;

        const double qii = kij(p, i, i), qjj = kij(p, j, j);
        const double qij = st.sign[i] * st.sign[j] * kij(p, i, j);
        const double old_i = st.alpha[i], old_j = st.alpha[j];
        double& ai = st.alpha[i];
        double& aj = st.alpha[j];
        if (st.sign[i] != st.sign[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-st.gradient[i] - st.gradient[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c) {
                    ai = c;
                    aj = c - diff;
                }
            } else if (aj > c) {
                aj = c;
                ai = c + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (st.gradient[i] - st.gradient[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c) {
                if (ai > c) {
                    ai = c;
                    aj = sum - c;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c) {
                if (aj > c) {
                    aj = c;
                    ai = sum - c;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }

        const double di = ai - old_i, dj = aj - old_j;
        for (std::size_t t = 0; t < l; ++t)
            st.gradient[t] += st.sign[t] * (st.sign[i] * kij(p, t, i) * di + st.sign[j] * kij(p, t, j) * dj);
    }
    return st;
}

double bias_from_state(const SmoState& st, double c) {
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < st.alpha.size(); ++t) {
        const double yg = st.sign[t] * st.gradient[t];
        const bool at_upper = st.alpha[t] >= c, at_lower = st.alpha[t] <= 0.0;
        if (at_upper) {
            if (st.sign[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (at_lower) {
            if (st.sign[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return -rho;
}

std::vector<double> decision_values(const Problem& p, const std::vector<double>& beta, double bias) {
    std::vector<double> f(p.n, bias);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) f[i] += p.kernel[i * p.n + j] * beta[j];
    return f;
}

// Re-solves the KKT equalities on the free set exactly, keeping bounded
// coefficients fixed. Accepted only if the result stays feasible, satisfies
// every KKT condition within `tolerance`, and does not raise the objective.
bool polish(const Problem& p, std::vector<double>& beta, double& bias, double tolerance) {
    const double c = p.cost;
    const double margin = 1e-9 * c;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < p.n; ++i)
        if (std::abs(beta[i]) > margin && std::abs(beta[i]) < c - margin) free.push_back(i);
    if (free.empty()) return false;

    const auto m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    double fixed_sum = 0.0;
    for (std::size_t j = 0; j < p.n; ++j)
        if (std::find(free.begin(), free.end(), j) == free.end()) fixed_sum += beta[j];
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t i = free[r];
        double fixed_part = 0.0;
        for (std::size_t j = 0; j < p.n; ++j)
            if (std::find(free.begin(), free.end(), j) == free.end()) fixed_part += p.kernel[i * p.n + j] * beta[j];
        for (Eigen::Index s = 0; s < m; ++s) a(r, s) = p.kernel[i * p.n + free[s]];
        a(r, m) = 1.0;
        a(m, r) = 1.0;
        rhs(r) = p.targets[i] - p.epsilon * (beta[i] > 0.0 ? 1.0 : -1.0) - fixed_part;
    }
    rhs(m) = -fixed_sum;

    const Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs);
    if (!x.allFinite() || (a * x - rhs).lpNorm<Eigen::Infinity>() > 1e-9) return false;

    std::vector<double> candidate = beta;
    for (Eigen::Index r = 0; r < m; ++r) {
        const double v = x(r);
        const double old = beta[free[r]];
        if ((old > 0.0) != (v > 0.0) || std::abs(v) > c) return false;
        candidate[free[r]] = v;
    }
    const double b = x(m);
    const auto f = decision_values(p, candidate, b);
    for (std::size_t i = 0; i < p.n; ++i) {
        const double residual = p.targets[i] - f[i];
        const double v = candidate[i];
        if (v >= c - margin) {
            if (residual < p.epsilon - tolerance) return false;
        } else if (v <= -c + margin) {
            if (residual > -p.epsilon + tolerance) return false;
        } else if (std::abs(v) <= margin) {
            if (std::abs(residual) > p.epsilon + tolerance) return false;
        }
    }
    const double before = svr_dual_objective(p.kernel, beta, p.targets, p.epsilon);
    const double after = svr_dual_objective(p.kernel, candidate, p.targets, p.epsilon);
    if (after > before + 1e-12) return false;
    beta = std::move(candidate);
    bias = b;
    return true;
}

} // namespace

void SvrConfig::validate() const {
    if (!(epsilon > 0.0)) fail_validation("SVR epsilon must be positive");
    if (!(cost > 0.0)) fail_validation("SVR cost must be positive");
    if (kernel == KernelType::Rbf && gamma && !(*gamma > 0.0)) fail_validation("RBF gamma must be positive");
    if (!(tolerance > 0.0)) fail_validation("SVR tolerance must be positive");
    if (max_iterations < 1) fail_validation("SVR max_iterations must be positive");
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) fail_validation("cannot standardize an empty feature set");
    const std::size_t k = rows.front().size();
    Standardizer s;
    s.mean.assign(k, 0.0);
    s.scale.assign(k, 1.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < k; ++j) s.mean[j] += r[j];
    for (double& m : s.mean) m /= static_cast<double>(rows.size());
    for (std::size_t j = 0; j < k; ++j) {
        double var = 0.0;
        for (const auto& r : rows) var += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
        const double sd = std::sqrt(var / static_cast<double>(rows.size()));
        s.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])) ? sd : 1.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(std::span<const double> features) const {
    if (features.size() != mean.size())
        fail_validation("expected " + std::to_string(mean.size()) + " features, got " + std::to_string(features.size()));
    std::vector<double> out(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) out[j] = (features[j] - mean[j]) / scale[j];
    return out;
}

double kernel_value(KernelType kernel, double gamma, std::span<const double> u, std::span<const double> v) {
    double acc = 0.0;
    if (kernel == KernelType::Linear) {
        for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
        return acc;
    }
    for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
    return std::exp(-gamma * acc);
}

double SvrModel::predict(std::span<const double> features) const {
    const auto x = standardizer.apply(features);
    double f = bias;
    for (std::size_t j = 0; j < support_vectors.size(); ++j)
        f += dual_coefficients[j] * kernel_value(config.kernel, gamma, support_vectors[j], x);
    return f;
}

double svr_dual_objective(std::span<const double> kernel_matrix, std::span<const double> beta,
                          std::span<const double> targets, double epsilon) {
    const std::size_t n = beta.size();
    double quad = 0.0, linear = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += kernel_matrix[i * n + j] * beta[j];
        quad += beta[i] * row;
        linear += epsilon * std::abs(beta[i]) - targets[i] * beta[i];
    }
    return 0.5 * quad + linear;
}

SvrModel train_svr(const std::vector<std::vector<double>>& features, const std::vector<double>& targets,
                   const SvrConfig& config) {
    config.validate();
    if (features.size() < 2) fail_validation("SVR training needs at least two rows");
    if (features.size() != targets.size()) fail_validation("feature and target counts differ");
    const std::size_t k = features.front().size();
    if (k == 0) fail_validation("SVR training needs at least one feature");
    for (const auto& row : features) {
        if (row.size() != k) fail_validation("feature rows have inconsistent lengths");
        for (double v : row)
            if (!std::isfinite(v)) fail_validation("non-finite feature value");
    }
    for (double y : targets)
        if (!std::isfinite(y)) fail_validation("non-finite target value");

    SvrModel model;
    model.config = config;
    model.standardizer = Standardizer::fit(features);

    std::vector<std::vector<double>> x;
    x.reserve(features.size());
    for (const auto& row : features) x.push_back(model.standardizer.apply(row));

    double mean_variance = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double var = 0.0;
        for (const auto& r : x) var += r[j] * r[j];
        mean_variance += var / static_cast<double>(x.size());
    }
    mean_variance /= static_cast<double>(k);

    if (mean_variance <= 0.0) {
        // every row identical after standardization: the best fit is a constant
        model.bias = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
        model.gamma = config.gamma.value_or(1.0);
        return model;
    }
    model.gamma = config.gamma.value_or(1.0 / (static_cast<double>(k) * mean_variance));

    Problem p;
    p.n = x.size();
    p.targets = targets;
    p.epsilon = config.epsilon;
    p.cost = config.cost;
    p.kernel.resize(p.n * p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = i; j < p.n; ++j)
            p.kernel[i * p.n + j] = p.kernel[j * p.n + i] = kernel_value(config.kernel, model.gamma, x[i], x[j]);

    const SmoState st = run_smo(p, config.tolerance, config.max_iterations);
    std::vector<double> beta(p.n);
    for (std::size_t i = 0; i < p.n; ++i) beta[i] = st.alpha[i] - st.alpha[i + p.n];
    double bias = bias_from_state(st, p.cost);

    model.diagnostics.iterations = st.iterations;
    model.diagnostics.max_violation = st.violation;
    model.diagnostics.polished = polish(p, beta, bias, config.tolerance);
    model.diagnostics.dual_objective = svr_dual_objective(p.kernel, beta, p.targets, p.epsilon);
    model.bias = bias;
    for (std::size_t i = 0; i < p.n; ++i) {
        if (beta[i] == 0.0) continue;
        model.support_vectors.push_back(x[i]);
        model.dual_coefficients.push_back(beta[i]);
    }
    return model;
}

} // namespace luxp
