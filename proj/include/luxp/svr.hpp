#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace luxp {

enum class KernelType { Rbf, Linear };

struct SvrConfig {
    double epsilon = 0.1;
    double cost = 1.0;
    KernelType kernel = KernelType::Rbf;
    std::optional<double> gamma; // empty: 1 / (K * mean variance of the standardized features)
    double tolerance = 1e-3;     // maximal KKT violation at termination
    long max_iterations = 10'000'000;

    void validate() const;
};

/// Per-feature z-scoring fitted on training data. Constant features get a
/// unit scale so they standardize to zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> apply(std::span<const double> features) const;
};

struct SolverDiagnostics {
    long iterations = 0;
    double dual_objective = 0.0; // minimisation form, see svr_dual_objective
    double max_violation = 0.0;
    bool polished = false;       // active-set refinement accepted
};

struct SvrModel {
    SvrConfig config;
    double gamma = 0.0; // resolved kernel width (unused for Linear)
    Standardizer standardizer;
    std::vector<std::vector<double>> support_vectors; // standardized
    std::vector<double> dual_coefficients;            // beta_j = alpha_j - alpha*_j
    double bias = 0.0;
    SolverDiagnostics diagnostics;

    /// f(x) = sum_j beta_j k(sv_j, standardize(x)) + b, not clamped.
    double predict(std::span<const double> features) const;
    std::size_t feature_count() const { return standardizer.mean.size(); }
};

/// Kernel between two standardized vectors.
double kernel_value(KernelType kernel, double gamma, std::span<const double> u, std::span<const double> v);

/// Trains an epsilon-SVR by sequential minimal optimisation over the
/// 2n-variable dual, always updating the maximally violating pair, followed
/// by an exact solve on the final free set when that keeps every KKT
/// condition. Identical features everywhere degenerate to a constant model
/// whose bias is the mean target.
SvrModel train_svr(const std::vector<std::vector<double>>& features, const std::vector<double>& targets,
                   const SvrConfig& config = {});

/// 0.5 beta' K beta + eps * sum|beta| - y' beta for the given kernel matrix
/// (row-major n x n).
double svr_dual_objective(std::span<const double> kernel_matrix, std::span<const double> beta,
                          std::span<const double> targets, double epsilon);

} // namespace luxp
