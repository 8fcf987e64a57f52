#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "histoctx/errors.hpp"

namespace histoctx {

using Matrix = std::vector<std::vector<double>>;

struct StandardizationStats {
    std::vector<double> means;
    std::vector<double> sds; // population SD
};

StandardizationStats standardize_fit(const Matrix& X);
// z = (x - mu) / sigma; constant columns map to 0
std::vector<double> standardize_row(const std::vector<double>& x,
                                    const StandardizationStats& stats);
Matrix standardize_apply(const Matrix& X, const StandardizationStats& stats);

// One binary one-vs-one machine trained by SMO on the RBF kernel.
struct BinarySvm {
    int class_a = 0; // label +1
    int class_b = 1; // label -1
    Matrix support_vectors; // standardized feature space
    std::vector<double> coeffs; // alpha_i * y_i
    double bias = 0.0;
    double platt_a = 0.0;
    double platt_b = 0.0;
    double kkt_residual = 0.0;
    double sum_alpha_y = 0.0;

    double decision(const std::vector<double>& z, double gamma) const;
};

struct ClassProbabilities {
    std::vector<double> probs;  // per class index, sums to 1
    std::vector<int> ranking;   // class indices by descending probability,
                                // ties broken by the fixed class order
    int top() const { return ranking.front(); }
};

struct SvmTrainOptions {
    double C = 1.0;
    std::vector<double> class_weights; // per class, empty = all 1
    double tolerance = 1e-3;
    std::uint64_t seed = 0;
    std::int64_t max_iterations = 10000000;
    std::int64_t cache_mb = 256;
};

struct TrainedSvm {
    std::vector<std::string> classes;
    double gamma = 0.0; // fixed to 1/dimension
    double C = 1.0;
    std::vector<double> class_weights;
    StandardizationStats standardization;
    std::vector<BinarySvm> machines; // pairs (a,b), a < b, in class order

    int dimension() const { return static_cast<int>(standardization.means.size()); }
    // x is a raw (unstandardized) feature vector
    ClassProbabilities predict(const std::vector<double>& x) const;
};

// y holds class indices 0..n_classes-1. X rows are raw features; the
// standardization is fitted here and stored in the model.
TrainedSvm svm_train(const Matrix& X, const std::vector<int>& y,
                     const std::vector<std::string>& classes,
                     const SvmTrainOptions& options);

struct CvResult {
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracies;
};

// Stratified k-fold with a seeded shuffle; standardization is refitted on
// each training fold.
CvResult kfold_cv(const Matrix& X, const std::vector<int>& y,
                  const std::vector<std::string>& classes, int k,
                  const SvmTrainOptions& options);

// Builds the full distribution from pairwise probabilities r[i][j] =
// P(class i | i vs j). Exposed for tests.
std::vector<double> pairwise_coupling(const std::vector<std::vector<double>>& r);

// Platt sigmoid fit: P(y=1|f) = 1 / (1 + exp(A f + B)). Exposed for tests.
void platt_fit(const std::vector<double>& decisions, const std::vector<int>& labels,
               double& A, double& B);

} // namespace histoctx
