#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "histoctx/errors.hpp"

namespace histoctx {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::int64_t>> counts; // [true][predicted]

    explicit ConfusionMatrix(std::vector<std::string> cls = {})
        : classes(std::move(cls)),
          counts(classes.size(), std::vector<std::int64_t>(classes.size(), 0)) {}

    void add(int true_class, int predicted_class, std::int64_t n = 1) {
        counts[true_class][predicted_class] += n;
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts)
            for (auto v : row) t += v;
        return t;
    }
};

struct EvalMetrics {
    double accuracy = 0.0; // fractions in [0,1]
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
};

// accuracy = trace/total; per-class precision = diag/column sum (0 when the
// column is empty), recall = diag/row sum; macros are unweighted means.
EvalMetrics evaluate(const ConfusionMatrix& cm);

struct RocResult {
    std::vector<std::pair<double, double>> points; // (FPR, TPR)
    double auc = 0.0;
};

// One-vs-rest ROC with a threshold sweep over the distinct scores and
// trapezoid AUC. labels: 1 = positive, 0 = negative, both must be present.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

} // namespace histoctx
