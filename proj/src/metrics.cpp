#include "histoctx/metrics.hpp"

#include <algorithm>

namespace histoctx {

EvalMetrics evaluate(const ConfusionMatrix& cm) {
    const size_t k = cm.classes.size();
    if (k == 0 || cm.total() == 0) throw InvalidArgument("empty confusion matrix");

    std::int64_t total = 0, trace = 0;
    std::vector<std::int64_t> row_sum(k, 0), col_sum(k, 0);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
            std::int64_t v = cm.counts[i][j];
            if (v < 0) throw InvalidArgument("negative confusion matrix entry");
            total += v;
            row_sum[i] += v;
            col_sum[j] += v;
            if (i == j) trace += v;
        }
    }

    EvalMetrics m;
    m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
    m.per_class_precision.resize(k);
    m.per_class_recall.resize(k);
    double psum = 0.0, rsum = 0.0;
    for (size_t c = 0; c < k; ++c) {
        double diag = static_cast<double>(cm.counts[c][c]);
        m.per_class_precision[c] = col_sum[c] > 0 ? diag / col_sum[c] : 0.0;
        m.per_class_recall[c] = row_sum[c] > 0 ? diag / row_sum[c] : 0.0;
        psum += m.per_class_precision[c];
        rsum += m.per_class_recall[c];
    }
    m.macro_precision = psum / k;
    m.macro_recall = rsum / k;
    return m;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw InvalidArgument("roc_auc: size mismatch or empty input");
    std::int64_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw InvalidArgument("roc_auc requires both classes");

    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocResult res;
    res.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    size_t i = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    while (i < order.size()) {
        double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) { // tie group
            if (labels[order[i]])
                ++tp;
            else
                ++fp;
            ++i;
        }
        double fpr = static_cast<double>(fp) / n_neg;
        double tpr = static_cast<double>(tp) / n_pos;
        res.points.emplace_back(fpr, tpr);
        res.auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    return res;
}

} // namespace histoctx
