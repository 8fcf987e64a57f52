#include "histoctx/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <list>
#include <unordered_map>

#include "histoctx/rng.hpp"

namespace histoctx {

StandardizationStats standardize_fit(const Matrix& X) {
    if (X.size() < 2) throw InvalidArgument("standardize_fit needs at least 2 rows");
    const size_t d = X[0].size();
    StandardizationStats st;
    st.means.assign(d, 0.0);
    st.sds.assign(d, 0.0);
    for (const auto& row : X) {
        if (row.size() != d) throw InvalidArgument("ragged feature matrix");
        for (size_t j = 0; j < d; ++j) st.means[j] += row[j];
    }
    for (size_t j = 0; j < d; ++j) st.means[j] /= static_cast<double>(X.size());
    for (const auto& row : X)
        for (size_t j = 0; j < d; ++j) {
            double dlt = row[j] - st.means[j];
            st.sds[j] += dlt * dlt;
        }
    for (size_t j = 0; j < d; ++j)
        st.sds[j] = std::sqrt(st.sds[j] / static_cast<double>(X.size()));
    return st;
}

std::vector<double> standardize_row(const std::vector<double>& x,
                                    const StandardizationStats& stats) {
    if (x.size() != stats.means.size())
        throw InvalidFeature("feature dimension mismatch: got " +
                             std::to_string(x.size()) + ", expected " +
                             std::to_string(stats.means.size()));
    std::vector<double> z(x.size());
    for (size_t j = 0; j < x.size(); ++j)
        z[j] = stats.sds[j] > 0.0 ? (x[j] - stats.means[j]) / stats.sds[j] : 0.0;
    return z;
}

Matrix standardize_apply(const Matrix& X, const StandardizationStats& stats) {
    Matrix Z;
    Z.reserve(X.size());
    for (const auto& row : X) Z.push_back(standardize_row(row, stats));
    return Z;
}

namespace {

inline double rbf_kernel(const double* a, const double* b, size_t d, double gamma) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double dlt = a[j] - b[j];
        s += dlt * dlt;
    }
    return std::exp(-gamma * s);
}

// LRU row cache over the Gram matrix.
class KernelCache {
public:
    KernelCache(const Matrix& X, double gamma, std::int64_t cache_mb)
        : X_(X), gamma_(gamma), n_(X.size()), d_(X.empty() ? 0 : X[0].size()) {
        std::int64_t bytes = cache_mb * 1024 * 1024;
        max_rows_ = std::max<std::int64_t>(2, bytes / (static_cast<std::int64_t>(n_) * 8));
        rows_.resize(n_);
    }

    const double* row(size_t i) {
        if (!rows_[i].empty()) {
            lru_.splice(lru_.begin(), lru_, pos_[i]);
            return rows_[i].data();
        }
        if (static_cast<std::int64_t>(lru_.size()) >= max_rows_) {
            size_t victim = lru_.back();
            lru_.pop_back();
            pos_.erase(victim);
            rows_[victim].clear();
            rows_[victim].shrink_to_fit();
        }
        rows_[i].resize(n_);
        const double* xi = X_[i].data();
        for (size_t t = 0; t < n_; ++t)
            rows_[i][t] = rbf_kernel(xi, X_[t].data(), d_, gamma_);
        lru_.push_front(i);
        pos_[i] = lru_.begin();
        return rows_[i].data();
    }

private:
    const Matrix& X_;
    double gamma_;
    size_t n_, d_;
    std::int64_t max_rows_;
    std::vector<std::vector<double>> rows_;
    std::list<size_t> lru_;
    std::unordered_map<size_t, std::list<size_t>::iterator> pos_;
};

struct SmoResult {
    std::vector<double> alpha;
    std::vector<double> decisions; // f(x_i) over the training points
    double bias = 0.0;
    double kkt_residual = 0.0;
};

// SMO with maximal-violating-pair working set selection (WSS1).
SmoResult smo_solve(const Matrix& X, const std::vector<signed char>& y,
                    const std::vector<double>& C, double gamma, double tol,
                    std::int64_t max_iterations, std::int64_t cache_mb) {
    const size_t n = X.size();
    SmoResult res;
    res.alpha.assign(n, 0.0);
    std::vector<double> G(n, -1.0); // gradient of the dual objective
    KernelCache cache(X, gamma, cache_mb);
    constexpr double kTau = 1e-12;

    double m_max = 0.0, m_min = 0.0;
    std::int64_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        int i = -1, j = -1;
        m_max = -std::numeric_limits<double>::infinity();
        m_min = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < n; ++t) {
            double v = -y[t] * G[t];
            bool in_up = (y[t] > 0 && res.alpha[t] < C[t]) || (y[t] < 0 && res.alpha[t] > 0);
            bool in_low = (y[t] > 0 && res.alpha[t] > 0) || (y[t] < 0 && res.alpha[t] < C[t]);
            if (in_up && v > m_max) {
                m_max = v;
                i = static_cast<int>(t);
            }
            if (in_low && v < m_min) {
                m_min = v;
                j = static_cast<int>(t);
            }
        }
        if (i < 0 || j < 0 || m_max - m_min <= tol) break;

        const double* Ki = cache.row(i);
        const double* Kj = cache.row(j);
        double old_ai = res.alpha[i], old_aj = res.alpha[j];
        double Ci = C[i], Cj = C[j];

        if (y[i] != y[j]) {
            double quad = Ki[i] + Kj[j] + 2.0 * Ki[j];
            if (quad <= 0) quad = kTau;
            double delta = (-G[i] - G[j]) / quad;
            double diff = res.alpha[i] - res.alpha[j];
            res.alpha[i] += delta;
            res.alpha[j] += delta;
            if (diff > 0) {
                if (res.alpha[j] < 0) {
                    res.alpha[j] = 0;
                    res.alpha[i] = diff;
                }
            } else {
                if (res.alpha[i] < 0) {
                    res.alpha[i] = 0;
                    res.alpha[j] = -diff;
                }
            }
            if (diff > Ci - Cj) {
                if (res.alpha[i] > Ci) {
                    res.alpha[i] = Ci;
                    res.alpha[j] = Ci - diff;
                }
            } else {
                if (res.alpha[j] > Cj) {
                    res.alpha[j] = Cj;
                    res.alpha[i] = Cj + diff;
                }
            }
        } else {
            double quad = Ki[i] + Kj[j] - 2.0 * Ki[j];
            if (quad <= 0) quad = kTau;
            double delta = (G[i] - G[j]) / quad;
            double sum = res.alpha[i] + res.alpha[j];
            res.alpha[i] -= delta;
            res.alpha[j] += delta;
            if (sum > Ci) {
                if (res.alpha[i] > Ci) {
                    res.alpha[i] = Ci;
                    res.alpha[j] = sum - Ci;
                }
            } else {
                if (res.alpha[j] < 0) {
                    res.alpha[j] = 0;
                    res.alpha[i] = sum;
                }
            }
            if (sum > Cj) {
                if (res.alpha[j] > Cj) {
                    res.alpha[j] = Cj;
                    res.alpha[i] = sum - Cj;
                }
            } else {
                if (res.alpha[i] < 0) {
                    res.alpha[i] = 0;
                    res.alpha[j] = sum;
                }
            }
        }

        double dai = res.alpha[i] - old_ai;
        double daj = res.alpha[j] - old_aj;
        if (dai == 0.0 && daj == 0.0) break; // numerically stuck
        for (size_t t = 0; t < n; ++t)
            G[t] += y[t] * (y[i] * Ki[t] * dai + y[j] * Kj[t] * daj);
    }
    if (iter == max_iterations)
        std::fprintf(stderr, "warning: SMO hit max_iterations (%lld)\n",
                     static_cast<long long>(max_iterations));

    res.kkt_residual = std::max(m_max - m_min, 0.0);

    // bias from free support vectors, midpoint of bounds otherwise
    double sum_free = 0.0;
    int n_free = 0;
    for (size_t t = 0; t < n; ++t) {
        if (res.alpha[t] > 0 && res.alpha[t] < C[t]) {
            sum_free += -y[t] * G[t];
            ++n_free;
        }
    }
    res.bias = n_free > 0 ? sum_free / n_free : (m_max + m_min) / 2.0;

    res.decisions.resize(n);
    for (size_t t = 0; t < n; ++t)
        res.decisions[t] = y[t] * (G[t] + 1.0) + res.bias; // y_t(G_t+1) = sum_j a_j y_j K_jt
    return res;
}

} // namespace

void platt_fit(const std::vector<double>& decisions, const std::vector<int>& labels,
               double& A, double& B) {
    const size_t l = decisions.size();
    double prior1 = 0, prior0 = 0;
    for (int y : labels) (y > 0 ? prior1 : prior0) += 1;

    const int max_iter = 100;
    const double min_step = 1e-10, sigma = 1e-12, eps = 1e-5;
    double hi = (prior1 + 1.0) / (prior1 + 2.0);
    double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(l);
    for (size_t i = 0; i < l; ++i) t[i] = labels[i] > 0 ? hi : lo;

    A = 0.0;
    B = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = 0.0;
    for (size_t i = 0; i < l; ++i) {
        double fApB = decisions[i] * A + B;
        fval += fApB >= 0 ? t[i] * fApB + std::log1p(std::exp(-fApB))
                          : (t[i] - 1) * fApB + std::log1p(std::exp(fApB));
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
        for (size_t i = 0; i < l; ++i) {
            double fApB = decisions[i] * A + B;
            double p, q;
            if (fApB >= 0) {
                p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
                q = 1.0 / (1.0 + std::exp(-fApB));
            } else {
                p = 1.0 / (1.0 + std::exp(fApB));
                q = std::exp(fApB) / (1.0 + std::exp(fApB));
            }
            double d2 = p * q;
            h11 += decisions[i] * decisions[i] * d2;
            h22 += d2;
            h21 += decisions[i] * d2;
            double d1 = t[i] - p;
            g1 += decisions[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < eps && std::abs(g2) < eps) break;
        double det = h11 * h22 - h21 * h21;
        double dA = -(h22 * g1 - h21 * g2) / det;
        double dB = -(-h21 * g1 + h11 * g2) / det;
        double gd = g1 * dA + g2 * dB;
        double stepsize = 1.0;
        while (stepsize >= min_step) {
            double newA = A + stepsize * dA;
            double newB = B + stepsize * dB;
            double newf = 0.0;
            for (size_t i = 0; i < l; ++i) {
                double fApB = decisions[i] * newA + newB;
                newf += fApB >= 0 ? t[i] * fApB + std::log1p(std::exp(-fApB))
                                  : (t[i] - 1) * fApB + std::log1p(std::exp(fApB));
            }
            if (newf < fval + 1e-4 * stepsize * gd) {
                A = newA;
                B = newB;
                fval = newf;
                break;
            }
            stepsize /= 2.0;
        }
        if (stepsize < min_step) break;
    }
}

std::vector<double> pairwise_coupling(const std::vector<std::vector<double>>& r) {
    const size_t k = r.size();
    std::vector<double> p(k, 1.0 / k);
    if (k == 1) return p;
    std::vector<std::vector<double>> Q(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            Q[i][i] += r[j][i] * r[j][i];
            Q[i][j] = -r[j][i] * r[i][j];
        }
    }
    std::vector<double> Qp(k, 0.0);
    const double eps = 0.005 / k;
    for (int iter = 0; iter < 100; ++iter) {
        double pQp = 0.0;
        for (size_t i = 0; i < k; ++i) {
            Qp[i] = 0.0;
            for (size_t j = 0; j < k; ++j) Qp[i] += Q[i][j] * p[j];
            pQp += p[i] * Qp[i];
        }
        double max_err = 0.0;
        for (size_t i = 0; i < k; ++i)
            max_err = std::max(max_err, std::abs(Qp[i] - pQp));
        if (max_err < eps) break;
        for (size_t i = 0; i < k; ++i) {
            double diff = (-Qp[i] + pQp) / Q[i][i];
            p[i] += diff;
            pQp = (pQp + diff * (diff * Q[i][i] + 2 * Qp[i])) / ((1 + diff) * (1 + diff));
            for (size_t j = 0; j < k; ++j) {
                Qp[j] = (Qp[j] + diff * Q[i][j]) / (1 + diff);
                p[j] /= (1 + diff);
            }
        }
    }
    return p;
}

double BinarySvm::decision(const std::vector<double>& z, double gamma) const {
    double f = bias;
    for (size_t s = 0; s < support_vectors.size(); ++s)
        f += coeffs[s] * rbf_kernel(support_vectors[s].data(), z.data(), z.size(), gamma);
    return f;
}

TrainedSvm svm_train(const Matrix& X, const std::vector<int>& y,
                     const std::vector<std::string>& classes,
                     const SvmTrainOptions& options) {
    if (X.empty() || X.size() != y.size())
        throw InvalidTrainingSet("empty training set or size mismatch");
    const int n_classes = static_cast<int>(classes.size());
    std::vector<std::int64_t> counts(n_classes, 0);
    for (int label : y) {
        if (label < 0 || label >= n_classes)
            throw InvalidTrainingSet("label outside class list");
        ++counts[label];
    }
    int present = 0;
    for (auto c : counts) present += c > 0;
    if (present < 2) throw InvalidTrainingSet("training set must contain >= 2 classes");
    for (const auto& row : X)
        for (double v : row)
            if (!std::isfinite(v)) throw InvalidFeature("non-finite feature value");

    TrainedSvm model;
    model.classes = classes;
    model.C = options.C;
    model.class_weights =
        options.class_weights.empty() ? std::vector<double>(n_classes, 1.0)
                                      : options.class_weights;
    if (static_cast<int>(model.class_weights.size()) != n_classes)
        throw InvalidArgument("class_weights size mismatch");
    model.standardization = standardize_fit(X);
    model.gamma = 1.0 / static_cast<double>(X[0].size());

    Matrix Z = standardize_apply(X, model.standardization);

    for (int a = 0; a < n_classes; ++a) {
        for (int b = a + 1; b < n_classes; ++b) {
            if (counts[a] == 0 || counts[b] == 0) continue;
            Matrix Xp;
            std::vector<signed char> yp;
            std::vector<double> Cp;
            std::vector<int> labels;
            for (size_t t = 0; t < Z.size(); ++t) {
                if (y[t] == a) {
                    Xp.push_back(Z[t]);
                    yp.push_back(+1);
                    Cp.push_back(options.C * model.class_weights[a]);
                    labels.push_back(+1);
                } else if (y[t] == b) {
                    Xp.push_back(Z[t]);
                    yp.push_back(-1);
                    Cp.push_back(options.C * model.class_weights[b]);
                    labels.push_back(-1);
                }
            }
            SmoResult sol = smo_solve(Xp, yp, Cp, model.gamma, options.tolerance,
                                      options.max_iterations, options.cache_mb);
            BinarySvm machine;
            machine.class_a = a;
            machine.class_b = b;
            machine.bias = sol.bias;
            machine.kkt_residual = sol.kkt_residual;
            double say = 0.0;
            for (size_t t = 0; t < Xp.size(); ++t) {
                say += sol.alpha[t] * yp[t];
                if (sol.alpha[t] > 0) {
                    machine.support_vectors.push_back(Xp[t]);
                    machine.coeffs.push_back(sol.alpha[t] * yp[t]);
                }
            }
            machine.sum_alpha_y = say;
            platt_fit(sol.decisions, labels, machine.platt_a, machine.platt_b);
            model.machines.push_back(std::move(machine));
        }
    }
    return model;
}

ClassProbabilities TrainedSvm::predict(const std::vector<double>& x) const {
    std::vector<double> z = standardize_row(x, standardization);
    const int k = static_cast<int>(classes.size());
    std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.5));
    std::vector<std::vector<bool>> have(k, std::vector<bool>(k, false));
    for (const auto& m : machines) {
        double f = m.decision(z, gamma);
        double fApB = f * m.platt_a + m.platt_b;
        double prob = fApB >= 0 ? std::exp(-fApB) / (1.0 + std::exp(-fApB))
                                : 1.0 / (1.0 + std::exp(fApB));
        prob = std::min(std::max(prob, 1e-7), 1.0 - 1e-7);
        r[m.class_a][m.class_b] = prob;
        r[m.class_b][m.class_a] = 1.0 - prob;
        have[m.class_a][m.class_b] = have[m.class_b][m.class_a] = true;
    }

    // classes that never appeared in training lose every virtual pairing
    std::vector<bool> seen(k, false);
    for (const auto& m : machines) seen[m.class_a] = seen[m.class_b] = true;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && !have[i][j]) {
                if (seen[i] && !seen[j]) r[i][j] = 1.0 - 1e-7;
                if (!seen[i] && seen[j]) r[i][j] = 1e-7;
            }

    ClassProbabilities out;
    out.probs = pairwise_coupling(r);
    out.ranking.resize(k);
    for (int i = 0; i < k; ++i) out.ranking[i] = i;
    std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](int a, int b) {
        if (out.probs[a] != out.probs[b]) return out.probs[a] > out.probs[b];
        return a < b;
    });
    return out;
}

CvResult kfold_cv(const Matrix& X, const std::vector<int>& y,
                  const std::vector<std::string>& classes, int k,
                  const SvmTrainOptions& options) {
    if (k < 2) throw InvalidArgument("kfold_cv requires k >= 2");
    const int n_classes = static_cast<int>(classes.size());

    // stratified assignment: per-class seeded shuffle then round-robin
    std::vector<std::vector<size_t>> per_class(n_classes);
    for (size_t t = 0; t < y.size(); ++t) per_class[y[t]].push_back(t);
    std::vector<int> fold_of(y.size(), 0);
    for (int c = 0; c < n_classes; ++c) {
        auto& idx = per_class[c];
        if (!idx.empty() && static_cast<int>(idx.size()) < k)
            std::fprintf(stderr, "warning: class %s has %zu members, < %d folds\n",
                         classes[c].c_str(), idx.size(), k);
        Rng rng = Rng::substream(options.seed, "cv_shuffle", static_cast<std::uint64_t>(c));
        rng.shuffle(idx);
        for (size_t t = 0; t < idx.size(); ++t)
            fold_of[idx[t]] = static_cast<int>(t % k);
    }

    CvResult result;
    double acc_sum = 0.0;
    int used_folds = 0;
    for (int f = 0; f < k; ++f) {
        Matrix Xtr, Xte;
        std::vector<int> ytr, yte;
        for (size_t t = 0; t < y.size(); ++t) {
            if (fold_of[t] == f) {
                Xte.push_back(X[t]);
                yte.push_back(y[t]);
            } else {
                Xtr.push_back(X[t]);
                ytr.push_back(y[t]);
            }
        }
        if (Xte.empty() || Xtr.empty()) continue;
        TrainedSvm model = svm_train(Xtr, ytr, classes, options);
        int correct = 0;
        for (size_t t = 0; t < Xte.size(); ++t)
            if (model.predict(Xte[t]).top() == yte[t]) ++correct;
        double acc = static_cast<double>(correct) / Xte.size();
        result.fold_accuracies.push_back(acc);
        acc_sum += acc;
        ++used_folds;
    }
    result.mean_accuracy = used_folds > 0 ? acc_sum / used_folds : 0.0;
    return result;
}

} // namespace histoctx
