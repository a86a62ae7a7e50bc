#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "hashspread/classify.hpp"

namespace hashspread::classify {

namespace {

void check_finite(const std::vector<std::vector<double>>& x) {
    for (const auto& row : x) {
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite feature value in training data");
            }
        }
    }
}

void check_shapes(const std::vector<std::vector<double>>& x, const std::vector<HashtagClass>& y) {
    if (x.empty()) throw std::invalid_argument("empty training set");
    if (x.size() != y.size()) throw std::invalid_argument("training features/labels mismatch");
    for (const auto& row : x) {
        if (row.size() != x.front().size()) {
            throw std::invalid_argument("ragged training matrix");
        }
    }
}

class ZeroR final : public Classifier {
public:
    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        std::array<std::uint64_t, kClassCount> counts{};
        for (auto label : y) ++counts[static_cast<std::size_t>(label)];
        std::size_t best = 0;
        for (std::size_t c = 1; c < kClassCount; ++c) {
            if (counts[c] > counts[best]) best = c;  // ties keep the smaller class index
        }
        majority_ = static_cast<HashtagClass>(best);
    }

    HashtagClass predict_one(std::span<const double>) const override { return majority_; }

    std::vector<double> parameter_blob() const override {
        return {static_cast<double>(majority_)};
    }

private:
    HashtagClass majority_ = HashtagClass::LocalEvent;
};

class Knn final : public Classifier {
public:
    explicit Knn(int k) : k_(k) {
        if (k < 1) throw std::invalid_argument("knn needs k >= 1");
    }

    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        train_x_ = x;
        train_y_ = y;
    }

    HashtagClass predict_one(std::span<const double> x) const override {
        struct Neighbor {
            double dist2;
            std::size_t index;
        };
        std::vector<Neighbor> neighbors(train_x_.size());
        for (std::size_t i = 0; i < train_x_.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) {
                double diff = x[j] - train_x_[i][j];
                acc += diff * diff;
            }
            neighbors[i] = {acc, i};
        }
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), neighbors.size());
        // distance ties resolved toward the smaller sample index
        std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<std::ptrdiff_t>(k),
                          neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
                              if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
                              return a.index < b.index;
                          });
        std::array<std::uint64_t, kClassCount> votes{};
        std::array<double, kClassCount> vote_dist{};
        for (std::size_t i = 0; i < k; ++i) {
            auto c = static_cast<std::size_t>(train_y_[neighbors[i].index]);
            ++votes[c];
            vote_dist[c] += std::sqrt(neighbors[i].dist2);
        }
        std::size_t best = 0;
        bool have = false;
        for (std::size_t c = 0; c < kClassCount; ++c) {
            if (votes[c] == 0) continue;
            if (!have || votes[c] > votes[best] ||
                (votes[c] == votes[best] && vote_dist[c] < vote_dist[best])) {
                best = c;
                have = true;
            }
        }
        return static_cast<HashtagClass>(best);
    }

    std::vector<double> parameter_blob() const override {
        std::vector<double> blob;
        blob.push_back(static_cast<double>(k_));
        for (std::size_t i = 0; i < train_x_.size(); ++i) {
            blob.insert(blob.end(), train_x_[i].begin(), train_x_[i].end());
            blob.push_back(static_cast<double>(train_y_[i]));
        }
        return blob;
    }

private:
    int k_;
    std::vector<std::vector<double>> train_x_;
    std::vector<HashtagClass> train_y_;
};

class Cart final : public Classifier {
public:
    Cart(int max_depth, int min_leaf) : max_depth_(max_depth), min_leaf_(min_leaf) {
        if (max_depth < 1 || min_leaf < 1) throw std::invalid_argument("bad CART parameters");
    }

    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        nodes_.clear();
        std::vector<std::size_t> indices(x.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        build(x, y, std::move(indices), 0);
    }

    HashtagClass predict_one(std::span<const double> x) const override {
        std::size_t node = 0;
        while (!nodes_[node].leaf) {
            node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                     : nodes_[node].right;
        }
        return nodes_[node].klass;
    }

    std::vector<double> parameter_blob() const override {
        std::vector<double> blob;
        for (const auto& n : nodes_) {
            blob.push_back(n.leaf ? 1.0 : 0.0);
            blob.push_back(static_cast<double>(n.feature));
            blob.push_back(n.threshold);
            blob.push_back(static_cast<double>(n.left));
            blob.push_back(static_cast<double>(n.right));
            blob.push_back(static_cast<double>(n.klass));
        }
        return blob;
    }

private:
    struct Node {
        bool leaf = true;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        HashtagClass klass = HashtagClass::LocalEvent;
    };

    static double gini(const std::array<std::uint64_t, kClassCount>& counts, double n) {
        double impurity = 1.0;
        for (auto c : counts) {
            double p = static_cast<double>(c) / n;
            impurity -= p * p;
        }
        return impurity;
    }

    std::size_t build(const std::vector<std::vector<double>>& x,
                      const std::vector<HashtagClass>& y, std::vector<std::size_t> members,
                      int depth) {
        std::size_t node_id = nodes_.size();
        nodes_.emplace_back();

        std::array<std::uint64_t, kClassCount> counts{};
        for (std::size_t i : members) ++counts[static_cast<std::size_t>(y[i])];
        std::size_t majority = 0;
        for (std::size_t c = 1; c < kClassCount; ++c) {
            if (counts[c] > counts[majority]) majority = c;
        }
        nodes_[node_id].klass = static_cast<HashtagClass>(majority);

        double n = static_cast<double>(members.size());
        double parent_impurity = gini(counts, n);
        bool pure = counts[majority] == members.size();
        if (depth >= max_depth_ || pure ||
            members.size() < 2 * static_cast<std::size_t>(min_leaf_)) {
            return node_id;
        }

        double best_gain = 1e-12;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        std::vector<std::size_t> sorted = members;
        for (std::size_t f = 0; f < dim_; ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
                return a < b;
            });
            std::array<std::uint64_t, kClassCount> left{};
            for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
                ++left[static_cast<std::size_t>(y[sorted[pos]])];
                double lhs = x[sorted[pos]][f];
                double rhs = x[sorted[pos + 1]][f];
                if (lhs == rhs) continue;
                std::size_t nl = pos + 1;
                std::size_t nr = sorted.size() - nl;
                if (nl < static_cast<std::size_t>(min_leaf_) ||
                    nr < static_cast<std::size_t>(min_leaf_)) {
                    continue;
                }
                std::array<std::uint64_t, kClassCount> right{};
                for (std::size_t c = 0; c < kClassCount; ++c) right[c] = counts[c] - left[c];
                double gain = parent_impurity -
                              (static_cast<double>(nl) / n) * gini(left, static_cast<double>(nl)) -
                              (static_cast<double>(nr) / n) * gini(right, static_cast<double>(nr));
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = lhs + (rhs - lhs) / 2.0;
                }
            }
        }
        if (best_gain <= 1e-12) return node_id;

        std::vector<std::size_t> left_members, right_members;
        for (std::size_t i : members) {
            (x[i][best_feature] <= best_threshold ? left_members : right_members).push_back(i);
        }
        if (left_members.size() < static_cast<std::size_t>(min_leaf_) ||
            right_members.size() < static_cast<std::size_t>(min_leaf_)) {
            return node_id;
        }
        members.clear();
        members.shrink_to_fit();
        std::size_t left_id = build(x, y, std::move(left_members), depth + 1);
        std::size_t right_id = build(x, y, std::move(right_members), depth + 1);
        nodes_[node_id].leaf = false;
        nodes_[node_id].feature = best_feature;
        nodes_[node_id].threshold = best_threshold;
        nodes_[node_id].left = left_id;
        nodes_[node_id].right = right_id;
        return node_id;
    }

    int max_depth_;
    int min_leaf_;
    std::vector<Node> nodes_;
};

class NaiveBayes final : public Classifier {
public:
    explicit NaiveBayes(double variance_floor) : floor_(variance_floor) {}

    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        std::array<std::uint64_t, kClassCount> counts{};
        for (auto label : y) ++counts[static_cast<std::size_t>(label)];
        for (std::size_t c = 0; c < kClassCount; ++c) {
            if (counts[c] == 0) {
                throw std::invalid_argument("naive bayes: class '" +
                                            std::string(class_name(HashtagClass(c))) +
                                            "' has no training samples");
            }
        }
        mean_.assign(kClassCount, std::vector<double>(dim_, 0.0));
        var_.assign(kClassCount, std::vector<double>(dim_, 0.0));
        log_prior_.assign(kClassCount, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto c = static_cast<std::size_t>(y[i]);
            for (std::size_t j = 0; j < dim_; ++j) mean_[c][j] += x[i][j];
        }
        for (std::size_t c = 0; c < kClassCount; ++c) {
            for (std::size_t j = 0; j < dim_; ++j) {
                mean_[c][j] /= static_cast<double>(counts[c]);
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto c = static_cast<std::size_t>(y[i]);
            for (std::size_t j = 0; j < dim_; ++j) {
                double d = x[i][j] - mean_[c][j];
                var_[c][j] += d * d;
            }
        }
        for (std::size_t c = 0; c < kClassCount; ++c) {
            for (std::size_t j = 0; j < dim_; ++j) {
                var_[c][j] = std::max(var_[c][j] / static_cast<double>(counts[c]), floor_);
            }
            log_prior_[c] = std::log(static_cast<double>(counts[c]) /
                                     static_cast<double>(x.size()));
        }
    }

    HashtagClass predict_one(std::span<const double> x) const override {
        constexpr double kLog2Pi = 1.8378770664093453;
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kClassCount; ++c) {
            double score = log_prior_[c];
            for (std::size_t j = 0; j < dim_; ++j) {
                double d = x[j] - mean_[c][j];
                score -= 0.5 * (kLog2Pi + std::log(var_[c][j]) + d * d / var_[c][j]);
            }
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        return static_cast<HashtagClass>(best);
    }

    std::vector<double> parameter_blob() const override {
        std::vector<double> blob = log_prior_;
        for (std::size_t c = 0; c < kClassCount; ++c) {
            blob.insert(blob.end(), mean_[c].begin(), mean_[c].end());
            blob.insert(blob.end(), var_[c].begin(), var_[c].end());
        }
        return blob;
    }

private:
    double floor_;
    std::vector<std::vector<double>> mean_, var_;
    std::vector<double> log_prior_;
};

class Logistic final : public Classifier {
public:
    Logistic(double l2, double tolerance, std::size_t max_iterations)
        : l2_(l2), tol_(tolerance), max_iter_(max_iterations) {}

    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        const std::size_t params = kClassCount * dim_ + kClassCount;
        theta_.assign(params, 0.0);

        // Accelerated gradient descent with backtracking and gradient restart;
        // stops when the gradient norm at theta drops below the tolerance.
        std::vector<double> prev = theta_;
        std::vector<double> lookahead = theta_;
        std::vector<double> grad(params), trial(params), grad_theta(params);
        double momentum_t = 1.0;
        double step = 1.0;
        for (std::size_t iter = 0; iter < max_iter_; ++iter) {
            double f_look = logistic_loss_and_grad(x, y, lookahead, dim_, l2_, grad);
            double gg = 0.0;
            for (double g : grad) gg += g * g;
            while (true) {
                for (std::size_t p = 0; p < params; ++p) {
                    trial[p] = lookahead[p] - step * grad[p];
                }
                double f_trial = logistic_loss_and_grad(x, y, trial, dim_, l2_, {});
                if (f_trial <= f_look - 0.5 * step * gg || step < 1e-18) break;
                step *= 0.5;
            }
            prev = theta_;
            theta_ = trial;

            double gnorm = std::sqrt(
                logistic_grad_norm2(x, y, theta_, grad_theta));
            if (gnorm < tol_) return;

            double uphill = 0.0;
            for (std::size_t p = 0; p < params; ++p) {
                uphill += grad[p] * (theta_[p] - prev[p]);
            }
            if (uphill > 0.0) momentum_t = 1.0;
            double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
            double beta = (momentum_t - 1.0) / t_next;
            for (std::size_t p = 0; p < params; ++p) {
                lookahead[p] = theta_[p] + beta * (theta_[p] - prev[p]);
            }
            momentum_t = t_next;
            step *= 1.5;
        }
        throw std::runtime_error("logistic regression did not reach the gradient tolerance");
    }

    HashtagClass predict_one(std::span<const double> x) const override {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kClassCount; ++c) {
            double s = theta_[kClassCount * dim_ + c];
            const double* w = theta_.data() + c * dim_;
            for (std::size_t j = 0; j < dim_; ++j) s += w[j] * x[j];
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        return static_cast<HashtagClass>(best);
    }

    std::vector<double> parameter_blob() const override { return theta_; }

private:
    double logistic_grad_norm2(const std::vector<std::vector<double>>& x,
                               const std::vector<HashtagClass>& y, std::span<const double> theta,
                               std::span<double> grad) const {
        logistic_loss_and_grad(x, y, theta, dim_, l2_, grad);
        double gg = 0.0;
        for (double g : grad) gg += g * g;
        return gg;
    }

    double l2_;
    double tol_;
    std::size_t max_iter_;
    std::vector<double> theta_;
};

class Lda final : public Classifier {
public:
    void fit(const std::vector<std::vector<double>>& x,
             const std::vector<HashtagClass>& y) override {
        check_shapes(x, y);
        check_finite(x);
        dim_ = x.front().size();
        const auto n = static_cast<Eigen::Index>(x.size());
        const auto d = static_cast<Eigen::Index>(dim_);

        std::array<std::uint64_t, kClassCount> counts{};
        for (auto label : y) ++counts[static_cast<std::size_t>(label)];
        for (std::size_t c = 0; c < kClassCount; ++c) {
            if (counts[c] == 0) {
                throw std::invalid_argument("lda: class '" +
                                            std::string(class_name(HashtagClass(c))) +
                                            "' has no training samples");
            }
        }

        Eigen::MatrixXd data(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) data(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }

        Eigen::MatrixXd means = Eigen::MatrixXd::Zero(kClassCount, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            means.row(static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)])) += data.row(i);
        }
        for (std::size_t c = 0; c < kClassCount; ++c) {
            means.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
        }

        // pooled within-class covariance
        Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::RowVectorXd centered =
                data.row(i) - means.row(static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]));
            pooled.noalias() += centered.transpose() * centered;
        }
        double denom = static_cast<double>(x.size()) - static_cast<double>(kClassCount);
        if (denom < 1.0) denom = 1.0;
        pooled /= denom;

        double lambda = 1e-6 * pooled.trace() / static_cast<double>(d);
        if (!(lambda > 0.0)) lambda = 1e-12;
        pooled.diagonal().array() += lambda;

        Eigen::LDLT<Eigen::MatrixXd> solver(pooled);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("lda: covariance factorization failed");
        }

        weights_.assign(kClassCount, std::vector<double>(dim_, 0.0));
        offsets_.assign(kClassCount, 0.0);
        covariance_.assign(static_cast<std::size_t>(d * d), 0.0);
        means_.assign(kClassCount, std::vector<double>(dim_, 0.0));
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                covariance_[static_cast<std::size_t>(r * d + c)] = pooled(r, c);
            }
        }
        for (std::size_t c = 0; c < kClassCount; ++c) {
            Eigen::VectorXd mu = means.row(static_cast<Eigen::Index>(c)).transpose();
            Eigen::VectorXd w = solver.solve(mu);
            for (Eigen::Index j = 0; j < d; ++j) {
                weights_[c][static_cast<std::size_t>(j)] = w(j);
                means_[c][static_cast<std::size_t>(j)] = mu(j);
            }
            double prior = static_cast<double>(counts[c]) / static_cast<double>(x.size());
            offsets_[c] = -0.5 * mu.dot(w) + std::log(prior);
        }
    }

    HashtagClass predict_one(std::span<const double> x) const override {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kClassCount; ++c) {
            double s = offsets_[c];
            for (std::size_t j = 0; j < dim_; ++j) s += weights_[c][j] * x[j];
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        return static_cast<HashtagClass>(best);
    }

    std::vector<double> parameter_blob() const override {
        std::vector<double> blob;
        for (std::size_t c = 0; c < kClassCount; ++c) {
            blob.insert(blob.end(), weights_[c].begin(), weights_[c].end());
            blob.push_back(offsets_[c]);
            blob.insert(blob.end(), means_[c].begin(), means_[c].end());
        }
        blob.insert(blob.end(), covariance_.begin(), covariance_.end());
        return blob;
    }

private:
    std::vector<std::vector<double>> weights_;
    std::vector<double> offsets_;
    std::vector<std::vector<double>> means_;
    std::vector<double> covariance_;
};

}  // namespace

double logistic_loss_and_grad(const std::vector<std::vector<double>>& x,
                              const std::vector<HashtagClass>& y, std::span<const double> theta,
                              std::size_t dim, double l2, std::span<double> grad) {
    const std::size_t params = kClassCount * dim + kClassCount;
    if (theta.size() != params) throw std::invalid_argument("bad logistic parameter size");
    bool want_grad = !grad.empty();
    if (want_grad) {
        if (grad.size() != params) throw std::invalid_argument("bad logistic gradient size");
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    const double* bias = theta.data() + kClassCount * dim;

    double loss = 0.0;
    std::array<double, kClassCount> scores{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& row = x[i];
        double max_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kClassCount; ++c) {
            double s = bias[c];
            const double* w = theta.data() + c * dim;
            for (std::size_t j = 0; j < dim; ++j) s += w[j] * row[j];
            scores[c] = s;
            max_score = std::max(max_score, s);
        }
        double z = 0.0;
        for (std::size_t c = 0; c < kClassCount; ++c) z += std::exp(scores[c] - max_score);
        double log_z = max_score + std::log(z);
        auto truth = static_cast<std::size_t>(y[i]);
        loss += log_z - scores[truth];
        if (want_grad) {
            for (std::size_t c = 0; c < kClassCount; ++c) {
                double p = std::exp(scores[c] - log_z);
                double residual = p - (c == truth ? 1.0 : 0.0);
                double* gw = grad.data() + c * dim;
                for (std::size_t j = 0; j < dim; ++j) gw[j] += residual * row[j];
                grad[kClassCount * dim + c] += residual;
            }
        }
    }
    // L2 on the weights only, never the bias
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const double* w = theta.data() + c * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            loss += 0.5 * l2 * w[j] * w[j];
            if (want_grad) grad[c * dim + j] += l2 * w[j];
        }
    }
    return loss;
}

std::unique_ptr<Classifier> make_classifier(ModelKind kind, const ModelParams& params) {
    switch (kind) {
        case ModelKind::zeror: return std::make_unique<ZeroR>();
        case ModelKind::knn: return std::make_unique<Knn>(params.knn_k);
        case ModelKind::cart: return std::make_unique<Cart>(params.cart_max_depth,
                                                            params.cart_min_leaf);
        case ModelKind::naive_bayes:
            return std::make_unique<NaiveBayes>(params.nb_variance_floor);
        case ModelKind::logistic:
            return std::make_unique<Logistic>(params.logistic_l2, params.logistic_tolerance,
                                              params.logistic_max_iterations);
        case ModelKind::lda: return std::make_unique<Lda>();
    }
    throw std::invalid_argument("unknown model kind");
}

}  // namespace hashspread::classify
