#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hashspread/features.hpp"

namespace hashspread::classify {

enum class HashtagClass : std::uint8_t {
    LocalEvent = 0,
    LocalPhenomenon = 1,
    Event = 2,
    OtherMeme = 3,
};
inline constexpr std::size_t kClassCount = 4;

std::string_view class_name(HashtagClass c);
std::optional<HashtagClass> parse_class(std::string_view name);

struct LabeledSample {
    std::string hashtag;
    std::vector<double> features;
    HashtagClass label = HashtagClass::LocalEvent;
};

struct LabeledSet {
    std::vector<std::string> feature_names;
    std::vector<LabeledSample> samples;

    std::size_t dim() const { return feature_names.size(); }
};

// Label file: CSV with header hashtag,class. The optional exclusion file
// lists one hashtag per line.
std::vector<std::pair<std::string, HashtagClass>> read_labels_csv(const std::string& path);
std::vector<std::string> read_exclusion_list(const std::string& path);

// Joins labels with feature vectors. Labels must be unique and every retained
// label needs a feature vector; hashtags on the exclusion list are dropped.
LabeledSet make_labeled_set(const std::vector<FeatureVector>& features,
                            const std::vector<std::pair<std::string, HashtagClass>>& labels,
                            const std::vector<std::string>& exclusions = {});

enum class FeatureGroup { spatial, temporal, user_diversity };
std::optional<FeatureGroup> parse_feature_group(std::string_view name);
std::string_view feature_group_name(FeatureGroup g);
const std::vector<std::string>& feature_group_columns(FeatureGroup g);

// Copy of the set without the given feature group's columns.
LabeledSet ablate(const LabeledSet& set, FeatureGroup group);

// Per-feature affine map to zero mean and unit (population) variance, fitted
// on training data only. Constant columns pass through untouched.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    void fit(const std::vector<std::vector<double>>& train);
    void apply(std::vector<double>& x) const;
    std::vector<std::vector<double>> transform(std::vector<std::vector<double>> rows) const;
};

// Replaces NaNs with the per-column median of the finite training values
// (undefined local variation is the one feature that produces them).
struct MedianImputer {
    std::vector<double> fill;

    void fit(const std::vector<std::vector<double>>& train);
    void apply(std::vector<double>& x) const;
    std::vector<std::vector<double>> transform(std::vector<std::vector<double>> rows) const;
};

enum class ModelKind { knn, cart, naive_bayes, logistic, lda, zeror };
std::optional<ModelKind> parse_model_name(std::string_view name);
std::string_view model_name(ModelKind kind);

struct ModelParams {
    int knn_k = 5;
    int cart_max_depth = 8;
    int cart_min_leaf = 3;
    double nb_variance_floor = 1e-9;
    double logistic_l2 = 1.0;
    double logistic_tolerance = 1e-6;
    std::size_t logistic_max_iterations = 200000;
};

class Classifier {
public:
    virtual ~Classifier() = default;

    // Deterministic; throws on non-finite features, and for generative models
    // (lda, naive_bayes) on a class with no training samples.
    virtual void fit(const std::vector<std::vector<double>>& train_x,
                     const std::vector<HashtagClass>& train_y) = 0;

    virtual HashtagClass predict_one(std::span<const double> x) const = 0;
    std::vector<HashtagClass> predict(const std::vector<std::vector<double>>& rows) const;

    // Fitted state flattened for bit-exact comparisons.
    virtual std::vector<double> parameter_blob() const = 0;

    std::size_t dim() const { return dim_; }

protected:
    std::size_t dim_ = 0;
};

std::unique_ptr<Classifier> make_classifier(ModelKind kind, const ModelParams& params = {});

// Multinomial logistic loss (sum NLL + l2/2 * |W|^2, bias unpenalized) and its
// gradient; theta is [W row-major (class, feature), bias]. Exposed so the
// gradient can be checked against finite differences.
double logistic_loss_and_grad(const std::vector<std::vector<double>>& x,
                              const std::vector<HashtagClass>& y, std::span<const double> theta,
                              std::size_t dim, double l2, std::span<double> grad);

struct FoldPlan {
    int k = 0;
    std::vector<int> fold_of;

    // Per class, shuffled then dealt round-robin: per-class fold counts differ
    // by at most one.
    static FoldPlan stratified(std::span<const HashtagClass> labels, int k, std::uint64_t seed);
};

struct ClassReport {
    double precision_mean = 0.0, precision_std = 0.0;
    double recall_mean = 0.0, recall_std = 0.0;
    double f1_mean = 0.0, f1_std = 0.0;
    std::uint64_t support = 0;
    bool no_prediction_flag = false;  // some run predicted this class never
};

struct EvalReport {
    std::string model;
    int k = 1;
    int repeats = 1;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    double macro_f1_mean = 0.0, macro_f1_std = 0.0;
    double majority_fraction = 0.0;
    std::array<ClassReport, kClassCount> per_class{};
    std::array<std::array<std::uint64_t, kClassCount>, kClassCount> confusion{};  // [truth][pred]
    std::optional<FeatureGroup> ablated;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

// Single-run scores; length mismatch or empty input throws.
EvalReport evaluate(std::span<const HashtagClass> predictions,
                    std::span<const HashtagClass> truths);

struct CvOptions {
    int k = 10;
    int repeats = 10;
    std::uint64_t seed = 42;
    ModelParams params;
    std::optional<FeatureGroup> ablate_group;
    // Test hook: receives the fitted transform+model parameters per fold.
    std::function<void(int repeat, int fold, const std::vector<double>& blob)> param_observer;
};

// Repeated stratified k-fold cross-validation. Imputation and standardization
// are fitted per fold on the training split only; repeats reseed the fold
// plan with seed+r. Reported numbers are mean and sample stddev over repeats.
EvalReport cross_validate(ModelKind kind, const LabeledSet& set, const CvOptions& options = {});

}  // namespace hashspread::classify
