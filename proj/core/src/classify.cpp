#include "hashspread/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "hashspread/csv.hpp"
#include "hashspread/rng.hpp"

namespace hashspread::classify {

namespace {

constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "local_event",
    "local_phenomenon",
    "event",
    "other_meme",
};

double sample_stddev(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

std::string_view class_name(HashtagClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<HashtagClass> parse_class(std::string_view name) {
    for (std::size_t i = 0; i < kClassCount; ++i) {
        if (kClassNames[i] == name) return static_cast<HashtagClass>(i);
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, HashtagClass>> read_labels_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2 || fields[0] != "hashtag" ||
        fields[1] != "class") {
        throw std::runtime_error("labels CSV header must be hashtag,class");
    }
    std::vector<std::pair<std::string, HashtagClass>> out;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() < 2) {
            throw std::runtime_error("labels CSV: short row at line " +
                                     std::to_string(reader.line()));
        }
        auto cls = parse_class(fields[1]);
        if (!cls) throw std::runtime_error("labels CSV: unknown class '" + fields[1] + "'");
        out.emplace_back(fields[0], *cls);
    }
    return out;
}

std::vector<std::string> read_exclusion_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open exclusion file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

LabeledSet make_labeled_set(const std::vector<FeatureVector>& features,
                            const std::vector<std::pair<std::string, HashtagClass>>& labels,
                            const std::vector<std::string>& exclusions) {
    std::unordered_map<std::string_view, const FeatureVector*> by_tag;
    by_tag.reserve(features.size());
    for (const auto& f : features) by_tag.emplace(f.hashtag, &f);
    std::unordered_set<std::string> excluded(exclusions.begin(), exclusions.end());

    LabeledSet set;
    set.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    std::unordered_set<std::string_view> seen;
    for (const auto& [tag, cls] : labels) {
        if (excluded.count(tag)) continue;
        if (!seen.insert(tag).second) {
            throw std::runtime_error("duplicate label for hashtag '" + tag + "'");
        }
        auto it = by_tag.find(tag);
        if (it == by_tag.end()) {
            throw std::runtime_error("labeled hashtag '" + tag + "' has no feature vector");
        }
        LabeledSample s;
        s.hashtag = tag;
        s.features.assign(it->second->values.begin(), it->second->values.end());
        s.label = cls;
        set.samples.push_back(std::move(s));
    }
    return set;
}

namespace {

const std::vector<std::string> kSpatialColumns = {"focus", "entropy", "spread_km"};
const std::vector<std::string> kTemporalColumns = {
    "local_variation", "temporal_focus",  "temporal_entropy",
    "temporal_spread_days", "peak_increase", "peak_decline"};
const std::vector<std::string> kUserDiversityColumns = {"user_diversity"};

}  // namespace

std::optional<FeatureGroup> parse_feature_group(std::string_view name) {
    if (name == "spatial") return FeatureGroup::spatial;
    if (name == "temporal") return FeatureGroup::temporal;
    if (name == "user_diversity") return FeatureGroup::user_diversity;
    return std::nullopt;
}

std::string_view feature_group_name(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::spatial: return "spatial";
        case FeatureGroup::temporal: return "temporal";
        case FeatureGroup::user_diversity: return "user_diversity";
    }
    return "";
}

const std::vector<std::string>& feature_group_columns(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::spatial: return kSpatialColumns;
        case FeatureGroup::temporal: return kTemporalColumns;
        case FeatureGroup::user_diversity: return kUserDiversityColumns;
    }
    return kUserDiversityColumns;
}

LabeledSet ablate(const LabeledSet& set, FeatureGroup group) {
    const auto& drop = feature_group_columns(group);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < set.feature_names.size(); ++i) {
        if (std::find(drop.begin(), drop.end(), set.feature_names[i]) == drop.end()) {
            keep.push_back(i);
        }
    }
    LabeledSet out;
    for (std::size_t i : keep) out.feature_names.push_back(set.feature_names[i]);
    out.samples.reserve(set.samples.size());
    for (const auto& s : set.samples) {
        LabeledSample t;
        t.hashtag = s.hashtag;
        t.label = s.label;
        t.features.reserve(keep.size());
        for (std::size_t i : keep) t.features.push_back(s.features[i]);
        out.samples.push_back(std::move(t));
    }
    return out;
}

void Standardizer::fit(const std::vector<std::vector<double>>& train) {
    if (train.empty()) throw std::invalid_argument("standardizer fitted on an empty training set");
    std::size_t dim = train.front().size();
    mean.assign(dim, 0.0);
    scale.assign(dim, 1.0);
    double n = static_cast<double>(train.size());
    for (const auto& row : train) {
        for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
    }
    for (std::size_t j = 0; j < dim; ++j) mean[j] /= n;
    std::vector<double> var(dim, 0.0);
    for (const auto& row : train) {
        for (std::size_t j = 0; j < dim; ++j) {
            double d = row[j] - mean[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        var[j] /= n;
        if (var[j] > 0.0) {
            scale[j] = std::sqrt(var[j]);
        } else {
            // constant column: identity transform
            mean[j] = 0.0;
            scale[j] = 1.0;
        }
    }
}

void Standardizer::apply(std::vector<double>& x) const {
    for (std::size_t j = 0; j < mean.size(); ++j) x[j] = (x[j] - mean[j]) / scale[j];
}

std::vector<std::vector<double>> Standardizer::transform(
    std::vector<std::vector<double>> rows) const {
    for (auto& r : rows) apply(r);
    return rows;
}

void MedianImputer::fit(const std::vector<std::vector<double>>& train) {
    if (train.empty()) throw std::invalid_argument("imputer fitted on an empty training set");
    std::size_t dim = train.front().size();
    fill.assign(dim, 0.0);
    std::vector<double> finite;
    for (std::size_t j = 0; j < dim; ++j) {
        finite.clear();
        for (const auto& row : train) {
            if (std::isfinite(row[j])) finite.push_back(row[j]);
        }
        if (finite.empty()) {
            fill[j] = 0.0;
            continue;
        }
        std::sort(finite.begin(), finite.end());
        std::size_t n = finite.size();
        fill[j] = (n % 2 == 1) ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
    }
}

void MedianImputer::apply(std::vector<double>& x) const {
    for (std::size_t j = 0; j < fill.size(); ++j) {
        if (std::isnan(x[j])) x[j] = fill[j];
    }
}

std::vector<std::vector<double>> MedianImputer::transform(
    std::vector<std::vector<double>> rows) const {
    for (auto& r : rows) apply(r);
    return rows;
}

std::optional<ModelKind> parse_model_name(std::string_view name) {
    if (name == "knn") return ModelKind::knn;
    if (name == "cart") return ModelKind::cart;
    if (name == "naive_bayes") return ModelKind::naive_bayes;
    if (name == "logistic") return ModelKind::logistic;
    if (name == "lda") return ModelKind::lda;
    if (name == "zeror") return ModelKind::zeror;
    return std::nullopt;
}

std::string_view model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::knn: return "knn";
        case ModelKind::cart: return "cart";
        case ModelKind::naive_bayes: return "naive_bayes";
        case ModelKind::logistic: return "logistic";
        case ModelKind::lda: return "lda";
        case ModelKind::zeror: return "zeror";
    }
    return "";
}

std::vector<HashtagClass> Classifier::predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<HashtagClass> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw std::invalid_argument("feature dimension mismatch: expected " +
                                        std::to_string(dim_) + ", got " +
                                        std::to_string(row.size()));
        }
        out.push_back(predict_one(row));
    }
    return out;
}

FoldPlan FoldPlan::stratified(std::span<const HashtagClass> labels, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be >= 2");
    if (labels.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("labeled set smaller than the fold count");
    }
    FoldPlan plan;
    plan.k = k;
    plan.fold_of.assign(labels.size(), 0);
    Rng rng(mix_seed(seed));
    for (std::size_t c = 0; c < kClassCount; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (static_cast<std::size_t>(labels[i]) == c) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            plan.fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }
    return plan;
}

namespace {

struct SingleEval {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::array<double, kClassCount> precision{}, recall{}, f1{};
    std::array<std::uint64_t, kClassCount> support{};
    std::array<bool, kClassCount> no_prediction{};
    std::array<std::array<std::uint64_t, kClassCount>, kClassCount> confusion{};
};

SingleEval evaluate_single(std::span<const HashtagClass> predictions,
                           std::span<const HashtagClass> truths) {
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("predictions and truths differ in length");
    }
    if (predictions.empty()) throw std::invalid_argument("nothing to evaluate");
    SingleEval e;
    std::uint64_t correct = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        auto t = static_cast<std::size_t>(truths[i]);
        auto p = static_cast<std::size_t>(predictions[i]);
        ++e.confusion[t][p];
        if (t == p) ++correct;
    }
    e.accuracy = static_cast<double>(correct) / static_cast<double>(truths.size());
    double f1_sum = 0.0;
    std::size_t f1_classes = 0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        std::uint64_t tp = e.confusion[c][c];
        std::uint64_t fn = 0, fp = 0;
        for (std::size_t o = 0; o < kClassCount; ++o) {
            if (o != c) {
                fn += e.confusion[c][o];
                fp += e.confusion[o][c];
            }
        }
        e.support[c] = tp + fn;
        if (tp + fp == 0) {
            e.precision[c] = 0.0;
            e.no_prediction[c] = true;
        } else {
            e.precision[c] = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        e.recall[c] = e.support[c] == 0 ? 0.0
                                        : static_cast<double>(tp) / static_cast<double>(tp + fn);
        double denom = e.precision[c] + e.recall[c];
        e.f1[c] = denom == 0.0 ? 0.0 : 2.0 * e.precision[c] * e.recall[c] / denom;
        if (e.support[c] > 0) {
            f1_sum += e.f1[c];
            ++f1_classes;
        }
    }
    e.macro_f1 = f1_classes == 0 ? 0.0 : f1_sum / static_cast<double>(f1_classes);
    return e;
}

double majority_fraction_of(std::span<const HashtagClass> truths) {
    std::array<std::uint64_t, kClassCount> counts{};
    for (auto t : truths) ++counts[static_cast<std::size_t>(t)];
    std::uint64_t best = *std::max_element(counts.begin(), counts.end());
    return static_cast<double>(best) / static_cast<double>(truths.size());
}

EvalReport aggregate_runs(const std::vector<SingleEval>& runs) {
    EvalReport report;
    std::vector<double> acc, macro;
    for (const auto& r : runs) {
        acc.push_back(r.accuracy);
        macro.push_back(r.macro_f1);
    }
    report.accuracy_mean = mean_of(acc);
    report.accuracy_std = sample_stddev(acc, report.accuracy_mean);
    report.macro_f1_mean = mean_of(macro);
    report.macro_f1_std = sample_stddev(macro, report.macro_f1_mean);
    for (std::size_t c = 0; c < kClassCount; ++c) {
        std::vector<double> p, r, f;
        for (const auto& run : runs) {
            p.push_back(run.precision[c]);
            r.push_back(run.recall[c]);
            f.push_back(run.f1[c]);
        }
        auto& cr = report.per_class[c];
        cr.precision_mean = mean_of(p);
        cr.precision_std = sample_stddev(p, cr.precision_mean);
        cr.recall_mean = mean_of(r);
        cr.recall_std = sample_stddev(r, cr.recall_mean);
        cr.f1_mean = mean_of(f);
        cr.f1_std = sample_stddev(f, cr.f1_mean);
        cr.support = runs.front().support[c];
        for (const auto& run : runs) cr.no_prediction_flag |= run.no_prediction[c];
        for (const auto& run : runs) {
            for (std::size_t o = 0; o < kClassCount; ++o) {
                report.confusion[c][o] += run.confusion[c][o];
            }
        }
    }
    return report;
}

}  // namespace

EvalReport evaluate(std::span<const HashtagClass> predictions,
                    std::span<const HashtagClass> truths) {
    SingleEval single = evaluate_single(predictions, truths);
    EvalReport report = aggregate_runs({single});
    report.model = "external";
    report.k = 1;
    report.repeats = 1;
    report.samples = truths.size();
    report.majority_fraction = majority_fraction_of(truths);
    return report;
}

EvalReport cross_validate(ModelKind kind, const LabeledSet& input, const CvOptions& options) {
    if (options.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    LabeledSet ablated_storage;
    const LabeledSet* set = &input;
    if (options.ablate_group) {
        ablated_storage = ablate(input, *options.ablate_group);
        set = &ablated_storage;
    }
    const std::size_t n = set->samples.size();
    if (n < static_cast<std::size_t>(options.k)) {
        throw std::invalid_argument("labeled set smaller than the fold count");
    }

    std::vector<HashtagClass> truths(n);
    for (std::size_t i = 0; i < n; ++i) truths[i] = set->samples[i].label;

    EvalReport report;
    std::array<std::uint64_t, kClassCount> class_counts{};
    for (auto t : truths) ++class_counts[static_cast<std::size_t>(t)];
    for (std::size_t c = 0; c < kClassCount; ++c) {
        if (class_counts[c] > 0 && class_counts[c] < static_cast<std::uint64_t>(options.k)) {
            report.warnings.push_back("class " + std::string(class_name(HashtagClass(c))) +
                                      " has fewer samples than folds; stratification degraded");
        }
    }

    std::vector<SingleEval> runs;
    runs.reserve(static_cast<std::size_t>(options.repeats));
    for (int rep = 0; rep < options.repeats; ++rep) {
        FoldPlan plan = FoldPlan::stratified(truths, options.k,
                                             options.seed + static_cast<std::uint64_t>(rep));
        std::vector<HashtagClass> predictions(n);
        for (int fold = 0; fold < options.k; ++fold) {
            std::vector<std::vector<double>> train_x, test_x;
            std::vector<HashtagClass> train_y;
            std::vector<std::size_t> test_idx;
            for (std::size_t i = 0; i < n; ++i) {
                if (plan.fold_of[i] == fold) {
                    test_x.push_back(set->samples[i].features);
                    test_idx.push_back(i);
                } else {
                    train_x.push_back(set->samples[i].features);
                    train_y.push_back(set->samples[i].label);
                }
            }
            if (test_idx.empty()) continue;

            MedianImputer imputer;
            imputer.fit(train_x);
            train_x = imputer.transform(std::move(train_x));
            Standardizer standardizer;
            standardizer.fit(train_x);
            train_x = standardizer.transform(std::move(train_x));

            auto model = make_classifier(kind, options.params);
            model->fit(train_x, train_y);

            if (options.param_observer) {
                std::vector<double> blob;
                blob.insert(blob.end(), imputer.fill.begin(), imputer.fill.end());
                blob.insert(blob.end(), standardizer.mean.begin(), standardizer.mean.end());
                blob.insert(blob.end(), standardizer.scale.begin(), standardizer.scale.end());
                auto model_blob = model->parameter_blob();
                blob.insert(blob.end(), model_blob.begin(), model_blob.end());
                options.param_observer(rep, fold, blob);
            }

            test_x = standardizer.transform(imputer.transform(std::move(test_x)));
            auto preds = model->predict(test_x);
            for (std::size_t i = 0; i < test_idx.size(); ++i) {
                predictions[test_idx[i]] = preds[i];
            }
        }
        runs.push_back(evaluate_single(predictions, truths));
    }

    EvalReport aggregated = aggregate_runs(runs);
    aggregated.warnings = std::move(report.warnings);
    aggregated.model = std::string(model_name(kind));
    aggregated.k = options.k;
    aggregated.repeats = options.repeats;
    aggregated.seed = options.seed;
    aggregated.samples = n;
    aggregated.majority_fraction = majority_fraction_of(truths);
    aggregated.ablated = options.ablate_group;
    return aggregated;
}

std::string EvalReport::to_json() const {
    nlohmann::json obj;
    obj["model"] = model;
    obj["k"] = k;
    obj["repeats"] = repeats;
    obj["seed"] = seed;
    obj["samples"] = samples;
    obj["majority_fraction"] = majority_fraction;
    obj["accuracy"] = {{"mean", accuracy_mean}, {"stddev", accuracy_std}};
    obj["macro_f1"] = {{"mean", macro_f1_mean}, {"stddev", macro_f1_std}};
    if (ablated) obj["ablated_group"] = std::string(feature_group_name(*ablated));
    nlohmann::json classes;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto& cr = per_class[c];
        nlohmann::json entry;
        entry["precision"] = {{"mean", cr.precision_mean}, {"stddev", cr.precision_std}};
        entry["recall"] = {{"mean", cr.recall_mean}, {"stddev", cr.recall_std}};
        entry["f1"] = {{"mean", cr.f1_mean}, {"stddev", cr.f1_std}};
        entry["support"] = cr.support;
        entry["never_predicted_in_some_run"] = cr.no_prediction_flag;
        classes[std::string(class_name(HashtagClass(c)))] = entry;
    }
    obj["per_class"] = classes;
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : confusion) {
        matrix.push_back(std::vector<std::uint64_t>(row.begin(), row.end()));
    }
    obj["confusion"] = matrix;
    obj["warnings"] = warnings;
    return obj.dump(2);
}

}  // namespace hashspread::classify
