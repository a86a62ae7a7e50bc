// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashspread/classify.hpp"
#include "hashspread/features.hpp"
#include "hashspread/hashtag.hpp"
#include "hashspread/index.hpp"
#include "hashspread/influence.hpp"
#include "hashspread/ingest.hpp"
#include "hashspread/parallel.hpp"
#include "hashspread/rng.hpp"
#include "hashspread/spatial.hpp"
#include "hashspread/synth.hpp"
#include "hashspread/temporal.hpp"

#include "minicorpus.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace hashspread;
namespace cls = hashspread::classify;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    bool passed = true;
    std::vector<std::string> notes;
    double seconds = 0.0;

    void require(bool condition, const std::string& message) {
        if (!condition) {
            passed = false;
            if (notes.size() < 12) notes.push_back(message);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double peak_rss_gb() {
    struct rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) == 0 && usage.ru_maxrss > 0) {
        // ru_maxrss is in kilobytes on Linux
        return static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);
    }
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            long long kb = 0;
            std::sscanf(line.c_str(), "VmHWM: %lld kB", &kb);
            return static_cast<double>(kb) / (1024.0 * 1024.0);
        }
    }
    return -1.0;  // unmeasurable: forces the criterion to fail loudly
}

bool close_rel(double a, double b, double rel = 1e-9) {
    return testsupport::rel_close(a, b, rel);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_oracle_equivalence(Criterion& c) {
    std::size_t corpora = 0;
    std::size_t comparisons = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        auto corpus = testsupport::make_mini_corpus(seed);
        auto index = testsupport::build_index(corpus);
        ++corpora;
        for (const auto& tag : oracle::hashtags(corpus.truth)) {
            std::size_t i = index.require(tag);
            auto [floc, fprob] = focus(index, i);
            auto [eloc, eprob] = oracle::focus(corpus.truth, tag);
            c.require(index.locations().at(floc).id == eloc,
                      "focus location mismatch for " + tag);
            c.require(close_rel(fprob, eprob), "focus mismatch for " + tag);
            c.require(close_rel(entropy_bits(index, i), oracle::entropy_bits(corpus.truth, tag)),
                      "entropy mismatch for " + tag);
            c.require(close_rel(spread_km(index, i), oracle::spread_km(corpus.truth, tag)),
                      "spread mismatch for " + tag);
            c.require(close_rel(temporal_focus(index, i).second,
                                oracle::temporal_focus(corpus.truth, tag).second),
                      "temporal focus mismatch for " + tag);
            c.require(close_rel(temporal_entropy_bits(index, i),
                                oracle::temporal_entropy_bits(corpus.truth, tag)),
                      "temporal entropy mismatch for " + tag);
            c.require(close_rel(temporal_spread_days(index, i),
                                oracle::temporal_spread_days(corpus.truth, tag)),
                      "temporal spread mismatch for " + tag);
            auto lv = local_variation(index, i);
            auto lv_ref = oracle::local_variation(corpus.truth, tag);
            c.require(lv.has_value() == lv_ref.has_value(), "LV definedness mismatch for " + tag);
            if (lv && lv_ref) c.require(close_rel(*lv, *lv_ref), "LV mismatch for " + tag);
            auto [inc, dec] = peak_shape(index, i);
            auto [rinc, rdec] = oracle::peak_shape(corpus.truth, tag);
            c.require(close_rel(inc, rinc) && close_rel(dec, rdec),
                      "peak shape mismatch for " + tag);
            comparisons += 9;
        }
        // impact and similarity for a few city pairs per corpus
        Rng rng(mix_seed(seed) ^ 0xabcdef);
        for (int pair = 0; pair < 3 && corpus.city_ids.size() >= 2; ++pair) {
            auto a = corpus.city_ids[rng.below(corpus.city_ids.size())];
            auto b = corpus.city_ids[rng.below(corpus.city_ids.size())];
            if (a == b) continue;
            for (const auto& tag : corpus.tags) {
                if (!index.find(tag)) continue;
                auto got = hashtag_impact(index, tag, a, b);
                auto ref = oracle::hashtag_impact(corpus.truth, tag, a, b);
                c.require(got.has_value() == ref.has_value(),
                          "impact definedness mismatch for " + tag);
                if (got && ref) c.require(*got == *ref, "impact mismatch for " + tag);
            }
            auto sim = similarity(index, std::string_view(a), std::string_view(b));
            c.require(sim.score == oracle::similarity(corpus.truth, a, b),
                      "similarity mismatch " + a + "," + b);
            comparisons += 2;
        }
        if (!c.passed) break;
    }
    c.notes.insert(c.notes.begin(), std::to_string(corpora) + " corpora, " +
                                        std::to_string(comparisons) + " checks");
}

// ---------------------------------------------------------------- criterion 2

void criterion_formula_spot_checks(Criterion& c) {
    LocationTable towns;
    towns.add({"A", "A", 50.0, 6.0, 0, 0});
    towns.add({"B", "B", 50.8993, 6.0, 0, 0});  // ~100 km north
    auto rec = [](std::string id, std::string loc, Instant ts, std::string text) {
        PostRecord r;
        r.post_id = std::move(id);
        r.user_id = "u";
        r.location_id = std::move(loc);
        r.timestamp = ts;
        r.text = std::move(text);
        return r;
    };

    // entropy of a {3,1} split and a uniform 4-way split
    {
        LocationTable four;
        four.add({"A", "A", 50, 6, 0, 0});
        four.add({"B", "B", 51, 7, 0, 0});
        four.add({"C", "C", 52, 8, 0, 0});
        four.add({"D", "D", 53, 9, 0, 0});
        auto split = OccurrenceIndex::build({rec("p1", "A", 1, "#h"), rec("p2", "A", 2, "#h"),
                                             rec("p3", "A", 3, "#h"), rec("p4", "B", 4, "#h")},
                                            four);
        double e = entropy_bits(split, std::string_view("h"));
        c.require(std::abs(e - 0.811278124459133) < 1e-9,
                  "entropy({3,1}) = " + fmt(e) + ", want 0.811278");
        auto uniform = OccurrenceIndex::build({rec("p1", "A", 1, "#h"), rec("p2", "B", 2, "#h"),
                                               rec("p3", "C", 3, "#h"), rec("p4", "D", 4, "#h")},
                                              four);
        double u = entropy_bits(uniform, std::string_view("h"));
        c.require(std::abs(u - 2.0) < 1e-12, "uniform-4 entropy = " + fmt(u) + ", want 2");
    }

    // two-point spread is half the pairwise haversine distance
    {
        auto index = OccurrenceIndex::build({rec("p1", "A", 1, "#h"), rec("p2", "B", 2, "#h")},
                                            towns);
        double separation = haversine_km(50.0, 6.0, 50.8993, 6.0);
        double spread = spread_km(index, std::string_view("h"));
        c.require(std::abs(spread - separation / 2.0) <= 0.5,
                  "two-point spread " + fmt(spread) + " vs half distance " +
                      fmt(separation / 2.0));
    }

    // temporal spread of two uses 100 days apart
    {
        auto index = OccurrenceIndex::build(
            {rec("p1", "A", 1451606400, "#h"),
             rec("p2", "A", 1451606400 + 100ll * 86400, "#h")},
            towns);
        double days = temporal_spread_days(index, std::string_view("h"));
        c.require(std::abs(days - 50.0) < 1e-9, "temporal spread = " + fmt(days) + ", want 50");
    }
}

// ---------------------------------------------------------------- criterion 3

void criterion_impact_anchors(Criterion& c) {
    LocationTable towns;
    towns.add({"A", "A", 50.0, 6.0, 0, 0});
    towns.add({"B", "B", 52.0, 8.0, 0, 0});

    auto timing_records = [](const std::vector<std::pair<char, Instant>>& uses, int tag_index) {
        std::vector<PostRecord> records;
        int seq = 0;
        for (const auto& [loc, ts] : uses) {
            PostRecord r;
            r.post_id = "p" + std::to_string(tag_index) + "_" + std::to_string(seq++);
            r.user_id = "u";
            r.location_id = std::string(1, loc);
            r.timestamp = ts;
            r.text = "#g" + std::to_string(tag_index);
            records.push_back(std::move(r));
        }
        return records;
    };

    // endpoints
    {
        auto index = OccurrenceIndex::build(
            timing_records({{'A', 1}, {'A', 2}, {'B', 3}, {'B', 4}}, 0), towns);
        c.require(*hashtag_impact(index, "g0", "A", "B") == 1.0, "all-A-before-B should be +1");
        c.require(*hashtag_impact(index, "g0", "B", "A") == -1.0, "swap should be -1");
    }

    // interleaved alternation: |score| < 2/n, exact against pair enumeration
    for (std::size_t n : {2ull, 5ull, 10ull, 25ull, 50ull}) {
        std::vector<std::pair<char, Instant>> uses;
        oracle::Corpus truth;
        for (std::size_t i = 0; i < n; ++i) {
            uses.push_back({'A', static_cast<Instant>(2 * i + 1)});
            uses.push_back({'B', static_cast<Instant>(2 * i + 2)});
            truth.push_back({"g1", "A", 50, 6, static_cast<Instant>(2 * i + 1), "u", "p"});
            truth.push_back({"g1", "B", 52, 8, static_cast<Instant>(2 * i + 2), "u", "p"});
        }
        auto index = OccurrenceIndex::build(timing_records(uses, 1), towns);
        double score = *hashtag_impact(index, "g1", "A", "B");
        c.require(std::abs(score) < 2.0 / static_cast<double>(n),
                  "alternation score " + fmt(score) + " not below 2/n for n=" +
                      std::to_string(n));
        c.require(score == *oracle::hashtag_impact(truth, "g1", "A", "B"),
                  "alternation disagrees with the pair oracle");
    }

    // antisymmetry, exactly, on 10^4 random timing pairs (one big index)
    {
        Rng rng(0xA5A5);
        std::vector<PostRecord> records;
        const int pairs = 10000;
        for (int t = 0; t < pairs; ++t) {
            std::size_t na = 1 + rng.below(12);
            std::size_t nb = 1 + rng.below(12);
            int seq = 0;
            for (std::size_t i = 0; i < na; ++i) {
                PostRecord r;
                r.post_id = "pa" + std::to_string(t) + "_" + std::to_string(seq++);
                r.user_id = "u";
                r.location_id = "A";
                r.timestamp = static_cast<Instant>(rng.below(40));
                r.text = "#t" + std::to_string(t);
                records.push_back(std::move(r));
            }
            for (std::size_t i = 0; i < nb; ++i) {
                PostRecord r;
                r.post_id = "pb" + std::to_string(t) + "_" + std::to_string(seq++);
                r.user_id = "u";
                r.location_id = "B";
                r.timestamp = static_cast<Instant>(rng.below(40));
                r.text = "#t" + std::to_string(t);
                records.push_back(std::move(r));
            }
        }
        auto index = OccurrenceIndex::build(records, towns);
        auto a = *index.locations().find("A");
        auto b = *index.locations().find("B");
        bool all_exact = true;
        for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
            auto fwd = hashtag_impact(index, i, a, b);
            auto rev = hashtag_impact(index, i, b, a);
            if (!fwd || !rev || *fwd != -*rev) all_exact = false;
        }
        c.require(all_exact, "antisymmetry violated on random pairs");
        c.notes.push_back("10000 random pairs antisymmetric");
    }
}

// ---------------------------------------------------------------- criterion 4

void criterion_fast_path_equality(Criterion& c) {
    LocationTable towns;
    towns.add({"A", "A", 50.0, 6.0, 0, 0});
    towns.add({"B", "B", 52.0, 8.0, 0, 0});
    Rng rng(0xFA57);
    std::vector<PostRecord> records;
    std::vector<oracle::Corpus> truths(1000);
    for (int t = 0; t < 1000; ++t) {
        std::size_t na = 1 + rng.below(40);
        std::size_t nb = 1 + rng.below(40);
        int seq = 0;
        auto add = [&](char loc, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) {
                // coarse timestamps force plenty of ties
                Instant ts = static_cast<Instant>(rng.below(30));
                PostRecord r;
                r.post_id = "p" + std::to_string(t) + "_" + std::to_string(seq++);
                r.user_id = "u";
                r.location_id = std::string(1, loc);
                r.timestamp = ts;
                r.text = "#q" + std::to_string(t);
                records.push_back(std::move(r));
                truths[static_cast<std::size_t>(t)].push_back(
                    {"q" + std::to_string(t), std::string(1, loc), 0, 0, ts, "u", "p"});
            }
        };
        add('A', na);
        add('B', nb);
    }
    auto index = OccurrenceIndex::build(records, towns);
    bool all_equal = true;
    for (int t = 0; t < 1000; ++t) {
        std::string tag = "q" + std::to_string(t);
        auto merged = hashtag_impact(index, tag, "A", "B");
        auto quadratic = oracle::hashtag_impact(truths[static_cast<std::size_t>(t)], tag, "A", "B");
        if (!merged || !quadratic || *merged != *quadratic) {
            all_equal = false;
            c.require(false, "merge path disagrees with quadratic oracle on " + tag);
            break;
        }
    }
    if (all_equal) c.notes.push_back("1000 instances, exact equality incl. ties");
}

// ---------------------------------------------------------------- criterion 5

void criterion_synthetic_shapes(Criterion& c) {
    const std::array<std::uint64_t, 5> seeds = {11, 12, 13, 14, 15};
    double med_local_event = 0, med_local_phenomenon = 0, med_event = 0, med_other = 0;
    double long_lived_low_focus = 0;
    double seed_to_small = 0, small_to_seed = 0;

    for (auto seed : seeds) {
        synth::WorldSpec spec;  // default: 200 cities, 2000 hashtags, 1e6 uses
        spec.seed = seed;
        auto world = synth::make_world(spec);
        OccurrenceIndex::Builder builder(world.location_table());
        auto ledger = synth::generate(spec, world, [&](PostRecord&& r) { builder.add(r); });
        auto index = builder.finish();

        std::array<std::vector<double>, cls::kClassCount> spreads;
        std::size_t long_lived = 0, long_lived_low = 0;
        std::string meme_seed_city;
        for (const auto& entry : ledger.entries) {
            std::size_t tag = index.require(entry.tag);
            auto klass = static_cast<std::size_t>(entry.hashtag_class);
            spreads[klass].push_back(spread_km(index, tag));
            if (entry.hashtag_class == synth::HashtagClass::LocalPhenomenon ||
                entry.hashtag_class == synth::HashtagClass::OtherMeme) {
                ++long_lived;
                if (temporal_focus(index, tag).second <= 0.25) ++long_lived_low;
            }
            if (entry.hashtag_class == synth::HashtagClass::OtherMeme) {
                meme_seed_city = entry.seed_city;
            }
        }
        auto median = [](std::vector<double> v) { return oracle::percentile(std::move(v), 0.5); };
        med_local_event += median(spreads[0]);
        med_local_phenomenon += median(spreads[1]);
        med_event += median(spreads[2]);
        med_other += median(spreads[3]);
        long_lived_low_focus +=
            static_cast<double>(long_lived_low) / static_cast<double>(long_lived);

        // seeding city vs the 20 lowest-ranked cities
        auto source = require_location(index, meme_seed_city);
        auto ranked = index.locations().by_rank();
        double fwd = 0, rev = 0;
        int counted = 0;
        for (std::size_t i = ranked.size() - 20; i < ranked.size(); ++i) {
            if (ranked[i] == source) continue;
            auto f = spatial_impact(index, source, ranked[i]);
            auto r = spatial_impact(index, ranked[i], source);
            if (f && r) {
                fwd += f->score;
                rev += r->score;
                ++counted;
            }
        }
        seed_to_small += fwd / counted;
        small_to_seed += rev / counted;
    }

    const double n = static_cast<double>(seeds.size());
    med_local_event /= n;
    med_local_phenomenon /= n;
    med_event /= n;
    med_other /= n;
    long_lived_low_focus /= n;
    seed_to_small /= n;
    small_to_seed /= n;

    c.notes.push_back("spread medians km: local_event " + fmt(med_local_event) +
                      ", local_phenomenon " + fmt(med_local_phenomenon) + ", event " +
                      fmt(med_event) + ", other_meme " + fmt(med_other));
    c.notes.push_back("long-lived low-focus share " + fmt(long_lived_low_focus));
    c.notes.push_back("impact seed->small " + fmt(seed_to_small) + ", small->seed " +
                      fmt(small_to_seed));

    c.require(med_event > 150.0, "event spread median must exceed 150 km");
    c.require(med_other > 150.0, "other_meme spread median must exceed 150 km");
    c.require(med_local_event < 50.0, "local_event spread median must stay below 50 km");
    c.require(med_local_phenomenon < 50.0,
              "local_phenomenon spread median must stay below 50 km");
    c.require(long_lived_low_focus >= 0.80,
              "at least 80% of long-lived hashtags need temporal focus <= 0.25");
    c.require(seed_to_small > 0.3, "seeding-city -> small-city impact must exceed 0.3");
    c.require(small_to_seed < -0.3, "small-city -> seeding-city impact must fall below -0.3");
}

// ---------------------------------------------------------------- criterion 6

cls::LabeledSet classification_set(std::uint64_t seed) {
    synth::WorldSpec spec;
    spec.cities = 200;
    spec.hashtags = 480;
    spec.class_mix = synth::ClassMix{120, 120, 120, 120};
    spec.target_uses = 72000;
    spec.users = 20000;
    spec.seed = seed;
    auto world = synth::make_world(spec);
    OccurrenceIndex::Builder builder(world.location_table());
    auto ledger = synth::generate(spec, world, [&](PostRecord&& r) { builder.add(r); });
    auto index = builder.finish();
    auto features = assemble_all(index, 30);
    std::vector<std::pair<std::string, cls::HashtagClass>> labels;
    for (const auto& entry : ledger.entries) labels.emplace_back(entry.tag, entry.hashtag_class);
    return cls::make_labeled_set(features, labels);
}

void criterion_classification(Criterion& c) {
    auto set = classification_set(101);
    c.require(set.samples.size() >= 400, "labeled set needs at least 400 hashtags");

    cls::CvOptions options;
    options.k = 10;
    options.repeats = 10;
    options.seed = 42;

    auto zeror = cls::cross_validate(cls::ModelKind::zeror, set, options);
    c.notes.push_back("zeror accuracy " + fmt(zeror.accuracy_mean));
    double lda_accuracy = 0.0;
    for (auto kind : {cls::ModelKind::knn, cls::ModelKind::cart, cls::ModelKind::naive_bayes,
                      cls::ModelKind::logistic, cls::ModelKind::lda}) {
        auto report = cls::cross_validate(kind, set, options);
        c.notes.push_back(std::string(cls::model_name(kind)) + " accuracy " +
                          fmt(report.accuracy_mean) + " macro-F1 " + fmt(report.macro_f1_mean));
        c.require(report.accuracy_mean >= zeror.accuracy_mean + 0.15,
                  std::string(cls::model_name(kind)) + " must beat zeror by 0.15");
        if (kind == cls::ModelKind::lda) {
            lda_accuracy = report.accuracy_mean;
            c.require(report.macro_f1_mean >= 0.85, "lda macro-F1 must reach 0.85");
        }
    }

    for (auto group : {cls::FeatureGroup::spatial, cls::FeatureGroup::temporal}) {
        auto ablated_options = options;
        ablated_options.ablate_group = group;
        auto report = cls::cross_validate(cls::ModelKind::lda, set, ablated_options);
        double drop = lda_accuracy - report.accuracy_mean;
        c.notes.push_back("lda minus " + std::string(cls::feature_group_name(group)) +
                          ": accuracy " + fmt(report.accuracy_mean) + " (drop " + fmt(drop) +
                          ")");
        c.require(drop >= 0.05, "ablating " + std::string(cls::feature_group_name(group)) +
                                    " must drop lda accuracy by 0.05");
    }
}

// ---------------------------------------------------------------- criterion 7

void criterion_leakage_and_determinism(Criterion& c) {
    auto set = classification_set(77);

    // leakage: distorting fold 0's test features leaves fold 0's parameters
    // bit-for-bit identical
    {
        cls::CvOptions options;
        options.k = 5;
        options.repeats = 1;
        options.seed = 9;
        auto truths = std::vector<cls::HashtagClass>();
        for (const auto& s : set.samples) truths.push_back(s.label);
        auto plan = cls::FoldPlan::stratified(truths, options.k, options.seed);

        for (auto kind : {cls::ModelKind::zeror, cls::ModelKind::knn, cls::ModelKind::cart,
                          cls::ModelKind::naive_bayes, cls::ModelKind::logistic,
                          cls::ModelKind::lda}) {
            std::map<int, std::vector<double>> baseline, perturbed;
            options.param_observer = [&](int, int fold, const std::vector<double>& blob) {
                baseline[fold] = blob;
            };
            cls::cross_validate(kind, set, options);

            auto poisoned = set;
            for (std::size_t i = 0; i < poisoned.samples.size(); ++i) {
                if (plan.fold_of[i] == 0) {
                    for (auto& v : poisoned.samples[i].features) v = v * 1e9 + 7.7;
                }
            }
            options.param_observer = [&](int, int fold, const std::vector<double>& blob) {
                perturbed[fold] = blob;
            };
            cls::cross_validate(kind, poisoned, options);
            c.require(baseline[0] == perturbed[0],
                      std::string(cls::model_name(kind)) +
                          ": test-fold perturbation changed fitted parameters");
        }
    }

    // determinism: identical seeds give byte-identical reports
    {
        cls::CvOptions options;
        options.k = 10;
        options.repeats = 10;
        options.seed = 4242;
        auto a = cls::cross_validate(cls::ModelKind::lda, set, options);
        auto b = cls::cross_validate(cls::ModelKind::lda, set, options);
        c.require(a.to_json() == b.to_json(), "identical seeds must give identical reports");
    }

    // logistic gradient vs central finite differences on 100 random points
    {
        Rng rng(31337);
        const std::size_t dim = kFeatureCount;
        std::vector<std::vector<double>> x(60, std::vector<double>(dim));
        std::vector<cls::HashtagClass> y;
        for (auto& row : x) {
            for (auto& v : row) v = rng.normal();
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            y.push_back(static_cast<cls::HashtagClass>(rng.below(4)));
        }
        const std::size_t params = cls::kClassCount * dim + cls::kClassCount;
        std::vector<double> theta(params), grad(params);
        bool all_match = true;
        for (int point = 0; point < 100; ++point) {
            for (auto& t : theta) t = rng.normal() * 0.5;
            cls::logistic_loss_and_grad(x, y, theta, dim, 1.0, grad);
            for (std::size_t j = 0; j < params; ++j) {
                double h = 1e-6 * std::max(1.0, std::abs(theta[j]));
                auto plus = theta;
                auto minus = theta;
                plus[j] += h;
                minus[j] -= h;
                double fd = (cls::logistic_loss_and_grad(x, y, plus, dim, 1.0, {}) -
                             cls::logistic_loss_and_grad(x, y, minus, dim, 1.0, {})) /
                            (2.0 * h);
                if (std::abs(grad[j] - fd) >
                    1e-5 * std::max({std::abs(grad[j]), std::abs(fd), 1.0})) {
                    all_match = false;
                }
            }
        }
        c.require(all_match, "logistic gradient disagrees with finite differences");
        c.notes.push_back("gradient checked at 100 random points");
    }
}

// ---------------------------------------------------------------- criterion 8

void criterion_scale(Criterion& c) {
    const std::uint64_t target = 40'000'000;
    synth::WorldSpec spec;
    spec.cities = 2000;
    spec.hashtags = 200'000;
    spec.target_uses = target;
    spec.users = 1'000'000;
    spec.seed = 8;

    testsupport::TempDir dir("hashspread_scale");
    auto corpus_path = dir.file("corpus.jsonl");
    std::printf("    [8] generating %llu-occurrence corpus ...\n",
                static_cast<unsigned long long>(target));
    std::fflush(stdout);
    auto generated = synth::generate_to_files(spec, corpus_path);
    c.notes.push_back("corpus: " + std::to_string(generated.ledger.posts) + " posts, " +
                      std::to_string(generated.ledger.uses) + " uses, " +
                      std::to_string(generated.corpus_bytes / (1024 * 1024)) + " MiB");

    auto start = std::chrono::steady_clock::now();
    auto world = synth::make_world(spec);
    OccurrenceIndex::Builder builder(world.location_table());
    auto stats = parse_corpus(corpus_path, CorpusFormat::jsonl,
                              [&](PostRecord&& r) { builder.add(r); });
    auto index = builder.finish();
    double build_seconds = seconds_since(start);
    c.require(stats.total_skipped() == 0, "scale corpus must parse without skips");
    c.require(index.totals().uses == generated.ledger.uses, "scale index totals mismatch");

    // full spatial and temporal metric pass over every multi-use hashtag
    std::vector<std::uint32_t> tags;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (index.hashtag(i).count >= 2) tags.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<double> checksum(tags.size());
    parallel_for(tags.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto spatial = spatial_metrics(index, tags[i]);
            auto temporal = temporal_metrics(index, tags[i]);
            checksum[i] = spatial.focus + spatial.entropy_bits + spatial.spread_km +
                          temporal.temporal_focus + temporal.temporal_entropy_bits +
                          temporal.temporal_spread_days + temporal.peak_increase +
                          temporal.peak_decline + temporal.local_variation.value_or(0.0);
        }
    });
    double total_seconds = seconds_since(start);
    double checksum_total = 0.0;
    for (double v : checksum) checksum_total += v;
    double rss = peak_rss_gb();

    c.notes.push_back("parse+build " + fmt(build_seconds) + " s, with metrics " +
                      fmt(total_seconds) + " s over " + std::to_string(tags.size()) +
                      " hashtags (checksum " + fmt(checksum_total) + ")");
    c.notes.push_back("peak rss " + fmt(rss) + " GiB");
    c.require(total_seconds < 600.0, "scale pass must finish inside 10 minutes");
    c.require(rss > 0.0, "peak memory must be measurable");
    c.require(rss < 16.0, "scale pass must stay under 16 GiB");
}

// ---------------------------------------------------------------- criterion 9

void criterion_extraction_golden(Criterion& c) {
    std::ifstream in(std::string(HASHSPREAD_TEST_DATA_DIR) + "/extraction_golden.jsonl");
    c.require(in.good(), "golden file missing");
    std::string line;
    std::size_t cases = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto obj = nlohmann::json::parse(line);
        auto text = obj.at("text").get<std::string>();
        auto expect = obj.at("expect").get<std::vector<std::string>>();
        std::vector<std::string> got;
        for (const auto& tok : extract_hashtags(text)) got.push_back(tok.raw);
        c.require(got == expect, "extraction mismatch on: " + text);
        ++cases;
    }
    c.require(cases == 50, "golden file must hold exactly 50 cases");
    c.notes.push_back(std::to_string(cases) + " cases, bit-exact");
}

}  // namespace

int main() {
    struct Entry {
        std::string name;
        void (*run)(Criterion&);
        double budget_seconds;  // 0 = no budget
    };
    const std::vector<Entry> entries = {
        {"1. brute-force oracle equivalence on 1000 mini corpora", criterion_oracle_equivalence,
         60.0},
        {"2. formula spot-checks", criterion_formula_spot_checks, 0.0},
        {"3. impact anchors and exact antisymmetry", criterion_impact_anchors, 0.0},
        {"4. impact merge equals the quadratic oracle", criterion_fast_path_equality, 0.0},
        {"5. synthetic corpus shape reproduction over 5 seeds", criterion_synthetic_shapes,
         300.0},
        {"6. classification beats the baseline; ablations drop accuracy",
         criterion_classification, 0.0},
        {"7. leakage, determinism, gradient check", criterion_leakage_and_determinism, 0.0},
        {"8. scale: 40M-occurrence index and metric pass", criterion_scale, 0.0},
        {"9. extraction conformance golden suite", criterion_extraction_golden, 0.0},
    };

    int failures = 0;
    for (const auto& entry : entries) {
        Criterion criterion;
        criterion.name = entry.name;
        auto start = std::chrono::steady_clock::now();
        try {
            entry.run(criterion);
        } catch (const std::exception& e) {
            criterion.require(false, std::string("exception: ") + e.what());
        }
        criterion.seconds = seconds_since(start);
        if (entry.budget_seconds > 0.0 && criterion.seconds > entry.budget_seconds) {
            criterion.require(false, "runtime " + fmt(criterion.seconds) + " s over budget " +
                                         fmt(entry.budget_seconds) + " s");
        }
        std::printf("[%s] %s (%.1f s)\n", criterion.passed ? "PASS" : "FAIL",
                    criterion.name.c_str(), criterion.seconds);
        for (const auto& note : criterion.notes) std::printf("       %s\n", note.c_str());
        std::fflush(stdout);
        if (!criterion.passed) ++failures;
    }
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
