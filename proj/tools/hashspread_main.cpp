#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hashspread/classify.hpp"
#include "hashspread/csv.hpp"
#include "hashspread/features.hpp"
#include "hashspread/index.hpp"
#include "hashspread/influence.hpp"
#include "hashspread/ingest.hpp"
#include "hashspread/spatial.hpp"
#include "hashspread/synth.hpp"
#include "hashspread/temporal.hpp"

namespace hs = hashspread;
namespace fs = std::filesystem;

namespace {

// Accepts a full RFC 3339 timestamp or a bare date (midnight UTC).
hs::Instant parse_instant_flag(const std::string& text, const char* flag) {
    if (auto t = hs::parse_rfc3339(text)) return *t;
    if (auto d = hs::parse_day(text)) {
        return static_cast<hs::Instant>(*d) * hs::kSecondsPerDay;
    }
    throw CLI::ValidationError(flag, "expected RFC 3339 timestamp or YYYY-MM-DD date");
}

std::unordered_map<std::string, std::string> load_aliases(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open alias file: " + path);
    hs::CsvReader reader(in);
    std::vector<std::string> fields;
    std::unordered_map<std::string, std::string> aliases;
    bool first = true;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() < 2) throw std::runtime_error("alias CSV rows need two columns");
        if (first && fields[0] == "location_id") {  // optional header
            first = false;
            continue;
        }
        first = false;
        aliases[fields[0]] = fields[1];
    }
    return aliases;
}

struct IndexArgs {
    std::string input;
    std::string format = "jsonl";
    std::string locations;
    std::string aliases;
    std::string out;
    std::string since, until;
    bool no_fold = false;
    int tz_offset = 0;
};

void add_index_command(CLI::App& app, const char* name, const char* description,
                       std::shared_ptr<IndexArgs> args) {
    auto* cmd = app.add_subcommand(name, description);
    cmd->add_option("--input", args->input, "corpus file")->required();
    cmd->add_option("--format", args->format, "jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--locations", args->locations, "locations CSV (location_id,name,lat,lon)")
        ->required();
    cmd->add_option("--aliases", args->aliases,
                    "optional location alias CSV (alias_id,canonical_id)");
    cmd->add_option("--since", args->since, "drop records before this instant");
    cmd->add_option("--until", args->until, "drop records after this instant");
    cmd->add_flag("--no-fold", args->no_fold, "keep hashtag case (no case folding)");
    cmd->add_option("--tz-offset", args->tz_offset, "day-grouping offset in minutes from UTC");
    cmd->add_option("--out", args->out, "index output path")->required();
    cmd->callback([args] {
        auto format = hs::parse_format_name(args->format);
        hs::BuildOptions options;
        options.fold_case = !args->no_fold;
        options.tz_offset_minutes = args->tz_offset;
        if (!args->aliases.empty()) options.location_aliases = load_aliases(args->aliases);
        std::optional<hs::TimeWindow> window;
        if (!args->since.empty() || !args->until.empty()) {
            hs::TimeWindow w;
            if (!args->since.empty()) w.since = parse_instant_flag(args->since, "--since");
            if (!args->until.empty()) w.until = parse_instant_flag(args->until, "--until");
            window = w;
        }
        hs::OccurrenceIndex::Builder builder(hs::LocationTable::from_csv(args->locations),
                                             options);
        auto stats = hs::parse_corpus(args->input, *format,
                                      [&](hs::PostRecord&& rec) { builder.add(rec); }, window);
        auto counters = builder.counters();
        auto index = builder.finish();
        index.save(args->out);
        index.write_totals_json(args->out + ".totals.json");

        const auto& totals = index.totals();
        std::printf("records parsed:        %llu\n",
                    static_cast<unsigned long long>(stats.parsed));
        for (const auto& [reason, count] : stats.skipped) {
            std::printf("records skipped (%s): %llu\n", reason.c_str(),
                        static_cast<unsigned long long>(count));
        }
        std::printf("unknown-location records: %llu (occurrences dropped: %llu)\n",
                    static_cast<unsigned long long>(counters.unknown_location_records),
                    static_cast<unsigned long long>(counters.unknown_location_occurrences));
        std::printf("uses %llu | hashtags %llu | messages %llu | users %llu | locations %llu\n",
                    static_cast<unsigned long long>(totals.uses),
                    static_cast<unsigned long long>(totals.distinct_hashtags),
                    static_cast<unsigned long long>(totals.messages),
                    static_cast<unsigned long long>(totals.users),
                    static_cast<unsigned long long>(totals.locations));
        std::printf("index written to %s\n", args->out.c_str());
    });
}

std::vector<std::uint64_t> parse_bucket_list(const std::string& text) {
    std::vector<std::uint64_t> edges;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        edges.push_back(std::stoull(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return edges;
}

hs::OccurrenceIndex load_index_filtered(const std::string& path, const std::string& since) {
    auto index = hs::OccurrenceIndex::load(path);
    if (!since.empty()) {
        index = index.filter_first_use(parse_instant_flag(since, "--since"));
    }
    return index;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hashtag diffusion metrics over geotagged microblog corpora"};
    app.require_subcommand(1);

    // ---- synth ----
    struct SynthArgs {
        hs::synth::WorldSpec spec;
        std::string out, ledger, locations_out, labels_out;
        std::string window_start, window_end;
        std::vector<std::uint32_t> mix;
    };
    auto synth_args = std::make_shared<SynthArgs>();
    {
        auto* cmd = app.add_subcommand("synth",
                                       "generate a labeled synthetic corpus with a ledger");
        cmd->add_option("--cities", synth_args->spec.cities, "number of cities");
        cmd->add_option("--hashtags", synth_args->spec.hashtags, "number of hashtags");
        cmd->add_option("--uses", synth_args->spec.target_uses, "target hashtag occurrences");
        cmd->add_option("--seed", synth_args->spec.seed, "generator seed");
        cmd->add_option("--users", synth_args->spec.users, "global user pool size");
        cmd->add_option("--min-uses", synth_args->spec.min_uses_per_hashtag,
                        "minimum uses per hashtag");
        cmd->add_option("--window-start", synth_args->window_start, "simulation window start");
        cmd->add_option("--window-end", synth_args->window_end, "simulation window end");
        cmd->add_option("--class-mix", synth_args->mix,
                        "counts: local_event local_phenomenon event other_meme")
            ->expected(4);
        cmd->add_option("--out", synth_args->out, "corpus JSONL output")->required();
        cmd->add_option("--ledger", synth_args->ledger, "ground-truth ledger JSON output");
        cmd->add_option("--locations-out", synth_args->locations_out,
                        "write the city table as a locations CSV");
        cmd->add_option("--labels-out", synth_args->labels_out, "write hashtag labels CSV");
        cmd->callback([synth_args] {
            auto& spec = synth_args->spec;
            if (!synth_args->window_start.empty()) {
                spec.window_start = parse_instant_flag(synth_args->window_start, "--window-start");
            }
            if (!synth_args->window_end.empty()) {
                spec.window_end = parse_instant_flag(synth_args->window_end, "--window-end");
            }
            if (!synth_args->mix.empty()) {
                spec.class_mix = hs::synth::ClassMix{synth_args->mix[0], synth_args->mix[1],
                                                     synth_args->mix[2], synth_args->mix[3]};
            }
            auto result = hs::synth::generate_to_files(spec, synth_args->out, synth_args->ledger,
                                                       synth_args->locations_out,
                                                       synth_args->labels_out);
            std::printf("posts %llu | uses %llu | hashtags %llu | corpus bytes %llu\n",
                        static_cast<unsigned long long>(result.ledger.posts),
                        static_cast<unsigned long long>(result.ledger.uses),
                        static_cast<unsigned long long>(result.ledger.hashtags),
                        static_cast<unsigned long long>(result.corpus_bytes));
        });
    }

    // ---- ingest / index ----
    auto ingest_args = std::make_shared<IndexArgs>();
    add_index_command(app, "ingest", "parse a corpus and build the occurrence index",
                      ingest_args);
    auto index_args = std::make_shared<IndexArgs>();
    add_index_command(app, "index", "alias of ingest", index_args);

    // ---- report ----
    struct ReportArgs {
        std::string index, kind = "occurrences", out, since;
        std::size_t min_occurrences = 30;
        std::uint32_t bins = 50;
    };
    auto report_args = std::make_shared<ReportArgs>();
    {
        auto* report = app.add_subcommand("report", "distribution reports");
        report->require_subcommand(1);
        auto* histogram = report->add_subcommand("histogram",
                                                 "hashtag occurrence/location histograms");
        histogram->add_option("--index", report_args->index, "index file")->required();
        histogram->add_option("--kind", report_args->kind, "occurrences or locations")
            ->check(CLI::IsMember({"occurrences", "locations"}));
        histogram->add_option("--out", report_args->out, "output CSV")->required();
        histogram->callback([report_args] {
            auto index = hs::OccurrenceIndex::load(report_args->index);
            auto rows = report_args->kind == "occurrences" ? hs::occurrence_histogram(index)
                                                           : hs::location_histogram(index);
            std::ofstream out(report_args->out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output: " + report_args->out);
            out << (report_args->kind == "occurrences" ? "occurrences,hashtags\n"
                                                       : "locations,hashtags\n");
            for (const auto& [x, n] : rows) out << x << ',' << n << '\n';
            std::printf("%zu histogram rows -> %s\n", rows.size(), report_args->out.c_str());
        });

        auto* grid = report->add_subcommand("spreadgrid",
                                            "spatial-vs-temporal spread points and heatmap");
        grid->add_option("--index", report_args->index, "index file")->required();
        grid->add_option("--min-occurrences", report_args->min_occurrences,
                         "minimum uses per hashtag");
        grid->add_option("--bins", report_args->bins, "histogram bins per axis");
        grid->add_option("--since", report_args->since, "keep hashtags first used at/after");
        grid->add_option("--out", report_args->out, "points CSV output")->required();
        grid->callback([report_args] {
            auto index = load_index_filtered(report_args->index, report_args->since);
            auto grid = hs::spread_grid(index, report_args->min_occurrences, report_args->bins);
            fs::path points = report_args->out;
            fs::path hist = points;
            hist.replace_filename(points.stem().string() + "_hist" +
                                  points.extension().string());
            hs::write_spread_grid_csv(points.string(), hist.string(), grid);
            std::printf("%zu points -> %s, histogram -> %s\n", grid.points.size(),
                        points.c_str(), hist.c_str());
        });
    }

    // ---- metrics ----
    struct MetricsArgs {
        std::string index, out_dir, since, buckets = "2,5,10,50,100,1000";
        std::size_t min_occurrences = 2;
    };
    auto spatial_args = std::make_shared<MetricsArgs>();
    auto temporal_args = std::make_shared<MetricsArgs>();
    {
        auto* metrics = app.add_subcommand("metrics", "per-hashtag metric tables and CDFs");
        metrics->require_subcommand(1);
        auto add_common = [](CLI::App* cmd, std::shared_ptr<MetricsArgs> args) {
            cmd->add_option("--index", args->index, "index file")->required();
            cmd->add_option("--since", args->since, "keep hashtags first used at/after");
            cmd->add_option("--buckets", args->buckets, "occurrence bucket edges");
            cmd->add_option("--min-occurrences", args->min_occurrences,
                            "minimum uses for the per-hashtag table");
            cmd->add_option("--out", args->out_dir, "output directory")->required();
        };
        auto* spatial = metrics->add_subcommand("spatial", "focus, entropy, spread");
        add_common(spatial, spatial_args);
        spatial->callback([spatial_args] {
            auto index = load_index_filtered(spatial_args->index, spatial_args->since);
            fs::create_directories(spatial_args->out_dir);
            auto buckets =
                hs::partition_by_occurrences(index, parse_bucket_list(spatial_args->buckets));
            fs::path dir = spatial_args->out_dir;
            hs::write_cdf_csv((dir / "focus_cdf.csv").string(),
                              hs::spatial_cdf(index, hs::SpatialMetricKind::focus, buckets));
            hs::write_cdf_csv((dir / "entropy_cdf.csv").string(),
                              hs::spatial_cdf(index, hs::SpatialMetricKind::entropy, buckets));
            hs::write_cdf_csv((dir / "spread_cdf.csv").string(),
                              hs::spatial_cdf(index, hs::SpatialMetricKind::spread, buckets));
            hs::write_spatial_metrics_csv((dir / "spatial_metrics.csv").string(), index,
                                          spatial_args->min_occurrences);
            std::printf("spatial metrics written to %s\n", spatial_args->out_dir.c_str());
        });
        auto* temporal = metrics->add_subcommand("temporal",
                                                 "temporal focus, entropy, spread, peaks");
        add_common(temporal, temporal_args);
        temporal->callback([temporal_args] {
            auto index = load_index_filtered(temporal_args->index, temporal_args->since);
            fs::create_directories(temporal_args->out_dir);
            auto buckets =
                hs::partition_by_occurrences(index, parse_bucket_list(temporal_args->buckets));
            fs::path dir = temporal_args->out_dir;
            hs::write_cdf_csv((dir / "temporal_focus_cdf.csv").string(),
                              hs::temporal_cdf(index, hs::TemporalMetricKind::focus, buckets));
            hs::write_cdf_csv((dir / "temporal_entropy_cdf.csv").string(),
                              hs::temporal_cdf(index, hs::TemporalMetricKind::entropy, buckets));
            hs::write_cdf_csv((dir / "temporal_spread_cdf.csv").string(),
                              hs::temporal_cdf(index, hs::TemporalMetricKind::spread, buckets));
            hs::write_temporal_metrics_csv((dir / "temporal_metrics.csv").string(), index,
                                           temporal_args->min_occurrences);
            std::printf("temporal metrics written to %s\n", temporal_args->out_dir.c_str());
        });
    }

    // ---- impact ----
    struct ImpactArgs {
        std::string index, source, out, since;
        std::uint32_t top_k = 500;
        std::uint32_t bins = 40;
    };
    auto impact_args = std::make_shared<ImpactArgs>();
    {
        auto* cmd = app.add_subcommand("impact", "spatial impact histogram from one city");
        cmd->add_option("--index", impact_args->index, "index file")->required();
        cmd->add_option("--source", impact_args->source, "source location id")->required();
        cmd->add_option("--top-k", impact_args->top_k, "target the K most popular locations");
        cmd->add_option("--bins", impact_args->bins, "histogram bins over [-1, 1]");
        cmd->add_option("--since", impact_args->since, "keep hashtags first used at/after");
        cmd->add_option("--out", impact_args->out, "output CSV")->required();
        cmd->callback([impact_args] {
            auto index = load_index_filtered(impact_args->index, impact_args->since);
            auto source = hs::require_location(index, impact_args->source);
            auto hist =
                hs::impact_histogram(index, source, impact_args->top_k, impact_args->bins);
            std::ofstream out(impact_args->out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output: " + impact_args->out);
            out << "impact_low,impact_high,cities\n";
            char line[96];
            for (std::uint32_t b = 0; b < hist.bins; ++b) {
                double lo = -1.0 + 2.0 * b / hist.bins;
                double hi = -1.0 + 2.0 * (b + 1) / hist.bins;
                std::snprintf(line, sizeof(line), "%.6g,%.6g,%llu\n", lo, hi,
                              static_cast<unsigned long long>(hist.counts[b]));
                out << line;
            }
            std::printf("impact histogram (%u bins, %llu undefined pairs) -> %s\n", hist.bins,
                        static_cast<unsigned long long>(hist.undefined_targets),
                        impact_args->out.c_str());
        });
    }

    // ---- similarity ----
    struct SimilarityArgs {
        std::string index, source, out, since;
        std::size_t group_size = 100;
        std::size_t top_n = 50;
    };
    auto sim_args = std::make_shared<SimilarityArgs>();
    {
        auto* cmd = app.add_subcommand("similarity",
                                       "top-hashtag similarity vs distance from one city");
        cmd->add_option("--index", sim_args->index, "index file")->required();
        cmd->add_option("--source", sim_args->source, "source location id")->required();
        cmd->add_option("--group-size", sim_args->group_size, "locations per distance group");
        cmd->add_option("--top-n", sim_args->top_n, "size of the per-city top hashtag set");
        cmd->add_option("--since", sim_args->since, "keep hashtags first used at/after");
        cmd->add_option("--out", sim_args->out, "output CSV")->required();
        cmd->callback([sim_args] {
            auto index = load_index_filtered(sim_args->index, sim_args->since);
            auto source = hs::require_location(index, sim_args->source);
            auto groups =
                hs::similarity_by_distance(index, source, sim_args->group_size, sim_args->top_n);
            std::ofstream out(sim_args->out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output: " + sim_args->out);
            out << "mean_distance_km,mean_similarity\n";
            char line[64];
            for (const auto& [dist, sim] : groups) {
                std::snprintf(line, sizeof(line), "%.6g,%.6g\n", dist, sim);
                out << line;
            }
            std::printf("%zu distance groups -> %s\n", groups.size(), sim_args->out.c_str());
        });
    }

    // ---- features ----
    struct FeaturesArgs {
        std::string index, out, since;
        std::size_t min_occurrences = 30;
    };
    auto features_args = std::make_shared<FeaturesArgs>();
    {
        auto* cmd = app.add_subcommand("features", "assemble the per-hashtag feature vectors");
        cmd->add_option("--index", features_args->index, "index file")->required();
        cmd->add_option("--min-occurrences", features_args->min_occurrences,
                        "minimum uses per hashtag");
        cmd->add_option("--since", features_args->since, "keep hashtags first used at/after");
        cmd->add_option("--out", features_args->out, "features CSV output")->required();
        cmd->callback([features_args] {
            auto index = load_index_filtered(features_args->index, features_args->since);
            auto rows = hs::assemble_all(index, features_args->min_occurrences);
            hs::write_features_csv(features_args->out, rows);
            std::printf("%zu feature vectors -> %s\n", rows.size(), features_args->out.c_str());
        });
    }

    // ---- classify ----
    struct ClassifyArgs {
        std::string features, labels, exclusions, model = "lda", ablate, out;
        int k = 10;
        int repeats = 10;
        std::uint64_t seed = 42;
        hs::classify::ModelParams params;
    };
    auto classify_args = std::make_shared<ClassifyArgs>();
    {
        auto* cmd = app.add_subcommand("classify",
                                       "cross-validate a classifier over labeled hashtags");
        cmd->add_option("--features", classify_args->features, "features CSV")->required();
        cmd->add_option("--labels", classify_args->labels, "labels CSV (hashtag,class)")
            ->required();
        cmd->add_option("--exclusions", classify_args->exclusions,
                        "file of hashtags to exclude, one per line");
        cmd->add_option("--model", classify_args->model, "classifier")
            ->check(CLI::IsMember({"knn", "cart", "naive_bayes", "logistic", "lda", "zeror"}));
        cmd->add_option("--k", classify_args->k, "folds");
        cmd->add_option("--repeats", classify_args->repeats, "cross-validation repeats");
        cmd->add_option("--seed", classify_args->seed, "fold-plan seed");
        cmd->add_option("--ablate", classify_args->ablate,
                        "drop a feature group: spatial, temporal or user_diversity")
            ->check(CLI::IsMember({"spatial", "temporal", "user_diversity"}));
        cmd->add_option("--knn-k", classify_args->params.knn_k, "kNN neighbour count");
        cmd->add_option("--cart-max-depth", classify_args->params.cart_max_depth,
                        "CART depth limit");
        cmd->add_option("--cart-min-leaf", classify_args->params.cart_min_leaf,
                        "CART minimum leaf size");
        cmd->add_option("--out", classify_args->out, "report JSON output")->required();
        cmd->callback([classify_args] {
            auto features = hs::read_features_csv(classify_args->features);
            auto labels = hs::classify::read_labels_csv(classify_args->labels);
            std::vector<std::string> exclusions;
            if (!classify_args->exclusions.empty()) {
                exclusions = hs::classify::read_exclusion_list(classify_args->exclusions);
            }
            auto set = hs::classify::make_labeled_set(features, labels, exclusions);
            auto kind = hs::classify::parse_model_name(classify_args->model);
            hs::classify::CvOptions options;
            options.k = classify_args->k;
            options.repeats = classify_args->repeats;
            options.seed = classify_args->seed;
            options.params = classify_args->params;
            if (!classify_args->ablate.empty()) {
                options.ablate_group = hs::classify::parse_feature_group(classify_args->ablate);
            }
            auto report = hs::classify::cross_validate(*kind, set, options);
            std::string body = report.to_json();
            if (options.ablate_group) {
                // rerun with the full feature set and report the accuracy delta
                auto full_options = options;
                full_options.ablate_group.reset();
                auto full = hs::classify::cross_validate(*kind, set, full_options);
                auto json = nlohmann::json::parse(body);
                json["full_accuracy_mean"] = full.accuracy_mean;
                json["accuracy_delta"] = report.accuracy_mean - full.accuracy_mean;
                body = json.dump(2);
                std::printf("ablating %s: accuracy delta %+.4f (full %.4f -> ablated %.4f)\n",
                            classify_args->ablate.c_str(),
                            report.accuracy_mean - full.accuracy_mean, full.accuracy_mean,
                            report.accuracy_mean);
            }
            std::ofstream out(classify_args->out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output: " + classify_args->out);
            out << body << '\n';
            std::printf("%s: accuracy %.4f +/- %.4f, macro-F1 %.4f (majority %.4f) -> %s\n",
                        report.model.c_str(), report.accuracy_mean, report.accuracy_std,
                        report.macro_f1_mean, report.majority_fraction,
                        classify_args->out.c_str());
            for (const auto& warning : report.warnings) {
                std::fprintf(stderr, "warning: %s\n", warning.c_str());
            }
        });
    }

    // ---- verify ----
    struct VerifyArgs {
        std::string index, ledger, corpus;
    };
    auto verify_args = std::make_shared<VerifyArgs>();
    {
        auto* cmd = app.add_subcommand("verify", "diff an index against a synth ledger");
        cmd->add_option("--index", verify_args->index, "index file")->required();
        cmd->add_option("--ledger", verify_args->ledger, "ledger JSON")->required();
        cmd->add_option("--corpus", verify_args->corpus,
                        "optional corpus JSONL; cross-checks the post count");
        cmd->callback([verify_args] {
            auto index = hs::OccurrenceIndex::load(verify_args->index);
            auto ledger = hs::synth::Ledger::load(verify_args->ledger);
            auto report = hs::synth::verify(index, ledger);
            if (!verify_args->corpus.empty()) {
                std::ifstream in(verify_args->corpus, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open corpus: " + verify_args->corpus);
                std::uint64_t lines = 0;
                std::string line;
                while (std::getline(in, line)) {
                    if (!line.empty()) ++lines;
                }
                if (lines != ledger.posts) {
                    report.totals_match = false;
                    report.notes.push_back("corpus has " + std::to_string(lines) +
                                           " lines, ledger expects " +
                                           std::to_string(ledger.posts));
                }
            }
            std::printf("discrepancies: %llu, totals %s\n",
                        static_cast<unsigned long long>(report.discrepancies),
                        report.totals_match ? "match" : "DIFFER");
            for (const auto& n : report.notes) std::printf("  %s\n", n.c_str());
            if (!report.clean()) throw std::runtime_error("verification failed");
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
