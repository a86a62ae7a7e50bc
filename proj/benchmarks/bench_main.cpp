#include <benchmark/benchmark.h>

#include <vector>

#include "hashspread/features.hpp"
#include "hashspread/hashtag.hpp"
#include "hashspread/index.hpp"
#include "hashspread/influence.hpp"
#include "hashspread/spatial.hpp"
#include "hashspread/synth.hpp"
#include "hashspread/temporal.hpp"

using namespace hashspread;

namespace {

const OccurrenceIndex& bench_index() {
    static OccurrenceIndex index = [] {
        synth::WorldSpec spec;
        spec.cities = 100;
        spec.hashtags = 400;
        spec.target_uses = 200'000;
        spec.users = 10'000;
        spec.seed = 99;
        auto world = synth::make_world(spec);
        OccurrenceIndex::Builder builder(world.location_table());
        synth::generate(spec, world, [&](PostRecord&& r) { builder.add(r); }, false);
        return builder.finish();
    }();
    return index;
}

}  // namespace

static void BM_ExtractHashtags(benchmark::State& state) {
    const std::string text = "heute wieder #Frühstück mit #abi-2016 und #küche, los gehts!";
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_hashtags(text));
    }
}
BENCHMARK(BM_ExtractHashtags);

static void BM_Canonicalize(benchmark::State& state) {
    const std::string raw = "FrühstücksÜberraschung2016";
    for (auto _ : state) {
        benchmark::DoNotOptimize(canonicalize(raw));
    }
}
BENCHMARK(BM_Canonicalize);

static void BM_IndexBuild(benchmark::State& state) {
    synth::WorldSpec spec;
    spec.cities = 50;
    spec.hashtags = 100;
    spec.target_uses = static_cast<std::uint64_t>(state.range(0));
    spec.users = 5'000;
    spec.seed = 7;
    auto world = synth::make_world(spec);
    std::vector<PostRecord> records;
    synth::generate(spec, world, [&](PostRecord&& r) { records.push_back(std::move(r)); },
                    false);
    auto locations = world.location_table();
    for (auto _ : state) {
        auto index = OccurrenceIndex::build(records, locations);
        benchmark::DoNotOptimize(index.totals().uses);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_IndexBuild)->Arg(10'000)->Arg(100'000);

static void BM_SpatialMetricsPass(benchmark::State& state) {
    const auto& index = bench_index();
    for (auto _ : state) {
        double acc = 0.0;
        for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
            auto m = spatial_metrics(index, i);
            acc += m.focus + m.entropy_bits + m.spread_km;
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(index.totals().uses));
}
BENCHMARK(BM_SpatialMetricsPass);

static void BM_TemporalMetricsPass(benchmark::State& state) {
    const auto& index = bench_index();
    for (auto _ : state) {
        double acc = 0.0;
        for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
            auto m = temporal_metrics(index, i);
            acc += m.temporal_focus + m.temporal_entropy_bits + m.temporal_spread_days;
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(index.totals().uses));
}
BENCHMARK(BM_TemporalMetricsPass);

static void BM_SpatialImpactPair(benchmark::State& state) {
    const auto& index = bench_index();
    auto ranked = index.locations().by_rank();
    for (auto _ : state) {
        auto score = spatial_impact(index, ranked[0], ranked[1]);
        benchmark::DoNotOptimize(score);
    }
}
BENCHMARK(BM_SpatialImpactPair);

static void BM_SimilarityPair(benchmark::State& state) {
    const auto& index = bench_index();
    auto ranked = index.locations().by_rank();
    for (auto _ : state) {
        auto score = similarity(index, ranked[0], ranked[1]);
        benchmark::DoNotOptimize(score.score);
    }
}
BENCHMARK(BM_SimilarityPair);

static void BM_AssembleFeatures(benchmark::State& state) {
    const auto& index = bench_index();
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_all(index, 30));
    }
}
BENCHMARK(BM_AssembleFeatures);

BENCHMARK_MAIN();
