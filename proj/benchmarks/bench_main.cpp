#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "mifc/dedup.hpp"
#include "mifc/filtering.hpp"
#include "mifc/metrics.hpp"

namespace {

using namespace mifc;

const std::vector<std::string> kWords = {"renal", "failure", "insulin", "glucose", "acute", "chronic", "patient",
                                         "dose",  "therapy", "cell",    "lesion",  "biopsy", "the", "and", "of"};

std::string random_words(std::mt19937_64& rng, std::size_t words) {
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) out += ' ';
        const std::size_t len = 3 + rng() % 7;
        for (std::size_t c = 0; c < len; ++c) out += static_cast<char>('a' + rng() % 26);
    }
    return out;
}

std::string sentence(std::mt19937_64& rng, std::size_t words) {
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) out += ' ';
        out += kWords[rng() % kWords.size()];
    }
    return out;
}

void BM_Bleu(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const std::string a = sentence(rng, static_cast<std::size_t>(state.range(0)));
    const std::string b = sentence(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bleu(a, b, TokenizerMode::kWhitespace));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Bleu)->Arg(16)->Arg(64)->Arg(256);

void BM_Ccts(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const std::string a = sentence(rng, static_cast<std::size_t>(state.range(0)));
    const std::string b = sentence(rng, static_cast<std::size_t>(state.range(0)));
    const DeterministicEmbeddingProvider embedding;
    const CctsConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(ccts(a, b, cfg, embedding));
}
BENCHMARK(BM_Ccts)->Arg(16)->Arg(64);

void BM_FilterScore(benchmark::State& state) {
    std::mt19937_64 rng(3);
    FilterConfig cfg;
    for (int i = 0; i < state.range(0); ++i) cfg.keywords.push_back("kw" + std::to_string(i));
    cfg.keywords.insert(cfg.keywords.end(), kWords.begin(), kWords.begin() + 6);
    const KeywordScorer scorer(cfg);
    const std::string text = sentence(rng, 400);
    for (auto _ : state) benchmark::DoNotOptimize(scorer.score(text, MatchMode::kWordBoundary));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_FilterScore)->Arg(10)->Arg(1000)->Arg(10000);

void BM_Dedup(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::vector<DataSample> samples;
    for (int i = 0; i < state.range(0); ++i) {
        DataSample s;
        s.id = "s" + std::to_string(i);
        s.kind = SampleKind::kRawText;
        s.raw_text = random_words(rng, 30);
        samples.push_back(std::move(s));
    }
    for (auto _ : state) benchmark::DoNotOptimize(dedup(samples));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dedup)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
