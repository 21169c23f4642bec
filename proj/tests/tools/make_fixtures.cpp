// Regenerates fixtures/golden/{replay.jsonl, expected_qa.jsonl, *.manifest.json}
// from the rule-based FakeLlm. Run after changing prompts or the corpus.

#include <filesystem>
#include <iostream>

#include "fake_llm.hpp"
#include "golden_run.hpp"
#include "mifc/config.hpp"
#include "mifc/jsonl_io.hpp"
#include "mifc/pipeline.hpp"
#include "mifc/replay.hpp"

namespace fs = std::filesystem;
using namespace mifc;

int main(int argc, char** argv) {
    const fs::path golden = argc > 1 ? fs::path(argv[1]) : fs::path(MIFC_FIXTURE_DIR) / "golden";
    const fs::path work = fs::temp_directory_path() / "mifc_make_fixtures";
    fs::remove_all(work);

    if (testing::run_golden_filter(golden, work / "record", std::cerr) != 0) return 1;
    const PipelineConfig cfg = load_config(golden / "config.json");
    auto store = std::make_shared<ReplayStore>();
    RecordingProvider generator(std::make_shared<testing::FakeLlm>(cfg.provider.model_name), store);
    std::vector<std::unique_ptr<RecordingProvider>> judges;
    std::vector<ChatProvider*> judge_ptrs;
    for (const auto& j : cfg.judge.judges) {
        judges.push_back(std::make_unique<RecordingProvider>(std::make_shared<testing::FakeLlm>(j.model_name), store));
        judge_ptrs.push_back(judges.back().get());
    }
    const auto qa = generate_qa(read_samples(work / "record" / "filtered.jsonl"), cfg, generator, judge_ptrs);
    const DeterministicEmbeddingProvider embedding(cfg.embedding.dim, cfg.embedding.seed);
    translate_with_gate(qa.accepted, Language::kKO, cfg, generator, embedding);
    store->save(golden / "replay.jsonl");
    std::cerr << "recorded " << store->size() << " exchanges\n";

    const auto run = testing::run_golden_pipeline(golden, work / "replay", golden / "replay.jsonl", std::cerr);
    if (!run.ok()) {
        std::cerr << "golden pipeline failed\n";
        return 1;
    }
    fs::copy_file(work / "replay" / "qa.jsonl", golden / "expected_qa.jsonl", fs::copy_options::overwrite_existing);
    for (const char* name : {"mmed_ift.manifest.json", "mmed_ift_mc.manifest.json"}) {
        fs::copy_file(run.dataset_dir / name, golden / name, fs::copy_options::overwrite_existing);
    }
    std::cerr << "golden fixtures written to " << golden << '\n';
    return 0;
}
