#include "golden_run.hpp"

#include <nlohmann/json.hpp>

#include "mifc/cli.hpp"
#include "mifc/jsonl_io.hpp"

namespace fs = std::filesystem;

namespace mifc::testing {

namespace {

int step(GoldenRun& run, std::vector<std::string> args, std::ostream& log) {
    const int code = cli::run(args, log, log);
    run.steps.push_back({std::move(args), code});
    return code;
}

}  // namespace

bool GoldenRun::ok() const {
    for (const auto& s : steps) {
        if (s.exit_code != 0) return false;
    }
    return !steps.empty();
}

int run_golden_filter(const fs::path& fixture_dir, const fs::path& work_dir, std::ostream& log) {
    fs::create_directories(work_dir);
    return cli::run({"--config", (fixture_dir / "config.json").string(), "filter", "--input",
                     (fixture_dir / "corpus.jsonl").string(), "--out", (work_dir / "filtered").string()},
                    log, log);
}

GoldenRun run_golden_pipeline(const fs::path& fixture_dir, const fs::path& work_dir, const fs::path& replay,
                              std::ostream& log) {
    GoldenRun run;
    fs::create_directories(work_dir);
    const std::string config = (fixture_dir / "config.json").string();
    const std::string w = work_dir.string();

    if (step(run, {"--config", config, "filter", "--input", (fixture_dir / "corpus.jsonl").string(), "--out",
                   w + "/filtered"},
             log) != 0) {
        return run;
    }
    if (step(run, {"--config", config, "--replay", replay.string(), "genqa", "--input", w + "/filtered.jsonl",
                   "--out", w + "/qa"},
             log) != 0) {
        return run;
    }
    if (step(run, {"--config", config, "--replay", replay.string(), "translate", "--input", w + "/qa.jsonl",
                   "--target", "KO", "--out", w + "/qa_ko"},
             log) != 0) {
        return run;
    }

    const nlohmann::json spec = {
        {"inputs",
         {{{"path", "qa.jsonl"}, {"lang", "EN"}, {"dataset", "mmed_ift"}, {"split", "train"}},
          {{"path", "qa_ko.jsonl"}, {"lang", "KO"}, {"dataset", "mmed_ift"}, {"split", "train"}},
          {{"path", (fixture_dir / "mc_train.jsonl").string()},
           {"lang", "EN"},
           {"dataset", "mmed_ift_mc"},
           {"split", "train"}},
          {{"path", (fixture_dir / "mc_test.jsonl").string()},
           {"lang", "EN"},
           {"dataset", "mmed_ift_mc"},
           {"split", "test"}}}},
        {"created_at", kGoldenCreatedAt}};
    write_file_atomic(work_dir / "assemble.json", spec.dump(2) + "\n");
    run.dataset_dir = work_dir / "dataset";
    step(run, {"--config", config, "assemble", "--spec", w + "/assemble.json", "--out", run.dataset_dir.string()},
         log);
    return run;
}

}  // namespace mifc::testing
