#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mifc::testing {

inline constexpr const char* kGoldenCreatedAt = "2024-01-01T00:00:00Z";

struct GoldenStep {
    std::vector<std::string> args;
    int exit_code = 0;
};

struct GoldenRun {
    std::vector<GoldenStep> steps;
    std::filesystem::path dataset_dir;

    bool ok() const;
};

/// filter -> genqa -> translate(KO) -> assemble through the CLI, every chat
/// answered from `replay`. Everything is written below `work_dir`.
GoldenRun run_golden_pipeline(const std::filesystem::path& fixture_dir, const std::filesystem::path& work_dir,
                              const std::filesystem::path& replay, std::ostream& log);

/// Only the filter step; make_fixtures records the later steps itself.
int run_golden_filter(const std::filesystem::path& fixture_dir, const std::filesystem::path& work_dir,
                      std::ostream& log);

}  // namespace mifc::testing
