#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mifc/sample.hpp"

namespace mifc {

/// Reads a JSONL sample file. Blank lines are skipped. Errors carry the path
/// and 1-based line number; duplicate ids are a ValidationError on `id`.
std::vector<DataSample> read_samples(const std::filesystem::path& path);

/// Same as read_samples, over an in-memory buffer.
std::vector<DataSample> parse_samples(std::string_view content, std::string_view origin = "<memory>");

std::string serialize_samples(std::span<const DataSample> samples);

/// Writes through a sibling temp file and renames over the target, so readers
/// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_samples_atomic(const std::filesystem::path& path, std::span<const DataSample> samples);

std::string read_file(const std::filesystem::path& path);

/// One entry per non-blank line, trimmed. Used for keyword lists.
std::vector<std::string> read_nonblank_lines(const std::filesystem::path& path);

}  // namespace mifc
