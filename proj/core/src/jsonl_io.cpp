#include "mifc/jsonl_io.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "mifc/error.hpp"
#include "mifc/utf8.hpp"

namespace mifc {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::vector<DataSample> parse_samples(std::string_view content, std::string_view origin) {
    std::vector<DataSample> out;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (utf8::trim(line).empty()) continue;
        try {
            DataSample s = parse_sample(line, line_no);
            if (!ids.insert(s.id).second) {
                throw ValidationError("id", "duplicate id '" + s.id + "'");
            }
            out.push_back(std::move(s));
        } catch (const FormatError& e) {
            throw FormatError(std::string(origin) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(e.field(), std::string(origin) + ":" + std::to_string(line_no) +
                                                 ": " + e.detail());
        }
    }
    return out;
}

std::vector<DataSample> read_samples(const std::filesystem::path& path) {
    return parse_samples(read_file(path), path.string());
}

std::string serialize_samples(std::span<const DataSample> samples) {
    std::string out;
    for (const auto& s : samples) {
        out += serialize_sample(s);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp." + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw ConfigError("write failed for '" + path.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_samples_atomic(const std::filesystem::path& path, std::span<const DataSample> samples) {
    write_file_atomic(path, serialize_samples(samples));
}

std::vector<std::string> read_nonblank_lines(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    if (!utf8::is_valid(content)) throw FormatError(path.string() + ": file is not valid UTF-8");
    std::vector<std::string> out;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        auto trimmed = utf8::trim(line);
        if (!trimmed.empty()) out.emplace_back(trimmed);
    }
    return out;
}

}  // namespace mifc
