#pragma once

#include "leanlab/labeler.hpp"
#include "leanlab/leaning.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace leanlab {

/// Writes content to a sibling temporary file and renames it over path.
/// Parent directories are created. Throws DataError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Whole file as a string. Throws DataError naming the path.
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Two-space indented JSON with a trailing newline.
std::string json_text(const nlohmann::json& j);

nlohmann::json to_json(const LabeledPost& p);
LabeledPost labeled_post_from_json(const nlohmann::json& j);

std::string labels_jsonl(const std::vector<LabeledPost>& labeled);
/// Throws DataError with the line number of a malformed record.
std::vector<LabeledPost> read_labels_jsonl(const std::filesystem::path& path);

/// A post id with its human-assigned class.
struct HumanLabel {
    std::string id;
    Leaning label = Leaning::Center;
};

/// CSV with header `id,label`; labels accept left/center/right and their
/// one-letter and numeric forms.
std::vector<HumanLabel> parse_human_labels(std::istream& in, std::string_view source_name = "<stream>");
std::vector<HumanLabel> read_human_labels(const std::filesystem::path& path);
std::string human_labels_csv(const std::vector<HumanLabel>& labels);
void write_human_label_row(std::ostream& out, const HumanLabel& row);

} // namespace leanlab
