#include "leanlab/io.hpp"

#include "leanlab/error.hpp"

#include "strings.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_set>

namespace leanlab {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw DataError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json read_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

json to_json(const LabeledPost& p) {
    json j = {{"id", p.post_id},
              {"label", to_string(p.label)},
              {"method", to_string(p.method)},
              {"unscaled", p.unscaled},
              {"domain_count", p.domain_count}};
    if (p.tau) j["tau"] = *p.tau;
    if (p.adjusted) j["adjusted"] = *p.adjusted;
    return j;
}

LabeledPost labeled_post_from_json(const json& j) {
    LabeledPost p;
    p.post_id = j.at("id").get<std::string>();
    const auto label = parse_leaning(j.at("label").get<std::string>());
    if (!label) throw std::invalid_argument("unknown label '" + j.at("label").get<std::string>() + "'");
    p.label = *label;
    const std::string method = j.value("method", std::string{"type1"});
    if (method == "type1") p.method = LabelMethod::Type1;
    else if (method == "type2_flip") p.method = LabelMethod::Type2Flip;
    else if (method == "type2_scale") p.method = LabelMethod::Type2Scale;
    else throw std::invalid_argument("unknown method '" + method + "'");
    p.unscaled = j.value("unscaled", 0.0);
    p.domain_count = j.value("domain_count", std::size_t{0});
    if (j.contains("tau")) p.tau = j.at("tau").get<double>();
    if (j.contains("adjusted")) p.adjusted = j.at("adjusted").get<double>();
    return p;
}

std::string labels_jsonl(const std::vector<LabeledPost>& labeled) {
    std::string out;
    for (const auto& p : labeled) {
        out += to_json(p).dump();
        out += '\n';
    }
    return out;
}

std::vector<LabeledPost> read_labels_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<LabeledPost> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(labeled_post_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad label record: " + e.what());
        }
    }
    return out;
}

std::vector<HumanLabel> parse_human_labels(std::istream& in, std::string_view source_name) {
    const std::string source(source_name);
    std::string line;
    std::size_t line_no = 0;
    int id_col = -1;
    int label_col = -1;
    std::vector<HumanLabel> out;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        if (!detail::split_csv_line(line, cells)) {
            throw DataError(source + ":" + std::to_string(line_no) + ": unterminated quote");
        }
        if (id_col < 0) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const auto name = detail::to_lower(detail::trim(cells[c]));
                if (name == "id") id_col = static_cast<int>(c);
                if (name == "label") label_col = static_cast<int>(c);
            }
            if (id_col < 0 || label_col < 0) {
                throw DataError(source + ":" + std::to_string(line_no) + ": header must name 'id' and 'label' columns");
            }
            continue;
        }
        const auto need = static_cast<std::size_t>(std::max(id_col, label_col));
        if (cells.size() <= need) throw DataError(source + ":" + std::to_string(line_no) + ": missing columns");
        HumanLabel row;
        row.id = std::string(detail::trim(cells[static_cast<std::size_t>(id_col)]));
        const auto label = parse_leaning(cells[static_cast<std::size_t>(label_col)]);
        if (!label) {
            throw DataError(source + ":" + std::to_string(line_no) + ": unknown label '" +
                            cells[static_cast<std::size_t>(label_col)] + "'");
        }
        row.label = *label;
        if (!seen.insert(row.id).second) {
            throw DataError(source + ":" + std::to_string(line_no) + ": duplicate id '" + row.id + "'");
        }
        out.push_back(std::move(row));
    }
    if (id_col < 0) throw DataError(source + ": empty label file");
    return out;
}

std::vector<HumanLabel> read_human_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_human_labels(in, path.string());
}

void write_human_label_row(std::ostream& out, const HumanLabel& row) {
    out << detail::csv_escape(row.id) << ',' << to_string(row.label) << '\n';
}

std::string human_labels_csv(const std::vector<HumanLabel>& labels) {
    std::ostringstream out;
    out << "id,label\n";
    for (const auto& row : labels) write_human_label_row(out, row);
    return out.str();
}

} // namespace leanlab
