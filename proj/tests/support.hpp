#pragma once

#include "leanlab/bias_registry.hpp"
#include "leanlab/ingest.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testing {

inline std::filesystem::path data_dir() { return LEANLAB_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return LEANLAB_FIXTURE_DIR; }
inline std::filesystem::path snapshot_path() { return data_dir() / "allsides_snapshot.csv"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "leanlab") {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline leanlab::BiasRegistry registry_from(const std::string& csv) {
    std::istringstream in(csv);
    return leanlab::BiasRegistry::parse(in, "test");
}

inline leanlab::Post make_post(std::string id, std::string text, std::vector<std::string> urls = {}) {
    leanlab::Post p;
    p.id = std::move(id);
    p.text = std::move(text);
    p.urls = std::move(urls);
    return p;
}

} // namespace testing
