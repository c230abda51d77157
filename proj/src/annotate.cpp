#include "leanlab/annotate.hpp"

#include "strings.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace leanlab {

std::vector<Post> annotation_sample(const std::vector<Post>& posts, const BiasRegistry& registry,
                                    std::size_t sample_size, std::uint64_t seed) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        for (const auto& d : post_domains(posts[i], registry)) {
            if (d.leaning) {
                eligible.push_back(i);
                break;
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(eligible.begin(), eligible.end(), rng);
    eligible.resize(std::min(sample_size, eligible.size()));
    std::sort(eligible.begin(), eligible.end());
    std::vector<Post> out;
    out.reserve(eligible.size());
    for (auto i : eligible) out.push_back(posts[i]);
    return out;
}

std::set<std::string> annotated_ids(std::istream* labels_csv, std::istream* session_log) {
    std::set<std::string> done;
    if (labels_csv != nullptr && *labels_csv) {
        for (const auto& row : parse_human_labels(*labels_csv, "annotation output")) done.insert(row.id);
    }
    if (session_log != nullptr && *session_log) {
        std::string line;
        while (std::getline(*session_log, line)) {
            detail::strip_cr(line);
            const auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            if (line.substr(0, tab) == "skip") done.insert(line.substr(tab + 1));
        }
    }
    return done;
}

namespace {

bool center_only(const std::vector<PostDomain>& domains) {
    bool any = false;
    for (const auto& d : domains) {
        if (!d.leaning) continue;
        if (*d.leaning != Leaning::Center) return false;
        any = true;
    }
    return any;
}

void record(std::ostream& labels_out, std::ostream& log, const HumanLabel& row, std::string_view how) {
    write_human_label_row(labels_out, row);
    labels_out.flush();
    log << how << '\t' << row.id << '\t' << to_string(row.label) << '\n';
    log.flush();
}

} // namespace

AnnotationOutcome annotate_session(const std::vector<Post>& sample, const BiasRegistry& registry,
                                   const std::set<std::string>& done, std::istream& keys, std::ostream& prompt,
                                   std::ostream& labels_out, std::ostream& session_log) {
    AnnotationOutcome outcome;
    std::size_t remaining = 0;
    for (const auto& p : sample) remaining += done.contains(p.id) ? 0 : 1;
    std::size_t position = 0;

    for (const auto& post : sample) {
        if (done.contains(post.id)) continue;
        ++position;
        const auto domains = post_domains(post, registry);
        if (center_only(domains)) {
            HumanLabel row{post.id, Leaning::Center};
            record(labels_out, session_log, row, "auto_center");
            outcome.labeled.push_back(row);
            ++outcome.auto_center;
            continue;
        }

        prompt << "\n[" << position << '/' << remaining << "] post " << post.id << '\n' << post.text << '\n';
        for (const auto& d : domains) {
            prompt << "  " << d.domain << ": " << (d.leaning ? to_string(*d.leaning) : std::string_view{"unrated"}) << '\n';
        }
        while (true) {
            prompt << "label [L]eft [C]enter [R]ight [S]kip [Q]uit: " << std::flush;
            std::string line;
            if (!std::getline(keys, line)) {
                outcome.quit = true;
                return outcome;
            }
            const std::string key = detail::to_lower(detail::trim(line));
            if (key == "q") {
                outcome.quit = true;
                return outcome;
            }
            if (key == "s") {
                session_log << "skip\t" << post.id << '\n';
                session_log.flush();
                outcome.skipped.push_back(post.id);
                break;
            }
            if (key == "l" || key == "c" || key == "r") {
                HumanLabel row{post.id, key == "l" ? Leaning::Left : key == "c" ? Leaning::Center : Leaning::Right};
                record(labels_out, session_log, row, "label");
                outcome.labeled.push_back(row);
                break;
            }
            prompt << "unrecognized key '" << line << "'\n";
        }
    }
    return outcome;
}

} // namespace leanlab
