#pragma once

#include "leanlab/bias_registry.hpp"
#include "leanlab/ingest.hpp"
#include "leanlab/io.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace leanlab {

/// Seeded random choice of up to sample_size posts that link at least one
/// domain of known leaning, returned in corpus order.
std::vector<Post> annotation_sample(const std::vector<Post>& posts, const BiasRegistry& registry,
                                    std::size_t sample_size, std::uint64_t seed);

/// Ids already handled by an earlier session: labeled rows of the output CSV
/// plus ids the session log records as skipped.
std::set<std::string> annotated_ids(std::istream* labels_csv, std::istream* session_log);

struct AnnotationOutcome {
    std::vector<HumanLabel> labeled;
    std::vector<std::string> skipped;
    std::size_t auto_center = 0;
    bool quit = false;
};

/// Presents each post not in done, one at a time, and reads one key per line:
/// L, C or R label the post, S skips it, Q ends the session. Posts whose
/// known domains are all Center are labeled Center without a prompt. Labels
/// are appended to labels_out as `id,label` rows and every decision to
/// session_log as it happens, so an interrupted session can resume.
AnnotationOutcome annotate_session(const std::vector<Post>& sample, const BiasRegistry& registry,
                                   const std::set<std::string>& done, std::istream& keys, std::ostream& prompt,
                                   std::ostream& labels_out, std::ostream& session_log);

} // namespace leanlab
