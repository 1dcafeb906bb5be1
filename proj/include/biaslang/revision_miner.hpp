#pragma once

// Mines statement-level edits from POV-tagged revisions: every tagged
// revision is compared with its parent, and revisions that touch exactly
// one statement yield a StatementDiff classified as deleted, moved or
// updated.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "biaslang/dump_reader.hpp"
#include "biaslang/wikitext.hpp"

namespace biaslang {

enum class EditType { Deleted, Moved, Updated };

inline std::string_view to_string(EditType t) {
  switch (t) {
    case EditType::Deleted: return "deleted";
    case EditType::Moved: return "moved";
    case EditType::Updated: return "updated";
  }
  return "deleted";
}

struct StatementDiff {
  Statement old_statement;
  std::optional<Statement> new_statement;
  EditType edit_type = EditType::Deleted;
  std::int64_t revision_id = 0;
  std::string comment;
};

inline constexpr double kUpdateJaccardThreshold = 0.7;

// Case-insensitive search for "pov"; NPOV comments match as well.
inline bool is_pov_tagged(std::string_view comment) {
  for (std::size_t i = 0; i + 3 <= comment.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(comment[i])) == 'p' &&
        std::tolower(static_cast<unsigned char>(comment[i + 1])) == 'o' &&
        std::tolower(static_cast<unsigned char>(comment[i + 2])) == 'v') {
      return true;
    }
  }
  return false;
}

struct EditDecision {
  EditType type = EditType::Deleted;
  std::optional<Statement> counterpart;
};

// Moved beats Updated: identical text always clears the Jaccard threshold,
// so the exact-text-in-another-section check has to come first. `retained`
// only participates in the Moved check.
inline EditDecision classify_edit_detailed(const Statement& old_stmt, const std::vector<Statement>& added,
                                           const std::vector<Statement>& retained = {}) {
  for (const auto* pool : {&added, &retained}) {
    for (const auto& s : *pool) {
      if (s.text == old_stmt.text && s.section != old_stmt.section) return {EditType::Moved, s};
    }
  }
  const Statement* best = nullptr;
  double best_sim = -1.0;
  for (const auto& s : added) {
    double sim = jaccard(old_stmt, s);
    if (sim > best_sim) {
      best_sim = sim;
      best = &s;
    }
  }
  if (best && best_sim >= kUpdateJaccardThreshold) return {EditType::Updated, *best};
  return {EditType::Deleted, std::nullopt};
}

inline EditType classify_edit(const Statement& old_stmt, const std::vector<Statement>& added,
                              const std::vector<Statement>& retained = {}) {
  return classify_edit_detailed(old_stmt, added, retained).type;
}

namespace detail {

using StatementKey = std::pair<std::string, std::string>;  // section, text

// Multiset difference a \ b keyed on (section, text), order of `a` kept.
inline std::vector<Statement> missing_from(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  std::map<StatementKey, std::size_t> counts;
  for (const auto& s : b) ++counts[{s.section, s.text}];
  std::vector<Statement> out;
  for (const auto& s : a) {
    auto it = counts.find({s.section, s.text});
    if (it != counts.end() && it->second > 0) {
      --it->second;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace detail

// nullopt unless exactly one statement of `old_rev` is absent verbatim from
// `new_rev`. Multi-statement revisions are discarded: the tag cannot be
// attributed to one of them.
inline std::optional<StatementDiff> diff_revisions(const RevisionRecord& old_rev, const RevisionRecord& new_rev,
                                                   SegmentStats* stats = nullptr) {
  auto before = segment_statements(old_rev.wikitext, stats);
  auto after = segment_statements(new_rev.wikitext, stats);
  auto removed = detail::missing_from(before, after);
  if (removed.size() != 1) return std::nullopt;
  auto added = detail::missing_from(after, before);
  auto decision = classify_edit_detailed(removed.front(), added, after);
  return StatementDiff{std::move(removed.front()), std::move(decision.counterpart), decision.type,
                       new_rev.revision_id, new_rev.comment};
}

struct MinedDiff {
  std::int64_t page_id = 0;
  std::string page_title;
  StatementDiff diff;
};

inline nlohmann::json to_json(const MinedDiff& m) {
  nlohmann::json j;
  j["page_id"] = m.page_id;
  j["page_title"] = m.page_title;
  j["revision_id"] = m.diff.revision_id;
  j["comment"] = m.diff.comment;
  j["edit_type"] = std::string(to_string(m.diff.edit_type));
  j["old_text"] = m.diff.old_statement.text;
  j["new_text"] = m.diff.new_statement ? nlohmann::json(m.diff.new_statement->text) : nlohmann::json(nullptr);
  j["section"] = m.diff.old_statement.section;
  return j;
}

struct MiningSummary {
  std::size_t revisions = 0;
  std::size_t pov_tagged = 0;
  std::size_t without_parent = 0;
  std::size_t multi_statement = 0;  // zero or several statements touched
  std::size_t deleted = 0;
  std::size_t moved = 0;
  std::size_t updated = 0;
  std::size_t dropped_markup_regions = 0;

  void count(EditType t) {
    switch (t) {
      case EditType::Deleted: ++deleted; break;
      case EditType::Moved: ++moved; break;
      case EditType::Updated: ++updated; break;
    }
  }

  nlohmann::json to_json() const {
    return {{"revisions", revisions},
            {"pov_tagged", pov_tagged},
            {"without_parent", without_parent},
            {"discarded_not_single_statement", multi_statement},
            {"deleted", deleted},
            {"moved", moved},
            {"updated", updated},
            {"dropped_markup_regions", dropped_markup_regions}};
  }
};

// Streams a dump and emits one diff per qualifying POV-tagged revision.
// Only the previous revision of the current page is held in memory. A
// tagged revision whose parentid names anything but that predecessor is
// skipped as unpaired.
template <typename Sink>
MiningSummary mine_dump(DumpReader& reader, Sink&& sink) {
  MiningSummary summary;
  std::optional<RevisionRecord> previous;
  SegmentStats stats;
  while (auto rec = reader.next()) {
    ++summary.revisions;
    if (previous && previous->page_id != rec->page_id) previous.reset();
    if (is_pov_tagged(rec->comment)) {
      ++summary.pov_tagged;
      bool paired = previous && (!rec->parent_revision_id || *rec->parent_revision_id == previous->revision_id);
      if (!paired) {
        ++summary.without_parent;
      } else if (auto diff = diff_revisions(*previous, *rec, &stats)) {
        summary.count(diff->edit_type);
        sink(MinedDiff{rec->page_id, rec->page_title, std::move(*diff)});
      } else {
        ++summary.multi_statement;
      }
    }
    previous = std::move(rec);
  }
  summary.dropped_markup_regions = stats.dropped_regions;
  return summary;
}

inline MiningSummary mine_dump_to_jsonl(DumpReader& reader, std::ostream& out) {
  return mine_dump(reader, [&](const MinedDiff& d) { out << to_json(d).dump() << '\n'; });
}

}  // namespace biaslang
