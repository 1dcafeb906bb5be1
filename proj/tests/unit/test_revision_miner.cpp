#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "biaslang/revision_miner.hpp"

using namespace biaslang;

namespace {

const std::string kFixture = std::string(BIASLANG_SOURCE_DIR) + "/data/fixtures/mini_dump.xml";

RevisionRecord rev(std::int64_t id, std::string text, std::string comment = "") {
  RevisionRecord r;
  r.page_id = 1;
  r.revision_id = id;
  r.wikitext = std::move(text);
  r.comment = std::move(comment);
  return r;
}

}  // namespace

TEST(IsPovTagged, CaseInsensitiveSubstring) {
  EXPECT_TRUE(is_pov_tagged("removed POV"));
  EXPECT_TRUE(is_pov_tagged("NPOV cleanup"));
  EXPECT_TRUE(is_pov_tagged("pov"));
  EXPECT_FALSE(is_pov_tagged("typo fix"));
  EXPECT_FALSE(is_pov_tagged("po v"));
  EXPECT_FALSE(is_pov_tagged(""));
}

TEST(ClassifyEdit, DeletedMovedUpdated) {
  auto old_stmt = make_statement("The bridge is very beautiful and long.", "History");
  EXPECT_EQ(classify_edit(old_stmt, {}), EditType::Deleted);
  EXPECT_EQ(classify_edit(old_stmt, {make_statement("The bridge is very beautiful and long.", "Design")}),
            EditType::Moved);
  // 6 shared tokens of 8 in the union
  EXPECT_EQ(classify_edit(old_stmt, {make_statement("The bridge is very long and old.", "History")}),
            EditType::Updated);
  EXPECT_EQ(classify_edit(old_stmt, {make_statement("Something else entirely.", "History")}), EditType::Deleted);
}

TEST(ClassifyEdit, ThresholdIsInclusive) {
  auto old_stmt = make_statement("a b c d e f g h i j");
  auto exact = make_statement("a b c d e f g h i k");  // 9/11
  auto seven = make_statement("a b c d e f g");        // 7/10
  auto below = make_statement("a b c d e f x");        // 6/11
  EXPECT_DOUBLE_EQ(jaccard(old_stmt, seven), 0.7);
  EXPECT_EQ(classify_edit(old_stmt, {seven}), EditType::Updated);
  EXPECT_EQ(classify_edit(old_stmt, {below}), EditType::Deleted);
  auto d = classify_edit_detailed(old_stmt, {below, exact, seven});
  ASSERT_TRUE(d.counterpart);
  EXPECT_EQ(d.counterpart->text, exact.text);  // most similar wins
}

TEST(DiffRevisions, SingleRemovalIsReported) {
  auto a = rev(1, "One fact here. Two is the best thing ever. Three stays.");
  auto b = rev(2, "One fact here. Three stays.", "pov");
  auto d = diff_revisions(a, b);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->old_statement.text, "Two is the best thing ever.");
  EXPECT_EQ(d->edit_type, EditType::Deleted);
  EXPECT_EQ(d->revision_id, 2);
  EXPECT_FALSE(d->new_statement);
}

TEST(DiffRevisions, MoveAcrossSections) {
  auto a = rev(1, "== A ==\nMoving sentence here.\n== B ==\nStatic line.");
  auto b = rev(2, "== A ==\n== B ==\nStatic line. Moving sentence here.");
  auto d = diff_revisions(a, b);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->edit_type, EditType::Moved);
  EXPECT_EQ(d->new_statement->section, "B");
}

TEST(DiffRevisions, ZeroOrSeveralRemovalsAreDiscarded) {
  auto a = rev(1, "Alpha one. Beta two. Gamma three.");
  EXPECT_FALSE(diff_revisions(a, rev(2, "Alpha one. Beta two. Gamma three. Delta four.")));
  EXPECT_FALSE(diff_revisions(a, rev(2, "Alpha one.")));
}

TEST(DiffRevisions, DuplicateSentenceCountsAsMultiset) {
  auto a = rev(1, "Same here. Same here. Other.");
  auto d = diff_revisions(a, rev(2, "Same here. Other."));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->old_statement.text, "Same here.");
}

TEST(MineDump, FixtureYieldsOneDeletedOneUpdated) {
  DumpReader reader(kFixture);
  std::vector<MinedDiff> diffs;
  auto summary = mine_dump(reader, [&](const MinedDiff& d) { diffs.push_back(d); });
  EXPECT_EQ(summary.revisions, 5u);
  EXPECT_EQ(summary.pov_tagged, 2u);
  EXPECT_EQ(summary.deleted, 1u);
  EXPECT_EQ(summary.updated, 1u);
  EXPECT_EQ(summary.moved, 0u);
  ASSERT_EQ(diffs.size(), 2u);
  EXPECT_EQ(diffs[0].diff.old_statement.text, "It is without doubt the most beautiful bridge ever built.");
  EXPECT_EQ(diffs[0].diff.old_statement.section, "History");
  EXPECT_EQ(diffs[1].diff.edit_type, EditType::Updated);
  ASSERT_TRUE(diffs[1].diff.new_statement);
}

TEST(MineDump, NoPovRevisionsGiveEmptyOutput) {
  std::istringstream in(
      "<mediawiki><page><title>T</title><id>1</id>"
      "<revision><id>1</id><comment>start</comment><text>A b. C d.</text></revision>"
      "<revision><id>2</id><parentid>1</parentid><comment>copyedit</comment><text>A b.</text></revision>"
      "</page></mediawiki>");
  DumpReader reader(in);
  std::ostringstream out;
  auto summary = mine_dump_to_jsonl(reader, out);
  EXPECT_EQ(summary.pov_tagged, 0u);
  EXPECT_EQ(summary.deleted + summary.moved + summary.updated, 0u);
  EXPECT_TRUE(out.str().empty());
}

TEST(MineDump, FirstRevisionOfPageIsUnpaired) {
  std::istringstream in(
      "<mediawiki><page><title>T</title><id>1</id>"
      "<revision><id>1</id><comment>pov</comment><text>A b.</text></revision></page>"
      "<page><title>U</title><id>2</id>"
      "<revision><id>5</id><comment>x</comment><text>A b. C d.</text></revision>"
      "<revision><id>6</id><parentid>4</parentid><comment>pov</comment><text>A b.</text></revision>"
      "</page></mediawiki>");
  DumpReader reader(in);
  auto summary = mine_dump(reader, [](const MinedDiff&) {});
  EXPECT_EQ(summary.pov_tagged, 2u);
  EXPECT_EQ(summary.without_parent, 2u);
}

TEST(MineDump, OutputIsByteIdenticalAcrossRuns) {
  auto run = [] {
    DumpReader reader(kFixture);
    std::ostringstream out;
    mine_dump_to_jsonl(reader, out);
    return out.str();
  };
  const std::string first = run();
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, run());
}
