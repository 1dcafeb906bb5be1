#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "biaslang/dump_reader.hpp"
#include "biaslang/revision_miner.hpp"

using namespace biaslang;

namespace {

const std::string kFixture = std::string(BIASLANG_SOURCE_DIR) + "/data/fixtures/mini_dump.xml";

std::string page(int id, const std::vector<int>& revisions) {
  std::string s = "<page><title>P" + std::to_string(id) + "</title><id>" + std::to_string(id) + "</id>";
  for (int r : revisions) {
    s += "<revision><id>" + std::to_string(r) + "</id><timestamp>2010-01-01T00:00:00Z</timestamp>";
    if (r % 2 == 0) s += "<comment>edit " + std::to_string(r) + "</comment>";
    s += "<text>Rev " + std::to_string(r) + ".</text></revision>";
  }
  return s + "</page>";
}

std::vector<RevisionRecord> read_all(const std::string& xml) {
  std::istringstream in(xml);
  DumpReader reader(in);
  std::vector<RevisionRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

}  // namespace

TEST(DumpReader, TwoPagesThreeRevisionsInOrder) {
  auto recs = read_all("<mediawiki>" + page(1, {10, 11, 12}) + page(2, {20, 21, 22}) + "</mediawiki>");
  ASSERT_EQ(recs.size(), 6u);
  const std::vector<std::int64_t> ids = {10, 11, 12, 20, 21, 22};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(recs[i].revision_id, ids[i]);
  EXPECT_EQ(recs[0].page_title, "P1");
  EXPECT_EQ(recs[3].page_id, 2);
  EXPECT_EQ(recs[1].comment, "");  // no comment element
  EXPECT_EQ(recs[2].comment, "edit 12");
  EXPECT_EQ(recs[2].wikitext, "Rev 12.");
  EXPECT_FALSE(recs[0].parent_revision_id.has_value());
}

TEST(DumpReader, EmptyMediawikiElement) { EXPECT_TRUE(read_all("<mediawiki></mediawiki>").empty()); }

TEST(DumpReader, FixtureHasFiveRevisionsTwoPovTagged) {
  DumpReader reader(kFixture);
  std::size_t n = 0, pov = 0;
  while (auto r = reader.next()) {
    ++n;
    pov += is_pov_tagged(r->comment);
  }
  EXPECT_EQ(n, 5u);
  EXPECT_EQ(pov, 2u);
}

TEST(DumpReader, FixtureFieldsAndEntities) {
  DumpReader reader(kFixture);
  auto first = reader.next();
  auto second = reader.next();
  ASSERT_TRUE(first && second);
  EXPECT_EQ(first->page_title, "Harbor Bridge");
  EXPECT_EQ(first->timestamp, "2011-03-01T10:00:00Z");
  EXPECT_NE(first->wikitext.find("<ref>City archive"), std::string::npos);  // entity-decoded
  EXPECT_EQ(second->parent_revision_id, 101);
}

TEST(DumpReader, TruncatedStreamYieldsCompleteRecordsThenError) {
  std::string xml = "<mediawiki>" + page(1, {10, 11}) + "<page><title>Cut</title><id>3</id><revision><id>30</id><text>half";
  std::istringstream in(xml);
  DumpReader reader(in);
  EXPECT_EQ(reader.next()->revision_id, 10);
  EXPECT_EQ(reader.next()->revision_id, 11);
  EXPECT_THROW(reader.next(), TruncatedInput);
}

TEST(DumpReader, MalformedXmlCarriesByteOffset) {
  std::string xml = "<mediawiki>" + page(1, {10}) + "<page><title>x</titel></page></mediawiki>";
  std::istringstream in(xml);
  DumpReader reader(in);
  EXPECT_EQ(reader.next()->revision_id, 10);
  try {
    reader.next();
    FAIL() << "expected a parse error";
  } catch (const TruncatedInput&) {
    FAIL() << "malformed input reported as truncation";
  } catch (const ParseError& e) {
    const auto bad = static_cast<std::int64_t>(xml.find("</titel>"));
    EXPECT_GE(e.byte_offset(), bad);
    EXPECT_LE(e.byte_offset(), bad + 2);
  }
}

TEST(DumpReader, NonNumericIdIsParseError) {
  std::istringstream in("<mediawiki><page><title>x</title><id>abc</id></page></mediawiki>");
  DumpReader reader(in);
  EXPECT_THROW(reader.next(), ParseError);
}

TEST(DumpReader, LargeTextSpanningChunks) {
  std::string big(200000, 'x');
  auto recs = read_all("<mediawiki><page><title>B</title><id>1</id><revision><id>5</id><text>" + big +
                       "</text></revision></page></mediawiki>");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].wikitext.size(), big.size());
}
