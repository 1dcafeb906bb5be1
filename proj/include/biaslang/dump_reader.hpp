#pragma once

// Pull-style reader for MediaWiki XML exports (pages-meta-history schema).
// Input is fed to expat in fixed-size chunks and complete revisions are
// queued, so memory stays bounded by the largest single revision.

#include <expat.h>

#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biaslang/error.hpp"

namespace biaslang {

struct RevisionRecord {
  std::int64_t page_id = 0;
  std::string page_title;
  std::int64_t revision_id = 0;
  std::optional<std::int64_t> parent_revision_id;
  std::string timestamp;
  std::string comment;
  std::string wikitext;
};

class DumpReader {
 public:
  static constexpr std::size_t kChunkSize = 1 << 16;

  explicit DumpReader(std::istream& in) : in_(&in) { init(); }

  explicit DumpReader(const std::string& path) : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)) {
    if (!*owned_) throw Error("cannot open dump: " + path);
    in_ = owned_.get();
    init();
  }

  DumpReader(const DumpReader&) = delete;
  DumpReader& operator=(const DumpReader&) = delete;

  // Next revision in document order, or nullopt at end of input. Errors are
  // raised only after every revision completed before them was returned.
  std::optional<RevisionRecord> next() {
    while (queue_.empty() && !finished_) feed();
    if (!queue_.empty()) {
      RevisionRecord r = std::move(queue_.front());
      queue_.pop_front();
      return r;
    }
    if (error_) {
      auto e = *error_;
      error_.reset();
      if (e.truncated) throw TruncatedInput("truncated dump: " + e.message, e.offset);
      throw ParseError("malformed dump: " + e.message, e.offset);
    }
    return std::nullopt;
  }

  std::int64_t bytes_consumed() const { return bytes_; }

 private:
  enum class Field { None, PageTitle, PageId, RevId, ParentId, Timestamp, Comment, Text };

  struct PendingError {
    std::string message;
    std::int64_t offset;
    bool truncated;
  };

  struct ParserDeleter {
    void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
  };

  void init() {
    parser_.reset(XML_ParserCreate("UTF-8"));
    XML_SetUserData(parser_.get(), this);
    XML_SetElementHandler(parser_.get(), &DumpReader::on_start, &DumpReader::on_end);
    XML_SetCharacterDataHandler(parser_.get(), &DumpReader::on_chars);
    buffer_.resize(kChunkSize);
  }

  void feed() {
    in_->read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    auto n = static_cast<int>(in_->gcount());
    bool last = n == 0 || in_->eof();
    bytes_ += n;
    if (XML_Parse(parser_.get(), buffer_.data(), n, last ? 1 : 0) == XML_STATUS_ERROR) {
      XML_Error code = XML_GetErrorCode(parser_.get());
      bool truncated = last && (code == XML_ERROR_NO_ELEMENTS || code == XML_ERROR_UNCLOSED_TOKEN ||
                                code == XML_ERROR_UNCLOSED_CDATA_SECTION || code == XML_ERROR_PARTIAL_CHAR);
      if (!error_) {
        error_ = PendingError{XML_ErrorString(code),
                              static_cast<std::int64_t>(XML_GetCurrentByteIndex(parser_.get())), truncated};
      }
      finished_ = true;
      return;
    }
    if (last) finished_ = true;
  }

  static void on_start(void* self, const XML_Char* name, const XML_Char** /*attrs*/) {
    static_cast<DumpReader*>(self)->start(name);
  }
  static void on_end(void* self, const XML_Char* name) { static_cast<DumpReader*>(self)->end(name); }
  static void on_chars(void* self, const XML_Char* s, int len) {
    auto* r = static_cast<DumpReader*>(self);
    if (r->field_ != Field::None) r->text_.append(s, static_cast<std::size_t>(len));
  }

  const std::string& parent_element() const {
    static const std::string kEmpty;
    return path_.size() >= 2 ? path_[path_.size() - 2] : kEmpty;
  }

  void start(const std::string& name) {
    path_.push_back(name);
    const std::string& parent = parent_element();
    field_ = Field::None;
    text_.clear();
    if (name == "page") {
      page_id_ = 0;
      page_title_.clear();
    } else if (name == "revision" && parent == "page") {
      current_ = RevisionRecord{};
      current_.page_id = page_id_;
      current_.page_title = page_title_;
    } else if (parent == "page") {
      if (name == "title") field_ = Field::PageTitle;
      if (name == "id") field_ = Field::PageId;
    } else if (parent == "revision") {
      if (name == "id") field_ = Field::RevId;
      if (name == "parentid") field_ = Field::ParentId;
      if (name == "timestamp") field_ = Field::Timestamp;
      if (name == "comment") field_ = Field::Comment;
      if (name == "text") field_ = Field::Text;
    }
  }

  std::int64_t parse_id(const std::string& s) {
    try {
      std::size_t used = 0;
      auto v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    error_ = PendingError{"non-numeric id '" + s + "'",
                          static_cast<std::int64_t>(XML_GetCurrentByteIndex(parser_.get())), false};
    XML_StopParser(parser_.get(), XML_FALSE);
    return 0;
  }

  void end(const std::string& name) {
    switch (field_) {
      case Field::PageTitle: page_title_ = text_; break;
      case Field::PageId: page_id_ = parse_id(text_); break;
      case Field::RevId: current_.revision_id = parse_id(text_); break;
      case Field::ParentId: current_.parent_revision_id = parse_id(text_); break;
      case Field::Timestamp: current_.timestamp = text_; break;
      case Field::Comment: current_.comment = text_; break;
      case Field::Text: current_.wikitext = std::move(text_); break;
      case Field::None: break;
    }
    field_ = Field::None;
    text_.clear();
    if (name == "revision" && parent_element() == "page") {
      // page <id> precedes revisions in the schema, but a title/id that
      // arrives late still belongs to the page
      current_.page_id = page_id_;
      current_.page_title = page_title_;
      queue_.push_back(std::move(current_));
      current_ = RevisionRecord{};
    }
    path_.pop_back();
  }

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_ = nullptr;
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser_;
  std::vector<char> buffer_;
  std::int64_t bytes_ = 0;
  bool finished_ = false;
  std::optional<PendingError> error_;

  std::vector<std::string> path_;
  Field field_ = Field::None;
  std::string text_;
  std::int64_t page_id_ = 0;
  std::string page_title_;
  RevisionRecord current_;
  std::deque<RevisionRecord> queue_;
};

}  // namespace biaslang
