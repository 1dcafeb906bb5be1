#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace biaslang {

// Base for every error the library raises. Callers that only care about
// "something went wrong" catch this; the subclasses carry the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed XML in a revision dump.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t byte_offset)
      : Error(what + " at byte " + std::to_string(byte_offset)), offset_(byte_offset) {}
  std::int64_t byte_offset() const { return offset_; }

 private:
  std::int64_t offset_;
};

// The stream ended in the middle of a document. Every complete record
// before the cut has already been handed out.
class TruncatedInput : public ParseError {
 public:
  using ParseError::ParseError;
};

// Input file violates a line-oriented format (embeddings, lexicon, JSONL).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class AgreementUndefined : public Error {
 public:
  using Error::Error;
};

class StratumExhausted : public Error {
 public:
  StratumExhausted(const std::string& stratum, std::size_t needed, std::size_t available)
      : Error("stratum '" + stratum + "' needs " + std::to_string(needed) + " statements, pool has " +
              std::to_string(available)),
        stratum_(stratum) {}
  const std::string& stratum() const { return stratum_; }

 private:
  std::string stratum_;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class NumericFault : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Checkpoint shorter than its manifest claims.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace biaslang
