#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stefan/experiment_spec.hpp"

namespace stefan {

/// Syntax error in a config document.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formed document that does not fit the schema (missing, unknown or
/// mistyped key, or violated invariants). key() names the offending entry.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat key/value view of a config document. Keys are "section.key"; entries
/// before the first section header are top-level ("name", "kind", ...).
struct ConfigDocument {
  struct Entry {
    std::string value;
    int line = 0;
    int column = 0;
  };
  std::map<std::string, Entry> entries;
  /// Keys in document order.
  std::vector<std::string> order;
};

ConfigDocument parse_document(std::string_view text);

/// Parses and validates an experiment spec. Unknown keys are errors.
ExperimentSpec parse_config(std::string_view text);

/// Canonical document for spec; parse_config(emit_config(s)) == s.
std::string emit_config(const ExperimentSpec& spec);

/// Replaces (or adds) "section.key = value" entries and re-parses.
ExperimentSpec apply_overrides(const ExperimentSpec& spec, const std::map<std::string, std::string>& overrides);

ExperimentSpec load_spec_file(const std::string& path);

}  // namespace stefan
