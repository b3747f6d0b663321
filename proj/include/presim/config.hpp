#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace presim::cfg {

// Diagnostic carrying the source location of a configuration problem. Every
// malformed input must yield at least one of these, never a crash.
struct Diagnostic {
  std::string file;
  int line = 0;
  std::string message;

  std::string str() const;
};

using Diagnostics = std::vector<Diagnostic>;

// One node of the parsed scenario tree. The format is line-oriented:
//
//   # comment
//   key = value
//   key {            # anonymous block
//     ...
//   }
//   kind name {      # named block, e.g. "format pdf { ... }"
//     ...
//   }
//
// Values are kept as raw text; typed access happens in the semantic layer so
// that range errors carry the original source line.
struct Node {
  std::string key;
  std::string name;       // non-empty only for named blocks
  std::string value;      // non-empty only for scalars
  bool is_block = false;
  int line = 0;
  std::vector<Node> children;

  const Node* child(std::string_view key) const;
  const Node* child(std::string_view key, std::string_view name) const;
  std::vector<const Node*> children_named(std::string_view key) const;
  bool has(std::string_view key) const { return child(key) != nullptr; }
};

struct ParseResult {
  Node root;  // root is an unnamed block holding top-level entries
  Diagnostics diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ParseResult parse_string(std::string_view text, std::string_view filename);
ParseResult parse_file(const std::string& path);

// Canonical re-serialization of a tree; used for scenario hashing so that
// comments and whitespace do not change the recorded provenance hash.
std::string serialize(const Node& root);

// Scalar conversions. Return nullopt on malformed text.
std::optional<double> as_number(std::string_view text);
std::optional<bool> as_bool(std::string_view text);

// Splits a scalar value on top-level commas: "a, b, c" -> {"a","b","c"}.
std::vector<std::string> split_list(std::string_view text);

// Replaces (or inserts) the scalar at a dotted path like
// "strategy.replication.copies". Used by the sweep driver to rewrite one
// axis value per point. Returns false if an intermediate path element exists
// but is not a block.
bool set_path(Node& root, std::string_view dotted_path, std::string_view value);

}  // namespace presim::cfg
