#include "presim/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace presim::cfg {

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << file << ":" << line << ": " << message;
  return os.str();
}

const Node* Node::child(std::string_view k) const {
  for (const Node& c : children)
    if (c.key == k) return &c;
  return nullptr;
}

const Node* Node::child(std::string_view k, std::string_view n) const {
  for (const Node& c : children)
    if (c.key == k && c.name == n) return &c;
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view k) const {
  std::vector<const Node*> out;
  for (const Node& c : children)
    if (c.key == k) out.push_back(&c);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment, honoring double-quoted spans.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  }
  return true;
}

}  // namespace

ParseResult parse_string(std::string_view text, std::string_view filename) {
  ParseResult result;
  result.root.is_block = true;
  std::vector<Node*> stack{&result.root};
  const std::string file{filename};

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos
                                                ? text.size() - pos
                                                : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line == "}") {
      if (stack.size() == 1) {
        result.diagnostics.push_back({file, line_no, "unmatched '}'"});
        continue;
      }
      stack.pop_back();
      continue;
    }

    const size_t eq = line.find('=');
    const bool opens_block = line.back() == '{';
    if (opens_block && (eq == std::string_view::npos || eq > line.find('{'))) {
      std::string_view head = trim(line.substr(0, line.size() - 1));
      Node node;
      node.is_block = true;
      node.line = line_no;
      const size_t sp = head.find_first_of(" \t");
      if (sp == std::string_view::npos) {
        node.key = std::string(head);
      } else {
        node.key = std::string(trim(head.substr(0, sp)));
        node.name = std::string(trim(head.substr(sp)));
      }
      if (!is_ident(node.key) || (!node.name.empty() && !is_ident(node.name))) {
        result.diagnostics.push_back(
            {file, line_no, "malformed block header '" + std::string(head) + "'"});
        continue;
      }
      stack.back()->children.push_back(std::move(node));
      stack.push_back(&stack.back()->children.back());
      continue;
    }

    if (eq != std::string_view::npos) {
      Node node;
      node.line = line_no;
      node.key = std::string(trim(line.substr(0, eq)));
      node.value = std::string(trim(line.substr(eq + 1)));
      if (!is_ident(node.key)) {
        result.diagnostics.push_back(
            {file, line_no, "malformed key '" + node.key + "'"});
        continue;
      }
      if (node.value.empty()) {
        result.diagnostics.push_back(
            {file, line_no, "missing value for key '" + node.key + "'"});
        continue;
      }
      // Strip surrounding quotes from string values.
      if (node.value.size() >= 2 && node.value.front() == '"' &&
          node.value.back() == '"') {
        node.value = node.value.substr(1, node.value.size() - 2);
      }
      stack.back()->children.push_back(std::move(node));
      continue;
    }

    result.diagnostics.push_back(
        {file, line_no,
         "expected 'key = value', 'key {' or '}', got '" + std::string(line) + "'"});
  }

  if (stack.size() > 1) {
    result.diagnostics.push_back(
        {file, stack.back()->line,
         "unterminated block '" + stack.back()->key + "' (missing '}')"});
  }
  return result;
}

ParseResult parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.root.is_block = true;
    r.diagnostics.push_back({path, 0, "cannot open file"});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

namespace {

void serialize_node(const Node& n, int depth, std::string& out) {
  const std::string indent(static_cast<size_t>(depth) * 2, ' ');
  if (n.is_block) {
    out += indent + n.key;
    if (!n.name.empty()) out += " " + n.name;
    out += " {\n";
    for (const Node& c : n.children) serialize_node(c, depth + 1, out);
    out += indent + "}\n";
  } else {
    out += indent + n.key + " = " + n.value + "\n";
  }
}

}  // namespace

std::string serialize(const Node& root) {
  std::string out;
  for (const Node& c : root.children) serialize_node(c, 0, out);
  return out;
}

std::optional<double> as_number(std::string_view text) {
  std::string s{trim(text)};
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> as_bool(std::string_view text) {
  std::string_view t = trim(text);
  if (t == "true" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "no" || t == "off") return false;
  return std::nullopt;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  int paren = 0;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && paren == 0)) {
      std::string_view piece = trim(text.substr(start, i - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = i + 1;
    } else if (text[i] == '(') {
      ++paren;
    } else if (text[i] == ')') {
      --paren;
    }
  }
  return out;
}

bool set_path(Node& root, std::string_view dotted_path, std::string_view value) {
  Node* cur = &root;
  size_t pos = 0;
  while (true) {
    const size_t dot = dotted_path.find('.', pos);
    const std::string_view part =
        dotted_path.substr(pos, dot == std::string_view::npos ? dotted_path.size() - pos
                                                              : dot - pos);
    const bool last = dot == std::string_view::npos;
    Node* next = nullptr;
    for (Node& c : cur->children) {
      if (c.key == part) {
        next = &c;
        break;
      }
    }
    if (last) {
      if (next == nullptr) {
        Node node;
        node.key = std::string(part);
        node.value = std::string(value);
        cur->children.push_back(std::move(node));
      } else if (next->is_block) {
        return false;
      } else {
        next->value = std::string(value);
      }
      return true;
    }
    if (next == nullptr) {
      Node node;
      node.key = std::string(part);
      node.is_block = true;
      cur->children.push_back(std::move(node));
      next = &cur->children.back();
    } else if (!next->is_block) {
      return false;
    }
    cur = next;
    pos = dot + 1;
  }
}

}  // namespace presim::cfg
