#include "tamelab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "tamelab/errors.hpp"

namespace tamelab {

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  std::string where;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigParse(where + ": " + msg); }
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size() || s[i] == '#';
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_key(const std::string& key, const Cursor& c) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : key) {
    if (ch == '.') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(trim(cur));
  for (auto& p : parts) {
    if (p.size() >= 2 && p.front() == '"' && p.back() == '"') p = p.substr(1, p.size() - 2);
    if (p.empty()) c.fail("empty key segment in '" + key + "'");
    for (char ch : p)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
        c.fail("bad character in key '" + key + "'");
  }
  return parts;
}

nlohmann::json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.i >= c.s.size()) c.fail("missing value");
  const char ch = c.s[c.i];
  if (ch == '"') {
    std::string out;
    ++c.i;
    while (c.i < c.s.size() && c.s[c.i] != '"') {
      if (c.s[c.i] == '\\' && c.i + 1 < c.s.size()) {
        const char e = c.s[++c.i];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += c.s[c.i];
      }
      ++c.i;
    }
    if (c.i >= c.s.size()) c.fail("unterminated string");
    ++c.i;
    return out;
  }
  if (ch == '[') {
    ++c.i;
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
      c.skip_ws();
      if (c.i < c.s.size() && c.s[c.i] == ']') {
        ++c.i;
        return arr;
      }
      arr.push_back(parse_value(c));
      c.skip_ws();
      if (c.i < c.s.size() && c.s[c.i] == ',') {
        ++c.i;
        continue;
      }
      if (c.i < c.s.size() && c.s[c.i] == ']') {
        ++c.i;
        return arr;
      }
      c.fail("expected ',' or ']' in array");
    }
  }
  size_t j = c.i;
  while (j < c.s.size() && c.s[j] != ',' && c.s[j] != ']' && c.s[j] != '#' && c.s[j] != ' ' && c.s[j] != '\t')
    ++j;
  const std::string tok = c.s.substr(c.i, j - c.i);
  c.i = j;
  if (tok == "true") return true;
  if (tok == "false") return false;
  std::string num;
  for (char d : tok)
    if (d != '_') num += d;
  try {
    size_t used = 0;
    if (num.find_first_of(".eEinf") == std::string::npos) {
      const long long v = std::stoll(num, &used);
      if (used == num.size()) return v;
    }
    used = 0;
    const double v = std::stod(num, &used);
    if (used == num.size()) return v;
  } catch (const std::exception&) {
  }
  c.fail("cannot parse value '" + tok + "'");
}

nlohmann::json& descend(nlohmann::json& root, const std::vector<std::string>& path, const Cursor& c) {
  nlohmann::json* node = &root;
  for (const auto& p : path) {
    if (!node->contains(p)) (*node)[p] = nlohmann::json::object();
    node = &(*node)[p];
    if (!node->is_object()) c.fail("key '" + p + "' is not a table");
  }
  return *node;
}

}  // namespace

nlohmann::json parse_config_text(const std::string& text, const std::string& origin) {
  nlohmann::json root = nlohmann::json::object();
  std::vector<std::string> table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    Cursor c{line, 0, origin + ":" + std::to_string(lineno)};
    if (c.done()) continue;
    if (line[c.i] == '[') {
      const size_t close = line.find(']', c.i);
      if (close == std::string::npos) c.fail("unterminated table header");
      table = split_key(line.substr(c.i + 1, close - c.i - 1), c);
      descend(root, table, c);
      c.i = close + 1;
      if (!c.done()) c.fail("trailing characters after table header");
      continue;
    }
    const size_t eq = line.find('=', c.i);
    if (eq == std::string::npos) c.fail("expected key = value");
    auto key = split_key(line.substr(c.i, eq - c.i), c);
    c.i = eq + 1;
    nlohmann::json v = parse_value(c);
    if (!c.done()) c.fail("trailing characters after value");
    std::vector<std::string> path = table;
    path.insert(path.end(), key.begin(), key.end() - 1);
    auto& node = descend(root, path, c);
    if (node.contains(key.back())) c.fail("duplicate key '" + key.back() + "'");
    node[key.back()] = std::move(v);
  }
  return root;
}

nlohmann::json parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace tamelab
