#include "conewalk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace conewalk::config {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    size_t hash = t.find('#');
    if (hash != std::string::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      if (!cfg.has_section(section)) cfg.sections_.push_back({section, {}});
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw config_error("config line " + std::to_string(lineno) + ": key outside any section");
    for (auto& [name, kvs] : cfg.sections_)
      if (name == section) {
        kvs.emplace_back(key, value);
        break;
      }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const {
  std::ostringstream os;
  for (const auto& [name, kvs] : sections_) {
    os << "[" << name << "]\n";
    for (const auto& [k, v] : kvs) os << k << " = " << v << "\n";
    os << "\n";
  }
  return os.str();
}

uint64_t Config::hash() const {
  std::string s = serialize();
  return fnv1a64(std::span<const char>(s.data(), s.size()));
}

bool Config::has_section(const std::string& s) const {
  for (const auto& [name, kvs] : sections_)
    if (name == s) return true;
  return false;
}

std::vector<std::string> Config::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, kvs] : sections_) out.push_back(name);
  return out;
}

const std::string* Config::find(const std::string& s, const std::string& key) const {
  for (const auto& [name, kvs] : sections_)
    if (name == s) {
      for (auto it = kvs.rbegin(); it != kvs.rend(); ++it)
        if (it->first == key) return &it->second;
    }
  return nullptr;
}

bool Config::has(const std::string& s, const std::string& key) const {
  return find(s, key) != nullptr;
}

void Config::fail(const std::string& s, const std::string& key, const std::string& why) const {
  throw config_error("config field [" + s + "]." + key + ": " + why);
}

std::string Config::get_string(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  return *v;
}

std::string Config::get_string(const std::string& s, const std::string& key,
                               const std::string& def) const {
  const std::string* v = find(s, key);
  return v ? *v : def;
}

int64_t Config::get_int(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  try {
    size_t pos = 0;
    int64_t out = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    fail(s, key, "not an integer: " + *v);
  }
}

int64_t Config::get_int(const std::string& s, const std::string& key, int64_t def) const {
  return find(s, key) ? get_int(s, key) : def;
}

double Config::get_double(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  try {
    size_t pos = 0;
    double out = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    fail(s, key, "not a number: " + *v);
  }
}

double Config::get_double(const std::string& s, const std::string& key, double def) const {
  return find(s, key) ? get_double(s, key) : def;
}

bool Config::get_bool(const std::string& s, const std::string& key, bool def) const {
  const std::string* v = find(s, key);
  if (!v) return def;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(s, key, "not a boolean: " + *v);
}

Vec parse_point(const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  Vec out;
  std::istringstream is(t);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stod(trim(tok)));
  if (out.empty()) throw config_error("empty point: " + text);
  return out;
}

Vec Config::get_point(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  try {
    return config::parse_point(*v);
  } catch (const std::exception&) {
    fail(s, key, "not a point: " + *v);
  }
}

Vec Config::get_point(const std::string& s, const std::string& key, const Vec& def) const {
  return find(s, key) ? get_point(s, key) : def;
}

std::vector<int64_t> parse_int_list(const std::string& text) {
  std::string t = trim(text);
  size_t dots = t.find("..");
  if (dots != std::string::npos) {
    int64_t first = std::stoll(trim(t.substr(0, dots)));
    std::string rest = trim(t.substr(dots + 2));
    size_t sp = rest.find_first_of(" \t");
    int64_t last = std::stoll(trim(sp == std::string::npos ? rest : rest.substr(0, sp)));
    std::string stepspec = sp == std::string::npos ? "x2" : trim(rest.substr(sp + 1));
    std::vector<int64_t> out;
    if (stepspec.front() == 'x') {
      int64_t f = std::stoll(stepspec.substr(1));
      if (f < 2) throw config_error("range factor must be >= 2");
      for (int64_t v = first; v <= last; v *= f) out.push_back(v);
    } else if (stepspec.front() == '+') {
      int64_t st = std::stoll(stepspec.substr(1));
      if (st < 1) throw config_error("range step must be >= 1");
      for (int64_t v = first; v <= last; v += st) out.push_back(v);
    } else {
      throw config_error("range needs xK or +K: " + text);
    }
    return out;
  }
  std::vector<int64_t> out;
  std::istringstream is(t);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoll(trim(tok)));
  return out;
}

std::vector<int64_t> Config::get_int_list(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  try {
    return parse_int_list(*v);
  } catch (const std::exception&) {
    fail(s, key, "not an integer list: " + *v);
  }
}

std::vector<int64_t> Config::get_int_list(const std::string& s, const std::string& key,
                                          const std::vector<int64_t>& def) const {
  return find(s, key) ? get_int_list(s, key) : def;
}

std::vector<double> Config::get_double_list(const std::string& s, const std::string& key,
                                            const std::vector<double>& def) const {
  const std::string* v = find(s, key);
  if (!v) return def;
  std::vector<double> out;
  std::istringstream is(*v);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stod(trim(tok)));
  return out;
}

std::vector<Vec> parse_point_list(const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<Vec> out;
  std::string cur;
  int depth = 0;
  for (char c : t) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ';' && depth == 0) {
      out.push_back(parse_point(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(parse_point(cur));
  return out;
}

std::vector<Vec> Config::get_point_list(const std::string& s, const std::string& key) const {
  const std::string* v = find(s, key);
  if (!v) fail(s, key, "missing");
  try {
    return config::parse_point_list(*v);
  } catch (const std::exception&) {
    fail(s, key, "not a point list: " + *v);
  }
}

void Config::set(const std::string& s, const std::string& key, const std::string& value) {
  for (auto& [name, kvs] : sections_)
    if (name == s) {
      kvs.emplace_back(key, value);
      return;
    }
  sections_.push_back({s, {{key, value}}});
}

}  // namespace conewalk::config
