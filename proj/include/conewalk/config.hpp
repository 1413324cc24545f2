#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conewalk/common.hpp"

namespace conewalk::config {

// Sectioned key=value text. Order is preserved so parse -> serialize -> parse
// is the identity; values are kept verbatim until typed access.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  std::string serialize() const;
  uint64_t hash() const;

  bool has_section(const std::string& s) const;
  bool has(const std::string& s, const std::string& key) const;
  std::vector<std::string> section_names() const;

  // typed getters; all throw config_error naming section.key on bad input
  std::string get_string(const std::string& s, const std::string& key) const;
  std::string get_string(const std::string& s, const std::string& key,
                         const std::string& def) const;
  int64_t get_int(const std::string& s, const std::string& key, int64_t def) const;
  int64_t get_int(const std::string& s, const std::string& key) const;
  double get_double(const std::string& s, const std::string& key, double def) const;
  double get_double(const std::string& s, const std::string& key) const;
  bool get_bool(const std::string& s, const std::string& key, bool def) const;
  // "(a,b,c)" or bare "a"
  Vec get_point(const std::string& s, const std::string& key) const;
  Vec get_point(const std::string& s, const std::string& key, const Vec& def) const;
  // "1,2,3" or geometric range "64..8192 x2" or arithmetic "0..10 +2"
  std::vector<int64_t> get_int_list(const std::string& s, const std::string& key) const;
  std::vector<int64_t> get_int_list(const std::string& s, const std::string& key,
                                    const std::vector<int64_t>& def) const;
  std::vector<double> get_double_list(const std::string& s, const std::string& key,
                                      const std::vector<double>& def) const;
  // "[(1,0);(0,1)]"
  std::vector<Vec> get_point_list(const std::string& s, const std::string& key) const;

  void set(const std::string& s, const std::string& key, const std::string& value);

 private:
  const std::string* find(const std::string& s, const std::string& key) const;
  [[noreturn]] void fail(const std::string& s, const std::string& key,
                         const std::string& why) const;
  // section -> ordered (key, value)
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
      sections_;
};

std::vector<int64_t> parse_int_list(const std::string& text);
Vec parse_point(const std::string& text);
std::vector<Vec> parse_point_list(const std::string& text);

}  // namespace conewalk::config
