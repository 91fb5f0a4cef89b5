#include "uvesc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "uvesc/errors.hpp"
#include "uvesc/sim.hpp"

namespace uvesc {

namespace {

struct Value {
  enum class Type { Number, String, Array } type = Type::Number;
  std::string text;  // number token or unquoted string
  std::vector<Value> items;
};

class ValueParser {
 public:
  ValueParser(std::string_view text, std::string where) : text_(text), where_(std::move(where)) {}

  Value parse() {
    Value v = value();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw ValidationError(where_ + ": " + why); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') return array();
    if (c == '"') return string();
    return number();
  }

  Value array() {
    Value v;
    v.type = Value::Type::Array;
    ++pos_;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.items.push_back(value());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {  // trailing comma
          ++pos_;
          return v;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  Value string() {
    Value v;
    v.type = Value::Type::String;
    const auto end = text_.find('"', pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    v.text = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return v;
  }

  Value number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    Value v;
    v.text = std::string(text_.substr(start, pos_ - start));
    v.text.erase(std::remove(v.text.begin(), v.text.end(), '_'), v.text.end());
    return v;
  }

  std::string_view text_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

struct Entry {
  Value value;
  std::string where;
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

double as_number(const Entry& e, const std::string& key) {
  if (e.value.type != Value::Type::Number) throw ValidationError(e.where + ": " + key + " must be a number");
  const std::string& s = e.value.text;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError(e.where + ": " + key + " = '" + s + "' is not a number");
  return out;
}

Vector as_vector(const Entry& e, const std::string& key) {
  if (e.value.type != Value::Type::Array) throw ValidationError(e.where + ": " + key + " must be an array");
  Vector out;
  for (const Value& item : e.value.items) out.push_back(as_number({item, e.where}, key));
  return out;
}

Matrix as_matrix(const Entry& e, const std::string& key, std::size_t n) {
  if (e.value.type == Value::Type::Number) return Matrix::identity(n) * as_number(e, key);
  if (e.value.type != Value::Type::Array) throw ValidationError(e.where + ": " + key + " must be a matrix");
  const auto& rows = e.value.items;
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().items.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vector r = as_vector({rows[i], e.where}, key);
    if (r.size() != m.cols()) throw DimensionError(e.where + ": " + key + " rows differ in length");
    for (std::size_t j = 0; j < r.size(); ++j) m(i, j) = r[j];
  }
  return m;
}

std::vector<Rational> as_rationals(const Entry& e, const std::string& key) {
  if (e.value.type != Value::Type::Array) throw ValidationError(e.where + ": " + key + " must be an array");
  std::vector<Rational> out;
  for (const Value& item : e.value.items) {
    if (item.type == Value::Type::Array) throw ValidationError(e.where + ": " + key + " entries must be scalars");
    try {
      out.push_back(parse_rational(item.text));
    } catch (const std::exception& ex) {
      throw ValidationError(e.where + ": " + key + ": " + ex.what());
    }
  }
  return out;
}

std::string as_string(const Entry& e, const std::string& key) {
  if (e.value.type == Value::Type::Array) throw ValidationError(e.where + ": " + key + " must be a string");
  return e.value.text;
}

Table read_table(std::string_view text, const std::string& source) {
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"map", {"q_star", "theta_star", "hessian"}},
      {"dither", {"amplitudes", "ratios", "base_omega", "delta", "omega_l", "omega_h"}},
      {"law", {"kind", "gain", "riccati_ratio", "riccati_rate", "gamma0", "relay_guard"}},
      {"sim", {"theta_tilde0", "theta_hat0", "t_end", "dt", "sample_every", "boundary_layer"}},
  };
  Table table;
  std::istringstream in{std::string(text)};
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string content = trim(strip_comment(line));
    if (content.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (content.front() == '[' && content.find('=') == std::string::npos) {
      if (content.back() != ']') throw ValidationError(where + ": malformed section header");
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      if (!kKeys.count(section)) throw ValidationError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    if (section.empty()) throw ValidationError(where + ": key outside any section");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    std::string raw = content.substr(eq + 1);
    while (bracket_balance(raw) > 0 && std::getline(in, line)) {
      ++lineno;
      raw += ' ' + trim(strip_comment(line));
    }
    if (bracket_balance(raw) != 0) throw ValidationError(where + ": unbalanced brackets");
    if (!kKeys.at(section).count(key)) throw ValidationError(where + ": unknown key '" + key + "' in [" + section + "]");
    if (table[section].count(key)) throw ValidationError(where + ": duplicate key '" + key + "'");
    table[section][key] = Entry{ValueParser(raw, where).parse(), where};
  }
  return table;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source) {
  Table table = read_table(text, source);
  auto find = [&](const std::string& section, const std::string& key) -> const Entry* {
    auto s = table.find(section);
    if (s == table.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto need = [&](const std::string& section, const std::string& key) -> const Entry& {
    const Entry* e = find(section, key);
    if (!e) throw ValidationError(source + ": missing " + section + "." + key);
    return *e;
  };

  Scenario sc;
  SimConfig& cfg = sc.sim;
  cfg.map.q_star = as_number(need("map", "q_star"), "q_star");
  cfg.map.theta_star = as_vector(need("map", "theta_star"), "theta_star");
  const std::size_t n = cfg.map.dimension();
  cfg.map.hessian = as_matrix(need("map", "hessian"), "hessian", n);

  cfg.dither.amplitudes = as_vector(need("dither", "amplitudes"), "amplitudes");
  cfg.dither.ratios = as_rationals(need("dither", "ratios"), "ratios");
  cfg.dither.base_omega = as_number(need("dither", "base_omega"), "base_omega");
  for (const char* key : {"delta", "omega_l", "omega_h"})
    if (find("dither", key))
      sc.warnings.push_back(std::string("dither.") + key + " is accepted but unused (no filter dynamics are modelled)");

  cfg.law.kind = parse_law_kind(as_string(need("law", "kind"), "kind"));
  cfg.law.gain = as_matrix(need("law", "gain"), "gain", n);
  if (const Entry* e = find("law", "relay_guard")) cfg.law.relay_guard = as_number(*e, "relay_guard");
  const Entry* ratio = find("law", "riccati_ratio");
  const Entry* rate = find("law", "riccati_rate");
  if (ratio && rate) throw ValidationError(source + ": give law.riccati_ratio or law.riccati_rate, not both");
  if (ratio) cfg.law.riccati_rate = as_number(*ratio, "riccati_ratio") * cfg.dither.base_omega;
  if (rate) cfg.law.riccati_rate = as_number(*rate, "riccati_rate");
  if (const Entry* e = find("law", "gamma0")) cfg.law.gamma0 = as_matrix(*e, "gamma0", n);

  const Entry* tilde = find("sim", "theta_tilde0");
  const Entry* hat = find("sim", "theta_hat0");
  if (tilde && hat) throw ValidationError(source + ": give sim.theta_tilde0 or sim.theta_hat0, not both");
  if (!tilde && !hat) throw ValidationError(source + ": missing sim.theta_tilde0 or sim.theta_hat0");
  if (hat) {
    cfg.theta_hat0 = as_vector(*hat, "theta_hat0");
  } else {
    const Vector tt = as_vector(*tilde, "theta_tilde0");
    if (tt.size() != n) throw DimensionError(tilde->where + ": theta_tilde0 dimension differs from theta_star");
    cfg.theta_hat0 = add(cfg.map.theta_star, tt);
  }
  cfg.t_end = as_number(need("sim", "t_end"), "t_end");
  if (const Entry* e = find("sim", "dt")) {
    cfg.dt = as_number(*e, "dt");
  } else {
    cfg.dither.validate();
    cfg.dt = default_step(cfg.dither);
    sc.default_dt = true;
  }
  if (const Entry* e = find("sim", "sample_every")) {
    const double v = as_number(*e, "sample_every");
    if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError(e->where + ": sample_every must be a positive integer");
    cfg.sample_every = static_cast<std::size_t>(v);
  }
  if (const Entry* e = find("sim", "boundary_layer")) sc.boundary_layer = as_number(*e, "boundary_layer");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace uvesc
