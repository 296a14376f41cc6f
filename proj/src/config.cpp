#include "hardy/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "format.hpp"

namespace hardy {

namespace {

/// Parsed value: a number, a bare word, a call `name(args)`, a list `[...]`
/// or a tuple `(...)`.
struct Node {
  enum class Kind { number, word, call, list, tuple };
  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;  // word or call name; the raw token for numbers
  std::vector<Node> items;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Node parse_all() {
    Node n = value();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(s_.substr(i_, 1)) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  std::vector<Node> items(char close) {
    std::vector<Node> out;
    if (eat(close)) return out;
    do {
      out.push_back(value());
    } while (eat(','));
    if (!eat(close)) fail(std::string("expected '") + close + "'");
    return out;
  }

  Node value() {
    skip();
    if (i_ >= s_.size()) fail("missing value");
    const char c = s_[i_];
    Node n;
    if (c == '[') {
      ++i_;
      n.kind = Node::Kind::list;
      n.items = items(']');
      return n;
    }
    if (c == '(') {
      ++i_;
      n.kind = Node::Kind::tuple;
      n.items = items(')');
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
                                s_[i_] == '_' || s_[i_] == '-')) {
        ++i_;
      }
      n.text = std::string(s_.substr(start, i_ - start));
      if (eat('(')) {
        n.kind = Node::Kind::call;
        n.items = items(')');
      } else {
        n.kind = Node::Kind::word;
      }
      return n;
    }
    const std::size_t start = i_;
    if (c == '+') ++i_;
    const char* first = s_.data() + i_;
    const auto res = std::from_chars(first, s_.data() + s_.size(), n.number);
    if (res.ec != std::errc() || !std::isfinite(n.number)) fail("expected a number");
    i_ = static_cast<std::size_t>(res.ptr - s_.data());
    n.text = std::string(s_.substr(start, i_ - start));
    return n;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

double number(const Node& n) {
  if (n.kind != Node::Kind::number) throw ConfigError("expected a number");
  return n.number;
}

long integer(const Node& n) {
  const double v = number(n);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError("expected an integer");
  return static_cast<long>(v);
}

const std::vector<Node>& args(const Node& n, std::size_t count, const std::string& name) {
  if (n.items.size() != count) {
    throw ConfigError(name + " takes " + std::to_string(count) + " argument" +
                      (count == 1 ? "" : "s"));
  }
  return n.items;
}

std::vector<std::pair<double, double>> pairs(const Node& n) {
  if (n.kind != Node::Kind::list) throw ConfigError("expected a list [(x, y), ...]");
  std::vector<std::pair<double, double>> out;
  for (const Node& item : n.items) {
    if (item.kind != Node::Kind::tuple || item.items.size() != 2) {
      throw ConfigError("expected a pair (x, y)");
    }
    out.emplace_back(number(item.items[0]), number(item.items[1]));
  }
  return out;
}

std::vector<Generation> parse_generations(const Node& n) {
  std::vector<Generation> out;
  for (const auto& [len, b] : pairs(n)) {
    if (b != std::floor(b)) throw ConfigError("branching numbers must be integers");
    const Generation g{len, static_cast<int>(b)};
    if (!(g.length > 0.0)) {
      throw ConfigError("generation " + std::to_string(out.size() + 1) +
                        ": edge length must be positive");
    }
    if (g.branching < 2) {
      throw ConfigError("generation " + std::to_string(out.size() + 1) +
                        ": branching must be >= 2 (b(x) > 1 at every vertex other than the root)");
    }
    out.push_back(g);
  }
  return out;
}

TailRule parse_tail(const Node& n) {
  if (n.kind == Node::Kind::word && n.text == "none") return TailRule::none();
  if (n.kind != Node::Kind::call) throw ConfigError("expected a tail rule");
  if (n.text == "periodic") return TailRule::periodic(static_cast<int>(integer(args(n, 1, "periodic")[0])));
  if (n.text == "homogeneous") {
    const auto& a = args(n, 2, "homogeneous");
    const long b = integer(a[0]);
    if (b < 2) throw ConfigError("homogeneous tail: branching must be >= 2 (b(x) > 1)");
    return TailRule::homogeneous(static_cast<int>(b), number(a[1]));
  }
  if (n.text == "scaled") {
    const auto& a = args(n, 2, "scaled");
    return TailRule::scaled(static_cast<int>(integer(a[0])), number(a[1]));
  }
  throw ConfigError("unknown tail rule '" + n.text + "'");
}

HardyWeight parse_weight(const Node& n) {
  if (n.kind != Node::Kind::call) throw ConfigError("expected a weight");
  try {
    if (n.text == "power") {
      const auto& a = args(n, 2, "power");
      return HardyWeight::power(number(a[0]), number(a[1]));
    }
    if (n.text == "indicator") {
      const auto& a = args(n, 3, "indicator");
      return HardyWeight::indicator(number(a[0]), number(a[1]), number(a[2]));
    }
    if (n.text == "pwl") return HardyWeight::piecewise_linear(pairs(args(n, 1, "pwl")[0]));
    if (n.text == "constant") return HardyWeight::constant(number(args(n, 1, "constant")[0]));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown weight '" + n.text + "'");
}

FluxSpec parse_flux(const Node& n) {
  if (n.kind == Node::Kind::number) return FluxSpec::constant(n.number);
  if (n.kind != Node::Kind::call) throw ConfigError("expected a flux");
  try {
    if (n.text == "constant") return FluxSpec::constant(number(args(n, 1, "constant")[0]));
    if (n.text == "cosine") {
      const auto& a = args(n, 2, "cosine");
      return FluxSpec::cosine(number(a[0]), number(a[1]));
    }
    if (n.text == "sampled") {
      const Node& list = args(n, 1, "sampled")[0];
      if (list.kind != Node::Kind::list) throw ConfigError("sampled flux needs a list");
      std::vector<double> v;
      for (const Node& x : list.items) v.push_back(number(x));
      return FluxSpec::sampled(std::move(v));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown flux '" + n.text + "'");
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

template <class T>
T positive(T v, const char* what) {
  if (!(v > 0)) throw ConfigError(std::string(what) + " must be positive");
  return v;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

Node parse_value(std::string_view text) { return Parser(text).parse_all(); }

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"generations", [](RunConfig& c, std::string_view v) { c.generations = parse_generations(parse_value(v)); }},
      {"tail", [](RunConfig& c, std::string_view v) { c.tail = parse_tail(parse_value(v)); }},
      {"weight", [](RunConfig& c, std::string_view v) { c.weight = parse_weight(parse_value(v)); }},
      {"flux", [](RunConfig& c, std::string_view v) { c.flux = parse_flux(parse_value(v)); }},
      {"b", [](RunConfig& c, std::string_view v) {
         const long b = integer(parse_value(v));
         if (b < 2) throw ConfigError("b must be >= 2 (b(x) > 1)");
         c.b = static_cast<int>(b);
       }},
      {"horizon", [](RunConfig& c, std::string_view v) { c.horizon = static_cast<int>(positive(integer(parse_value(v)), "horizon")); }},
      {"depth", [](RunConfig& c, std::string_view v) { c.depth = static_cast<int>(positive(integer(parse_value(v)), "depth")); }},
      {"n_eigs", [](RunConfig& c, std::string_view v) { c.n_eigs = static_cast<int>(positive(integer(parse_value(v)), "n_eigs")); }},
      {"samples", [](RunConfig& c, std::string_view v) { c.samples = static_cast<int>(positive(integer(parse_value(v)), "samples")); }},
      {"alpha", [](RunConfig& c, std::string_view v) { c.alpha = number(parse_value(v)); }},
      {"T", [](RunConfig& c, std::string_view v) { c.T = positive(number(parse_value(v)), "T"); }},
      {"h", [](RunConfig& c, std::string_view v) { c.h = positive(number(parse_value(v)), "h"); }},
      {"tol", [](RunConfig& c, std::string_view v) { c.tol = positive(number(parse_value(v)), "tol"); }},
      {"margin", [](RunConfig& c, std::string_view v) { c.margin = positive(number(parse_value(v)), "margin"); }},
      {"min", [](RunConfig& c, std::string_view v) { c.min = number(parse_value(v)); }},
      {"max", [](RunConfig& c, std::string_view v) { c.max = number(parse_value(v)); }},
      {"step", [](RunConfig& c, std::string_view v) { c.step = positive(number(parse_value(v)), "step"); }},
      {"seed", [](RunConfig& c, std::string_view v) {
         const std::string s = trim(v);
         std::uint64_t x = 0;
         const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
         if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
           throw ConfigError("seed must be a non-negative integer");
         }
         c.seed = x;
       }},
      {"out", [](RunConfig& c, std::string_view v) {
         std::string s = trim(v);
         if (s.empty()) throw ConfigError("out needs a path");
         c.out = std::move(s);
       }},
  };
  return table;
}

void validate(const RunConfig& cfg) {
  if (cfg.has_tree()) {
    try {
      (void)cfg.tree();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("tree: ") + e.what());
    }
  }
  if (cfg.min && cfg.max && *cfg.min > *cfg.max) throw ConfigError("min exceeds max");
}

}  // namespace

RegularTree RunConfig::tree() const {
  return RegularTree(generations.value_or(std::vector<Generation>{}),
                     tail.value_or(TailRule::none()));
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "generations", "tail", "weight", "flux", "b", "horizon", "depth", "n_eigs", "samples",
      "alpha", "T", "h", "tol", "margin", "min", "max", "step", "seed", "out"};
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  try {
    it->second(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(where + "duplicate key '" + key + "'");
    }
    seen.push_back(key);
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

std::string to_string(const FluxSpec& a) {
  if (!a.samples().empty()) {
    std::string s = "sampled([";
    for (std::size_t i = 0; i < a.samples().size(); ++i) {
      if (i) s += ", ";
      s += fmt_full(a.samples()[i]);
    }
    return s + "])";
  }
  if (a.amplitude() != 0.0) return "cosine(" + fmt_full(a.base()) + ", " + fmt_full(a.amplitude()) + ")";
  return "constant(" + fmt_full(a.base()) + ")";
}

std::string to_text(const RunConfig& cfg) {
  std::string s;
  auto line = [&](const char* key, const std::string& v) { s += std::string(key) + " = " + v + "\n"; };
  if (cfg.generations) {
    std::string v = "[";
    for (std::size_t i = 0; i < cfg.generations->size(); ++i) {
      const Generation& g = (*cfg.generations)[i];
      if (i) v += ", ";
      v += "(" + fmt_full(g.length) + ", " + std::to_string(g.branching) + ")";
    }
    line("generations", v + "]");
  }
  if (cfg.tail) line("tail", to_string(*cfg.tail));
  if (cfg.weight) line("weight", to_string(*cfg.weight));
  if (cfg.flux) line("flux", to_string(*cfg.flux));
  auto num = [&](const char* key, const auto& v) {
    if (v) line(key, fmt_full(static_cast<double>(*v)));
  };
  num("b", cfg.b);
  num("horizon", cfg.horizon);
  num("depth", cfg.depth);
  num("n_eigs", cfg.n_eigs);
  num("samples", cfg.samples);
  num("alpha", cfg.alpha);
  num("T", cfg.T);
  num("h", cfg.h);
  num("tol", cfg.tol);
  num("margin", cfg.margin);
  num("min", cfg.min);
  num("max", cfg.max);
  num("step", cfg.step);
  if (cfg.seed) line("seed", std::to_string(*cfg.seed));
  if (cfg.out) line("out", *cfg.out);
  return s;
}

}  // namespace hardy
