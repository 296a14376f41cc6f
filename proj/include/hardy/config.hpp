#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/ab_loop.hpp"
#include "hardy/certified.hpp"
#include "hardy/tree_model.hpp"
#include "hardy/weights.hpp"

namespace hardy {

/// Malformed configuration text or an invalid value; the message names the
/// line (when parsing a file) and the key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Run configuration.  Text form: one `key = value` per line, `#` starts a
/// comment.  Values use a small call/list syntax:
///
///   generations = [(1.0, 2), (0.5, 3)]
///   tail        = none | periodic(P) | homogeneous(b, length) | scaled(P, r)
///   weight      = power(c, p) | indicator(c, a, b) | pwl([(t, v), ...]) | constant(c)
///   flux        = constant(alpha) | cosine(alpha, amplitude) | sampled([a0, a1, ...])
///
/// and plain numbers or bare words for the scalar keys.  Unset keys keep the
/// command defaults.
struct RunConfig {
  std::optional<std::vector<Generation>> generations;
  std::optional<TailRule> tail;
  std::optional<HardyWeight> weight;
  std::optional<FluxSpec> flux;

  std::optional<int> b;
  std::optional<int> horizon;
  std::optional<int> depth;
  std::optional<int> n_eigs;
  std::optional<int> samples;
  std::optional<double> alpha;
  std::optional<double> T;
  std::optional<double> h;
  std::optional<double> tol;
  std::optional<double> margin;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  bool has_tree() const { return generations.has_value() || tail.has_value(); }
  /// The tree described by `generations` and `tail` (either may be absent).
  RegularTree tree() const;

  bool operator==(const RunConfig&) const = default;
};

inline constexpr double kDefaultTreeT = 40.0;
inline constexpr double kDefaultLoopT = 200.0;
inline constexpr double kDefaultH = 1e-2;
inline constexpr double kDefaultTol = 1e-8;

/// Keys accepted by parse_config, in serialization order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(std::string_view text);

/// Parses `value` for `key` and stores it; ConfigError on unknown keys or
/// invalid values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Text that parse_config maps back to an identical RunConfig.
std::string to_text(const RunConfig& cfg);

std::string to_string(const FluxSpec& a);

}  // namespace hardy
