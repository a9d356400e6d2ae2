#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krlab/ensemble.hpp"

namespace krlab {

/// "a+bi", "-1.5e-3-2i", "0.5+0i"; whitespace is rejected.
cplx parse_complex(std::string_view text);

/// Semicolon-joined complex literals, one per coordinate.
std::vector<cplx> parse_point(std::string_view text);

/// Shortest text that parses back to the same value.
std::string format_complex(cplx z);

/// %.17g
std::string format_double(double x);

struct GridSpec {
  double re0 = 0, re1 = 0;
  int re_steps = 1;
  double im0 = 0, im1 = 0;
  int im_steps = 1;

  /// Row-major (imaginary outer), endpoints included; a single step takes
  /// the lower endpoint.
  std::vector<cplx> points() const;
};

/// "re0:re1:steps,im0:im1:steps"
GridSpec parse_grid(std::string_view text);

/// "10,25,100"; "10:60:5" expands to an inclusive arithmetic range.
std::vector<int> parse_n_list(std::string_view text);

Field parse_field(std::string_view text);  // real | complex
Mode parse_mode(std::string_view text);    // crit | zeros

enum class Format { Csv, Json };
Format parse_format(std::string_view text);

struct RunConfig {
  std::string command;
  int m = 1;
  std::vector<int> N_list{10};
  Mode mode = Mode::Critical;
  Field field = Field::Complex;
  std::vector<std::vector<cplx>> points;
  std::optional<GridSpec> grid;
  std::uint64_t seed = 20240601;
  std::size_t samples = 10000;
  std::string output;   // empty: the stream passed to the command
  Format format = Format::Csv;
  unsigned workers = 1;
  int y_steps = 20;            // ratio-scan points y = k / y_steps
  double exclusion_band = 0.1;  // mc, real field only
  std::string summary_path;     // mc: JSON summary destination
};

/// Seed from KRLAB_SEED when set and parseable, else `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

/// Every (point) the density-type commands iterate over: explicit points
/// first, then the grid (m = 1).
std::vector<std::vector<cplx>> config_points(const RunConfig& config);

/// Command entry points. Each writes its table to `out` (or config.output)
/// and returns the process exit code: 0 ok, 1 selftest failure, 2 domain
/// error (reported on `err`, naming the offending point).
int cmd_density(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_ratio_scan(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_decay(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_mc(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_closedform(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatch on config.command.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace krlab
