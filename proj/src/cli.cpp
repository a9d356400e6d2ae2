#include "krlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <regex>
#include <thread>

#include <json.hpp>

#include "krlab/closedform.hpp"
#include "krlab/errors.hpp"
#include "krlab/kacrice.hpp"
#include "krlab/montecarlo.hpp"
#include "krlab/selftest.hpp"

namespace krlab {

using nlohmann::json;

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw DomainError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw DomainError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string point_text(std::span<const cplx> z) {
  std::string s;
  for (std::size_t q = 0; q < z.size(); ++q) {
    if (q) s += ';';
    s += format_complex(z[q]);
  }
  return s;
}

// Writes to config.output when set, else to the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// Runs body(i) for i in [0, n) across workers; returns the index and message
// of the first failing item, if any.
struct ItemError {
  std::size_t index = 0;
  std::string message;
};

std::optional<ItemError> parallel_for(std::size_t n, unsigned workers,
                                      const std::function<void(std::size_t)>& body) {
  std::vector<std::optional<std::string>> errors(n);
  auto work = [&](unsigned w, unsigned stride) {
    for (std::size_t i = w; i < n; i += stride) {
      try {
        body(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) return ItemError{i, *errors[i]};
  return std::nullopt;
}

EnsembleSpec spec_of(const RunConfig& config, int N) {
  EnsembleSpec spec{config.m, N, config.field, config.mode};
  spec.validate();
  return spec;
}

void require_points(const std::vector<std::vector<cplx>>& points, int m) {
  if (points.empty()) throw DomainError("no evaluation points given (--z or --grid)");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != m)
      throw DomainError("point '" + point_text(p) + "' does not have m = " + std::to_string(m) +
                        " coordinates");
}

std::vector<std::string> coordinate_headers(int m) {
  std::vector<std::string> h;
  for (int q = 1; q <= m; ++q) {
    const std::string suffix = q == 1 ? "" : std::to_string(q);
    h.push_back("re" + suffix);
    h.push_back("im" + suffix);
  }
  return h;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
  os << '\n';
}

json point_json(std::span<const cplx> z) {
  json arr = json::array();
  for (const auto& c : z) arr.push_back({c.real(), c.imag()});
  return arr;
}

int report_error(std::ostream& err, const std::string& message) {
  err << "error: " << message << '\n';
  return 2;
}

}  // namespace

cplx parse_complex(std::string_view text) {
  static const std::regex grammar(
      R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$)");
  std::cmatch match;
  if (!std::regex_match(text.begin(), text.end(), match, grammar))
    throw DomainError("malformed complex literal '" + std::string(text) +
                      "' (expected a+bi, no whitespace)");
  std::string re = match[1].str();
  if (!re.empty() && re[0] == '+') re.erase(0, 1);
  const double real = parse_double(re, "real part");
  const double imag = parse_double(match[3].str(), "imaginary part");
  return {real, match[2].str() == "-" ? -imag : imag};
}

std::vector<cplx> parse_point(std::string_view text) {
  std::vector<cplx> out;
  for (auto part : split(text, ';')) out.push_back(parse_complex(part));
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx z) {
  char buf[64];
  auto shortest = [&](double x) {
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  const double im = z.imag();
  return shortest(z.real()) + (std::signbit(im) ? "-" : "+") + shortest(std::abs(im)) + "i";
}

std::vector<cplx> GridSpec::points() const {
  std::vector<cplx> out;
  auto at = [](double lo, double hi, int steps, int i) {
    return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  };
  for (int j = 0; j < im_steps; ++j)
    for (int i = 0; i < re_steps; ++i)
      out.emplace_back(at(re0, re1, re_steps, i), at(im0, im1, im_steps, j));
  return out;
}

GridSpec parse_grid(std::string_view text) {
  const auto axes = split(text, ',');
  if (axes.size() != 2) throw DomainError("grid must be re0:re1:steps,im0:im1:steps");
  GridSpec g;
  auto axis = [](std::string_view a, double& lo, double& hi, int& steps) {
    const auto f = split(a, ':');
    if (f.size() != 3) throw DomainError("grid axis must be lo:hi:steps, got '" + std::string(a) + "'");
    lo = parse_double(f[0], "grid bound");
    hi = parse_double(f[1], "grid bound");
    steps = parse_int(f[2], "grid steps");
    if (steps < 1) throw DomainError("grid steps must be >= 1");
  };
  axis(axes[0], g.re0, g.re1, g.re_steps);
  axis(axes[1], g.im0, g.im1, g.im_steps);
  return g;
}

std::vector<int> parse_n_list(std::string_view text) {
  std::vector<int> out;
  if (text.find(':') != std::string_view::npos) {
    const auto f = split(text, ':');
    if (f.size() != 3) throw DomainError("N range must be first:last:step");
    const int first = parse_int(f[0], "N");
    const int last = parse_int(f[1], "N");
    const int step = parse_int(f[2], "N step");
    if (step < 1 || last < first) throw DomainError("empty N range '" + std::string(text) + "'");
    for (int n = first; n <= last; n += step) out.push_back(n);
    return out;
  }
  for (auto part : split(text, ',')) out.push_back(parse_int(part, "N"));
  return out;
}

Field parse_field(std::string_view text) {
  if (text == "real") return Field::Real;
  if (text == "complex") return Field::Complex;
  throw DomainError("ensemble must be real or complex, got '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
  if (text == "crit") return Mode::Critical;
  if (text == "zeros") return Mode::Zeros;
  throw DomainError("mode must be crit or zeros, got '" + std::string(text) + "'");
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw DomainError("format must be csv or json, got '" + std::string(text) + "'");
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("KRLAB_SEED");
  if (env == nullptr) return fallback;
  std::uint64_t value = 0;
  const std::string_view s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return fallback;
  return value;
}

std::vector<std::vector<cplx>> config_points(const RunConfig& config) {
  auto pts = config.points;
  if (config.grid) {
    if (config.m != 1) throw DomainError("--grid is only available for m = 1");
    for (const auto& z : config.grid->points()) pts.push_back({z});
  }
  return pts;
}

int cmd_density(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto pts = config_points(config);
    require_points(pts, config.m);
    struct Row {
      std::size_t point;
      int N;
      double density = 0.0;
    };
    std::vector<Row> rows;
    for (std::size_t p = 0; p < pts.size(); ++p)
      for (int N : config.N_list) rows.push_back({p, N});
    for (int N : config.N_list) spec_of(config, N);

    const auto failure = parallel_for(rows.size(), config.workers, [&](std::size_t i) {
      rows[i].density = density(spec_of(config, rows[i].N), pts[rows[i].point]).density;
    });
    if (failure) {
      const auto& row = rows[failure->index];
      return report_error(err, failure->message + " at z = " + point_text(pts[row.point]) +
                                   ", N = " + std::to_string(row.N));
    }

    Sink sink(config.output, out);
    auto& os = sink.get();
    if (config.format == Format::Csv) {
      auto header = coordinate_headers(config.m);
      header.insert(header.end(), {"N", "mode", "ensemble", "density"});
      write_csv_row(os, header);
      for (const auto& row : rows) {
        std::vector<std::string> f;
        for (const auto& c : pts[row.point]) {
          f.push_back(format_double(c.real()));
          f.push_back(format_double(c.imag()));
        }
        f.insert(f.end(), {std::to_string(row.N), to_string(config.mode), to_string(config.field),
                           format_double(row.density)});
        write_csv_row(os, f);
      }
    } else {
      json arr = json::array();
      for (const auto& row : rows)
        arr.push_back({{"z", point_json(pts[row.point])},
                       {"N", row.N},
                       {"mode", to_string(config.mode)},
                       {"ensemble", to_string(config.field)},
                       {"density", row.density}});
      os << arr.dump(2) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e.what());
  }
}

int cmd_ratio_scan(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.y_steps < 1) throw DomainError("y-steps must be >= 1");
    struct Row {
      double y;
      int N;
      double ratio = 0.0;
    };
    std::vector<Row> rows;
    for (int N : config.N_list) {
      spec_of(config, N);
      for (int k = 1; k <= config.y_steps; ++k)
        rows.push_back({static_cast<double>(k) / config.y_steps, N});
    }
    const auto failure = parallel_for(rows.size(), config.workers, [&](std::size_t i) {
      std::vector<cplx> z(config.m, 0.0);
      z[0] = cplx(0.0, rows[i].y);
      rows[i].ratio = density_ratio(config.m, rows[i].N, config.mode, z);
    });
    if (failure) {
      const auto& row = rows[failure->index];
      return report_error(err, failure->message + " at y = " + format_double(row.y) +
                                   ", N = " + std::to_string(row.N));
    }

    Sink sink(config.output, out);
    auto& os = sink.get();
    if (config.format == Format::Csv) {
      write_csv_row(os, {"y", "N", "ratio"});
      for (const auto& row : rows)
        write_csv_row(os, {format_double(row.y), std::to_string(row.N), format_double(row.ratio)});
    } else {
      json arr = json::array();
      for (const auto& row : rows) arr.push_back({{"y", row.y}, {"N", row.N}, {"ratio", row.ratio}});
      os << arr.dump(2) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e.what());
  }
}

int cmd_decay(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::string where;
  try {
    const auto pts = config_points(config);
    require_points(pts, config.m);
    if (pts.size() != 1) throw DomainError("decay takes exactly one point");
    where = " at z = " + point_text(pts[0]);
    const DecayFit fit = decay_rate_fit(config.m, config.mode, pts[0], config.N_list);
    const double relative_gap =
        std::abs(fit.fitted_rate - fit.theoretical_rate) / fit.theoretical_rate;

    json report = {{"z", point_json(pts[0])},
                   {"m", config.m},
                   {"mode", to_string(config.mode)},
                   {"fitted_rate", fit.fitted_rate},
                   {"lambda_z", fit.theoretical_rate},
                   {"relative_gap", relative_gap},
                   {"n_points", fit.n_points},
                   {"residual", fit.residual}};

    Sink sink(config.output, out);
    auto& os = sink.get();
    if (config.format == Format::Csv) {
      write_csv_row(os, {"N", "diff", "log_abs_diff"});
      for (const auto& s : fit.samples)
        write_csv_row(os, {std::to_string(s.N), format_double(s.diff),
                           format_double(std::log(std::abs(s.diff)))});
      err << report.dump() << '\n';
    } else {
      json samples = json::array();
      for (const auto& s : fit.samples)
        samples.push_back({{"N", s.N}, {"diff", s.diff}, {"density_complex", s.density_complex}});
      report["samples"] = samples;
      os << report.dump(2) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e.what() + where);
  }
}

int cmd_mc(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.m != 1) throw DomainError("mc supports m = 1 only");
    if (config.N_list.size() != 1) throw DomainError("mc takes a single N");
    const int N = config.N_list.front();
    const EnsembleSpec spec = spec_of(config, N);

    HistogramWindow window;
    if (config.grid) {
      window.re_lo = config.grid->re0;
      window.re_hi = config.grid->re1;
      window.nx = config.grid->re_steps;
      window.im_lo = config.grid->im0;
      window.im_hi = config.grid->im1;
      window.ny = config.grid->im_steps;
    }
    const double band = config.field == Field::Real ? config.exclusion_band : 0.0;

    const SampleBatch batch = sample_critical_points(spec, config.samples, config.seed, config.workers);
    EmpiricalHistogram hist = make_histogram(window, band);
    accumulate(hist, batch);

    std::function<double(cplx)> rho;
    if (config.field == Field::Complex && config.mode == Mode::Critical)
      rho = [N](cplx z) { return su2_crit_density(N, z); };
    else if (config.field == Field::Complex)
      rho = [N](cplx z) { return su_zero_density(1, N, std::norm(z)); };
    else
      rho = [spec](cplx z) { return density(spec, std::span<const cplx>(&z, 1)).density; };
    fill_expected(hist, rho, 1e-4, config.workers);
    const HistogramComparison cmp = compare_histogram(hist);

    const int per_sample = config.mode == Mode::Critical ? N - 1 : N;
    json summary = {{"N", N},
                    {"mode", to_string(config.mode)},
                    {"ensemble", to_string(config.field)},
                    {"seed", config.seed},
                    {"samples_requested", batch.requested},
                    {"samples_accepted", batch.accepted.size()},
                    {"samples_failed", batch.failed.size()},
                    {"failure_rate", batch.failure_rate()},
                    {"points_per_sample", per_sample},
                    {"exclusion_band", band},
                    {"cells_used", cmp.cells_used},
                    {"cells_bad", cmp.cells_bad},
                    {"fraction_bad_cells", cmp.fraction_bad},
                    {"max_abs_z", cmp.max_abs_z}};

    const double n = static_cast<double>(hist.n_samples);
    Sink sink(config.output, out);
    auto& os = sink.get();
    if (config.format == Format::Csv) {
      write_csv_row(os, {"re_lo", "re_hi", "im_lo", "im_hi", "count", "expected", "z_score"});
      for (std::size_t i = 0; i < hist.cells.size(); ++i) {
        const auto& c = hist.cells[i];
        write_csv_row(os, {format_double(c.re_lo), format_double(c.re_hi), format_double(c.im_lo),
                           format_double(c.im_hi), std::to_string(c.count),
                           c.excluded ? "excluded" : format_double(n * c.expected),
                           c.excluded ? "excluded" : format_double(cmp.z_scores[i])});
      }
    } else {
      json cells = json::array();
      for (std::size_t i = 0; i < hist.cells.size(); ++i) {
        const auto& c = hist.cells[i];
        json cell = {{"re_lo", c.re_lo}, {"re_hi", c.re_hi}, {"im_lo", c.im_lo},
                     {"im_hi", c.im_hi}, {"count", c.count}, {"excluded", c.excluded}};
        cell["expected"] = c.excluded ? json(nullptr) : json(n * c.expected);
        cell["z_score"] = c.excluded ? json(nullptr) : json(cmp.z_scores[i]);
        cells.push_back(cell);
      }
      os << json{{"cells", cells}, {"summary", summary}}.dump(2) << '\n';
    }

    if (!config.summary_path.empty()) {
      std::ofstream f(config.summary_path);
      if (!f) throw DomainError("cannot open summary file '" + config.summary_path + "'");
      f << summary.dump(2) << '\n';
    } else if (config.format == Format::Csv) {
      err << summary.dump() << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e.what());
  }
}

int cmd_closedform(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto pts = config_points(config);
    require_points(pts, config.m);
    Sink sink(config.output, out);
    auto& os = sink.get();
    const bool one_var = config.m == 1;

    auto header = coordinate_headers(config.m);
    header.push_back("N");
    if (one_var) header.insert(header.end(), {"su2_crit", "so2_crit", "so2_error"});
    header.push_back("su_zero");

    json arr = json::array();
    if (config.format == Format::Csv) write_csv_row(os, header);
    for (const auto& z : pts) {
      for (int N : config.N_list) {
        std::vector<std::string> f;
        for (const auto& c : z) {
          f.push_back(format_double(c.real()));
          f.push_back(format_double(c.imag()));
        }
        f.push_back(std::to_string(N));
        json obj = {{"z", point_json(z)}, {"N", N}};
        if (one_var) {
          const double cx = su2_crit_density(N, z[0]);
          f.push_back(format_double(cx));
          obj["su2_crit"] = cx;
          try {
            const double e = so2_crit_error(N, z[0]);
            f.push_back(format_double(cx + e));
            f.push_back(format_double(e));
            obj["so2_crit"] = cx + e;
            obj["so2_error"] = e;
          } catch (const DomainError&) {
            // Undefined on the real axis: left blank.
            f.insert(f.end(), {"", ""});
            obj["so2_crit"] = nullptr;
            obj["so2_error"] = nullptr;
          }
        }
        const double zero = su_zero_density(config.m, N, z);
        f.push_back(format_double(zero));
        obj["su_zero"] = zero;
        if (config.format == Format::Csv)
          write_csv_row(os, f);
        else
          arr.push_back(obj);
      }
    }
    if (config.format == Format::Json) os << arr.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e.what());
  }
}

int cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const SelftestReport report = run_selftest(static_cast<unsigned>(config.seed));
    Sink sink(config.output, out);
    auto& os = sink.get();
    if (config.format == Format::Csv) {
      write_csv_row(os, {"suite", "checks", "max_error", "tolerance", "status"});
      for (const auto& s : report.suites) {
        write_csv_row(os, {s.name, std::to_string(s.checks), format_double(s.max_error),
                           format_double(s.tolerance), s.passed ? "pass" : "FAIL"});
        if (!s.detail.empty()) err << s.name << ": " << s.detail << '\n';
      }
      os << (report.passed() ? "overall,pass" : "overall,FAIL") << '\n';
    } else {
      json suites = json::array();
      for (const auto& s : report.suites)
        suites.push_back({{"suite", s.name}, {"checks", s.checks}, {"max_error", s.max_error},
                          {"tolerance", s.tolerance}, {"passed", s.passed}, {"detail", s.detail}});
      os << json{{"suites", suites}, {"passed", report.passed()}}.dump(2) << '\n';
    }
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.command == "density") return cmd_density(config, out, err);
  if (config.command == "ratio-scan") return cmd_ratio_scan(config, out, err);
  if (config.command == "decay") return cmd_decay(config, out, err);
  if (config.command == "mc") return cmd_mc(config, out, err);
  if (config.command == "closedform") return cmd_closedform(config, out, err);
  if (config.command == "selftest") return cmd_selftest(config, out, err);
  return report_error(err, "unknown command '" + config.command + "'");
}

}  // namespace krlab
