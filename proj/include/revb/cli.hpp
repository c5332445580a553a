#pragma once

// Command implementations behind tools/revb. Argument parsing lives in the
// tool; everything here works on a resolved RunConfig and writes to a stream,
// so it can be driven from tests.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "beam_state.hpp"
#include "observables.hpp"
#include "operators.hpp"
#include "series_solver.hpp"
#include "special_functions.hpp"

namespace revb::cli {

inline constexpr std::string_view kToolName = "revb";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kBadInput = 2, kIoError = 3 };

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { state, observables, verify, series_check, zeros };
enum class Format { csv, json };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::state:
      return "state";
    case Command::observables:
      return "observables";
    case Command::verify:
      return "verify";
    case Command::series_check:
      return "series-check";
    default:
      return "zeros";
  }
}

inline Command parse_command(std::string_view s) {
  if (s == "state") return Command::state;
  if (s == "observables") return Command::observables;
  if (s == "verify") return Command::verify;
  if (s == "series-check") return Command::series_check;
  if (s == "zeros") return Command::zeros;
  throw std::invalid_argument("unknown command '" + std::string(s) + "'");
}

inline std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected csv or json)");
}

struct NRange {
  int first = 0;
  int last = 0;
};

namespace detail {

inline int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw std::invalid_argument("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

inline double parse_real(std::string_view s, std::string_view what) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw std::invalid_argument("bad number for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

/// "A..B" with A <= B, or a single integer.
inline NRange parse_n_range(std::string_view s) {
  const auto dots = s.find("..");
  if (dots == std::string_view::npos) {
    const int v = detail::parse_int(s, "n-range");
    return {v, v};
  }
  NRange r{detail::parse_int(s.substr(0, dots), "n-range"), detail::parse_int(s.substr(dots + 2), "n-range")};
  if (r.first > r.last) throw std::invalid_argument("n-range: first must not exceed last");
  return r;
}

struct CutoffSpec {
  CutoffRule rule = CutoffRule::first_zero_jn;
  double radius = 0;
};

/// jn | jn1 | radius=R
inline CutoffSpec parse_cutoff(std::string_view s) {
  if (s == "jn") return {CutoffRule::first_zero_jn, 0};
  if (s == "jn1") return {CutoffRule::first_zero_jn1, 0};
  if (s.starts_with("radius=")) {
    const double r = detail::parse_real(s.substr(7), "cutoff radius");
    if (!(r > 0.0)) throw std::invalid_argument("cutoff radius must be > 0");
    return {CutoffRule::explicit_radius, r};
  }
  throw std::invalid_argument("unknown cutoff '" + std::string(s) + "' (expected jn, jn1 or radius=R)");
}

/// Shortest-exact-enough text for a double: 17 significant digits, '.' decimal, no locale.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_real: to_chars failed");
  return {buf, p};
}

struct RunConfig {
  Command command = Command::verify;
  int n = 1;
  std::optional<NRange> n_range;
  double kappa = 1.0;
  double k_z = 2.0;
  Branch branch = Branch::plus;
  double mass = 1.0;
  double length = 1.0;
  CutoffSpec cutoff;
  int grid = 4096;
  int levels = 3;
  double tol = 1e-12;
  Format format = Format::csv;
  std::string out;  // empty: stdout
  int threads = 1;
  int angles = 16;
  int series_terms = 80;
  double energy_offset = 0.0;  // added to E in the H check; a negative control
  std::string coefficients_out;

  void validate() const {
    QuantumNumbers{n, kappa, k_z, branch}.validate();
    Units{mass}.validate();
    if (n_range) {
      QuantumNumbers{n_range->first, kappa, k_z, branch}.validate();
      QuantumNumbers{n_range->last, kappa, k_z, branch}.validate();
    }
    if (!(length > 0.0)) throw std::invalid_argument("D must be > 0");
    if (grid < kMinGridCount) throw std::invalid_argument("grid must be >= 32");
    if (levels < 2) throw std::invalid_argument("levels must be >= 2");
    if (command == Command::verify && (grid >> (levels - 1)) < kMinGridCount) {
      throw std::invalid_argument("grid / 2^(levels-1) must stay >= 32");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (angles < 1) throw std::invalid_argument("angles must be >= 1");
    if (series_terms < 2) throw std::invalid_argument("series terms must be >= 2");
    if (!std::isfinite(energy_offset)) throw std::invalid_argument("energy offset must be finite");
  }

  /// The n values a batch command iterates over; `fallback` when neither flag was given.
  [[nodiscard]] std::vector<int> n_values(std::optional<NRange> fallback = std::nullopt, bool n_given = true) const {
    NRange r{n, n};
    if (n_range) {
      r = *n_range;
    } else if (!n_given && fallback) {
      r = *fallback;
    }
    std::vector<int> out;
    for (int v = r.first; v <= r.last; ++v) out.push_back(v);
    return out;
  }

  /// Resolved settings echoed into every output header. Thread count is left
  /// out so files do not depend on it.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const {
    std::string cut(to_string(cutoff.rule));
    if (cutoff.rule == CutoffRule::explicit_radius) cut += "=" + format_real(cutoff.radius);
    std::vector<std::pair<std::string, std::string>> e{
        {"command", std::string(to_string(command))},
        {"n", std::to_string(n)},
        {"n-range", n_range ? std::to_string(n_range->first) + ".." + std::to_string(n_range->last) : ""},
        {"kappa", format_real(kappa)},
        {"kz", format_real(k_z)},
        {"branch", std::string(to_string(branch))},
        {"mass", format_real(mass)},
        {"D", format_real(length)},
        {"cutoff", cut},
        {"grid", std::to_string(grid)},
        {"levels", std::to_string(levels)},
        {"tol", format_real(tol)},
        {"format", std::string(to_string(format))},
        {"angles", std::to_string(angles)},
        {"K", std::to_string(series_terms)},
        {"energy-offset", format_real(energy_offset)},
    };
    return e;
  }
};

// ---------------------------------------------------------------------------
// tables

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

inline nlohmann::ordered_json meta_json(const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["tool"] = std::string(kToolName);
  m["version"] = std::string(kToolVersion);
  m["units"] = "natural (hbar = c = 1); energies and momenta in the same unit as mass";
  nlohmann::ordered_json c;
  for (const auto& [k, v] : cfg.echo()) c[k] = v;
  m["config"] = c;
  return m;
}

inline void write_csv_header(std::ostream& os, const RunConfig& cfg) {
  os << "# " << kToolName << ' ' << kToolVersion << '\n';
  os << "# units: natural (hbar = c = 1); energies and momenta in the same unit as mass\n";
  for (const auto& [k, v] : cfg.echo()) os << "# " << k << " = " << v << '\n';
}

inline void write_table(std::ostream& os, const RunConfig& cfg, const Table& t, std::string_view json_key = "rows") {
  if (cfg.format == Format::csv) {
    write_csv_header(os, cfg);
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["meta"] = meta_json(cfg);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  doc[std::string(json_key)] = std::move(rows);
  os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// helpers

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// written by exactly one worker, so the result does not depend on the
/// schedule.
template <typename T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](int worker, int stride) {
    for (int i = worker; i < count; i += stride) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Opens cfg.out (or hands back stdout) and maps failures to io_error.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw io_error("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw io_error("write failed for '" + (path.empty() ? std::string("<stdout>") : path) + "'");
  }

 private:
  std::ofstream file_;
};

inline QuadratureConfig quadrature_from(const RunConfig& cfg) {
  QuadratureConfig q;
  q.abs_tol = cfg.tol;
  return q;
}

inline ObservableConfig observable_config_from(const RunConfig& cfg) {
  ObservableConfig oc;
  oc.units.mass = cfg.mass;
  oc.length = cfg.length;
  oc.cutoff = cfg.cutoff.rule;
  oc.explicit_radius = cfg.cutoff.radius;
  oc.quadrature = quadrature_from(cfg);
  return oc;
}

/// Portable uniform double in [0, 1) from a 64-bit engine (std distributions
/// are implementation defined).
inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// commands

inline int cmd_state(const RunConfig& cfg, std::ostream& os) {
  const QuantumNumbers qn{cfg.n, cfg.kappa, cfg.k_z, cfg.branch};
  const auto oc = observable_config_from(cfg);
  const BeamGeometry geom = make_geometry(qn, cfg.length, oc.cutoff, oc.explicit_radius);
  const BeamState st = make_normalized_state(qn, oc.units, geom, oc.quadrature);
  const RadialGrid grid(geom.r1, cfg.grid, SpacingRule::uniform_offset);
  Table t;
  t.columns = {"r", "theta", "z"};
  for (int s = 1; s <= 4; ++s) {
    t.columns.push_back("Re_psi" + std::to_string(s));
    t.columns.push_back("Im_psi" + std::to_string(s));
  }
  t.columns.push_back("density");
  for (const double r : grid.nodes()) {
    for (int j = 0; j < cfg.angles; ++j) {
      const CylindricalPoint p{r, 2.0 * std::numbers::pi * j / cfg.angles, 0.0};
      const Spinor psi = st.evaluate(p);
      std::vector<Cell> row{p.r, p.theta, p.z};
      double density = 0;
      for (const auto& v : psi) {
        row.emplace_back(v.real());
        row.emplace_back(v.imag());
        density += std::norm(v);
      }
      row.emplace_back(density);
      t.rows.push_back(std::move(row));
    }
  }
  write_table(os, cfg, t);
  return kOk;
}

inline Table observables_table(const std::vector<ObservableReport>& reports) {
  Table t;
  t.columns = {"n",      "kappa", "k_z", "branch", "I1",   "delta_n",     "Lz",
               "Sz",     "Re_hel", "Im_hel", "norm", "cutoff_rule", "r1"};
  for (const auto& r : reports) {
    t.rows.push_back({static_cast<long long>(r.qn.n), r.qn.kappa, r.qn.k_z, std::string(to_string(r.qn.branch)), r.i1,
                      r.delta_n, r.exp_lz, r.exp_sz, r.helicity.closed_form.real(), r.helicity.closed_form.imag(),
                      r.norm_check, std::string(to_string(r.geometry.cutoff_rule)), r.geometry.r1});
  }
  return t;
}

inline int cmd_observables(const RunConfig& cfg, std::ostream& os) {
  const auto ns = cfg.n_values();
  const auto oc = observable_config_from(cfg);
  const auto reports = parallel_map<ObservableReport>(static_cast<int>(ns.size()), cfg.threads, [&](int i) {
    return make_observable_report({ns[i], cfg.kappa, cfg.k_z, cfg.branch}, oc);
  });
  write_table(os, cfg, observables_table(reports));
  return kOk;
}

inline int cmd_zeros(const RunConfig& cfg, std::ostream& os, bool n_given) {
  const auto orders = cfg.n_values(NRange{0, 5}, n_given);
  Table t;
  t.columns = {"order", "first_zero", "J_at_zero"};
  for (const int k : orders) {
    if (k < 0) throw std::invalid_argument("zeros: orders must be >= 0");
    const double z = first_positive_zero(k);
    t.rows.push_back({static_cast<long long>(k), z, bessel_j(k, z)});
  }
  write_table(os, cfg, t);
  return kOk;
}

struct SeriesRow {
  int n = 0;
  BesselIdentification identification;
  double resubstitution = 0;
  int parity = 0;
  double lambda_ratio = 0;
  double closed_form = std::numeric_limits<double>::quiet_NaN();
  RadialSeries series;
};

inline int cmd_series_check(const RunConfig& cfg, std::ostream& os, bool n_given) {
  const auto ns = cfg.n_values(NRange{0, 5}, n_given);
  const Units units{cfg.mass};
  const auto rows = parallel_map<SeriesRow>(static_cast<int>(ns.size()), cfg.threads, [&](int i) {
    SeriesRow r;
    r.n = ns[i];
    const auto kin = derive_kinematics({r.n, cfg.kappa, cfg.k_z, cfg.branch}, units);
    r.series = run_recurrence(r.n, kin, kin.lambda_param, cfg.series_terms,
                              bessel_matched_seed(r.n, kin, kin.lambda_param));
    r.identification = verify_bessel_identification(r.n, kin, cfg.series_terms);
    r.resubstitution = resubstitution_residual(r.series);
    r.parity = parity_violations(r.series);
    r.lambda_ratio = lambda_ratio_deviation(r.series);
    if (r.n >= 0) r.closed_form = closed_form_vs_recurrence(r.n, kin, std::min(15, (cfg.series_terms - 1) / 2));
    return r;
  });
  Table t;
  t.columns = {"n", "K", "max_rel_error", "certified_kappa_r", "resubstitution", "parity_violations",
               "lambda_ratio_dev", "closed_form_vs_recurrence"};
  for (const auto& r : rows) {
    t.rows.push_back({static_cast<long long>(r.n), static_cast<long long>(cfg.series_terms),
                      r.identification.max_relative_error, r.identification.certified_kappa_r, r.resubstitution,
                      static_cast<long long>(r.parity), r.lambda_ratio, r.closed_form});
  }
  write_table(os, cfg, t);
  if (!cfg.coefficients_out.empty()) {
    OutputSink sink(cfg.coefficients_out);
    auto& cs = sink.stream();
    write_csv_header(cs, cfg);
    for (const auto& r : rows) {
      cs << "# n = " << r.n << ", alpha = " << r.series.alpha << '\n';
      cs << "s,k,Re C,Im C\n";
      for (int s = 0; s < 4; ++s) {
        for (int k = 0; k <= r.series.max_index(); ++k) {
          const auto c = r.series.coefficients[s][k];
          cs << (s + 1) << ',' << k << ',' << format_real(static_cast<double>(c.real())) << ','
             << format_real(static_cast<double>(c.imag())) << '\n';
        }
      }
    }
    sink.finish(cfg.coefficients_out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool below = true;  // pass when value < threshold (else value > threshold)
  bool asserted = true;

  [[nodiscard]] bool pass() const { return below ? value < threshold : value > threshold; }
};

inline nlohmann::ordered_json report_json(const ResidualReport& r) {
  nlohmann::ordered_json j;
  j["operator"] = r.operator_id;
  if (!r.convention.empty()) j["convention"] = r.convention;
  j["eigenvalue"] = {r.eigenvalue.real(), r.eigenvalue.imag()};
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : r.levels) levels.push_back({{"count", l.count}, {"h", l.h}, {"residual", l.residual}});
  j["levels"] = levels;
  auto orders = nlohmann::ordered_json::array();
  for (const double p : r.pairwise_orders) orders.push_back(std::isfinite(p) ? nlohmann::ordered_json(p) : nullptr);
  j["pairwise_orders"] = orders;
  j["order"] = std::isfinite(r.order) ? nlohmann::ordered_json(r.order) : nullptr;
  j["at_rounding_floor"] = r.at_rounding_floor;
  return j;
}

struct VerifyResult {
  std::vector<Check> checks;
  std::vector<ResidualReport> reports;
  std::string passing_k_convention;  // empty when none passed
  nlohmann::ordered_json fidelity;

  [[nodiscard]] bool pass() const {
    for (const auto& c : checks)
      if (c.asserted && !c.pass()) return false;
    return true;
  }
};

/// Grid ladder grid / 2^(levels-1), ..., grid.
inline std::vector<int> ladder(int finest, int levels) {
  std::vector<int> c;
  for (int l = levels - 1; l >= 0; --l) c.push_back(finest >> l);
  return c;
}

inline VerifyResult run_verify(const RunConfig& cfg) {
  const QuantumNumbers qn{cfg.n, cfg.kappa, cfg.k_z, cfg.branch};
  const auto oc = observable_config_from(cfg);
  const BeamGeometry geom = make_geometry(qn, cfg.length, oc.cutoff, oc.explicit_radius);
  const BeamState st = make_normalized_state(qn, oc.units, geom, oc.quadrature);
  const auto& kin = st.kinematics();
  const double r1 = geom.r1;
  const auto fine = ladder(cfg.grid, cfg.levels);
  // order estimates use a coarse ladder so that the residuals sit above rounding
  const auto coarse = ladder(64 << (cfg.levels - 1), cfg.levels);
  VerifyResult v;
  auto add_order_check = [&](const ResidualReport& r, const std::string& name) {
    v.checks.push_back({name, std::isfinite(r.order) ? r.order : 0.0, 3.5, false, true});
  };

  const ResidualReport h = residual_report(ops::hamiltonian(cfg.mass), st, kin.energy + cfg.energy_offset, fine, r1);
  v.reports.push_back(h);
  v.checks.push_back({"H eigenvalue E", h.finest_residual(), 1e-7});
  const ResidualReport hc = residual_report(ops::hamiltonian(cfg.mass), st, kin.energy + cfg.energy_offset, coarse, r1);
  v.reports.push_back(hc);
  add_order_check(hc, "H convergence order");

  const ResidualReport jz = residual_report(ops::total_angular_momentum_z(), st, qn.n + 0.5, fine, r1);
  v.reports.push_back(jz);
  v.checks.push_back({"J_z eigenvalue n+1/2", jz.finest_residual(), 1e-12});
  const ResidualReport pz = residual_report(ops::momentum_z(), st, qn.k_z, fine, r1);
  v.reports.push_back(pz);
  v.checks.push_back({"p_z eigenvalue k_z", pz.finest_residual(), 1e-12});

  const double k_eig = sign_of(qn.branch) * qn.kappa;
  nlohmann::ordered_json conventions;
  std::optional<KConvention> passing;
  double best_k = std::numeric_limits<double>::infinity();
  for (const auto conv : kAllKConventions) {
    const auto op = ops::k_operator(conv);
    const std::string name(to_string(conv));
    double res = 0;
    if (is_mode_preserving(op)) {
      const ResidualReport k = residual_report(op, st, k_eig, fine, r1, SpacingRule::uniform_offset, 1, name);
      v.reports.push_back(k);
      res = k.finest_residual();
      conventions[name] = {{"engine", "mode"}, {"residual", res}};
    } else {
      const auto pf = sample_polar(st, make_grid(r1, 512), 128);
      res = relative_residual(apply(op, pf), pf, k_eig);
      conventions[name] = {{"engine", "polar"}, {"residual", res}, {"mode_preserving", false}};
    }
    conventions[name]["pass"] = res < 1e-7;
    if (res < 1e-7 && res < best_k) {
      best_k = res;
      passing = conv;
    }
  }
  v.checks.push_back({"K eigenvalue branch*kappa (best convention)", best_k, 1e-7});
  if (passing) {
    v.passing_k_convention = std::string(to_string(*passing));
    const auto kop = ops::k_operator(*passing);
    const ResidualReport kc = residual_report(kop, st, k_eig, coarse, r1, SpacingRule::uniform_offset, 1,
                                              v.passing_k_convention);
    v.reports.push_back(kc);
    add_order_check(kc, "K convergence order");
    const ResidualReport k2 = residual_report(kop, st, qn.kappa * qn.kappa, fine, r1, SpacingRule::uniform_offset, 2,
                                              v.passing_k_convention);
    v.reports.push_back(k2);
    v.checks.push_back({"K^2 eigenvalue kappa^2", k2.finest_residual(), 1e-6});
    const ModeField f = sample(st, make_grid(r1, cfg.grid));
    v.checks.push_back({"[K,H]", commutator_residual(kop, ops::hamiltonian(cfg.mass), f), 1e-6});
    v.checks.push_back({"[K,J_z]", commutator_residual(kop, ops::total_angular_momentum_z(), f), 1e-6});
  }
  conventions["passing"] = passing ? nlohmann::ordered_json(v.passing_k_convention) : nullptr;

  const ModeField f = sample(st, make_grid(r1, cfg.grid));
  v.checks.push_back({"[J_z,H]", commutator_residual(ops::total_angular_momentum_z(), ops::hamiltonian(cfg.mass), f), 1e-6});
  v.checks.push_back({"[p_z,H]", commutator_residual(ops::momentum_z(), ops::hamiltonian(cfg.mass), f), 1e-6});

  const ModeField hel = apply(ops::helicity(), f);
  const cplx hel_fit = best_fit_eigenvalue(hel, f);
  v.checks.push_back({"helicity non-eigenstate witness", relative_residual(hel, f, hel_fit), 1e-2, false});
  const ModeField lz = apply(ops::orbital_z(), f);
  v.checks.push_back({"L_z non-eigenstate witness", relative_residual(lz, f, best_fit_eigenvalue(lz, f)), 0.1, false});

  // cylindrical vs Cartesian on 1000 points inside the cutoff, off the axis
  std::mt19937_64 gen(20240611);
  double worst_h = 0;
  double worst_hel = 0;
  double scale = 0;
  const PointwiseConfig pw{1e-3};
  for (int i = 0; i < 1000; ++i) {
    const CylindricalPoint p{r1 * (0.02 + 0.96 * unit_uniform(gen)), 2.0 * std::numbers::pi * unit_uniform(gen),
                             cfg.length * (unit_uniform(gen) - 0.5)};
    const Spinor a = apply_cylindrical_at(ops::hamiltonian(cfg.mass), st, p, pw);
    const Spinor b = apply_cartesian_at(ops::hamiltonian(cfg.mass), st, p, pw);
    const Spinor c = apply_cylindrical_at(ops::helicity(), st, p, pw);
    const Spinor d = apply_cartesian_at(ops::helicity(), st, p, pw);
    for (int s = 0; s < 4; ++s) {
      worst_h = std::max(worst_h, std::abs(a[s] - b[s]));
      worst_hel = std::max(worst_hel, std::abs(c[s] - d[s]));
      scale = std::max(scale, std::abs(a[s]));
    }
  }
  v.checks.push_back({"H cylindrical vs Cartesian", worst_h / scale, 1e-6});
  v.checks.push_back({"helicity cylindrical vs Cartesian", worst_hel / scale, 1e-6});

  // fidelity: the transcribed component rows and the alternative branch-minus layout
  const auto rows = transcribed_row_defects(st, kin.energy, kin.mass, CylindricalPoint{0.4 * r1, 0.7, 0.1});
  nlohmann::ordered_json fid;
  fid["transcribed_row_defects"] = {rows[0], rows[1], rows[2], rows[3]};
  const auto alt = alternative_branch_minus_profile(qn, kin, st.normalization());
  const ModeField af = sample(alt, make_grid(r1, 1024));
  fid["alternative_branch_minus_H_residual"] = relative_residual(apply(ops::hamiltonian(cfg.mass), af), af, kin.energy);
  fid["helicity_best_fit"] = {hel_fit.real(), hel_fit.imag()};
  fid["k_conventions"] = conventions;
  v.fidelity = std::move(fid);
  return v;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& os, std::ostream& log) {
  const VerifyResult v = run_verify(cfg);
  if (cfg.format == Format::csv) {
    Table t;
    t.columns = {"check", "value", "threshold", "comparison", "asserted", "pass"};
    for (const auto& c : v.checks) {
      t.rows.push_back({c.name, c.value, c.threshold, std::string(c.below ? "<" : ">"),
                        std::string(c.asserted ? "yes" : "no"), std::string(c.pass() ? "yes" : "no")});
    }
    write_table(os, cfg, t);
  } else {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["meta"] = meta_json(cfg);
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : v.checks) {
      checks.push_back({{"name", c.name},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"comparison", c.below ? "<" : ">"},
                        {"asserted", c.asserted},
                        {"pass", c.pass()}});
    }
    doc["checks"] = checks;
    auto reports = nlohmann::ordered_json::array();
    for (const auto& r : v.reports) reports.push_back(report_json(r));
    doc["residual_reports"] = reports;
    doc["passing_k_convention"] = v.passing_k_convention.empty() ? nlohmann::ordered_json(nullptr)
                                                                 : nlohmann::ordered_json(v.passing_k_convention);
    doc["fidelity"] = v.fidelity;
    doc["pass"] = v.pass();
    os << doc.dump(2) << '\n';
  }
  for (const auto& c : v.checks) {
    if (c.asserted && !c.pass()) {
      log << "verify: FAILED " << c.name << " (value " << format_real(c.value) << (c.below ? " >= " : " <= ")
          << format_real(c.threshold) << ")\n";
    }
  }
  return v.pass() ? kOk : kInvariantFailure;
}

/// Dispatches cfg.command; maps exceptions to exit codes. `n_given` tells
/// batch commands whether --n was set explicitly.
inline int run(const RunConfig& cfg, std::ostream& log, bool n_given = true) {
  try {
    cfg.validate();
    int code = kOk;
    std::ostringstream buffer;
    switch (cfg.command) {
      case Command::state:
        code = cmd_state(cfg, buffer);
        break;
      case Command::observables:
        code = cmd_observables(cfg, buffer);
        break;
      case Command::verify:
        code = cmd_verify(cfg, buffer, log);
        break;
      case Command::series_check:
        code = cmd_series_check(cfg, buffer, n_given);
        break;
      case Command::zeros:
        code = cmd_zeros(cfg, buffer, n_given);
        break;
    }
    OutputSink sink(cfg.out);
    sink.stream() << buffer.str();
    sink.finish(cfg.out);
    return code;
  } catch (const io_error& e) {
    log << kToolName << ": I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    log << kToolName << ": bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::domain_error& e) {
    log << kToolName << ": bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    log << kToolName << ": numerical failure: " << e.what() << '\n';
    return kInvariantFailure;
  }
}

}  // namespace revb::cli
