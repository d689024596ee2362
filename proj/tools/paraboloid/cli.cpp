#include "paraboloid/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "CLI11.hpp"
#include "json.hpp"
#include "paraboloid/arcs.hpp"
#include "paraboloid/coefficients.hpp"
#include "paraboloid/cutoff_kernel.hpp"
#include "paraboloid/errors.hpp"
#include "paraboloid/exp_sums.hpp"
#include "paraboloid/experiments.hpp"
#include "paraboloid/lattice.hpp"
#include "paraboloid/numtheory.hpp"
#include "paraboloid/parallel.hpp"
#include "paraboloid/plot.hpp"
#include "paraboloid/report.hpp"
#include "paraboloid/rng.hpp"

namespace paraboloid::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::int64_t v) { return std::to_string(v); }

// Matches the %g keys of divisor_level_report.
std::string key_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string join_point(const LatticePoint& r) {
  std::string s;
  for (std::size_t i = 0; i < r.dim(); ++i) s += (i ? ";" : "") + std::to_string(r[i]);
  return s;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const {
    std::ostringstream os;
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

struct Outcome {
  std::vector<ExperimentReport> reports;
  Table table;
  // Additional CSV files: suffix appended to "<experiment>_", and contents.
  std::vector<std::pair<std::string, std::string>> extra;
};

OperatorParams make_params(const RunConfig& c, std::int64_t N) {
  return c.cutoff == "sharp" ? OperatorParams::sharp(c.n, N) : OperatorParams::smooth(c.n, N);
}

double max_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

Outcome gauss_check(const RunConfig& c) {
  Outcome o;
  o.table.header = {"N", "samples", "max_ratio", "argmax_q", "argmax_a", "argmax_offset", "argmax_y", "arcs"};
  std::vector<double> constants;
  for (const auto N : c.Ns) {
    auto r = gauss_bound_report(make_params(c, N), c.samples, c.seed);
    o.table.add({num(N), num(r.samples), num(r.value_of("max_ratio")), num(r.value_of("argmax_q")),
                 num(r.value_of("argmax_a")), num(r.value_of("argmax_offset")), num(r.value_of("argmax_y")),
                 num(r.value_of("arcs"))});
    constants.push_back(r.constant);
    o.reports.push_back(std::move(r));
  }
  ExperimentReport s;
  s.name = "gauss_uniformity";
  s.constant = max_spread(constants);
  s.value("min_constant", *std::min_element(constants.begin(), constants.end()))
      .value("max_constant", *std::max_element(constants.begin(), constants.end()))
      .value("spread", s.constant);
  o.reports.push_back(std::move(s));
  return o;
}

Outcome arcs_check(const RunConfig& c) {
  Outcome o;
  o.table.header = {"N", "arcs", "wide_disjoint", "eta_disjoint", "max_ladder_error", "max_weight_error",
                    "max_split_error"};
  for (const auto N : c.Ns) {
    const auto arcs = major_arcs(N);
    const auto params = make_params(c, N);
    Rng rng(c.seed, "arcs-check/" + std::to_string(N));
    double ladder_err = 0.0, weight_err = 0.0, split_err = 0.0;
    for (const auto& arc : arcs) {
      const BumpLadder ladder(arc.frac, N, c.spline_order);
      for (std::int64_t s = 0; s < c.samples; ++s) {
        const double u = rng.uniform(-1.0, 1.0) * arc.radius();
        double sum = 0.0;
        for (const auto& level : ladder.levels()) sum += ladder.piece(level, u);
        ladder_err = std::max(ladder_err, std::abs(sum - 1.0));
        weight_err =
            std::max(weight_err, std::abs(major_weight(reduce_mod1(arc.center() + u), N, c.spline_order) - 1.0));
      }
    }
    const std::int64_t split_samples = 10 * c.samples;
    for (std::int64_t s = 0; s < split_samples; ++s) {
      std::vector<double> coords(static_cast<std::size_t>(c.n));
      for (auto& x : coords) x = rng.uniform();
      const TorusPoint xi(std::move(coords));
      const auto whole = piece_multiplier(PieceSpec::whole(), xi, params, c.spline_order);
      const auto maj = piece_multiplier(PieceSpec::maj(), xi, params, c.spline_order);
      const auto min = piece_multiplier(PieceSpec::min(), xi, params, c.spline_order);
      split_err = std::max(split_err, std::abs(whole - (maj + min)));
    }
    const bool wide = wide_arcs_disjoint(arcs);
    const bool eta = eta_supports_disjoint(N, c.spline_order);

    ExperimentReport r;
    r.name = "arcs_partition";
    r.param("n", std::int64_t{c.n}).param("N", N).param("spline_order", std::int64_t{c.spline_order});
    r.samples = static_cast<std::int64_t>(arcs.size()) * c.samples + split_samples;
    r.seed = c.seed;
    r.constant = std::max({ladder_err, weight_err, split_err});
    r.value("arcs", static_cast<double>(arcs.size()))
        .value("max_ladder_error", ladder_err)
        .value("max_weight_error", weight_err)
        .value("max_split_error", split_err);
    r.check("wide_arcs_disjoint", wide, "enlarged arcs 4I pairwise disjoint");
    r.check("eta_supports_disjoint", eta, "bump supports disjoint across fractions and distant levels");
    r.check("ladder_telescopes", ladder_err <= 1e-12, "core + dyadic pieces = 1 on I");
    r.check("weight_one_on_arcs", weight_err <= 1e-12, "major weight = 1 on I");
    r.check("maj_min_split", split_err <= 1e-12, "m = maj + min");
    o.reports.push_back(std::move(r));
    o.table.add({num(N), num(static_cast<std::int64_t>(arcs.size())), wide ? "1" : "0", eta ? "1" : "0",
                 num(ladder_err), num(weight_err), num(split_err)});

    std::ostringstream table;
    write_arcs_csv(table, arcs, c.spline_order);
    o.extra.emplace_back("arcs_N" + std::to_string(N) + ".csv", table.str());
  }
  return o;
}

std::vector<PieceSpec> coefficient_pieces(const RunConfig& c) {
  std::vector<PieceSpec> specs;
  for (const auto Q : c.Qs) {
    if (c.piece == "core") {
      specs.push_back(PieceSpec::core(Q));
    } else {
      for (const int l : c.ls) specs.push_back(PieceSpec::dyadic(Q, l));
    }
  }
  return specs;
}

Outcome coeff_check(const RunConfig& c) {
  Outcome o;
  o.table.header = {"N",        "Q",        "l",         "piece",     "r",        "residual",
                    "closed_re", "closed_im", "oracle_re", "oracle_im", "rel_error"};
  Table decay;
  decay.header = {"N", "Q", "l", "piece", "residual", "abs_coefficient", "bound", "ratio"};
  Rng rng(c.seed, "coeff-check");
  const auto n = static_cast<std::size_t>(c.n);
  for (const auto N : c.Ns) {
    const auto params = make_params(c, N);
    for (const auto& spec : coefficient_pieces(c)) {
      const std::string kind = spec.kind == PieceKind::core ? "core" : "dyadic";
      const int l = spec.kind == PieceKind::core ? 0 : spec.l;
      double worst_rel = 0.0, worst_abs = 0.0;
      for (std::int64_t i = 0; i < c.samples; ++i) {
        LatticePoint r = LatticePoint::origin(n);
        std::int64_t s = 0;
        for (std::size_t d = 0; d + 1 < n; ++d) {
          r[d] = rng.uniform_int(-2 * N + 1, 2 * N - 1);
          s += r[d] * r[d];
        }
        const std::int64_t bulk = 4 * N * spec.Q * (std::int64_t{1} << l);
        std::int64_t residual = 0;
        while (residual == 0) residual = rng.uniform_int(-bulk, bulk);
        r[n - 1] = s - residual;
        const CoefficientQuery query{spec, r, params, c.spline_order};
        const auto closed = piece_coefficient(query);
        const auto oracle = piece_coefficient_oracle(query);
        double sigma = 1.0;
        for (std::size_t d = 0; d + 1 < n; ++d) sigma *= std::abs(params.cutoff(r[d]));
        const double scale = std::max(std::abs(closed), 1e-6 * sigma * oracle.l1);
        const double abs_err = std::abs(closed - oracle.value);
        const double rel = abs_err / scale;
        worst_rel = std::max(worst_rel, rel);
        worst_abs = std::max(worst_abs, abs_err);
        o.table.add({num(N), num(spec.Q), num(std::int64_t{l}), kind, join_point(r), num(residual),
                     num(closed.real()), num(closed.imag()), num(oracle.value.real()), num(oracle.value.imag()),
                     num(rel)});
      }
      ExperimentReport rep;
      rep.name = "coefficient_oracle";
      rep.param("piece", spec.label()).param("n", std::int64_t{c.n}).param("N", N);
      rep.param("spline_order", std::int64_t{c.spline_order});
      rep.samples = c.samples;
      rep.seed = c.seed;
      rep.constant = worst_rel;
      rep.value("max_rel_error", worst_rel).value("max_abs_error", worst_abs);
      rep.check("oracle_agreement", worst_rel <= 1e-8, "closed form vs quadrature, relative error <= 1e-8");
      o.reports.push_back(std::move(rep));

      std::vector<DecayRow> rows;
      o.reports.push_back(coefficient_decay_report(spec, params, c.eps, &rows, c.spline_order));
      for (const auto& row : rows) {
        decay.add({num(N), num(spec.Q), num(std::int64_t{l}), kind, num(row.residual), num(row.abs_coefficient),
                   num(row.bound), num(row.ratio)});
      }
    }
  }
  o.extra.emplace_back("decay.csv", decay.str());
  return o;
}

Outcome ramanujan_check(const RunConfig& c) {
  Outcome o;
  o.table.header = {"Q", "k", "numerator", "d_k_Q", "ratio"};
  o.reports.push_back(ramanujan_agreement_report(c.qmax, c.kmax));
  for (const auto Q : c.Qs) {
    for (const auto k : c.ks) {
      auto r = ramanujan_block_report(Q, k, c.eps);
      o.table.add({num(Q), num(k), num(r.value_of("numerator")), num(r.value_of("d_k_Q")), num(r.constant)});
      o.reports.push_back(std::move(r));
    }
  }
  return o;
}

Outcome divisor_check(const RunConfig& c) {
  Outcome o;
  o.table.header = {"N", "Q", "D", "count", "ratio", "certificate"};
  for (const auto N : c.Ns) {
    for (const auto Q : c.Qs) {
      auto r = divisor_level_report(N, Q, c.Ds, c.B, c.tau);
      for (const double D : c.Ds) {
        o.table.add({num(N), num(Q), num(D), num(r.value_of("count_D=" + key_number(D))),
                     num(r.value_of("ratio_D=" + key_number(D))), num(r.value_of("certificate"))});
      }
      o.reports.push_back(std::move(r));
    }
  }
  return o;
}

Outcome norm_scan(const RunConfig& c) {
  Outcome o;
  o.table.header = {"n", "N", "p", "source", "value", "target"};
  const double nn = c.n;
  for (const auto N : c.Ns) {
    const auto params = make_params(c, N);
    const double l1 = norm_l1_linf(params);
    const auto l2 = norm_l2_l2(params, c.resolution);
    o.table.add({num(std::int64_t{c.n}), num(N), "1", "l1_linf", num(l1), num(-(nn - 1))});
    o.table.add({num(std::int64_t{c.n}), num(N), "2", "l2_l2", num(l2.value), "0"});
    for (const double p : c.ps) {
      const double theta = 2.0 / p - 1.0;
      const double bound = std::pow(l1, theta) * std::pow(l2.value, 1.0 - theta);
      const double box = box_extremizer_ratio(params, p);
      const double del = delta_extremizer_ratio(params, p);
      const auto ascent = random_ascent_lower_bound(params, p, c.seed, c.iters);
      const double target = theorem_exponent(c.n, p);
      o.table.add({num(std::int64_t{c.n}), num(N), num(p), "box", num(box), num(target)});
      o.table.add({num(std::int64_t{c.n}), num(N), num(p), "delta", num(del), num(delta_exponent(c.n, p))});
      o.table.add({num(std::int64_t{c.n}), num(N), num(p), "ascent", num(ascent.best), num(target)});

      ExperimentReport r;
      r.name = "norm_scan";
      r.param("n", std::int64_t{c.n}).param("N", N).param("p", p).param("iters", c.iters);
      r.samples = c.iters;
      r.seed = c.seed;
      r.constant = std::max({box, del, ascent.best});
      r.value("box", box)
          .value("delta", del)
          .value("ascent", ascent.best)
          .value("ascent_accepted", static_cast<double>(ascent.accepted))
          .value("l1_linf", l1)
          .value("l2_l2", l2.value)
          .value("l2_certificate", l2.certificate)
          .value("interpolation_bound", bound);
      const double slack = bound * (1.0 + 1e-9);
      r.check("box_below_interpolation_bound", box <= slack, "||A f||_p' / ||f||_p <= l1^theta l2^(1-theta)");
      r.check("delta_below_interpolation_bound", del <= slack, "||A f||_p' / ||f||_p <= l1^theta l2^(1-theta)");
      r.check("ascent_below_interpolation_bound", ascent.best <= slack,
              "||A f||_p' / ||f||_p <= l1^theta l2^(1-theta)");
      o.reports.push_back(std::move(r));
    }
  }
  return o;
}

Outcome sharpness(const RunConfig& c) {
  Outcome o;
  o.table.header = {"n", "N", "box_exact", "delta_exact", "l2_norm", "l2_certificate", "rayleigh_max"};
  for (const auto N : c.Ns) {
    const auto params = make_params(c, N);
    auto box = box_extremizer_check(params);
    auto del = delta_extremizer_check(params);
    const auto l2 = norm_l2_l2(params, c.resolution);
    auto rayleigh = random_rayleigh_report(params, l2.value, c.samples, c.seed);

    ExperimentReport r;
    r.name = "l2_endpoint";
    r.param("n", std::int64_t{c.n}).param("N", N).param("resolution", std::int64_t{c.resolution});
    r.constant = l2.value;
    r.value("l2_norm", l2.value)
        .value("argmax_t", l2.argmax_t)
        .value("argmax_y", l2.argmax_y)
        .value("certificate", l2.certificate)
        .value("certified", l2.certified ? 1.0 : 0.0);
    r.check("l2_norm_is_one", l2.value == 1.0, "N^{-(n-1)} sup |m_N| = 1 for the sharp cutoff");

    o.table.add({num(std::int64_t{c.n}), num(N), box.all_checks_passed() ? "1" : "0",
                 del.all_checks_passed() ? "1" : "0", num(l2.value), num(l2.certificate), num(rayleigh.constant)});
    o.reports.push_back(std::move(box));
    o.reports.push_back(std::move(del));
    o.reports.push_back(std::move(r));
    o.reports.push_back(std::move(rayleigh));
  }
  return o;
}

Outcome scaling(const RunConfig& c) {
  Outcome o;
  o.table.header = {"n", "N", "p", "source", "value", "target"};
  for (const double p : c.ps) {
    for (const auto& name : c.sources) {
      const auto source = parse_source(name);
      const auto fit = scaling_fit(c.n, c.Ns, p, source, c.seed, c.iters);
      ExperimentReport r;
      r.name = "scaling_fit";
      std::string scales;
      for (const auto N : c.Ns) scales += (scales.empty() ? "" : ",") + std::to_string(N);
      r.param("n", std::int64_t{c.n}).param("p", p).param("source", name).param("N", scales);
      if (source == RatioSource::ascent) r.param("iters", c.iters);
      r.samples = static_cast<std::int64_t>(c.Ns.size());
      r.seed = c.seed;
      r.constant = fit.slope;
      r.value("slope", fit.slope)
          .value("intercept", fit.intercept)
          .value("target", fit.target)
          .value("residual", fit.residual);
      for (std::size_t i = 0; i < fit.Ns.size(); ++i) {
        o.table.add({num(std::int64_t{c.n}), num(c.Ns[i]), num(p), name, num(fit.values[i]), num(fit.target)});
      }
      o.reports.push_back(std::move(r));
    }
  }
  return o;
}

Outcome separation(const RunConfig& c) {
  Outcome o;
  o.table.header = {"n", "N", "p", "q", "source", "step", "disjoint", "f_norm", "Af_norm", "ratio", "gain"};
  const auto n = static_cast<std::size_t>(c.n);
  for (const auto N : c.Ns) {
    const auto params = make_params(c, N);
    for (const double p : c.ps) {
      const double q = c.q ? *c.q : conjugate_exponent(p);
      for (const auto& name : c.sources) {
        const auto f = name == "box" ? box_extremizer(params) : delta(LatticePoint::origin(n));
        std::vector<LatticePoint> shifts;
        for (int j = 0; j < c.shifts; ++j) {
          LatticePoint h = LatticePoint::origin(n);
          h[0] = (10 * N * N) << j;
          shifts.push_back(h);
        }
        auto r = two_bump_separation_probe(f, shifts, p, q, params);
        r.param("source", name);
        bool all_disjoint = true;
        for (int j = 0; j <= c.shifts; ++j) {
          const std::string tag = std::to_string(j);
          const bool disjoint = j == 0 || r.value_of("disjoint_" + tag) == 1.0;
          all_disjoint = all_disjoint && disjoint;
          o.table.add({num(std::int64_t{c.n}), num(N), num(p), num(q), name, tag, disjoint ? "1" : "0",
                       num(r.value_of("f_norm_" + tag)), num(r.value_of("Af_norm_" + tag)),
                       num(r.value_of("ratio_" + tag)), j == 0 ? "1" : num(r.value_of("gain_" + tag))});
        }
        if (all_disjoint) {
          const double gain = std::pow(2.0, c.shifts * (1.0 / q - 1.0 / p));
          r.check("total_gain", std::abs(r.constant - gain) <= 1e-12 * gain,
                  "ratio gain 2^{k(1/q - 1/p)} after k disjoint doublings");
        }
        o.reports.push_back(std::move(r));
      }
    }
  }
  return o;
}

using Runner = Outcome (*)(const RunConfig&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"gauss-check", gauss_check},       {"arcs-check", arcs_check},    {"coeff-check", coeff_check},
      {"ramanujan-check", ramanujan_check}, {"divisor-check", divisor_check}, {"norm-scan", norm_scan},
      {"sharpness", sharpness},           {"scaling-fit", scaling},      {"separation-probe", separation},
  };
  return table;
}

json config_json(const RunConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["n"] = c.n;
  j["N"] = c.Ns;
  j["p"] = c.ps;
  j["q"] = c.q ? json(*c.q) : json(nullptr);
  j["Q"] = c.Qs;
  j["l"] = c.ls;
  j["piece"] = c.piece;
  j["cutoff"] = c.cutoff;
  j["m"] = c.spline_order;
  j["eps"] = c.eps;
  j["resolution"] = c.resolution;
  j["samples"] = c.samples;
  j["iters"] = c.iters;
  j["seed"] = c.seed;
  j["source"] = c.sources;
  j["D"] = c.Ds;
  j["B"] = c.B;
  j["tau"] = c.tau;
  j["qmax"] = c.qmax;
  j["kmax"] = c.kmax;
  j["k"] = c.ks;
  j["shifts"] = c.shifts;
  return j;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << contents) || !out.flush()) throw UsageError("cannot write '" + path.string() + "'");
}

template <typename T>
void defaults(std::vector<T>& v, std::type_identity_t<std::initializer_list<T>> d) {
  if (v.empty()) v = d;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void require_cutoff(RunConfig& c, const char* kind) {
  if (c.cutoff.empty()) c.cutoff = kind;
  require(c.cutoff == kind, c.experiment + " requires --cutoff " + kind);
}

void require_exponents(const RunConfig& c, bool allow_one) {
  for (const double p : c.ps) {
    require(allow_one ? (p >= 1.0 && p <= 2.0) : (p > 1.0 && p <= 2.0),
            "p = " + num(p) + (allow_one ? " outside [1, 2]" : " outside (1, 2]"));
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"gauss-check", "arcs-check",  "coeff-check",
                                              "ramanujan-check", "divisor-check", "norm-scan",
                                              "sharpness",   "scaling-fit", "separation-probe",
                                              "plot"};
  return names;
}

double parse_exponent(const std::string& text) {
  const auto parse = [&](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw UsageError("not a number: '" + text + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse(text);
  const double den = parse(text.substr(slash + 1));
  if (den == 0.0) throw UsageError("zero denominator in '" + text + "'");
  return parse(text.substr(0, slash)) / den;
}

RunConfig resolved(const RunConfig& config) {
  RunConfig c = config;
  const auto& names = experiment_names();
  require(std::find(names.begin(), names.end(), c.experiment) != names.end(),
          "unknown experiment '" + c.experiment + "'");
  if (c.experiment == "plot") {
    require(!c.plot_csv.empty(), "plot needs --csv <file>");
    parse_plot_kind(c.plot_kind);
    if (c.plot_svg.empty()) c.plot_svg = fs::path(c.plot_csv).replace_extension(".svg").string();
    return c;
  }

  require(c.n >= 2, "--n must be at least 2");
  require(c.spline_order >= 4, "--m must be at least 4");
  require(c.eps > 0.0, "--eps must be positive");
  require(c.resolution >= 1, "--resolution must be positive");
  require(c.samples >= 0 && c.iters >= 0, "--samples and --iters must be nonnegative");
  require(!c.out_dir.empty(), "--out must not be empty");
  require(c.cutoff.empty() || c.cutoff == "sharp" || c.cutoff == "smooth", "--cutoff must be sharp or smooth");
  require(c.piece == "dyadic" || c.piece == "core", "--piece must be dyadic or core");

  const std::string& e = c.experiment;
  try {
    if (e == "gauss-check") {
      defaults(c.Ns, {16, 32, 64, 128});
      if (c.samples == 0) c.samples = 10000;
      require_cutoff(c, "smooth");
      for (const auto N : c.Ns) require(N >= 10, "gauss-check needs N >= 10");
    } else if (e == "arcs-check") {
      defaults(c.Ns, {16, 64});
      if (c.samples == 0) c.samples = 1000;
      require_cutoff(c, "smooth");
      for (const auto N : c.Ns) require(N >= 10, "arcs-check needs N >= 10");
    } else if (e == "coeff-check") {
      defaults(c.Ns, {8});
      defaults(c.Qs, {2});
      defaults(c.ls, {0});
      if (c.samples == 0) c.samples = 50;
      require_cutoff(c, "smooth");
      for (const auto N : c.Ns) {
        require(N >= 4, "coeff-check needs N >= 4");
        make_params(c, N).validate();
        for (const auto& spec : coefficient_pieces(c)) validate_piece(spec, N);
      }
    } else if (e == "ramanujan-check") {
      defaults(c.Qs, {16, 64});
      defaults(c.ks, {1, 2, 6, 12, 60, 360, 2520});
      require(c.qmax >= 1 && c.kmax >= 0, "need --qmax >= 1 and --kmax >= 0");
      for (const auto Q : c.Qs) require(Q >= 1, "--Q must be positive");
      for (const auto k : c.ks) require(k != 0, "--k must be nonzero");
    } else if (e == "divisor-check") {
      defaults(c.Ns, {100000});
      defaults(c.Qs, {16, 64});
      defaults(c.Ds, {2.0, 4.0, 8.0, 16.0, 32.0});
      for (const double D : c.Ds) CheckParams{D, c.B, c.tau}.validate(true);
      for (const auto Q : c.Qs) require(Q >= 1, "--Q must be positive");
      for (const auto N : c.Ns) require(N >= 1 && N <= DivisorSieve::kDefaultCap, "--N out of range");
    } else if (e == "norm-scan") {
      defaults(c.Ns, {4, 8, 16, 32});
      defaults(c.ps, {1.5, 1.8, 2.0});
      if (c.iters == 0) c.iters = 2000;
      require_cutoff(c, "sharp");
      require_exponents(c, false);
    } else if (e == "sharpness") {
      defaults(c.Ns, {4, 8, 16, 32});
      if (c.samples == 0) c.samples = 20;
      require_cutoff(c, "sharp");
    } else if (e == "scaling-fit") {
      defaults(c.Ns, {8, 16, 32, 64, 128});
      defaults(c.ps, {1.8});
      defaults(c.sources, {"box"});
      if (c.iters == 0) c.iters = 20000;
      require_cutoff(c, "sharp");
      require_exponents(c, false);
      require(c.Ns.size() >= 4, "scaling-fit needs at least 4 values of N");
      for (const auto& s : c.sources) parse_source(s);
    } else if (e == "separation-probe") {
      defaults(c.Ns, {4, 8});
      defaults(c.ps, {2.0});
      defaults(c.sources, {"delta"});
      require_cutoff(c, "sharp");
      require_exponents(c, true);
      require(c.shifts >= 1 && c.shifts <= 20, "--shifts must be in [1, 20]");
      if (c.q) require(*c.q >= 1.0, "--q must be at least 1");
      for (const double p : c.ps) require(c.q || p > 1.0, "p = 1 needs an explicit --q");
      for (const auto& s : c.sources) require(s == "delta" || s == "box", "separation-probe sources: delta, box");
    }
    for (const auto N : c.Ns) require(N >= 1, "--N must be positive");
    if (!c.cutoff.empty() && !c.Ns.empty()) make_params(c, c.Ns.front()).validate();
  } catch (const DomainError& err) {
    throw UsageError(err.what());
  }
  return c;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig c;
  std::vector<std::string> ps;
  std::string q;
  bool no_csv = false, no_json = false;

  CLI::App app{"Experiments for discrete averages over the paraboloid.", "paraboloid"};
  app.set_config("--config", "", "Flat 'key = value' file named like the long flags; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", std::string(library_version()));

  std::string names;
  for (const auto& name : experiment_names()) names += (names.empty() ? "" : ", ") + name;
  app.add_option("experiment", c.experiment, "One of: " + names)
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  app.add_option("--n", c.n, "Dimension (>= 2)");
  app.add_option("--N", c.Ns, "Scales, comma separated")->delimiter(',');
  app.add_option("--p", ps, "Exponents p, comma separated; fractions a/b allowed")->delimiter(',');
  app.add_option("--q", q, "Target exponent (separation-probe; default p')");
  app.add_option("--Q", c.Qs, "Dyadic block sizes, comma separated")->delimiter(',');
  app.add_option("--l", c.ls, "Ladder levels, comma separated")->delimiter(',');
  app.add_option("--piece", c.piece, "dyadic or core (coeff-check)");
  app.add_option("--cutoff", c.cutoff, "sharp or smooth");
  app.add_option("--m", c.spline_order, "B-spline order of the bump");
  app.add_option("--eps", c.eps, "Loss exponent epsilon");
  app.add_option("--resolution", c.resolution, "Grid points per 1/N^2 in frequency scans");
  app.add_option("--samples", c.samples, "Sample count (meaning per experiment)");
  app.add_option("--iters", c.iters, "Ascent iterations");
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--source", c.sources, "Ratio sources: box, delta, ascent, l2")->delimiter(',');
  app.add_option("--D", c.Ds, "Divisor thresholds, comma separated")->delimiter(',');
  app.add_option("--B", c.B, "Moment exponent (positive integer)");
  app.add_option("--tau", c.tau, "Loss exponent in Q");
  app.add_option("--qmax", c.qmax, "Largest q (ramanujan-check)");
  app.add_option("--kmax", c.kmax, "Largest |k| (ramanujan-check)");
  app.add_option("--k", c.ks, "Arguments k of block reports, comma separated")->delimiter(',');
  app.add_option("--shifts", c.shifts, "Number of doublings (separation-probe)");
  app.add_option("--workers", c.workers, "Worker threads (default: PARABOLOID_WORKERS or all cores)");
  app.add_option("--out", c.out_dir, "Output directory");
  app.add_flag("--no-csv", no_csv, "Do not write CSV files");
  app.add_flag("--no-json", no_json, "Do not write the JSON report");
  app.add_option("--csv", c.plot_csv, "Input CSV (plot)");
  app.add_option("--kind", c.plot_kind, "loglog or profile (plot)");
  app.add_option("--svg", c.plot_svg, "Output SVG (plot; default: input with .svg)");
  app.add_option("--x", c.plot_x, "x column (plot profile)");
  app.add_option("--y", c.plot_y, "y column (plot profile)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << '\n';
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (const auto& p : ps) c.ps.push_back(parse_exponent(p));
  if (!q.empty()) c.q = parse_exponent(q);
  c.write_csv = !no_csv;
  c.write_json = !no_json;
  return c;
}

int run(const RunConfig& config, std::ostream& out) {
  const RunConfig c = resolved(config);
  if (c.workers > 0) set_worker_count(c.workers);

  if (c.experiment == "plot") {
    emit_plot(c.plot_csv, parse_plot_kind(c.plot_kind), c.plot_svg, c.plot_x, c.plot_y);
    out << "wrote " << c.plot_svg << '\n';
    return kExitPass;
  }

  const Outcome o = runners().at(c.experiment)(c);
  bool passed = true;
  for (const auto& r : o.reports) passed = passed && r.all_checks_passed();

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = c.experiment;
  doc["library_version"] = library_version();
  doc["seed"] = c.seed;
  doc["config"] = config_json(c);
  doc["passed"] = passed;
  json reports = json::array();
  for (const auto& r : o.reports) reports.push_back(json::parse(r.to_json()));
  doc["reports"] = std::move(reports);

  const fs::path dir(c.out_dir);
  std::vector<std::pair<fs::path, std::string>> files;
  if (c.write_csv) {
    files.emplace_back(dir / (c.experiment + ".csv"), o.table.str());
    for (const auto& [suffix, contents] : o.extra) files.emplace_back(dir / (c.experiment + "_" + suffix), contents);
  }
  if (c.write_json) files.emplace_back(dir / (c.experiment + ".json"), doc.dump(2) + "\n");
  if (!files.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create '" + dir.string() + "': " + ec.message());
  }
  for (const auto& [path, contents] : files) write_file(path, contents);

  for (const auto& r : o.reports) {
    std::size_t ok = 0;
    for (const auto& check : r.checks) ok += check.passed ? 1 : 0;
    out << r.name;
    for (const auto& [key, value] : r.params) {
      out << ' ' << key << '=';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << num(v);
            } else {
              out << v;
            }
          },
          value);
    }
    out << ": constant " << num(r.constant);
    if (!r.checks.empty()) out << ", checks " << ok << '/' << r.checks.size();
    for (const auto& check : r.checks) {
      if (!check.passed) out << " [FAILED " << check.name << ']';
    }
    out << '\n';
  }
  for (const auto& [path, contents] : files) out << "wrote " << path.string() << '\n';
  out << (passed ? "status: pass" : "status: invariant failure") << '\n';
  return passed ? kExitPass : kExitInvariant;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_args(argc, argv, out);
    if (!config) return kExitPass;
    return run(*config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun 'paraboloid --help' for the list of experiments and flags.\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantError& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const ConvergenceError& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace paraboloid::cli
