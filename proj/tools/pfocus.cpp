#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pfocus/dyn1d.hpp"
#include "pfocus/errors.hpp"
#include "pfocus/fracdim.hpp"
#include "pfocus/jet_io.hpp"
#include "pfocus/jets.hpp"
#include "pfocus/pwflow.hpp"
#include "pfocus/realize.hpp"

using namespace pfocus;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kInfeasible = 3, kNumerical = 4 };

struct RunConfig {
  std::string spec;
  std::string out;
  std::string type;
  std::optional<int> k, k1, k2, n;
  std::optional<double> x0;
  int turns = 200;
  std::optional<double> delta_min, delta_max;
  std::vector<double> ladder;
  double ratio = 0.0;
  double tol = 0.1;
  std::optional<std::uint64_t> seed;
  double cells_budget = 1e12;
  double rtol = 1e-12, atol = 1e-12;

  // dim-seq / orbit
  std::optional<double> alpha;
  std::string file;
  std::size_t count = 0;
  double c = 1.0;
  std::string csv;

  // return-map
  double x_min = 1e-3, x_max = 1e-1;
  int samples = 16;

  // jets
  std::string f, g, phi;
  std::optional<int> order;
  bool general_linear = false;
};

std::string env_name(const std::string& flag) {
  std::string s = "PFOCUS_";
  for (char ch : flag) s.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  return s;
}

template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name));
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidInput:
    case ErrorCode::ConstantTerm:
    case ErrorCode::ZeroLinearPart:
    case ErrorCode::InsufficientOrder:
    case ErrorCode::UnsupportedLinearPart:
    case ErrorCode::IdenticalJets:
    case ErrorCode::DomainError:
    case ErrorCode::InvalidOrder:
    case ErrorCode::UnsupportedJet:
    case ErrorCode::NotInvolutionToOrder:
      return kUsage;
    default:
      return kNumerical;
  }
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

std::string rational_text(const Rational& r) { return r.get_str(); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  os << body;
}

// JSON goes to --out when given, stdout otherwise
void emit(const RunConfig& cfg, const json& report) {
  if (cfg.out.empty()) {
    std::cout << dump(report);
  } else {
    write_file(cfg.out, dump(report));
  }
}

void check_tolerances(const RunConfig& cfg) {
  if (!(cfg.rtol > 0) || !(cfg.atol > 0)) bad("tolerances must be positive");
  if (!(cfg.tol > 0)) bad("--tol must be positive");
}

std::vector<double> ladder_of(const RunConfig& cfg, double dmax, double dmin) {
  std::vector<double> ladder = cfg.ladder;
  if (ladder.empty()) ladder = geometric_ladder(cfg.delta_max.value_or(dmax), cfg.delta_min.value_or(dmin), cfg.ratio);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0)) bad("ladder entries must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) bad("ladder must be strictly decreasing");
  }
  if (ladder.size() < 8) bad("ladder needs at least 8 rungs, got " + std::to_string(ladder.size()));
  return ladder;
}

FlowOptions flow_of(const RunConfig& cfg, const PiecewiseSystem& s) { return s.flow_options(cfg.rtol, cfg.atol); }

int cmd_classify(const RunConfig& cfg) {
  const PiecewiseSystem s = load_system(cfg.spec);
  const ContactClass c = classify(s, cfg.seed);
  json report = to_json(c);
  report["validated_radius"] = validated_radius(s, s.radius);
  emit(cfg, report);
  if (c.valid()) {
    std::cerr << "type: " << to_string(*c.type) << "\n";
    return kOk;
  }
  std::cerr << "invalid: " << (c.violations.empty() ? std::string("no pseudo-focus type") : c.violations.front()) << "\n";
  return kCheckFailed;
}

struct Target {
  Realization realization;
  FocusKind kind = FocusKind::FF;
  PseudoFocusType expected = PseudoFocusType::FF;
  int order = 0;
  json orders;
};

int need(const std::optional<int>& v, const char* name) {
  if (!v) bad(std::string("--") + name + " is required for this type");
  if (*v < 0) bad(std::string("--") + name + " must be non-negative");
  return *v;
}

Target target_of(const RunConfig& cfg) {
  Target t;
  if (cfg.type == "ff") {
    const int k1 = need(cfg.k1, "k1"), k2 = need(cfg.k2, "k2"), k = need(cfg.k, "k");
    t.orders = {{"k1", k1}, {"k2", k2}, {"k", k}};
    t.realization = realize_ff(k1, k2, k);
    t.order = k;
  } else if (cfg.type == "fp" || cfg.type == "mixed") {
    const int k = need(cfg.k, "k"), n = need(cfg.n, "n");
    t.orders = {{"k", k}, {"n", n}};
    t.realization = realize_mixed(k, n);
    t.expected = PseudoFocusType::FP;
    t.order = n;
  } else if (cfg.type == "pp") {
    const int n = need(cfg.n ? cfg.n : cfg.k, "n");
    t.orders = {{"n", n}};
    t.realization = realize_pp(n);
    t.kind = FocusKind::PP;
    t.expected = PseudoFocusType::PP;
    t.order = n;
  } else {
    bad("--type must be ff, fp, mixed or pp");
  }
  if (t.order < 1) bad("target order must be at least 1");
  return t;
}

int report_infeasible(const Infeasible& inf, json report) {
  report["infeasible"] = to_json(inf);
  std::cout << dump(report);
  std::cerr << "infeasible (" << inf.branch << "): " << inf.reason << "\n";
  return kInfeasible;
}

int cmd_realize(const RunConfig& cfg) {
  Target t = target_of(cfg);
  if (const auto* inf = std::get_if<Infeasible>(&t.realization)) {
    return report_infeasible(*inf, {{"type", cfg.type}, {"orders", t.orders}});
  }
  emit(cfg, to_json(std::get<PiecewiseSystem>(t.realization)));
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  check_tolerances(cfg);
  if (cfg.turns < 1) bad("--turns must be at least 1");
  if (!(cfg.cells_budget > 0)) bad("--cells-budget must be positive");
  const bool pp = cfg.type == "pp";
  const auto ladder = ladder_of(cfg, pp ? 3.2e-3 : 5.7e-3, pp ? 5.6e-5 : 1e-4);
  Target t = target_of(cfg);

  json report;
  report["command"] = "verify";
  report["type"] = cfg.type;
  report["orders"] = t.orders;
  if (cfg.seed) report["seed"] = *cfg.seed;
  if (const auto* inf = std::get_if<Infeasible>(&t.realization)) return report_infeasible(*inf, report);

  const PiecewiseSystem& s = std::get<PiecewiseSystem>(t.realization);
  const double x0 = cfg.x0.value_or(std::min(pp ? 0.45 : 0.25, 0.9 * s.radius));
  if (!(x0 > 0) || x0 >= s.radius) {
    bad("--x0 must lie in (0, " + std::to_string(s.radius) + ") for this system");
  }

  const ContactClass cls = classify(s, cfg.seed);
  const double spacing = ladder.back() / 4;
  const SpiralTrace trace = trace_spiral(s, x0, cfg.turns, spacing, flow_of(cfg, s));
  AreaLadder areas;
  for (double delta : ladder) {
    areas.rungs.push_back(neighborhood_area(trace.set.simplified(delta / 4), delta, {.cells_per_delta = 5,
                                                                                      .cell_budget = cfg.cells_budget}));
  }
  DimensionEstimate est = minkowski_fit(areas);
  const SpiralPrediction pred = predicted_spiral_dimension(t.kind, t.order);
  est.predicted = pred.value;
  const double error = std::abs(est.value - pred.value);
  const bool type_ok = cls.type == t.expected;
  const bool pass = type_ok && error <= cfg.tol;

  report["system"] = to_json(s);
  report["classification"] = to_json(cls);
  report["trace"] = {{"x0", x0},
                     {"turns", cfg.turns},
                     {"max_spacing", spacing},
                     {"vertices", trace.set.vertex_count()},
                     {"last_return", trace.returns.back()},
                     {"rtol", cfg.rtol},
                     {"atol", cfg.atol}};
  report["areas"] = to_json(areas);
  report["estimate"] = to_json(est);
  report["predicted"] = pred.value;
  report["degenerate"] = pred.degenerate;
  report["error"] = error;
  report["tolerance"] = cfg.tol;
  report["pass"] = pass;

  std::ostringstream svg;
  const BoundingBox& b = trace.set.bounding_box();
  write_svg(svg, trace.set.simplified(std::max(b.xmax - b.xmin, b.ymax - b.ymin) / 800), ladder.back());
  const std::string body = dump(report);
  if (!cfg.out.empty()) {
    write_file(std::filesystem::path(cfg.out) / "verify.json", body);
    write_file(std::filesystem::path(cfg.out) / "spiral.svg", svg.str());
  }
  std::cout << body;
  std::cerr << "estimate " << est.value << " predicted " << pred.value << " error " << error << " tol " << cfg.tol
            << (type_ok ? "" : " (unexpected contact type)") << (pass ? " pass" : " FAIL") << "\n";
  return pass ? kOk : kCheckFailed;
}

OrbitSequence read_sequence(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ParseError, "cannot open " + path);
  OrbitSequence s;
  s.generator = "file " + path;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line.substr(first), &used);
      s.points.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": not a number: '" + line + "'");
    }
  }
  if (s.points.size() < 2) throw Error(ErrorCode::ParseError, path + ": need at least two points");
  return s;
}

int cmd_dim_seq(const RunConfig& cfg) {
  if (cfg.alpha.has_value() == !cfg.file.empty()) bad("give exactly one of --alpha and --file");
  const auto ladder = ladder_of(cfg, 1e-2, 1e-6);
  OrbitSequence seq;
  std::optional<double> predicted;
  if (cfg.alpha) {
    const double a = *cfg.alpha;
    if (!(a > 0)) bad("--alpha must be positive");
    std::size_t count = cfg.count;
    if (count == 0) {
      // tail gaps a n^(-a-1) must drop below the smallest delta
      count = static_cast<std::size_t>(4 * std::ceil(std::pow(a / ladder.back(), 1 / (a + 1)))) + 16;
      if (count > 50'000'000) bad("--alpha too small for this ladder; pass --count explicitly");
    }
    for (std::size_t i = 1; i <= count; ++i) seq.points.push_back(std::pow(static_cast<double>(i), -a));
    seq.generator = "n^-" + std::to_string(a);
    predicted = 1 / (1 + a);
  } else {
    seq = read_sequence(cfg.file);
  }
  DimensionEstimate e = sequence_dimension_exact(seq, ladder);
  e.predicted = predicted;
  json report{{"command", "dim-seq"}, {"generator", seq.generator}, {"points", seq.points.size()}, {"estimate", to_json(e)}};
  if (!cfg.csv.empty()) {
    std::ostringstream os;
    write_orbit_csv(os, seq);
    write_file(cfg.csv, os.str());
  }
  emit(cfg, report);
  return kOk;
}

int cmd_orbit(const RunConfig& cfg) {
  if (cfg.k.has_value() == cfg.alpha.has_value()) bad("give exactly one of --k and --alpha");
  const auto ladder = ladder_of(cfg, 1e-2, 1e-6);
  const double x0 = cfg.x0.value_or(0.4);
  Map1D p = cfg.k ? Map1D::power(*cfg.k, cfg.c) : Map1D::power(*cfg.alpha);
  const double alpha = cfg.k ? *cfg.k : *cfg.alpha;
  if (!(alpha > 1)) bad("the order must exceed 1");
  OrbitSequence seq;
  std::size_t n = cfg.count ? cfg.count : 1024;
  for (;;) {
    seq = iterate(p, x0, n);
    const auto& v = seq.points;
    if (cfg.count || v[v.size() - 2] - v.back() < ladder.back()) break;
    n *= 2;
  }
  DimensionEstimate e = sequence_dimension_exact(seq, ladder);
  e.predicted = predicted_orbit_dimension(alpha);
  json report{{"command", "orbit"}, {"map", p.label}, {"x0", x0}, {"points", seq.points.size()}, {"estimate", to_json(e)}};
  if (!cfg.csv.empty()) {
    std::ostringstream os;
    write_orbit_csv(os, seq);
    write_file(cfg.csv, os.str());
  }
  emit(cfg, report);
  return kOk;
}

int cmd_return_map(const RunConfig& cfg) {
  check_tolerances(cfg);
  if (!(cfg.x_min > 0) || !(cfg.x_max > cfg.x_min)) bad("need 0 < --x-min < --x-max");
  if (cfg.samples < 2) bad("--samples must be at least 2");
  const PiecewiseSystem s = load_system(cfg.spec);
  const OrderEstimate e = estimate_order(s, log_samples(cfg.x_min, cfg.x_max, cfg.samples), flow_of(cfg, s));
  json report = to_json(e);
  if (!cfg.csv.empty()) {
    std::ostringstream os;
    os << std::setprecision(17) << "x,displacement,error\n";
    for (std::size_t i = 0; i < e.xs.size(); ++i) os << e.xs[i] << ',' << e.displacements[i] << ',' << e.errors[i] << '\n';
    write_file(cfg.csv, os.str());
  }
  emit(cfg, report);
  std::cerr << (e.center_like ? std::string("center-like") : "order " + std::to_string(e.k)) << "\n";
  return kOk;
}

json jet_report(const Jet& j) { return {{"text", j.to_string()}, {"order", j.order()}, {"terms", jet_to_json(j)}}; }

Jet jet_arg(const std::string& text, const char* name, std::optional<int> order) {
  if (text.empty()) bad(std::string("--") + name + " is required");
  return parse_jet(text, order);
}

int cmd_jets(const RunConfig& cfg, const std::string& op) {
  json report{{"command", "jets " + op}};
  if (op == "compose") {
    const Jet f = jet_arg(cfg.f, "f", cfg.order), g = jet_arg(cfg.g, "g", cfg.order);
    report["result"] = jet_report(jet_compose(f, g));
  } else if (op == "inverse") {
    report["result"] = jet_report(jet_inverse(jet_arg(cfg.f, "f", cfg.order)));
  } else if (op == "conjugate") {
    const Jet f = jet_arg(cfg.f, "f", cfg.order), phi = jet_arg(cfg.phi, "phi", cfg.order);
    report["result"] = jet_report(jet_conjugate(f, phi, cfg.general_linear));
  } else if (op == "normal-form") {
    // a polynomial germ is exact, so pad it far enough to see its class
    Jet f = jet_arg(cfg.f, "f", cfg.order);
    if (!cfg.order) f = f.extended(std::max(f.order(), 13));
    const FormalClassReport r = normal_form(f);
    report["kind"] = to_string(r.kind);
    report["lambda"] = rational_text(r.lambda);
    report["working_order"] = r.working_order;
    switch (r.kind) {
      case FormalKind::ParabolicPreserving:
        report["k"] = r.k;
        report["alpha_k"] = rational_text(r.alpha_k);
        report["beta"] = rational_text(r.beta);
        break;
      case FormalKind::ReversingNonInvolution:
        report["k"] = r.k;
        report["a_low"] = {{"degree", 2 * r.k + 1}, {"value", rational_text(r.a_low)}};
        report["a_high"] = {{"degree", 4 * r.k + 1}, {"value", rational_text(r.a_high)}};
        report["rev_low"] = rational_text(r.rev_low);
        report["rev_high"] = rational_text(r.rev_high);
        break;
      default:
        break;
    }
    report["normal_form"] = jet_report(r.normal_form);
    report["conjugator"] = jet_report(r.conjugator);
  } else if (op == "displacement") {
    const auto d = displacement_order(jet_arg(cfg.f, "f", cfg.order));
    if (d) {
      report["k"] = d->k;
      report["c"] = rational_text(d->c);
    } else {
      report["identity"] = true;
    }
  }
  emit(cfg, report);
  return kOk;
}

void add_ladder(CLI::App* app, RunConfig& cfg) {
  flag(app, "delta-min", cfg.delta_min, "smallest delta");
  flag(app, "delta-max", cfg.delta_max, "largest delta");
  flag(app, "ratio", cfg.ratio, "ladder ratio in (0,1), default 10^(-1/4)");
  flag(app, "ladder", cfg.ladder, "explicit decreasing deltas (overrides the range)")->delimiter(',');
}

void add_flow(CLI::App* app, RunConfig& cfg) {
  flag(app, "rtol", cfg.rtol, "integrator relative tolerance");
  flag(app, "atol", cfg.atol, "integrator absolute tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfocus: piecewise planar foci, return maps and Minkowski dimensions"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* classify_cmd = app.add_subcommand("classify", "classify a system spec");
  flag(classify_cmd, "spec", cfg.spec, "system JSON")->required();
  flag(classify_cmd, "seed", cfg.seed, "jitter the sample grid");
  flag(classify_cmd, "out", cfg.out, "write the JSON report here");

  auto* verify_cmd = app.add_subcommand("verify", "realize, trace and compare the spiral dimension");
  flag(verify_cmd, "type", cfg.type, "ff, fp (mixed) or pp")->required();
  flag(verify_cmd, "k", cfg.k, "target order (ff), focus order (fp)");
  flag(verify_cmd, "k1", cfg.k1, "upper focus order");
  flag(verify_cmd, "k2", cfg.k2, "lower focus order");
  flag(verify_cmd, "n", cfg.n, "target order (fp, pp)");
  flag(verify_cmd, "x0", cfg.x0, "starting point on the positive axis");
  flag(verify_cmd, "turns", cfg.turns, "number of turns");
  add_ladder(verify_cmd, cfg);
  flag(verify_cmd, "tol", cfg.tol, "allowed |estimate - prediction|");
  flag(verify_cmd, "out", cfg.out, "directory for verify.json and spiral.svg");
  flag(verify_cmd, "seed", cfg.seed, "classification sample seed");
  flag(verify_cmd, "cells-budget", cfg.cells_budget, "virtual raster cell budget per rung");
  add_flow(verify_cmd, cfg);

  auto* dim_cmd = app.add_subcommand("dim-seq", "dimension of a real sequence");
  flag(dim_cmd, "alpha", cfg.alpha, "x_n = n^-alpha");
  flag(dim_cmd, "file", cfg.file, "one value per line");
  flag(dim_cmd, "count", cfg.count, "number of generated points");
  add_ladder(dim_cmd, cfg);
  flag(dim_cmd, "csv", cfg.csv, "write the points as CSV");
  flag(dim_cmd, "out", cfg.out, "write the JSON report here");

  auto* orbit_cmd = app.add_subcommand("orbit", "orbit of P(x) = x - c x^k");
  flag(orbit_cmd, "k", cfg.k, "integer order");
  flag(orbit_cmd, "alpha", cfg.alpha, "real order, P(x) = x - x^alpha");
  flag(orbit_cmd, "c", cfg.c, "coefficient for --k");
  flag(orbit_cmd, "x0", cfg.x0, "starting point");
  flag(orbit_cmd, "count", cfg.count, "fixed number of iterates");
  add_ladder(orbit_cmd, cfg);
  flag(orbit_cmd, "csv", cfg.csv, "write the orbit as CSV");
  flag(orbit_cmd, "out", cfg.out, "write the JSON report here");

  auto* rm_cmd = app.add_subcommand("return-map", "order of the first-return displacement");
  flag(rm_cmd, "spec", cfg.spec, "system JSON")->required();
  flag(rm_cmd, "x-min", cfg.x_min, "smallest sample");
  flag(rm_cmd, "x-max", cfg.x_max, "largest sample");
  flag(rm_cmd, "samples", cfg.samples, "number of log-spaced samples");
  flag(rm_cmd, "csv", cfg.csv, "write samples as CSV");
  flag(rm_cmd, "out", cfg.out, "write the JSON report here");
  add_flow(rm_cmd, cfg);

  auto* realize_cmd = app.add_subcommand("realize", "build a pseudo focus of prescribed order");
  flag(realize_cmd, "type", cfg.type, "ff, fp (mixed) or pp")->required();
  flag(realize_cmd, "k", cfg.k, "target order (ff), focus order (fp)");
  flag(realize_cmd, "k1", cfg.k1, "upper focus order");
  flag(realize_cmd, "k2", cfg.k2, "lower focus order");
  flag(realize_cmd, "n", cfg.n, "target order (fp, pp)");
  flag(realize_cmd, "out", cfg.out, "write the system JSON here");

  auto* jets_cmd = app.add_subcommand("jets", "exact jet algebra");
  jets_cmd->require_subcommand(1);
  std::string jet_op;
  for (const char* op : {"compose", "inverse", "conjugate", "normal-form", "displacement"}) {
    auto* sub = jets_cmd->add_subcommand(op);
    flag(sub, "f", cfg.f, "jet such as \"-t + t^2\"")->required();
    if (std::string(op) == "compose") flag(sub, "g", cfg.g, "inner jet")->required();
    if (std::string(op) == "conjugate") {
      flag(sub, "phi", cfg.phi, "conjugating jet")->required();
      sub->add_flag("--general-linear", cfg.general_linear, "allow phi with linear part != 1");
    }
    flag(sub, "order", cfg.order, "truncation order");
    flag(sub, "out", cfg.out, "write the JSON report here");
    sub->callback([&jet_op, op] { jet_op = op; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify_cmd) return cmd_classify(cfg);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*dim_cmd) return cmd_dim_seq(cfg);
    if (*orbit_cmd) return cmd_orbit(cfg);
    if (*rm_cmd) return cmd_return_map(cfg);
    if (*realize_cmd) return cmd_realize(cfg);
    if (*jets_cmd) return cmd_jets(cfg, jet_op);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
