// End-to-end acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "feasibility_oracle.hpp"
#include "oracles.hpp"
#include "pfocus/dyn1d.hpp"
#include "pfocus/fracdim.hpp"
#include "pfocus/jet_io.hpp"
#include "pfocus/jets.hpp"
#include "pfocus/pwflow.hpp"
#include "pfocus/realize.hpp"

using namespace pfocus;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome jet_round_trips() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const Jet f = oracle::random_jet_nonzero_linear(rng, 1 + i % 13);
    const Jet g = jet_inverse(f);
    if (!jet_compose(f, g).is_identity() || !jet_compose(g, f).is_identity()) ++bad;
  }
  const double t = since(t0);
  return {bad == 0 && t < 10, fmt("10000 round trips, %d mismatches, %.2f s (limit 10 s)", bad, t)};
}

Outcome squares_difference() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> pick_k(2, 12), num(-6, 6), den(1, 4);
  int bad = 0, even = 0, even_cancel = 0;
  for (int i = 0; i < 1000; ++i) {
    const int k = pick_k(rng), order = k + 3;
    const Jet f = oracle::random_jet(rng, order, Rational(-1));
    std::vector<Rational> c = f.coefficients();
    do {
      c[k - 1] = Rational(num(rng), den(rng));
      c[k - 1].canonicalize();
    } while (c[k - 1] == f[k]);
    for (int d = k + 1; d <= order; ++d) c[d - 1] = Rational(num(rng), den(rng)), c[d - 1].canonicalize();
    const Jet g(c);
    const Rational got = oracle::compose(f, f)[k] - oracle::compose(g, g)[k];
    const Rational want = Rational(k % 2 == 0 ? 0 : -2) * (f[k] - g[k]);
    const SquaresDifference lib = leading_difference_of_squares(f, g);
    if (got != want || lib.k != k || lib.coefficient != got || lib.predicted != want) ++bad;
    if (k % 2 == 0) {
      ++even;
      if (got == 0) ++even_cancel;
    }
  }
  return {bad == 0 && even_cancel == even,
          fmt("1000 pairs, %d mismatches, even-k cancellation %d/%d", bad, even_cancel, even)};
}

Outcome normal_forms() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
  auto nonzero = [&] {
    int p = 0;
    while (p == 0) p = num(rng);
    Rational r(p, den(rng));
    r.canonicalize();
    return r;
  };
  int bad_rev = 0, bad_par = 0;
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + i % 3;
    std::vector<Rational> c(13);
    c[0] = -1;
    c[2 * k] = nonzero();
    for (int d = 2 * k + 2; d <= 13; ++d) c[d - 1] = Rational(num(rng), den(rng)), c[d - 1].canonicalize();
    const Jet f = jet_conjugate(Jet(c), oracle::random_jet(rng, 13, Rational(1)));
    const FormalClassReport r = normal_form(f);
    const int top = 4 * k + 1;
    bool ok = r.kind == FormalKind::ReversingNonInvolution && r.k == k && r.working_order >= top;
    if (ok) {
      const Jet sq = oracle::compose(r.normal_form, r.normal_form).truncated(top);
      const Jet want = Jet::from_terms({{1, Rational(1)}, {2 * k + 1, r.a_low}, {top, r.a_high}}, top);
      const Jet lhs = oracle::compose(r.conjugator, f).truncated(top);
      const Jet rhs = oracle::compose(r.normal_form, r.conjugator).truncated(top);
      ok = sq == want && lhs == rhs && r.a_low != 0;
    }
    if (!ok) ++bad_rev;
  }
  for (int i = 0; i < 120; ++i) {
    const int k = 2 + i % 6, top = 2 * k - 1;
    std::vector<Rational> c(13);
    c[0] = 1;
    c[k - 1] = nonzero();
    for (int d = k + 1; d <= 13; ++d) c[d - 1] = Rational(num(rng), den(rng)), c[d - 1].canonicalize();
    const Jet f(c);
    const FormalClassReport r = normal_form(f);
    bool ok = r.kind == FormalKind::ParabolicPreserving && r.k == k && r.alpha_k == f[k] && r.working_order >= top;
    if (ok) {
      const Jet want = Jet::from_terms({{1, Rational(1)}, {k, r.alpha_k}, {top, r.beta}}, top);
      ok = r.normal_form.truncated(top) == want &&
           oracle::compose(r.conjugator, f).truncated(top) == oracle::compose(r.normal_form, r.conjugator).truncated(top);
    }
    if (!ok) ++bad_par;
  }
  return {bad_rev == 0 && bad_par == 0,
          fmt("reversing 200 cases (k = 1..3), %d failures; parabolic 120 cases (k = 2..7), %d failures", bad_rev,
              bad_par)};
}

Outcome orbit_dimensions() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ladder = geometric_ladder(1e-2, 1e-6);
  bool ok = true;
  std::string detail;
  for (double alpha : {2.0, 3.0, 5.0}) {
    const Map1D p = Map1D::power(alpha);
    const DimensionEstimate e = orbit_dimension(p, 0.4, ladder);
    const double want = 1 - 1 / alpha;
    // x_n n^(1/(alpha-1)) over n in [1e2, 1e6] against its limit (alpha-1)^(-1/(alpha-1))
    const OrbitSequence s = iterate(p, 0.4, 1'000'000);
    const double limit = std::pow(alpha - 1, -1 / (alpha - 1));
    double lo = 1e300, hi = 0;
    for (std::size_t n = 100; n <= 1'000'000; ++n) {
      const double r = s.points[n] * std::pow(static_cast<double>(n), 1 / (alpha - 1)) / limit;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const bool this_ok = std::abs(e.value - want) <= 0.03 && lo >= 0.9 && hi <= 1.1;
    ok = ok && this_ok;
    detail += fmt("a=%g d=%.4f (want %.4f) band [%.3f, %.3f]; ", alpha, e.value, want, lo, hi);
  }
  const double t = since(t0);
  ok = ok && t < 60;
  return {ok, detail + fmt("%.1f s (limit 60 s)", t)};
}

Outcome power_sequences() {
  const auto ladder = geometric_ladder(1e-2, 1e-6);
  bool ok = true;
  std::string detail;
  for (double alpha : {0.5, 1.0, 2.0}) {
    OrbitSequence s;
    for (int n = 1; n <= 200000; ++n) s.points.push_back(std::pow(static_cast<double>(n), -alpha));
    const DimensionEstimate e = sequence_dimension_exact(s, ladder);
    const double want = 1 / (1 + alpha);
    ok = ok && std::abs(e.value - want) <= 0.02;
    detail += fmt("a=%g d=%.4f (want %.4f); ", alpha, e.value, want);
  }
  return {ok, detail};
}

PiecewiseSystem glued(const PolyField& f) {
  PiecewiseSystem s;
  s.upper = f;
  s.lower = f;
  return s;
}

Outcome semi_monodromy_closed_forms() {
  double worst = 0;
  for (double lambda : {std::log(2.0), -std::log(2.0), 0.0}) {
    const auto s = glued(hyperbolic_focus_field(lambda));
    for (double t : log_samples(1e-3, 1e-1, 9)) {
      worst = std::max(worst, std::abs(semi_monodromy(s, Half::Upper, t) + std::exp(lambda) * t) / t);
    }
  }
  // least squares for h(t) + t = c2 t^2 + ... + c5 t^5 on t in [2e-2, 1e-1]
  const auto s = glued(weak_focus_field(1, 1, 0));
  const auto xs = log_samples(2e-2, 1e-1, 16);
  constexpr int D = 4;
  double A[D][D + 1] = {};
  for (double x : xs) {
    const double y = semi_monodromy(s, Half::Upper, x) + x;
    const double u = x / 0.1;
    double row[D];
    for (int d = 0; d < D; ++d) row[d] = std::pow(u, d + 2);
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) A[i][j] += row[i] * row[j];
      A[i][D] += row[i] * y;
    }
  }
  for (int c = 0; c < D; ++c) {
    for (int r = 0; r < D; ++r) {
      if (r == c) continue;
      const double m = A[r][c] / A[c][c];
      for (int j = c; j <= D; ++j) A[r][j] -= m * A[c][j];
    }
  }
  const double c3 = A[1][D] / A[1][1] / std::pow(0.1, 3);
  return {worst <= 1e-8 && std::abs(c3 - 1) <= 0.02,
          fmt("hyperbolic max |h(t)+e^l t|/t = %.2e (limit 1e-8); weak focus t^3 coefficient %.5f (want 1 +- 2%%)",
              worst, c3)};
}

Outcome involutions() {
  struct Case {
    Jet h;
    int N;
  };
  std::vector<Case> cases{{parse_jet("-t"), 1}};
  for (const char* phi_text : {"t - t^4", "t + t^2", "t + 1/2 t^3 - t^5"}) {
    for (int N : {5, 7, 9}) {
      const Jet phi = parse_jet(phi_text, N);
      cases.push_back({jet_compose(jet_inverse(phi), Rational(-1) * phi), N});
    }
  }
  double worst = 0;
  bool ok = true;
  for (const auto& c : cases) {
    const RealizedField r = hamiltonian_parabolic_field(c.h, c.N);
    const bool exact = c.N == 1;
    for (double x : log_samples(1e-3, 1e-1, 9)) {
      const double hx = transition_map(r.field, x);
      const double err = std::abs(transition_map(r.field, hx) - x);
      const double bound = exact ? 1e-8 : std::max(1e-8, 10 * std::pow(x, c.N + 1));
      worst = std::max(worst, err);
      ok = ok && err <= bound;
    }
  }
  return {ok, fmt("%zu fields, max |h(h(x)) - x| = %.2e", cases.size(), worst)};
}

struct SpiralRun {
  DimensionEstimate estimate;
  double seconds = 0;
  std::size_t vertices = 0;
};

SpiralRun spiral_dimension(const PiecewiseSystem& s, double x0, int turns, const std::vector<double>& ladder) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpiralTrace tr = trace_spiral(s, x0, turns, ladder.back() / 4);
  AreaLadder areas;
  for (double delta : ladder) {
    areas.rungs.push_back(neighborhood_area(tr.set.simplified(delta / 4), delta, {.cells_per_delta = 5, .cell_budget = 1e12}));
  }
  SpiralRun out{minkowski_fit(areas), 0, tr.set.vertex_count()};
  out.seconds = since(t0);
  return out;
}

// shared with the k = 3 envelope check
std::optional<SpiralRun> ff3_run;

Outcome ff_spiral() {
  const auto r = realize_ff(1, 1, 3);
  if (!std::holds_alternative<PiecewiseSystem>(r)) return {false, "realize_ff(1,1,3) refused"};
  const auto ladder = geometric_ladder(5.7e-3, 1e-4);
  ff3_run = spiral_dimension(std::get<PiecewiseSystem>(r), 0.25, 200, ladder);
  const double d = ff3_run->estimate.value, want = predicted_spiral_dimension(FocusKind::FF, 3).value;
  const double decades = std::log10(ladder.front() / ladder.back());
  return {std::abs(d - want) <= 0.1 && decades >= 1.5 && ff3_run->seconds < 600,
          fmt("200 turns, %.2f decades, d = %.4f (want %.4f +- 0.1), %.1f s", decades, d, want, ff3_run->seconds)};
}

Outcome pp_spiral() {
  const auto r = realize_pp(4);
  if (!std::holds_alternative<PiecewiseSystem>(r)) return {false, "realize_pp(4) refused"};
  const auto& s = std::get<PiecewiseSystem>(r);
  const ContactClass c = classify(s);
  const std::string jet = s.metadata.at("return_jet_text");
  const SpiralRun run = spiral_dimension(s, 0.45, 200, geometric_ladder(3.2e-3, 5.6e-5));
  const double d = run.estimate.value, want = predicted_spiral_dimension(FocusKind::PP, 4).value;
  return {c.type == PseudoFocusType::PP && jet == "t - 2*t^4" && std::abs(d - want) <= 0.1,
          fmt("P = %s, d = %.4f (want %.4f +- 0.1), %.1f s", jet.c_str(), d, want, run.seconds)};
}

double band_width(const DimensionEstimate& e, double d, std::size_t first, std::size_t last) {
  const auto [lo, hi] = ratio_band(e, d, first, last);
  return hi / lo;
}

Outcome degeneracy_signal() {
  const auto r = realize_ff(1, 1, 2);
  if (!std::holds_alternative<PiecewiseSystem>(r)) return {false, "realize_ff(1,1,2) refused"};
  // rungs 0..4 span the first decade, 0..8 the second
  const auto ladder = geometric_ladder(1e-2, 1e-4);
  const SpiralRun run = spiral_dimension(std::get<PiecewiseSystem>(r), 0.1, 400, ladder);
  const double w1 = band_width(run.estimate, 1.0, 0, 5), w2 = band_width(run.estimate, 1.0, 0, ladder.size());
  bool monotone = true;
  double prev = 1;
  for (std::size_t last = 2; last <= ladder.size(); ++last) {
    const double w = band_width(run.estimate, 1.0, 0, last);
    monotone = monotone && w >= prev;
    prev = w;
  }
  if (!ff3_run) return {false, "k = 3 run unavailable"};
  const double d3 = predicted_spiral_dimension(FocusKind::FF, 3).value;
  const double w3 = band_width(ff3_run->estimate, d3, 0, ff3_run->estimate.ladder.size());
  return {monotone && w1 >= 1.5 && w2 / w1 >= 1.5 && w3 <= 3,
          fmt("k=2 band x%.2f after one decade, x%.2f more after the second%s; k=3 band x%.2f (limit 3)", w1, w2 / w1,
              monotone ? "" : " (not monotone)", w3)};
}

bool ff_rule(int k1, int k2, int k) {
  const int big = std::max(k1, k2), small = std::min(k1, k2);
  if (big == small) return k >= 2 * small + 1 || k % 2 == 0;
  return k == 2 * small + 1 || (k % 2 == 0 && k < 2 * small + 1);
}

bool mixed_rule(int k, int n) { return n == 2 * k + 1 || (n % 2 == 0 && n < 2 * k + 1); }

Outcome feasibility_table() {
  int cases = 0, bad = 0;
  std::string first_bad;
  auto record = [&](bool realized, bool stated, bool solvable, const std::string& label) {
    ++cases;
    if (realized != stated || stated != solvable) {
      ++bad;
      if (first_bad.empty()) first_bad = label;
    }
  };
  for (int k1 = 0; k1 <= 3; ++k1) {
    for (int k2 = 0; k2 <= 3; ++k2) {
      for (int k = 1; k <= 9; ++k) {
        const bool realized = std::holds_alternative<PiecewiseSystem>(realize_ff(k1, k2, k));
        record(realized, ff_rule(k1, k2, k), oracle::ff_solvable(k1, k2, k), fmt("ff(%d,%d,%d)", k1, k2, k));
      }
    }
  }
  for (int k = 0; k <= 3; ++k) {
    for (int n = 1; n <= 9; ++n) {
      const bool realized = std::holds_alternative<PiecewiseSystem>(realize_mixed(k, n));
      record(realized, mixed_rule(k, n), oracle::mixed_solvable(k, n), fmt("mixed(%d,%d)", k, n));
    }
  }
  return {bad == 0, fmt("%d cases, %d disagreements%s%s", cases, bad, bad ? ", first " : "", first_bad.c_str())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("pfocus_acceptance_" + std::to_string(::getpid()));
  std::vector<std::string> bodies;
  std::vector<int> codes;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    const std::string cmd = std::string("\"") + PFOCUS_CLI +
                            "\" verify --type ff --k1 1 --k2 1 --k 3 --turns 60 --seed 42 --out \"" + dir.string() +
                            "\" > /dev/null 2>&1";
    codes.push_back(std::system(cmd.c_str()));
    bodies.push_back(slurp(dir / "verify.json"));
  }
  fs::remove_all(root);
  const bool same = !bodies[0].empty() && bodies[0] == bodies[1];
  return {same && codes[0] == codes[1], fmt("two verify runs with seed 42: %zu bytes, %s", bodies[0].size(),
                                            same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"jet algebra exactness", jet_round_trips},
      {"squares of reversing jets", squares_difference},
      {"normal forms", normal_forms},
      {"orbit dimension of x - x^a", orbit_dimensions},
      {"dimension of n^-a", power_sequences},
      {"semi-monodromy closed forms", semi_monodromy_closed_forms},
      {"parabolic involutions", involutions},
      {"FF spiral, k = 3", ff_spiral},
      {"PP spiral, k = 4", pp_spiral},
      {"degeneracy at k = 2", degeneracy_signal},
      {"realization feasibility table", feasibility_table},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
