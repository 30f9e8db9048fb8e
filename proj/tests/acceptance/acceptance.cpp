// Acceptance checks. Each criterion prints one line "criterion N: PASS|FAIL ..." and
// the process exits nonzero when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "brint/brownian.hpp"
#include "brint/cactus.hpp"
#include "brint/capacity.hpp"
#include "brint/interlacement.hpp"
#include "brint/percolation.hpp"
#include "brint/renorm.hpp"
#include "brint/sausage_graph.hpp"
#include "brint/stats.hpp"

using namespace brint;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string num(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

std::string brint_binary;  // set from the command line for criterion 14

// 1. Monte Carlo ball capacities against R^{d-2} / c_d.
Outcome capacity_oracle() {
  Outcome o{true, ""};
  const std::pair<int, double> cases[] = {{3, 1.0}, {3, 2.0}, {5, 1.0}};
  std::uint64_t k = 0;
  for (auto [d, R] : cases) {
    Timer t;
    SimParams sim;
    sim.n_walkers = 100000;
    const auto est = estimate_capacity_mc(BallShape(Point(d), R), sim, RngSpec{1001, 0, k++});
    const double exact = std::pow(R, d - 2) / green_constant(d);
    const double rel = est.value / exact - 1.0;
    const double secs = t.seconds();
    const bool ok = std::abs(rel) < 0.02 && secs < 60.0;
    o.pass = o.pass && ok;
    o.detail += "d=" + std::to_string(d) + " R=" + num(R) + " mc=" + num(est.value, 6) + " exact=" + num(exact, 6) +
                " rel=" + num(rel, 3) + " t=" + num(secs, 3) + "s; ";
  }
  return o;
}

// 2. log P[vacant] against alpha with slope -cap(B(K0, r)).
Outcome vacancy_law() {
  Timer t;
  const int d = 3;
  const double r = 1.0;
  const BoxRegion K(Point(d), 1.0), K0(Point(d), 0.25);
  const std::vector<double> alphas{0.05, 0.1, 0.2};
  const std::size_t M = 10000;
  SimParams sim;
  sim.step_h = 0.01 / 3;
  const WindowSampler ws({K, r, alphas.back(), sim, PathMode::window, false}, RngSpec{1002, 0, 1});
  // Independent oracle: capacity of the inflated target from a separate walk-on-spheres run.
  SimParams capsim;
  capsim.n_walkers = 400000;
  const CapacityEstimate cap0 = enlarged_capacity(K0, r, capsim, RngSpec{1002, 0, 2});
  const auto vac = map_indices<std::array<std::uint8_t, 3>>(M, [&](std::size_t i) {
    const WindowSample s = ws.sample(RngSpec{1002, i, 3});
    std::array<std::uint8_t, 3> v{};
    for (std::size_t k = 0; k < 3; ++k) v[k] = vacancy_indicator(s, alphas[k], K0);
    return v;
  });
  std::vector<double> ys;
  std::string freq;
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t n = 0;
    for (const auto& v : vac) n += v[k];
    ys.push_back(std::log(double(n) / double(M)));
    freq += num(double(n) / double(M)) + (k < 2 ? "," : "");
  }
  const LinearFit f = linear_fit(alphas, ys);
  const double rel = f.slope / -cap0.value - 1.0;
  const double secs = t.seconds();
  return {std::abs(rel) < 0.10 && f.r2 > 0.99 && secs < 600.0,
          "p_vacant=" + freq + " slope=" + num(f.slope) + " -cap=" + num(-cap0.value) + " rel=" + num(rel, 3) +
              " R2=" + num(f.r2, 6) + " t=" + num(secs, 3) + "s"};
}

// 3. Pathwise monotone couplings and superposition.
Outcome couplings() {
  const int d = 3;
  const BoxRegion K(Point(d), 1.0), K0(Point(d), 0.25);
  SimParams sim;
  sim.step_h = 0.01;
  const WindowSampler ws({K, 1.0, 1.0, sim, PathMode::window, false}, RngSpec{1003, 0, 1});
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  const std::size_t M = 2000;
  const auto vac_bad = map_indices<int>(M, [&](std::size_t i) {
    const WindowSample s = ws.sample(RngSpec{1003, i, 2});
    int bad = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
      bad += vacancy_indicator(s, grid[k], K0) && !vacancy_indicator(s, grid[k - 1], K0);
    return bad;
  });
  long vac_violations = 0;
  for (int b : vac_bad) vac_violations += b;

  // Crossing events on rasterized coupled samples.
  CrossingSetup st;
  st.L = 4;
  const CrossingSetup rs = st.resolved();
  const BoxRegion W = rs.window();
  const WindowSampler cs({W, rs.r, 2.0, rs.sim, PathMode::window, false}, RngSpec{1003, 0, 3});
  const std::size_t Mc = 200;
  const auto cross_bad = map_indices<int>(Mc, [&](std::size_t i) {
    const WindowSample s = cs.sample(RngSpec{1003, i, 4});
    const OccupancyGrid g = rasterize(s, 2.0, W, rs.spacing);
    int bad = 0;
    for (CrossingMode m : {CrossingMode::vacant_annulus, CrossingMode::occupied, CrossingMode::slab}) {
      const auto geo = annulus_geometry(g, rs.L, m);
      bool prev = crossing_event(g, m, geo, 0.0);
      for (double a = 0.1; a <= 2.0 + 1e-9; a += 0.1) {
        const bool now = crossing_event(g, m, geo, a);
        bad += is_vacant_mode(m) ? (now && !prev) : (prev && !now);
        prev = now;
      }
    }
    return bad;
  });
  long cross_violations = 0;
  for (int b : cross_bad) cross_violations += b;

  // alpha/2 + alpha/2 against alpha, independent seeds.
  const double alpha = 0.2;
  const WindowSampler full({K, 1.0, alpha, sim, PathMode::window, false}, ws.enlarged_cap());
  const WindowSampler half({K, 1.0, alpha / 2, sim, PathMode::window, false}, ws.enlarged_cap());
  const std::size_t Ms = 10000;
  const auto pair = map_indices<std::array<std::uint8_t, 2>>(Ms, [&](std::size_t i) {
    const bool a = vacancy_indicator(full.sample(RngSpec{1003, i, 5}), alpha, K0);
    const auto u = superpose(half.sample(RngSpec{1003, i, 6}), half.sample(RngSpec{1003, i, 7}));
    return std::array<std::uint8_t, 2>{std::uint8_t(a), std::uint8_t(vacancy_indicator(u, alpha, K0))};
  });
  double n1 = 0, n2 = 0;
  for (const auto& p : pair) {
    n1 += p[0];
    n2 += p[1];
  }
  const double p1 = n1 / Ms, p2 = n2 / Ms;
  const double sig = std::sqrt(p1 * (1 - p1) / Ms + p2 * (1 - p2) / Ms);
  const double z = (p1 - p2) / sig;
  return {vac_violations == 0 && cross_violations == 0 && std::abs(z) < 3.0,
          "vacancy violations=" + std::to_string(vac_violations) + "/" + std::to_string(M) +
              " replicas, crossing violations=" + std::to_string(cross_violations) + "/" + std::to_string(Mc) +
              " replicas, P_single=" + num(p1) + " P_superposed=" + num(p2) + " z=" + num(z, 3)};
}

// 4. alpha_half(r=2) / alpha_half(r=1) near 2^{2-d}.
Outcome scaling_law() {
  Timer t;
  CrossingSetup st;
  st.d = 3;
  st.r = 1.0;
  st.L = 16;
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.6 + 0.05 * i);
  const ScalingReport rep = scaling_check(1.0, 2.0, grid, st, 500, RngSpec{1004, 0, 0});
  const double secs = t.seconds();
  const bool ok = rep.ratio && *rep.ratio >= 0.375 && *rep.ratio <= 0.625 && secs < 3600.0;
  auto half = [](const ScanResult& s) { return s.alpha_half ? num(*s.alpha_half) : std::string("NA"); };
  return {ok, "alpha_half(r=1)=" + half(rep.scan1) + " alpha_half(r=2)=" + half(rep.scan2) +
                  " ratio=" + (rep.ratio ? num(*rep.ratio) : std::string("NA")) + " target=" + num(rep.target) +
                  " t=" + num(secs, 4) + "s"};
}

// 5. Renewal counts: linear mean and variance, mean slope d.
Outcome renewal() {
  Timer t;
  const int d = 3;
  std::vector<double> ts;
  for (int i = 1; i <= 10; ++i) ts.push_back(10.0 * i);
  const std::size_t M = 10000;
  // One chain per replica up to t = 100, read off at every horizon.
  const auto counts = map_indices<std::vector<double>>(M, [&](std::size_t i) {
    const RenewalRecord rec = renewal_count(d, ts.back(), 0.0, RngSpec{1005, i, 0});
    std::vector<double> c;
    for (double h : ts)
      c.push_back(double(std::lower_bound(rec.tau_times.begin(), rec.tau_times.end(), h) - rec.tau_times.begin() + 1));
    return c;
  });
  std::vector<double> mean, var;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    RunningStats s;
    for (const auto& c : counts) s.add(c[k]);
    mean.push_back(s.mean());
    var.push_back(s.variance());
  }
  const LinearFit fm = linear_fit(ts, mean), fv = linear_fit(ts, var);
  const double rel = fm.slope / d - 1.0;
  const double secs = t.seconds();
  return {fm.r2 > 0.99 && fv.r2 > 0.99 && std::abs(rel) < 0.05 && secs < 300.0,
          "mean slope=" + num(fm.slope) + " (rel " + num(rel, 3) + ") R2=" + num(fm.r2, 6) +
              " variance slope=" + num(fv.slope) + " R2=" + num(fv.r2, 6) + " t=" + num(secs, 3) + "s"};
}

std::string big(const BigInt& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// 6. Exact embedding counts.
Outcome embedding_count() {
  Timer t;
  bool ok = true;
  std::string detail;
  for (int d : {2, 3}) {
    const BigInt formula = count_embeddings(d, 1), brute = count_embeddings_brute_depth1(d);
    ok = ok && formula == brute;
    detail += "d=" + std::to_string(d) + " formula=" + big(formula) + " brute=" + big(brute) + "; ";
  }
  ok = ok && per_node_constant(2) == 4608 && per_node_constant(3) == 2994628;
  const double secs = t.seconds();
  return {ok && secs < 60.0, detail + "C(2)=" + big(per_node_constant(2)) + " C(3)=" + big(per_node_constant(3)) +
                                 " t=" + num(secs, 3) + "s"};
}

// 7. Spread-out property on random embeddings.
Outcome spreadout() {
  long violations = 0, total = 0;
  for (int d : {2, 3}) {
    const auto bad = map_indices<int>(1000, [&](std::size_t i) {
      Rng rng(RngSpec{1007, i, std::uint64_t(d)});
      const int n = 1 + int(i % 4);
      const auto e = sample_embedding(d, n, 1, LatticePoint{}, EmbeddingTarget::full_lattice, rng);
      return int(!audit_embedding(e).ok || !verify_spreadout(e));
    });
    for (int b : bad) violations += b;
    total += 1000;
  }
  return {violations == 0, "violations=" + std::to_string(violations) + "/" + std::to_string(total) +
                               " embeddings (d in {2,3}, depths 1..4)"};
}

// 8. Extraction from random crossing paths.
Outcome extraction() {
  const auto ok = map_indices<int>(100, [&](std::size_t i) {
    Rng rng(RngSpec{1008, i, 0});
    const auto path = random_crossing_path(2, LatticePoint{}, 2, 1, rng);
    try {
      const auto e = extract_embedding_from_path(path, 2, LatticePoint{}, 2, 1);
      return int(leaves_on_path(e, path) && audit_embedding(e).ok && verify_spreadout(e));
    } catch (const ExtractionError&) {
      return 0;
    }
  });
  const int n = std::accumulate(ok.begin(), ok.end(), 0);
  return {n == 100, "verified extractions=" + std::to_string(n) + "/100"};
}

// 9. Leaf capacity lower bound grows like 2^n.
Outcome leaf_capacity() {
  Timer t;
  std::vector<double> ratio;
  std::string detail;
  for (int n = 1; n <= 4; ++n) {
    Rng rng(RngSpec{1009, std::uint64_t(n), 0});
    const auto e = sample_embedding(3, n, 1, LatticePoint{}, EmbeddingTarget::full_lattice, rng);
    const double b = embedding_capacity_lb(e).value;
    ratio.push_back(b / std::pow(2.0, n));
    detail += "n=" + std::to_string(n) + " bound/2^n=" + num(ratio.back()) + "; ";
  }
  bool ok = true;
  for (double x : ratio) ok = ok && std::abs(x / ratio[0] - 1.0) <= 0.30;
  const double secs = t.seconds();
  return {ok && secs < 60.0, detail + "t=" + num(secs, 3) + "s"};
}

// 10. Convolution exponent and divergence at n = s_d.
Outcome convolution() {
  const int d = 5;
  std::vector<double> xs, v;
  std::string detail;
  for (long x : {8L, 16L, 32L}) {
    LatticePoint p{};
    p[0] = x;
    xs.push_back(double(x));
    v.push_back(lattice_convolution(d, 1, p, 4 * x));
  }
  const double slope = loglog_fit(xs, v).slope;
  detail += "n=1 exponent=" + num(slope) + "; ";
  // Box doubling at x = 0: increments of a convergent sum shrink, those of a divergent one do not.
  auto increments = [&](int n) {
    std::vector<double> s;
    for (long B : {2L, 4L, 8L}) s.push_back(lattice_convolution(d, n, LatticePoint{}, B));
    return std::pair<double, double>{s[1] - s[0], s[2] - s[1]};
  };
  const auto [a2, b2] = increments(2);
  const auto [a1, b1] = increments(1);
  detail += "n=2 increments " + num(a2) + " -> " + num(b2) + " (ratio " + num(b2 / a2) + "); n=1 increments " +
            num(a1) + " -> " + num(b1) + " (ratio " + num(b1 / a1) + ")";
  return {slope >= -1.3 && slope <= -0.7 && b2 / a2 >= 1.0, detail};
}

// 11. Cactus capacity against R and N.
Outcome cactus() {
  Timer t;
  CactusExperimentConfig cfg;
  cfg.d = 5;
  cfg.s_values = {1};
  cfg.N_values = {1, 2, 4};
  cfg.R_values = {4, 8, 16};
  cfg.replicas = 200;
  cfg.sim.step_h = 0.002;
  cfg.sim.n_walkers = 2000;
  const auto res = cactus_capacity_experiment(cfg, RngSpec{1011, 0, 0});
  std::optional<double> r_exp, n_exp;
  std::string detail = "c0=" + num(res.c0) + " ";
  for (const auto& f : res.fits) {
    detail += f.kind + "-exponent(fixed " + num(f.fixed) + ")=" + num(f.exponent) + " ";
    if (f.kind == "R" && f.fixed == 4) r_exp = f.exponent;
    if (f.kind == "N" && f.fixed == 16) n_exp = f.exponent;
  }
  const double secs = t.seconds();
  const bool ok = r_exp && n_exp && std::abs(*r_exp - 2.0) <= 0.4 && std::abs(*n_exp - 1.0) <= 0.2 && secs < 7200;
  return {ok, detail + "t=" + num(secs, 4) + "s"};
}

// 12. Frame capacities: linear in L for d = 4, L / ln L for d = 3.
Outcome frame() {
  const std::vector<double> Ls{32, 64, 128};
  SimParams sim;
  sim.n_walkers = 100000;
  std::vector<double> c4, r3;
  for (double L : Ls) {
    c4.push_back(frame_capacity(long(L), 4, sim, RngSpec{1012, std::uint64_t(L), 4}).value);
    const double c = frame_capacity(long(L), 3, sim, RngSpec{1012, std::uint64_t(L), 3}).value;
    r3.push_back(c * std::log(L) / L);
  }
  const double slope = loglog_fit(Ls, c4).slope;
  const double mean = (r3[0] + r3[1] + r3[2]) / 3;
  bool stable = true;
  for (double x : r3) stable = stable && std::abs(x / mean - 1.0) <= 0.30;
  return {slope >= 0.8 && slope <= 1.2 && stable,
          "d=4 exponent=" + num(slope) + "; d=3 cap ln L / L=" + num(r3[0]) + "," + num(r3[1]) + "," + num(r3[2])};
}

struct ProbeTotals {
  std::vector<std::uint64_t> pairs, le1, ge2;
  std::size_t audited = 0, mismatches = 0;
};

ProbeTotals graph_probe(int d, std::size_t M, std::size_t audit_every, std::uint64_t tag) {
  const double w = 1.0, r = 0.5, alpha = 0.5;
  const BoxRegion K(Point(d), w);
  const std::vector<double> ladder{4 * w, 8 * w, 16 * w};
  SimParams sim;
  sim.step_h = 0.02;
  sim.rho_esc = ladder.back();
  const WindowSampler ws({K, r, alpha, sim, PathMode::escape, false}, RngSpec{1013, 0, tag});
  struct Rep {
    std::vector<DiameterRow> rows;
    std::size_t audited = 0, bad = 0;
  };
  const auto reps = map_indices<Rep>(M, [&](std::size_t i) {
    Rep rep;
    const WindowSample s = ws.sample(RngSpec{1013, i, tag + 1});
    rep.rows = diameter_probe(s, alpha, K, ladder, Exec::serial);
    // Audit the hashed adjacency at the smallest radius, where brute force is affordable.
    std::vector<Trajectory> cut;
    std::size_t segs = 0;
    for (const auto& t : s.trajectories) {
      cut.push_back(cut_at_radius(t.path, K.center, ladder.front()));
      segs += cut.back().size();
    }
    if (i % audit_every == 0 && segs <= 40000) {
      std::vector<const Trajectory*> p;
      for (const auto& c : cut) p.push_back(&c);
      rep.audited = 1;
      rep.bad = build_graph(p, r, Exec::serial).edges() != build_graph_brute(p, r).edges();
    }
    return rep;
  });
  ProbeTotals tot;
  tot.pairs.assign(ladder.size(), 0);
  tot.le1 = tot.ge2 = tot.pairs;
  for (const auto& rep : reps) {
    tot.audited += rep.audited;
    tot.mismatches += rep.bad;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const auto& row = rep.rows[k];
      tot.pairs[k] += row.n_pairs;
      const std::uint64_t one = row.hop_counts.size() > 1 ? row.hop_counts[1] : 0;
      tot.le1[k] += one;
      tot.ge2[k] += row.n_pairs - one;
    }
  }
  return tot;
}

// 13. Hop distances across escape radii.
Outcome graph_distance() {
  // d=5 samples carry about fifty times more segment pairs, so fewer replicas
  // and a sparser audit there.
  const ProbeTotals t3 = graph_probe(3, 1000, 1, 3), t5 = graph_probe(5, 200, 10, 5);
  bool monotone = true, positive = true;
  std::string detail = "d=3 frac(<=1) by radius:";
  double prev = -1.0;
  for (std::size_t k = 0; k < t3.pairs.size(); ++k) {
    const double f = t3.pairs[k] ? double(t3.le1[k]) / double(t3.pairs[k]) : 0.0;
    monotone = monotone && t3.pairs[k] > 0 && f >= prev;
    prev = f;
    detail += " " + num(f);
  }
  detail += "; d=5 frac(>=2) by radius:";
  for (std::size_t k = 0; k < t5.pairs.size(); ++k) {
    const double f = t5.pairs[k] ? double(t5.ge2[k]) / double(t5.pairs[k]) : 0.0;
    positive = positive && f > 0.0;
    detail += " " + num(f);
  }
  const std::size_t audited = t3.audited + t5.audited, bad = t3.mismatches + t5.mismatches;
  detail += "; audited=" + std::to_string(audited) + " mismatches=" + std::to_string(bad);
  return {monotone && positive && bad == 0 && audited > 0, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 14. Byte-identical CSV across repeated runs and thread counts.
Outcome determinism() {
  if (brint_binary.empty()) return {false, "no --brint binary given"};
  const auto dir = std::filesystem::temp_directory_path() / ("brint_det_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"capacity", "--walkers 20000 --bounds true --voxel_spacing 0.25"},
      {"sample", "--walkers 5000 --alpha 1"},
      {"vacancy", "--replicas 200 --walkers 5000"},
      {"graph-distance", "--replicas 3 --walkers 5000 --ladder 2,4"},
      {"cactus", "--replicas 3 --N 1,2 --R 4,8 --c0_samples 2000 --walkers 500 --step_h 0.01"},
      {"percolation-scan", "--L 4 --replicas 100 --walkers 5000 --alphas 0.5,1,1.5,2"},
      {"scaling-check", "--L 3 --replicas 100 --walkers 5000 --alphas 0.5,1,1.5,2,3"},
      {"renorm", "--task extract --n 2 --samples 20"},
      {"renewal", "--replicas 500 --t 5,10,20"},
      {"convolution", "--x 2,4,8"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [cmd, args] : runs) {
    std::string out[3];
    int rc = 0;
    for (int k = 0; k < 3; ++k) {
      const auto path = dir / (cmd + "_" + std::to_string(k) + ".csv");
      const int threads = k == 2 ? 2 : 1;
      const std::string line = brint_binary + " " + cmd + " " + args + " --seed 17 --threads " +
                               std::to_string(threads) + " --out " + path.string() + " > /dev/null";
      rc |= std::system(line.c_str());
      out[k] = slurp(path);
    }
    const bool same = rc == 0 && !out[0].empty() && out[0] == out[1] && out[0] == out[2];
    ok = ok && same;
    detail += cmd + (same ? "=identical " : "=DIFFERENT ");
  }
  std::filesystem::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brint acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 14));
  app.add_option("--brint", brint_binary, "path of the brint executable (criterion 14)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"capacity oracle", capacity_oracle}, {"vacancy law", vacancy_law},
      {"couplings", couplings},             {"scaling law", scaling_law},
      {"renewal", renewal},                 {"embedding count", embedding_count},
      {"spread-out", spreadout},            {"extraction", extraction},
      {"leaf capacity", leaf_capacity},     {"convolution exponent", convolution},
      {"cactus scaling", cactus},           {"frame capacity", frame},
      {"graph-distance probe", graph_distance}, {"determinism", determinism},
  };
  if (selected.empty())
    for (int i = 1; i <= 14; ++i) selected.push_back(i);
  int failures = 0;
  for (int c : selected) {
    const auto& [name, fn] = all[std::size_t(c - 1)];
    Timer t;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s | %s | %.1fs\n", c, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                t.seconds());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
