#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "brint/brownian.hpp"
#include "brint/cactus.hpp"
#include "brint/capacity.hpp"
#include "brint/interlacement.hpp"
#include "brint/percolation.hpp"
#include "brint/renorm.hpp"
#include "brint/sausage_graph.hpp"
#include "brint/shape.hpp"
#include "brint/stats.hpp"

namespace brint::cli {

namespace {

std::string str_of(const BigInt& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string u(std::size_t v) { return std::to_string(v); }

int dim_param(const Params& p) {
  const long d = p.integer("d");
  if (d < kMinDim || d > kMaxDim) throw ConfigError("d must lie in [3, 8] (got " + std::to_string(d) + ")");
  return int(d);
}

NormTag norm_param(const Params& p) {
  const std::string& n = p.str("norm");
  if (n == "linf") return NormTag::linf;
  if (n == "euclidean") return NormTag::euclidean;
  throw ConfigError("norm must be linf or euclidean (got '" + n + "')");
}

PathMode mode_param(const Params& p) {
  const std::string& m = p.str("mode");
  if (m == "window") return PathMode::window;
  if (m == "escape") return PathMode::escape;
  throw ConfigError("mode must be window or escape (got '" + m + "')");
}

Point origin(int d) { return Point(d); }

std::vector<double> increasing_grid(const Params& p, const std::string& key) {
  auto g = p.reals(key);
  if (g.empty()) throw ConfigError(key + ": empty list");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw ConfigError(key + ": values must be strictly increasing");
  }
  return g;
}

// ---------------------------------------------------------------- capacity

CommandOutput run_capacity(const Params& p, const RngSpec& rng, Exec exec) {
  const int d = dim_param(p);
  const std::string shape = p.str("shape");
  SimParams sim;
  sim.n_walkers = p.count("walkers");
  sim.eps_hit = p.real("eps_hit");
  sim.rho_big = p.real("rho_big");
  CommandOutput out{CsvTable({"shape", "d", "size", "method", "value", "std_error", "n_walkers", "bias_bound",
                              "reference", "rel_error"}),
                    {}};
  ShapePtr K;
  double size = 0.0;
  std::optional<double> ref;
  CapacityEstimate mc;
  if (shape == "ball" || shape == "box") {
    size = p.real("R");
    if (!(size > 0.0)) throw ConfigError("R must be positive");
    if (shape == "ball") {
      K = std::make_shared<BallShape>(origin(d), size);
      ref = cap_ball_closed_form(d, size).value;
    } else {
      K = std::make_shared<BoxShape>(origin(d), size);
    }
    mc = estimate_capacity_mc(*K, sim, rng.child(1), exec);
  } else if (shape == "frame") {
    size = double(p.integer("L"));
    K = std::make_shared<FrameShape>(d, p.integer("L"), model_constants(d).beta);
    mc = frame_capacity(p.integer("L"), d, sim, rng.child(1), exec);
  } else {
    throw ConfigError("shape must be ball, box or frame (got '" + shape + "')");
  }
  auto row = [&](const CapacityEstimate& c) {
    out.table.add({shape, std::to_string(d), fmt(size), to_string(c.method), fmt(c.value), fmt(c.std_error),
                   u(c.n_walkers), fmt(c.bias_bound), fmt(ref), ref ? fmt(c.value / *ref - 1.0) : "NA"});
  };
  row(mc);
  if (p.flag("bounds")) {
    const VoxelSet vs = voxelize(*K, p.real("voxel_spacing"));
    if (vs.cells.size() > p.count("max_voxels"))
      throw ConfigError("voxelization has " + u(vs.cells.size()) + " cells, above max_voxels");
    const auto [lo, hi] = variational_capacity_bounds(vs, exec);
    row(lo);
    row(hi);
  }
  return out;
}

// ---------------------------------------------------------------- sample

CommandOutput run_sample(const Params& p, const RngSpec& rng, Exec) {
  const int d = dim_param(p);
  const BoxRegion K(origin(d), p.real("window"), norm_param(p));
  SimParams sim;
  sim.step_h = p.real("step_h");
  sim.rho_esc = p.real("rho_esc");
  sim.n_walkers = p.count("walkers");
  const WindowSample s = sample_window(K, p.real("r"), p.real("alpha"), sim, rng, mode_param(p));
  std::vector<std::string> head{"id", "label", "n_points", "n_breaks", "termination"};
  for (int j = 0; j < d; ++j) head.push_back("start_" + std::to_string(j));
  for (int j = 0; j < d; ++j) head.push_back("end_" + std::to_string(j));
  CommandOutput out{CsvTable(head), {}};
  for (const auto& t : s.trajectories) {
    const char* term = t.path.termination == Termination::escaped    ? "escaped"
                       : t.path.termination == Termination::max_steps ? "max_steps"
                                                                      : "stopped";
    std::vector<std::string> row{u(t.id), fmt(t.label), u(t.path.size()), u(t.path.breaks.size()), term};
    const Point a = t.path.front(), b = t.path.back();
    for (int j = 0; j < d; ++j) row.push_back(fmt(a[j]));
    for (int j = 0; j < d; ++j) row.push_back(fmt(b[j]));
    out.table.add(std::move(row));
  }
  out.meta.emplace_back("enlarged_capacity", fmt(s.enlarged_cap.value));
  out.meta.emplace_back("enlarged_capacity_se", fmt(s.enlarged_cap.std_error));
  out.meta.emplace_back("n_trajectories", u(s.size()));
  if (!p.str("dump").empty()) {
    std::ostringstream os;
    write_window_sample(os, s);
    atomic_write(p.str("dump"), os.str());
    out.meta.emplace_back("dump", p.str("dump"));
  }
  return out;
}

// ---------------------------------------------------------------- vacancy

CommandOutput run_vacancy(const Params& p, const RngSpec& rng, Exec exec) {
  const int d = dim_param(p);
  const double r = p.real("r");
  const BoxRegion K(origin(d), p.real("window"), NormTag::linf);
  const BoxRegion K0(origin(d), p.real("target"), NormTag::linf);
  if (!K.contains_region(K0)) throw ConfigError("target box must lie inside the window");
  const auto alphas = increasing_grid(p, "alphas");
  const std::size_t M = p.count("replicas");
  SimParams sim;
  sim.step_h = p.real("step_h");
  sim.n_walkers = p.count("walkers");
  const WindowSampler ws({K, r, alphas.back(), sim, PathMode::window, false}, rng.child(1));
  const CapacityEstimate cap0 = enlarged_capacity(K0, r, sim, rng.child(2));
  const RngSpec reps = rng.child(3);
  const auto vac = map_indices<std::vector<std::uint8_t>>(
      M,
      [&](std::size_t i) {
        const WindowSample s = ws.sample(reps.child(i));
        std::vector<std::uint8_t> v;
        for (double a : alphas) v.push_back(vacancy_indicator(s, a, K0));
        return v;
      },
      exec);
  CommandOutput out{CsvTable({"alpha", "replicas", "vacant", "p_hat", "ci95", "cap_target", "prediction"}), {}};
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    std::size_t hits = 0;
    for (const auto& v : vac) hits += v[k];
    const double ph = M ? double(hits) / double(M) : 0.0;
    out.table.add({fmt(alphas[k]), u(M), u(hits), fmt(ph), fmt(binomial_ci95(hits, M)), fmt(cap0.value),
                   fmt(std::exp(-alphas[k] * cap0.value))});
    if (ph > 0.0) {
      xs.push_back(alphas[k]);
      ys.push_back(std::log(ph));
    }
  }
  out.meta.emplace_back("cap_target", fmt(cap0.value));
  out.meta.emplace_back("cap_target_se", fmt(cap0.std_error));
  out.meta.emplace_back("cap_window", fmt(ws.enlarged_cap().value));
  if (xs.size() >= 2) {
    const LinearFit f = linear_fit(xs, ys);
    out.meta.emplace_back("fit_slope", fmt(f.slope));
    out.meta.emplace_back("fit_r2", fmt(f.r2));
  }
  return out;
}

// ---------------------------------------------------------------- graph-distance

CommandOutput run_graph_distance(const Params& p, const RngSpec& rng, Exec exec) {
  const int d = dim_param(p);
  const double w = p.real("window");
  const double r = p.real("r");
  const double alpha = p.real("alpha");
  const BoxRegion K(origin(d), w, NormTag::linf);
  auto mult = increasing_grid(p, "ladder");
  std::vector<double> ladder;
  for (double m : mult) ladder.push_back(m * w);
  SimParams sim;
  sim.step_h = p.real("step_h");
  sim.n_walkers = p.count("walkers");
  sim.rho_esc = ladder.back();
  const std::size_t M = p.count("replicas");
  const std::size_t audit_max = p.count("audit_max_segments");
  const WindowSampler ws({K, r, alpha, sim, PathMode::escape, false}, rng.child(1));
  struct Rep {
    std::vector<DiameterRow> rows;
    std::vector<int> audit;  // -1 skipped, 0 mismatch, 1 match
  };
  const RngSpec reps = rng.child(2);
  const auto res = map_indices<Rep>(
      M,
      [&](std::size_t i) {
        Rep rep;
        const WindowSample s = ws.sample(reps.child(i));
        rep.rows = diameter_probe(s, alpha, K, ladder, Exec::serial);
        for (double rho : ladder) {
          std::vector<Trajectory> cut;
          std::size_t segs = 0;
          for (const auto& t : s.trajectories) {
            if (t.label > alpha) continue;
            cut.push_back(cut_at_radius(t.path, K.center, rho));
            segs += cut.back().size();
          }
          if (segs > audit_max) {
            rep.audit.push_back(-1);
            continue;
          }
          std::vector<const Trajectory*> ptr;
          for (const auto& c : cut) ptr.push_back(&c);
          rep.audit.push_back(build_graph(ptr, r, Exec::serial).edges() == build_graph_brute(ptr, r).edges());
        }
        return rep;
      },
      exec);
  const int sd = s_d(d);
  CommandOutput out{CsvTable({"rho_esc", "replicas", "n_pairs", "pairs_le1", "pairs_le_sd", "pairs_ge2",
                              "unreachable", "frac_le1", "frac_le_sd", "frac_ge2", "audited", "audit_mismatches"}),
                    {}};
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    std::uint64_t pairs = 0, le1 = 0, lesd = 0, unreach = 0;
    std::size_t audited = 0, bad = 0;
    for (const auto& rep : res) {
      const DiameterRow& row = rep.rows[k];
      pairs += row.n_pairs;
      unreach += row.unreachable;
      for (std::size_t h = 1; h < row.hop_counts.size(); ++h) {
        if (h <= 1) le1 += row.hop_counts[h];
        if (int(h) <= sd) lesd += row.hop_counts[h];
      }
      if (rep.audit[k] >= 0) {
        ++audited;
        bad += rep.audit[k] == 0;
      }
    }
    const double np = double(pairs);
    auto frac = [&](std::uint64_t x) { return pairs ? fmt(double(x) / np) : std::string("NA"); };
    out.table.add({fmt(ladder[k]), u(M), u(pairs), u(le1), u(lesd), u(pairs - le1), u(unreach), frac(le1),
                   frac(lesd), frac(pairs - le1), u(audited), u(bad)});
  }
  out.meta.emplace_back("s_d", std::to_string(sd));
  out.meta.emplace_back("cap_window", fmt(ws.enlarged_cap().value));
  return out;
}

// ---------------------------------------------------------------- cactus

CommandOutput run_cactus(const Params& p, const RngSpec& rng, Exec exec) {
  CactusExperimentConfig c;
  c.d = dim_param(p);
  c.s_values.clear();
  for (long s : p.integers("s")) c.s_values.push_back(int(s));
  c.N_values.clear();
  for (long n : p.integers("N")) c.N_values.push_back(int(n));
  c.R_values = p.reals("R");
  c.replicas = p.count("replicas");
  c.alpha = p.real("alpha");
  c.r_in = p.real("r_in");
  c.c0 = p.real("c0");
  c.c0_samples = p.count("c0_samples");
  c.sim.step_h = p.real("step_h");
  c.sim.n_walkers = p.count("walkers");
  c.bounds_max_voxels = p.count("bounds_max_voxels");
  const CactusExperimentResult res = cactus_capacity_experiment(c, rng, exec);
  CommandOutput out{CsvTable({"d", "s", "N", "R", "replicas", "mean_cap", "se_cap", "rel_var", "ball_ratio"}), {}};
  for (const auto& s : res.summaries) {
    out.table.add({std::to_string(s.d), std::to_string(s.s), std::to_string(s.N), fmt(s.R), u(c.replicas),
                   fmt(s.mean_cap), fmt(s.se_cap), fmt(s.rel_var), fmt(s.ball_ratio)});
  }
  out.meta.emplace_back("c0", fmt(res.c0));
  for (const auto& f : res.fits) {
    const std::string key = "fit." + f.kind + ".s" + std::to_string(f.s) + ".fixed_" + fmt(f.fixed);
    out.meta.emplace_back(key + ".exponent", fmt(f.exponent));
    out.meta.emplace_back(key + ".r2", fmt(f.r2));
  }
  return out;
}

// ---------------------------------------------------------------- percolation

CrossingSetup crossing_setup(const Params& p, const std::string& radius_key) {
  CrossingSetup st;
  st.d = dim_param(p);
  st.r = p.real(radius_key);
  st.L = p.real("L");
  st.mode = parse_crossing_mode(p.str("mode"));
  st.spacing = p.real("spacing");
  st.sim.step_h = p.real("step_h");
  st.sim.n_walkers = p.count("walkers");
  return st;
}

void scan_rows(CsvTable& t, const std::string& radius, const ScanResult& r, const std::vector<std::string>& tail) {
  for (std::size_t k = 0; k < r.curve.size(); ++k) {
    const auto& e = r.curve[k];
    std::vector<std::string> row;
    if (!radius.empty()) row.push_back(radius);
    for (const auto& s : std::vector<std::string>{fmt(e.alpha), fmt(e.L), to_string(e.mode), u(e.n_replicas),
                                                  u(e.successes), fmt(e.p_hat), fmt(e.ci95), fmt(r.p_iso[k]),
                                                  fmt(r.alpha_half)})
      row.push_back(s);
    row.insert(row.end(), tail.begin(), tail.end());
    t.add(std::move(row));
  }
}

CommandOutput run_percolation_scan(const Params& p, const RngSpec& rng, Exec exec) {
  const CrossingSetup st = crossing_setup(p, "r");
  const auto grid = increasing_grid(p, "alphas");
  const ScanResult r = threshold_scan(grid, st, p.count("replicas"), rng, exec);
  CommandOutput out{
      CsvTable({"alpha", "L", "mode", "replicas", "successes", "p_hat", "ci95", "p_iso", "alpha_half"}), {}};
  scan_rows(out.table, "", r, {});
  out.meta.emplace_back("alpha_half", fmt(r.alpha_half));
  out.meta.emplace_back("cap_window", fmt(r.window_cap.value));
  return out;
}

CommandOutput run_scaling_check(const Params& p, const RngSpec& rng, Exec exec) {
  const CrossingSetup st = crossing_setup(p, "r1");
  const double r1 = st.r, r2 = p.real("r2");
  const auto grid = increasing_grid(p, "alphas");
  const ScalingReport rep = scaling_check(r1, r2, grid, st, p.count("replicas"), rng, exec);
  CommandOutput out{CsvTable({"radius", "alpha", "L", "mode", "replicas", "successes", "p_hat", "ci95", "p_iso",
                              "alpha_half", "ratio", "target"}),
                    {}};
  const std::vector<std::string> tail{fmt(rep.ratio), fmt(rep.target)};
  scan_rows(out.table, fmt(r1), rep.scan1, tail);
  scan_rows(out.table, fmt(r2), rep.scan2, tail);
  out.meta.emplace_back("ratio", fmt(rep.ratio));
  out.meta.emplace_back("target", fmt(rep.target));
  return out;
}

// ---------------------------------------------------------------- renorm

CommandOutput run_renorm(const Params& p, const RngSpec& rng, Exec exec) {
  const std::string task = p.str("task");
  const long dl = p.integer("d");
  if (dl < 2 || dl > kMaxDim) throw ConfigError("d must lie in [2, 8]");
  const int d = int(dl);
  const long nmax = p.integer("n");
  if (nmax < 0 || nmax > 10) throw ConfigError("n must lie in [0, 10]");
  const long L0 = p.integer("L0");
  const std::size_t trials = p.count("samples");
  CommandOutput out{
      CsvTable({"task", "d", "n", "L0", "L", "value", "std_error", "trials", "failures"}), {}};
  auto row = [&](long n, long L, const std::string& v, const std::string& se, std::size_t tr, std::size_t fail) {
    out.table.add({task, std::to_string(d), std::to_string(n), std::to_string(L0), std::to_string(L), v, se, u(tr),
                   u(fail)});
  };
  if (task == "counts") {
    for (long n = 0; n <= nmax; ++n) row(n, 0, str_of(count_embeddings(d, int(n))), "NA", 0, 0);
    if (d <= 3) {
      out.meta.emplace_back("brute_depth1", str_of(count_embeddings_brute_depth1(d, L0)));
      out.meta.emplace_back("per_node_constant", str_of(per_node_constant(d)));
    }
  } else if (task == "spreadout") {
    for (long n = 1; n <= nmax; ++n) {
      const RngSpec base = rng.child(std::uint64_t(n));
      const auto bad = map_indices<int>(
          trials,
          [&](std::size_t i) {
            Rng g(base.child(i));
            const auto e = sample_embedding(d, int(n), L0, LatticePoint{}, EmbeddingTarget::full_lattice, g);
            return int(!audit_embedding(e).ok || !verify_spreadout(e));
          },
          exec);
      row(n, 0, "NA", "NA", trials, std::size_t(std::accumulate(bad.begin(), bad.end(), 0)));
    }
  } else if (task == "extract") {
    const RngSpec base = rng.child(1);
    const auto bad = map_indices<int>(
        trials,
        [&](std::size_t i) {
          Rng g(base.child(i));
          const auto path = random_crossing_path(d, LatticePoint{}, int(nmax), L0, g);
          try {
            const auto e = extract_embedding_from_path(path, d, LatticePoint{}, int(nmax), L0);
            return int(!leaves_on_path(e, path) || !verify_spreadout(e));
          } catch (const ExtractionError&) {
            return 1;
          }
        },
        exec);
    row(nmax, 0, "NA", "NA", trials, std::size_t(std::accumulate(bad.begin(), bad.end(), 0)));
  } else if (task == "leaf-capacity") {
    if (d < 3) throw ConfigError("leaf-capacity needs d >= 3");
    for (long n = 0; n <= nmax; ++n) {
      Rng g(rng.child(std::uint64_t(n)));
      const auto e = sample_embedding(d, int(n), L0, LatticePoint{}, EmbeddingTarget::full_lattice, g);
      const auto c = embedding_capacity_lb(e);
      row(n, 0, fmt(c.value), "NA", 1, 0);
    }
  } else if (task == "frame") {
    if (d < 3) throw ConfigError("frame needs d >= 3");
    SimParams sim;
    sim.n_walkers = p.count("walkers");
    for (long L : p.integers("L")) {
      const auto c = frame_capacity(L, d, sim, rng.child(std::uint64_t(L)), exec);
      row(0, L, fmt(c.value), fmt(c.std_error), c.n_walkers, 0);
    }
  } else {
    throw ConfigError("task must be counts, spreadout, extract, leaf-capacity or frame (got '" + task + "')");
  }
  return out;
}

// ---------------------------------------------------------------- renewal

CommandOutput run_renewal(const Params& p, const RngSpec& rng, Exec exec) {
  const int d = dim_param(p);
  const auto ts = increasing_grid(p, "t");
  if (ts.front() < 0.0) throw ConfigError("t values must be nonnegative");
  const std::size_t M = p.count("replicas");
  const double h = p.real("step_h");
  // One chain per replica up to the largest horizon; N^t is read off the
  // exit times for every smaller t.
  const auto counts = map_indices<std::vector<double>>(
      M,
      [&](std::size_t i) {
        const RenewalRecord rec = renewal_count(d, ts.back(), h, rng.child(i));
        std::vector<double> c;
        for (double t : ts) {
          if (t == 0.0) {
            c.push_back(0.0);
            continue;
          }
          const auto below = std::lower_bound(rec.tau_times.begin(), rec.tau_times.end(), t) - rec.tau_times.begin();
          c.push_back(double(below + 1));
        }
        return c;
      },
      exec);
  CommandOutput out{CsvTable({"t", "replicas", "mean", "variance", "mean_over_t"}), {}};
  std::vector<double> means, vars;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    RunningStats st;
    for (const auto& c : counts) st.add(c[k]);
    means.push_back(st.mean());
    vars.push_back(st.variance());
    out.table.add({fmt(ts[k]), u(M), fmt(st.mean()), fmt(st.variance()), ts[k] > 0 ? fmt(st.mean() / ts[k]) : "NA"});
  }
  if (ts.size() >= 2) {
    const LinearFit fm = linear_fit(ts, means), fv = linear_fit(ts, vars);
    out.meta.emplace_back("mean_slope", fmt(fm.slope));
    out.meta.emplace_back("mean_r2", fmt(fm.r2));
    out.meta.emplace_back("variance_slope", fmt(fv.slope));
    out.meta.emplace_back("variance_r2", fmt(fv.r2));
  }
  return out;
}

// ---------------------------------------------------------------- convolution

CommandOutput run_convolution(const Params& p, const RngSpec&, Exec) {
  const int d = dim_param(p);
  const long n = p.integer("n");
  if (n < 0) throw ConfigError("n must be nonnegative");
  const auto xs = p.integers("x");
  const auto cuts = p.integers("box_cut");
  const long factor = p.integer("box_factor");
  CommandOutput out{CsvTable({"d", "n", "x", "box_cut", "value"}), {}};
  for (long x : xs) {
    std::vector<long> cs = cuts;
    if (cs.empty()) cs.push_back(factor * std::max(1L, std::labs(x)));
    for (long B : cs) {
      LatticePoint pt{};
      pt[0] = x;
      out.table.add({std::to_string(d), std::to_string(n), std::to_string(x), std::to_string(B),
                     fmt(lattice_convolution(d, int(n), pt, B))});
    }
  }
  if (xs.size() >= 2 && cuts.empty()) {
    std::vector<double> ax, v;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] > 0) {
        ax.push_back(double(xs[i]));
        v.push_back(lattice_convolution(d, int(n), LatticePoint{xs[i]}, factor * xs[i]));
      }
    }
    if (ax.size() >= 2) out.meta.emplace_back("fit_exponent", fmt(loglog_fit(ax, v).slope));
  }
  return out;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"capacity",
       "Monte Carlo capacity of a ball, box or inflated frame",
       {{"d", "3", "dimension"},
        {"shape", "ball", "ball, box or frame"},
        {"R", "1", "ball radius or box half-width"},
        {"L", "32", "frame size"},
        {"walkers", "100000", "launched walkers"},
        {"eps_hit", "0", "hit tolerance (0: 1e-3 x circumradius)"},
        {"rho_big", "0", "launch radius (0: 1.25 x circumradius)"},
        {"bounds", "false", "add voxel variational bounds"},
        {"voxel_spacing", "0.2", "voxel side for the bounds"},
        {"max_voxels", "20000", "refuse larger voxelizations"}},
       run_capacity},
      {"sample",
       "Interlacement trajectories entering a window",
       {{"d", "3", "dimension"},
        {"window", "2", "window half-width"},
        {"norm", "linf", "linf or euclidean window"},
        {"r", "1", "sausage radius"},
        {"alpha", "0.5", "level"},
        {"mode", "window", "window or escape"},
        {"step_h", "0.01", "time step"},
        {"rho_esc", "0", "escape radius (escape mode; 0: default)"},
        {"walkers", "100000", "walkers for the window capacity"},
        {"dump", "", "optional path for the full sample"}},
       run_sample},
      {"vacancy",
       "Frequency of a vacant target box against the capacity law",
       {{"d", "3", "dimension"},
        {"r", "1", "sausage radius"},
        {"window", "1", "sampling window half-width"},
        {"target", "0.25", "target box half-width"},
        {"alphas", "0.05,0.1,0.2", "levels"},
        {"replicas", "10000", "independent windows"},
        {"step_h", "0.0033333333333333335", "time step"},
        {"walkers", "100000", "walkers per capacity estimate"}},
       run_vacancy},
      {"graph-distance",
       "Hop distances in the sausage graph across escape radii",
       {{"d", "3", "dimension"},
        {"window", "2", "window half-width"},
        {"r", "1", "sausage radius"},
        {"alpha", "0.5", "level"},
        {"ladder", "4,8,16", "escape radii as multiples of the window half-width"},
        {"step_h", "0.01", "time step"},
        {"replicas", "4", "independent samples"},
        {"walkers", "100000", "walkers for the window capacity"},
        {"audit_max_segments", "20000", "largest instance compared with the brute-force graph"}},
       run_graph_distance},
      {"cactus",
       "Capacity of iterated sausage cacti against R and N",
       {{"d", "5", "dimension"},
        {"s", "1", "generations"},
        {"N", "1,2,4", "paths per cactus"},
        {"R", "4,8,16", "cactus scales"},
        {"replicas", "200", "replicas per (s, N, R)"},
        {"alpha", "0.001", "level for later generations"},
        {"r_in", "2", "inner radius for later generations"},
        {"c0", "0", "time factor (0: 0.01 exit-time quantile)"},
        {"c0_samples", "100000", "samples for the quantile"},
        {"step_h", "0.002", "time step"},
        {"walkers", "2000", "walkers per capacity estimate"},
        {"bounds_max_voxels", "0", "voxel bounds up to this size (0: off)"}},
       run_cactus},
      {"percolation-scan",
       "Crossing probability curve and pseudo-threshold",
       {{"d", "3", "dimension"},
        {"r", "1", "sausage radius"},
        {"L", "16", "annulus scale"},
        {"mode", "vacant_annulus", "vacant_annulus, lattice, slab or occupied"},
        {"alphas", "0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1,1.05,1.1", "levels"},
        {"replicas", "500", "independent windows"},
        {"spacing", "0", "grid spacing (0: r/2)"},
        {"step_h", "0", "time step (0: mean step length r)"},
        {"walkers", "100000", "walkers for the window capacity"}},
       run_percolation_scan},
      {"scaling-check",
       "Pseudo-thresholds at two sausage radii with proportional geometry",
       {{"d", "3", "dimension"},
        {"r1", "1", "first radius"},
        {"r2", "2", "second radius"},
        {"L", "16", "annulus scale at r1"},
        {"mode", "vacant_annulus", "crossing mode"},
        {"alphas", "0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1,1.05,1.1", "levels at r1"},
        {"replicas", "500", "windows per radius"},
        {"spacing", "0", "grid spacing at r1 (0: r/2)"},
        {"step_h", "0", "time step at r1 (0: mean step length r)"},
        {"walkers", "100000", "walkers for the window capacity"}},
       run_scaling_check},
      {"renorm",
       "Renormalization-tree counts, audits and capacity bounds",
       {{"task", "counts", "counts, spreadout, extract, leaf-capacity or frame"},
        {"d", "2", "dimension"},
        {"n", "1", "tree depth (largest depth for counts, spreadout and leaf-capacity)"},
        {"L0", "1", "base scale"},
        {"samples", "1000", "random embeddings or paths"},
        {"L", "32,64,128", "frame sizes"},
        {"walkers", "100000", "walkers per frame capacity"}},
       run_renorm},
      {"renewal",
       "Mean and variance of unit-ball renewal counts",
       {{"d", "3", "dimension"},
        {"t", "10,20,30,40,50,60,70,80,90,100", "horizons"},
        {"replicas", "10000", "independent chains"},
        {"step_h", "0", "time step (0: exact exit-time law)"}},
       run_renewal},
      {"convolution",
       "Truncated lattice Green-function chain sums",
       {{"d", "5", "dimension"},
        {"n", "1", "interior vertices"},
        {"x", "8,16,32", "endpoint distances along the first axis"},
        {"box_cut", "", "explicit box half-widths (default box_factor x |x|)"},
        {"box_factor", "4", "box half-width per unit of |x|"}},
       run_convolution},
  };
  return list;
}

}  // namespace brint::cli
