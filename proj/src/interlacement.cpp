#include "brint/interlacement.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace brint {

CapacityEstimate enlarged_capacity(const BoxRegion& K, double r, const SimParams& sim, const RngSpec& rng) {
  if (K.norm == NormTag::euclidean) return cap_ball_closed_form(K.dim(), K.half_width + r);
  ShapePtr shape = make_inflated_region(K, r);
  return estimate_capacity_mc(*shape, sim, rng);
}

WindowSampler::WindowSampler(WindowConfig cfg, const RngSpec& cap_rng) : cfg_(std::move(cfg)) {
  init();
  cap_ = enlarged_capacity(cfg_.window, cfg_.r, sim_, cap_rng);
  if (cap_.method == CapMethod::mc_hitting && 1.96 * cap_.std_error > 0.05 * cap_.value) {
    throw ConfigurationError("capacity confidence interval wider than 5%; raise n_walkers");
  }
}

WindowSampler::WindowSampler(WindowConfig cfg, CapacityEstimate cap) : cfg_(std::move(cfg)), cap_(cap) {
  init();
}

void WindowSampler::init() {
  require_dim(cfg_.window.dim());
  if (!(cfg_.r > 0.0)) throw DomainError("sausage radius must be positive");
  if (!(cfg_.alpha_max >= 0.0)) throw DomainError("alpha_max must be nonnegative");
  enlarged_ = make_inflated_region(cfg_.window, cfg_.r);
  sim_ = cfg_.sim.resolved(enlarged_->circumradius());
  if (!(sim_.step_h > 0.0)) throw DomainError("step_h must be positive");
  delta_ = 3.0 * std::sqrt(sim_.step_h * cfg_.window.dim());
  // Starts must land inside the active zone.
  sim_.eps_hit = std::min(sim_.eps_hit, 0.5 * delta_);
  wos_ = {enlarged_->center(), sim_.rho_big, sim_.rho_kill, sim_.eps_hit, sim_.max_steps};
}

Trajectory WindowSampler::forward_path(const Point& start, Rng& rng) const {
  const int d = start.dim();
  const double h = sim_.step_h, sh = std::sqrt(h);
  Trajectory tr(d, h);
  tr.push(start);
  Point x = start;
  const Point& c = wos_.center;
  std::size_t steps = 0;

  if (cfg_.mode == PathMode::escape) {
    const double esc2 = sim_.rho_esc * sim_.rho_esc;
    const double circ = enlarged_->circumradius();
    tr.stop_rule_id = static_cast<int>(StopRule::Kind::escape_radius);
    for (;;) {
      while (dist2(x, c) < esc2) {
        if (steps >= sim_.max_steps) {
          tr.termination = Termination::max_steps;
          return tr;
        }
        gaussian_step(x, sh, rng);
        tr.push(x);
        ++steps;
      }
      const double D = dist(x, c);
      if (cfg_.reentry && rng.uniform() < std::pow(circ / D, d - 2)) {
        x = sample_equilibrium_with(*enlarged_, wos_, rng);
        tr.push_break(x);
        continue;
      }
      tr.termination = Termination::escaped;
      tr.escape_radius = sim_.rho_esc;
      return tr;
    }
  }

  const double zone = cfg_.r + delta_;
  const double keep = cfg_.r + 0.5 * delta_;
  const double kill2 = wos_.rho_kill * wos_.rho_kill;
  bool in_zone = true;
  while (steps < sim_.max_steps) {
    const double dk = cfg_.window.distance(x);
    if (dk <= zone) {
      if (!in_zone) {
        tr.push_break(x);
        in_zone = true;
      }
      gaussian_step(x, sh, rng);
      tr.push(x);
      ++steps;
      continue;
    }
    // Outside the active zone the path cannot touch B(K, r) before re-entering
    // B(K, keep); jump there exactly.
    in_zone = false;
    ++steps;
    const double r2 = dist2(x, c);
    if (r2 > kill2) {
      if (rng.uniform() >= std::pow(wos_.rho_big / std::sqrt(r2), d - 2)) {
        tr.termination = Termination::escaped;
        tr.escape_radius = wos_.rho_kill;
        return tr;
      }
      x = sample_return_point(x, c, wos_.rho_big, rng);
      continue;
    }
    x += (dk - keep) * rng.unit_vector(d);
  }
  tr.termination = Termination::max_steps;
  return tr;
}

WindowSample WindowSampler::sample(const RngSpec& spec, Exec exec) const {
  WindowSample s;
  s.window = cfg_.window;
  s.radius_r = cfg_.r;
  s.enlarged_cap = cap_;
  s.alpha_max = cfg_.alpha_max;
  s.sim = sim_;
  s.mode = cfg_.mode;
  s.escape_radius = cfg_.mode == PathMode::escape ? sim_.rho_esc : sim_.rho_kill;
  Rng rng(spec);
  const std::uint64_t n = rng.poisson(cfg_.alpha_max * cap_.value);
  s.trajectories.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    s.trajectories[i].label = cfg_.alpha_max * rng.uniform();
    s.trajectories[i].id = i;
  }
  for_each_index(
      n,
      [&](std::size_t i) {
        Rng ri(spec.child(i + 1));
        const Point start = sample_equilibrium_with(*enlarged_, wos_, ri);
        s.trajectories[i].path = forward_path(start, ri);
      },
      exec);
  return s;
}

WindowSample sample_window(const BoxRegion& K, double r, double alpha_max, const SimParams& sim,
                           const RngSpec& rng, PathMode mode) {
  WindowConfig cfg{K, r, alpha_max, sim, mode, false};
  if (alpha_max == 0.0) {
    WindowSampler sampler(cfg, CapacityEstimate{});
    return sampler.sample(rng);
  }
  WindowSampler sampler(cfg, rng.child(0xCA9AC17EULL));
  return sampler.sample(rng);
}

WindowSample restrict_level(const WindowSample& s, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("level must be nonnegative");
  if (alpha > s.alpha_max) throw DomainError("level exceeds the sampled alpha_max");
  WindowSample out = s;
  out.trajectories.clear();
  for (const auto& t : s.trajectories) {
    if (t.label <= alpha) out.trajectories.push_back(t);
  }
  out.alpha_max = alpha;
  return out;
}

namespace {

bool same_sim(const SimParams& a, const SimParams& b) {
  return a.step_h == b.step_h && a.rho_big == b.rho_big && a.rho_kill == b.rho_kill && a.rho_esc == b.rho_esc &&
         a.max_steps == b.max_steps && a.eps_hit == b.eps_hit;
}

}  // namespace

WindowSample superpose(const WindowSample& s1, const WindowSample& s2) {
  if (!(s1.window.center == s2.window.center) || s1.window.half_width != s2.window.half_width ||
      s1.window.norm != s2.window.norm || s1.radius_r != s2.radius_r || s1.mode != s2.mode ||
      !same_sim(s1.sim, s2.sim)) {
    throw DomainError("superpose requires identical windows, radii and simulation parameters");
  }
  WindowSample out = s1;
  std::uint64_t offset = 0;
  for (const auto& t : s1.trajectories) offset = std::max(offset, t.id + 1);
  for (const auto& t : s2.trajectories) {
    LabeledTrajectory u = t;
    u.label += s1.alpha_max;
    u.id += offset;
    out.trajectories.push_back(std::move(u));
  }
  out.alpha_max = s1.alpha_max + s2.alpha_max;
  return out;
}

double segment_box_distance2(const Point& a, const Point& b, const Point& c, double hw) {
  const int d = a.dim();
  auto f = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double g = std::abs(a[i] + t * (b[i] - a[i]) - c[i]) - hw;
      if (g > 0.0) s += g * g;
    }
    return s;
  };
  // f is a convex piecewise quadratic; its pieces change where a coordinate
  // crosses a face plane.
  double cuts[2 * kMaxDim + 2];
  int nc = 0;
  cuts[nc++] = 0.0;
  cuts[nc++] = 1.0;
  for (int i = 0; i < d; ++i) {
    const double u = b[i] - a[i];
    if (u == 0.0) continue;
    for (double face : {c[i] - hw, c[i] + hw}) {
      const double t = (face - a[i]) / u;
      if (t > 0.0 && t < 1.0) cuts[nc++] = t;
    }
  }
  std::sort(cuts, cuts + nc);
  double best = std::min(f(0.0), f(1.0));
  for (int k = 0; k + 1 < nc; ++k) {
    const double t0 = cuts[k], t1 = cuts[k + 1];
    if (t1 <= t0) continue;
    const double tm = 0.5 * (t0 + t1);
    double A = 0.0, B = 0.0;
    for (int i = 0; i < d; ++i) {
      const double u = b[i] - a[i];
      const double p = a[i] + tm * u - c[i];
      if (std::abs(p) <= hw) continue;
      const double shift = p > 0 ? hw : -hw;
      A += u * u;
      B += (a[i] - c[i] - shift) * u;
    }
    if (A > 0.0) best = std::min(best, f(std::clamp(-B / A, t0, t1)));
  }
  return best;
}

double path_region_distance(const Trajectory& t, const BoxRegion& K) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = t.size();
  if (n == 0) return best;
  if (K.norm == NormTag::euclidean) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n && t.segment_joined(i)) {
        best = std::min(best, point_segment_distance2(K.center, t.point(i), t.point(i + 1)));
      } else {
        best = std::min(best, dist2(K.center, t.point(i)));
      }
    }
    return std::max(0.0, std::sqrt(best) - K.half_width);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && t.segment_joined(i)) {
      best = std::min(best, segment_box_distance2(t.point(i), t.point(i + 1), K.center, K.half_width));
    } else {
      best = std::min(best, segment_box_distance2(t.point(i), t.point(i), K.center, K.half_width));
    }
  }
  return std::sqrt(best);
}

double path_min_norm(const Trajectory& t) {
  double best = std::numeric_limits<double>::infinity();
  const Point o(t.dim);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i + 1 < t.size() && t.segment_joined(i)) {
      best = std::min(best, point_segment_distance2(o, t.point(i), t.point(i + 1)));
    } else {
      best = std::min(best, t.point(i).norm2());
    }
  }
  return std::sqrt(best);
}

bool vacancy_indicator(const WindowSample& s, double alpha, const BoxRegion& K0) {
  if (!s.window.contains_region(K0)) throw DomainError("K0 is not contained in the sampled window");
  for (const auto& t : s.trajectories) {
    if (t.label > alpha) continue;
    if (path_region_distance(t.path, K0) <= s.radius_r) return false;
  }
  return true;
}

WindowSample restrict_annulus(const WindowSample& s, double r_in) {
  if (!(r_in >= 0.0)) throw DomainError("inner radius must be nonnegative");
  WindowSample out = s;
  out.trajectories.clear();
  for (const auto& t : s.trajectories) {
    if (r_in == 0.0 || path_min_norm(t.path) >= r_in) out.trajectories.push_back(t);
  }
  return out;
}

WindowSample scaling_transport(const WindowSample& s, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scaling factor must be positive");
  const int d = s.window.dim();
  const double lev = std::pow(lambda, 2 - d);
  WindowSample out = s;
  out.window.center *= lambda;
  out.window.half_width *= lambda;
  out.radius_r *= lambda;
  out.enlarged_cap.value *= std::pow(lambda, d - 2);
  out.enlarged_cap.std_error *= std::pow(lambda, d - 2);
  out.enlarged_cap.rho_big *= lambda;
  out.alpha_max *= lev;
  out.escape_radius *= lambda;
  out.sim.step_h *= lambda * lambda;
  out.sim.rho_big *= lambda;
  out.sim.rho_kill *= lambda;
  out.sim.rho_esc *= lambda;
  out.sim.eps_hit *= lambda;
  for (auto& t : out.trajectories) {
    t.label *= lev;
    t.path.step_h *= lambda * lambda;
    t.path.escape_radius *= lambda;
    for (auto& x : t.path.xs) x *= lambda;
  }
  return out;
}

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw DomainError("malformed number '" + tok + "'");
  return v;
}

struct TokenReader {
  std::istream& is;
  std::string next() {
    std::string t;
    if (!(is >> t)) throw DomainError("truncated window sample");
    return t;
  }
  void expect(const std::string& key) {
    const std::string t = next();
    if (t != key) throw DomainError("expected '" + key + "' but found '" + t + "'");
  }
  double num() { return parse_double(next()); }
  std::uint64_t count() { return std::stoull(next()); }
};

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::escaped: return "escaped";
    case Termination::max_steps: return "max_steps";
    case Termination::stopped: return "stopped";
  }
  return "stopped";
}

Termination parse_termination(const std::string& s) {
  if (s == "escaped") return Termination::escaped;
  if (s == "max_steps") return Termination::max_steps;
  if (s == "stopped") return Termination::stopped;
  throw DomainError("unknown termination '" + s + "'");
}

CapMethod parse_method(const std::string& s) {
  for (CapMethod m : {CapMethod::mc_hitting, CapMethod::closed_form, CapMethod::grid_lower, CapMethod::grid_upper}) {
    if (to_string(m) == s) return m;
  }
  throw DomainError("unknown capacity method '" + s + "'");
}

}  // namespace

void write_window_sample(std::ostream& os, const WindowSample& s) {
  const int d = s.window.dim();
  os << "brint-window 1\n";
  os << "dim " << d << "\n";
  os << "window " << (s.window.norm == NormTag::euclidean ? "euclidean" : "linf") << ' ' << hex(s.window.half_width);
  for (int i = 0; i < d; ++i) os << ' ' << hex(s.window.center[i]);
  os << "\nradius_r " << hex(s.radius_r) << "\nalpha_max " << hex(s.alpha_max) << "\nescape_radius "
     << hex(s.escape_radius) << "\nmode " << (s.mode == PathMode::window ? "window" : "escape") << "\n";
  const auto& c = s.enlarged_cap;
  os << "cap " << hex(c.value) << ' ' << hex(c.std_error) << ' ' << c.n_walkers << ' ' << to_string(c.method) << ' '
     << hex(c.bias_bound) << ' ' << hex(c.rho_big) << "\n";
  const auto& p = s.sim;
  os << "sim " << hex(p.step_h) << ' ' << hex(p.rho_big) << ' ' << hex(p.rho_kill) << ' ' << hex(p.rho_esc) << ' '
     << p.max_steps << ' ' << hex(p.eps_hit) << ' ' << p.n_walkers << "\n";
  os << "trajectories " << s.trajectories.size() << "\n";
  for (const auto& t : s.trajectories) {
    os << "traj " << t.id << ' ' << hex(t.label) << ' ' << hex(t.path.step_h) << ' ' << termination_name(t.path.termination)
       << ' ' << t.path.size() << ' ' << t.path.breaks.size();
    for (auto b : t.path.breaks) os << ' ' << b;
    for (double x : t.path.xs) os << ' ' << hex(x);
    os << "\n";
  }
}

WindowSample read_window_sample(std::istream& is) {
  TokenReader in{is};
  in.expect("brint-window");
  if (in.next() != "1") throw DomainError("unsupported window sample version");
  in.expect("dim");
  const int d = static_cast<int>(in.count());
  require_dim(d);
  WindowSample s;
  in.expect("window");
  const std::string norm = in.next();
  const double hw = in.num();
  Point c(d);
  for (int i = 0; i < d; ++i) c[i] = in.num();
  s.window = BoxRegion(c, hw, norm == "euclidean" ? NormTag::euclidean : NormTag::linf);
  in.expect("radius_r");
  s.radius_r = in.num();
  in.expect("alpha_max");
  s.alpha_max = in.num();
  in.expect("escape_radius");
  s.escape_radius = in.num();
  in.expect("mode");
  s.mode = in.next() == "window" ? PathMode::window : PathMode::escape;
  in.expect("cap");
  s.enlarged_cap.value = in.num();
  s.enlarged_cap.std_error = in.num();
  s.enlarged_cap.n_walkers = in.count();
  s.enlarged_cap.method = parse_method(in.next());
  s.enlarged_cap.bias_bound = in.num();
  s.enlarged_cap.rho_big = in.num();
  in.expect("sim");
  s.sim.step_h = in.num();
  s.sim.rho_big = in.num();
  s.sim.rho_kill = in.num();
  s.sim.rho_esc = in.num();
  s.sim.max_steps = in.count();
  s.sim.eps_hit = in.num();
  s.sim.n_walkers = in.count();
  in.expect("trajectories");
  const std::uint64_t n = in.count();
  s.trajectories.resize(n);
  for (auto& t : s.trajectories) {
    in.expect("traj");
    t.id = in.count();
    t.label = in.num();
    t.path = Trajectory(d, in.num());
    t.path.termination = parse_termination(in.next());
    const std::uint64_t np = in.count(), nb = in.count();
    for (std::uint64_t k = 0; k < nb; ++k) t.path.breaks.push_back(static_cast<std::uint32_t>(in.count()));
    t.path.xs.resize(np * std::uint64_t(d));
    for (auto& x : t.path.xs) x = in.num();
  }
  return s;
}

}  // namespace brint
