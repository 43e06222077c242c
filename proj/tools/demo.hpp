#pragma once

// End-to-end run on a genus 3 curve: periods, Weierstrass table, theorem
// checks, a trace segment of the curve image and a third-kind integral
// along that segment.

#include "json_io.hpp"

#include <cstdio>
#include <ostream>
#include <random>

namespace hyperjac::demo {

using io::json;

struct Options {
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int trace_steps = 125;
  std::string csv_name = "demo_trace.csv";
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One row per sample: step, Re/Im of u, x_proj, w_rec and the diagnostics.
inline void write_trace_csv(std::ostream& os, const TraceResult& tr) {
  const int g = tr.samples.empty() ? 0 : static_cast<int>(tr.samples.front().u.size());
  os << "step";
  for (int i = 1; i <= g; ++i) os << ",re_u" << i << ",im_u" << i;
  os << ",re_x,im_x,re_w,im_w,residual,ratio_spread,curve_residual,flagged\n";
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const TraceSample& s = tr.samples[k];
    os << k;
    for (int i = 0; i < g; ++i) os << ',' << fmt(s.u(i).real()) << ',' << fmt(s.u(i).imag());
    os << ',' << fmt(s.x_proj.real()) << ',' << fmt(s.x_proj.imag()) << ',' << fmt(s.w_rec.real()) << ','
       << fmt(s.w_rec.imag()) << ',' << fmt(s.residual) << ',' << fmt(s.ratio_spread) << ',' << fmt(s.curve_residual)
       << ',' << (s.flagged ? 1 : 0) << '\n';
  }
}

/// Longest run of samples, starting after the trace has left the seed
/// branch point, whose x-projection polyline keeps twice the clearance
/// from every branch point.
inline std::pair<std::size_t, std::size_t> clear_window(const Curve& c, const TraceResult& tr) {
  const double keep = 2.0 * c.clearance();
  auto clear_point = [&](cd x) {
    for (cd b : c.branch_points())
      if (std::abs(x - b) < keep) return false;
    return true;
  };
  auto clear_segment = [&](cd a, cd b) {
    for (cd x : c.branch_points())
      if (detail::point_segment_distance(x, a, b) < keep) return false;
    return true;
  };
  std::size_t best_lo = 0, best_hi = 0;
  std::size_t i = 0;
  const std::size_t n = tr.samples.size();
  while (i < n) {
    if (!clear_point(tr.samples[i].x_proj)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && clear_segment(tr.samples[j].x_proj, tr.samples[j + 1].x_proj)) ++j;
    if (j - i > best_hi - best_lo) {
      best_lo = i;
      best_hi = j;
    }
    i = j + 1;
  }
  return {best_lo, best_hi};
}

inline json run(const Curve& curve, const Options& opt, std::ostream& csv) {
  if (curve.genus() != 3) fail(ErrorCode::GenusMismatch, "the demo runs on a genus 3 curve");
  std::vector<Check> checks;
  json report;
  report["conventions"] = io::fingerprint(nullptr);
  report["curve"] = io::curve_to_json(curve);
  report["seed"] = opt.seed;
  report["tolerance"] = opt.tol;

  const ModelPtr model = make_model(curve);
  const Model& m = *model;
  report["conventions"] = io::fingerprint(&m);
  report["periods"] = {{"period_matrix", io::to_json(m.period_matrix())}, {"cond_a", m.periods.cond_a}};
  checks.push_back(check_below("periods.symmetry", symmetry_defect(m.period_matrix()), 1e-8));
  checks.push_back(check_above("periods.imaginary_part_positive", min_imag_eigenvalue(m.period_matrix()), 0.0));

  double table = 0.0;
  for (int s = 1; s <= 8; ++s) {
    const CVector u = aj(m.curve, m.periods, {m.curve.branch(s - 1), 0.0});
    table = std::max(table, lattice_distance(u, from_char(weierstrass_char(s, 3), m.period_matrix()), m.period_matrix()));
  }
  checks.push_back(check_below("weierstrass_table", table, opt.tol));
  checks.push_back(check_below("riemann_constants.vanishing", m.riemann.worst_ratio, 1e-7));

  VerifyOptions vo;
  vo.seed = opt.seed;
  vo.inclusion_tol = opt.tol;
  vo.isolation_tol = opt.tol;
  for (const Check& c : verify_genus3(model, vo))
    if (c.name.rfind("theorem3", 0) == 0 || c.name.rfind("remark", 0) == 0) checks.push_back(c);

  const ThetaSystem sys = weierstrass_system(model, SystemKind::g3_triple, {2, 4, 6});
  TraceOptions to;
  to.n_steps = opt.trace_steps;
  to.tol = opt.tol;
  const TraceResult tr = trace(sys, from_char(weierstrass_char(1, 3), m.period_matrix()), to);
  write_trace_csv(csv, tr);
  checks.push_back(check_below("trace.residual", tr.max_residual(), opt.tol));
  checks.push_back(check_below("trace.ratio_spread", tr.max_ratio_spread(), opt.tol));
  checks.push_back(check_below("trace.curve_equation", tr.max_curve_residual(), opt.tol));
  report["trace"] = {{"system", "P2+P4+P6 Weierstrass triple"},
                     {"seed_point", "P1"},
                     {"steps", opt.trace_steps},
                     {"initial_step", tr.initial_step},
                     {"step_halvings", tr.step_halvings},
                     {"flagged", tr.flagged},
                     {"csv", opt.csv_name}};

  const auto [lo, hi] = clear_window(m.curve, tr);
  std::vector<cd> xs;
  std::vector<CVector> us;
  for (std::size_t k = lo; k <= hi; ++k) {
    xs.push_back(tr.samples[k].x_proj);
    us.push_back(tr.samples[k].u);
  }
  std::mt19937_64 rng(opt.seed);
  std::vector<CurvePoint> poles;
  while (poles.size() < 2) {
    const CurvePoint p = random_curve_point(m.curve, rng);
    bool ok = true;
    for (cd x : xs) ok &= std::abs(p.x - x) >= 0.25;
    for (const auto& q : poles) ok &= std::abs(p.x - q.x) >= 0.25;
    if (ok) poles.push_back(p);
  }
  const ThirdKindSpec spec = make_third_kind(m, poles[0], poles[1]);
  const EtaResult along_trace = eta_along_samples(m, spec, us);
  const cd start_w = tr.samples[lo].w_rec;
  PathSpec path;
  path.start_point = m.curve.point(xs.front(), std::abs(start_w - m.curve.w1(xs.front())) <= std::abs(start_w + m.curve.w1(xs.front())) ? 1 : -1);
  path.waypoints.assign(xs.begin() + 1, xs.end());
  const cd oracle = oracle_third_kind(m, poles[0], poles[1], path);
  const double discrepancy = std::abs(along_trace.increment - oracle);
  checks.push_back(check_above("eta.window_samples", static_cast<double>(us.size()), 10.0));
  checks.push_back(check_below("eta.trace_vs_oracle", discrepancy, opt.tol));
  report["eta"] = {{"window", {lo, hi}},
                   {"R", io::to_json(poles[0])},
                   {"Q", io::to_json(poles[1])},
                   {"odd_char", io::to_json(spec.odd_char)},
                   {"increment", io::to_json(along_trace.increment)},
                   {"branch_windings", along_trace.branch_windings},
                   {"oracle_value", io::to_json(oracle)},
                   {"discrepancy", discrepancy}};

  bool all = true;
  json cj = json::array();
  for (const Check& c : checks) {
    all &= c.pass;
    cj.push_back(io::to_json(c));
  }
  report["checks"] = cj;
  report["status"] = all ? "pass" : "fail";
  return report;
}

}  // namespace hyperjac::demo
