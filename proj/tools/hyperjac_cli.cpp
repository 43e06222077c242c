#include "demo.hpp"
#include "json_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace hyperjac;
using io::json;

namespace {

struct Job {
  std::string input;
  std::string output;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  bool oracle = false;
};

/// Raised for problems with the command line or files, mapped to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_input(const Job& job) {
  if (job.input.empty()) throw UsageError("--input is required");
  std::ifstream in(job.input);
  if (!in) throw UsageError("cannot open " + job.input);
  return json::parse(in);
}

void emit(const Job& job, const std::string& text) {
  if (job.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(job.output, std::ios::binary);
  if (!out) throw UsageError("cannot write " + job.output);
  out << text;
}

void emit_json(const Job& job, const json& j) { emit(job, j.dump(2) + "\n"); }

int status_code(const json& report) { return report.value("status", "pass") == "pass" ? 0 : 2; }

json checks_report(const std::vector<Check>& checks) {
  json arr = json::array();
  bool all = true;
  for (const Check& c : checks) {
    arr.push_back(io::to_json(c));
    all &= c.pass;
  }
  return {{"checks", arr}, {"status", all ? "pass" : "fail"}};
}

ModelPtr model_from(const json& in) { return make_model(io::curve_from(in)); }

SystemKind kind_from(const std::string& s) {
  if (s == "g3_pair") return SystemKind::g3_pair;
  if (s == "g3_triple") return SystemKind::g3_triple;
  if (s == "g4_pairs") return SystemKind::g4_pairs;
  if (s == "g4_quad") return SystemKind::g4_quad;
  io::bad("unknown system kind \"" + s + "\"");
}

/// {"kind": ..., "points": [...]} or {"kind": ..., "weierstrass": [indices]};
/// without a system, the Weierstrass triple (2,4,6) or quadruple (1..6).
ThetaSystem system_from(ModelPtr model, const json& in) {
  const int g = model->genus();
  if (!in.contains("system")) {
    if (g == 3) return weierstrass_system(model, SystemKind::g3_triple, {2, 4, 6});
    if (g == 4) return weierstrass_system(model, SystemKind::g4_quad, {1, 2, 3, 4, 5, 6});
    fail(ErrorCode::GenusMismatch, "theta systems exist for genus 3 and 4");
  }
  const json& s = in.at("system");
  const SystemKind kind = kind_from(io::field(s, "kind").get<std::string>());
  if (s.contains("weierstrass")) return weierstrass_system(model, kind, s.at("weierstrass").get<std::vector<int>>());
  std::vector<CurvePoint> p;
  for (const auto& j : io::field(s, "points")) p.push_back(io::point_from(model->curve, j));
  auto need = [&](std::size_t n) {
    if (p.size() != n) io::bad("system " + std::string(to_string(kind)) + " needs " + std::to_string(n) + " points");
  };
  switch (kind) {
    case SystemKind::g3_pair: need(2); return system_g3_pair(model, p[0], p[1]);
    case SystemKind::g3_triple: need(3); return system_g3_triple(model, p[0], p[1], p[2]);
    case SystemKind::g4_pairs: need(4); return system_g4_pairs(model, p[0], p[1], p[2], p[3]);
    case SystemKind::g4_quad: need(6); return system_g4_quad(model, p[0], p[1], p[2], p[3], p[4], p[5]);
    default: io::bad("unsupported system kind");
  }
}

int cmd_periods(const Job& job) {
  const json in = read_input(job);
  const Curve c = io::curve_from(in);
  const PeriodData pd = compute_periods(c, job.tol.value_or(1e-13));
  emit_json(job, {{"conventions", io::fingerprint(nullptr)},
                  {"curve", io::curve_to_json(c)},
                  {"A", io::to_json(pd.raw_a)},
                  {"B", io::to_json(pd.raw_b)},
                  {"Pi", io::to_json(pd.period_matrix)},
                  {"cond_A", pd.cond_a},
                  {"symmetry_defect", symmetry_defect(pd.period_matrix)},
                  {"min_eig_imag_Pi", min_imag_eigenvalue(pd.period_matrix)}});
  return 0;
}

CMatrix period_matrix_from(const json& in) {
  if (in.contains("Pi")) return io::cmatrix_from(in.at("Pi"));
  return compute_periods(io::curve_from(in)).period_matrix;
}

int cmd_theta(const Job& job) {
  const json in = read_input(job);
  const ThetaFunction th(period_matrix_from(in), job.tol.value_or(1e-13));
  const CVector u = io::cvector_from(io::field(in, "u"));
  if (u.size() != th.genus()) io::bad("u has the wrong length");
  json out = {{"value", io::to_json(th.value(u))},
              {"normalized", io::to_json(th.normalized(u))},
              {"log_scale", th.log_scale(u)},
              {"error_bound", th.error_bound(u)},
              {"gradient", io::to_json(th.gradient(u))}};
  if (in.contains("characteristic")) {
    const ThetaChar c = io::char_from(in.at("characteristic"));
    if (c.genus() != th.genus()) io::bad("characteristic has the wrong length");
    out["characteristic"] = io::to_json(c);
    out["char_value"] = io::to_json(th.with_char(c, u));
    if (is_integer_char(c)) out["parity"] = char_parity(c) == Parity::odd ? "odd" : "even";
  }
  emit_json(job, out);
  return 0;
}

int cmd_char(const Job& job) {
  const json in = read_input(job);
  const CMatrix pi_matrix = period_matrix_from(in);
  json out;
  if (in.contains("u")) {
    const CVector u = io::cvector_from(in.at("u"));
    if (u.size() != pi_matrix.rows()) io::bad("u has the wrong length");
    const ThetaChar c = to_char(u, pi_matrix);
    out["characteristic"] = io::to_json(c);
    out["reduced_characteristic"] = io::to_json(reduce_char(c));
    out["reduced_u"] = io::to_json(reduce(u, pi_matrix));
  }
  if (in.contains("characteristic")) {
    const ThetaChar c = io::char_from(in.at("characteristic"));
    if (c.genus() != pi_matrix.rows()) io::bad("characteristic has the wrong length");
    out["u"] = io::to_json(from_char(c, pi_matrix));
    if (is_integer_char(c)) out["parity"] = char_parity(c) == Parity::odd ? "odd" : "even";
  }
  if (in.contains("weierstrass")) {
    const int s = in.at("weierstrass").get<int>();
    const ThetaChar c = weierstrass_char(s, static_cast<int>(pi_matrix.rows()));
    out["weierstrass_characteristic"] = io::to_json(c);
    out["u"] = io::to_json(from_char(c, pi_matrix));
  }
  if (out.is_null()) io::bad("expected \"u\", \"characteristic\" or \"weierstrass\"");
  emit_json(job, out);
  return 0;
}

int cmd_aj(const Job& job) {
  const json in = read_input(job);
  const Curve c = io::curve_from(in);
  const double tol = job.tol.value_or(1e-12);
  const PeriodData pd = compute_periods(c);
  Divisor d;
  if (in.contains("divisor")) {
    for (const auto& t : in.at("divisor")) d.terms.emplace_back(io::point_from(c, io::field(t, "point")), t.value("multiplicity", 1));
  } else {
    d.terms.emplace_back(io::point_from(c, io::field(in, "point")), 1);
  }
  const CVector raw = aj_divisor_path_integral(c, pd, d, tol);
  const CVector red = reduce(raw, pd.period_matrix);
  emit_json(job, {{"conventions", io::fingerprint(nullptr)},
                  {"degree", d.degree()},
                  {"u_path", io::to_json(raw)},
                  {"u", io::to_json(red)},
                  {"characteristic", io::to_json(to_char(red, pd.period_matrix))}});
  return 0;
}

int cmd_verify(const Job& job) {
  const json in = read_input(job);
  const ModelPtr model = model_from(in);
  VerifyOptions vo;
  vo.seed = job.seed;
  if (job.tol) vo.inclusion_tol = vo.isolation_tol = *job.tol;
  json out = checks_report(verify_theorems(model, vo));
  out["conventions"] = io::fingerprint(model.get());
  out["genus"] = model->genus();
  out["seed"] = job.seed;
  out["scale"] = model->scale;
  emit_json(job, out);
  return status_code(out);
}

int cmd_trace(const Job& job) {
  const json in = read_input(job);
  const ModelPtr model = model_from(in);
  const ThetaSystem sys = system_from(model, in);
  CVector seed;
  if (in.contains("seed")) {
    const json& s = in.at("seed");
    if (s.is_object() && s.contains("weierstrass"))
      seed = from_char(weierstrass_char(s.at("weierstrass").get<int>(), model->genus()), model->period_matrix());
    else if (s.is_object())
      seed = aj_path_integral(model->curve, model->periods, io::point_from(model->curve, s));
    else
      seed = io::cvector_from(s);
  } else {
    seed = from_char(weierstrass_char(model->genus() == 3 ? 1 : 7, model->genus()), model->period_matrix());
  }
  TraceOptions to;
  to.n_steps = in.value("steps", 500);
  to.step = in.value("step", 0.0);
  if (job.tol) to.tol = *job.tol;
  const TraceResult tr = trace(sys, seed, to);
  std::ostringstream csv;
  demo::write_trace_csv(csv, tr);
  emit(job, csv.str());
  return 0;
}

int cmd_classify(const Job& job) {
  const json in = read_input(job);
  const ModelPtr model = model_from(in);
  const ThetaSystem sys = system_from(model, in);
  const CVector u = io::cvector_from(io::field(in, "u"));
  if (u.size() != model->genus()) io::bad("u has the wrong length");
  ClassifyOptions co;
  if (job.tol) co.residual_tol = *job.tol;
  const ComponentLabel label = classify(sys, u, co);
  emit_json(job, {{"label", std::string(to_string(label.kind))},
                  {"component", label.id},
                  {"distance", label.distance},
                  {"residuals", io::to_json(RVector(residuals(sys, u)))}});
  return 0;
}

int cmd_eta(const Job& job) {
  const json in = read_input(job);
  const ModelPtr model = model_from(in);
  const Model& m = *model;
  const CurvePoint r = io::point_from(m.curve, io::field(in, "R"));
  const CurvePoint q = io::point_from(m.curve, io::field(in, "Q"));
  std::optional<ThetaChar> c;
  if (in.contains("odd_char")) c = io::char_from(in.at("odd_char"));
  const ThirdKindSpec spec = make_third_kind(m, r, q, c);
  PathSpec path;
  path.start_point = io::point_from(m.curve, io::field(in, "start"));
  path.waypoints = io::waypoints_from(io::field(in, "waypoints"));
  const EtaResult e = eta_along(m, spec, path);
  json out = {{"conventions", io::fingerprint(&m)},
              {"odd_char", io::to_json(spec.odd_char)},
              {"increment", io::to_json(e.increment)},
              {"branch_windings", e.branch_windings},
              {"evaluations", e.evaluations},
              {"status", "pass"}};
  if (job.oracle) {
    const cd o = oracle_third_kind(m, r, q, path);
    const double tol = job.tol.value_or(1e-6);
    const double d = std::abs(e.increment - o);
    out["oracle_value"] = io::to_json(o);
    out["discrepancy"] = d;
    out["tolerance"] = tol;
    out["status"] = d < tol ? "pass" : "fail";
  }
  emit_json(job, out);
  return status_code(out);
}

int cmd_demo(const Job& job) {
  const Curve curve = io::curve_from(read_input(job));
  demo::Options opt;
  opt.seed = job.seed;
  if (job.tol) opt.tol = *job.tol;
  const std::filesystem::path json_path = job.output.empty() ? "demo_report.json" : job.output;
  std::filesystem::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  opt.csv_name = csv_path.filename().string();
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw UsageError("cannot write " + csv_path.string());
  const json report = demo::run(curve, opt, csv);
  Job out = job;
  out.output = json_path.string();
  emit_json(out, report);
  std::cout << "demo " << report.at("status").get<std::string>() << ": " << json_path.string() << ", "
            << csv_path.string() << "\n";
  return status_code(report);
}

std::string_view module_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::OddCount:
    case ErrorCode::DuplicateBranchPoint:
    case ErrorCode::NonSimpleBranchPolyline:
    case ErrorCode::PathTooCloseToBranchPoint:
    case ErrorCode::NonconvergentContinuation: return "curvegeom";
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::QuadratureNonconvergence:
    case ErrorCode::SingularPeriodMatrix:
    case ErrorCode::WeierstrassPoint: return "periods";
    case ErrorCode::InvalidPeriodMatrix:
    case ErrorCode::NonIntegerCharacteristic: return "theta";
    case ErrorCode::RiemannConstantValidationFailed: return "jacobian";
    case ErrorCode::PathConstructionFailed: return "ajmap";
    case ErrorCode::GenusMismatch:
    case ErrorCode::CoincidentPoints:
    case ErrorCode::JEquivalentPair:
    case ErrorCode::AmbiguousClassification:
    case ErrorCode::UnexplainedSolution:
    case ErrorCode::CorrectorDiverged:
    case ErrorCode::RankDegenerate:
    case ErrorCode::ProjectionInconsistent: return "locus";
    case ErrorCode::NoUsableOddCharacteristic:
    case ErrorCode::PathThroughPole:
    case ErrorCode::LogBranchLost: return "thirdkind";
    case ErrorCode::InputError: return "cli";
  }
  return "unknown";
}

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::OddCount:
    case ErrorCode::DuplicateBranchPoint:
    case ErrorCode::NonSimpleBranchPolyline:
    case ErrorCode::PathTooCloseToBranchPoint:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::WeierstrassPoint:
    case ErrorCode::InvalidPeriodMatrix:
    case ErrorCode::NonIntegerCharacteristic:
    case ErrorCode::GenusMismatch:
    case ErrorCode::CoincidentPoints:
    case ErrorCode::JEquivalentPair:
    case ErrorCode::PathThroughPole:
    case ErrorCode::InputError: return true;
    default: return false;
  }
}

int report_error(const Job& job, int code, const json& err) {
  const json out = {{"status", "error"}, {"error", err}};
  std::cerr << out.dump() << "\n";
  if (!job.output.empty()) {
    try {
      emit_json(job, out);
    } catch (const std::exception&) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperelliptic curves in their Jacobians: periods, theta functions, Abel-Jacobi map, theta loci"};
  app.require_subcommand(1);
  Job job;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", job.input, "input JSON file");
    sub->add_option("--output", job.output, "output file (default: stdout)");
    sub->add_option("--tol", job.tol, "tolerance override");
    sub->add_option("--seed", job.seed, "seed for sampling-based checks");
    sub->add_flag("--oracle", job.oracle, "cross-check against an independent computation");
  };
  std::function<int(const Job&)> action;
  auto sub = [&](CLI::App* parent, const char* name, const char* help, int (*fn)(const Job&)) {
    CLI::App* s = parent->add_subcommand(name, help);
    add_common(s);
    s->callback([&action, fn] { action = fn; });
    return s;
  };
  sub(&app, "periods", "period matrices A, B and Pi of a curve", cmd_periods);
  sub(&app, "theta", "Riemann theta function and theta with characteristic", cmd_theta);
  sub(&app, "char", "conversion between Jacobian points and characteristics", cmd_char);
  sub(&app, "aj", "Abel-Jacobi image of a point or divisor", cmd_aj);
  CLI::App* locus = app.add_subcommand("locus", "theta systems cutting out the curve image");
  locus->require_subcommand(1);
  sub(locus, "verify", "sampling checks of the solution sets", cmd_verify);
  sub(locus, "trace", "follow the curve image by continuation (CSV)", cmd_trace);
  sub(locus, "classify", "label a solution of a theta system", cmd_classify);
  sub(&app, "eta", "third-kind integral along a path", cmd_eta);
  sub(&app, "demo", "end-to-end run on the bundled genus 3 curve", cmd_demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (job.input.empty() && app.got_subcommand("demo")) job.input = HYPERJAC_DEMO_CURVE;

  try {
    return action(job);
  } catch (const json::parse_error& e) {
    return report_error(job, 1, {{"name", "ParseError"}, {"module", "cli"}, {"message", e.what()}});
  } catch (const json::exception& e) {
    return report_error(job, 1, {{"name", "InputError"}, {"module", "cli"}, {"message", e.what()}});
  } catch (const UsageError& e) {
    return report_error(job, 1, {{"name", "InputError"}, {"module", "cli"}, {"message", e.what()}});
  } catch (const Error& e) {
    return report_error(job, is_input_error(e.code()) ? 1 : 2,
                        {{"name", std::string(to_string(e.code()))}, {"module", std::string(module_of(e.code()))},
                         {"message", e.what()}});
  } catch (const std::exception& e) {
    return report_error(job, 2, {{"name", "InternalError"}, {"module", "cli"}, {"message", e.what()}});
  }
}
