#pragma once

#include "hyperjac/hyperjac.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hyperjac::io {

using nlohmann::json;

inline json to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline json to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

inline json to_json(const ThetaChar& c) { return {{"eps", to_json(c.eps)}, {"eps_prime", to_json(c.eps_prime)}}; }

inline json to_json(const CurvePoint& p) { return {{"x", to_json(p.x)}, {"w", to_json(p.w)}}; }

inline json to_json(const Check& c) {
  return {{"name", c.name},
          {"status", c.pass ? "pass" : "fail"},
          {"measured", c.measured},
          {"threshold", c.threshold},
          {"relation", c.below ? "below" : "above"}};
}

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorCode::InputError, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline cd complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad("complex numbers are written as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline CVector cvector_from(const json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty array of complex numbers");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

inline RVector rvector_from(const json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty array of numbers");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad("expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline CMatrix cmatrix_from(const json& j) {
  if (!j.is_array() || j.empty()) bad("matrices are arrays of rows");
  const std::size_t n = j.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) bad("period matrix must be square");
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from(j[r][c]);
  }
  return m;
}

inline ThetaChar char_from(const json& j) {
  ThetaChar c{rvector_from(field(j, "eps")), rvector_from(field(j, "eps_prime"))};
  if (c.eps.size() != c.eps_prime.size()) bad("eps and eps_prime differ in length");
  return c;
}

inline Curve curve_from(const json& j) {
  const json& bp = field(j, "branch_points");
  if (!bp.is_array()) bad("branch_points must be an array");
  std::vector<cd> pts;
  for (const auto& p : bp) pts.push_back(complex_from(p));
  std::optional<double> clearance;
  if (j.contains("clearance")) clearance = j.at("clearance").get<double>();
  return Curve(std::move(pts), clearance);
}

inline json curve_to_json(const Curve& c) {
  json bp = json::array();
  for (cd b : c.branch_points()) bp.push_back(to_json(b));
  return {{"branch_points", bp}, {"genus", c.genus()}, {"clearance", c.clearance()}};
}

/// {"x": z, "sheet": +-1}, {"x": z, "w": z} or {"branch": s} (1-based).
inline CurvePoint point_from(const Curve& curve, const json& j) {
  if (j.contains("branch")) {
    const int s = j.at("branch").get<int>();
    if (s < 1 || s > curve.branch_count()) fail(ErrorCode::IndexOutOfRange, "branch index outside 1..2g+2");
    return {curve.branch(s - 1), 0.0};
  }
  const cd x = complex_from(field(j, "x"));
  if (j.contains("w")) {
    const CurvePoint p{x, complex_from(j.at("w"))};
    if (!curve.on_curve(p, 1e-8)) bad("point does not satisfy the curve equation");
    return p;
  }
  const int sheet = j.contains("sheet") ? j.at("sheet").get<int>() : 1;
  if (sheet != 1 && sheet != -1) bad("sheet must be 1 or -1");
  return curve.point(x, sheet);
}

inline std::vector<cd> waypoints_from(const json& j) {
  std::vector<cd> out;
  if (!j.is_array()) bad("waypoints must be an array");
  for (const auto& p : j) out.push_back(complex_from(p));
  return out;
}

/// Self-description of the conventions behind every number in a report.
inline json fingerprint(const Model* m) {
  json f = {{"branch_order", "as given; cuts join x_{2k-1} and x_{2k}"},
            {"a_cycles", "a_j encircles the cut [x_{2j-1}, x_{2j}]"},
            {"b_cycles", "b_j joins cut j to cut g+1 on both sheets, oriented so that Im Pi_jj > 0"},
            {"base_point", "P_{2g+2}"},
            {"characteristics", "half: u = (eps' + Pi eps) / 2"},
            {"complex_format", "[re, im]"}};
  if (m) {
    f["riemann_constants"] = {{"characteristic", to_json(m->riemann.characteristic)},
                              {"alignment", m->riemann.alignment == Alignment::right ? "right" : "left"}};
  }
  return f;
}

}  // namespace hyperjac::io
