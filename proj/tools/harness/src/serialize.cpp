#include "harness/serialize.hpp"

#include "hitchin/errors.hpp"

namespace harness {

using namespace hitchin;

namespace {

json cx(cplx z) { return json::array({z.real(), z.imag()}); }
cplx cx(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <class M>
json imat(const M& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

IMatrix imat(const json& j) {
  IMatrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j.at("data").at(r).at(c).get<std::int64_t>();
  return m;
}

json walk(const Walk& w) {
  json a = json::array();
  for (const auto& s : w) a.push_back(json::array({s.petal, s.sheet, s.forward}));
  return a;
}

Walk walk(const json& j) {
  Walk w;
  for (const auto& s : j) w.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<bool>()});
  return w;
}

json curve(const SpectralCurve& c) {
  json base = json::array();
  for (cplx v : c.base().coeffs()) base.push_back(cx(v));
  return json{{"family", std::string(family_name(c.family()))}, {"base", base}, {"hams", to_json(c.hams())}};
}

SpectralCurve curve(const json& j) {
  std::array<cplx, 6> co;
  for (int i = 0; i < 6; ++i) co[i] = cx(j.at("base").at(i));
  const Family f = j.at("family").get<std::string>() == "so4" ? Family::SO4 : Family::SL2;
  return SpectralCurve(BaseCurve(co), f, cvector_from_json(j.at("hams")));
}

}  // namespace

json to_json(const CVector& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(cx(z));
  return a;
}

CVector cvector_from_json(const json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = cx(j[i]);
  return v;
}

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(CVector(m.row(r).transpose())));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

CMatrix cmatrix_from_json(const json& j) {
  CMatrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = cx(j.at("data").at(r).at(c));
  return m;
}

json to_json(const SurfacePoint& p) {
  return json{{"x", cx(p.x)}, {"y", cx(p.y)}, {"lambda", cx(p.lambda)}, {"sheet", p.sheet_id}};
}

SurfacePoint point_from_json(const json& j) {
  return {cx(j.at("x")), cx(j.at("y")), cx(j.at("lambda")), j.at("sheet").get<int>()};
}

json to_json(const CycleSet& cs) {
  json j;
  j["family"] = std::string(family_name(cs.family));
  j["base"] = cx(cs.base);
  j["targets"] = to_json(CVector(Eigen::Map<const CVector>(cs.targets.data(), cs.petals())));
  j["radius"] = cs.radius;
  j["clearance"] = cs.clearance;
  j["sheets"] = cs.sheets;
  j["fiber"] = json::array();
  for (const auto& p : cs.fiber) j["fiber"].push_back(to_json(p));
  j["monodromy"] = cs.monodromy;
  j["tau"] = cs.tau;
  j["tau1"] = cs.tau1;
  j["orbits"] = cs.orbits;
  j["orbit_of"] = cs.orbit_of;
  j["orbit_rep"] = cs.orbit_rep;
  j["fundamental"] = json::array();
  for (const auto& w : cs.fundamental) j["fundamental"].push_back(walk(w));
  j["tree_edge"] = cs.tree_edge;
  j["cycle_of_edge"] = cs.cycle_of_edge;
  j["E"] = imat(cs.E);
  j["T"] = imat(cs.T);
  j["K"] = imat(cs.K);
  j["h"] = cs.h;
  j["a_cycles"] = imat(cs.a_cycles);
  j["b_cycles"] = imat(cs.b_cycles);
  j["divisors"] = cs.divisors;
  return j;
}

CycleSet cycle_set_from_json(const json& j) {
  CycleSet cs;
  cs.family = j.at("family").get<std::string>() == "so4" ? Family::SO4 : Family::SL2;
  cs.base = cx(j.at("base"));
  for (cplx z : cvector_from_json(j.at("targets"))) cs.targets.push_back(z);
  cs.radius = j.at("radius").get<std::vector<double>>();
  cs.clearance = j.at("clearance").get<double>();
  cs.sheets = j.at("sheets").get<int>();
  for (const auto& p : j.at("fiber")) cs.fiber.push_back(point_from_json(p));
  cs.monodromy = j.at("monodromy").get<std::vector<std::vector<int>>>();
  cs.tau = j.at("tau").get<std::vector<int>>();
  cs.tau1 = j.at("tau1").get<std::vector<int>>();
  cs.orbits = j.at("orbits").get<int>();
  cs.orbit_of = j.at("orbit_of").get<std::vector<int>>();
  cs.orbit_rep = j.at("orbit_rep").get<std::vector<int>>();
  for (const auto& w : j.at("fundamental")) cs.fundamental.push_back(walk(w));
  cs.tree_edge = j.at("tree_edge").get<std::vector<int>>();
  cs.cycle_of_edge = j.at("cycle_of_edge").get<std::vector<int>>();
  cs.E = imat(j.at("E"));
  cs.T = imat(j.at("T"));
  cs.K = imat(j.at("K"));
  cs.h = j.at("h").get<int>();
  cs.a_cycles = imat(j.at("a_cycles"));
  cs.b_cycles = imat(j.at("b_cycles"));
  cs.divisors = j.at("divisors").get<std::vector<std::int64_t>>();
  return cs;
}

json to_json(const PeriodData& pd) {
  json j;
  j["curve"] = curve(pd.curve);
  j["cycles"] = to_json(pd.cycles);
  j["edges"] = json::array();
  for (const auto& e : pd.edges) j["edges"].push_back(to_json(e));
  j["A_periods"] = to_json(pd.A_periods);
  j["B_periods"] = to_json(pd.B_periods);
  j["A_action"] = to_json(pd.A_action);
  j["B_action"] = to_json(pd.B_action);
  j["A_mat"] = to_json(pd.A_mat);
  j["B_norm"] = to_json(pd.B_norm);
  j["tau"] = to_json(pd.tau);
  j["divisors"] = pd.divisors;
  j["symmetry_error"] = pd.symmetry_error;
  j["min_im_eig"] = pd.min_im_eig;
  j["far_point"] = cx(pd.far_point);
  j["infinity"] = json::array();
  for (const auto& l : pd.infinity)
    j["infinity"].push_back(json{{"label", cx(l.label)}, {"values", to_json(l.values)}, {"arrival", l.arrival}});
  j["quad"] = json{{"abs_tol", pd.quad.abs_tol}, {"rel_tol", pd.quad.rel_tol}, {"max_depth", pd.quad.max_depth}};
  return j;
}

PeriodData period_data_from_json(const json& j) {
  try {
    PeriodData pd;
    pd.curve = curve(j.at("curve"));
    pd.cycles = cycle_set_from_json(j.at("cycles"));
    for (const auto& e : j.at("edges")) pd.edges.push_back(cvector_from_json(e));
    pd.A_periods = cmatrix_from_json(j.at("A_periods"));
    pd.B_periods = cmatrix_from_json(j.at("B_periods"));
    pd.A_action = cvector_from_json(j.at("A_action"));
    pd.B_action = cvector_from_json(j.at("B_action"));
    pd.A_mat = cmatrix_from_json(j.at("A_mat"));
    pd.B_norm = cmatrix_from_json(j.at("B_norm"));
    pd.tau = cmatrix_from_json(j.at("tau"));
    pd.divisors = j.at("divisors").get<std::vector<std::int64_t>>();
    pd.symmetry_error = j.at("symmetry_error").get<double>();
    pd.min_im_eig = j.at("min_im_eig").get<double>();
    pd.far_point = cx(j.at("far_point"));
    for (const auto& l : j.at("infinity"))
      pd.infinity.push_back({cx(l.at("label")), cvector_from_json(l.at("values")), l.at("arrival").get<int>()});
    const auto& q = j.at("quad");
    pd.quad = {q.at("abs_tol").get<double>(), q.at("rel_tol").get<double>(), q.at("max_depth").get<int>()};
    return pd;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed period data: ") + e.what());
  }
}

}  // namespace harness
