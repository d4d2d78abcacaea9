#include "harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hitchin/defaults.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"

namespace harness {

using namespace hitchin;
namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

double to_double(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  double v = 0.0;
  const char* b = s.data() + (s[0] == '+' ? 1 : 0);
  const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not a complex number: '" + whole + "'");
  return v;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"curve", {"family", "coefficients", "roots", "hams"}},
      {"configuration", {"x", "y", "lambda"}},
      {"flow", {"hamiltonian", "t_max", "samples", "seed", "method"}},
      {"tolerances", {"quadrature", "theta_eps", "theta_budget", "residual", "ode_rel_tol", "calibration_seeds"}},
      {"output", {"dir", "cache"}},
  };
  return s;
}

template <class T>
T number(const pt::ptree& t, const std::string& key, T fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream is(trim(*v));
  T out{};
  is >> out;
  if (!is || !is.eof()) throw ConfigError("bad value for " + key + ": '" + *v + "'");
  return out;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s.push_back(ch);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'j' && s.back() != 'i') return {to_double(s, text), 0.0};
  s.pop_back();
  std::size_t cut = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  if (cut == std::string::npos) return {0.0, to_double(s, text)};
  return {to_double(s.substr(0, cut), text), to_double(s.substr(cut), text)};
}

std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_complex(item));
  return out;
}

std::string format_complex(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

Method parse_method(const std::string& s) {
  if (s == "ode") return Method::Ode;
  if (s == "theta") return Method::Theta;
  if (s == "both") return Method::Both;
  throw ConfigError("method must be ode, theta or both, not '" + s + "'");
}

std::string method_name(Method m) {
  return m == Method::Ode ? "ode" : m == Method::Theta ? "theta" : "both";
}

ExperimentConfig ExperimentConfig::defaults(Family family) {
  ExperimentConfig c;
  c.family = family;
  c.base = default_base_curve();
  if (family == Family::SO4) {
    c.tol.theta_eps = 1e-10;
    c.tol.theta_budget = 40'000'000;
    c.tol.calibration_seeds = 1;
  }
  return c;
}

std::vector<double> ExperimentConfig::times() const {
  if (t_max == 0.0) return {0.0};
  std::vector<double> t(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) t[i] = t_max * i / samples;
  return t;
}

SpectralCurve ExperimentConfig::curve() const {
  if (configuration) return SpectralCurve(base, family, solve_hamiltonians(base, family, *configuration).H());
  return SpectralCurve(base, family, hams ? *hams : default_hams(family));
}

PhaseConfiguration ExperimentConfig::initial(const SpectralCurve& c) const {
  if (configuration) {
    validate_configuration(c, *configuration);
    return *configuration;
  }
  return random_configuration(c, seed);
}

void ExperimentConfig::validate() const {
  const int h = phase_dim(family);
  if (hams && configuration) throw ConfigError("give either [curve] hams or a [configuration], not both");
  if (hams && hams->size() != h) throw ConfigError("hams needs " + std::to_string(h) + " values");
  if (configuration && configuration->size() != h) throw ConfigError("configuration needs " + std::to_string(h) + " points");
  if (hamiltonian < 0 || hamiltonian >= h) throw ConfigError("hamiltonian index out of range");
  if (samples < 1) throw ConfigError("samples must be at least 1");
  if (!(t_max >= 0.0)) throw ConfigError("t_max must be non-negative");
  if (!(tol.quadrature > 0 && tol.theta_eps > 0 && tol.residual > 0 && tol.ode_rel_tol > 0 && tol.theta_budget > 0))
    throw ConfigError("tolerances must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, v] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  }
  const pt::ptree empty;
  auto sec = [&](const char* n) -> const pt::ptree& {
    const auto c = tree.get_child_optional(n);
    return c ? *c : empty;
  };

  const auto& cv = sec("curve");
  const std::string fam = trim(cv.get<std::string>("family", "sl2"));
  if (fam != "sl2" && fam != "so4") throw ConfigError("family must be sl2 or so4, not '" + fam + "'");
  ExperimentConfig c = ExperimentConfig::defaults(fam == "so4" ? Family::SO4 : Family::SL2);
  const int h = phase_dim(c.family);

  const auto coeffs = cv.get_optional<std::string>("coefficients");
  const auto roots = cv.get_optional<std::string>("roots");
  if (coeffs && roots) throw ConfigError("give either curve.coefficients or curve.roots");
  if (coeffs) {
    const auto v = parse_complex_list(*coeffs);
    if (v.size() != 6) throw ConfigError("curve.coefficients needs 6 values, ascending");
    if (v[5] != cplx(1.0)) throw ConfigError("the base polynomial must be monic");
    std::array<cplx, 6> a;
    std::copy(v.begin(), v.end(), a.begin());
    c.base = BaseCurve(a);
  } else if (roots) {
    const auto v = parse_complex_list(*roots);
    if (v.size() != 5) throw ConfigError("curve.roots needs 5 values");
    c.base = BaseCurve::from_roots(v);
  }
  if (const auto hs = cv.get_optional<std::string>("hams")) {
    const auto v = parse_complex_list(*hs);
    c.hams = Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  const auto& cf = sec("configuration");
  if (!cf.empty()) {
    std::vector<cplx> xs, ys, ls;
    for (auto [key, dst] : {std::pair{"x", &xs}, {"y", &ys}, {"lambda", &ls}}) {
      const auto v = cf.get_optional<std::string>(key);
      if (!v) throw ConfigError(std::string("configuration.") + key + " is missing");
      *dst = parse_complex_list(*v);
      if (static_cast<int>(dst->size()) != h)
        throw ConfigError(std::string("configuration.") + key + " needs " + std::to_string(h) + " values");
    }
    PhaseConfiguration pc;
    for (int i = 0; i < h; ++i) pc.points.push_back({xs[i], ys[i], ls[i]});
    c.configuration = pc;
  }

  const auto& fl = sec("flow");
  c.hamiltonian = number(fl, "hamiltonian", c.hamiltonian);
  c.t_max = number(fl, "t_max", c.t_max);
  c.samples = number(fl, "samples", c.samples);
  c.seed = number(fl, "seed", c.seed);
  if (const auto m = fl.get_optional<std::string>("method")) c.method = parse_method(trim(*m));

  const auto& tl = sec("tolerances");
  c.tol.quadrature = number(tl, "quadrature", c.tol.quadrature);
  c.tol.theta_eps = number(tl, "theta_eps", c.tol.theta_eps);
  c.tol.theta_budget = number(tl, "theta_budget", c.tol.theta_budget);
  c.tol.residual = number(tl, "residual", c.tol.residual);
  c.tol.ode_rel_tol = number(tl, "ode_rel_tol", c.tol.ode_rel_tol);
  c.tol.calibration_seeds = number(tl, "calibration_seeds", c.tol.calibration_seeds);

  const auto& out = sec("output");
  c.output_dir = trim(out.get<std::string>("dir", c.output_dir));
  c.cache_dir = trim(out.get<std::string>("cache", c.cache_dir));
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace harness
