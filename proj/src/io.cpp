#include "infodiv/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace infodiv::io {

Precision precision_from_env() {
  const char* v = std::getenv("INFODIV_PRECISION");
  if (!v || std::string(v).empty() || std::string(v) == "extended") return Precision::extended;
  if (std::string(v) == "double") return Precision::binary64;
  throw std::invalid_argument("INFODIV_PRECISION must be 'extended' or 'double'");
}

Real at_boundary(Real x, Precision p) {
  return p == Precision::binary64 ? static_cast<Real>(static_cast<double>(x)) : x;
}

Json to_json(const prob::Pmf& p, Precision prec) {
  Json j;
  j["labels"] = p.labels();
  j["mode"] = p.exact() ? "exact" : "float";
  Json w = Json::array();
  if (p.exact()) {
    for (const auto& x : p.exact_weights()) w.push_back(to_string(x));
    if (sgn(p.exact_tail()) != 0) j["tail"] = to_string(p.exact_tail());
  } else {
    for (Real x : p.weights()) w.push_back(at_boundary(x, prec));
    if (p.tail_mass() != 0) j["tail"] = at_boundary(p.tail_mass(), prec);
  }
  j["weights"] = std::move(w);
  return j;
}

namespace {

Rational json_rational(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(mpz_class(std::to_string(v.get<std::int64_t>())));
  // dump() gives the shortest round-trip decimal, so 0.1 reads as 1/10.
  if (v.is_number()) return parse_rational(v.dump());
  throw std::invalid_argument("weight must be a number or a string");
}

Real json_real(const Json& v) {
  if (v.is_string()) return to_real(parse_rational(v.get<std::string>()));
  if (v.is_number()) return v.get<double>();
  throw std::invalid_argument("weight must be a number or a string");
}

}  // namespace

prob::Pmf pmf_from_json(const Json& j, Precision prec) {
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_array())
    throw std::invalid_argument("pmf JSON needs a weights array");
  const auto& w = j["weights"];
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& l : j["labels"]) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  } else {
    labels = prob::numbered_labels(w.size());
  }
  bool all_strings = !w.empty();
  for (const auto& x : w) all_strings = all_strings && x.is_string();
  std::string mode = j.value("mode", std::string(all_strings ? "exact" : "float"));
  if (mode == "exact") {
    std::vector<Rational> ws;
    for (const auto& x : w) ws.push_back(json_rational(x));
    Rational tail = j.contains("tail") ? json_rational(j["tail"]) : Rational(0);
    return prob::Pmf::from_rationals(std::move(labels), std::move(ws), tail);
  }
  if (mode != "float") throw std::invalid_argument("mode must be 'exact' or 'float'");
  std::vector<Real> ws;
  for (const auto& x : w) ws.push_back(at_boundary(json_real(x), prec));
  Real tail = j.contains("tail") ? json_real(j["tail"]) : 0.0L;
  Real tol = prec == Precision::binary64 ? 1e-9L : 1e-12L;
  return prob::Pmf::from_floats(std::move(labels), std::move(ws), tail, tol);
}

Json to_json(const spectrum::StepCdf& f, Precision prec) {
  Json t = Json::array(), m = Json::array();
  for (const auto& a : f.atoms()) {
    t.push_back(at_boundary(a.t, prec));
    m.push_back(at_boundary(a.mass, prec));
  }
  return Json{{"t", t}, {"mass", m}};
}

spectrum::StepCdf stepcdf_from_json(const Json& j) {
  if (!j.contains("t") || !j.contains("mass")) throw std::invalid_argument("StepCdf JSON needs t and mass");
  const auto& t = j["t"];
  const auto& m = j["mass"];
  if (t.size() != m.size()) throw std::invalid_argument("StepCdf JSON: t and mass differ in length");
  std::vector<spectrum::Atom> atoms;
  for (std::size_t i = 0; i < t.size(); ++i) atoms.push_back({json_real(t[i]), json_real(m[i])});
  return spectrum::StepCdf(std::move(atoms));
}

void write_csv(std::ostream& out, const spectrum::StepCdf& f) {
  out << "t,F(t)\n";
  out.precision(19);
  Real c = 0;
  for (const auto& a : f.atoms()) {
    c += a.mass;
    out << a.t << "," << std::min(c, 1.0L) << "\n";
  }
}

Json to_json(const divide::CompoundPoissonLaw& law, Precision prec) {
  Json comps = Json::array();
  for (const auto& c : law.components())
    comps.push_back(Json{{"rate", at_boundary(c.rate, prec)}, {"jumps", to_json(c.jumps, prec)}});
  return Json{{"offset", at_boundary(law.offset(), prec)},
              {"rate", at_boundary(law.rate(), prec)},
              {"mean", at_boundary(law.mean(), prec)},
              {"components", comps}};
}

Json to_json(const divide::GeomMap& g) {
  Json j;
  j["sources"] = g.source_labels;
  j["targets"] = g.target_labels;
  j["levels"] = g.levels;
  if (g.period_start) j["period_start"] = *g.period_start;
  else j["period_start"] = nullptr;
  j["exact"] = g.exact;
  if (!g.period_start) {
    Json r = Json::array();
    if (g.exact) for (const auto& x : g.residual_exact) r.push_back(to_string(x));
    else for (Real x : g.residual) r.push_back(x);
    j["residual"] = r;
  }
  j["greedy_steps"] = g.greedy_steps;
  j["exhaustive_steps"] = g.exhaustive_steps;
  return j;
}

Json to_json(const divide::DivisionCertificate& c, Precision prec) {
  auto r = [&](Real x) { return at_boundary(x, prec); };
  Json j;
  j["n"] = c.n;
  j["p_Y"] = to_json(c.p_Y, prec);
  Json pb;
  pb["name"] = c.p_B.name();
  std::uint64_t K = c.p_B.truncation_index(1e-12L);
  Json head = Json::array();
  for (std::uint64_t k = 1; k <= std::min<std::uint64_t>(K, 16); ++k) head.push_back(r(c.p_B.weight(k)));
  pb["first_weights"] = head;
  pb["truncation_index"] = K;
  pb["tail_mass"] = r(c.p_B.tail_after(K));
  j["p_B"] = pb;
  j["p_Z_support"] = c.p_Z.size();
  j["p_Z_tail_mass"] = r(c.p_Z.tail_mass());
  j["map_description"] = c.map_description;
  j["dominator"] = c.dominator;
  j["H_X"] = r(c.H_X);
  j["H_Y"] = r(c.H_Y);
  j["H_B"] = Json{{"lower", r(c.H_B.lower)}, {"upper", r(c.H_B.upper)}};
  j["H_Z1"] = r(c.H_Z1);
  j["tail_slack"] = r(c.tail_slack);
  j["lower_bound"] = r(c.lower_bound);
  j["upper_bound"] = r(c.upper_bound);
  j["multiplicative_factor"] = r(c.multiplicative_factor);
  j["additive_term"] = r(c.additive);
  j["mean_ratio"] = r(c.mean_ratio);
  const auto& v = c.verdicts;
  Json verdicts{{"dominance", v.dominance},
                {"majorization", v.majorization},
                {"entropy_sandwich", v.entropy_sandwich},
                {"booster_witness", v.booster_witness}};
  verdicts["info_majorization"] = v.info_majorization_checked ? Json(v.info_majorization) : Json("skipped");
  verdicts["aggregation"] = v.aggregation_checked ? Json(v.aggregation) : Json("skipped");
  j["verdicts"] = verdicts;
  j["booster_witness"] = Json{{"depth", c.witness.depth}, {"max_cdf_error", r(c.witness.max_cdf_error)}};
  if (c.aggregation_map) j["aggregation_map"] = to_json(*c.aggregation_map);
  return j;
}

Json to_json(const sid::SnbParams& p) {
  return Json{{"r", p.r}, {"p", to_string(p.p)}, {"a", p.a}, {"b", p.b}};
}

sid::SnbParams snb_from_json(const Json& j) {
  sid::SnbParams p;
  p.r = j.at("r").get<int>();
  p.p = json_rational(j.at("p"));
  p.a = j.at("a").get<std::uint64_t>();
  p.b = j.at("b").get<std::uint64_t>();
  p.validate();
  return p;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

}  // namespace infodiv::io
