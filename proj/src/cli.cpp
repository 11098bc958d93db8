#include "infodiv/cli.hpp"

#include "infodiv/divide.hpp"
#include "infodiv/iidca.hpp"
#include "infodiv/io.hpp"
#include "infodiv/sid.hpp"
#include "infodiv/uniform.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

namespace infodiv::cli {

namespace {

using io::Json;

struct Options {
  RunConfig cfg;
  std::string out_path;
  std::string fault;
  std::string pmf_path;
  std::string csv_path;
  std::string samples_path;
  std::string combine_path;
  int n = 2;
  int m = 2;
  int a = -1;
  Real gamma = 2;
  Real H = 0;
  Real ratio = 0;
  int snb_r = 1;
  std::string snb_p = "1";
  std::uint64_t snb_a = 1;
  std::uint64_t snb_b = 1;
  std::vector<int> check_roots;
  std::uint64_t max_block = 8;
  std::uint64_t seed = 0;
  int corpus = 20;
};

prob::Pmf load_pmf(const Options& o, io::Precision prec) {
  return io::pmf_from_json(io::read_json_file(o.pmf_path), prec);
}

Json run_spectrum(const Options& o, io::Precision prec) {
  auto p = load_pmf(o, prec);
  auto f = spectrum::spectrum_of(p.without_zeros());
  if (!o.csv_path.empty()) {
    std::ofstream csv(o.csv_path);
    if (!csv) throw std::invalid_argument("cannot write " + o.csv_path);
    io::write_csv(csv, f);
  }
  return Json{{"spectrum", io::to_json(f, prec)},
              {"G1", io::at_boundary(spectrum::big_g(f, 1), prec)},
              {"mean", io::at_boundary(spectrum::mean(f), prec)},
              {"entropy", io::at_boundary(prob::entropy(p), prec)}};
}

Json run_divide(const Options& o, io::Precision prec) {
  auto p = load_pmf(o, prec);
  return io::to_json(divide::divide_pmf(p, o.n, o.cfg), prec);
}

Json run_divide_iid(const Options& o, io::Precision prec) {
  auto p = load_pmf(o, prec);
  auto c = divide::divide_iid(p, o.m, o.n, o.cfg);
  Json j = io::to_json(c, prec);
  j["m"] = o.m;
  return j;
}

Json run_iidca(const Options& o, io::Precision prec) {
  prob::Pmf p;
  if (!o.samples_path.empty()) {
    std::ifstream in(o.samples_path);
    if (!in) throw std::invalid_argument("cannot open " + o.samples_path);
    p = iidca::estimate_pmf_from_samples(iidca::read_sample_counts(in));
  } else {
    p = load_pmf(o, prec);
  }
  Real tol = o.cfg.tolerance < 1e-10L ? o.cfg.tolerance : 1e-10L;
  auto r = iidca::iidca_greedy(p, o.n, tol);
  return Json{{"q", io::to_json(r.q, prec)},
              {"n", r.n},
              {"lost_information", io::at_boundary(r.lost_information, prec)},
              {"active_constraints", r.per_step_active_constraints}};
}

Json run_snb(const Options& o, io::Precision prec) {
  sid::SnbParams params;
  params.r = o.snb_r;
  params.p = parse_rational(o.snb_p);
  params.a = o.snb_a;
  params.b = o.snb_b;
  params.validate();
  Json j;
  j["params"] = io::to_json(params);
  j["last_block"] = sid::snb_last_block(params, o.cfg.tail_eps);
  auto spec = sid::snb_spectrum(params, o.cfg.tail_eps);
  j["spectrum"] = io::to_json(spec, prec);
  Json roots = Json::array();
  for (int n : o.check_roots) {
    auto root = sid::snb_spectrum_root(params, n, o.cfg.tail_eps);
    Real d = spectrum::uniform_metric(spectrum::power_convolve(root, n), spec);
    bool ok = d <= 1e-8L && !fault_injected("sid.root");
    roots.push_back(Json{{"n", n}, {"d_U", io::at_boundary(d, prec)}, {"ok", ok}});
    if (!ok) throw VerificationError("sid.root", "n-th root does not reproduce the spectrum for n=" + std::to_string(n));
  }
  j["root_checks"] = roots;
  if (!o.combine_path.empty()) {
    auto other = io::snb_from_json(io::read_json_file(o.combine_path));
    auto comb = sid::snb_combine(params, other);
    auto check = sid::verify_snb_combine(comb, o.max_block);
    j["combine"] = Json{{"result", io::to_json(comb.result)},
                        {"max_block", o.max_block},
                        {"pairs", check.pairs},
                        {"injective", check.injective},
                        {"weights_match", check.weights_match},
                        {"covers_blocks", check.covers_blocks}};
    if (!check.ok() || fault_injected("sid.combine"))
      throw VerificationError("sid.combine", "combination map failed its exhaustive check");
  }
  return j;
}

Json run_uniform(const Options& o, io::Precision prec) {
  auto p = load_pmf(o, prec);
  auto base = spectrum::spectrum_of(p.without_zeros());
  auto r = uniform::theorem4_construct(base, o.m, o.cfg.max_depth, o.cfg);
  auto sched = uniform::theorem4_schedule(o.m);
  return Json{{"achieved_ratio", io::at_boundary(r.achieved_ratio, prec)},
              {"bound", io::at_boundary(std::max(kE / (kE - 1), uniform::theorem4_bound(o.m)), prec)},
              {"theorem4_bound", io::at_boundary(uniform::theorem4_bound(o.m), prec)},
              {"dominance", "ok"},
              {"dominance_gap", io::at_boundary(r.dominance_gap, prec)},
              {"method", r.method},
              {"depth", r.depth},
              {"ratio_by_depth", r.ratio_by_depth},
              {"schedule",
               {{"alpha", sched.alpha},
                {"beta", sched.beta},
                {"psi", sched.psi},
                {"k", sched.k},
                {"gamma_k", sched.gamma_k},
                {"m_k", sched.m_k},
                {"guaranteed_ratio", sched.guaranteed_ratio}}},
              {"law", io::to_json(r.law, prec)}};
}

Json run_verify_dominance(const Options& o, io::Precision) {
  int a = o.a >= 0 ? o.a : static_cast<int>(std::ceil(o.n / (o.gamma * o.gamma) - 1e-12L));
  auto r = uniform::bin_poi_report(o.gamma, o.n, a);
  Json j{{"gamma", o.gamma}, {"n", o.n}, {"a", a}, {"hypothesis", r.hypothesis},
         {"dominated", r.dominated}, {"max_violation", r.max_violation}};
  if (!r.hypothesis) j["note"] = "a < n/gamma^2: claim hypothesis violated";
  if (!r.dominated || fault_injected("uniform.bin_poi"))
    throw VerificationError("uniform.bin_poi", "N+a+1 does not dominate M");
  return j;
}

Json run_bounds(const Options& o, io::Precision) {
  Real factor = divide::theorem1_factor(o.n);
  std::string source = "theorem1";
  if (o.m >= 2 && o.ratio == 0) {
    factor = std::min(uniform::theorem4_bound(o.m), kE / (kE - 1));
    source = "theorem4(m=" + std::to_string(o.m) + ")";
  } else if (o.ratio > 0) {
    factor = o.ratio;
    source = "given";
  }
  Real bound = divide::bound_with_ratio(o.H, o.n, factor);
  Real add = std::min(2.43L, divide::additive_term(o.H, o.n));
  std::ostringstream summary;
  summary.precision(6);
  summary << "H(Z1) <= " << static_cast<double>(bound);
  return Json{{"H", o.H}, {"n", o.n}, {"multiplicative_factor", factor}, {"factor_source", source},
              {"additive_term", add}, {"bound", bound}, {"summary", summary.str()}};
}

prob::Pmf random_pmf(std::mt19937_64& rng, int max_support) {
  std::uniform_int_distribution<int> size(1, max_support), w(1, 20);
  int s = size(rng);
  std::vector<long> ints(s);
  long total = 0;
  for (auto& x : ints) total += (x = w(rng));
  std::vector<Rational> ws;
  for (long x : ints) ws.emplace_back(x, total);
  for (auto& x : ws) x.canonicalize();
  return prob::Pmf::from_rationals(std::move(ws));
}

Json run_selftest(const Options& o, io::Precision) {
  std::mt19937_64 rng(o.seed);
  int dominance = 0, certificates = 0, iidca_runs = 0;
  Real worst_ratio_gap = -1;
  for (int i = 0; i < o.corpus; ++i) {
    auto p = random_pmf(rng, 8);
    auto f = spectrum::spectrum_of(p);
    for (int n : {2, 3, 5}) {
      auto t1 = divide::dominate_ndiv(f, n, o.cfg);
      worst_ratio_gap = std::max(worst_ratio_gap, t1.mean_ratio - divide::theorem1_factor(n));
      ++dominance;
    }
    divide::dominate_infdiv(f, o.cfg);
    ++dominance;
    divide::divide_pmf(p, 2, o.cfg);
    ++certificates;
    if (p.size() <= 5) {
      iidca::iidca_greedy(p, 2);
      ++iidca_runs;
    }
  }
  return Json{{"seed", o.seed}, {"corpus", o.corpus}, {"dominance_checks", dominance},
              {"certificates", certificates}, {"iidca_runs", iidca_runs},
              {"worst_ratio_minus_bound", worst_ratio_gap}, {"ok", true}};
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"infodiv: divide discrete random variables into i.i.d. components"};
  app.require_subcommand(1, 1);
  double tol = 1e-9, tail = 1e-12, pois = 1e-12;
  std::size_t max_atoms = o.cfg.max_atoms;
  app.add_option("--tol", tol, "Comparison tolerance")->capture_default_str();
  app.add_option("--tail-eps", tail, "Tail mass for lazy truncation")->capture_default_str();
  app.add_option("--poisson-eps", pois, "Poisson truncation mass")->capture_default_str();
  app.add_option("--max-depth", o.cfg.max_depth, "Recursion depth for the uniform construction")->capture_default_str();
  app.add_option("--max-atoms", max_atoms, "Atom cap for intermediate convolutions")->capture_default_str();
  app.add_option("--out", o.out_path, "Write the JSON result to this file");
  app.add_option("--inject-fault", o.fault)->group("");

  auto* spec = app.add_subcommand("spectrum", "Information spectrum of a pmf");
  spec->add_option("--pmf", o.pmf_path)->required();
  spec->add_option("--csv", o.csv_path, "Write t,F(t) rows");

  auto* div = app.add_subcommand("divide", "Divide X into n i.i.d. pieces");
  div->add_option("--pmf", o.pmf_path)->required();
  div->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  div->add_flag("--emit-map", o.cfg.emit_map, "Build the aggregation map in float mode too");

  auto* iid = app.add_subcommand("divide-iid", "Divide X = Y^m into n i.i.d. pieces");
  iid->add_option("--pmf", o.pmf_path, "pmf of Y")->required();
  iid->add_option("--m", o.m)->required()->check(CLI::Range(2, 1 << 20));
  iid->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);

  auto* ica = app.add_subcommand("iidca", "Greedy i.i.d. component analysis");
  auto* ica_pmf = ica->add_option("--pmf", o.pmf_path);
  auto* ica_samples = ica->add_option("--samples", o.samples_path, "CSV of samples or label,count rows");
  ica_pmf->excludes(ica_samples);
  ica->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);

  auto* snb = app.add_subcommand("snb", "Spectral negative binomial tools");
  snb->add_option("--r", o.snb_r)->required()->check(CLI::PositiveNumber);
  snb->add_option("--p", o.snb_p)->required();
  snb->add_option("--a", o.snb_a)->required();
  snb->add_option("--b", o.snb_b)->required();
  snb->add_option("--combine", o.combine_path, "JSON with r, p, a, b of the second factor");
  snb->add_option("--check-root", o.check_roots, "Verify the n-th spectral root");
  snb->add_option("--max-block", o.max_block, "Blocks covered by the combine check")->capture_default_str();

  auto* uni = app.add_subcommand("uniform", "Infinitely divisible dominator of an m-fold power");
  uni->add_option("--pmf", o.pmf_path, "pmf of the base")->required();
  uni->add_option("--m", o.m)->required()->check(CLI::Range(2, 1 << 20));
  uni->add_option("--depth", o.cfg.max_depth, "Maximum recursion depth");

  auto* vd = app.add_subcommand("verify-dominance", "Binomial/Poisson dominance check");
  vd->add_option("--gamma", o.gamma)->required();
  vd->add_option("--n", o.n)->required()->check(CLI::NonNegativeNumber);
  vd->add_option("--a", o.a, "Defaults to ceil(n/gamma^2)");

  auto* bnd = app.add_subcommand("bounds", "Evaluate the per-piece entropy bound");
  bnd->add_option("--H", o.H, "Entropy of X in bits")->required()->check(CLI::NonNegativeNumber);
  bnd->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  bnd->add_option("--m", o.m, "Use the uniform-construction ratio for X = Y^m");
  bnd->add_option("--ratio", o.ratio, "Use this multiplicative factor");

  auto* st = app.add_subcommand("selftest", "Run seeded randomized checks");
  st->add_option("--seed", o.seed)->capture_default_str();
  st->add_option("--corpus", o.corpus)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  if (ica->parsed() && o.pmf_path.empty() && o.samples_path.empty()) {
    err << "usage error: iidca needs --pmf or --samples\n";
    return kUsage;
  }
  if (bnd->parsed() && bnd->count("--m") == 0) o.m = 0;

  set_fault_injection(o.fault);
  int code = kOk;
  try {
    o.cfg.tolerance = tol;
    o.cfg.tail_eps = tail;
    o.cfg.poisson_trunc_eps = pois;
    o.cfg.max_atoms = max_atoms;
    o.cfg.validate();
    auto prec = io::precision_from_env();
    Json result;
    if (spec->parsed()) result = run_spectrum(o, prec);
    else if (div->parsed()) result = run_divide(o, prec);
    else if (iid->parsed()) result = run_divide_iid(o, prec);
    else if (ica->parsed()) result = run_iidca(o, prec);
    else if (snb->parsed()) result = run_snb(o, prec);
    else if (uni->parsed()) result = run_uniform(o, prec);
    else if (vd->parsed()) result = run_verify_dominance(o, prec);
    else if (bnd->parsed()) result = run_bounds(o, prec);
    else if (st->parsed()) result = run_selftest(o, prec);
    std::string text = result.dump(2) + "\n";
    if (o.out_path.empty()) out << text;
    else io::write_text_file(o.out_path, text);
  } catch (const VerificationError& e) {
    err << "verification failed [" << e.check() << "]: " << e.what() << "\n";
    code = kVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kUsage;
  }
  set_fault_injection("");
  return code;
}

}  // namespace infodiv::cli
