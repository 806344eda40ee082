// Command-line front end: schedules, constructions, analyses, reports.
//
// Exit codes: 0 success, 1 invalid arguments, 2 schedule constraint
// failure, 3 certificate failure (an asserted inequality did not hold).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circleabc/analysis.hpp"
#include "circleabc/chain.hpp"
#include "circleabc/manifest.hpp"
#include "circleabc/measures.hpp"
#include "circleabc/svg.hpp"
#include "circleabc/zd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// The most interesting failure mode: a certified inequality came out false.
struct CertificateFailure : std::exception {
  std::string msg;
  explicit CertificateFailure(std::string m) : msg(std::move(m)) {}
  const char* what() const noexcept override { return msg.c_str(); }
};

struct Common {
  unsigned precision_bits = 256;
  unsigned depth = 2;
  std::string q1 = "32";
  std::string p1 = "1";
  unsigned seed = 0;
  std::string out_dir = "out";
  std::string schedule_file;
  unsigned grid = 512;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--precision-bits", c.precision_bits,
                  "working precision floor in bits");
  sub->add_option("--q1", c.q1, "first denominator (>= 32)");
  sub->add_option("--p1", c.p1, "first numerator");
  sub->add_option("--seed", c.seed, "sample-point jitter seed");
  sub->add_option("--out-dir", c.out_dir, "output directory");
  sub->add_option("--schedule", c.schedule_file,
                  "load a schedule JSON instead of synthesizing one");
  sub->add_option("--grid", c.grid, "base sampling grid for norm feedback");
}

abc::SampleOptions sample_opts(const Common& c) {
  abc::SampleOptions o;
  o.base_grid = c.grid;
  o.grid_cap = 4 * c.grid;
  o.refine_iters = 16;
  o.dinf_terms = 6;
  o.seed = c.seed;
  return o;
}

abc::Schedule get_schedule(const Common& c, unsigned stages,
                           unsigned zd_rank, abc::RunManifest& man) {
  if (!c.schedule_file.empty()) {
    std::ifstream in(c.schedule_file, std::ios::binary);
    if (!in)
      throw std::invalid_argument("cannot open schedule: " + c.schedule_file);
    json j;
    in >> j;
    abc::Schedule s = abc::Schedule::from_json(j);
    if (s.depth() < stages + 1)
      throw abc::ScheduleError("loaded schedule too shallow for this run");
    man.schedule_ref = c.schedule_file;
    return s;
  }
  man.schedule_ref = "synthesized";
  return abc::build_schedule_with_feedback(
      stages, abc::Int(c.q1), abc::Int(c.p1), zd_rank, sample_opts(c));
}

// Collects outputs and finishes with the manifest next to them.
struct Emitter {
  fs::path dir;
  abc::RunManifest man;

  explicit Emitter(const Common& c, std::string command) {
    dir = c.out_dir;
    fs::create_directories(dir);
    man.command = std::move(command);
    man.precision_bits = c.precision_bits;
    man.seed = c.seed;
  }

  void file(const std::string& name, const std::string& body) {
    abc::write_text_file((dir / name).string(), body);
    man.outputs.push_back(name);
  }

  void finish() {
    abc::write_text_file((dir / "manifest.json").string(),
                         abc::json_text(man.to_json()));
    std::cout << man.command << ": wrote " << man.outputs.size() + 1
              << " files to " << dir.string() << "\n";
  }
};

std::vector<std::string> common_argv(const std::string& cmd, const Common& c) {
  std::vector<std::string> v{cmd,
                             "--precision-bits",
                             std::to_string(c.precision_bits),
                             "--q1",
                             c.q1,
                             "--p1",
                             c.p1,
                             "--seed",
                             std::to_string(c.seed),
                             "--grid",
                             std::to_string(c.grid)};
  if (!c.schedule_file.empty()) {
    v.push_back("--schedule");
    v.push_back(c.schedule_file);
  }
  return v;
}

json common_params(const Common& c) {
  return {{"precision_bits", c.precision_bits},
          {"q1", c.q1},
          {"p1", c.p1},
          {"seed", c.seed},
          {"grid", c.grid},
          {"schedule", c.schedule_file}};
}

int run(const std::vector<std::string>& args);

// ---- subcommands ----------------------------------------------------------

int cmd_schedule(const Common& c, unsigned zd_rank) {
  Emitter em(c, "schedule");
  em.man.argv = common_argv("schedule", c);
  em.man.argv.insert(em.man.argv.end(),
                     {"--depth", std::to_string(c.depth), "--zd-rank",
                      std::to_string(zd_rank)});
  em.man.parameters = common_params(c);
  em.man.parameters["depth"] = c.depth;
  em.man.parameters["zd_rank"] = zd_rank;
  abc::Schedule s = get_schedule(c, c.depth, zd_rank, em.man);
  em.file("schedule.json", abc::json_text(s.to_json()));
  em.finish();
  return 0;
}

int cmd_construct(const Common& c, const std::string& bits, bool ac) {
  Emitter em(c, "construct");
  em.man.argv = common_argv("construct", c);
  em.man.argv.insert(em.man.argv.end(), {"--bits", bits});
  if (ac) em.man.argv.push_back("--ac");
  em.man.parameters = common_params(c);
  em.man.parameters["bits"] = bits;
  em.man.parameters["ac"] = ac;

  abc::BitSeq a = abc::parse_bits(bits);
  unsigned n = static_cast<unsigned>(a.size());
  abc::Schedule s = get_schedule(c, n, 0, em.man);
  abc::ConjugacyChain chain = abc::build_chain(a, s, ac);
  abc::PrecisionGuard prec(
      std::max(c.precision_bits, abc::suggest_precision_bits(s, n)));
  json doc;
  doc["bits"] = bits;
  doc["ac_variant"] = ac;
  doc["stages"] = n;
  doc["schedule"] = s.to_json();
  doc["H_tree"] = chain.deepest()->to_json();
  doc["T_tree"] = abc::build_T(chain, n)->to_json();
  em.file("construction.json", abc::json_text(doc));
  em.file("schedule.json", abc::json_text(s.to_json()));
  em.finish();
  return 0;
}

int cmd_eval(const Common& c, const std::string& bits, bool ac,
             const std::string& x_str, unsigned points, bool inverse) {
  Emitter em(c, "eval");
  em.man.argv = common_argv("eval", c);
  em.man.argv.insert(em.man.argv.end(),
                     {"--bits", bits, "--points", std::to_string(points)});
  if (!x_str.empty()) em.man.argv.insert(em.man.argv.end(), {"--x", x_str});
  if (ac) em.man.argv.push_back("--ac");
  if (inverse) em.man.argv.push_back("--inverse");
  em.man.parameters = common_params(c);
  em.man.parameters["bits"] = bits;
  em.man.parameters["x"] = x_str;
  em.man.parameters["points"] = points;
  em.man.parameters["ac"] = ac;
  em.man.parameters["inverse"] = inverse;

  abc::BitSeq a = abc::parse_bits(bits);
  unsigned n = static_cast<unsigned>(a.size());
  abc::Schedule s = get_schedule(c, n, 0, em.man);
  abc::ConjugacyChain chain = abc::build_chain(a, s, ac);
  abc::PrecisionGuard prec(
      std::max(c.precision_bits, abc::suggest_precision_bits(s, n)));
  abc::MapPtr T = abc::build_T(chain, n);

  std::vector<abc::Rational> xs;
  if (!x_str.empty())
    xs.push_back(abc::Rational(x_str));
  else
    for (unsigned j = 0; j < points; ++j)
      xs.emplace_back(2 * j + 1, 2 * points);

  json vals = json::array();
  for (const abc::Rational& x : xs) {
    json e;
    e["x"] = abc::CircleMap::rat_json(x);
    abc::Real v = inverse ? T->eval_inverse(abc::to_real(x))
                          : T->eval(abc::to_real(x));
    e["value"] = abc::real_to_string(v);
    auto exact = inverse ? T->exact_eval_inverse(x) : T->exact_eval(x);
    if (exact) e["exact"] = abc::CircleMap::rat_json(*exact);
    vals.push_back(e);
  }
  json doc;
  doc["bits"] = bits;
  doc["inverse"] = inverse;
  doc["values"] = vals;
  em.file("eval.json", abc::json_text(doc));

  std::vector<std::pair<double, double>> pts;
  for (unsigned j = 0; j <= 512; ++j) {
    abc::Real x = abc::Real(j) / 512;
    abc::Real y = inverse ? T->eval_inverse(x) : T->eval(x);
    pts.emplace_back(static_cast<double>(x), static_cast<double>(y));
  }
  em.file("graph.svg", abc::curve_svg(pts, "conjugated rotation, stage " +
                                               std::to_string(n)));
  em.finish();
  return 0;
}

int cmd_rotnum(const Common& c, const std::string& bits,
               const std::string& iters) {
  Emitter em(c, "rotnum");
  em.man.argv = common_argv("rotnum", c);
  em.man.argv.insert(em.man.argv.end(), {"--bits", bits, "--depth",
                                         std::to_string(c.depth), "--iters",
                                         iters});
  em.man.parameters = common_params(c);
  em.man.parameters["bits"] = bits;
  em.man.parameters["depth"] = c.depth;
  em.man.parameters["iters"] = iters;

  abc::BitSeq a = abc::parse_bits(bits);
  unsigned n = std::min<unsigned>(c.depth, static_cast<unsigned>(a.size()));
  a.resize(n);
  abc::Schedule s = get_schedule(c, n, 0, em.man);
  abc::ConjugacyChain chain = abc::build_chain(a, s);
  abc::PrecisionGuard prec(
      std::max(c.precision_bits, abc::suggest_precision_bits(s, n)));
  abc::MapPtr T = abc::build_T(chain, n);
  abc::Rational target = s.alpha[n];  // alpha_{n+1} = p_{n+1}/q_{n+1}
  bool full_period = iters == "q";
  abc::Int m_exact =
      full_period ? denominator(target) : abc::Int(std::stoul(iters));
  if (m_exact > (abc::Int(1) << 31))
    throw std::invalid_argument(
        "iteration count too large to orbit; pass --iters explicitly or "
        "supply a smaller --schedule");
  unsigned long m = m_exact.convert_to<unsigned long>();
  abc::RotationEstimate est = abc::rotation_number(T, abc::Real(0), m);
  abc::Real deviation = abs(est.value - abc::to_real(target));
  // at m = q_{n+1} the lift orbit of 0 closes up exactly, so the Birkhoff
  // average must hit alpha_{n+1} on the nose
  bool match = deviation < pow(abc::Real(10), -20);

  json doc;
  doc["bits"] = bits;
  doc["stage"] = n;
  doc["target_alpha"] = abc::CircleMap::rat_json(target);
  doc["estimate"] = est.to_json();
  doc["deviation"] = abc::real_to_string(deviation);
  doc["match"] = match;
  em.file("rotnum.json", abc::json_text(doc));
  em.finish();
  if (full_period && !match)
    throw CertificateFailure("rotation number estimate missed alpha");
  return 0;
}

int cmd_holder(const Common& c, const std::string& bits_a,
               const std::string& bits_b, unsigned stage) {
  Emitter em(c, "holder");
  em.man.argv = common_argv("holder", c);
  em.man.argv.insert(em.man.argv.end(), {"--bits-a", bits_a, "--bits-b",
                                         bits_b, "--stage",
                                         std::to_string(stage)});
  em.man.parameters = common_params(c);
  em.man.parameters["bits_a"] = bits_a;
  em.man.parameters["bits_b"] = bits_b;
  em.man.parameters["stage"] = stage;

  abc::BitSeq a = abc::parse_bits(bits_a);
  abc::BitSeq b = abc::parse_bits(bits_b);
  if (a.size() != b.size())
    throw std::invalid_argument("bit strings must have equal length");
  unsigned n = static_cast<unsigned>(a.size());
  if (stage == 0 || stage > n) throw std::invalid_argument("bad --stage");
  abc::Schedule s = get_schedule(c, n, 0, em.man);
  abc::ConjugacyChain ca = abc::build_chain(a, s);
  abc::ConjugacyChain cb = abc::build_chain(b, s);
  abc::WitnessReport rep = abc::holder_witness(ca, cb, stage);
  em.file("holder.json", abc::json_text(rep.to_json()));
  em.finish();
  if (!rep.verdict || !rep.gap_ok)
    throw CertificateFailure("Hoelder witness inequality failed");
  return 0;
}

int cmd_reduce(const Common& c, const std::string& bits_a,
               const std::string& bits_b) {
  Emitter em(c, "reduce");
  em.man.argv = common_argv("reduce", c);
  em.man.argv.insert(em.man.argv.end(),
                     {"--bits-a", bits_a, "--bits-b", bits_b});
  em.man.parameters = common_params(c);
  em.man.parameters["bits_a"] = bits_a;
  em.man.parameters["bits_b"] = bits_b;

  abc::BitSeq a = abc::parse_bits(bits_a);
  abc::BitSeq b = abc::parse_bits(bits_b);
  if (a.size() != b.size())
    throw std::invalid_argument("bit strings must have equal length");
  unsigned depth = static_cast<unsigned>(a.size());
  abc::Schedule s = get_schedule(c, depth, 0, em.man);
  abc::ConjugacyChain ca = abc::build_chain(a, s);
  abc::ConjugacyChain cb = abc::build_chain(b, s);

  std::vector<unsigned> mismatches;
  for (unsigned i = 1; i <= depth; ++i)
    if (a[i - 1] != b[i - 1]) mismatches.push_back(i);

  json doc;
  doc["bits_a"] = bits_a;
  doc["bits_b"] = bits_b;
  doc["depth"] = depth;
  doc["mismatch_set"] = mismatches;
  bool ok = true;
  // dichotomy at truncation: agreement on the recorded tail stabilizes the
  // cancelled conjugator (R1); a mismatch surviving to the deepest stage
  // produces Hoelder-violation witnesses at every mismatch stage (R2)
  if (mismatches.empty()) {
    doc["verdict"] = "R1";
    doc["detail"] = "identity conjugacy";
    doc["r1"] = json{{"N", 0},
                     {"holds", true},
                     {"stable_map", abc::CircleMap::identity()->to_json()}};
  } else if (mismatches.back() < depth) {
    abc::R1Certificate cert =
        abc::r1_stabilization(ca, cb, mismatches.back());
    doc["verdict"] = "R1";
    doc["detail"] = "cancelled conjugator stabilizes beyond stage " +
                    std::to_string(mismatches.back());
    doc["r1"] = cert.to_json();
    ok = cert.holds;
  } else {
    doc["verdict"] = "R2";
    doc["detail"] = "Hoelder quotient blow-up at every mismatch stage";
    json ws = json::array();
    for (unsigned i : mismatches) {
      abc::WitnessReport rep = abc::holder_witness(ca, cb, i);
      ws.push_back(rep.to_json());
      if (!rep.verdict || !rep.gap_ok) ok = false;
    }
    doc["witnesses"] = ws;
  }
  doc["holds"] = ok;
  em.file("reduce.json", abc::json_text(doc));
  em.finish();
  if (!ok) throw CertificateFailure("reduction verdict failed");
  return 0;
}

int cmd_measure(const Common& c, const std::string& bits, bool ac,
                unsigned bins) {
  Emitter em(c, "measure");
  em.man.argv = common_argv("measure", c);
  em.man.argv.insert(em.man.argv.end(),
                     {"--bits", bits, "--bins", std::to_string(bins)});
  if (ac) em.man.argv.push_back("--ac");
  em.man.parameters = common_params(c);
  em.man.parameters["bits"] = bits;
  em.man.parameters["ac"] = ac;
  em.man.parameters["bins"] = bins;

  abc::BitSeq a = abc::parse_bits(bits);
  unsigned n = static_cast<unsigned>(a.size());
  abc::Schedule s = get_schedule(c, n, 0, em.man);
  abc::ConjugacyChain chain = ac ? abc::build_ac_chain(a, s)
                                 : abc::build_chain(a, s);
  abc::PrecisionGuard prec(
      std::max(c.precision_bits, abc::suggest_precision_bits(s, n)));
  json doc;
  doc["bits"] = bits;
  doc["ac_variant"] = ac;
  bool ok;
  if (ac) {
    abc::ACReport rep = abc::ac_report(chain, n);
    doc["ac_report"] = rep.to_json();
    ok = rep.xn_ok && rep.identity_on_Xn;
  } else {
    abc::SingularReport rep = abc::singular_bounds(chain, n);
    doc["singular_report"] = rep.to_json();
    ok = rep.all_ok;
  }
  abc::Histogram h = abc::pushforward_histogram(chain, n, bins);
  em.file("measure.json", abc::json_text(doc));
  em.file("histogram.csv", h.to_csv());
  std::vector<double> dens;
  for (const abc::Real& d : h.density)
    dens.push_back(static_cast<double>(d));
  em.file("histogram.svg",
          abc::histogram_svg(dens, ac ? "pushforward density (AC variant)"
                                      : "pushforward density (singular)"));
  em.finish();
  if (!ok) throw CertificateFailure("measure certificate failed");
  return 0;
}

int cmd_zd(const Common& c, unsigned rank, const std::string& bits,
           long coeff_bound, unsigned samples, double eps) {
  Emitter em(c, "zd");
  em.man.argv = common_argv("zd", c);
  em.man.argv.insert(
      em.man.argv.end(),
      {"--rank", std::to_string(rank), "--bits", bits, "--depth",
       std::to_string(c.depth), "--coeff-bound", std::to_string(coeff_bound),
       "--samples", std::to_string(samples), "--eps", std::to_string(eps)});
  em.man.parameters = common_params(c);
  em.man.parameters["rank"] = rank;
  em.man.parameters["bits"] = bits;
  em.man.parameters["depth"] = c.depth;
  em.man.parameters["coeff_bound"] = coeff_bound;
  em.man.parameters["samples"] = samples;
  em.man.parameters["eps"] = eps;

  abc::Schedule s = get_schedule(c, c.depth, rank, em.man);
  abc::BitSeq a = abc::parse_bits(bits);
  abc::PrecisionGuard prec(std::max(
      c.precision_bits, abc::suggest_precision_bits(s, c.depth)));
  abc::ZdActionTruncation act = abc::build_zd(a, s, rank);
  abc::CommutationReport comm = abc::commutation_check(act, samples);
  abc::Lemma62Report lem = abc::check_lemma62(s, rank, eps);
  abc::IndependenceReport ind = abc::independence_probe(s, rank, coeff_bound);

  json lemj;
  lemj["epsilon"] = lem.epsilon;
  lemj["rank"] = lem.rank;
  lemj["first_n_all_conditions"] = lem.first_n_all_conditions;
  lemj["all_recorded_pass"] = lem.all_recorded_pass;
  json stj = json::array();
  for (const auto& st : lem.stages)
    stj.push_back({{"n", st.n},
                   {"cond1", st.cond1},
                   {"cond2", st.cond2},
                   {"cond3", st.cond3},
                   {"cond4", st.cond4}});
  lemj["stages"] = stj;

  json doc;
  doc["rank"] = rank;
  doc["bits"] = bits;
  doc["stage"] = act.stage;
  json alphas = json::array();
  for (const abc::Rational& al : act.alphas)
    alphas.push_back(abc::CircleMap::rat_json(al));
  doc["alphas"] = alphas;
  doc["commutation"] = comm.to_json();
  doc["lemma_hypotheses"] = lemj;
  doc["independence"] = ind.to_json();
  em.file("zd.json", abc::json_text(doc));
  em.file("schedule.json", abc::json_text(s.to_json()));
  em.finish();
  if (!comm.pass || !ind.planted_ok)
    throw CertificateFailure("Z^d commutation certificate failed");
  return 0;
}

int cmd_report(const std::string& manifest_path, const std::string& out_dir,
               bool verify) {
  abc::RunManifest m = abc::RunManifest::load(manifest_path);
  std::vector<std::string> args = m.argv;
  args.insert(args.end(), {"--out-dir", out_dir});
  int code = run(args);
  if (code != 0) return code;
  if (verify) {
    fs::path orig = fs::path(manifest_path).parent_path();
    std::vector<std::string> names = m.outputs;
    names.push_back("manifest.json");
    for (const std::string& name : names) {
      std::ifstream f1(orig / name, std::ios::binary);
      std::ifstream f2(fs::path(out_dir) / name, std::ios::binary);
      if (!f1 || !f2)
        throw CertificateFailure("replay verification: missing " + name);
      std::string b1((std::istreambuf_iterator<char>(f1)),
                     std::istreambuf_iterator<char>());
      std::string b2((std::istreambuf_iterator<char>(f2)),
                     std::istreambuf_iterator<char>());
      if (b1 != b2)
        throw CertificateFailure("replay verification: " + name +
                                 " differs from the original");
    }
    std::cout << "replay verified: " << names.size()
              << " files byte-identical\n";
  }
  return 0;
}

// ---- driver -----------------------------------------------------------

int run(const std::vector<std::string>& args) {
  CLI::App app{"quantitative conjugated-rotation constructions"};
  app.require_subcommand(1);

  Common c;
  std::string bits = "0", bits_a, bits_b, x_str, iters = "q";
  std::string manifest_path, report_out = "out-replay";
  bool ac = false, inverse = false, verify = false;
  unsigned stage = 1, points = 17, bins = 48, zd_rank = 0, rank = 2;
  unsigned samples = 1000;
  long coeff_bound = 10;
  double eps = 0.1;

  auto* sc = app.add_subcommand("schedule", "synthesize a schedule");
  add_common(sc, c);
  sc->add_option("--depth", c.depth, "stages to extend");
  sc->add_option("--zd-rank", zd_rank, "0 for single-map, >= 2 for Z^d");

  auto* co = app.add_subcommand("construct", "build a conjugacy chain");
  add_common(co, c);
  co->add_option("--bits", bits, "0/1 stage flags")->required();
  co->add_flag("--ac", ac, "absolutely continuous variant");

  auto* ev = app.add_subcommand("eval", "evaluate the deepest truncation");
  add_common(ev, c);
  ev->add_option("--bits", bits)->required();
  ev->add_option("--x", x_str, "rational point p/q");
  ev->add_option("--points", points, "grid points when --x is absent");
  ev->add_flag("--ac", ac);
  ev->add_flag("--inverse", inverse, "evaluate the inverse map");

  auto* rn = app.add_subcommand("rotnum", "Birkhoff rotation number");
  add_common(rn, c);
  rn->add_option("--bits", bits)->required();
  rn->add_option("--depth", c.depth, "truncation stage n");
  rn->add_option("--iters", iters, "iteration count, or q for q_{n+1}");

  auto* ho = app.add_subcommand("holder", "Hoelder-violation witness");
  add_common(ho, c);
  ho->add_option("--bits-a", bits_a)->required();
  ho->add_option("--bits-b", bits_b)->required();
  ho->add_option("--stage", stage, "mismatch stage n");

  auto* re = app.add_subcommand("reduce", "E0-style dichotomy verdict");
  add_common(re, c);
  re->add_option("--bits-a", bits_a)->required();
  re->add_option("--bits-b", bits_b)->required();

  auto* me = app.add_subcommand("measure", "singular/AC measure certificates");
  add_common(me, c);
  me->add_option("--bits", bits)->required();
  me->add_flag("--ac", ac);
  me->add_option("--bins", bins, "histogram bins (>= 16)");

  auto* zd = app.add_subcommand("zd", "commuting Z^d generator family");
  add_common(zd, c);
  zd->add_option("--rank", rank, "number of generators (>= 2)");
  zd->add_option("--bits", bits);
  zd->add_option("--depth", c.depth);
  zd->add_option("--coeff-bound", coeff_bound, "independence search box");
  zd->add_option("--samples", samples, "commutation sample points");
  zd->add_option("--eps", eps, "hypothesis epsilon");

  auto* rp = app.add_subcommand("report", "replay a recorded run");
  rp->add_option("--manifest", manifest_path)->required();
  rp->add_option("--out-dir", report_out, "directory for the replay");
  rp->add_flag("--verify", verify, "byte-compare against the original");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sc->parsed()) return cmd_schedule(c, zd_rank);
  if (co->parsed()) return cmd_construct(c, bits, ac);
  if (ev->parsed()) return cmd_eval(c, bits, ac, x_str, points, inverse);
  if (rn->parsed()) return cmd_rotnum(c, bits, iters);
  if (ho->parsed()) return cmd_holder(c, bits_a, bits_b, stage);
  if (re->parsed()) return cmd_reduce(c, bits_a, bits_b);
  if (me->parsed()) return cmd_measure(c, bits, ac, bins);
  if (zd->parsed()) return cmd_zd(c, rank, bits, coeff_bound, samples, eps);
  if (rp->parsed()) return cmd_report(manifest_path, report_out, verify);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const CertificateFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 3;
  } catch (const abc::ScheduleError& e) {
    std::cerr << "schedule error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "schedule error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
