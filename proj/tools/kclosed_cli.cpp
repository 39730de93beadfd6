// kclosed: command-line front end for the K-functional / decomposition library.
//
//   kclosed kfunc --couple L1,Linf --t 0.5 [--in f.json]
//   kclosed decompose --couple H1,Hinf --t 0.5 --in f.json [--backend oracle|constructive]
//   kclosed factor sqrt|holder|outer|triangular --in f.json [--p --r --s]
//   kclosed suite <name> [--config c.json] [--out dir] [--seed n]
//   kclosed report --in f.json --couple H1,Hinf [--out dir]
//
// Exit codes: 0 success, 1 guard failure or numerical error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kclosed/kclosed.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kclosed;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "ExperimentConfig JSON file")->check(CLI::ExistingFile);
    app->add_option("--out", out_dir, "output directory for artifacts");
    app->add_option("--seed", seed, "override the configured seed");
  }

  harness::ExperimentConfig config() const {
    harness::ExperimentConfig c = config_path.empty() ? harness::ExperimentConfig{} : harness::load_config(config_path);
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }

  // Writes `j` to <out>/<name> when --out is given, otherwise to stdout.
  void emit(const json& j, const std::string& name) const {
    if (out_dir.empty()) {
      std::cout << j.dump(2) << '\n';
      return;
    }
    fs::create_directories(out_dir);
    std::ofstream os(fs::path(out_dir) / name);
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("failed to write " + (fs::path(out_dir) / name).string());
  }
};

using Element = std::variant<CircleFunction, MatrixOperator>;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("invalid JSON in " + path + ": " + e.what());
  }
}

// {"n","re":[...],"im":[...]} is a grid function; nested "re" arrays a matrix.
Element read_element(const std::string& path) {
  const json j = read_json(path);
  try {
    if (j.at("re").is_array() && !j.at("re").empty() && j.at("re").front().is_array()) return matrix_from_json(j);
    return j.get<CircleFunction>();
  } catch (const json::exception& e) {
    throw UsageError("malformed element in " + path + ": " + e.what());
  }
}

// "L1,Linf" -> (kind, p0, p1). Prefix: L lebesgue, H hardy, C schatten,
// T triangular, l sequence.
CoupleId parse_couple(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 >= s.size())
    throw UsageError("couple must look like L1,Linf");
  const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
  if (a[0] != b[0]) throw UsageError("both halves of a couple must use the same space letter");
  CoupleKind kind;
  switch (a[0]) {
    case 'L': kind = CoupleKind::lebesgue; break;
    case 'H': kind = CoupleKind::hardy; break;
    case 'C': kind = CoupleKind::schatten; break;
    case 'T': kind = CoupleKind::triangular; break;
    case 'l': kind = CoupleKind::sequence; break;
    default: throw UsageError("unknown space letter in couple: " + a);
  }
  try {
    return {kind, parse_exponent(a.substr(1)), parse_exponent(b.substr(1))};
  } catch (const std::exception&) {
    throw UsageError("invalid exponent in couple: " + s);
  }
}

json decomposition_json(const auto& d, const auto& x) {
  return {{"couple", d.couple.name()},
          {"t", d.t},
          {"norm0", d.norm0},
          {"norm1", d.norm1},
          {"cost", d.cost},
          {"solver_gap", d.solver_gap},
          {"reconstruction_error", d.reconstruction_error(x)},
          {"membership_residual", d.membership_residual}};
}

int cmd_kfunc(const Common& common, const std::string& couple_s, double t, const std::string& in, bool brute) {
  const CoupleId couple = parse_couple(couple_s);
  const Element x = in.empty() ? Element(CircleFunction::constant(16, 1.0)) : read_element(in);
  const auto opt = common.config().solver();
  double value = 0.0, lower = 0.0;
  if (const auto* f = std::get_if<CircleFunction>(&x)) {
    if (!ElementTraits<CircleFunction>::accepts(couple.kind)) throw UsageError("couple does not apply to a grid function");
    if (couple.kind == CoupleKind::lebesgue && couple.is_l1_linf() && !brute) {
      value = lower = kt_L1_Linf(*f, t);
    } else {
      const auto r = kt_bruteforce(*f, couple, t, opt);
      value = r.value;
      lower = r.lower_bound;
    }
  } else {
    const auto& m = std::get<MatrixOperator>(x);
    if (!ElementTraits<MatrixOperator>::accepts(couple.kind)) throw UsageError("couple does not apply to a matrix");
    if (couple.kind == CoupleKind::schatten && !brute) {
      value = lower = kt_schatten(m, couple.p0, couple.p1, t, opt);
    } else {
      const auto r = kt_bruteforce(m, couple, t, opt);
      value = r.value;
      lower = r.lower_bound;
    }
  }
  if (common.out_dir.empty()) {
    std::printf("%.12g\n", value);
  } else {
    common.emit({{"couple", couple.name()}, {"t", t}, {"value", value}, {"lower_bound", lower}}, "kfunc.json");
  }
  return 0;
}

int cmd_decompose(const Common& common, const std::string& couple_s, double t, const std::string& in,
                  const std::string& backend) {
  if (in.empty()) throw UsageError("decompose requires --in");
  const CoupleId couple = parse_couple(couple_s);
  const Element x = read_element(in);
  const auto cfg = common.config();
  json out;
  if (couple.kind == CoupleKind::hardy) {
    const auto& f = std::get_if<CircleFunction>(&x) ? std::get<CircleFunction>(x)
                                                    : throw UsageError("hardy couples need a grid function");
    if (couple.p0 != 1.0) throw UsageError("supported hardy couples: H1,Hinf and H1,Hq");
    CoupleDecomposition<CircleFunction> d;
    if (std::isinf(couple.p1)) {
      if (backend != "oracle" && backend != "constructive") throw UsageError("backend must be oracle or constructive");
      d = decompose_h1_hinf(f, t, backend == "oracle" ? JonesBackend::oracle : JonesBackend::constructive, cfg.solver());
    } else {
      const auto s = decompose_h1_hq(f, couple.p1, t);
      d = s.decomposition;
      out["holder"] = {{"lhs", s.holder_lhs}, {"rhs", s.holder_rhs}};
      out["squaring_residual"] = s.squaring_residual;
      out["tol_factor"] = s.tol_factor;
    }
    const double amb = kt_ambient(f, couple, t, cfg.solver());
    out.update(decomposition_json(d, f));
    out["ambient_K"] = amb;
    out["ratio"] = amb > 0.0 ? d.cost / amb : 1.0;
    out["x0"] = d.x0;
    out["x1"] = d.x1;
  } else if (couple.kind == CoupleKind::triangular) {
    const auto& m = std::get_if<MatrixOperator>(&x) ? std::get<MatrixOperator>(x)
                                                    : throw UsageError("triangular couples need a matrix");
    if (couple.p0 != 1.0 || std::isinf(couple.p1)) throw UsageError("supported triangular couple: T1,Tq with q finite");
    const auto s = decompose_t1_tq(m, couple.p1, t, cfg.eps_reg);
    const double amb = kt_schatten(m, 1.0, couple.p1, t, cfg.solver());
    out = decomposition_json(s.decomposition, m);
    out["ambient_K"] = amb;
    out["ratio"] = amb > 0.0 ? s.decomposition.cost / amb : 1.0;
    out["expansion_residual"] = s.expansion_residual;
    out["eps_used"] = s.eps_used;
    out["x0"] = matrix_to_json(s.decomposition.x0);
    out["x1"] = matrix_to_json(s.decomposition.x1);
  } else {
    throw UsageError("decompose supports hardy (H...) and triangular (T...) couples");
  }
  common.emit(out, "decomposition.json");
  return 0;
}

int cmd_factor(const Common& common, const std::string& kind, const std::string& in, double p, double r, double s) {
  if (in.empty()) throw UsageError("factor requires --in");
  const Element x = read_element(in);
  json out;
  if (kind == "triangular") {
    const auto* m = std::get_if<MatrixOperator>(&x);
    if (!m) throw UsageError("factor triangular needs a matrix");
    const auto f = triangular_factor(*m, p, r, s);
    out = {{"a", matrix_to_json(f.a)},
           {"b", matrix_to_json(f.b)},
           {"branch", f.branch},
           {"product_residual", f.product_residual},
           {"norm_residual", f.norm_residual}};
    common.emit(out, "factor.json");
    return 0;
  }
  const auto* f = std::get_if<CircleFunction>(&x);
  if (!f) throw UsageError("factor " + kind + " needs a grid function");
  if (kind == "sqrt") {
    const auto sf = sqrt_factor(*f);
    json zeros = json::array();
    for (const auto& a : sf.inner.zeros) zeros.push_back({a.real(), a.imag()});
    out = {{"inner", {{"zeros", zeros}, {"rotation", {sf.inner.rotation.real(), sf.inner.rotation.imag()}}}},
           {"B", blaschke_eval(sf.inner, f->size())},
           {"F", sf.outer.boundary},
           {"tol_factor", sf.tol_factor},
           {"boundary_roots", sf.boundary_roots}};
  } else if (kind == "holder") {
    const auto hf = holder_factor(*f, p, r, s);
    out = {{"g", hf.g}, {"h", hf.h}, {"tol_factor", hf.tol_factor}};
  } else if (kind == "outer") {
    const auto o = outer_function(*f);
    out = {{"O", o.boundary}, {"log_O", o.log_boundary}, {"value_at_zero", o.value_at_zero()}};
  } else {
    throw UsageError("factor kind must be sqrt, holder, outer or triangular");
  }
  common.emit(out, "factor.json");
  return 0;
}

int cmd_suite(const Common& common, const std::string& name, std::optional<int> instances) {
  auto cfg = common.config();
  if (instances) cfg.instances = *instances;
  cfg.validate();
  const auto& names = harness::suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) throw UsageError("unknown suite: " + name);
  const auto res = harness::run_suite(name, cfg);
  const fs::path dir = common.out_dir.empty() ? fs::path("results") : fs::path(common.out_dir);
  harness::write_suite(res, dir);
  double cmax = 0.0;
  for (double c : res.c_estimates) cmax = std::max(cmax, c);
  std::printf("%s: %s (%zu instances, max ratio %.6g) -> %s\n", name.c_str(), res.passed ? "PASS" : "FAIL",
              res.c_estimates.size(), cmax, dir.string().c_str());
  for (const auto& f : res.failures)
    std::fprintf(stderr, "  %s: %s\n", f["instance_id"].get<std::string>().c_str(), f["violations"].dump().c_str());
  return res.passed ? 0 : 1;
}

int cmd_report(const Common& common, const std::string& couple_s, const std::string& in, const std::string& backend) {
  if (in.empty()) throw UsageError("report requires --in");
  const CoupleId couple = parse_couple(couple_s);
  const auto cfg = common.config();
  const Element x = read_element(in);
  const std::string id = fs::path(in).stem().string();
  KReport rep;
  if (couple.kind == CoupleKind::hardy && couple.p0 == 1.0) {
    const auto* f = std::get_if<CircleFunction>(&x);
    if (!f) throw UsageError("hardy couples need a grid function");
    const JonesBackend jb = backend == "constructive" ? JonesBackend::constructive : JonesBackend::oracle;
    const double q = couple.p1;
    rep = k_closedness_report(
        *f, couple,
        [&](const CircleFunction& g, double t) {
          return std::isinf(q) ? decompose_h1_hinf(g, t, jb, cfg.solver()) : decompose_h1_hq(g, q, t).decomposition;
        },
        cfg.t_grid(), id, cfg.solver());
  } else if (couple.kind == CoupleKind::triangular && couple.p0 == 1.0 && std::isfinite(couple.p1)) {
    const auto* m = std::get_if<MatrixOperator>(&x);
    if (!m) throw UsageError("triangular couples need a matrix");
    rep = k_closedness_report(
        *m, couple, [&](const MatrixOperator& y, double t) { return decompose_t1_tq(y, couple.p1, t, cfg.eps_reg).decomposition; },
        cfg.t_grid(), id, cfg.solver());
  } else {
    throw UsageError("report supports H1,Hinf, H1,Hq and T1,Tq");
  }
  json j = rep.to_json();
  j["schema"] = 1;
  if (common.out_dir.empty()) {
    rep.write_csv(std::cout);
    return 0;
  }
  fs::create_directories(common.out_dir);
  std::ofstream csv(fs::path(common.out_dir) / (id + ".csv"));
  rep.write_csv(csv);
  common.emit(j, id + ".json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-functionals, Hardy/triangular decompositions and K-closedness experiments"};
  app.require_subcommand(1);

  Common common;
  std::string couple = "L1,Linf", in, backend = "oracle", kind, suite_name;
  double t = 1.0, p = 1.0, r = 2.0, s = 2.0;
  bool brute = false;
  std::optional<int> instances;

  auto* kfunc = app.add_subcommand("kfunc", "evaluate K_t of an element");
  kfunc->add_option("--couple", couple, "couple, e.g. L1,Linf  H1,H2  C1,Cinf");
  kfunc->add_option("--t", t, "K-functional parameter")->check(CLI::PositiveNumber);
  kfunc->add_option("--in", in, "element JSON (default: f = 1 on 16 points)");
  kfunc->add_flag("--bruteforce", brute, "use the convex solver even when a closed form exists");
  common.attach(kfunc);

  auto* decompose = app.add_subcommand("decompose", "split an element for a subspace couple");
  decompose->add_option("--couple", couple, "H1,Hinf  H1,Hq  T1,Tq")->required();
  decompose->add_option("--t", t, "K-functional parameter")->check(CLI::PositiveNumber);
  decompose->add_option("--in", in, "element JSON")->required();
  decompose->add_option("--backend", backend, "oracle | constructive (H1,Hinf only)");
  common.attach(decompose);

  auto* factor = app.add_subcommand("factor", "inner-outer, Hoelder and triangular factorizations");
  factor->add_option("kind", kind, "sqrt | holder | outer | triangular")->required();
  factor->add_option("--in", in, "element JSON")->required();
  factor->add_option("--p", p, "target exponent p");
  factor->add_option("--r", r, "first factor exponent r");
  factor->add_option("--s,--q", s, "second factor exponent");
  common.attach(factor);

  auto* suite = app.add_subcommand("suite", "run an experiment suite");
  suite->add_option("name", suite_name, "suite name")->required();
  suite->add_option("--instances", instances, "override the instance count");
  common.attach(suite);

  auto* report = app.add_subcommand("report", "K-closedness report for one element over the t-grid");
  report->add_option("--couple", couple, "H1,Hinf  H1,Hq  T1,Tq")->required();
  report->add_option("--in", in, "element JSON")->required();
  report->add_option("--backend", backend, "oracle | constructive (H1,Hinf only)");
  common.attach(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*kfunc) return cmd_kfunc(common, couple, t, in, brute);
    if (*decompose) return cmd_decompose(common, couple, t, in, backend);
    if (*factor) return cmd_factor(common, kind, in, p, r, s);
    if (*suite) return cmd_suite(common, suite_name, instances);
    if (*report) return cmd_report(common, couple, in, backend);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
