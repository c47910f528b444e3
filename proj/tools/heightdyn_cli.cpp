#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heightdyn/coefficients.hpp"
#include "heightdyn/documents.hpp"
#include "heightdyn/dynamics.hpp"
#include "heightdyn/height_machine.hpp"
#include "heightdyn/product_classifier.hpp"
#include "heightdyn/registry.hpp"

using namespace heightdyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

// An argument is inline JSON, "-" for stdin, or a file path.
Json load(const std::string& source) {
  std::string text;
  if (source == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else if (!source.empty() && (source.front() == '{' || source.front() == '[')) {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in) throw ParseError("", "cannot read " + source);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return parse_json(text);
}

unsigned worker_count() {
  if (const char* env = std::getenv("HEIGHTDYN_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<unsigned>(n);
  }
  return 1;
}

std::vector<double> weights_for(const std::string& source, std::size_t k) {
  if (source.empty()) return std::vector<double>(k, 1.0);
  return parse_divisor(load(source)).to_doubles();
}

struct Output {
  bool pretty = false;
  Json json;
  std::string summary;

  void emit() const {
    if (pretty)
      std::cout << summary << (summary.empty() || summary.back() == '\n' ? "" : "\n");
    else
      std::cout << json.dump(2) << "\n";
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

Json orbit_json(const OrbitRecord& rec) {
  Json points = Json::array();
  for (const auto& p : rec.points) points.push_back(to_json(p));
  Json status;
  if (const auto* p = std::get_if<Periodic>(&rec.status))
    status = {{"kind", "periodic"}, {"tail", p->tail}, {"period", p->period}};
  else if (const auto* e = std::get_if<Escaped>(&rec.status))
    status = {{"kind", "escaped"}, {"at", e->at}};
  else
    status = {{"kind", "truncated"}};
  return Json{{"points", std::move(points)}, {"heights", rec.heights}, {"status", std::move(status)}};
}

Json northcott_json(const NorthcottReport& rep) {
  Json buckets = Json::array();
  for (const auto& b : rep.buckets)
    buckets.push_back(
        {{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}, {"c1_max", b.c1_max}, {"c2_max", b.c2_max}});
  return Json{{"epsilon", rep.epsilon},         {"mu1", rep.mu1},
              {"mu2", rep.mu2},                 {"c1_emp", rep.c1_emp},
              {"c2_emp", rep.c2_emp},           {"c1_argmax", to_json(rep.c1_argmax)},
              {"c2_argmax", to_json(rep.c2_argmax)}, {"sample_size", rep.sample_size},
              {"height_bound", rep.height_bound}, {"bucket_width", rep.bucket_width},
              {"buckets", std::move(buckets)}};
}

double relative_change(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Height coefficients, orbits and dominant maps on products of projective spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Human-readable summary instead of JSON");

  // mu
  auto* mu_cmd = app.add_subcommand("mu", "μ₁ and μ₂ of a pullback at a divisor");
  std::string lattice_src, pullback_src, divisor_src;
  bool want_global = false, bisection_only = false;
  std::size_t samples = 10000;
  mu_cmd->add_option("--lattice", lattice_src, "Lattice document")->required();
  mu_cmd->add_option("--pullback", pullback_src, "Pullback document")->required();
  mu_cmd->add_option("--divisor", divisor_src, "Divisor document (defaults to the lattice witness)");
  mu_cmd->add_flag("--global", want_global, "Also search sup over ample D of μ₁");
  mu_cmd->add_option("--samples", samples, "Grid samples for --global");
  mu_cmd->add_flag("--bisection", bisection_only, "Skip closed forms");

  // heights
  auto* heights_cmd = app.add_subcommand("heights", "Weil heights of a point");
  std::string point_src, weights_src;
  heights_cmd->add_option("--point", point_src, "Point document")->required();
  heights_cmd->add_option("--divisor", weights_src, "Divisor coefficients (default all ones)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a morphism at a point");
  std::string morphism_src;
  eval_cmd->add_option("--morphism", morphism_src, "Morphism document")->required();
  eval_cmd->add_option("--point", point_src, "Point document");

  // orbit
  auto* orbit_cmd = app.add_subcommand("orbit", "Forward orbit of a point");
  std::size_t max_iter = 64;
  std::optional<double> ceiling;
  orbit_cmd->add_option("--morphism", morphism_src, "Morphism document")->required();
  orbit_cmd->add_option("--point", point_src, "Point document")->required();
  orbit_cmd->add_option("--max-iter", max_iter, "Iteration budget");
  orbit_cmd->add_option("--ceiling", ceiling, "Escape height (default log 10^6 per factor)");
  orbit_cmd->add_option("--divisor", weights_src, "Height weights");

  // preperiodic
  auto* pre_cmd = app.add_subcommand("preperiodic", "Search preperiodic points of bounded height");
  long bound = 50;
  double constant = 0.0;
  pre_cmd->add_option("--morphism", morphism_src, "Morphism document")->required();
  pre_cmd->add_option("--bound", bound, "Multiplicative height bound H");
  pre_cmd->add_option("--max-iter", max_iter, "Iteration budget per point");
  pre_cmd->add_option("--ceiling", ceiling, "Escape height (default 4·k·log H + C)");
  pre_cmd->add_option("--constant", constant, "Additive constant C for the default ceiling");

  // northcott
  auto* nc_cmd = app.add_subcommand("northcott", "Empirical constants of the two-sided height comparison");
  double mu1_arg = 0, mu2_arg = 0, epsilon = 0.5;
  std::optional<long> compare_bound;
  double tolerance = 0.1;
  nc_cmd->add_option("--morphism", morphism_src, "Morphism document")->required();
  nc_cmd->add_option("--divisor", weights_src, "Divisor coefficients (default all ones)");
  nc_cmd->add_option("--mu1", mu1_arg, "μ₁")->required();
  nc_cmd->add_option("--mu2", mu2_arg, "μ₂")->required();
  nc_cmd->add_option("--epsilon", epsilon, "ε > 0");
  nc_cmd->add_option("--bound", bound, "Multiplicative height bound H");
  nc_cmd->add_option("--compare-bound", compare_bound, "Second bound; exit 2 when constants move by ≥ tolerance");
  nc_cmd->add_option("--tolerance", tolerance, "Relative stability tolerance");

  // silverman
  auto* sil_cmd = app.add_subcommand("silverman", "Finite-sample estimate of liminf h(φP)/h(P)");
  double h_min = std::log(5.0);
  std::optional<double> expect;
  double expect_tol = 1e-12;
  sil_cmd->add_option("--morphism", morphism_src, "Morphism document")->required();
  sil_cmd->add_option("--divisor", weights_src, "Divisor coefficients (default all ones)");
  sil_cmd->add_option("--bound", bound, "Multiplicative height bound H");
  sil_cmd->add_option("--h-min", h_min, "Minimum height of sample points");
  sil_cmd->add_option("--expect", expect, "Expected value; exit 2 on mismatch");
  sil_cmd->add_option("--expect-tol", expect_tol, "Tolerance for --expect");

  // classify
  auto* cls_cmd = app.add_subcommand("classify", "Decompose a dominant endomorphism of a product of projective spaces");
  std::string matrix_src;
  std::vector<int> dims;
  cls_cmd->add_option("--morphism", morphism_src, "Morphism document");
  cls_cmd->add_option("--matrix", matrix_src, "Integer multidegree matrix");
  cls_cmd->add_option("--dims", dims, "Factor dimensions for --matrix")->delimiter(',');

  // verify-paper
  auto* verify_cmd = app.add_subcommand("verify-paper", "Run the example regression registry");
  bool verify_json = false;
  verify_cmd->add_flag("--json", verify_json, "Emit the full JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Output out;
  out.pretty = pretty;
  int status = kExitOk;
  try {
    if (*mu_cmd) {
      const auto lattice = parse_lattice(load(lattice_src));
      const auto map = parse_pullback(load(pullback_src));
      const auto divisor = divisor_src.empty() ? lattice.witness() : parse_divisor(load(divisor_src));
      const auto strategy = bisection_only ? Strategy::bisection_only : Strategy::prefer_exact;
      const auto m1 = mu1(map, divisor, lattice, strategy);
      const auto m2 = mu2(map, divisor, lattice, strategy);
      out.json["mu1"] = m1.exact ? to_json(m1.exact_value()) : Json(m1.as_double());
      out.json["mu2"] = m2.exact ? to_json(m2.exact_value()) : Json(m2.as_double());
      out.json["exact"] = m1.exact && m2.exact;
      out.json["method"] = m1.exact && m2.exact ? "closed_form" : "bisection";
      out.json["mu1_approx"] = m1.as_double();
      out.json["mu2_approx"] = m2.as_double();
      out.summary = "mu1 = " + m1.to_string() + " (" + fmt(m1.as_double()) + ")\nmu2 = " + m2.to_string() + " (" +
                    fmt(m2.as_double()) + ")\nmethod: " + out.json["method"].get<std::string>();
      if (want_global) {
        GlobalMuConfig cfg;
        cfg.grid_samples = samples;
        cfg.workers = worker_count();
        const auto g = global_mu(map, lattice, cfg);
        out.json["global"] = {{"value", g.value},
                              {"best_value", to_json(g.best_value)},
                              {"best_divisor", to_json(g.best_divisor)},
                              {"evaluations", g.evaluations},
                              {"certified_lower_bound", g.certified_lower_bound},
                              {"certified_upper_bound", g.certified_upper_bound}};
        out.summary += "\nglobal mu >= " + fmt(g.value) + " at D = " + to_json(g.best_divisor).dump();
      }
    } else if (*heights_cmd) {
      const auto p = parse_point(load(point_src));
      const auto w = weights_for(weights_src, p.size());
      Json factors = Json::array();
      for (const auto& f : p.factors()) factors.push_back(weil_height(f));
      const double h = height_wrt(w, p);
      out.json = {{"point", to_json(p)}, {"factor_heights", factors}, {"divisor", w}, {"height", h}};
      out.summary = "h_D" + p.to_string() + " = " + fmt(h);
    } else if (*eval_cmd) {
      const auto f = parse_morphism(load(morphism_src));
      out.json["multidegree"] = to_json(multidegree_matrix(f));
      out.summary = "multidegree " + multidegree_matrix(f).to_string();
      if (!point_src.empty()) {
        const auto p = parse_point(load(point_src));
        const auto image = evaluate(f, p);
        out.json["point"] = to_json(p);
        out.json["image"] = to_json(image);
        out.summary += "\n" + p.to_string() + " -> " + image.to_string();
      }
    } else if (*orbit_cmd) {
      const auto f = parse_morphism(load(morphism_src));
      const auto p = parse_point(load(point_src));
      const auto w = weights_for(weights_src, p.size());
      const double c = ceiling.value_or(static_cast<double>(p.size()) * std::log(1e6));
      const auto rec = orbit(f, p, max_iter, c, w);
      out.json = orbit_json(rec);
      out.json["ceiling"] = c;
      out.summary = "orbit of " + p.to_string() + ": " + out.json["status"].dump() + ", " +
                    std::to_string(rec.points.size()) + " points";
    } else if (*pre_cmd) {
      const auto f = parse_morphism(load(morphism_src));
      const double c = ceiling.value_or(default_escape_ceiling(f, bound, constant));
      const auto res = find_preperiodic(f, bound, max_iter, c);
      Json pre = Json::array(), und = Json::array();
      for (const auto& p : res.preperiodic) pre.push_back(to_json(p));
      for (const auto& p : res.undetermined) und.push_back(to_json(p));
      out.json = {{"bound", bound},       {"ceiling", c},           {"max_iter", max_iter},
                  {"examined", res.examined}, {"preperiodic", pre}, {"undetermined", und}};
      out.summary = std::to_string(res.preperiodic.size()) + " preperiodic, " +
                    std::to_string(res.undetermined.size()) + " undetermined of " + std::to_string(res.examined);
      for (const auto& p : res.preperiodic) out.summary += "\n  " + p.to_string();
    } else if (*nc_cmd) {
      const auto f = parse_morphism(load(morphism_src));
      const auto w = weights_for(weights_src, f.source_signature().size());
      const auto rep = verify_weak_northcott(f, w, mu1_arg, mu2_arg, epsilon, bound);
      out.json = northcott_json(rep);
      out.summary = "c1 = " + fmt(rep.c1_emp) + " at " + rep.c1_argmax.to_string() + "\nc2 = " + fmt(rep.c2_emp) +
                    " at " + rep.c2_argmax.to_string() + "\nsample " + std::to_string(rep.sample_size);
      if (!std::isfinite(rep.c1_emp) || !std::isfinite(rep.c2_emp)) status = kExitViolation;
      if (compare_bound) {
        const auto rep2 = verify_weak_northcott(f, w, mu1_arg, mu2_arg, epsilon, *compare_bound);
        const double d1 = relative_change(rep.c1_emp, rep2.c1_emp);
        const double d2 = relative_change(rep.c2_emp, rep2.c2_emp);
        const bool stable = d1 < tolerance && d2 < tolerance;
        out.json["comparison"] = {{"report", northcott_json(rep2)},
                                  {"c1_relative_change", d1},
                                  {"c2_relative_change", d2},
                                  {"tolerance", tolerance},
                                  {"stable", stable}};
        out.summary += std::string("\nH=") + std::to_string(*compare_bound) + ": c1 = " + fmt(rep2.c1_emp) +
                       ", c2 = " + fmt(rep2.c2_emp) + (stable ? " (stable)" : " (UNSTABLE)");
        if (!stable) status = kExitViolation;
      }
    } else if (*sil_cmd) {
      const auto f = parse_morphism(load(morphism_src));
      const auto w = weights_for(weights_src, f.source_signature().size());
      const double est = estimate_silverman_mu(f, w, bound, h_min);
      out.json = {{"estimate", est}, {"bound", bound}, {"h_min", h_min}};
      out.summary = "liminf estimate " + fmt(est);
      if (expect) {
        const bool ok = std::fabs(est - *expect) <= expect_tol;
        out.json["expected"] = *expect;
        out.json["matches"] = ok;
        if (!ok) status = kExitViolation;
      }
    } else if (*cls_cmd) {
      IntMatrix m;
      if (!morphism_src.empty()) {
        const auto f = parse_morphism(load(morphism_src));
        if (!f.is_endomorphism()) throw DomainError("classify needs an endomorphism");
        m = multidegree_matrix(f);
        dims = f.source_signature();
      } else if (!matrix_src.empty()) {
        m = parse_int_matrix(load(matrix_src));
        if (dims.empty()) dims.assign(m.rows(), 1);
      } else {
        throw ParseError("", "classify needs --morphism or --matrix");
      }
      try {
        const auto b = classify_dominant(m, dims);
        const auto lattice = PicardLattice::orthant(m.rows());
        const auto pc = power_coefficients(b, m, lattice.witness(), lattice);
        Json sigma = Json::array(), degrees = Json::array();
        for (std::size_t s : b.sigma) sigma.push_back(s + 1);
        for (const auto& d : b.degrees) degrees.push_back(d.get_si());
        Json order = Json::array();
        for (std::size_t s : b.order) order.push_back(s + 1);
        out.json = {{"dims", b.dims},
                    {"order", order},
                    {"blocks", b.blocks},
                    {"sigma", sigma},
                    {"degrees", degrees},
                    {"N", pc.power},
                    {"power_matrix", to_json(pc.matrix)},
                    {"mu1_pow", pc.mu1.get_si()},
                    {"mu2_pow", pc.mu2.get_si()}};
        out.summary = "sigma " + sigma.dump() + ", degrees " + degrees.dump() + ", N = " + std::to_string(pc.power) +
                      ", mu1(phi^N) = " + pc.mu1.get_str() + ", mu2(phi^N) = " + pc.mu2.get_str();
      } catch (const ClassificationError& e) {
        out.json = {{"rejected", true}, {"kind", to_string(e.kind())}, {"reason", e.what()}};
        out.summary = std::string("rejected (") + to_string(e.kind()) + "): " + e.what();
        status = kExitViolation;
      }
    } else if (*verify_cmd) {
      const auto rep = run_example_registry();
      out.json = to_json(rep);
      if (!verify_json && !pretty) out.pretty = true;
      for (const auto& o : rep.outcomes)
        out.summary += (o.passed ? "PASS " : "FAIL ") + o.name + ": mu1 = " + (o.mu1 ? o.mu1->to_string() : "-") +
                       ", mu2 = " + (o.mu2 ? o.mu2->to_string() : "-") + (o.error.empty() ? "" : "  " + o.error) +
                       "\n";
      out.summary += rep.all_passed ? "all cases passed" : "FAILURES";
      if (!rep.all_passed) status = kExitViolation;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out.emit();
  return status;
}
