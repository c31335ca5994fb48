#include "sos_cli/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sos/dict_learn.hpp"
#include "sos/hyper.hpp"
#include "sos/rng.hpp"
#include "sos/sparse_vec.hpp"
#include "sos_cli/json_io.hpp"

#ifndef SOS_TOOLKIT_VERSION
#define SOS_TOOLKIT_VERSION "unknown"
#endif

namespace sos::cli {

namespace {

struct Global {
  std::optional<int> degree;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> max_iter;
  int jobs = 1;
  std::string output;
};

SosOptions sos_options(const Global& g) {
  SosOptions o;
  if (g.tol) {
    if (!(*g.tol > 0.0)) throw InvalidArgument("--tol must be positive");
    o.sdp.eq_tol = *g.tol;
    o.sdp.opt_tol = *g.tol;
  }
  if (g.max_iter) {
    if (*g.max_iter < 1) throw InvalidArgument("--max-iter must be positive");
    o.sdp.max_iters = *g.max_iter;
  }
  return o;
}

std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", {{"kind", kind}, {"message", message}}}};
}

// Trial i runs body(i) on one of `jobs` threads; results keep trial order,
// so output does not depend on scheduling. Domain errors become per-trial
// error objects.
std::vector<Json> run_trials(int count, int jobs, const std::function<Json(int)>& body) {
  std::vector<Json> results(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> internal(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        results[i] = body(i);
      } catch (const Error& e) {
        results[i] = error_json(e.kind(), e.what());
      } catch (...) {
        internal[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(count, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : internal) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

// Trials all failed: surface the first error as the command's outcome.
void require_some_success(const std::vector<Json>& trials) {
  for (const auto& t : trials) {
    if (!t.contains("error")) return;
  }
  const Json& e = trials.front()["error"];
  throw Error(e["kind"].get<std::string>(), e["message"].get<std::string>());
}

const char* mode_name(ExpansionMode m) { return m == ExpansionMode::exact ? "exact" : "relaxed"; }

int default_degree(const PolynomialSystem& sys) {
  int d = std::max({2, sys.objective.degree(), sys.max_constraint_degree()});
  return d + (d % 2);
}

Json estimate_json(const EstimateReport& r) {
  return Json{{"estimate", r.estimate},
              {"status", to_string(r.status)},
              {"iterations", r.iterations},
              {"primal_residual", r.primal_residual},
              {"gap", r.gap},
              {"matrix_dim", r.matrix_dim},
              {"num_constraints", r.num_constraints},
              {"ball_added", r.ball_added},
              {"pseudoexpectation", to_json(r.witness)}};
}

struct Command {
  std::string name;
  Json inputs = Json::object();
  std::function<Json()> body;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum-of-squares toolkit: certificates, relaxations and their applications", "sos"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with option values");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Global g;
  app.add_option("--degree", g.degree, "Relaxation degree (even)");
  app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
  app.add_option("--tol", g.tol, "SDP feasibility and optimality tolerance");
  app.add_option("--max-iter", g.max_iter, "SDP iteration cap");
  app.add_option("--jobs", g.jobs, "Threads for independent trials")->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "Report path (default stdout)");

  Command cmd;

  std::string system_path;
  auto* est = app.add_subcommand("estimate", "Degree-l SOS estimate of min P0 over a system");
  est->add_option("--system", system_path, "System JSON")->required();
  est->callback([&] {
    cmd.name = "estimate";
    cmd.inputs["system"] = system_path;
    cmd.body = [&] {
      PolynomialSystem sys = read_system(system_path);
      const int degree = g.degree.value_or(default_degree(sys));
      cmd.inputs["degree"] = degree;
      return estimate_json(sos_estimate(sys, degree, sos_options(g)));
    };
  });

  auto* ref = app.add_subcommand("refute", "Certificate or pseudoexpectation, whichever exists");
  ref->add_option("--system", system_path, "System JSON (equalities only)")->required();
  ref->callback([&] {
    cmd.name = "refute";
    cmd.inputs["system"] = system_path;
    cmd.body = [&] {
      PolynomialSystem sys = read_system(system_path);
      const int degree = g.degree.value_or(default_degree(sys));
      cmd.inputs["degree"] = degree;
      DualityOutcome d = resolve_duality(sys, degree, sos_options(g));
      Json r;
      if (d.certificate) {
        r["outcome"] = "refuted";
        r["certificate"] = to_json(*d.certificate);
        r["verification"] = to_json(d.certificate_report);
      } else {
        r["outcome"] = "pseudoexpectation";
        r["pseudoexpectation"] = to_json(*d.pseudoexpectation);
        r["verification"] = Json{{"passed", d.satisfaction_report.passed},
                                 {"max_residual", d.satisfaction_report.max_residual}};
      }
      return r;
    };
  });

  std::string graph_path, mode = "relaxed";
  std::optional<int> k;
  auto* exp = app.add_subcommand("expansion", "Expansion: brute force, spectral, SOS, rounding");
  exp->add_option("--graph", graph_path, "Graph file")->required();
  exp->add_option("--mode", mode, "relaxed or exact")
      ->check(CLI::IsMember({"relaxed", "exact"}))
      ->capture_default_str();
  exp->add_option("--k", k, "Set size (exact mode)");
  exp->callback([&] {
    cmd.name = "expansion";
    cmd.inputs = {{"graph", graph_path}, {"mode", mode}, {"seed", g.seed}};
    if (k) cmd.inputs["k"] = *k;
    cmd.body = [&] {
      Graph graph = read_graph(graph_path);
      const ExpansionMode m = mode == "exact" ? ExpansionMode::exact : ExpansionMode::relaxed;
      SosOptions opts = sos_options(g);
      if (g.degree && *g.degree != 2) throw DegreeError("expansion uses the degree-2 relaxation");
      RoundingOptions ro;
      ro.seed = g.seed;
      ExpansionReport rep = analyze_expansion(graph, m, k, ro, opts);
      Json r{{"num_vertices", graph.num_vertices()},
             {"degree", graph.degree()},
             {"mode", mode_name(rep.mode)},
             {"k", rep.k},
             {"phi_sos2", rep.phi_sos2},
             {"spectral",
              {{"lambda2", rep.spectral.lambda2},
               {"lower", rep.spectral.lower},
               {"upper", rep.spectral.upper}}},
             {"rounded_set", rep.rounded_set},
             {"phi_of_rounded", rep.phi_of_rounded},
             {"sdp_iterations", rep.sdp_iterations}};
      r["phi_true"] = rep.phi_true ? Json(*rep.phi_true) : Json(nullptr);
      r["phi_true_set"] = rep.phi_true_set;
      return r;
    };
  });

  int sv_n = 20, sv_d = 2, sv_support = 2, trials = 1;
  bool certify = false;
  auto* sv = app.add_subcommand("sparse-recover", "Planted sparse vector recovery");
  sv->add_option("--n", sv_n, "Ambient dimension")->capture_default_str();
  sv->add_option("--d", sv_d, "Dimension of the random part")->capture_default_str();
  sv->add_option("--support", sv_support, "Support size of the planted vector")->capture_default_str();
  sv->add_option("--trials", trials, "Independent instances, seeds seed..seed+trials-1")
      ->check(CLI::PositiveNumber);
  sv->add_flag("--certify", certify, "Also certify the 4-norm of the random part");
  sv->callback([&] {
    cmd.name = "sparse-recover";
    cmd.inputs = {{"n", sv_n}, {"d", sv_d}, {"support", sv_support}, {"seed", g.seed},
                  {"trials", trials}, {"certify", certify}};
    cmd.body = [&] {
      SosOptions opts = sos_options(g);
      RecoveryOptions ro;
      ro.sos = opts;
      if (g.degree) ro.degree = *g.degree;
      auto trial = [&](int i) {
        const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(i);
        SparseInstance inst = generate_instance(sv_n, sv_d, sv_support, seed);
        RecoveryOptions o = ro;
        o.seed = seed;
        RecoveryReport rep = recover(inst, o);
        Json t{{"seed", seed},
               {"mu0", inst.mu0},
               {"correlation", rep.correlation},
               {"objective", rep.objective},
               {"threshold", rep.threshold},
               {"pe_alpha0_sq", rep.pe_alpha0_sq},
               {"recovered_4norm", rep.recovered_4norm},
               {"sdp_iterations", rep.sdp_iterations},
               {"recovered", to_json(rep.recovered)},
               {"planted", to_json(inst.planted)}};
        if (certify) {
          FourNormCertificate c = certify_subspace_4norm(inst.complement, opts);
          t["certificate"] = {{"rho", c.rho},
                              {"mu_prime", c.mu_prime},
                              {"verification", to_json(c.evidence.report)}};
        }
        return t;
      };
      std::vector<Json> results = run_trials(trials, g.jobs, trial);
      require_some_success(results);
      return Json{{"trials", results}};
    };
  });

  int dl_n = 8;
  std::optional<int> dl_m;
  double rho = 0.2;
  int samples = 10000;
  std::string input_path;
  auto* dl = app.add_subcommand("dict-learn", "Dictionary learning from nice-distribution samples");
  dl->add_option("--n", dl_n, "Dimension")->capture_default_str();
  dl->add_option("--m", dl_m, "Number of columns (default n)");
  dl->add_option("--rho", rho, "Sparsity of the coefficient distribution")->capture_default_str();
  dl->add_option("--samples", samples, "Generated sample count")->capture_default_str();
  dl->add_option("--input", input_path, "CSV of observation rows instead of generated samples");
  dl->add_option("--trials", trials, "Independent runs, seeds seed..seed+trials-1")
      ->check(CLI::PositiveNumber);
  dl->callback([&] {
    cmd.name = "dict-learn";
    cmd.inputs = {{"n", dl_n}, {"rho", rho}, {"samples", samples}, {"seed", g.seed},
                  {"trials", trials}};
    if (dl_m) cmd.inputs["m"] = *dl_m;
    if (!input_path.empty()) cmd.inputs["input"] = input_path;
    cmd.body = [&] {
      NiceDistSpec spec;
      spec.rho = rho;
      if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("--rho must lie in (0, 1]");
      LearnOptions lo;
      lo.column.sos = sos_options(g);
      if (g.degree) lo.column.degree = *g.degree;
      std::optional<Eigen::MatrixXd> given;
      if (!input_path.empty()) given = read_csv(input_path);
      auto trial = [&](int i) {
        const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(i);
        CounterRng root(seed);
        Eigen::MatrixXd y;
        std::optional<Dictionary> truth;
        int n = dl_n;
        if (given) {
          y = *given;
          n = static_cast<int>(y.cols());
        } else {
          if (dl_m && *dl_m != dl_n) {
            throw InvalidArgument("generated dictionaries are orthogonal (m = n); use --input");
          }
          if (samples < 1) throw InvalidArgument("--samples must be positive");
          truth = Dictionary::random_orthogonal(dl_n, root.split(0)());
          y = sample_observations(*truth, spec, samples, root.split(1)());
        }
        const double kappa = static_cast<double>(dl_m.value_or(n)) / n;
        LearnReport rep = learn_dictionary(y, spec, kappa, root.split(2)(), lo,
                                           truth ? &*truth : nullptr);
        Json diag = Json::array();
        for (const auto& c : rep.diagnostics) {
          diag.push_back({{"objective", c.objective},
                          {"isolation", c.isolation},
                          {"p_value", c.p_value},
                          {"retries_used", c.retries_used},
                          {"sdp_iterations", c.sdp_iterations}});
        }
        Json t{{"seed", seed},
               {"columns", to_json(rep.columns)},
               {"diagnostics", diag},
               {"hausdorff", rep.hausdorff ? Json(*rep.hausdorff) : Json(nullptr)},
               {"stalled", rep.stalled},
               {"stall_reason", rep.stall_reason}};
        if (truth) t["dictionary"] = to_json(truth->columns());
        return t;
      };
      std::vector<Json> results = run_trials(trials, g.jobs, trial);
      require_some_success(results);
      return Json{{"trials", results}};
    };
  });

  int t = 2, hk = 1, hyper_samples = 100000;
  auto* hc = app.add_subcommand("hyper-certify", "Certify E x^4 <= B (E x^2)^2 on W_k");
  hc->add_option("--t", t, "Cube dimension")->capture_default_str();
  hc->add_option("--k", hk, "Degree")->capture_default_str();
  hc->add_option("--samples", hyper_samples, "Random coefficient vectors for the lower bound")
      ->capture_default_str();
  hc->callback([&] {
    cmd.name = "hyper-certify";
    cmd.inputs = {{"t", t}, {"k", hk}, {"samples", hyper_samples}, {"seed", g.seed}};
    cmd.body = [&] {
      if (g.degree && *g.degree != 4) throw DegreeError("hypercontractivity uses degree 4");
      WkSubspace w = build_Wk(t, hk);
      HyperBound h = certify_hypercontractivity(w.subspace, sos_options(g));
      return Json{{"dimension", w.subspace.dim()},
                  {"ambient_dim", w.subspace.ambient_dim()},
                  {"bound", h.bound},
                  {"reference_bound", std::pow(9.0, hk)},
                  {"empirical_max", empirical_max_ratio(w.subspace, hyper_samples, g.seed)},
                  {"verification", to_json(h.evidence.report)}};
    };
  });

  std::string basis_path;
  int p = 2;
  auto* dw = app.add_subcommand("dim-witness", "Sparse vector forced by a subspace's dimension");
  dw->add_option("--basis", basis_path, "CSV, one spanning vector per row")->required();
  dw->add_option("--p", p, "Norm exponent")->capture_default_str();
  dw->callback([&] {
    cmd.name = "dim-witness";
    cmd.inputs = {{"basis", basis_path}, {"p", p}};
    cmd.body = [&] {
      Subspace sub = Subspace::span(read_csv(basis_path).transpose());
      DimWitness w = dim_bound_witness(sub, p);
      // delta^{1-p} = d^p / n, so the witness bound is the sparsity condition.
      const double delta = std::pow(static_cast<double>(sub.ambient_dim()) /
                                        std::pow(static_cast<double>(sub.dim()), p),
                                    1.0 / (p - 1));
      Json r{{"ambient_dim", sub.ambient_dim()},
             {"dimension", sub.dim()},
             {"coordinate", w.coordinate},
             {"ratio", w.ratio},
             {"bound", w.bound},
             {"witness", to_json(w.x)},
             {"delta", delta}};
      r["sparse"] = delta <= 1.0 ? Json(is_delta_p_sparse(w.x, SparsityQuery{delta, p})) : Json(nullptr);
      return r;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    out << error_json("usage", e.what()).dump(2) << "\n";
    err << "sos: " << e.what() << "\n";
    return kExitDomain;
  }

  try {
    Json report{{"tool", "sos"},
                {"version", SOS_TOOLKIT_VERSION},
                {"command", cmd.name}};
    Json results = cmd.body();
    report["inputs"] = cmd.inputs;
    report["seed"] = g.seed;
    report["results"] = std::move(results);
    report["timestamp"] = timestamp();
    const std::string text = report.dump(2) + "\n";
    if (g.output.empty()) {
      out << text;
    } else {
      std::ofstream f(g.output, std::ios::binary);
      if (!f || !(f << text)) throw InputError(g.output + ": cannot write report");
    }
    return kExitOk;
  } catch (const Error& e) {
    out << error_json(e.kind(), e.what()).dump(2) << "\n";
    err << "sos: " << e.kind() << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    out << error_json("internal", e.what()).dump(2) << "\n";
    err << "sos: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace sos::cli
