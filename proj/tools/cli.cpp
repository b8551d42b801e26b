#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "run_dir.hpp"
#include "zf/checks.hpp"
#include "zf/errors.hpp"
#include "zf/models.hpp"
#include "zf/parallel.hpp"
#include "zf/primes.hpp"
#include "zf/stats.hpp"

namespace zf::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Globals {
  int threads = 1;
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
};

std::vector<double> default_betas() {
  std::vector<double> b;
  for (int i = 1; i <= 12; ++i) b.push_back(0.5 * i);
  return b;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream f(file, std::ios::trunc | std::ios::binary);
  if (!f) throw IoError("cannot write " + file.string());
  f << text;
  if (!f.flush()) throw IoError("cannot write " + file.string());
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::vector<std::string> lines;
  std::ifstream in(file);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw DomainError("--out is required for this command");
  return g.out;
}

// predict -------------------------------------------------------------------

struct PredictArgs {
  double theta = 0;
  std::vector<double> betas;
};

int cmd_predict(const Globals& g, const PredictArgs& a, std::ostream& out) {
  const ExponentPrediction p = predict(a.theta);
  const std::vector<double> betas = a.betas.empty() ? default_betas() : a.betas;
  if (g.json) {
    ojson j;
    j["theta"] = p.theta;
    j["m"] = p.m;
    j["beta_c"] = p.beta_c;
    j["r"] = p.r;
    j["f"] = ojson::array();
    for (double b : betas) j["f"].push_back({{"beta", b}, {"f", predict_f(a.theta, b)}});
    out << j.dump() << '\n';
    return kOk;
  }
  out << "theta " << num(p.theta) << "  m " << num(p.m) << "  beta_c " << num(p.beta_c) << "  r " << num(p.r)
      << '\n';
  out << "beta\tf\n";
  for (double b : betas) out << num(b) << '\t' << num(predict_f(a.theta, b)) << '\n';
  return kOk;
}

// sample --------------------------------------------------------------------

struct SampleArgs {
  double T = 1e7;
  double theta = 0;
  std::vector<double> betas{2.0};
  std::vector<double> levels{0.0, 0.5, 1.0};
  long n = 100;
};

int cmd_sample(const Globals& g, const SampleArgs& a, std::ostream& out) {
  if (a.n < 0) throw DomainError("--n must be nonnegative");
  if (!(a.T >= 1e3)) throw DomainError("--T must be at least 1e3");
  window_grid(a.T, a.theta);  // validates the window before anything is written
  ojson config;
  config["T"] = a.T;
  config["theta"] = a.theta;
  config["betas"] = a.betas;
  config["levels"] = a.levels;
  config["n"] = a.n;
  RunDir run(require_out(g), "sample", config, g.seed);
  std::uint64_t next = run.open("records.jsonl");
  const FieldEvaluator field = zeta_field();
  const std::uint64_t total = static_cast<std::uint64_t>(a.n);
  const std::uint64_t batch = 16;
  while (next < total) {
    const std::uint64_t end = std::min(total, next + batch);
    std::vector<std::vector<MomentRecord>> results(end - next);
    parallel_for(end - next, [&](std::size_t i) {
      results[i] = moment_records(field, sample_shift(a.T, a.n, g.seed, next + i), a.theta, a.betas, a.levels);
    });
    std::string text;
    for (const auto& recs : results) {
      for (const auto& r : recs) text += to_jsonl(r) + '\n';
    }
    run.commit(text, end);
    next = end;
  }

  std::vector<fs::path> extra;
  if (total > 0) {
    std::string csv = csv_header() + '\n';
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_beta;
    for (const auto& line : read_lines(run.dir() / "records.jsonl")) {
      const MomentRecord r = moment_record_from_json(line);
      csv += to_csv(r) + '\n';
      by_beta[r.beta].first.push_back(r.integral);
      by_beta[r.beta].second.push_back(r.maximum);
    }
    write_text(run.dir() / "records.csv", csv);
    std::string summary = "T,theta,beta,n,median_integral,median_maximum,predicted_f,predicted_m\n";
    for (const auto& [beta, v] : by_beta) {
      summary += num(a.T) + ',' + num(a.theta) + ',' + num(beta) + ',' + std::to_string(v.first.size()) + ',' +
                 num(median(v.first)) + ',' + num(median(v.second)) + ',' +
                 (beta > 0 ? num(predict_f(a.theta, beta)) : std::string("0")) + ',' + num(predict_m(a.theta)) +
                 '\n';
    }
    write_text(run.dir() / "summary.csv", summary);
    extra = {"records.csv", "summary.csv"};
  }
  run.finish(extra);
  out << "sample: " << a.n << " shifts written to " << run.dir().string() << '\n';
  return kOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string kind = "crem";
  double theta = 0;
  int levels = 20;
  int branching = 2;
  std::vector<double> betas = default_betas();
  long realizations = 10;
  double T = 1e8;
  double cutoff = 1e5;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  if (a.realizations < 0) throw DomainError("--realizations must be nonnegative");
  ojson config;
  config["kind"] = a.kind;
  config["theta"] = a.theta;
  config["betas"] = a.betas;
  config["realizations"] = a.realizations;
  const CremConfig crem{a.levels, a.branching, a.theta, g.seed};
  const EulerConfig euler{a.T, a.cutoff, a.theta, g.seed};
  PrimeTable table;
  if (a.kind == "crem") {
    config["n_levels"] = a.levels;
    config["b"] = a.branching;
    crem_realizations(crem, a.betas, 0, 0);  // validates the configuration and the leaf budget
  } else {
    config["T"] = a.T;
    config["cutoff"] = a.cutoff;
    predict_m(a.theta);
    window_grid(a.T, a.theta);
    if (!(a.cutoff >= 2 && a.cutoff <= 1e7)) throw DomainError("--cutoff must lie in [2, 1e7]");
  }
  RunDir run(require_out(g), "simulate", config, g.seed);
  std::uint64_t next = run.open("realizations.jsonl");
  if (a.kind != "crem") table = cached_primes(static_cast<std::uint64_t>(a.cutoff));
  const std::uint64_t total = static_cast<std::uint64_t>(a.realizations);
  const std::uint64_t batch = a.kind == "crem" ? 4 : 64;
  while (next < total) {
    const long count = static_cast<long>(std::min(batch, total - next));
    const std::vector<Realization> runs = a.kind == "crem" ? crem_realizations(crem, a.betas, next, count)
                                                           : euler_realizations(table, euler, a.betas, next, count);
    std::string text;
    for (long i = 0; i < count; ++i) {
      nlohmann::json j;
      j["realization"] = next + static_cast<std::uint64_t>(i);
      j["free_energy"] = runs[i].free_energy;
      j["max_normalized"] = runs[i].max_normalized;
      text += j.dump() + '\n';
    }
    next += static_cast<std::uint64_t>(count);
    run.commit(text, next);
  }

  std::vector<fs::path> extra;
  if (total > 0) {
    std::vector<Realization> runs;
    for (const auto& line : read_lines(run.dir() / "realizations.jsonl")) {
      const auto j = nlohmann::json::parse(line);
      runs.push_back({j.at("free_energy").get<std::vector<double>>(), j.at("max_normalized").get<double>()});
    }
    const std::vector<CremRecord> recs = aggregate(a.betas, runs);
    std::string jsonl, csv = "beta,free_energy,free_energy_se,predicted_f,max_normalized,max_normalized_se,predicted_m\n";
    for (const auto& r : recs) {
      jsonl += (a.kind == "crem" ? to_jsonl(crem, r) : to_jsonl(euler, r)) + '\n';
      csv += num(r.beta) + ',' + num(r.free_energy) + ',' + num(r.free_energy_se) + ',' +
             (r.beta > 0 ? num(predict_f(a.theta, r.beta)) : num(a.theta)) + ',' + num(r.max_normalized) + ',' +
             num(r.max_normalized_se) + ',' + num(predict_m(a.theta)) + '\n';
    }
    write_text(run.dir() / "records.jsonl", jsonl);
    write_text(run.dir() / "curve.csv", csv);
    extra = {"records.jsonl", "curve.csv"};
  }
  run.finish(extra);
  out << "simulate: " << a.realizations << " realizations written to " << run.dir().string() << '\n';
  return kOk;
}

// verify --------------------------------------------------------------------

int cmd_verify(const Globals& g, const std::string& suite, std::ostream& out) {
  const SuiteReport report = run_suite(suite, g.seed);
  if (!g.out.empty()) {
    ojson config;
    config["suite"] = suite;
    RunDir run(g.out, "verify", config, g.seed);
    run.open("verify_" + suite + ".json");
    run.commit(report.to_json() + '\n', 1);
    run.finish({});
  }
  if (g.json) {
    out << report.to_json() << '\n';
  } else {
    for (const auto& c : report.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << "  value " << num(c.value) << "  tolerance "
          << num(c.tolerance);
      if (!c.detail.empty()) out << "  (" << c.detail << ')';
      out << '\n';
    }
    out << "suite " << suite << (report.passed() ? " passed" : " failed") << '\n';
  }
  return report.passed() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for moments and maxima of zeta on short intervals", "zf"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; [command] sections set command options; flags override");
  Globals g;
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--json", g.json, "machine-readable output");

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "closed-form exponents m, beta_c, r and f")->fallthrough();
  predict_cmd->add_option("--theta", pa.theta, "interval exponent theta > -1")->required();
  predict_cmd->add_option("--beta", pa.betas, "moment exponent(s); default 0.5..6");

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "interval moments and maxima of zeta over random shifts")->fallthrough();
  sample_cmd->add_option("--T", sa.T, "height T (shifts in [T, 2T])");
  sample_cmd->add_option("--theta", sa.theta, "window |h| <= (ln T)^theta");
  sample_cmd->add_option("--betas", sa.betas, "moment exponents");
  sample_cmd->add_option("--levels", sa.levels, "high-point levels a");
  sample_cmd->add_option("--n", sa.n, "number of shifts (strata)");

  SimulateArgs ma;
  auto* simulate_cmd = app.add_subcommand("simulate", "free energy and maxima of the surrogate fields")->fallthrough();
  simulate_cmd->add_option("--kind", ma.kind, "crem or euler_product")->check(CLI::IsMember({"crem", "euler_product"}));
  simulate_cmd->add_option("--theta", ma.theta, "interval exponent theta > -1");
  simulate_cmd->add_option("--levels", ma.levels, "tree levels (crem)");
  simulate_cmd->add_option("--branching", ma.branching, "branching factor (crem)");
  simulate_cmd->add_option("--betas", ma.betas, "inverse temperatures");
  simulate_cmd->add_option("--realizations", ma.realizations, "number of realizations");
  simulate_cmd->add_option("--T", ma.T, "height T (euler_product)");
  simulate_cmd->add_option("--cutoff", ma.cutoff, "prime cutoff (euler_product)");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "run an invariant suite; exit 1 on any failing check")->fallthrough();
  verify_cmd->add_option("suite", suite, "pnt | moments | reconstruct | gabriel | phi | mollifier | covariance")
      ->required()
      ->check(CLI::IsMember(suite_names()));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "zf: " << e.what() << '\n';
    return kUsage;
  }

  try {
    thread_count() = g.threads;
    if (*predict_cmd) return cmd_predict(g, pa, out);
    if (*sample_cmd) return cmd_sample(g, sa, out);
    if (*simulate_cmd) return cmd_simulate(g, ma, out);
    return cmd_verify(g, suite, out);
  } catch (const DomainError& e) {
    err << "zf: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetError& e) {
    err << "zf: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "zf: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "zf: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "zf: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace zf::cli
