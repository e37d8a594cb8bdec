// Command-line front end: estimation on user data, exact-theory curve
// dumps, pilot-free bandwidth selection, and the Monte Carlo harness.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfcv/bandwidth.hpp"
#include "dfcv/competitors.hpp"
#include "dfcv/cv_core.hpp"
#include "dfcv/extensions.hpp"
#include "dfcv/harness.hpp"
#include "dfcv/math.hpp"
#include "dfcv/mixtures.hpp"
#include "dfcv/oracle.hpp"

namespace {

using dfcv::Sample;
using nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

// One column of reals, one value per line; "-" reads stdin.
std::vector<double> read_column(const std::string& path) {
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path);
  }
  std::istream& in = path == "-" ? std::cin : file;

  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(line, &used));
      while (used < line.size() &&
             (line[used] == ' ' || line[used] == '\t' || line[used] == '\r'))
        ++used;
      if (used != line.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": not a number: '" + line + "'");
    }
  }
  if (out.empty()) throw std::runtime_error(path + ": no data");
  return out;
}

int cmd_estimate(const std::string& input, const std::string& method,
                 bool verbose) {
  const std::vector<double> data = read_column(input);
  ordered_json j{{"method", method}};

  if (method == "ct") {
    const auto r = dfcv::psi_hat(Sample(data));
    j["estimate"] = r.estimate;
    j["g_cv"] = r.g_cv;
  } else if (method == "entropy") {
    const auto r = dfcv::entropy_hat(Sample(data));
    j["estimate"] = r.estimate;
    j["g_lcv"] = r.g_lcv;
  } else if (method == "circular") {
    for (double v : data) {
      if (!(v >= 0.0 && v < dfcv::kTwoPi))
        throw std::runtime_error("circular input must lie in [0, 2pi): got " +
                                 fmt(v));
    }
    const auto r = dfcv::circular_psi_hat(dfcv::CircularSample(data));
    j["estimate"] = r.estimate;
    j["nu_cv"] = r.nu_cv;
  } else if (method == "theta1" || method == "theta2") {
    const auto r = dfcv::theta_r_hat(Sample(data), method == "theta1" ? 1 : 2);
    j["estimate"] = r.estimate;
    j["g_cv"] = r.g_cv;
  } else {  // js | shd; anything else was rejected by the flag check
    const auto r = method == "js" ? dfcv::psi_js(Sample(data))
                                  : dfcv::psi_shd(Sample(data));
    j["estimate"] = r.estimate;
    j["g"] = r.trace.g2;
    if (verbose) {
      j["trace"] = {{"sigma_hat", r.trace.sigma_hat},
                    {"psi4_ns", r.trace.psi4_ns},
                    {"g1", r.trace.g1},
                    {"psi2_hat", r.trace.psi2_hat},
                    {"g2", r.trace.g2},
                    {"psi2_fallback", r.trace.psi2_fallback},
                    {"solve_fallback", r.trace.solve_fallback}};
    }
  }
  j["n"] = data.size();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_curves(const std::string& kind, int density, int n,
               std::uint64_t seed) {
  const dfcv::NormalMixture& f = dfcv::catalog(density);

  if (kind == "mse") {
    const auto rep = dfcv::exact_error_report(f, n);
    std::cout << "g,bias,variance,mse,mise\n";
    for (size_t i = 0; i < rep.grid.size(); ++i) {
      std::cout << fmt(rep.grid[i]) << ',' << fmt(rep.bias[i]) << ','
                << fmt(rep.variance[i]) << ',' << fmt(rep.mse[i]) << ','
                << fmt(rep.mise[i]) << '\n';
    }
    return 0;
  }

  const Sample s(f.sample(n, seed), {std::to_string(density), seed, 0});
  if (kind == "bandwidth") {
    const auto r = dfcv::h_hat(s);
    std::cout << "h,m_hat,mise_exact\n";
    for (size_t i = 0; i < r.curve.grid.size(); ++i) {
      std::cout << fmt(r.curve.grid[i]) << ',' << fmt(r.curve.values[i]) << ','
                << fmt(dfcv::exact_kde_mise(f, n, r.curve.grid[i])) << '\n';
    }
    return 0;
  }

  const auto r = dfcv::psi_hat(s);  // kind == "cv"
  std::cout << "g,cv,mise_exact,mse_exact\n";
  for (size_t i = 0; i < r.curve.grid.size(); ++i) {
    const double g = r.curve.grid[i];
    std::cout << fmt(g) << ',' << fmt(r.curve.values[i]) << ','
              << fmt(dfcv::exact_mise(f, n, g)) << ','
              << fmt(dfcv::exact_mse(f, n, g)) << '\n';
  }
  return 0;
}

int cmd_bandwidth(const std::string& input, const std::string& method) {
  const Sample s(read_column(input));
  double parameter = 0.0, crit = 0.0;
  if (method == "scv") {
    const auto r = dfcv::h_hat(s);
    parameter = r.h;
    crit = r.m_min;
  } else if (method == "histcv") {
    const auto r = dfcv::hist_psi_breve(s);
    parameter = r.b_cv;
    crit = r.curve.min_value;
  } else {  // histscv
    const auto r = dfcv::hist_scv_binwidth(s);
    parameter = r.binwidth;
    crit = r.crit_min;
  }
  std::cout << ordered_json{{"method", method},
                            {"parameter", parameter},
                            {"criterion_min", crit},
                            {"n", s.n()}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_equivalence(int density) {
  const dfcv::NormalMixture& f = dfcv::catalog(density);
  std::cout << "n,g_mse,g_mise,ratio\n";
  for (int n : {100, 1000, 10000, 100000, 1000000}) {
    const double a = dfcv::g_mse(f, n);
    const double b = dfcv::g_mise(f, n);
    std::cout << n << ',' << fmt(a) << ',' << fmt(b) << ',' << fmt(a / b)
              << '\n';
  }
  return 0;
}

int cmd_difficulty(int density) {
  std::cout << "id,Q\n";
  if (density > 0) {
    std::cout << density << ',' << fmt(dfcv::catalog(density).q_difficulty())
              << '\n';
  } else {
    for (int d = 1; d <= 16; ++d)
      std::cout << d << ',' << fmt(dfcv::catalog(d).q_difficulty()) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-validation estimation of integrated squared density "
               "functionals"};
  app.require_subcommand(1);

  // estimate
  std::string est_input = "-", est_method = "ct";
  bool est_verbose = false;
  auto* est = app.add_subcommand("estimate", "Estimate a functional from a "
                                             "one-column CSV of observations");
  est->add_option("--input", est_input, "Input file, '-' for stdin");
  est->add_option("--method", est_method, "Estimator")
      ->check(CLI::IsMember(
          {"ct", "entropy", "circular", "theta1", "theta2", "js", "shd"}));
  est->add_flag("--verbose", est_verbose, "Include the staging trace (js/shd)");

  // curves
  std::string cur_kind = "cv";
  int cur_density = 1, cur_n = 0;
  std::uint64_t cur_seed = 42;
  auto* cur = app.add_subcommand(
      "curves", "CSV dump of criterion and exact-error curves");
  cur->add_option("--kind", cur_kind, "cv | mse | bandwidth")
      ->check(CLI::IsMember({"cv", "mse", "bandwidth"}));
  cur->add_option("--density", cur_density, "Catalog density id")->required();
  cur->add_option("--n", cur_n, "Sample size")->required();
  cur->add_option("--seed", cur_seed, "Sampling seed (cv/bandwidth kinds)");

  // bandwidth
  std::string bw_input = "-", bw_method = "scv";
  auto* bw = app.add_subcommand(
      "bandwidth", "Pilot-free bandwidth/binwidth selection on a CSV column");
  bw->add_option("--input", bw_input, "Input file, '-' for stdin");
  bw->add_option("--method", bw_method, "scv | histcv | histscv")
      ->check(CLI::IsMember({"scv", "histcv", "histscv"}));

  // equivalence
  int eq_density = 1;
  auto* eq = app.add_subcommand(
      "equivalence", "g_MSE / g_MISE ratio table from the exact curves");
  eq->add_option("--density", eq_density, "Catalog density id")->required();

  // difficulty
  int diff_density = 0;
  auto* diff =
      app.add_subcommand("difficulty", "Q(f) difficulty values as CSV");
  diff->add_option("--density", diff_density, "Catalog id (default: all)");

  // simulate
  std::string sim_densities = "1-16", sim_sizes = "100,1000";
  std::string sim_out, sim_config;
  int sim_B = 500, sim_workers = 1;
  std::uint64_t sim_seed = 42;
  bool sim_json = false;
  auto* sim = app.add_subcommand(
      "simulate", "Monte Carlo comparison of CT/SHD/JS over the catalog");
  auto* o_dens = sim->add_option("--densities", sim_densities, "e.g. 1-16");
  auto* o_n = sim->add_option("--n", sim_sizes, "e.g. 100,1000");
  auto* o_B = sim->add_option("--B", sim_B, "Replicates per cell");
  auto* o_seed = sim->add_option("--seed", sim_seed, "Base seed");
  auto* o_workers = sim->add_option("--workers", sim_workers, "Thread count");
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--config", sim_config, "key=value config file");
  sim->add_flag("--json", sim_json, "Also write result.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cmd_estimate(est_input, est_method, est_verbose);
    if (cur->parsed()) return cmd_curves(cur_kind, cur_density, cur_n, cur_seed);
    if (bw->parsed()) return cmd_bandwidth(bw_input, bw_method);
    if (eq->parsed()) return cmd_equivalence(eq_density);
    if (diff->parsed()) return cmd_difficulty(diff_density);

    // simulate: config file first, explicit flags override it.
    dfcv::ExperimentConfig cfg;
    if (!sim_config.empty()) cfg = dfcv::parse_config_file(sim_config);
    if (sim_config.empty() || o_dens->count())
      cfg.densities = dfcv::parse_id_list(sim_densities);
    if (o_n->count() || sim_config.empty())
      cfg.sizes = dfcv::parse_id_list(sim_sizes);
    if (o_B->count()) cfg.replicates = sim_B;
    if (o_seed->count()) cfg.base_seed = sim_seed;
    if (o_workers->count()) cfg.workers = sim_workers;

    const dfcv::ExperimentResult result = dfcv::run_experiment(cfg);
    dfcv::export_csv(result, sim_out);
    if (sim_json) {
      std::ofstream out(std::filesystem::path(sim_out) / "result.json",
                        std::ios::binary);
      if (!out) throw std::runtime_error("cannot write result.json in " + sim_out);
      out << dfcv::result_json(result) << '\n';
    }
    // Summary to stdout for a quick look; files carry the full detail.
    std::ifstream summary(std::filesystem::path(sim_out) / "summary.csv");
    std::cout << summary.rdbuf();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
