#include "dfcv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dfcv/competitors.hpp"
#include "dfcv/cv_core.hpp"
#include "dfcv/math.hpp"
#include "dfcv/mixtures.hpp"

#include "json.hpp"

namespace dfcv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Order-sensitive digest of the drawn sample; identical across estimators of
// a replicate by construction, and recomputable by consumers.
std::uint64_t sample_checksum(const std::vector<double>& v) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (double x : v) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x));
  return h;
}

// Returns the estimate; a nonempty note marks a flagged-but-valued result.
double run_estimator(const std::string& name, const Sample& s,
                     std::string* note) {
  if (name == "CT") return psi_hat(s).estimate;
  if (name == "JS") {
    const auto r = psi_js(s);
    if (r.trace.psi2_fallback) *note = "fallback: normal-scale psi_2";
    return r.estimate;
  }
  const auto r = psi_shd(s);  // validated earlier; only SHD remains
  if (r.trace.solve_fallback) *note = "fallback: no sign change, plug-in bandwidth";
  return r.estimate;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("experiment config: " + what);
  };
  if (cfg.densities.empty()) fail("no densities");
  for (int d : cfg.densities) {
    if (std::count(cfg.densities.begin(), cfg.densities.end(), d) > 1)
      fail("duplicate density " + std::to_string(d));
    catalog(d);  // throws on unknown id
  }
  if (cfg.sizes.empty()) fail("no sample sizes");
  for (int n : cfg.sizes) {
    if (n < 2) fail("sample size must be >= 2");
    if (std::count(cfg.sizes.begin(), cfg.sizes.end(), n) > 1)
      fail("duplicate sample size " + std::to_string(n));
  }
  if (cfg.replicates < 1) fail("replicates must be >= 1");
  if (cfg.estimators.empty()) fail("no estimators");
  for (const auto& e : cfg.estimators) {
    if (e != "CT" && e != "SHD" && e != "JS") fail("unknown estimator " + e);
    if (std::count(cfg.estimators.begin(), cfg.estimators.end(), e) > 1)
      fail("duplicate estimator " + e);
  }
  if (cfg.workers < 1) fail("workers must be >= 1");
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Shortest representation that parses back to the same double.
std::string fmt(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt_hex(std::uint64_t x) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, 16);
  return std::string(16 - (p - buf), '0') + std::string(buf, p);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  ExperimentResult res;
  res.config = cfg;
  const int B = cfg.replicates;
  const size_t n_est = cfg.estimators.size();
  const size_t total = cfg.densities.size() * cfg.sizes.size() * size_t(B);
  res.records.resize(total);

  // Slot-indexed work queue: slot order fixes the output order, so the
  // worker count only affects wall time.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < total;) {
      const int rep = int(i % B);
      const size_t cell = i / B;
      const int n = cfg.sizes[cell % cfg.sizes.size()];
      const int density = cfg.densities[cell / cfg.sizes.size()];

      ReplicateRecord& rec = res.records[i];
      rec.density = density;
      rec.n = n;
      rec.replicate = rep;
      const std::uint64_t seed = derive_seed(cfg.base_seed, density, n, rep);
      std::vector<double> draws = catalog(density).sample(n, seed);
      rec.sample_checksum = sample_checksum(draws);
      const Sample s(std::move(draws),
                     {std::to_string(density), seed, rep});
      rec.estimates.assign(n_est, kNaN);
      rec.notes.assign(n_est, "");
      for (size_t k = 0; k < n_est; ++k) {
        try {
          rec.estimates[k] = run_estimator(cfg.estimators[k], s, &rec.notes[k]);
        } catch (const std::exception& e) {
          rec.notes[k] = e.what();
        }
      }
    }
  };
  const int n_threads = int(std::min<size_t>(cfg.workers, total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Per-cell RRMSE, then ratio-to-best within each (density, n) row.
  for (size_t cell = 0; cell < total / B; ++cell) {
    const int n = cfg.sizes[cell % cfg.sizes.size()];
    const int density = cfg.densities[cell / cfg.sizes.size()];
    const double psi = catalog(density).true_psi();

    std::vector<CellStat> row(n_est);
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n_est; ++k) {
      CellStat& c = row[k];
      c.density = density;
      c.n = n;
      c.estimator = cfg.estimators[k];
      double acc = 0.0;
      int used = 0;
      for (int rep = 0; rep < B; ++rep) {
        const ReplicateRecord& rec = res.records[cell * B + rep];
        const double e = rec.estimates[k];
        if (std::isnan(e)) {
          ++c.failures;
        } else {
          acc += (e - psi) * (e - psi);
          ++used;
          if (!rec.notes[k].empty()) ++c.fallbacks;
        }
      }
      c.rrmse = used > 0 ? std::sqrt(acc / used) / psi : kNaN;
      if (c.rrmse < best) best = c.rrmse;
    }
    for (auto& c : row) {
      c.ratio = c.rrmse / best;
      res.cells.push_back(std::move(c));
    }
  }

  // Summary: ratio statistics across densities, one row per
  // (estimator, n).
  for (size_t k = 0; k < n_est; ++k) {
    for (int n : cfg.sizes) {
      std::vector<double> ratios;
      for (const auto& c : res.cells) {
        if (c.estimator == cfg.estimators[k] && c.n == n &&
            !std::isnan(c.ratio)) {
          ratios.push_back(c.ratio);
        }
      }
      SummaryRow srow;
      srow.estimator = cfg.estimators[k];
      srow.n = n;
      if (!ratios.empty()) {
        srow.mean_ratio = mean_of(ratios);
        srow.median_ratio = median_of(ratios);
        srow.min_ratio = *std::min_element(ratios.begin(), ratios.end());
        srow.max_ratio = *std::max_element(ratios.begin(), ratios.end());
      } else {
        srow.mean_ratio = srow.median_ratio = srow.min_ratio = srow.max_ratio =
            kNaN;
      }
      res.summary.push_back(std::move(srow));
    }
  }
  return res;
}

void export_csv(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());

  std::string summary = "estimator,n,mean_ratio,median_ratio,min_ratio,max_ratio\n";
  for (const auto& s : r.summary) {
    summary += s.estimator + ',' + std::to_string(s.n) + ',' +
               fmt(s.mean_ratio) + ',' + fmt(s.median_ratio) + ',' +
               fmt(s.min_ratio) + ',' + fmt(s.max_ratio) + '\n';
  }
  write_file(fs::path(dir) / "summary.csv", summary);

  std::string cells = "density,n,estimator,rrmse,ratio\n";
  for (const auto& c : r.cells) {
    cells += std::to_string(c.density) + ',' + std::to_string(c.n) + ',' +
             c.estimator + ',' + fmt(c.rrmse) + ',' + fmt(c.ratio) + '\n';
  }
  write_file(fs::path(dir) / "cells.csv", cells);

  std::string reldist =
      "density,n,estimator,replicate,rel_error,sample_checksum\n";
  std::string failures = "density,n,estimator,replicate,kind,message\n";
  for (const auto& rec : r.records) {
    const double psi = catalog(rec.density).true_psi();
    const std::string head = std::to_string(rec.density) + ',' +
                             std::to_string(rec.n) + ',';
    for (size_t k = 0; k < r.config.estimators.size(); ++k) {
      const std::string tag =
          head + r.config.estimators[k] + ',' + std::to_string(rec.replicate);
      if (std::isnan(rec.estimates[k])) {
        failures += tag + ",error," + rec.notes[k] + '\n';
        continue;
      }
      reldist += tag + ',' + fmt((rec.estimates[k] - psi) / psi) + ',' +
                 fmt_hex(rec.sample_checksum) + '\n';
      if (!rec.notes[k].empty())
        failures += tag + ",fallback," + rec.notes[k] + '\n';
    }
  }
  write_file(fs::path(dir) / "reldist.csv", reldist);
  write_file(fs::path(dir) / "failures.csv", failures);
}

std::string result_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  // workers is not mirrored: it changes wall time only, and the mirror of a
  // run must not depend on it.
  j["config"] = {{"densities", r.config.densities},
                 {"n", r.config.sizes},
                 {"B", r.config.replicates},
                 {"estimators", r.config.estimators},
                 {"seed", r.config.base_seed}};
  auto& summary = j["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"estimator", s.estimator},
                       {"n", s.n},
                       {"mean_ratio", s.mean_ratio},
                       {"median_ratio", s.median_ratio},
                       {"min_ratio", s.min_ratio},
                       {"max_ratio", s.max_ratio}});
  }
  auto& cells = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"density", c.density},
                     {"n", c.n},
                     {"estimator", c.estimator},
                     {"rrmse", c.rrmse},
                     {"ratio", c.ratio},
                     {"failures", c.failures},
                     {"fallbacks", c.fallbacks}});
  }
  auto& reps = j["replicates"] = nlohmann::ordered_json::array();
  for (const auto& rec : r.records) {
    nlohmann::ordered_json jr = {{"density", rec.density},
                                 {"n", rec.n},
                                 {"replicate", rec.replicate},
                                 {"sample_checksum", fmt_hex(rec.sample_checksum)}};
    auto& est = jr["estimates"] = nlohmann::ordered_json::object();
    for (size_t k = 0; k < r.config.estimators.size(); ++k) {
      const double e = rec.estimates[k];
      // NaN has no JSON literal; failures become null.
      if (std::isnan(e)) {
        est[r.config.estimators[k]] = nullptr;
      } else {
        est[r.config.estimators[k]] = e;
      }
      if (!rec.notes[k].empty()) jr["notes"][r.config.estimators[k]] = rec.notes[k];
    }
    reps.push_back(std::move(jr));
  }
  return j.dump(2);
}

std::vector<int> parse_id_list(const std::string& text) {
  auto parse_int = [&](const std::string& tok) {
    int v = 0;
    const char* b = tok.data();
    auto [p, ec] = std::from_chars(b, b + tok.size(), v);
    if (ec != std::errc() || p != b + tok.size())
      throw std::invalid_argument("bad id '" + tok + "' in '" + text + "'");
    return v;
  };
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_int(tok));
      continue;
    }
    const int lo = parse_int(tok.substr(0, dash));
    const int hi = parse_int(tok.substr(dash + 1));
    if (lo > hi)
      throw std::invalid_argument("empty range '" + tok + "' in '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty id list '" + text + "'");
  return out;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);

  ExperimentConfig cfg;
  for (int d = 1; d <= 16; ++d) cfg.densities.push_back(d);  // full catalog

  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto parse_int = [&](const std::string& v, const std::string& key) {
    long long out = 0;
    const char* b = v.data();
    auto [p, ec] = std::from_chars(b, b + v.size(), out);
    if (ec != std::errc() || p != b + v.size())
      throw std::runtime_error("config " + path + ": bad value for " + key);
    return out;
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config " + path + ": line " +
                               std::to_string(lineno) + " is not key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "densities") {
      cfg.densities = parse_id_list(val);
    } else if (key == "n") {
      cfg.sizes = parse_id_list(val);
    } else if (key == "B") {
      cfg.replicates = int(parse_int(val, key));
    } else if (key == "estimators") {
      cfg.estimators.clear();
      std::stringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.estimators.push_back(trim(tok));
    } else if (key == "seed") {
      cfg.base_seed = std::uint64_t(parse_int(val, key));
    } else if (key == "workers") {
      cfg.workers = int(parse_int(val, key));
    } else {
      throw std::runtime_error("config " + path + ": unknown key '" + key +
                               "' (line " + std::to_string(lineno) + ")");
    }
  }
  return cfg;
}

}  // namespace dfcv
