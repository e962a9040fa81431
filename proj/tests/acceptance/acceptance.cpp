// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any fail. Usage: acceptance [work-dir]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depshift/oracle.hpp"
#include "depshift/pipeline.hpp"
#include "depshift/synth.hpp"

using namespace depshift;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

oracle::Probs to_probs(const Distribution& d) { return {d.probs.begin(), d.probs.end()}; }

Distribution random_distribution(std::mt19937_64& rng, int vocab) {
  FillerCounts c;
  while (c.empty()) {
    for (int i = 0; i < vocab; ++i) {
      if (rng() % 2 == 0) c["f" + std::to_string(i)] = 1 + static_cast<std::int64_t>(rng() % 100);
    }
  }
  return to_distribution(c);
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("DEPSHIFT_LOG=quiet '") + DEPSHIFT_CLI + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_args(const std::string& data, const std::string& out) {
  return "run --corpus1 " + data + "/period1.conllu --corpus2 " + data + "/period2.conllu --targets " + data +
         "/targets.txt --gold-binary " + data + "/gold_binary.tsv --gold-graded " + data +
         "/gold_graded.tsv --output-dir " + out;
}

Outcome jsd_against_oracle() {
  std::mt19937_64 rng(1);
  const auto t0 = Clock::now();
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const int vocab = 1 + static_cast<int>(rng() % 20);
    const auto p = random_distribution(rng, vocab);
    const auto q = random_distribution(rng, vocab);
    const double v = jsd(p, q);
    if (v < 0 || v > 1) return {false, "value out of [0,1]: " + num(v, 12)};
    if (v != jsd(q, p)) return {false, "asymmetric result on pair " + std::to_string(i)};
    worst = std::max(worst, std::abs(v - oracle::oracle_jsd(to_probs(p), to_probs(q))));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-9 && secs < 5.0;
  return {ok, "max |diff| " + num(worst, 15) + ", " + num(secs, 3) + " s"};
}

Outcome decomposition_sums() {
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const int vocab = 1 + static_cast<int>(rng() % 20);
    const auto sc = jsd_decompose(random_distribution(rng, vocab), random_distribution(rng, vocab));
    double total = 0;
    for (const auto& c : sc.contributions) {
      if (c.contribution < 0) return {false, "negative contribution for " + c.filler};
      total += c.contribution;
    }
    worst = std::max(worst, std::abs(total - sc.jsd));
  }
  return {worst <= 1e-9, "max |sum - jsd| " + num(worst, 15)};
}

Outcome worked_example() {
  const Distribution p{{{"a", 0.5}, {"b", 0.5}}};
  const Distribution q{{{"a", 1.0}}};
  const auto sc = jsd_decompose(p, q);
  double a = NAN, b = NAN;
  for (const auto& c : sc.contributions) (c.filler == "a" ? a : b) = c.contribution;
  const bool jsd_ok = std::abs(sc.jsd - 0.311278) <= 1e-6;
  const bool a_ok = std::abs(a - 0.094361) <= 1e-6;
  const bool b_ok = std::abs(b - 0.216917) <= 1e-6;
  return {jsd_ok && a_ok && b_ok, "jsd " + num(sc.jsd) + " (want 0.311278), a " + num(a) +
                                      " (want 0.094361), b " + num(b) + " (want 0.216917)"};
}

Outcome changepoint_against_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto t0 = Clock::now();
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + rng() % 199;
    std::vector<double> y(n);
    const int style = i % 4;
    const std::size_t cut = 1 + rng() % (n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (style == 0) y[j] = u(rng);
      if (style == 1) y[j] = 0.42;
      if (style == 2) y[j] = j < cut ? 0.8 + 0.01 * u(rng) : 0.1 * u(rng);
      if (style == 3) y[j] = std::round(u(rng) * 4) / 4;
    }
    std::sort(y.begin(), y.end(), std::greater<>());
    const std::size_t got = best_split(y);
    const std::size_t want = oracle::oracle_split(y);
    if (got != want) {
      return {false, "vector " + std::to_string(i) + " (n=" + std::to_string(n) + "): " +
                         std::to_string(got) + " vs oracle " + std::to_string(want)};
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 5.0, "500 vectors agree, " + num(secs, 3) + " s"};
}

Outcome end_to_end(const fs::path& work) {
  const fs::path data = work / "synth";
  const fs::path out = work / "synth_out";
  fs::remove_all(out);
  const auto t0 = Clock::now();
  if (run_cli("synth --out-dir " + data.string() + " --stable 10 --changed 10 --overlap 0.2 --seed 7") != 0) {
    return {false, "synth failed"};
  }
  if (run_cli(run_args(data.string(), out.string())) != 0) return {false, "run failed"};
  const double secs = seconds_since(t0);
  const auto report = report_from_json(nlohmann::json::parse(read_file((out / "report.json").string())));
  std::size_t last_changed = 0, first_stable = report.lemmas.size();
  int changed_positive = 0;
  for (std::size_t i = 0; i < report.lemmas.size(); ++i) {
    const auto& l = report.lemmas[i];
    if (l.target_id.rfind("changed", 0) == 0) {
      last_changed = i;
      changed_positive += l.label;
    } else {
      first_stable = std::min(first_stable, i);
    }
  }
  const double rho = report.evaluation && report.evaluation->spearman ? *report.evaluation->spearman : NAN;
  const bool ok = secs < 60.0 && last_changed < first_stable && rho >= 0.9 && changed_positive >= 9;
  return {ok, num(secs, 2) + " s, changed above stable: " + (last_changed < first_stable ? "yes" : "no") +
                  ", spearman " + num(rho) + ", changed labelled positive " + std::to_string(changed_positive) +
                  "/10"};
}

Outcome denoising(const fs::path& work) {
  for (const auto& [name, singletons] : {std::pair{"clean", 0}, std::pair{"noisy", 50}}) {
    const fs::path data = work / name;
    if (run_cli("synth --out-dir " + data.string() + " --stable 10 --changed 10 --singletons " +
                std::to_string(singletons)) != 0) {
      return {false, std::string("synth failed for ") + name};
    }
    if (run_cli(run_args(data.string(), (work / (std::string(name) + "_out")).string()) + " --min-total 2") != 0) {
      return {false, std::string("run failed for ") + name};
    }
  }
  const std::string a = read_file((work / "clean_out" / "scores.tsv").string());
  const std::string b = read_file((work / "noisy_out" / "scores.tsv").string());
  return {a == b, a == b ? "scores.tsv identical with and without 50 singletons per slot" : "scores differ"};
}

Outcome determinism(const fs::path& work) {
  const std::string data = (work / "synth").string();
  std::vector<std::string> dirs;
  for (const auto& [name, workers] : {std::pair{"det_a", 1}, std::pair{"det_b", 1}, std::pair{"det_c", 4}}) {
    const std::string out = (work / name).string();
    fs::remove_all(out);
    if (run_cli(run_args(data, out) + " --workers " + std::to_string(workers)) != 0) {
      return {false, std::string("run failed for ") + name};
    }
    dirs.push_back(out);
  }
  for (const auto* file : {"scores.tsv", "labels.tsv", "report.json", "manifest.json"}) {
    const std::string ref = read_file(dirs[0] + "/" + file);
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      const std::string other = read_file(dirs[i] + "/" + file);
      // Manifests name the output directory only through inputs, so they compare directly.
      if (other != ref) return {false, std::string(file) + " differs in " + dirs[i]};
    }
  }
  return {true, "outputs byte-identical across repeated runs and --workers 1 vs 4"};
}

Outcome percentile_counts() {
  const bool a = percentile_positives(37, 0.43) == 16;
  const bool b = percentile_positives(2, 0.43) == 1;
  bool sweep = true;
  for (std::size_t n = 1; n <= 1000; ++n) sweep = sweep && percentile_positives(n, 0.43) == (43 * n + 50) / 100;
  return {a && b && sweep, "n=37 -> " + std::to_string(percentile_positives(37, 0.43)) + ", n=2 -> " +
                               std::to_string(percentile_positives(2, 0.43)) +
                               ", n in [1,1000] round-half-up: " + (sweep ? "ok" : "mismatch")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "depshift_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"jsd-matches-oracle", jsd_against_oracle},
      {"decomposition-sums-to-jsd", decomposition_sums},
      {"worked-example", worked_example},
      {"changepoint-matches-oracle", changepoint_against_oracle},
      {"synthetic-end-to-end", [&] { return end_to_end(work); }},
      {"singleton-denoising", [&] { return denoising(work); }},
      {"deterministic-outputs", [&] { return determinism(work); }},
      {"percentile-counts", percentile_counts},
  };

  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (checks.size() - failures) << "/" << checks.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
