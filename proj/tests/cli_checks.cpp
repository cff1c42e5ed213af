// End-to-end checks of the command line binary: exit codes, output files,
// determinism of reruns. Spawns the real executable.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "conebounds/experiments.hpp"
#include "conebounds/io.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::fprintf(stderr, "FAILED: %s\n", what.c_str());
  }
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const fs::path out = fs::temp_directory_path() / "conebounds_cli_out.txt";
  const std::string cmd =
      env + " " + std::string(CONEBOUNDS_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "conebounds_cli_checks";
  fs::create_directories(dir);

  // width: closed form value and usage errors
  {
    const auto r = run("width --model sparse --n 500 --k 5");
    expect(r.exit_code == 0, "width exits 0");
    expect(r.output.find("7.2789541601441865") != std::string::npos,
           "width prints the full-precision closed form, got: " + r.output);
    expect(run("width --model sparse --n 500").exit_code == 2, "missing flag exits 2");
    expect(run("width --model sparse --n 10 --k 20").exit_code == 1,
           "out-of-range k is a domain error (exit 1)");
    expect(run("nonsense").exit_code == 2, "unknown subcommand exits 2");
  }

  // width: deterministic Monte Carlo, seed from flag and from the environment
  {
    const std::string args = "width --model sparse --n 80 --k 3 --mc-samples 200";
    const auto a = run(args + " --seed 11");
    const auto b = run(args + " --seed 11");
    const auto c = run(args, "CONEBOUNDS_SEED=11");
    expect(a.exit_code == 0 && a.output == b.output, "same seed, same bytes");
    expect(a.output == c.output, "CONEBOUNDS_SEED is the default seed");
    const auto d = run(args + " --seed 12");
    expect(a.output != d.output, "different seed, different estimate");
  }

  // bound: report fields and the hypothesis guard
  {
    const auto ok = run("bound --m 200 --width 5 --t 3 --znorm 0.7");
    expect(ok.exit_code == 0, "bound exits 0");
    expect(ok.output.find("\"eta\"") != std::string::npos, "bound prints eta");
    expect(ok.output.find("\"socp_bound\"") != std::string::npos, "bound prints socp_bound");
    const auto bad = run("bound --m 100 --width 8 --t 3 --znorm 1");
    expect(bad.exit_code == 1, "t beyond the hypothesis exits 1");
    expect(bad.output.find("hypothesis") != std::string::npos, "error cites the hypothesis");
    expect(run("bound --m 200 --width 5 --t 3 --znorm 0").exit_code == 0, "znorm 0 is fine");
  }

  // solve: instance file in, result out; malformed JSON exits 2
  {
    conebounds::SweepConfig cfg;
    cfg.model = conebounds::StructureModel::sparse(30);
    cfg.k = 3;
    cfg.m_values = {40};
    cfg.sigma = 0.0;  // noiseless
    cfg.base_seed = 5;
    const auto inst = conebounds::generate_instance(cfg, 40, 0);
    const fs::path problem = dir / "problem.json";
    std::ofstream(problem) << conebounds::instance_to_json(inst).dump();
    const auto r = run("solve --input " + problem.string() + " --method lasso --no-x");
    expect(r.exit_code == 0, "solve exits 0");
    const auto j = conebounds::json::parse(r.output);
    expect(j.at("error_norm").get<double>() <= 1e-6, "noiseless recovery through the CLI");
    expect(j.at("converged").get<bool>(), "solver converged");

    // lambda auto path on a noisy instance
    cfg.sigma = 0.05;
    const auto noisy = conebounds::generate_instance(cfg, 40, 1);
    const fs::path problem2 = dir / "problem2.json";
    std::ofstream(problem2) << conebounds::instance_to_json(noisy).dump();
    const auto auto_r = run("solve --input " + problem2.string() +
                            " --method penalized --lambda auto --mc-samples 400 --no-x");
    expect(auto_r.exit_code == 0, "lambda auto exits 0");
    const auto ja = conebounds::json::parse(auto_r.output);
    expect(ja.contains("lambda") && ja.at("lambda").get<double>() > 0.0,
           "auto lambda reported");
    expect(ja.contains("tau_star"), "tau_star reported");

    const fs::path broken = dir / "broken.json";
    std::ofstream(broken) << "{ this is not json";
    expect(run("solve --input " + broken.string() + " --method lasso").exit_code == 2,
           "malformed JSON exits 2");
    expect(run("solve --input " + (dir / "missing.json").string() + " --method lasso")
               .exit_code == 2,
           "missing file exits 2");
  }

  // sweep: config in, CSV + summary out, reruns byte-identical
  {
    const fs::path cfg_path = dir / "sweep.json";
    std::ofstream(cfg_path) << R"({
      "model": {"kind": "sparse", "n": 60}, "k": 3,
      "m_values": [30, 40], "trials_per_m": 3, "t": 2.0,
      "base_seed": 9, "width_mc_samples": 32
    })";
    const fs::path csv1 = dir / "a.csv", sum1 = dir / "a.json";
    const fs::path csv2 = dir / "b.csv", sum2 = dir / "b.json";
    const auto r1 = run("sweep --config " + cfg_path.string() + " --out " + csv1.string() +
                        " --summary " + sum1.string() + " --jobs 1 --quiet");
    const auto r2 = run("sweep --config " + cfg_path.string() + " --out " + csv2.string() +
                        " --summary " + sum2.string() + " --jobs 2 --quiet");
    expect(r1.exit_code == 0 && r2.exit_code == 0, "sweep exits 0");
    expect(slurp(csv1) == slurp(csv2), "sweep CSV byte-identical across job counts");
    expect(slurp(sum1) == slurp(sum2), "summary byte-identical across job counts");
    expect(slurp(csv1).find("m,trial,seed,z_norm,err_lasso,err_socp") != std::string::npos,
           "CSV carries the schema header");
    expect(run("sweep --config " + (dir / "absent.json").string()).exit_code == 2,
           "missing config exits 2");
  }

  // validate: gates pass at friendly settings, unknown check is a usage error
  {
    const auto adv = run("validate --check adversarial --n 40 --k 2 --m 30 --t 2 "
                         "--trials 40 --seed 3");
    expect(adv.exit_code == 0, "adversarial validate passes: " + adv.output);
    const auto gor = run("validate --check gordon --n 30 --k 2 --m 36 --t 1 "
                         "--trials 25 --restarts 15 --seed 3");
    expect(gor.exit_code == 0, "gordon validate passes: " + gor.output);
    const auto cor = run("validate --check correlation --n 30 --k 2 --m 24 --t 4 "
                         "--trials 30 --seed 3");
    expect(cor.exit_code == 0, "correlation validate passes: " + cor.output);
    expect(run("validate --check wat --n 10 --k 1 --m 8").exit_code == 2,
           "unknown check exits 2");
  }

  std::printf(failures == 0 ? "cli checks passed\n" : "cli checks: %d failures\n", failures);
  return failures == 0 ? 0 : 1;
}
