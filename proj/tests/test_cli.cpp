// End-to-end tests of the command-line tool (spawned as a subprocess) plus
// the CSV/JSON plumbing underneath it: exit codes, deterministic output,
// exact JSON round-trips of fit results, and grid order-independence.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asymcop/cli.hpp"
#include "asymcop/construct.hpp"
#include "asymcop/inference.hpp"
#include "asymcop/io.hpp"
#include "asymcop/sample.hpp"

namespace fs = std::filesystem;
using asymcop::io::json;

namespace {

const std::string kCli = ASYMCOP_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "asymcop_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  RunResult r;
  fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = "\"" + kCli + "\" " + args + " > \"" + out.string() +
                    "\" 2> \"" + err.string() + "\"";
  int rc = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("csv reading drops malformed rows and finds columns", "[cli][io]") {
  fs::path dir = scratch_dir("csv");
  fs::path f = dir / "data.csv";
  {
    std::ofstream o(f);
    o << "a, b ,c\n"
      << "1,2,3\n"
      << "4,nan,6\n"          // NaN cell -> dropped
      << "7,8\n"              // short row -> dropped
      << "x,9,10\n"           // non-numeric -> dropped
      << "\n"                 // blank line -> ignored, not counted
      << "11,12,13\n";
  }
  auto t = asymcop::io::read_csv(f.string());
  REQUIRE(t.columns == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.n_dropped == 3);
  CHECK(t.rows[1][2] == 13.0);

  auto pairs = asymcop::io::extract_pairs(t, "c", "a");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<double, double>{3.0, 1.0});
  CHECK_THROWS_AS(asymcop::io::column_index(t, "missing"),
                  asymcop::domain_error);
  CHECK_THROWS_AS(asymcop::io::read_csv((dir / "absent.csv").string()),
                  asymcop::domain_error);
}

TEST_CASE("csv writing preserves doubles exactly", "[cli][io]") {
  fs::path dir = scratch_dir("csv_roundtrip");
  std::vector<std::pair<double, double>> rows = {
      {1.0 / 3.0, 0.1234567890123456789},
      {std::nextafter(1.0, 0.0), 1e-300},
  };
  fs::path f = dir / "pairs.csv";
  asymcop::io::write_pairs_csv(f.string(), "u", "v", rows);
  auto t = asymcop::io::read_csv(f.string());
  auto back = asymcop::io::extract_pairs(t, "u", "v");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].first == rows[i].first);
    CHECK(back[i].second == rows[i].second);
  }
}

TEST_CASE("fit results round-trip through JSON exactly", "[cli][io]") {
  using namespace asymcop;
  auto sample =
      sample_copula(2000, asymmetrize_survival_clayton(1.8, 1.0, 0.8), 77);
  ModelSpec spec{Family::ClaytonSurvival, 2, AsymSide::Second};
  FitResult fit = fit_copula_ml(sample, spec);
  REQUIRE(std::isfinite(fit.loglik));

  // Serialize -> text -> parse -> deserialize: every field must come back
  // bit-for-bit.
  json j = json::parse(io::fit_result_to_json(fit).dump());
  FitResult back = io::fit_result_from_json(j);
  CHECK(back.spec == fit.spec);
  CHECK(back.param_names == fit.param_names);
  REQUIRE(back.params.size() == fit.params.size());
  for (std::size_t i = 0; i < fit.params.size(); ++i)
    CHECK(back.params[i] == fit.params[i]);
  REQUIRE(back.stderrs.size() == fit.stderrs.size());
  for (std::size_t i = 0; i < fit.stderrs.size(); ++i) {
    REQUIRE(back.stderrs[i].has_value() == fit.stderrs[i].has_value());
    if (fit.stderrs[i]) CHECK(*back.stderrs[i] == *fit.stderrs[i]);
  }
  CHECK(back.loglik == fit.loglik);
  CHECK(back.bic_value == fit.bic_value);
  REQUIRE(back.hessian.size() == fit.hessian.size());
  for (std::size_t i = 0; i < fit.hessian.size(); ++i)
    for (std::size_t k = 0; k < fit.hessian[i].size(); ++k)
      CHECK(back.hessian[i][k] == fit.hessian[i][k]);
  CHECK(back.converged == fit.converged);
  CHECK(back.degenerate == fit.degenerate);
  CHECK(back.n_eval == fit.n_eval);
  CHECK(back.n_obs == fit.n_obs);
  CHECK(back.notes == fit.notes);

  // Non-finite fields (a failed fit) survive the trip too.
  FitResult failed;
  failed.spec = spec;
  failed.param_names = spec.param_names();
  failed.notes = {"all starts failed; no estimate available"};
  FitResult failed_back = io::fit_result_from_json(
      json::parse(io::fit_result_to_json(failed).dump()));
  CHECK(failed_back.loglik ==
        -std::numeric_limits<double>::infinity());
  CHECK(failed_back.bic_value == std::numeric_limits<double>::infinity());
  CHECK(failed_back.notes == failed.notes);
}

TEST_CASE("cli rejects bad configuration with exit code 2", "[cli]") {
  fs::path dir = scratch_dir("badconfig");
  fs::path data = dir / "d.csv";
  {
    std::ofstream o(data);
    o << "u,v\n0.5,0.5\n";
  }
  CHECK(run_cli("", dir).exit_code == 2);                       // no verb
  CHECK(run_cli("frobnicate", dir).exit_code == 2);             // bad verb
  CHECK(run_cli("fit --bogus-flag 1", dir).exit_code == 2);     // bad flag
  CHECK(run_cli("--help", dir).exit_code == 0);
  CHECK(run_cli("fit --cols u,v", dir).exit_code == 2);         // no input
  CHECK(run_cli("fit --input " + (dir / "absent.csv").string() +
                    " --cols u,v",
                dir)
            .exit_code == 2);
  std::string base = "fit --input " + data.string();
  CHECK(run_cli(base + " --cols u,q", dir).exit_code == 2);     // bad column
  CHECK(run_cli(base + " --cols u,v --thresholds 0.4", dir).exit_code == 2);
  CHECK(run_cli(base + " --cols u,v --thresholds 1.0", dir).exit_code == 2);
  CHECK(run_cli(base + " --cols u,v --grid ''", dir).exit_code == 2);
  CHECK(run_cli(base + " --cols u,v --grid frank", dir).exit_code == 2);
  CHECK(run_cli(base + " --cols u,v --grid plackett:4", dir).exit_code == 2);
  CHECK(run_cli(base + " --cols u,v --asym-side left", dir).exit_code == 2);
  // too few observations for the margin stage is still a config problem
  CHECK(run_cli(base + " --cols u,v", dir).exit_code == 2);

  CHECK(run_cli("simulate --params 1.0", dir).exit_code == 2);  // no model
  CHECK(run_cli("simulate --model frank --params 1", dir).exit_code == 2);
  CHECK(run_cli("simulate --model plackett+frailty --params 1,0.2", dir)
            .exit_code == 2);
  CHECK(run_cli("simulate --model gumbel --params 0.5,0.7", dir).exit_code ==
        2);  // wrong arity
  CHECK(run_cli("simulate --model gumbel --params 1.7", dir).exit_code ==
        2);  // out-of-range alpha
  CHECK(run_cli("tails --params 1.0", dir).exit_code == 2);     // no model
}

TEST_CASE("simulate is deterministic and honors n=0", "[cli]") {
  fs::path dir = scratch_dir("simulate");
  std::string model = "--model clayton_survival+asym --params 2.96,0.75";

  auto r0 = run_cli("simulate " + model + " --n 0 --out " +
                        (dir / "empty.csv").string(),
                    dir);
  CHECK(r0.exit_code == 0);
  CHECK(slurp(dir / "empty.csv") == "u,v\n");

  auto r1 = run_cli("simulate " + model + " --n 500 --seed 42 --out " +
                        (dir / "a.csv").string(),
                    dir);
  auto r2 = run_cli("simulate " + model + " --n 500 --seed 42 --out " +
                        (dir / "b.csv").string(),
                    dir);
  auto r3 = run_cli("simulate " + model + " --n 500 --seed 43 --out " +
                        (dir / "c.csv").string(),
                    dir);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(r3.exit_code == 0);
  std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a != slurp(dir / "c.csv"));

  auto t = asymcop::io::read_csv((dir / "a.csv").string());
  REQUIRE(t.rows.size() == 500);
  CHECK(t.n_dropped == 0);
  for (const auto& row : t.rows) {
    CHECK(row[0] > 0.0);
    CHECK(row[0] < 1.0);
    CHECK(row[1] > 0.0);
    CHECK(row[1] < 1.0);
  }
}

TEST_CASE("fit emits round-trippable reports independent of grid order",
          "[cli]") {
  fs::path dir = scratch_dir("fit_report");
  fs::path data = dir / "data.csv";
  auto sim = run_cli(
      "simulate --model clayton_survival+asym --params 2.96,0.75 --n 2500 "
      "--seed 5 --out " +
          data.string(),
      dir);
  REQUIRE(sim.exit_code == 0);

  std::string base = "fit --input " + data.string() + " --cols u,v --seed 3 ";
  auto f1 = run_cli(base + "--grid clayton_survival:2,plackett:1 --out " +
                        (dir / "o1").string(),
                    dir);
  auto f2 = run_cli(base + "--grid plackett:1,clayton_survival:2 --out " +
                        (dir / "o2").string(),
                    dir);
  REQUIRE(f1.exit_code == 0);
  REQUIRE(f2.exit_code == 0);

  // Permuting the grid changes nothing: reports are byte-identical.
  CHECK(slurp(dir / "o1" / "report.json") == slurp(dir / "o2" / "report.json"));
  CHECK(slurp(dir / "o1" / "report.txt") == slurp(dir / "o2" / "report.txt"));

  json rep = json::parse(slurp(dir / "o1" / "report.json"));
  CHECK(rep.at("command") == "fit");
  CHECK(rep.at("input").at("rows_used") == 2500);
  CHECK(rep.at("input").at("rows_dropped") == 0);

  // Every model row deserializes to a FitResult and re-serializes to the
  // identical JSON: the report carries the fit fields exactly.
  std::size_t n_models = 0;
  for (const auto& ladder : rep.at("grid").at("ladders")) {
    for (const auto& row : ladder.at("levels")) {
      asymcop::FitResult fit = asymcop::io::fit_result_from_json(row);
      CHECK(asymcop::io::fit_result_to_json(fit) == row);
      ++n_models;
    }
  }
  CHECK(n_models == 3);  // clayton_survival levels 1-2 + plackett level 1

  // The asymmetry in the data (delta = 0.75) makes the one- vs two-parameter
  // likelihood-ratio test significant far beyond the 0.001 level.
  const auto& ladders = rep.at("grid").at("ladders");
  bool checked_lr = false;
  for (const auto& ladder : ladders) {
    if (ladder.at("family") != "clayton_survival") continue;
    REQUIRE(ladder.at("lr_tests").size() == 1);
    const auto& lr = ladder.at("lr_tests")[0];
    CHECK(lr.at("df") == 1);
    CHECK(asymcop::io::number_from_json(lr.at("p_value")) < 1e-3);
    checked_lr = true;
  }
  CHECK(checked_lr);

  // margins.json feeds simulate: data-unit output with the fitted columns.
  auto ms = run_cli(
      "simulate --model clayton_survival --params 1.5 --n 40 --seed 2 "
      "--margins " +
          (dir / "o1" / "margins.json").string() + " --out " +
          (dir / "xy.csv").string(),
      dir);
  REQUIRE(ms.exit_code == 0);
  auto xy = asymcop::io::read_csv((dir / "xy.csv").string());
  CHECK(xy.columns == std::vector<std::string>{"u", "v"});
  CHECK(xy.rows.size() == 40);
  CHECK(xy.n_dropped == 0);
}

TEST_CASE("fit on simulated upper-tail data selects the generating family",
          "[cli][slow]") {
  fs::path dir = scratch_dir("fit_select");
  fs::path data = dir / "cs.csv";
  REQUIRE(run_cli("simulate --model clayton_survival --params 1.24 --n 8000 "
                  "--seed 11 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  auto fit = run_cli("fit --input " + data.string() +
                         " --cols u,v --grid all --out " +
                         (dir / "out").string(),
                     dir);
  REQUIRE(fit.exit_code == 0);
  json rep = json::parse(slurp(dir / "out" / "report.json"));
  CHECK(rep.at("grid").at("best").at("family") == "clayton_survival");
}

TEST_CASE("demo workflow runs end to end", "[cli][slow]") {
  fs::path dir = scratch_dir("demo");
  auto r = run_cli("demo --n 3000 --seed 6 --out " + (dir / "d").string(),
                   dir);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir / "d" / "demo_data.csv"));
  CHECK(fs::exists(dir / "d" / "report.txt"));
  CHECK(fs::exists(dir / "d" / "margins.json"));
  json rep = json::parse(slurp(dir / "d" / "report.json"));
  CHECK(rep.at("margins")[0].at("column") == "hs");
  CHECK(rep.at("margins")[1].at("column") == "ws");
  CHECK(rep.at("config").at("asym_side") == "both");
  // Three-family grid, three levels each.
  CHECK(rep.at("grid").at("ladders").size() == 3);
  for (const auto& ladder : rep.at("grid").at("ladders"))
    CHECK(ladder.at("levels").size() == 3);
  CHECK(r.out.find("best model by BIC") != std::string::npos);

  // The --demo flag on fit covers the same path with a custom grid.
  auto r2 = run_cli("fit --demo --n 1500 --seed 6 --grid clayton_survival:1 "
                    "--out " +
                        (dir / "d2").string(),
                    dir);
  REQUIRE(r2.exit_code == 0);
  json rep2 = json::parse(slurp(dir / "d2" / "report.json"));
  CHECK(rep2.at("grid").at("ladders").size() == 1);
}

TEST_CASE("tails verb reports closed forms, probes, and conventions",
          "[cli]") {
  fs::path dir = scratch_dir("tails");

  auto g1 = run_cli("tails --model gumbel --params 1.0", dir);
  CHECK(g1.exit_code == 0);
  CHECK(g1.out.find("lambda = 0.0000") != std::string::npos);

  auto cs = run_cli("tails --model clayton_survival --params 1.47", dir);
  CHECK(cs.exit_code == 0);
  CHECK(cs.out.find("lambda = 0.6240") != std::string::npos);

  auto fg = run_cli(
      "tails --model gumbel+asym+frailty --params 0.48,0.76,0.19 --out " +
          (dir / "tails.json").string(),
      dir);
  CHECK(fg.exit_code == 0);
  for (const char* label :
       {"r_swapped_exponents", "r^(-beta)", "r^(-1/beta)",
        "r_swapped^(-beta)", "r_swapped^(-1/beta)", "probe sequence"})
    CHECK(fg.out.find(label) != std::string::npos);
  json rep = json::parse(slurp(dir / "tails.json"));
  CHECK(rep.at("model") == "gumbel+asym(second)+frailty");
  CHECK(rep.at("lower_closed_form_candidates").size() == 6);
  CHECK(rep.at("upper_probe").size() == 4);
  CHECK(rep.at("params").at("beta") == json(0.19));
}

TEST_CASE("figure-1 reproduction emits three datasets and tau summary",
          "[cli][slow]") {
  fs::path dir = scratch_dir("figure1");
  auto r = run_cli("simulate --figure1 --seed 20 --out " +
                       (dir / "f").string(),
                   dir);
  REQUIRE(r.exit_code == 0);
  for (const char* f : {"set1.csv", "set2.csv", "set3.csv", "figure1.json"})
    CHECK(fs::exists(dir / "f" / f));
  json s = json::parse(slurp(dir / "f" / "figure1.json"));
  double t1 = asymcop::io::number_from_json(s.at("tau")[0]);
  double t2 = asymcop::io::number_from_json(s.at("tau")[1]);
  double t3 = asymcop::io::number_from_json(s.at("tau")[2]);
  CHECK(t1 == Catch::Approx(0.50).margin(0.02));
  CHECK(t2 == Catch::Approx(0.44).margin(0.02));
  CHECK(t3 == Catch::Approx(0.50).margin(0.02));
  CHECK(t2 < t1);
  auto t = asymcop::io::read_csv((dir / "f" / "set2.csv").string());
  CHECK(t.rows.size() == 5000);
}
