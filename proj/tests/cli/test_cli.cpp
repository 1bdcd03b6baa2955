#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI inside `cwd`; stdout and stderr are captured to files.
Run run(const fs::path& cwd, const std::string& args) {
  const auto out = cwd / ".stdout";
  const auto err = cwd / ".stderr";
  const std::string cmd = "cd '" + cwd.string() + "' && '" DYADWATCH_BIN "' " + args + " > '" + out.string() +
                          "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

bool updating() { return std::getenv("DYADWATCH_UPDATE_GOLDEN") != nullptr; }

void check_golden(const std::string& name, const std::string& actual) {
  const fs::path path = fs::path(GOLDEN_DIR) / name;
  if (updating()) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  INFO("golden file " << name);
  REQUIRE(fs::exists(path));
  CHECK(slurp(path) == actual);
}

// Shared working directory with a small seeded pipeline already run.
struct Pipeline {
  fixtures::TempDir dir{"cli"};

  Pipeline() {
    REQUIRE(run(dir.path(), "synth --count 300 --seed 7 --out d.csv").code == 0);
    REQUIRE(run(dir.path(), "ingest --in d.csv --train-out train.csv --test-out test.csv --per-class 60 --seed 3")
                .code == 0);
    REQUIRE(run(dir.path(), "train --data train.csv --seed 5 --hidden 3 --evidence-iterations 3 --out m.json")
                .code == 0);
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

const char* const kHmcFlags = "--hidden 2 --evidence-iterations 2 --hmc-samples 6 --hmc-burn-in 3 --hmc-leapfrog 5";

}  // namespace

TEST_CASE("synth golden") {
  fixtures::TempDir dir("cli-synth");
  const auto r = run(dir.path(), "synth --count 40 --seed 7 --out d.csv");
  CHECK(r.code == 0);
  check_golden("synth.stdout.json", r.out);
  check_golden("synth.csv", slurp(dir / "d.csv"));
}

TEST_CASE("ingest golden") {
  auto& p = pipeline();
  const auto r = run(p.dir.path(), "ingest --in d.csv --out norm.csv --train-out a.csv --test-out b.csv "
                                   "--per-class 20 --seed 9");
  CHECK(r.code == 0);
  check_golden("ingest.stdout.json", r.out);
  check_golden("ingest.train.csv", slurp(p.dir / "a.csv"));
  CHECK(slurp(p.dir / "norm.csv") == slurp(p.dir / "d.csv"));
}

TEST_CASE("train golden and determinism") {
  auto& p = pipeline();
  check_golden("train.model.json", slurp(p.dir / "m.json"));
  const auto r = run(p.dir.path(), "--threads 2 train --data train.csv --seed 5 --hidden 3 --evidence-iterations 3 "
                                   "--out m2.json");
  CHECK(r.code == 0);
  check_golden("train.stdout.json", r.out);
  CHECK(slurp(p.dir / "m2.json") == slurp(p.dir / "m.json"));

  const std::string hmc = std::string("train --method hmc --data train.csv --seed 5 ") + kHmcFlags;
  REQUIRE(run(p.dir.path(), hmc + " --out h1.json").code == 0);
  REQUIRE(run(p.dir.path(), hmc + " --out h2.json").code == 0);
  CHECK(slurp(p.dir / "h1.json") == slurp(p.dir / "h2.json"));
  check_golden("train.hmc.json", slurp(p.dir / "h1.json"));

  const auto ga = run(p.dir.path(), "train --data train.csv --seed 5 --ga --ga-population 4 --ga-generations 2 "
                                    "--ga-history ga.csv --evidence-iterations 2 --out g.json");
  CHECK(ga.code == 0);
  check_golden("train.ga.csv", slurp(p.dir / "ga.csv"));
}

TEST_CASE("evaluate golden") {
  auto& p = pipeline();
  const auto r = run(p.dir.path(), "evaluate --model m.json --data test.csv --roc roc.csv --confusion conf.json "
                                   "--max-thresholds 25 --omission omit.csv --train train.csv --seed 4 --hidden 2 "
                                   "--evidence-iterations 2");
  CHECK(r.code == 0);
  check_golden("evaluate.stdout.json", r.out);
  check_golden("evaluate.roc.csv", slurp(p.dir / "roc.csv"));
  check_golden("evaluate.confusion.json", slurp(p.dir / "conf.json"));
  check_golden("evaluate.omission.csv", slurp(p.dir / "omit.csv"));
}

TEST_CASE("ard golden") {
  auto& p = pipeline();
  const auto fresh = run(p.dir.path(), "ard --data train.csv --seed 2 --hidden 3 --out ard.csv");
  CHECK(fresh.code == 0);
  check_golden("ard.csv", slurp(p.dir / "ard.csv"));
  const auto map = run(p.dir.path(), "ard --model m.json");
  CHECK(map.code == 1);
  CHECK(map.err.find("relevance unavailable") != std::string::npos);
}

TEST_CASE("sweep golden") {
  auto& p = pipeline();
  const auto r = run(p.dir.path(), "sweep --model m.json --out sweep.csv");
  CHECK(r.code == 0);
  check_golden("sweep.csv", slurp(p.dir / "sweep.csv"));
  check_golden("sweep.stdout.json", r.out);
}

TEST_CASE("control golden") {
  auto& p = pipeline();
  const std::string c = "--case allies=0,contiguity=1,major_power=1,distance=0.5,capability=1,democracy=-8,"
                        "dependency=0.05";
  const auto multi = run(p.dir.path(), "control --model m.json --seed 1 --sa-steps 300 " + c);
  CHECK(multi.code == 0);
  check_golden("control.multi.json", multi.out);
  const auto single = run(p.dir.path(), "control --model m.json --seed 1 --strategy single:Democracy " + c);
  CHECK(single.code == 0);
  check_golden("control.single.json", single.out);
  const auto row = run(p.dir.path(), "control --model m.json --seed 1 --data test.csv --row 0 --sa-steps 100");
  CHECK(row.code == 0);
}

TEST_CASE("campaign golden") {
  auto& p = pipeline();
  const auto r = run(p.dir.path(), "campaign --model m.json --data test.csv --seed 1 --sa-steps 200 "
                                   "--strategy single:dependency --out camp.json --cases camp.csv");
  CHECK(r.code == 0);
  check_golden("campaign.stdout.json", r.out);
  check_golden("campaign.cases.csv", slurp(p.dir / "camp.csv"));
  const auto threaded = run(p.dir.path(), "--threads 3 campaign --model m.json --data test.csv --seed 1 "
                                          "--sa-steps 200 --strategy single:dependency --out camp3.json");
  CHECK(slurp(p.dir / "camp3.json") == slurp(p.dir / "camp.json"));
  const auto all = run(p.dir.path(), "campaign --model m.json --data test.csv --seed 1 --sa-steps 100 --strategy all");
  CHECK(all.code == 0);
  check_golden("campaign.all.json", all.out);
}

TEST_CASE("help on every subcommand") {
  fixtures::TempDir dir("cli-help");
  const auto top = run(dir.path(), "--help");
  CHECK(top.code == 0);
  check_golden("help.txt", top.out);
  for (const char* sub : {"ingest", "synth", "train", "evaluate", "ard", "sweep", "control", "campaign", "serve"}) {
    const auto r = run(dir.path(), std::string(sub) + " --help");
    INFO(sub);
    CHECK(r.code == 0);
    CHECK(r.out.find("--") != std::string::npos);
    check_golden(std::string("help.") + sub + ".txt", r.out);
  }
}

TEST_CASE("exit codes") {
  auto& p = pipeline();
  CHECK(run(p.dir.path(), "").code == 2);
  CHECK(run(p.dir.path(), "frobnicate").code == 2);
  CHECK(run(p.dir.path(), "synth --count 10 --out x.csv").code == 2);
  CHECK(run(p.dir.path(), "train --data train.csv --out x.json").code == 2);
  CHECK(run(p.dir.path(), "ingest --in d.csv --train-out a.csv --test-out b.csv").code == 2);
  CHECK(run(p.dir.path(), "evaluate --model m.json --data test.csv --omission o.csv").code == 2);
  CHECK(run(p.dir.path(), "control --model m.json --seed 1 --case allies=0").code == 2);

  std::ofstream(p.dir / "bad.csv") << "state_a,state_b,year,allies,contiguity,major_power,distance,capability,"
                                      "democracy,dependency,outcome\n1,2,1990,0,1,0,1.2,3.0,14,0.1,0\n";
  const auto bad = run(p.dir.path(), "ingest --in bad.csv");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("\"field\":\"democracy\"") != std::string::npos);
  CHECK(bad.err.find("\"line\":2") != std::string::npos);
  CHECK(run(p.dir.path(), "control --model m.json --seed 1 --strategy single:distance --data test.csv --row 0").code ==
        1);
}
