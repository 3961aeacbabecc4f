#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddsim/cli.hpp"
#include "ddsim/config.hpp"
#include "ddsim/csv.hpp"

using namespace ddsim;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "ddsim_test";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv = {"ddsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return ddsim::cli::cli_run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("parse_config: defaults fill a minimal config") {
  const auto cfg = parse_config("[model]\nkind = gaussian\n\n[sequence]\nfamily = udd\n");
  CHECK(cfg.numerics.k_max == 200);
  CHECK(cfg.numerics.trials == 20000);
  CHECK(cfg.numerics.seed == 0);
  CHECK(cfg.model.tau_b == 110.0);
  CHECK(cfg.sweep.cycle_times == std::vector<double>{400.0, 600.0, 900.0});
}

TEST_CASE("parse_config: diagnostics") {
  SECTION("negative tau_b names the key") {
    try {
      parse_config("[model]\ntau_b = -4\n");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("tau_b") != std::string::npos);
    }
  }

  SECTION("duplicate key is a parse error with a line number") {
    try {
      parse_config("[model]\ntau_b = 4\ntau_b = 5\n");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
  }

  SECTION("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse_config("[model]\nbanana = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[fruit]\nk = 1\n"), config_error);
  }

  SECTION("malformed lines carry positions") {
    try {
      parse_config("[model]\nthis line has no equals\n");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(e.line() == 2);
    }
  }

  SECTION("non-numeric values are rejected") {
    CHECK_THROWS_AS(parse_config("[model]\ntau_b = five\n"), config_error);
    CHECK_THROWS_AS(parse_config("[numerics]\nk_max = 2.5\n"), config_error);
  }
}

TEST_CASE("config round trip: parse(print(cfg)) == cfg") {
  RunConfig cfg;
  cfg.model.kind = SpectrumKind::lorentzian;
  cfg.model.tau_b = 93.0625;
  cfg.model.b_se = 0.0123456789012345;
  cfg.sequence.family = SequenceFamily::custom;
  cfg.sequence.order = 3;
  cfg.sequence.cycle_time = 601.25;
  cfg.sequence.pulse_times = {88.0 / 7.0, 300.1, 452.75};
  cfg.numerics.seed = 123456789012345ull;
  cfg.numerics.fit_t_min = 432.1;
  cfg.output.path = "out.csv";
  const RunConfig round = parse_config(print_config(cfg));
  CHECK(round == cfg);

  const RunConfig dflt;
  CHECK(parse_config(print_config(dflt)) == dflt);
}

TEST_CASE("sequence block serialization is lossless") {
  const auto seq = custom_sequence({1.0 / 3.0, 245.00000000000003, 571.125}, 600.0);
  const auto back = parse_sequence_block(print_sequence_block(seq));
  REQUIRE(back.pulse_times.size() == seq.pulse_times.size());
  for (std::size_t i = 0; i < seq.pulse_times.size(); ++i)
    CHECK(back.pulse_times[i] == seq.pulse_times[i]);  // bit-exact via %.17g
  CHECK(back.cycle_time == seq.cycle_time);

  const auto udd = udd_times(7, 771.4);
  const auto udd_back = parse_sequence_block(print_sequence_block(udd));
  CHECK(udd_back.label == "UDD");
  REQUIRE(udd_back.order == 7);
  for (int i = 0; i < 7; ++i) CHECK(udd_back.pulse_times[i] == udd.pulse_times[i]);
}

TEST_CASE("csv writer output shape") {
  std::ostringstream out;
  CsvWriter w(out);
  w.comment("seed = 7");
  w.header({"t", "chi", "survival"});
  w.row({1.0, 0.123456789012345, 0.5});
  w.close();
  const std::string text = out.str();
  CHECK(text.find("# seed = 7\n") != std::string::npos);
  CHECK(text.find("t,chi,survival\n") != std::string::npos);
  CHECK(text.find("1,0.123456789012,0.5\n") != std::string::npos);  // 12 significant digits
}

TEST_CASE("two-column csv reader") {
  const auto dir = temp_dir();
  const auto good = dir / "spec.csv";
  write_file(good, "omega,s\n0.0,1.0\n0.1,0.9\n0.2,0.5\n# comment\n0.3,0.1\n");
  std::vector<double> w, s;
  read_two_column_csv(good.string(), w, s);
  REQUIRE(w.size() == 4);
  CHECK(w[3] == 0.3);
  CHECK(s[2] == 0.5);

  const auto bad = dir / "bad.csv";
  write_file(bad, "0.0,1.0\nnot numbers here at line two\n");
  std::vector<double> w2, s2;
  CHECK_THROWS_AS(read_two_column_csv(bad.string(), w2, s2), io_error);
  CHECK_THROWS_AS(read_two_column_csv((dir / "missing.csv").string(), w2, s2), io_error);
}

TEST_CASE("cli end to end: decay run and exit codes") {
  const auto dir = temp_dir();
  const auto cfg_path = dir / "run.cfg";
  const auto out_path = dir / "decay.csv";
  write_file(cfg_path,
             "[model]\nkind = gaussian\ntau_b = 5\nb_se = 0.1\n"
             "[sequence]\nfamily = cpmg\norder = 2\ncycle_time = 10\n"
             "[decay]\ncycles = 1 2 3\n");

  SECTION("successful run writes CSV and manifest, stdout stays clean") {
    const int rc = run_cli({"decay", "--config", cfg_path.string(), "--out", out_path.string()});
    CHECK(rc == 0);
    const std::string csv = read_file(out_path);
    CHECK(csv.find("t,chi,survival\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 4);
    const std::string manifest = read_file(out_path.string() + ".manifest");
    CHECK(manifest.find("seed = 0") != std::string::npos);
    CHECK(manifest.find("[model]") != std::string::npos);
    CHECK(manifest.find("wall_time_s") != std::string::npos);
  }

  SECTION("config errors exit with 2") {
    const auto bad_cfg = dir / "bad.cfg";
    write_file(bad_cfg, "[model]\ntau_b = -1\n");
    CHECK(run_cli({"decay", "--config", bad_cfg.string()}) == 2);
    CHECK(run_cli({"decay", "--config", (dir / "nope.cfg").string()}) == 2);
    CHECK(run_cli({"decay"}) == 2);  // missing --config
  }

  SECTION("numerical failures exit with 3") {
    const auto hard_cfg = dir / "hard.cfg";
    write_file(hard_cfg,
               "[model]\nkind = gaussian\ntau_b = 5\nb_se = 0.1\n"
               "[sequence]\nfamily = cpmg\norder = 2\ncycle_time = 10\n"
               "[decay]\ncycles = 20\n"
               "[numerics]\nmax_panels = 4\n");
    CHECK(run_cli({"decay", "--config", hard_cfg.string()}) == 3);
  }

  SECTION("seed override lands in the manifest") {
    const auto out2 = dir / "mc.csv";
    write_file(dir / "mc.cfg",
               "[model]\nkind = gaussian\ntau_b = 5\nb_se = 0.1\n"
               "[sequence]\nfamily = cpmg\norder = 2\ncycle_time = 1\n"
               "[mc]\ncycles = 1\n[numerics]\ntrials = 1000\n");
    const int rc = run_cli({"mc", "--config", (dir / "mc.cfg").string(), "--out",
                            out2.string(), "--seed", "424242"});
    CHECK(rc == 0);
    const std::string csv = read_file(out2);
    CHECK(csv.find("# seed = 424242") != std::string::npos);
    CHECK(csv.find("t,survival,stderr,trials") != std::string::npos);
  }
}

TEST_CASE("cli filter subcommand emits the spectral columns") {
  const auto dir = temp_dir();
  write_file(dir / "filter.cfg",
             "[sequence]\nfamily = udd\norder = 4\ncycle_time = 100\n"
             "[filter]\nmode = repeated\ncycles = 6\nomega_min = 0\nomega_max = 1\n"
             "omega_count = 16\n");
  const auto out = dir / "filter.csv";
  CHECK(run_cli({"filter", "--config", (dir / "filter.cfg").string(), "--out", out.string()}) == 0);
  const std::string csv = read_file(out);
  CHECK(csv.find("omega,re_f,im_f,abs2\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}
