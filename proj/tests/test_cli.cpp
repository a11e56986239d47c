#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

const std::string cli = MKMIMO_CLI_BINARY;

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p =
        fs::temp_directory_path() / ("mkmimo_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run(const std::string& args, const fs::path& stderr_file = {}) {
  std::string cmd = cli + " " + args;
  if (!stderr_file.empty()) cmd += " 2>" + stderr_file.string();
  cmd += " >/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string summary_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string prefix = key + " = ";
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return {};
}

// Cell (row, col) of a CSV body, header excluded.
double csv_cell(const std::string& text, std::size_t row, std::size_t col) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t i = 0; i <= row + 1; ++i) REQUIRE(std::getline(in, line));
  std::istringstream cells(line);
  std::string cell;
  for (std::size_t i = 0; i <= col; ++i) REQUIRE(std::getline(cells, cell, ','));
  return std::stod(cell);
}

const char* outage_config = R"({
  "experiment": "outage",
  "seed": 4242,
  "trials": 2000,
  "out": "OUT",
  "params": {
    "n_t_list": [2, 4],
    "n_r": 2,
    "gains": {"equal": 2},
    "tx_corr": {"kind": "exponential", "r": 0.5},
    "rx_corr": {"kind": "exponential", "r": 0.5},
    "snr": 100.0,
    "grid_points": 50
  }
})";

std::string config_with_out(std::string text, const fs::path& out) {
  const std::string marker = "OUT";
  text.replace(text.find(marker), marker.size(), out.string());
  return text;
}

}  // namespace

TEST_CASE("outage runs are byte-identical across reruns and worker counts") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "outage.json";
  write_file(cfg, config_with_out(outage_config, dir / "run1"));

  REQUIRE(run("outage " + cfg.string()) == 0);
  const std::string csv1 = read_file(dir / "run1.csv");
  const std::string txt1 = read_file(dir / "run1.txt");

  CHECK(first_line(csv1) == "rate_nats,cdf_nt2,cdf_nt4,cdf_equivalent");
  CHECK(summary_value(txt1, "seed") == "4242");
  CHECK(summary_value(txt1, "n_trials") == "2000");
  CHECK(summary_value(txt1, "config_digest").size() == 16);

  REQUIRE(run("outage " + cfg.string() + " --out " + (dir / "run2").string()) == 0);
  CHECK(read_file(dir / "run2.csv") == csv1);

  const std::string env_cmd = "MKMIMO_WORKERS=3 " + cli + " outage " + cfg.string() + " --out " +
                              (dir / "run3").string() + " >/dev/null";
  const int status = std::system(env_cmd.c_str());
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == 0);
  CHECK(read_file(dir / "run3.csv") == csv1);
  // the digest identifies the numbers, not the output destination
  CHECK(summary_value(read_file(dir / "run3.txt"), "config_digest") ==
        summary_value(txt1, "config_digest"));
}

TEST_CASE("flag overrides take effect and change the config digest") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "outage_override.json";
  write_file(cfg, config_with_out(outage_config, dir / "base"));

  REQUIRE(run("outage " + cfg.string()) == 0);
  const std::string base = read_file(dir / "base.txt");

  REQUIRE(run("outage " + cfg.string() + " --out " + (dir / "override").string() +
              " --seed 777 --trials 1000") == 0);
  const std::string other = read_file(dir / "override.txt");
  CHECK(summary_value(other, "seed") == "777");
  CHECK(summary_value(other, "n_trials") == "1000");
  CHECK(summary_value(other, "config_digest") != summary_value(base, "config_digest"));
}

TEST_CASE("missing required key exits with status 2 naming the key") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "missing_nt.json";
  write_file(cfg, config_with_out(R"({
    "experiment": "sample",
    "out": "OUT",
    "params": {
      "n_r": 2,
      "gains": {"equal": 2},
      "tx_corr": {"kind": "identity"},
      "rx_corr": {"kind": "identity"},
      "snr": 1.0
    }
  })",
                                  dir / "missing_nt"));
  const fs::path err = dir / "missing_nt.err";
  CHECK(run("sample " + cfg.string(), err) == 2);
  CHECK(read_file(err).find("n_t") != std::string::npos);
}

TEST_CASE("unknown keys and malformed json exit with status 2") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "unknown_key.json";
  write_file(cfg, config_with_out(R"({
    "experiment": "measure",
    "out": "OUT",
    "params": {"kind": "identity", "n": 4, "bogus": 1}
  })",
                                  dir / "unknown_key"));
  const fs::path err = dir / "unknown_key.err";
  CHECK(run("measure " + cfg.string(), err) == 2);
  CHECK(read_file(err).find("bogus") != std::string::npos);

  const fs::path broken = dir / "broken.json";
  write_file(broken, "{\"experiment\": ");
  CHECK(run("sample " + broken.string()) == 2);

  // config experiment and subcommand must agree
  write_file(cfg, config_with_out(R"({
    "experiment": "measure",
    "out": "OUT",
    "params": {"kind": "identity", "n": 4}
  })",
                                  dir / "unknown_key"));
  CHECK(run("telatar " + cfg.string()) == 2);
}

TEST_CASE("numeric domain failures exit with status 1") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "feedback_domain.json";
  write_file(cfg, config_with_out(R"({
    "experiment": "schedule",
    "out": "OUT",
    "params": {
      "mu": 2.0,
      "sigma": 0.5,
      "k_users": [4],
      "feedback": {"granularity": 0.05, "outage_target": 0.7}
    }
  })",
                                  dir / "feedback_domain"));
  const fs::path err = dir / "feedback_domain.err";
  CHECK(run("schedule " + cfg.string(), err) == 1);
  CHECK(read_file(err).find("outage_target") != std::string::npos);
}

TEST_CASE("the bits flag renames columns and rescales by ln 2") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "approx.json";
  write_file(cfg, config_with_out(R"({
    "experiment": "approx",
    "out": "OUT",
    "params": {
      "family": "frmk",
      "n_t": 4,
      "n_r": 2,
      "tx_corr": {"kind": "exponential", "r": 0.5},
      "rx_corr": {"kind": "identity"},
      "snr_grid": {"values": [1.0, 10.0]}
    }
  })",
                                  dir / "nats"));
  REQUIRE(run("approx " + cfg.string()) == 0);
  REQUIRE(run("approx " + cfg.string() + " --bits --out " + (dir / "bits").string()) == 0);

  const std::string nats_csv = read_file(dir / "nats.csv");
  const std::string bits_csv = read_file(dir / "bits.csv");
  CHECK(first_line(nats_csv) ==
        "gamma0,eq14_mu_nats,eq15_sigma2_nats2,eq16_mu_low_snr_nats,eq17_sigma2_low_snr_nats2");
  CHECK(first_line(bits_csv) ==
        "gamma0,eq14_mu_bits,eq15_sigma2_bits2,eq16_mu_low_snr_bits,eq17_sigma2_low_snr_bits2");

  const double ln2 = 0.6931471805599453;
  CHECK(csv_cell(bits_csv, 0, 0) == doctest::Approx(csv_cell(nats_csv, 0, 0)));  // gamma0 untouched
  CHECK(csv_cell(bits_csv, 0, 1) == doctest::Approx(csv_cell(nats_csv, 0, 1) / ln2).epsilon(1e-12));
  CHECK(csv_cell(bits_csv, 1, 2) ==
        doctest::Approx(csv_cell(nats_csv, 1, 2) / (ln2 * ln2)).epsilon(1e-12));
}

TEST_CASE("help exits cleanly") { CHECK(run("--help") == 0); }
