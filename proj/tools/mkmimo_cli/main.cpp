#include <cstdint>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"

namespace {

constexpr const char* kExperiments[] = {"sample",  "outage",  "approx",  "measure",
                                        "converge", "telatar", "schedule"};

constexpr const char* kDescriptions[] = {
    "Monte Carlo capacity samples of one multi-keyhole channel",
    "outage capacity curves across Tx array sizes, with the equivalent-channel reference",
    "closed-form Gaussian capacity moments and outage quantities over an SNR grid",
    "correlation and power-imbalance measures of a correlation model",
    "limit-theorem and lemma convergence experiments",
    "outage-minimizing active-antenna sweep",
    "multi-user scheduling, relay throughput, and feedback-length formulas",
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-keyhole MIMO channel experiments"};
  app.require_subcommand(1);

  struct Flags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::string out;
    bool bits = false;
    bool seed_set = false;
    bool trials_set = false;
    bool out_set = false;
  };
  std::vector<Flags> flags(std::size(kExperiments));

  for (std::size_t i = 0; i < std::size(kExperiments); ++i) {
    CLI::App* sub = app.add_subcommand(kExperiments[i], kDescriptions[i]);
    Flags& f = flags[i];
    sub->add_option("config", f.config_path, "experiment config file (JSON)")->required();
    sub->add_option("--seed", f.seed, "override the config seed")
        ->each([&f](const std::string&) { f.seed_set = true; });
    sub->add_option("--trials", f.trials, "override the config trial count")
        ->each([&f](const std::string&) { f.trials_set = true; });
    sub->add_option("--out", f.out, "override the config output path prefix")
        ->each([&f](const std::string&) { f.out_set = true; });
    sub->add_flag("--bits", f.bits, "emit bits instead of nats (display conversion only)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;  // command-line misuse is a config error
  }

  mkmimo::cli::RunOptions options;
  for (std::size_t i = 0; i < std::size(kExperiments); ++i) {
    if (app.get_subcommand(kExperiments[i])->parsed()) {
      options.experiment = kExperiments[i];
      options.config_path = flags[i].config_path;
      if (flags[i].seed_set) options.seed = flags[i].seed;
      if (flags[i].trials_set) options.trials = flags[i].trials;
      if (flags[i].out_set) options.out = flags[i].out;
      options.bits = flags[i].bits;
    }
  }

  try {
    mkmimo::cli::run_experiment(options);
  } catch (const mkmimo::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
