#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harness/conformance.hpp"
#include "harness/examples.hpp"

namespace {

std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw choreo::Error(choreo::ErrorCode::kConfigError, "'" + item + "' is not an integer");
    }
  }
  return out;
}

std::string self_path(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Choreographic programming runtime and examples"};
  app.require_subcommand(1);

  harness::RunConfig config;
  std::string mode = "centralized";
  std::string config_path, script_path, circuit, inputs, fail_backups, rho, secrets, report_path, tamper;

  auto* run = app.add_subcommand("run", "Run one example");
  run->add_option("--example", config.example, "Example name")->required();
  run->add_option("--mode", mode, "centralized | simulate | endpoint");
  run->add_option("--seed", config.seed, "RNG and scheduler seed");
  run->add_option("--role", config.role, "Location to play in endpoint mode");
  run->add_option("--config", config_path, "JSON address book for endpoint mode");
  run->add_option("--script", script_path, "KVS request script");
  run->add_option("--circuit", circuit, "GMW circuit as an s-expression");
  run->add_option("--inputs", inputs, "Input bits, e.g. p1=1,p2=0 (ot2: b1, b2, s)");
  run->add_option("--parties", config.parties, "GMW party count");
  run->add_option("--backups", config.backups, "kvs-poly backup count");
  run->add_option("--servers", config.servers, "Lottery server count");
  run->add_option("--clients", config.clients, "Lottery client count");
  run->add_option("--secrets", secrets, "Lottery client secrets, comma separated");
  run->add_option("--rho", rho, "Fixed lottery server draws, comma separated");
  run->add_option("--tamper", tamper, "Lottery server that alters its opened value");
  run->add_option("--fail-backup", fail_backups, "Backups that reject Puts, comma separated");
  run->add_option("--fail-after", config.fail_after, "Request index from which backups fail");
  run->add_option("--step-budget", config.step_budget, "Simulator steps per endpoint");
  run->add_option("--report", report_path, "Write the message and branch log here");

  auto* count = app.add_subcommand("count-messages", "Compare broadcast and enclave KVS message totals");
  count->add_option("--script", script_path, "KVS request script")->required();
  count->add_option("--seed", config.seed, "Seed");

  std::string suite = "all";
  std::vector<std::size_t> parties;
  int gmw_seeds = 5;
  auto* conformance = app.add_subcommand("conformance", "Run acceptance suites");
  conformance->add_option("--suite", suite, "Suite name, negative-control, or all");
  conformance->add_option("--parties", parties, "GMW party counts");
  conformance->add_option("--gmw-seeds", gmw_seeds, "Seeds per GMW circuit and input");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      config.mode = harness::parse_mode(mode);
      if (!config_path.empty()) config.address_book = harness::load_address_book(config_path);
      if (!script_path.empty()) config.script = protocols::parse_script(harness::read_file(script_path));
      if (!circuit.empty()) config.circuit = circuit;
      if (!inputs.empty()) config.inputs = harness::parse_inputs(inputs);
      if (!secrets.empty()) config.secrets = parse_ints(secrets);
      if (!rho.empty()) config.rho = parse_ints(rho);
      if (!tamper.empty()) config.tamper_server = tamper;
      std::stringstream names(fail_backups);
      for (std::string name; std::getline(names, name, ',');) {
        if (!name.empty()) config.failing_backups.insert(name);
      }
      auto report = harness::run_example(config);
      std::cout << harness::format_results(report);
      if (!report_path.empty()) std::ofstream(report_path) << report.to_text();
      return report.ok() ? 0 : 1;
    }
    if (*count) {
      config.script = protocols::parse_script(harness::read_file(script_path));
      config.example = "kvs-broadcast";
      auto broadcast = harness::build_example(config).centralized(config.seed);
      config.example = "kvs-enclave";
      auto enclave = harness::build_example(config).centralized(config.seed);
      std::cout << "broadcast: " << broadcast.message_count() << "\nenclave: " << enclave.message_count()
                << "\ndelta: " << broadcast.message_count() - enclave.message_count() << '\n';
      return broadcast.ok() && enclave.ok() ? 0 : 1;
    }
    if (*conformance) {
      harness::ConformanceOptions options;
      options.cli_path = self_path(argv[0]);
      if (!parties.empty()) options.gmw_parties = parties;
      options.gmw_seeds = gmw_seeds;
      harness::Conformance c(options);
      bool all = true;
      for (const auto& r : c.run(suite)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " [" << r.seconds << "s] " << r.detail << '\n';
        all = all && r.passed;
      }
      // A caught negative control is still a run that raised errors: exit 1.
      // Exit 2 means the broken choreography went undetected.
      if (suite == "negative-control") return all ? 1 : 2;
      return all ? 0 : 1;
    }
  } catch (const choreo::Error& e) {
    std::cerr << "error " << choreo::error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
