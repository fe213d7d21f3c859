// Command-line front end; all protocol work happens behind the C API.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sharvot.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitProtocol = 2;

int fail(int code, const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return code;
}

std::string slurp(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_run(const std::string& config_path, std::optional<uint64_t> seed,
            const std::string& out_path) {
  bool ok = false;
  std::string config = slurp(config_path, ok);
  if (!ok) return fail(kExitConfig, "cannot read config: " + config_path);

  sharvot_election* e = nullptr;
  if (sharvot_election_create(config.c_str(), &e) != SHARVOT_OK)
    return fail(kExitConfig, sharvot_last_error());
  if (seed && sharvot_election_set_seed(e, *seed) != SHARVOT_OK) {
    sharvot_election_free(e);
    return fail(kExitConfig, sharvot_last_error());
  }
  if (sharvot_election_run(e) != SHARVOT_OK) {
    std::string msg = sharvot_last_error();
    sharvot_election_free(e);
    return fail(kExitProtocol, msg);
  }

  std::string outcome = sharvot_election_outcome(e);
  if (outcome == "winner") {
    std::cout << "winner: " << sharvot_election_winner(e) << "\n";
  } else {
    std::cout << outcome << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << sharvot_election_transcript(e) << "\n";
    if (!out) {
      sharvot_election_free(e);
      return fail(kExitConfig, "cannot write transcript: " + out_path);
    }
  }
  int code = outcome == "abort" ? kExitProtocol : 0;
  sharvot_election_free(e);
  return code;
}

int cmd_shuffle(unsigned n, uint64_t seed) {
  std::vector<std::string> items;
  for (unsigned i = 1; i <= n; ++i) items.push_back("item-" + std::to_string(i));
  std::vector<const uint8_t*> ptrs;
  std::vector<size_t> lens;
  for (const auto& s : items) {
    ptrs.push_back(reinterpret_cast<const uint8_t*>(s.data()));
    lens.push_back(s.size());
  }

  char* raw = nullptr;
  if (sharvot_shuffle_run(ptrs.data(), lens.data(), n, seed, &raw) != SHARVOT_OK)
    return fail(kExitProtocol, sharvot_last_error());
  nlohmann::json j = nlohmann::json::parse(raw);
  sharvot_free(raw);

  std::cout << "inputs:\n";
  for (const auto& s : items) std::cout << "  " << s << "\n";
  std::cout << "hops:\n";
  for (const auto& h : j["hops"])
    std::cout << "  hop " << h["hop"] << ": " << h["from"] << " -> " << h["to"]
              << " (" << h["bytes"] << " bytes on the wire)\n";
  std::cout << "final order:\n";
  std::vector<std::string> out_hex = j["outputs"], in_hex = j["inputs"];
  for (const auto& hex : out_hex) {
    std::string s;
    for (size_t i = 0; i + 1 < hex.size(); i += 2)
      s.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
    std::cout << "  " << s << "\n";
  }
  std::sort(in_hex.begin(), in_hex.end());
  std::sort(out_hex.begin(), out_hex.end());
  std::cout << "multiset preserved: " << (in_hex == out_hex ? "yes" : "NO") << "\n";
  return in_hex == out_hex ? 0 : kExitProtocol;
}

int cmd_inspect(const std::string& hex, const std::string& file) {
  std::string input = hex;
  if (!file.empty()) {
    bool ok = false;
    input = slurp(file, ok);
    if (!ok) return fail(kExitConfig, "cannot read: " + file);
  }
  // tolerate surrounding whitespace in files
  std::erase_if(input, [](unsigned char c) { return std::isspace(c); });
  if (input.empty()) return fail(kExitConfig, "empty script");

  char* report = nullptr;
  if (sharvot_script_inspect(input.c_str(), &report) != SHARVOT_OK)
    return fail(kExitConfig, sharvot_last_error());
  std::cout << report;
  sharvot_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-share e-voting toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, hex, file;
  std::optional<uint64_t> seed_opt;
  uint64_t shuffle_seed = 0;
  unsigned n = 0;

  CLI::App* run = app.add_subcommand("run", "run a seeded election from a config file");
  run->add_option("--config", config_path, "election config (JSON)")->required();
  run->add_option("--seed", seed_opt, "override the config's seed");
  run->add_option("--out", out_path, "write the JSON transcript here");

  CLI::App* shuffle = app.add_subcommand("shuffle", "run a standalone shuffle demo");
  shuffle->add_option("--n", n, "number of participants")
      ->required()
      ->check(CLI::PositiveNumber);
  shuffle->add_option("--seed", shuffle_seed, "root seed");

  CLI::App* inspect = app.add_subcommand("inspect", "disassemble a script");
  auto* hex_opt = inspect->add_option("--hex", hex, "script bytes as hex");
  inspect->add_option("--file", file, "file containing hex")->excludes(hex_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : 0;
  }

  if (run->parsed()) return cmd_run(config_path, seed_opt, out_path);
  if (shuffle->parsed()) return cmd_shuffle(n, shuffle_seed);
  return cmd_inspect(hex, file);
}
