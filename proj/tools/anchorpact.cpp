//------------------------------------------------------------------------------
//
//   Copyright 2026 The AnchorPact Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------


#include "anchorpact/audit.hpp"
#include "anchorpact/bsc.hpp"
#include "anchorpact/error.hpp"
#include "anchorpact/ledger.hpp"
#include "anchorpact/local_store.hpp"
#include "anchorpact/scenario.hpp"
#include "anchorpact/slc.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>

namespace {

using namespace anchorpact;

constexpr int kExitOk          = 0;
constexpr int kExitMismatch    = 1;
constexpr int kExitDiscrepancy = 2;
constexpr int kExitUsage       = 3;

std::unique_ptr<ledger::Ledger> load_chain(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(Errc::ConfigError, "cannot open " + path);
  }
  return ledger::Ledger::import_dump(in, bsc::contract_registry());
}

int cmd_run(std::string const &config_path, std::string const &out_dir)
{
  auto const config    = scenario::load_config(config_path);
  auto const artifacts = scenario::run_scenario(config);
  scenario::write_artifacts(artifacts, out_dir);
  std::cout << "state " << (artifacts.chain_state ? bsc::to_string(*artifacts.chain_state) : "undeployed")
            << "\ndiscrepancies " << artifacts.discrepancies << "\nticks " << artifacts.ticks << '\n';
  for (auto const &[role, status] : artifacts.process_status)
  {
    std::cout << "process " << role << ' ' << bpee::to_string(status) << '\n';
  }
  return artifacts.discrepancies == 0 ? kExitOk : kExitDiscrepancy;
}

int cmd_audit(std::string const &store_path, std::string const &chain_path, std::string const &out_path)
{
  auto const store  = audit::LocalStore::load(store_path);
  auto const chain  = load_chain(chain_path);
  auto const trail  = audit::reconstruct(store, *chain);
  auto const report = audit::verify(trail);
  auto const blame  = audit::attribute(report, trail.registry);
  std::ofstream out{out_path, std::ios::trunc};
  if (!out)
  {
    throw Error(Errc::ConfigError, "cannot write " + out_path);
  }
  audit::write_report(out, trail, report, blame);
  std::cout << trail.entries.size() << " entries, " << report.discrepancies.size() << " discrepancies\n";
  return report.discrepancies.empty() ? kExitOk : kExitDiscrepancy;
}

int cmd_verify(std::string const &slc_path, std::string const &chain_path)
{
  std::ifstream in{slc_path, std::ios::binary};
  if (!in)
  {
    throw Error(Errc::ConfigError, "cannot open " + slc_path);
  }
  Bytes const raw{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
  auto const chain = load_chain(chain_path);
  std::optional<slc::SlcInstance> decoded;
  try
  {
    decoded = slc::SlcInstance::from_signed_bytes(raw);
  }
  catch (Error const &e)
  {
    std::cout << "MISMATCH\n";
    std::cerr << "contract export does not decode: " << e.what() << '\n';
    return kExitMismatch;
  }
  auto const &instance = *decoded;

  bool match = false;
  if (instance.bsc_address() && chain->has_contract(*instance.bsc_address()))
  {
    auto const anchored = chain->inspect<bsc::Bsc>(*instance.bsc_address(),
                                                   [](bsc::Bsc const &c) { return c.slc_hash(); });
    match = anchored && instance.verify_instance(*anchored);
  }
  std::cout << (match ? "MATCH" : "MISMATCH") << '\n';
  return match ? kExitOk : kExitMismatch;
}

int cmd_keys(std::uint64_t seed, std::size_t count)
{
  for (std::size_t i = 0; i < count; ++i)
  {
    auto const key = scenario::instance_key(seed, "key/" + std::to_string(i));
    std::cout << i << ' ' << key.address.hex() << ' ' << key.public_key.hex() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"AnchorPact contract-binding simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, store_path, chain_path, out_path, slc_path;
  std::uint64_t seed{0};
  std::size_t   count{1};

  auto *run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("--config", config_path, "Scenario config (YAML)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto *aud = app.add_subcommand("audit", "Reconstruct and verify a trail from a store and a chain dump");
  aud->add_option("--store", store_path, "Local store log")->required();
  aud->add_option("--chain", chain_path, "Chain dump")->required();
  aud->add_option("--out", out_path, "Report file")->required();

  auto *ver = app.add_subcommand("verify", "Check an SLC export against the anchored hash");
  ver->add_option("--slc", slc_path, "SLC export")->required();
  ver->add_option("--chain", chain_path, "Chain dump")->required();

  auto *keys = app.add_subcommand("keys", "Derive per-instance keys");
  keys->add_option("--seed", seed, "Root seed")->required();
  keys->add_option("--count", count, "How many keys")->check(CLI::Range(1, 1 << 20));

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return kExitUsage;
  }

  try
  {
    if (run->parsed())
    {
      return cmd_run(config_path, out_dir);
    }
    if (aud->parsed())
    {
      return cmd_audit(store_path, chain_path, out_path);
    }
    if (ver->parsed())
    {
      return cmd_verify(slc_path, chain_path);
    }
    return cmd_keys(seed, count);
  }
  catch (anchorpact::Error const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
