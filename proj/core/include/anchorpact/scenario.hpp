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

#pragma once

#include "anchorpact/audit.hpp"
#include "anchorpact/bpee.hpp"
#include "anchorpact/ledger.hpp"
#include "anchorpact/slc.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace anchorpact::scenario {

enum class Fault
{
  Repudiation,
  TamperResponse,
  UnauthorizedEnforce,
  FakeOracle,
  MediatorRemoval,
};

std::string_view to_string(Fault fault) noexcept;
/// Throws Error(ConfigError).
Fault fault_from_string(std::string_view text);

/// Faults the audit is expected to detect from the lead organization's store.
bool is_detectable(Fault fault) noexcept;

struct Excursion
{
  std::int64_t tick{0};
  double       value{0.0};
};

struct ScenarioConfig
{
  std::uint64_t          seed{1};
  double                 temperature_threshold{8.0};
  std::int64_t           delivery_deadline{100};
  double                 penalty_amount{500.0};
  std::int64_t           reading_interval{5};
  std::set<Fault>        faults;
  bpee::TransportOptions transport;

  std::int64_t             delivery_tick{60};
  double                   temperature_baseline{4.0};
  double                   temperature_noise{1.5};
  std::optional<Excursion> excursion;
  std::string              product{"Frozen vaccine batch VX-20"};
  std::int64_t             quantity{120};
  double                   unit_price{12.5};
  std::map<std::string, std::string> identities{{"buyer", "Frost Foods Ltd"},
                                                {"supplier", "Polar Logistics GmbH"},
                                                {"oracle", "ColdTrack Sensor 7731"},
                                                {"mediator", "Maritime Arbitration Chamber"}};
  std::uint64_t          max_ticks{600};
  std::size_t            conflict_threshold{1};
  std::filesystem::path  scenario_dir;

  /// Throws Error(ConfigError).
  void validate() const;
};

/// Parses the YAML config. Relative scenario_dir resolves against `base_dir`.
ScenarioConfig parse_config(std::string_view document, std::filesystem::path const &base_dir = {});
ScenarioConfig load_config(std::filesystem::path const &path);

inline constexpr std::array<char const *, 4> kRoles{"buyer", "supplier", "oracle", "mediator"};

/// Harness-side record of what happened, kept outside the participants.
struct GroundTruthAnchor
{
  std::string role;
  Address     requester;
  Digest      tx_id;
  std::string clause_id;
  Digest      request_digest;
  Digest      response_digest;
};

struct InjectedFault
{
  Fault       fault;
  std::string role;
  Address     address;
};

class GroundTruthLog
{
public:
  void record(std::uint64_t tick, std::string category, std::string text);

  std::vector<std::string> const &lines() const noexcept
  {
    return lines_;
  }
  /// Signature-round step numbers in the order they were logged.
  std::vector<int> const &steps() const noexcept
  {
    return steps_;
  }

  std::vector<GroundTruthAnchor>       anchors;
  std::vector<InjectedFault>           faults;
  std::map<std::int64_t, double>       truth;  // sensor tick -> true temperature

  void step(std::uint64_t tick, int number, std::string text);

private:
  std::vector<std::string> lines_;
  std::vector<int>         steps_;
};

struct RoundOptions
{
  std::optional<std::string> decline_role;
  std::optional<std::string> wrong_key_role;
};

struct RoundResult
{
  Address bsc;
  Digest  signed_hash;
  Bytes   signed_bytes;
};

struct RunArtifacts
{
  std::string                              chain_dump;
  std::map<std::string, std::string>       stores;
  std::map<std::string, Bytes>             slc_exports;
  std::map<std::string, Bytes>             canonical_states;
  std::map<std::string, bsc::ContractState> replica_states;
  std::map<std::string, bpee::ProcessStatus> process_status;
  std::optional<bsc::ContractState>        chain_state;
  std::vector<std::string>                 groundtruth;
  std::string                              audit_report;
  std::size_t                              discrepancies{0};
  std::vector<audit::Attribution>          attributions;
  std::vector<audit::Advisory>             advisories;
  std::optional<Address>                   bsc;
  std::map<std::string, Address>           addresses;
  std::uint64_t                            ticks{0};
};

/// The whole refrigerated-goods run: four participants, one ledger, one bus
/// and a seeded scheduler.
class Simulation
{
public:
  explicit Simulation(ScenarioConfig config);
  ~Simulation();

  Simulation(Simulation const &)            = delete;
  Simulation &operator=(Simulation const &) = delete;

  /// Contract creation and signature. Throws Error(RoundAborted); the BSC
  /// then stays AwaitingSignature.
  RoundResult run_signature_round(RoundOptions const &options = {});

  /// Negotiation, signature (driven by the buyer's process), execution and
  /// a final drain of the bus. Safe to call once.
  void run();

  RunArtifacts artifacts() const;

  ScenarioConfig const &config() const noexcept
  {
    return config_;
  }
  ledger::Ledger &ledger() noexcept;
  ledger::Ledger const &ledger() const noexcept;
  bpee::Participant &participant(std::string_view role);
  bpee::Participant const &participant(std::string_view role) const;
  GroundTruthLog const &groundtruth() const noexcept;
  std::optional<RoundResult> const &round() const noexcept;

  /// Lead organization's store audited against the live chain.
  audit::AuditTrail audit_trail() const;

private:
  struct Impl;
  ScenarioConfig        config_;
  std::unique_ptr<Impl> impl_;
};

RunArtifacts run_scenario(ScenarioConfig const &config);

/// Writes chain.dump, store.<role>.log, slc.<role>.bin, audit.report and
/// groundtruth.log.
void write_artifacts(RunArtifacts const &artifacts, std::filesystem::path const &dir);

/// Per-instance key for `label` under `seed`.
KeyPair instance_key(std::uint64_t seed, std::string_view label);

}  // namespace anchorpact::scenario
