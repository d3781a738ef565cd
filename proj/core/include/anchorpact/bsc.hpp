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

#include "anchorpact/crypto.hpp"
#include "anchorpact/ledger.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace anchorpact::bsc {

enum class ContractState : std::uint8_t
{
  AwaitingSignature,
  InExecution,
  Completed,
  Litigation,
  Terminated,
};

inline constexpr std::array kAllContractStates{
    ContractState::AwaitingSignature, ContractState::InExecution, ContractState::Completed,
    ContractState::Litigation, ContractState::Terminated};

enum class ClauseState : std::uint8_t
{
  Awaiting,
  Enforced,
  Cancelled,
};

enum class Role : std::uint8_t
{
  Organization,
  Oracle,
  Mediator,
};

std::string_view               to_string(ContractState state) noexcept;
std::string_view               to_string(ClauseState state) noexcept;
std::string_view               to_string(Role role) noexcept;
std::optional<ContractState>   contract_state_from_string(std::string_view name) noexcept;
std::optional<ClauseState>     clause_state_from_string(std::string_view name) noexcept;

/// The reference lifecycle: AwaitingSignature->InExecution,
/// InExecution->{Completed, Litigation, Terminated}, Litigation->{InExecution, Terminated}.
bool is_permitted_edge(ContractState from, ContractState to) noexcept;

/// Awaiting->{Enforced, Cancelled} for everyone; {Enforced, Cancelled}->Awaiting
/// only under mediator override.
bool is_permitted_clause_edge(ClauseState from, ClauseState to, bool mediator_override) noexcept;

/// Per-instance obfuscation of contract states: codes[i] is the on-chain
/// integer standing for kAllContractStates[i].
struct StateCodeMap
{
  std::array<std::uint32_t, 5> codes{0, 1, 2, 3, 4};

  std::uint32_t                encode(ContractState state) const noexcept;
  std::optional<ContractState> decode(std::uint32_t code) const noexcept;
  bool                         valid() const noexcept;

  bool operator==(StateCodeMap const &) const = default;
};

struct ClauseMeta
{
  Digest clause_ref;
  bool   completion_required{false};
  bool   oracle_may_enforce{false};

  bool operator==(ClauseMeta const &) const = default;
};

struct ClauseEffect
{
  Digest      clause_ref;
  ClauseState state{ClauseState::Awaiting};

  bool operator==(ClauseEffect const &) const = default;
};

struct ParticipantRegistry
{
  std::set<Address> organizations;
  std::set<Address> oracles;
  std::set<Address> mediators;
  Address           deployer;

  std::optional<Role> role_of(Address const &address) const;
};

struct ClauseRecord
{
  Digest        clause_ref;
  ClauseState   state{ClauseState::Awaiting};
  std::uint64_t last_change_height{0};
  bool          completion_required{false};
  bool          oracle_may_enforce{false};
};

struct AnchorRecord
{
  Digest                 request_digest;
  Digest                 response_digest;
  Address                submitter;
  std::uint64_t          height{0};
  Digest                 tx_id;
  bool                   removed{false};
  std::optional<Address> removed_by;
};

struct ConstructorArgs
{
  std::vector<Address>    organizations;
  std::vector<Address>    oracles;
  std::vector<Address>    mediators;
  std::vector<ClauseMeta> clauses;
  StateCodeMap            state_codes;

  std::vector<Bytes>     encode() const;
  static ConstructorArgs decode(std::vector<Bytes> const &args);
};

/// Builders for the ledger calls understood by the contract.
namespace calls {

ledger::ContractCall deploy(ConstructorArgs const &args);
ledger::ContractCall anchor_slc_hash(Address const &bsc, Digest const &slc_hash);
ledger::ContractCall anchor_message(Address const &bsc, Digest const &request_digest,
                                    Digest const &response_digest,
                                    std::optional<ClauseEffect> const &clause_effect,
                                    std::optional<std::uint32_t> state_effect_code);
ledger::ContractCall raise_litigation(Address const &bsc);
ledger::ContractCall mediator_remove_anchor(Address const &bsc, Digest const &request_digest);
ledger::ContractCall mediator_resolve(Address const &bsc, std::uint32_t outcome_code,
                                      std::vector<ClauseEffect> const &overrides);
ledger::ContractCall complete(Address const &bsc);

}  // namespace calls

/// The on-chain half of the binding. Holds only addresses, digests, heights
/// and opaque state codes.
class Bsc final : public ledger::HostedContract
{
public:
  static constexpr std::string_view kCode = "bsc";

  /// Throws Error(DeployRejected) on empty organizations, overlapping role
  /// sets, duplicate clause refs or an invalid state-code map.
  Bsc(ConstructorArgs const &args, Address const &deployer);

  using Events = std::vector<ledger::EmittedEvent>;

  Events anchor_slc_hash(ledger::CallContext const &ctx, Digest const &digest);
  Events anchor_message(ledger::CallContext const &ctx, Digest const &request_digest,
                        Digest const &response_digest, std::optional<ClauseEffect> const &clause_effect,
                        std::optional<std::uint32_t> state_effect_code);
  Events raise_litigation(ledger::CallContext const &ctx);
  Events mediator_remove_anchor(ledger::CallContext const &ctx, Digest const &request_digest);
  Events mediator_resolve(ledger::CallContext const &ctx, std::uint32_t outcome_code,
                          std::vector<ClauseEffect> const &overrides);
  Events complete(ledger::CallContext const &ctx);

  std::uint32_t state_code() const noexcept
  {
    return codes_.encode(state_);
  }
  ContractState state() const noexcept
  {
    return state_;
  }
  /// True for a non-removed anchor with this request digest.
  bool                             has_anchor(Digest const &request_digest) const;
  AnchorRecord const              *find_anchor(Digest const &request_digest) const;
  AnchorRecord const              *anchor_by_tx(Digest const &tx_id) const;
  /// Throws Error(UnknownClause).
  ClauseRecord const              &get_clause(Digest const &clause_ref) const;
  std::vector<AnchorRecord> const &list_anchors() const noexcept
  {
    return anchors_;
  }
  std::map<Digest, ClauseRecord> const &clauses() const noexcept
  {
    return clauses_;
  }
  ParticipantRegistry const &registry() const noexcept
  {
    return registry_;
  }
  std::optional<Digest> const &slc_hash() const noexcept
  {
    return slc_hash_;
  }
  StateCodeMap const &state_codes() const noexcept
  {
    return codes_;
  }

  std::vector<ledger::EmittedEvent>       execute(ledger::CallContext const &ctx,
                                                  ledger::ContractCall const &call) override;
  Bytes                                   serialize() const override;
  std::unique_ptr<ledger::HostedContract> clone() const override;

private:
  void                 require_role(Address const &caller, std::initializer_list<Role> roles) const;
  void                 require_state(ContractState expected) const;
  ledger::EmittedEvent transition(ContractState to, std::uint64_t height);
  ledger::EmittedEvent change_clause(ClauseRecord &record, ClauseState to, std::uint64_t height);
  bool                 completion_satisfied() const;

  ContractState                  state_{ContractState::AwaitingSignature};
  ParticipantRegistry            registry_;
  std::optional<Digest>          slc_hash_;
  std::map<Digest, ClauseRecord> clauses_;
  std::vector<AnchorRecord>      anchors_;
  StateCodeMap                   codes_;
};

/// Registry exposing the contract code under Bsc::kCode.
ledger::ContractRegistry contract_registry();

}  // namespace anchorpact::bsc
