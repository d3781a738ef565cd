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

#include "anchorpact/bsc.hpp"
#include "anchorpact/codec.hpp"
#include "anchorpact/crypto.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace anchorpact::slc {

/// Parameter and variable values.
using Value = std::variant<std::int64_t, double, std::string>;

void        encode_value(codec::Writer &out, Value const &value);
Value       decode_value(codec::Reader &in);
std::string value_to_string(Value const &value);
/// Numeric view of integer or double values; nullopt for strings.
std::optional<double> as_number(Value const &value) noexcept;

using ValueMap = std::map<std::string, Value, std::less<>>;

struct Placeholder
{
  std::string name;
  // party | text | celsius | amount | ticks
  std::string type;

  bool operator==(Placeholder const &) const = default;
};

struct ParameterSpec
{
  std::string name;
  // integer | number | text
  std::string type;

  bool operator==(ParameterSpec const &) const = default;
};

struct ClauseSpec
{
  std::string                id;
  std::string                title;
  std::string                logic;
  bool                       completion_required{false};
  bool                       oracle_may_enforce{false};
  std::vector<ParameterSpec> parameters;

  bool operator==(ClauseSpec const &) const = default;
};

struct LegalContractTemplate
{
  std::string              name;
  std::string              text;
  std::vector<Placeholder> placeholders;
  std::vector<ClauseSpec>  clauses;

  /// Placeholders referenced as {{name}} in the text must match the declared
  /// list exactly; clause ids unique. Throws Error(TemplateError).
  void validate() const;

  ClauseSpec const  *clause(std::string_view id) const noexcept;
  Placeholder const *placeholder(std::string_view name) const noexcept;

  void                         encode(codec::Writer &out) const;
  static LegalContractTemplate decode(codec::Reader &in);

  bool operator==(LegalContractTemplate const &) const = default;
};

/// YAML template document with `name`, `placeholders`, `clauses`, `text`.
LegalContractTemplate parse_template(std::string_view document);
LegalContractTemplate load_template(std::filesystem::path const &path);

/// Converts textual bindings to typed values according to placeholder types.
ValueMap bind_static_data(LegalContractTemplate const &tmpl,
                          std::map<std::string, std::string> const &raw);

/// Confidential identity-to-address binding.
struct Party
{
  bsc::Role   role{bsc::Role::Organization};
  std::string identity;
  Address     address;
  PublicKey   public_key;

  bool operator==(Party const &) const = default;
};

struct ClauseRequest
{
  std::string   clause_id;
  Address       requester;
  ValueMap      parameters;
  std::uint64_t nonce{0};

  Bytes                encode() const;
  static ClauseRequest decode(ByteView raw);

  bool operator==(ClauseRequest const &) const = default;
};

enum class ResponseStatus : std::uint8_t
{
  Enforced,
  Rejected,
};

enum class RejectReason : std::uint8_t
{
  None,
  WrongState,
  UnauthorizedRequester,
  PreconditionFailed,
  UnknownClause,
  StaleNonce,
  MalformedRequest,
};

std::string_view to_string(RejectReason reason) noexcept;

struct Effects
{
  std::optional<std::pair<std::string, bsc::ClauseState>> clause;
  std::optional<bsc::ContractState>                       contract;
  ValueMap                                                variables;

  bool empty() const noexcept
  {
    return !clause && !contract && variables.empty();
  }

  bool operator==(Effects const &) const = default;
};

struct ClauseResponse
{
  ResponseStatus status{ResponseStatus::Rejected};
  RejectReason   reason{RejectReason::None};
  Effects        effects;
  std::string    explanation;

  static ClauseResponse enforced(Effects effects, std::string explanation);
  static ClauseResponse rejected(RejectReason reason, std::string explanation);

  Bytes                 encode() const;
  static ClauseResponse decode(ByteView raw);

  bool operator==(ClauseResponse const &) const = default;
};

/// Contract changes that originate on-chain rather than from a clause
/// request: activation after the signed hash is anchored, litigation,
/// mediator resolution and anchor removal. Mirrored by every replica in
/// chain order.
struct OnChainChange
{
  std::string                                        origin;
  std::optional<bsc::ContractState>                  contract;
  std::vector<std::pair<std::string, bsc::ClauseState>> clauses;
  std::optional<Digest>                              removed_request;

  void encode(codec::Writer &out) const;

  bool operator==(OnChainChange const &) const = default;
};

class SlcInstance;

struct LogicContext
{
  SlcInstance const   &instance;
  ClauseSpec const    &clause;
  ClauseRequest const &request;
  Party const         &requester;
};

using LogicFunction = std::function<ClauseResponse(LogicContext const &)>;

/// Native clause-logic handlers keyed by logic-function id.
class LogicRegistry
{
public:
  void                 add(std::string id, LogicFunction fn);
  LogicFunction const *find(std::string_view id) const noexcept;

  /// Registry holding the built-in cold-chain logic library.
  static std::shared_ptr<LogicRegistry const> standard();

private:
  std::map<std::string, LogicFunction, std::less<>> functions_;
};

/// Off-chain smart legal contract replica.
class SlcInstance
{
public:
  /// Throws Error(MissingBinding), Error(TemplateError) or Error(NoOrganizations).
  static SlcInstance instantiate(LegalContractTemplate tmpl, ValueMap static_data,
                                 std::vector<Party> parties, std::uint64_t seed,
                                 std::shared_ptr<LogicRegistry const> logic = LogicRegistry::standard());

  /// Reconstructs an instance from its exported signed form.
  static SlcInstance from_signed_bytes(ByteView raw,
                                       std::shared_ptr<LogicRegistry const> logic = LogicRegistry::standard());

  LegalContractTemplate const &contract_template() const noexcept
  {
    return template_;
  }
  ValueMap const &static_data() const noexcept
  {
    return static_data_;
  }
  std::vector<Party> const &parties() const noexcept
  {
    return parties_;
  }
  std::optional<Address> const &bsc_address() const noexcept
  {
    return bsc_address_;
  }
  bsc::StateCodeMap const &state_codes() const noexcept
  {
    return state_codes_;
  }
  Bytes const &salt() const noexcept
  {
    return salt_;
  }
  std::map<Address, Signature> const &signatures() const noexcept
  {
    return signatures_;
  }

  Party const *party(Address const &address) const noexcept;
  Party const *party_by_identity(std::string_view identity) const noexcept;
  /// Address bound to a party-typed placeholder.
  std::optional<Address> placeholder_party(std::string_view placeholder) const;

  void set_bsc_address(Address const &address);

  /// Opaque on-chain reference of a clause: hash of its spec and the salt.
  Digest                     clause_ref(std::string_view clause_id) const;
  std::optional<std::string> clause_id_for(Digest const &clause_ref) const;
  bsc::ConstructorArgs       constructor_args() const;

  /// Throws Error(BscAddressUnset).
  Bytes signable_payload() const;
  /// Throws Error(UnknownParty) or Error(BadSignature).
  void add_signature(Address const &address, Signature const &sig);
  bool is_fully_signed() const noexcept;
  /// Throws Error(NotFullySigned).
  Digest signed_hash() const;
  /// Canonical export; its hash equals signed_hash().
  Bytes signed_bytes() const;
  bool  verify_instance(Digest const &reference) const noexcept;

  // Dynamic data.
  bsc::ContractState contract_state() const noexcept
  {
    return contract_state_;
  }
  bsc::ClauseState clause_state(std::string_view clause_id) const;
  ValueMap const  &variables() const noexcept
  {
    return variables_;
  }
  std::optional<Value> variable(std::string_view name) const;
  std::optional<Value> static_value(std::string_view name) const;
  std::uint64_t        last_nonce(Address const &requester) const noexcept;

  using LogEntry = std::pair<ClauseRequest, ClauseResponse>;
  std::vector<LogEntry> const &request_log() const noexcept
  {
    return request_log_;
  }
  std::vector<OnChainChange> const &onchain_log() const noexcept
  {
    return onchain_log_;
  }

  /// Pure evaluation against the current state.
  ClauseResponse evaluate(ClauseRequest const &request) const;
  /// Evaluates and, when Enforced, applies effects and appends to the log.
  /// Throws Error(NotFullySigned) on an unsigned instance.
  ClauseResponse execute_request(ClauseRequest const &request);
  /// Re-executes a peer's request; throws Error(StaleRequest) or
  /// Error(DivergentResponse) and leaves the instance unchanged.
  void apply_remote(ClauseRequest const &request, ClauseResponse const &response);

  void apply_onchain(OnChainChange const &change);

  /// Signed section plus dynamic data and both logs.
  Bytes canonical_state() const;

private:
  SlcInstance() = default;

  void  encode_signable(codec::Writer &out) const;
  void  apply_effects(ClauseRequest const &request, Effects const &effects);

  std::shared_ptr<LogicRegistry const> logic_;
  LegalContractTemplate                template_;
  ValueMap                             static_data_;
  std::vector<Party>                   parties_;
  std::optional<Address>               bsc_address_;
  bsc::StateCodeMap                    state_codes_;
  Bytes                                salt_;
  std::map<Address, Signature>         signatures_;

  bsc::ContractState                      contract_state_{bsc::ContractState::AwaitingSignature};
  std::map<std::string, bsc::ClauseState> clause_states_;
  ValueMap                                variables_;
  std::map<Address, std::uint64_t>       last_nonce_;
  std::vector<LogEntry>                   request_log_;
  std::vector<OnChainChange>              onchain_log_;
};

}  // namespace anchorpact::slc
