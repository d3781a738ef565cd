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

#include "anchorpact/bsc.hpp"

#include "anchorpact/codec.hpp"
#include "anchorpact/error.hpp"

#include <algorithm>

namespace anchorpact::bsc {
namespace {

using ledger::EmittedEvent;
using ledger::EventKind;

Bytes encode_addresses(std::vector<Address> const &addresses)
{
  codec::Writer out;
  out.u64(addresses.size());
  for (auto const &a : addresses)
  {
    out.fixed(a);
  }
  return out.take();
}

std::vector<Address> decode_addresses(ByteView raw)
{
  codec::Reader        in{raw};
  std::vector<Address> out(in.count());
  for (auto &a : out)
  {
    a = in.fixed<Address::size, AddressTag>();
  }
  in.expect_end();
  return out;
}

Bytes encode_clause_effects(std::vector<ClauseEffect> const &effects)
{
  codec::Writer out;
  out.u64(effects.size());
  for (auto const &e : effects)
  {
    out.fixed(e.clause_ref).u64(static_cast<std::uint64_t>(e.state));
  }
  return out.take();
}

ClauseState decode_clause_state(std::uint64_t raw)
{
  if (raw > static_cast<std::uint64_t>(ClauseState::Cancelled))
  {
    throw Error(Errc::MalformedCall, "clause state out of range");
  }
  return static_cast<ClauseState>(raw);
}

std::vector<ClauseEffect> decode_clause_effects(ByteView raw)
{
  codec::Reader             in{raw};
  std::vector<ClauseEffect> out(in.count());
  for (auto &e : out)
  {
    e.clause_ref = in.fixed<Digest::size, DigestTag>();
    e.state      = decode_clause_state(in.u64());
  }
  in.expect_end();
  return out;
}

Bytes encode_u64(std::uint64_t value)
{
  codec::Writer out;
  out.u64(value);
  return out.take();
}

std::uint64_t decode_u64(ByteView raw)
{
  codec::Reader in{raw};
  auto const    v = in.u64();
  in.expect_end();
  return v;
}

std::uint32_t decode_code(ByteView raw)
{
  auto const v = decode_u64(raw);
  if (v > 0xffffffffULL)
  {
    throw Error(Errc::MalformedCall, "state code out of range");
  }
  return static_cast<std::uint32_t>(v);
}

Digest decode_digest(ByteView raw)
{
  if (raw.size() != Digest::size)
  {
    throw Error(Errc::MalformedCall, "digest argument must be 32 bytes");
  }
  return Digest::from_bytes(raw);
}

void require_args(ledger::ContractCall const &call, std::size_t n)
{
  if (call.args.size() != n)
  {
    throw Error(Errc::MalformedCall, call.operation + " expects " + std::to_string(n) + " arguments");
  }
}

std::string code_text(std::uint32_t code)
{
  return std::to_string(code);
}

}  // namespace

std::string_view to_string(ContractState state) noexcept
{
  switch (state)
  {
  case ContractState::AwaitingSignature:
    return "AwaitingSignature";
  case ContractState::InExecution:
    return "InExecution";
  case ContractState::Completed:
    return "Completed";
  case ContractState::Litigation:
    return "Litigation";
  case ContractState::Terminated:
    return "Terminated";
  }
  return "Unknown";
}

std::string_view to_string(ClauseState state) noexcept
{
  switch (state)
  {
  case ClauseState::Awaiting:
    return "Awaiting";
  case ClauseState::Enforced:
    return "Enforced";
  case ClauseState::Cancelled:
    return "Cancelled";
  }
  return "Unknown";
}

std::string_view to_string(Role role) noexcept
{
  switch (role)
  {
  case Role::Organization:
    return "organization";
  case Role::Oracle:
    return "oracle";
  case Role::Mediator:
    return "mediator";
  }
  return "unknown";
}

std::optional<ContractState> contract_state_from_string(std::string_view name) noexcept
{
  for (auto s : kAllContractStates)
  {
    if (to_string(s) == name)
    {
      return s;
    }
  }
  return std::nullopt;
}

std::optional<ClauseState> clause_state_from_string(std::string_view name) noexcept
{
  for (auto s : {ClauseState::Awaiting, ClauseState::Enforced, ClauseState::Cancelled})
  {
    if (to_string(s) == name)
    {
      return s;
    }
  }
  return std::nullopt;
}

bool is_permitted_edge(ContractState from, ContractState to) noexcept
{
  using S = ContractState;
  switch (from)
  {
  case S::AwaitingSignature:
    return to == S::InExecution;
  case S::InExecution:
    return to == S::Completed || to == S::Litigation || to == S::Terminated;
  case S::Litigation:
    return to == S::InExecution || to == S::Terminated;
  case S::Completed:
  case S::Terminated:
    return false;
  }
  return false;
}

bool is_permitted_clause_edge(ClauseState from, ClauseState to, bool mediator_override) noexcept
{
  if (from == ClauseState::Awaiting)
  {
    return to == ClauseState::Enforced || to == ClauseState::Cancelled;
  }
  return mediator_override && to == ClauseState::Awaiting;
}

std::uint32_t StateCodeMap::encode(ContractState state) const noexcept
{
  return codes[static_cast<std::size_t>(state)];
}

std::optional<ContractState> StateCodeMap::decode(std::uint32_t code) const noexcept
{
  for (std::size_t i = 0; i < codes.size(); ++i)
  {
    if (codes[i] == code)
    {
      return kAllContractStates[i];
    }
  }
  return std::nullopt;
}

bool StateCodeMap::valid() const noexcept
{
  auto sorted = codes;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::optional<Role> ParticipantRegistry::role_of(Address const &address) const
{
  if (organizations.count(address) != 0)
  {
    return Role::Organization;
  }
  if (oracles.count(address) != 0)
  {
    return Role::Oracle;
  }
  if (mediators.count(address) != 0)
  {
    return Role::Mediator;
  }
  return std::nullopt;
}

std::vector<Bytes> ConstructorArgs::encode() const
{
  codec::Writer clause_out;
  clause_out.u64(clauses.size());
  for (auto const &c : clauses)
  {
    clause_out.fixed(c.clause_ref).boolean(c.completion_required).boolean(c.oracle_may_enforce);
  }
  codec::Writer code_out;
  for (auto code : state_codes.codes)
  {
    code_out.u64(code);
  }
  return {encode_addresses(organizations), encode_addresses(oracles), encode_addresses(mediators),
          clause_out.take(), code_out.take()};
}

ConstructorArgs ConstructorArgs::decode(std::vector<Bytes> const &args)
{
  if (args.size() != 5)
  {
    throw Error(Errc::DeployRejected, "constructor expects 5 arguments");
  }
  try
  {
    ConstructorArgs out;
    out.organizations = decode_addresses(args[0]);
    out.oracles       = decode_addresses(args[1]);
    out.mediators     = decode_addresses(args[2]);

    codec::Reader clause_in{args[3]};
    out.clauses.resize(clause_in.count());
    for (auto &c : out.clauses)
    {
      c.clause_ref          = clause_in.fixed<Digest::size, DigestTag>();
      c.completion_required = clause_in.boolean();
      c.oracle_may_enforce  = clause_in.boolean();
    }
    clause_in.expect_end();

    codec::Reader code_in{args[4]};
    for (auto &code : out.state_codes.codes)
    {
      auto const v = code_in.u64();
      if (v > 0xffffffffULL)
      {
        throw Error(Errc::DeployRejected, "state code out of range");
      }
      code = static_cast<std::uint32_t>(v);
    }
    code_in.expect_end();
    return out;
  }
  catch (Error const &e)
  {
    throw Error(Errc::DeployRejected, e.what());
  }
}

namespace calls {

ledger::ContractCall deploy(ConstructorArgs const &args)
{
  return {Address{}, std::string{Bsc::kCode}, args.encode()};
}

ledger::ContractCall anchor_slc_hash(Address const &bsc, Digest const &slc_hash)
{
  return {bsc, "anchor_slc_hash", {Bytes(slc_hash.bytes.begin(), slc_hash.bytes.end())}};
}

ledger::ContractCall anchor_message(Address const &bsc, Digest const &request_digest,
                                    Digest const &response_digest,
                                    std::optional<ClauseEffect> const &clause_effect,
                                    std::optional<std::uint32_t> state_effect_code)
{
  Bytes clause_arg;
  if (clause_effect)
  {
    codec::Writer out;
    out.fixed(clause_effect->clause_ref).u64(static_cast<std::uint64_t>(clause_effect->state));
    clause_arg = out.take();
  }
  Bytes state_arg;
  if (state_effect_code)
  {
    state_arg = encode_u64(*state_effect_code);
  }
  return {bsc,
          "anchor_message",
          {Bytes(request_digest.bytes.begin(), request_digest.bytes.end()),
           Bytes(response_digest.bytes.begin(), response_digest.bytes.end()), std::move(clause_arg),
           std::move(state_arg)}};
}

ledger::ContractCall raise_litigation(Address const &bsc)
{
  return {bsc, "raise_litigation", {}};
}

ledger::ContractCall mediator_remove_anchor(Address const &bsc, Digest const &request_digest)
{
  return {bsc, "mediator_remove_anchor", {Bytes(request_digest.bytes.begin(), request_digest.bytes.end())}};
}

ledger::ContractCall mediator_resolve(Address const &bsc, std::uint32_t outcome_code,
                                      std::vector<ClauseEffect> const &overrides)
{
  return {bsc, "mediator_resolve", {encode_u64(outcome_code), encode_clause_effects(overrides)}};
}

ledger::ContractCall complete(Address const &bsc)
{
  return {bsc, "complete", {}};
}

}  // namespace calls

Bsc::Bsc(ConstructorArgs const &args, Address const &deployer)
  : codes_{args.state_codes}
{
  if (args.organizations.empty())
  {
    throw Error(Errc::DeployRejected, "no organizations");
  }
  if (!codes_.valid())
  {
    throw Error(Errc::DeployRejected, "state codes must be distinct");
  }
  std::set<Address> seen;
  auto              insert_all = [&](std::vector<Address> const &from, std::set<Address> &into) {
    for (auto const &a : from)
    {
      if (!seen.insert(a).second)
      {
        throw Error(Errc::DeployRejected, "participant address listed twice: " + a.hex());
      }
      into.insert(a);
    }
  };
  insert_all(args.organizations, registry_.organizations);
  insert_all(args.oracles, registry_.oracles);
  insert_all(args.mediators, registry_.mediators);
  registry_.deployer = deployer;

  for (auto const &c : args.clauses)
  {
    ClauseRecord record{c.clause_ref, ClauseState::Awaiting, 0, c.completion_required,
                        c.oracle_may_enforce};
    if (!clauses_.emplace(c.clause_ref, record).second)
    {
      throw Error(Errc::DeployRejected, "duplicate clause reference");
    }
  }
}

void Bsc::require_role(Address const &caller, std::initializer_list<Role> roles) const
{
  auto const role = registry_.role_of(caller);
  if (!role || std::find(roles.begin(), roles.end(), *role) == roles.end())
  {
    throw Error(Errc::Unauthorized, caller.hex());
  }
}

void Bsc::require_state(ContractState expected) const
{
  if (state_ != expected)
  {
    throw Error(Errc::InvalidState, std::string{to_string(state_)});
  }
}

ledger::EmittedEvent Bsc::transition(ContractState to, std::uint64_t /*height*/)
{
  if (!is_permitted_edge(state_, to))
  {
    throw Error(Errc::IllegalTransition,
                std::string{to_string(state_)} + " -> " + std::string{to_string(to)});
  }
  auto const from = state_;
  state_          = to;
  return {EventKind::StateChanged,
          {{"from", code_text(codes_.encode(from))}, {"to", code_text(codes_.encode(to))}}};
}

ledger::EmittedEvent Bsc::change_clause(ClauseRecord &record, ClauseState to, std::uint64_t height)
{
  record.state              = to;
  record.last_change_height = height;
  return {EventKind::ClauseChanged,
          {{"clause_ref", record.clause_ref.hex()}, {"state", std::to_string(static_cast<int>(to))}}};
}

bool Bsc::completion_satisfied() const
{
  return std::all_of(clauses_.begin(), clauses_.end(), [](auto const &entry) {
    return !entry.second.completion_required || entry.second.state == ClauseState::Enforced;
  });
}

Bsc::Events Bsc::anchor_slc_hash(ledger::CallContext const &ctx, Digest const &digest)
{
  if (ctx.caller != registry_.deployer)
  {
    throw Error(Errc::Unauthorized, "only the deployer anchors the signed contract");
  }
  if (slc_hash_)
  {
    throw Error(Errc::AlreadyAnchored, slc_hash_->hex());
  }
  require_state(ContractState::AwaitingSignature);

  slc_hash_ = digest;
  Events out;
  out.push_back({EventKind::SlcHashAnchored, {{"slc_hash", digest.hex()}}});
  out.push_back(transition(ContractState::InExecution, ctx.height));
  return out;
}

Bsc::Events Bsc::anchor_message(ledger::CallContext const &ctx, Digest const &request_digest,
                                Digest const &response_digest,
                                std::optional<ClauseEffect> const &clause_effect,
                                std::optional<std::uint32_t>       state_effect_code)
{
  require_role(ctx.caller, {Role::Organization, Role::Oracle});
  require_state(ContractState::InExecution);
  bool const oracle = registry_.oracles.count(ctx.caller) != 0;

  for (auto const &a : anchors_)
  {
    if (!a.removed && a.request_digest == request_digest && a.response_digest == response_digest)
    {
      throw Error(Errc::DuplicateAnchor, request_digest.hex());
    }
  }

  ClauseRecord *clause = nullptr;
  if (clause_effect)
  {
    auto const it = clauses_.find(clause_effect->clause_ref);
    if (it == clauses_.end())
    {
      throw Error(Errc::UnknownClause, clause_effect->clause_ref.hex());
    }
    if (oracle && !it->second.oracle_may_enforce)
    {
      throw Error(Errc::Unauthorized, "clause is reserved to organizations");
    }
    if (!is_permitted_clause_edge(it->second.state, clause_effect->state, false))
    {
      throw Error(Errc::IllegalTransition, "clause " + std::string{to_string(it->second.state)} +
                                               " -> " + std::string{to_string(clause_effect->state)});
    }
    clause = &it->second;
  }

  std::optional<ContractState> target;
  if (state_effect_code)
  {
    if (oracle)
    {
      throw Error(Errc::Unauthorized, "oracles cannot change the contract state");
    }
    target = codes_.decode(*state_effect_code);
    if (!target || (*target != ContractState::Completed && *target != ContractState::Terminated))
    {
      throw Error(Errc::IllegalTransition, "state effect not reachable by anchoring");
    }
    if (*target == ContractState::Completed)
    {
      bool const satisfied = std::all_of(clauses_.begin(), clauses_.end(), [&](auto const &entry) {
        auto const effective = (clause != nullptr && entry.first == clause->clause_ref)
                                   ? clause_effect->state
                                   : entry.second.state;
        return !entry.second.completion_required || effective == ClauseState::Enforced;
      });
      if (!satisfied)
      {
        throw Error(Errc::ClausesPending, "completion-required clauses not enforced");
      }
    }
  }

  // All checks passed; mutate.
  Events out;
  anchors_.push_back(AnchorRecord{request_digest, response_digest, ctx.caller, ctx.height, ctx.tx_id,
                                  false, std::nullopt});
  out.push_back({EventKind::MessageAnchored,
                 {{"request_digest", request_digest.hex()},
                  {"response_digest", response_digest.hex()},
                  {"submitter", ctx.caller.hex()}}});
  if (clause)
  {
    out.push_back(change_clause(*clause, clause_effect->state, ctx.height));
  }
  if (target)
  {
    out.push_back(transition(*target, ctx.height));
  }
  return out;
}

Bsc::Events Bsc::raise_litigation(ledger::CallContext const &ctx)
{
  require_role(ctx.caller, {Role::Organization});
  require_state(ContractState::InExecution);
  return {transition(ContractState::Litigation, ctx.height)};
}

Bsc::Events Bsc::mediator_remove_anchor(ledger::CallContext const &ctx, Digest const &request_digest)
{
  require_role(ctx.caller, {Role::Mediator});
  require_state(ContractState::Litigation);
  for (auto &a : anchors_)
  {
    if (!a.removed && a.request_digest == request_digest)
    {
      a.removed    = true;
      a.removed_by = ctx.caller;
      return {{EventKind::HashRemoved,
               {{"request_digest", request_digest.hex()}, {"mediator", ctx.caller.hex()}}}};
    }
  }
  throw Error(Errc::UnknownAnchor, request_digest.hex());
}

Bsc::Events Bsc::mediator_resolve(ledger::CallContext const &ctx, std::uint32_t outcome_code,
                                  std::vector<ClauseEffect> const &overrides)
{
  require_role(ctx.caller, {Role::Mediator});
  require_state(ContractState::Litigation);
  auto const outcome = codes_.decode(outcome_code);
  if (!outcome || (*outcome != ContractState::InExecution && *outcome != ContractState::Terminated))
  {
    throw Error(Errc::IllegalTransition, "mediation outcome must be InExecution or Terminated");
  }

  std::map<Digest, ClauseState> staged;
  for (auto const &o : overrides)
  {
    auto const it = clauses_.find(o.clause_ref);
    if (it == clauses_.end())
    {
      throw Error(Errc::UnknownClause, o.clause_ref.hex());
    }
    auto const current = staged.count(o.clause_ref) ? staged[o.clause_ref] : it->second.state;
    if (!is_permitted_clause_edge(current, o.state, true))
    {
      throw Error(Errc::IllegalTransition, "clause override");
    }
    staged[o.clause_ref] = o.state;
  }

  Events out;
  for (auto const &o : overrides)
  {
    out.push_back(change_clause(clauses_.at(o.clause_ref), o.state, ctx.height));
  }
  out.push_back(transition(*outcome, ctx.height));
  return out;
}

Bsc::Events Bsc::complete(ledger::CallContext const &ctx)
{
  require_role(ctx.caller, {Role::Organization});
  require_state(ContractState::InExecution);
  if (!completion_satisfied())
  {
    throw Error(Errc::ClausesPending, "completion-required clauses not enforced");
  }
  return {transition(ContractState::Completed, ctx.height)};
}

bool Bsc::has_anchor(Digest const &request_digest) const
{
  return find_anchor(request_digest) != nullptr;
}

AnchorRecord const *Bsc::find_anchor(Digest const &request_digest) const
{
  for (auto const &a : anchors_)
  {
    if (!a.removed && a.request_digest == request_digest)
    {
      return &a;
    }
  }
  return nullptr;
}

AnchorRecord const *Bsc::anchor_by_tx(Digest const &tx_id) const
{
  for (auto const &a : anchors_)
  {
    if (a.tx_id == tx_id)
    {
      return &a;
    }
  }
  return nullptr;
}

ClauseRecord const &Bsc::get_clause(Digest const &clause_ref) const
{
  auto const it = clauses_.find(clause_ref);
  if (it == clauses_.end())
  {
    throw Error(Errc::UnknownClause, clause_ref.hex());
  }
  return it->second;
}

std::vector<ledger::EmittedEvent> Bsc::execute(ledger::CallContext const &ctx,
                                               ledger::ContractCall const &call)
{
  auto const &op = call.operation;
  if (op == "anchor_slc_hash")
  {
    require_args(call, 1);
    return anchor_slc_hash(ctx, decode_digest(call.args[0]));
  }
  if (op == "anchor_message")
  {
    require_args(call, 4);
    std::optional<ClauseEffect> clause_effect;
    if (!call.args[2].empty())
    {
      codec::Reader in{call.args[2]};
      ClauseEffect  e;
      e.clause_ref = in.fixed<Digest::size, DigestTag>();
      e.state      = decode_clause_state(in.u64());
      in.expect_end();
      clause_effect = e;
    }
    std::optional<std::uint32_t> state_effect;
    if (!call.args[3].empty())
    {
      state_effect = decode_code(call.args[3]);
    }
    return anchor_message(ctx, decode_digest(call.args[0]), decode_digest(call.args[1]),
                          clause_effect, state_effect);
  }
  if (op == "raise_litigation")
  {
    require_args(call, 0);
    return raise_litigation(ctx);
  }
  if (op == "mediator_remove_anchor")
  {
    require_args(call, 1);
    return mediator_remove_anchor(ctx, decode_digest(call.args[0]));
  }
  if (op == "mediator_resolve")
  {
    require_args(call, 2);
    return mediator_resolve(ctx, decode_code(call.args[0]), decode_clause_effects(call.args[1]));
  }
  if (op == "complete")
  {
    require_args(call, 0);
    return complete(ctx);
  }
  throw Error(Errc::MalformedCall, "unknown operation " + op);
}

Bytes Bsc::serialize() const
{
  codec::Writer out;
  out.u64(codes_.encode(state_));
  for (auto const *set : {&registry_.organizations, &registry_.oracles, &registry_.mediators})
  {
    out.u64(set->size());
    for (auto const &a : *set)
    {
      out.fixed(a);
    }
  }
  out.fixed(registry_.deployer);
  out.bytes(slc_hash_ ? slc_hash_->view() : ByteView{});
  out.u64(clauses_.size());
  for (auto const &[ref, c] : clauses_)
  {
    out.fixed(ref)
        .u64(static_cast<std::uint64_t>(c.state))
        .u64(c.last_change_height)
        .boolean(c.completion_required)
        .boolean(c.oracle_may_enforce);
  }
  out.u64(anchors_.size());
  for (auto const &a : anchors_)
  {
    out.fixed(a.request_digest)
        .fixed(a.response_digest)
        .fixed(a.submitter)
        .u64(a.height)
        .fixed(a.tx_id)
        .boolean(a.removed)
        .bytes(a.removed_by ? a.removed_by->view() : ByteView{});
  }
  for (auto code : codes_.codes)
  {
    out.u64(code);
  }
  return out.take();
}

std::unique_ptr<ledger::HostedContract> Bsc::clone() const
{
  return std::make_unique<Bsc>(*this);
}

ledger::ContractRegistry contract_registry()
{
  ledger::ContractRegistry registry;
  registry.emplace(std::string{Bsc::kCode},
                   [](ledger::CallContext const &ctx, std::vector<Bytes> const &args,
                      std::vector<ledger::EmittedEvent> &) -> std::unique_ptr<ledger::HostedContract> {
                     return std::make_unique<Bsc>(ConstructorArgs::decode(args), ctx.caller);
                   });
  return registry;
}

}  // namespace anchorpact::bsc
