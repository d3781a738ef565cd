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

#include "anchorpact/slc.hpp"

#include "anchorpact/error.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <stdexcept>

namespace anchorpact::slc {
namespace {

using bsc::ClauseState;
using bsc::ContractState;
using bsc::Role;

enum ValueTag : std::uint64_t
{
  kInteger = 0,
  kNumber  = 1,
  kText    = 2,
};

void encode_values(codec::Writer &out, ValueMap const &values)
{
  out.u64(values.size());
  for (auto const &[name, value] : values)
  {
    out.str(name);
    encode_value(out, value);
  }
}

ValueMap decode_values(codec::Reader &in)
{
  ValueMap   out;
  auto const n = in.count();
  for (std::uint64_t i = 0; i < n; ++i)
  {
    auto name = in.str();
    out.emplace(std::move(name), decode_value(in));
  }
  return out;
}

void encode_clause_spec(codec::Writer &out, ClauseSpec const &c)
{
  out.str(c.id).str(c.title).str(c.logic).boolean(c.completion_required).boolean(c.oracle_may_enforce);
  out.u64(c.parameters.size());
  for (auto const &p : c.parameters)
  {
    out.str(p.name).str(p.type);
  }
}

ClauseSpec decode_clause_spec(codec::Reader &in)
{
  ClauseSpec c;
  c.id                  = in.str();
  c.title               = in.str();
  c.logic               = in.str();
  c.completion_required = in.boolean();
  c.oracle_may_enforce  = in.boolean();
  c.parameters.resize(in.count());
  for (auto &p : c.parameters)
  {
    p.name = in.str();
    p.type = in.str();
  }
  return c;
}

bool value_matches(Value const &value, std::string_view type)
{
  if (type == "integer" || type == "ticks")
  {
    return std::holds_alternative<std::int64_t>(value);
  }
  if (type == "number" || type == "celsius" || type == "amount")
  {
    return std::holds_alternative<double>(value) || std::holds_alternative<std::int64_t>(value);
  }
  return std::holds_alternative<std::string>(value);
}

std::set<std::string> referenced_placeholders(std::string_view text)
{
  std::set<std::string> names;
  std::size_t           pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos)
  {
    auto const end = text.find("}}", pos + 2);
    if (end == std::string_view::npos)
    {
      throw Error(Errc::TemplateError, "unterminated placeholder");
    }
    auto name = std::string{text.substr(pos + 2, end - pos - 2)};
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    names.insert(name);
    pos = end + 2;
  }
  return names;
}

ContractState decode_contract_state(std::uint64_t raw)
{
  if (raw > static_cast<std::uint64_t>(ContractState::Terminated))
  {
    throw Error(Errc::Decode, "contract state out of range");
  }
  return static_cast<ContractState>(raw);
}

ClauseState decode_clause_state(std::uint64_t raw)
{
  if (raw > static_cast<std::uint64_t>(ClauseState::Cancelled))
  {
    throw Error(Errc::Decode, "clause state out of range");
  }
  return static_cast<ClauseState>(raw);
}

}  // namespace

void encode_value(codec::Writer &out, Value const &value)
{
  std::visit(
      [&](auto const &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>)
        {
          out.u64(kInteger).i64(v);
        }
        else if constexpr (std::is_same_v<T, double>)
        {
          out.u64(kNumber).f64(v);
        }
        else
        {
          out.u64(kText).str(v);
        }
      },
      value);
}

Value decode_value(codec::Reader &in)
{
  switch (in.u64())
  {
  case kInteger:
    return in.i64();
  case kNumber:
    return in.f64();
  case kText:
    return in.str();
  default:
    throw Error(Errc::Decode, "unknown value tag");
  }
}

std::string value_to_string(Value const &value)
{
  return std::visit(
      [](auto const &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>)
        {
          return v;
        }
        else
        {
          char buf[64];
          auto const res = std::to_chars(buf, buf + sizeof(buf), v);
          return std::string(buf, res.ptr);
        }
      },
      value);
}

std::optional<double> as_number(Value const &value) noexcept
{
  if (auto const *i = std::get_if<std::int64_t>(&value))
  {
    return static_cast<double>(*i);
  }
  if (auto const *d = std::get_if<double>(&value))
  {
    return *d;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

void LegalContractTemplate::validate() const
{
  std::set<std::string> declared;
  for (auto const &p : placeholders)
  {
    if (!declared.insert(p.name).second)
    {
      throw Error(Errc::TemplateError, "placeholder declared twice: " + p.name);
    }
  }
  auto const used = referenced_placeholders(text);
  for (auto const &name : used)
  {
    if (declared.count(name) == 0)
    {
      throw Error(Errc::TemplateError, "undeclared placeholder in text: " + name);
    }
  }
  for (auto const &name : declared)
  {
    if (used.count(name) == 0)
    {
      throw Error(Errc::TemplateError, "declared placeholder never used: " + name);
    }
  }
  std::set<std::string> ids;
  for (auto const &c : clauses)
  {
    if (c.id.empty() || !ids.insert(c.id).second)
    {
      throw Error(Errc::TemplateError, "clause id empty or duplicated: " + c.id);
    }
  }
}

ClauseSpec const *LegalContractTemplate::clause(std::string_view id) const noexcept
{
  for (auto const &c : clauses)
  {
    if (c.id == id)
    {
      return &c;
    }
  }
  return nullptr;
}

Placeholder const *LegalContractTemplate::placeholder(std::string_view name) const noexcept
{
  for (auto const &p : placeholders)
  {
    if (p.name == name)
    {
      return &p;
    }
  }
  return nullptr;
}

void LegalContractTemplate::encode(codec::Writer &out) const
{
  out.str(name).str(text).u64(placeholders.size());
  for (auto const &p : placeholders)
  {
    out.str(p.name).str(p.type);
  }
  out.u64(clauses.size());
  for (auto const &c : clauses)
  {
    encode_clause_spec(out, c);
  }
}

LegalContractTemplate LegalContractTemplate::decode(codec::Reader &in)
{
  LegalContractTemplate t;
  t.name = in.str();
  t.text = in.str();
  t.placeholders.resize(in.count());
  for (auto &p : t.placeholders)
  {
    p.name = in.str();
    p.type = in.str();
  }
  auto const n = in.count();
  for (std::uint64_t i = 0; i < n; ++i)
  {
    t.clauses.push_back(decode_clause_spec(in));
  }
  return t;
}

ValueMap bind_static_data(LegalContractTemplate const &tmpl,
                          std::map<std::string, std::string> const &raw)
{
  ValueMap out;
  for (auto const &[name, text] : raw)
  {
    auto const *p = tmpl.placeholder(name);
    if (p == nullptr)
    {
      throw Error(Errc::TemplateError, "binding for undeclared placeholder: " + name);
    }
    if (p->type == "ticks" || p->type == "integer")
    {
      std::int64_t v{};
      auto const   res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      {
        throw Error(Errc::TemplateError, "integer expected for " + name);
      }
      out.emplace(name, v);
    }
    else if (p->type == "celsius" || p->type == "amount" || p->type == "number")
    {
      double     v{};
      auto const res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      {
        throw Error(Errc::TemplateError, "number expected for " + name);
      }
      out.emplace(name, v);
    }
    else
    {
      out.emplace(name, text);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Bytes ClauseRequest::encode() const
{
  codec::Writer out;
  out.str("anchorpact/request").str(clause_id).fixed(requester);
  encode_values(out, parameters);
  out.u64(nonce);
  return out.take();
}

ClauseRequest ClauseRequest::decode(ByteView raw)
{
  codec::Reader in{raw};
  if (in.str() != "anchorpact/request")
  {
    throw Error(Errc::Decode, "not a clause request");
  }
  ClauseRequest r;
  r.clause_id  = in.str();
  r.requester  = in.fixed<Address::size, AddressTag>();
  r.parameters = decode_values(in);
  r.nonce      = in.u64();
  in.expect_end();
  return r;
}

std::string_view to_string(RejectReason reason) noexcept
{
  switch (reason)
  {
  case RejectReason::None:
    return "None";
  case RejectReason::WrongState:
    return "WrongState";
  case RejectReason::UnauthorizedRequester:
    return "UnauthorizedRequester";
  case RejectReason::PreconditionFailed:
    return "PreconditionFailed";
  case RejectReason::UnknownClause:
    return "UnknownClause";
  case RejectReason::StaleNonce:
    return "StaleNonce";
  case RejectReason::MalformedRequest:
    return "MalformedRequest";
  }
  return "Unknown";
}

ClauseResponse ClauseResponse::enforced(Effects effects, std::string explanation)
{
  if (effects.empty())
  {
    throw std::logic_error("an enforced clause response must carry effects");
  }
  return {ResponseStatus::Enforced, RejectReason::None, std::move(effects), std::move(explanation)};
}

ClauseResponse ClauseResponse::rejected(RejectReason reason, std::string explanation)
{
  return {ResponseStatus::Rejected, reason, {}, std::move(explanation)};
}

Bytes ClauseResponse::encode() const
{
  codec::Writer out;
  out.str("anchorpact/response")
      .u64(static_cast<std::uint64_t>(status))
      .u64(static_cast<std::uint64_t>(reason));
  out.boolean(effects.clause.has_value());
  if (effects.clause)
  {
    out.str(effects.clause->first).u64(static_cast<std::uint64_t>(effects.clause->second));
  }
  out.boolean(effects.contract.has_value());
  if (effects.contract)
  {
    out.u64(static_cast<std::uint64_t>(*effects.contract));
  }
  encode_values(out, effects.variables);
  out.str(explanation);
  return out.take();
}

ClauseResponse ClauseResponse::decode(ByteView raw)
{
  codec::Reader in{raw};
  if (in.str() != "anchorpact/response")
  {
    throw Error(Errc::Decode, "not a clause response");
  }
  ClauseResponse r;
  auto const     status = in.u64();
  auto const     reason = in.u64();
  if (status > 1 || reason > static_cast<std::uint64_t>(RejectReason::MalformedRequest))
  {
    throw Error(Errc::Decode, "response enum out of range");
  }
  r.status = static_cast<ResponseStatus>(status);
  r.reason = static_cast<RejectReason>(reason);
  if (in.boolean())
  {
    auto id          = in.str();
    r.effects.clause = std::make_pair(std::move(id), decode_clause_state(in.u64()));
  }
  if (in.boolean())
  {
    r.effects.contract = decode_contract_state(in.u64());
  }
  r.effects.variables = decode_values(in);
  r.explanation       = in.str();
  in.expect_end();
  if ((r.status == ResponseStatus::Enforced) == r.effects.empty())
  {
    throw Error(Errc::Decode, "effects must be present exactly for enforced responses");
  }
  return r;
}

void OnChainChange::encode(codec::Writer &out) const
{
  out.str(origin).boolean(contract.has_value());
  if (contract)
  {
    out.u64(static_cast<std::uint64_t>(*contract));
  }
  out.u64(clauses.size());
  for (auto const &[id, state] : clauses)
  {
    out.str(id).u64(static_cast<std::uint64_t>(state));
  }
  out.bytes(removed_request ? removed_request->view() : ByteView{});
}

// ---------------------------------------------------------------------------

void LogicRegistry::add(std::string id, LogicFunction fn)
{
  functions_[std::move(id)] = std::move(fn);
}

LogicFunction const *LogicRegistry::find(std::string_view id) const noexcept
{
  auto const it = functions_.find(id);
  return it == functions_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

SlcInstance SlcInstance::instantiate(LegalContractTemplate tmpl, ValueMap static_data,
                                     std::vector<Party> parties, std::uint64_t seed,
                                     std::shared_ptr<LogicRegistry const> logic)
{
  tmpl.validate();
  for (auto const &p : tmpl.placeholders)
  {
    auto const it = static_data.find(p.name);
    if (it == static_data.end())
    {
      throw Error(Errc::MissingBinding, p.name);
    }
    if (!value_matches(it->second, p.type))
    {
      throw Error(Errc::TemplateError, "binding type mismatch for " + p.name);
    }
  }
  for (auto const &[name, value] : static_data)
  {
    if (tmpl.placeholder(name) == nullptr)
    {
      throw Error(Errc::TemplateError, "binding for undeclared placeholder: " + name);
    }
  }
  if (std::none_of(parties.begin(), parties.end(),
                   [](Party const &p) { return p.role == Role::Organization; }))
  {
    throw Error(Errc::NoOrganizations, "");
  }
  std::set<Address> addresses;
  for (auto const &p : parties)
  {
    if (crypto::derive_address(p.public_key) != p.address || !addresses.insert(p.address).second)
    {
      throw Error(Errc::UnknownParty, "party address inconsistent or duplicated: " + p.address.hex());
    }
  }
  for (auto const &p : tmpl.placeholders)
  {
    if (p.type == "party")
    {
      auto const &identity = std::get<std::string>(static_data.at(p.name));
      if (std::none_of(parties.begin(), parties.end(),
                       [&](Party const &party) { return party.identity == identity; }))
      {
        throw Error(Errc::MissingBinding, "placeholder " + p.name + " names no party");
      }
    }
  }

  SlcInstance inst;
  inst.logic_       = std::move(logic);
  inst.template_    = std::move(tmpl);
  inst.static_data_ = std::move(static_data);
  inst.parties_     = std::move(parties);

  auto const salt = crypto::derive_seed(seed, "slc/salt");
  inst.salt_.assign(salt.begin(), salt.end());

  // Five distinct pseudo-random codes; re-derive on the (unlikely) collision.
  for (std::uint64_t round = 0;; ++round)
  {
    auto const material = crypto::derive_seed(seed, "slc/state-codes/" + std::to_string(round));
    for (std::size_t i = 0; i < inst.state_codes_.codes.size(); ++i)
    {
      std::uint32_t code = 0;
      for (std::size_t b = 0; b < 4; ++b)
      {
        code = (code << 8) | material[i * 4 + b];
      }
      inst.state_codes_.codes[i] = code;
    }
    if (inst.state_codes_.valid())
    {
      break;
    }
  }

  for (auto const &c : inst.template_.clauses)
  {
    inst.clause_states_[c.id] = ClauseState::Awaiting;
  }
  return inst;
}

Party const *SlcInstance::party(Address const &address) const noexcept
{
  for (auto const &p : parties_)
  {
    if (p.address == address)
    {
      return &p;
    }
  }
  return nullptr;
}

Party const *SlcInstance::party_by_identity(std::string_view identity) const noexcept
{
  for (auto const &p : parties_)
  {
    if (p.identity == identity)
    {
      return &p;
    }
  }
  return nullptr;
}

std::optional<Address> SlcInstance::placeholder_party(std::string_view placeholder) const
{
  auto const it = static_data_.find(placeholder);
  if (it == static_data_.end())
  {
    return std::nullopt;
  }
  auto const *identity = std::get_if<std::string>(&it->second);
  if (identity == nullptr)
  {
    return std::nullopt;
  }
  auto const *p = party_by_identity(*identity);
  return p ? std::optional<Address>{p->address} : std::nullopt;
}

void SlcInstance::set_bsc_address(Address const &address)
{
  bsc_address_ = address;
}

Digest SlcInstance::clause_ref(std::string_view clause_id) const
{
  auto const *spec = template_.clause(clause_id);
  if (spec == nullptr)
  {
    throw Error(Errc::UnknownClause, std::string{clause_id});
  }
  codec::Writer out;
  out.str("anchorpact/clause-ref");
  encode_clause_spec(out, *spec);
  out.bytes(salt_);
  return crypto::hash(out.buffer());
}

std::optional<std::string> SlcInstance::clause_id_for(Digest const &ref) const
{
  for (auto const &c : template_.clauses)
  {
    if (clause_ref(c.id) == ref)
    {
      return c.id;
    }
  }
  return std::nullopt;
}

bsc::ConstructorArgs SlcInstance::constructor_args() const
{
  bsc::ConstructorArgs args;
  for (auto const &p : parties_)
  {
    switch (p.role)
    {
    case Role::Organization:
      args.organizations.push_back(p.address);
      break;
    case Role::Oracle:
      args.oracles.push_back(p.address);
      break;
    case Role::Mediator:
      args.mediators.push_back(p.address);
      break;
    }
  }
  for (auto const &c : template_.clauses)
  {
    args.clauses.push_back({clause_ref(c.id), c.completion_required, c.oracle_may_enforce});
  }
  args.state_codes = state_codes_;
  return args;
}

void SlcInstance::encode_signable(codec::Writer &out) const
{
  out.str("anchorpact/slc");
  template_.encode(out);
  encode_values(out, static_data_);
  out.u64(parties_.size());
  for (auto const &p : parties_)
  {
    out.u64(static_cast<std::uint64_t>(p.role)).str(p.identity).fixed(p.address).fixed(p.public_key);
  }
  out.fixed(*bsc_address_).bytes(salt_);
  for (auto code : state_codes_.codes)
  {
    out.u64(code);
  }
}

Bytes SlcInstance::signable_payload() const
{
  if (!bsc_address_)
  {
    throw Error(Errc::BscAddressUnset, "");
  }
  codec::Writer out;
  encode_signable(out);
  return out.take();
}

void SlcInstance::add_signature(Address const &address, Signature const &sig)
{
  auto const *p = party(address);
  if (p == nullptr)
  {
    throw Error(Errc::UnknownParty, address.hex());
  }
  if (!crypto::verify(p->public_key, signable_payload(), sig))
  {
    throw Error(Errc::BadSignature, "signature over contract payload does not verify for " + address.hex());
  }
  signatures_[address] = sig;
}

bool SlcInstance::is_fully_signed() const noexcept
{
  return std::all_of(parties_.begin(), parties_.end(), [&](Party const &p) {
    return p.role == Role::Oracle || signatures_.count(p.address) != 0;
  });
}

Bytes SlcInstance::signed_bytes() const
{
  codec::Writer signable;
  if (!bsc_address_)
  {
    throw Error(Errc::BscAddressUnset, "");
  }
  encode_signable(signable);
  codec::Writer out;
  out.nested(signable).u64(signatures_.size());
  for (auto const &[address, sig] : signatures_)
  {
    out.fixed(address).bytes(sig.bytes);
  }
  return out.take();
}

Digest SlcInstance::signed_hash() const
{
  if (!is_fully_signed())
  {
    throw Error(Errc::NotFullySigned, "");
  }
  return crypto::hash(signed_bytes());
}

bool SlcInstance::verify_instance(Digest const &reference) const noexcept
{
  try
  {
    return signed_hash() == reference;
  }
  catch (...)
  {
    return false;
  }
}

SlcInstance SlcInstance::from_signed_bytes(ByteView raw, std::shared_ptr<LogicRegistry const> logic)
{
  codec::Reader outer{raw};
  auto          in = outer.nested();
  if (in.str() != "anchorpact/slc")
  {
    throw Error(Errc::Decode, "not a contract export");
  }
  SlcInstance inst;
  inst.logic_       = std::move(logic);
  inst.template_    = LegalContractTemplate::decode(in);
  inst.static_data_ = decode_values(in);
  inst.parties_.resize(in.count());
  for (auto &p : inst.parties_)
  {
    auto const role = in.u64();
    if (role > static_cast<std::uint64_t>(Role::Mediator))
    {
      throw Error(Errc::Decode, "party role out of range");
    }
    p.role       = static_cast<Role>(role);
    p.identity   = in.str();
    p.address    = in.fixed<Address::size, AddressTag>();
    p.public_key = in.fixed<PublicKey::size, PublicKeyTag>();
  }
  inst.bsc_address_ = in.fixed<Address::size, AddressTag>();
  auto const salt   = in.bytes();
  inst.salt_.assign(salt.begin(), salt.end());
  for (auto &code : inst.state_codes_.codes)
  {
    code = static_cast<std::uint32_t>(in.u64());
  }
  in.expect_end();

  auto const n = outer.count();
  for (std::uint64_t i = 0; i < n; ++i)
  {
    auto const address = outer.fixed<Address::size, AddressTag>();
    auto const sig     = outer.bytes();
    inst.signatures_[address].bytes.assign(sig.begin(), sig.end());
  }
  outer.expect_end();

  // Decoding normalizes some fields (map order, duplicate keys, code width),
  // so only an export that re-encodes to itself is accepted; otherwise two
  // different files could verify against the same hash.
  if (inst.signed_bytes() != to_bytes(raw))
  {
    throw Error(Errc::Decode, "non-canonical contract export");
  }
  for (auto const &c : inst.template_.clauses)
  {
    inst.clause_states_[c.id] = ClauseState::Awaiting;
  }
  return inst;
}

ClauseState SlcInstance::clause_state(std::string_view clause_id) const
{
  auto const it = clause_states_.find(std::string{clause_id});
  if (it == clause_states_.end())
  {
    throw Error(Errc::UnknownClause, std::string{clause_id});
  }
  return it->second;
}

std::optional<Value> SlcInstance::variable(std::string_view name) const
{
  auto const it = variables_.find(name);
  return it == variables_.end() ? std::nullopt : std::optional<Value>{it->second};
}

std::optional<Value> SlcInstance::static_value(std::string_view name) const
{
  auto const it = static_data_.find(name);
  return it == static_data_.end() ? std::nullopt : std::optional<Value>{it->second};
}

std::uint64_t SlcInstance::last_nonce(Address const &requester) const noexcept
{
  auto const it = last_nonce_.find(requester);
  return it == last_nonce_.end() ? 0 : it->second;
}

ClauseResponse SlcInstance::evaluate(ClauseRequest const &request) const
{
  auto const *spec = template_.clause(request.clause_id);
  if (spec == nullptr)
  {
    return ClauseResponse::rejected(RejectReason::UnknownClause, "no clause " + request.clause_id);
  }
  auto const *requester = party(request.requester);
  if (requester == nullptr)
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "requester is not a party");
  }
  if (contract_state_ != ContractState::InExecution)
  {
    return ClauseResponse::rejected(RejectReason::WrongState,
                                    "contract is " + std::string{bsc::to_string(contract_state_)});
  }
  if (request.nonce <= last_nonce(request.requester))
  {
    return ClauseResponse::rejected(RejectReason::StaleNonce, "nonce already used");
  }
  if (request.parameters.size() != spec->parameters.size())
  {
    return ClauseResponse::rejected(RejectReason::MalformedRequest, "parameter count mismatch");
  }
  for (auto const &p : spec->parameters)
  {
    auto const it = request.parameters.find(p.name);
    if (it == request.parameters.end() || !value_matches(it->second, p.type))
    {
      return ClauseResponse::rejected(RejectReason::MalformedRequest, "bad parameter " + p.name);
    }
  }
  auto const *fn = logic_ ? logic_->find(spec->logic) : nullptr;
  if (fn == nullptr)
  {
    return ClauseResponse::rejected(RejectReason::UnknownClause, "no logic function " + spec->logic);
  }
  return (*fn)(LogicContext{*this, *spec, request, *requester});
}

ClauseResponse SlcInstance::execute_request(ClauseRequest const &request)
{
  if (!is_fully_signed())
  {
    throw Error(Errc::NotFullySigned, "");
  }
  auto response = evaluate(request);
  if (response.status == ResponseStatus::Enforced)
  {
    apply_effects(request, response.effects);
    request_log_.emplace_back(request, response);
  }
  return response;
}

void SlcInstance::apply_remote(ClauseRequest const &request, ClauseResponse const &response)
{
  if (request.nonce <= last_nonce(request.requester))
  {
    throw Error(Errc::StaleRequest, "nonce " + std::to_string(request.nonce));
  }
  auto const local = evaluate(request);
  if (local.status != ResponseStatus::Enforced || local.encode() != response.encode())
  {
    throw Error(Errc::DivergentResponse, "local re-execution: " + local.explanation);
  }
  apply_effects(request, local.effects);
  request_log_.emplace_back(request, local);
}

void SlcInstance::apply_effects(ClauseRequest const &request, Effects const &effects)
{
  if (effects.clause)
  {
    clause_states_[effects.clause->first] = effects.clause->second;
  }
  if (effects.contract)
  {
    contract_state_ = *effects.contract;
  }
  for (auto const &[name, value] : effects.variables)
  {
    variables_.insert_or_assign(name, value);
  }
  last_nonce_[request.requester] = request.nonce;
}

void SlcInstance::apply_onchain(OnChainChange const &change)
{
  if (change.contract)
  {
    contract_state_ = *change.contract;
  }
  for (auto const &[id, state] : change.clauses)
  {
    clause_states_[id] = state;
  }
  onchain_log_.push_back(change);
}

Bytes SlcInstance::canonical_state() const
{
  codec::Writer out;
  out.bytes(signed_bytes());
  out.u64(static_cast<std::uint64_t>(contract_state_)).u64(clause_states_.size());
  for (auto const &[id, state] : clause_states_)
  {
    out.str(id).u64(static_cast<std::uint64_t>(state));
  }
  encode_values(out, variables_);
  out.u64(last_nonce_.size());
  for (auto const &[address, nonce] : last_nonce_)
  {
    out.fixed(address).u64(nonce);
  }
  out.u64(request_log_.size());
  for (auto const &[req, resp] : request_log_)
  {
    out.bytes(req.encode()).bytes(resp.encode());
  }
  out.u64(onchain_log_.size());
  for (auto const &change : onchain_log_)
  {
    codec::Writer item;
    change.encode(item);
    out.nested(item);
  }
  return out.take();
}

}  // namespace anchorpact::slc
