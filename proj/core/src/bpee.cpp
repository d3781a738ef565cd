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


#include "anchorpact/bpee.hpp"

#include "anchorpact/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace anchorpact::bpee {

using bsc::ClauseState;
using bsc::ContractState;
using ledger::EventKind;

MessageBus::MessageBus(TransportOptions options, std::uint64_t seed)
  : options_{options}
  , rng_{seed}
{
  if (options_.max_delay < options_.min_delay)
  {
    throw Error(Errc::ConfigError, "transport max_delay below min_delay");
  }
  if (!(options_.drop_probability >= 0.0 && options_.drop_probability < 1.0))
  {
    throw Error(Errc::ConfigError, "transport drop_probability must lie in [0, 1)");
  }
}

std::uint64_t MessageBus::schedule(std::uint64_t from)
{
  // Raw engine output only, so the schedule does not depend on the standard
  // library's distribution implementations.
  auto const span = options_.max_delay - options_.min_delay + 1;
  for (auto at = from;;)
  {
    auto const unit = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (unit < options_.drop_probability)
    {
      ++dropped_;
      at += std::max<std::uint64_t>(options_.retransmit_after, 1);
      continue;
    }
    return at + options_.min_delay + rng_() % span;
  }
}

void MessageBus::send(Address const &from, Address const &to, MessageEnvelope envelope)
{
  ++sent_;
  queue_.push_back({schedule(now_), seq_++, {from, to, std::move(envelope)}});
}

std::vector<Delivery> MessageBus::due(std::uint64_t now)
{
  auto split = std::stable_partition(queue_.begin(), queue_.end(),
                                     [now](Pending const &p) { return p.at > now; });
  std::vector<Pending> ready(std::make_move_iterator(split), std::make_move_iterator(queue_.end()));
  queue_.erase(split, queue_.end());
  std::sort(ready.begin(), ready.end(), [](Pending const &a, Pending const &b) {
    return a.at != b.at ? a.at < b.at : a.seq < b.seq;
  });
  std::vector<Delivery> out;
  out.reserve(ready.size());
  for (auto &p : ready)
  {
    out.push_back(std::move(p.delivery));
  }
  return out;
}

Verdict check_envelope(MessageEnvelope const &envelope, slc::SlcInstance const &replica,
                       AnchorLookup const &lookup)
{
  auto const *party = replica.party(envelope.sender);
  if (party == nullptr)
  {
    return Verdict::UnknownSender;
  }
  if (!envelope.signature_valid(party->public_key))
  {
    return Verdict::BadSignature;
  }
  if (replica.is_fully_signed() && envelope.instance_id != replica.signed_hash())
  {
    return Verdict::BadSignature;
  }
  auto const anchor = lookup(envelope.anchor_ref);
  if (!anchor || anchor->removed || anchor->submitter != envelope.sender)
  {
    return Verdict::NotAnchored;
  }
  if (anchor->request_digest != envelope.request_digest() ||
      anchor->response_digest != envelope.response_digest())
  {
    return Verdict::DigestMismatch;
  }
  return Verdict::Accepted;
}

std::optional<bsc::ClauseEffect> chain_clause_effect(slc::SlcInstance const    &replica,
                                                     slc::ClauseResponse const &response)
{
  if (!response.effects.clause)
  {
    return std::nullopt;
  }
  return bsc::ClauseEffect{replica.clause_ref(response.effects.clause->first),
                           response.effects.clause->second};
}

std::optional<std::uint32_t> chain_state_effect(slc::SlcInstance const    &replica,
                                                slc::ClauseResponse const &response)
{
  if (!response.effects.contract)
  {
    return std::nullopt;
  }
  return replica.state_codes().encode(*response.effects.contract);
}

Participant::Participant(std::string role, KeyPair key, ledger::Ledger &ledger, Outbox &outbox,
                         std::unique_ptr<audit::LocalStore> store, ParticipantOptions options)
  : role_{std::move(role)}
  , session_{ledger, std::move(key)}
  , outbox_{outbox}
  , store_{std::move(store)}
  , options_{options}
{
  if (!store_)
  {
    store_ = std::make_unique<audit::LocalStore>(session_.address());
  }
}

void Participant::log(std::string const &line) const
{
  if (observer_.log)
  {
    observer_.log(role_ + " " + line);
  }
}

void Participant::add_contact(std::string const &role, Address const &address,
                              PublicKey const &key)
{
  contacts_[role] = {address, key};
}

void Participant::attach(slc::SlcInstance replica)
{
  if (!replica.bsc_address())
  {
    throw Error(Errc::BscAddressUnset, "replica has no contract address");
  }
  replica_ = std::move(replica);
  session_.bind(*replica_->bsc_address());
  store_->bind(*replica_->bsc_address());
  session_.watch([this](ledger::LedgerEvent const &event) {
    if (chain_.empty() || chain_.back().tx_id != event.tx_id)
    {
      chain_.push_back({event.tx_id, event.height, {}});
    }
    chain_.back().events.push_back(event);
  });
  auto early = std::move(early_);
  early_.clear();
  for (auto const &env : early)
  {
    on_message(env);
  }
}

slc::SlcInstance const &Participant::replica() const
{
  if (!replica_)
  {
    throw std::logic_error("participant has no contract replica");
  }
  return *replica_;
}

void Participant::start_process(std::shared_ptr<ProcessDefinition const> definition,
                                std::uint64_t now, Variables const &overrides)
{
  process_ = ProcessInstance::start(std::move(definition), now, overrides);
  open_calls_.clear();
}

void Participant::on_task(std::string const &handler, TaskHandler fn)
{
  tasks_[handler] = std::move(fn);
}

std::optional<Verdict> Participant::on_message(MessageEnvelope const &envelope)
{
  if (envelope.kind == EnvelopeKind::Document && envelope.instance_id.is_zero())
  {
    auto const it = std::find_if(contacts_.begin(), contacts_.end(), [&](auto const &kv) {
      return kv.second.first == envelope.sender;
    });
    if (it == contacts_.end())
    {
      return Verdict::UnknownSender;
    }
    if (!envelope.signature_valid(it->second.second))
    {
      return Verdict::BadSignature;
    }
    log("received " + envelope.topic + " from " + it->first);
    store_->record(audit::PreContractRecord{false, session_.ledger().height(), envelope});
    topics_.insert(envelope.topic);
    return Verdict::Accepted;
  }
  if (!replica_)
  {
    early_.push_back(envelope);
    return std::nullopt;
  }

  auto const tx = envelope.anchor_ref;
  if (settled_.count(tx) != 0)
  {
    return std::nullopt;  // duplicate delivery
  }
  auto const lookup = [this](Digest const &id) { return session_.anchor_by_tx(id); };
  auto const verdict = check_envelope(envelope, *replica_, lookup);
  if (verdict != Verdict::Accepted)
  {
    reject(envelope, verdict);
    // A signed envelope whose request matches a real anchor still carries the
    // request every replica must re-execute at that chain position.
    if (verdict == Verdict::DigestMismatch || verdict == Verdict::NotAnchored)
    {
      auto const anchor = lookup(tx);
      if (anchor && anchor->submitter == envelope.sender &&
          anchor->request_digest == envelope.request_digest() && material_.count(tx) == 0)
      {
        material_[tx] = Material{envelope.request, envelope.response, envelope, false};
        apply_chain();
      }
    }
    return verdict;
  }
  material_[tx] = Material{envelope.request, envelope.response, envelope, true};
  log("verified envelope tx=" + tx.hex().substr(0, 16));
  apply_chain();
  if (settled_.count(tx) != 0)
  {
    auto const &in = store_->inbound();
    auto const  it = std::find_if(in.rbegin(), in.rend(), [&](audit::InboundRecord const &r) {
      return r.envelope.anchor_ref == tx;
    });
    if (it != in.rend())
    {
      return it->verdict;
    }
  }
  return std::nullopt;
}

void Participant::reject(MessageEnvelope const &envelope, Verdict verdict)
{
  log("rejected envelope tx=" + envelope.anchor_ref.hex().substr(0, 16) + " verdict=" +
      std::string{to_string(verdict)});
  store_->record(audit::InboundRecord{verdict, session_.ledger().height(), envelope});
  auto const *self = replica_ ? replica_->party(address()) : nullptr;
  if (self != nullptr && self->role == bsc::Role::Organization &&
      ++rejects_[envelope.sender] >= options_.conflict_threshold)
  {
    rejects_[envelope.sender] = 0;
    want_litigation_          = true;
  }
}

slc::ClauseRequest Participant::make_request(std::string clause_id, slc::ValueMap parameters)
{
  auto const last = replica_ ? replica_->last_nonce(address()) : 0;
  next_nonce_     = std::max(next_nonce_, last) + 1;
  return slc::ClauseRequest{std::move(clause_id), address(), std::move(parameters), next_nonce_};
}

Digest Participant::submit_enforcement(slc::ClauseRequest const &request,
                                       slc::ClauseResponse const &response)
{
  auto req_bytes  = request.encode();
  auto resp_bytes = response.encode();
  log("anchoring " + request.clause_id + " nonce=" + std::to_string(request.nonce));
  auto const tx = session_.submit_anchor(crypto::hash(req_bytes), crypto::hash(resp_bytes),
                                         chain_clause_effect(*replica_, response),
                                         chain_state_effect(*replica_, response));
  if (observer_.anchor_submitted)
  {
    observer_.anchor_submitted(*this, tx, req_bytes, resp_bytes);
  }
  material_[tx] = Material{std::move(req_bytes), std::move(resp_bytes), std::nullopt, true};
  return tx;
}

MessageEnvelope Participant::diffuse(slc::ClauseRequest const &request,
                                     slc::ClauseResponse const &response, Digest const &tx_id,
                                     std::uint64_t height)
{
  auto const req_bytes  = request.encode();
  auto const resp_bytes = response.encode();
  store_->record(audit::OutboundRecord{tx_id, height, req_bytes, resp_bytes});

  auto       sent  = resp_bytes;
  if (response_filter_)
  {
    response_filter_(request, sent);
  }
  auto const *self = replica_->party(address());
  auto const  kind = self != nullptr && self->role == bsc::Role::Oracle ? EnvelopeKind::OracleReading
                                                                         : EnvelopeKind::RequestDiffusion;
  auto envelope = MessageEnvelope::make(key(), replica_->signed_hash(), kind, {}, req_bytes,
                                        std::move(sent), tx_id);
  log("diffusing " + request.clause_id + " tx=" + tx_id.hex().substr(0, 16));
  for (auto const &party : replica_->parties())
  {
    if (party.address != address())
    {
      outbox_.send(address(), party.address, envelope);
    }
  }
  return envelope;
}

MessageEnvelope Participant::diffuse_unanchored(slc::ClauseRequest const  &request,
                                                slc::ClauseResponse const &response)
{
  auto const req_bytes = request.encode();
  auto envelope = MessageEnvelope::make(key(), replica().signed_hash(),
                                        EnvelopeKind::RequestDiffusion, {}, req_bytes,
                                        response.encode(), crypto::hash(req_bytes));
  log("diffusing unanchored " + request.clause_id);
  for (auto const &party : replica_->parties())
  {
    if (party.address != address())
    {
      outbox_.send(address(), party.address, envelope);
    }
  }
  return envelope;
}

MessageEnvelope Participant::send_enforcement(slc::ClauseRequest request)
{
  if (!replica().is_fully_signed())
  {
    throw Error(Errc::NotFullySigned, "replica is not fully signed");
  }
  sync();
  auto const response = replica_->evaluate(request);
  if (response.status != slc::ResponseStatus::Enforced)
  {
    log("clause " + request.clause_id + " rejected locally: " +
        std::string{slc::to_string(response.reason)});
    throw Error(Errc::EnforcementAborted,
                "clause rejected: " + std::string{slc::to_string(response.reason)});
  }
  auto const tx     = submit_enforcement(request, response);
  auto const result = session_.await_inclusion(tx, options_.inclusion_timeout);
  if (result.status != middleware::InclusionStatus::Accepted)
  {
    if (result.status == middleware::InclusionStatus::Rejected)
    {
      material_.erase(tx);
    }
    else
    {
      orphaned_[tx] = OpenCall{tx, request, response};
    }
    throw Error(Errc::EnforcementAborted,
                std::string{middleware::to_string(result.status)} + " " + result.detail);
  }
  auto envelope = diffuse(request, response, tx, result.height);
  sync();
  return envelope;
}

void Participant::sync()
{
  session_.poll();
  apply_chain();
}

void Participant::apply_chain()
{
  if (!replica_)
  {
    return;
  }
  while (!chain_.empty())
  {
    auto const &item = chain_.front();
    bool const  anchored =
        std::any_of(item.events.begin(), item.events.end(),
                    [](auto const &e) { return e.kind == EventKind::MessageAnchored; });
    if (anchored)
    {
      if (!apply_anchor(item))
      {
        return;
      }
    }
    else
    {
      apply_mirror(item);
    }
    chain_.pop_front();
  }
}

bool Participant::apply_anchor(ChainItem const &item)
{
  auto const it = material_.find(item.tx_id);
  if (it == material_.end())
  {
    return false;
  }
  auto const &event = *std::find_if(item.events.begin(), item.events.end(),
                                    [](auto const &e) { return e.kind == EventKind::MessageAnchored; });
  auto const  response_digest = Digest::from_hex(*event.field("response_digest"));
  auto const  material        = std::move(it->second);
  material_.erase(it);
  settled_.insert(item.tx_id);

  std::optional<Verdict> verdict;
  try
  {
    auto const request = slc::ClauseRequest::decode(material.request);
    auto const response =
        crypto::hash(material.response) == response_digest
            ? slc::ClauseResponse::decode(material.response)
            : replica_->evaluate(request);  // sender altered the response bytes
    if (crypto::hash(response.encode()) != response_digest)
    {
      throw Error(Errc::DivergentResponse, "re-execution does not reproduce the anchored response");
    }
    replica_->apply_remote(request, response);
    verdict = Verdict::Accepted;
    log("applied " + request.clause_id + " tx=" + item.tx_id.hex().substr(0, 16));
  }
  catch (Error const &e)
  {
    verdict = e.code() == Errc::StaleRequest ? Verdict::StaleRequest : Verdict::DivergentResponse;
    log("skipped tx=" + item.tx_id.hex().substr(0, 16) + " " + e.what());
  }

  if (!material.envelope || !material.verified)
  {
    return true;  // own request, or already recorded as rejected
  }
  auto const &envelope = *material.envelope;
  auto const  height   = session_.ledger().height();
  if (*verdict == Verdict::Accepted)
  {
    auto const anchor = session_.anchor_by_tx(item.tx_id);
    if (!anchor || anchor->removed)
    {
      verdict = Verdict::NotAnchored;
    }
    else
    {
      acceptances_.push_back(AcceptanceRecord{item.tx_id, anchor->request_digest, anchor->height,
                                              height, session_.has_anchor(anchor->request_digest)});
    }
  }
  if (*verdict == Verdict::Accepted)
  {
    store_->record(audit::InboundRecord{Verdict::Accepted, height, envelope});
  }
  else
  {
    reject(envelope, *verdict);
  }
  return true;
}

void Participant::apply_mirror(ChainItem const &item)
{
  slc::OnChainChange change;
  bool               relevant{false};
  for (auto const &event : item.events)
  {
    switch (event.kind)
    {
    case EventKind::SlcHashAnchored:
      change.origin = "activation";
      relevant      = true;
      break;
    case EventKind::HashRemoved:
      change.removed_request = Digest::from_hex(*event.field("request_digest"));
      relevant               = true;
      break;
    case EventKind::StateChanged:
      change.contract = replica_->state_codes().decode(
          static_cast<std::uint32_t>(std::stoul(*event.field("to"))));
      relevant = true;
      break;
    case EventKind::ClauseChanged:
    {
      auto const id = replica_->clause_id_for(Digest::from_hex(*event.field("clause_ref")));
      if (id)
      {
        change.clauses.emplace_back(*id, static_cast<ClauseState>(std::stoi(*event.field("state"))));
        relevant = true;
      }
      break;
    }
    default:
      break;
    }
  }
  if (!relevant)
  {
    return;
  }
  if (change.origin.empty())
  {
    if (change.removed_request)
    {
      change.origin = "removal";
    }
    else if (change.contract == ContractState::Litigation)
    {
      change.origin = "litigation";
    }
    else if (change.contract == ContractState::Completed)
    {
      change.origin = "completion";
    }
    else
    {
      change.origin = "resolution";
    }
  }
  log("mirrored " + change.origin + " at height " + std::to_string(item.height));
  replica_->apply_onchain(change);
}

void Participant::escalate()
{
  if (litigation_tx_)
  {
    if (session_.status(*litigation_tx_, options_.inclusion_timeout).status ==
        middleware::InclusionStatus::Pending)
    {
      return;
    }
    litigation_tx_.reset();
  }
  if (!want_litigation_ || !replica_)
  {
    return;
  }
  want_litigation_ = false;
  if (session_.get_state() != ContractState::InExecution)
  {
    return;
  }
  log("raising litigation");
  litigation_tx_ = session_.submit_raise_litigation();
  ++litigations_raised_;
}

void Participant::refresh_variables(ProcessInstance &instance, std::uint64_t now) const
{
  instance.variables["now"] = static_cast<std::int64_t>(now);
  if (!replica_)
  {
    return;
  }
  for (auto const &[name, value] : replica_->static_data())
  {
    instance.variables[name] = value;
  }
  for (auto const &[name, value] : replica_->variables())
  {
    instance.variables[name] = value;
  }
  instance.variables["contract_state"] = std::string{bsc::to_string(replica_->contract_state())};
  for (auto const &clause : replica_->contract_template().clauses)
  {
    instance.variables["clause." + clause.id] =
        std::string{bsc::to_string(replica_->clause_state(clause.id))};
  }
}

void Participant::step(std::uint64_t now)
{
  sync();
  for (auto it = orphaned_.begin(); it != orphaned_.end();)
  {
    auto const st = session_.status(it->first, ~std::uint64_t{0});
    if (st.status == middleware::InclusionStatus::Accepted)
    {
      diffuse(it->second.request, it->second.response, it->first, st.height);
    }
    if (st.status == middleware::InclusionStatus::Pending)
    {
      ++it;
      continue;
    }
    if (st.status == middleware::InclusionStatus::Rejected)
    {
      material_.erase(it->first);
    }
    it = orphaned_.erase(it);
  }
  escalate();
  if (process_ && !process_->finished())
  {
    refresh_variables(*process_, now);
    bpee::step(*process_, now, *this);
  }
}

bool Participant::caught_up() const
{
  return chain_.empty() && open_calls_.empty() && orphaned_.empty() &&
         session_.last_processed().value_or(0) >= session_.ledger().height();
}

NodeProgress Participant::run_task(ProcessNode const &node, ProcessInstance &instance)
{
  auto const it = tasks_.find(node.handler);
  if (it == tasks_.end())
  {
    throw Error(Errc::ConfigError, "no task handler '" + node.handler + "'");
  }
  return it->second(node, instance);
}

NodeProgress Participant::clause_call(ProcessNode const &node, ProcessInstance &instance)
{
  if (!replica_)
  {
    throw Error(Errc::EnforcementAborted, "no contract attached");
  }
  auto const status_var = node.id + ".status";
  auto const reason_var = node.id + ".reason";
  auto const open       = open_calls_.find(node.id);
  if (open == open_calls_.end())
  {
    slc::ValueMap params;
    for (auto const &[name, operand] : node.params)
    {
      params[name] = evaluate_operand(operand, instance.variables);
    }
    auto request  = make_request(node.clause, std::move(params));
    auto response = replica_->evaluate(request);
    if (response.status != slc::ResponseStatus::Enforced)
    {
      log("clause " + node.clause + " rejected locally: " +
          std::string{slc::to_string(response.reason)});
      instance.variables[status_var] = std::string{"rejected"};
      instance.variables[reason_var] = std::string{slc::to_string(response.reason)};
      return NodeProgress::Complete;
    }
    auto const tx = submit_enforcement(request, response);
    open_calls_.emplace(node.id, OpenCall{tx, std::move(request), std::move(response)});
    instance.variables[status_var] = std::string{"pending"};
    return NodeProgress::Waiting;
  }

  auto const st = session_.status(open->second.tx_id, options_.inclusion_timeout);
  switch (st.status)
  {
  case middleware::InclusionStatus::Pending:
    return NodeProgress::Waiting;
  case middleware::InclusionStatus::Accepted:
    diffuse(open->second.request, open->second.response, open->second.tx_id, st.height);
    instance.variables[status_var] = std::string{"enforced"};
    instance.variables[reason_var] = std::string{};
    break;
  case middleware::InclusionStatus::Rejected:
    log("anchor for " + node.clause + " rejected: " + st.detail);
    material_.erase(open->second.tx_id);
    instance.variables[status_var] = std::string{"aborted"};
    instance.variables[reason_var] = std::string{st.error ? to_string(*st.error) : "Rejected"};
    break;
  case middleware::InclusionStatus::TimedOut:
    log("anchor for " + node.clause + " timed out");
    orphaned_[open->second.tx_id]  = open->second;
    instance.variables[status_var] = std::string{"aborted"};
    instance.variables[reason_var] = std::string{"Timeout"};
    break;
  }
  open_calls_.erase(open);
  return NodeProgress::Complete;
}

void Participant::send_message(ProcessNode const &node, ProcessInstance &instance)
{
  auto const it = contacts_.find(node.to);
  if (it == contacts_.end())
  {
    throw Error(Errc::ConfigError, "no contact for role '" + node.to + "'");
  }
  slc::ValueMap fields;
  for (auto const &[name, operand] : node.params)
  {
    fields[name] = evaluate_operand(operand, instance.variables);
  }
  slc::ClauseRequest body{node.topic, address(), std::move(fields), 0};
  auto envelope = MessageEnvelope::make(key(), Digest{}, EnvelopeKind::Document, node.topic,
                                        body.encode(), {}, Digest{});
  log("sending " + node.topic + " to " + node.to);
  store_->record(audit::PreContractRecord{true, session_.ledger().height(), envelope});
  outbox_.send(address(), it->second.first, std::move(envelope));
}

bool Participant::message_received(std::string_view topic) const
{
  return topics_.count(std::string{topic}) != 0;
}

}  // namespace anchorpact::bpee
