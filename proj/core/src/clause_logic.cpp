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

#include <algorithm>

// Built-in clause logic for the cold-chain supply contract. Handlers locate
// related clauses by logic id rather than clause id so templates can rename
// clauses freely.

namespace anchorpact::slc {
namespace {

using bsc::ClauseState;
using bsc::ContractState;

ClauseSpec const *clause_by_logic(LegalContractTemplate const &tmpl, std::string_view logic)
{
  auto const it = std::find_if(tmpl.clauses.begin(), tmpl.clauses.end(),
                               [&](ClauseSpec const &c) { return c.logic == logic; });
  return it == tmpl.clauses.end() ? nullptr : &*it;
}

std::optional<ClauseState> related_state(LogicContext const &ctx, std::string_view logic)
{
  auto const *spec = clause_by_logic(ctx.instance.contract_template(), logic);
  if (spec == nullptr)
  {
    return std::nullopt;
  }
  return ctx.instance.clause_state(spec->id);
}

bool requested_by(LogicContext const &ctx, std::string_view placeholder)
{
  auto const address = ctx.instance.placeholder_party(placeholder);
  return address && *address == ctx.request.requester;
}

double number_param(LogicContext const &ctx, std::string_view name)
{
  return *as_number(ctx.request.parameters.find(name)->second);
}

std::int64_t integer_param(LogicContext const &ctx, std::string_view name)
{
  return std::get<std::int64_t>(ctx.request.parameters.find(name)->second);
}

double static_number(LogicContext const &ctx, std::string_view name)
{
  auto const v = ctx.instance.static_value(name);
  return v ? as_number(*v).value_or(0.0) : 0.0;
}

std::int64_t variable_integer(LogicContext const &ctx, std::string_view name)
{
  auto const v = ctx.instance.variable(name);
  if (!v)
  {
    return 0;
  }
  auto const *i = std::get_if<std::int64_t>(&*v);
  return i ? *i : 0;
}

bool self_awaiting(LogicContext const &ctx)
{
  return ctx.instance.clause_state(ctx.clause.id) == ClauseState::Awaiting;
}

ClauseResponse deliver(LogicContext const &ctx)
{
  if (!requested_by(ctx, "supplier"))
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "only the supplier delivers");
  }
  if (!self_awaiting(ctx))
  {
    return ClauseResponse::rejected(RejectReason::PreconditionFailed, "delivery already settled");
  }
  auto const tick     = integer_param(ctx, "tick");
  auto const deadline = static_cast<std::int64_t>(static_number(ctx, "deadline"));
  bool const late     = tick > deadline;

  Effects effects;
  effects.clause    = std::make_pair(ctx.clause.id, ClauseState::Enforced);
  effects.variables = {{"delivered", std::int64_t{1}},
                       {"delivered_at", tick},
                       {"delivery_late", std::int64_t{late ? 1 : 0}}};
  return ClauseResponse::enforced(std::move(effects), late ? "delivered after deadline" : "delivered on time");
}

ClauseResponse accept_delivery(LogicContext const &ctx)
{
  if (!requested_by(ctx, "buyer"))
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "only the buyer accepts");
  }
  if (related_state(ctx, "deliver") != ClauseState::Enforced)
  {
    return ClauseResponse::rejected(RejectReason::WrongState, "goods not delivered yet");
  }
  if (related_state(ctx, "late_penalty") == ClauseState::Awaiting)
  {
    return ClauseResponse::rejected(RejectReason::WrongState, "late penalty not settled");
  }
  if (!self_awaiting(ctx))
  {
    return ClauseResponse::rejected(RejectReason::PreconditionFailed, "already accepted");
  }
  Effects effects;
  effects.clause    = std::make_pair(ctx.clause.id, ClauseState::Enforced);
  effects.contract  = ContractState::Completed;
  effects.variables = {{"accepted_at", integer_param(ctx, "tick")}};
  return ClauseResponse::enforced(std::move(effects), "goods accepted, contract fulfilled");
}

ClauseResponse late_penalty(LogicContext const &ctx)
{
  if (!requested_by(ctx, "buyer"))
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "only the buyer claims penalties");
  }
  if (related_state(ctx, "deliver") != ClauseState::Enforced)
  {
    return ClauseResponse::rejected(RejectReason::WrongState, "goods not delivered yet");
  }
  if (!self_awaiting(ctx))
  {
    return ClauseResponse::rejected(RejectReason::PreconditionFailed, "penalty already settled");
  }
  auto const &action = std::get<std::string>(ctx.request.parameters.find("action")->second);
  bool const  late   = variable_integer(ctx, "delivery_late") == 1;

  Effects effects;
  if (action == "claim")
  {
    if (!late)
    {
      return ClauseResponse::rejected(RejectReason::PreconditionFailed, "delivery was on time");
    }
    effects.clause    = std::make_pair(ctx.clause.id, ClauseState::Enforced);
    effects.variables = {{"penalty_due", static_number(ctx, "penalty")}};
    return ClauseResponse::enforced(std::move(effects), "late delivery penalty due");
  }
  if (action == "waive")
  {
    if (late)
    {
      return ClauseResponse::rejected(RejectReason::PreconditionFailed, "delivery was late");
    }
    effects.clause    = std::make_pair(ctx.clause.id, ClauseState::Cancelled);
    effects.variables = {{"penalty_due", 0.0}};
    return ClauseResponse::enforced(std::move(effects), "no penalty applies");
  }
  return ClauseResponse::rejected(RejectReason::MalformedRequest, "action must be claim or waive");
}

ClauseResponse terminate_on_breach(LogicContext const &ctx)
{
  if (!requested_by(ctx, "buyer"))
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "only the buyer may terminate");
  }
  if (!self_awaiting(ctx) || related_state(ctx, "accept") == ClauseState::Enforced)
  {
    return ClauseResponse::rejected(RejectReason::PreconditionFailed, "termination no longer possible");
  }
  auto const reading   = number_param(ctx, "reading");
  auto const threshold = static_number(ctx, "threshold");
  if (!(reading > threshold))
  {
    return ClauseResponse::rejected(RejectReason::PreconditionFailed, "reading within threshold");
  }
  Effects effects;
  effects.clause    = std::make_pair(ctx.clause.id, ClauseState::Enforced);
  effects.contract  = ContractState::Terminated;
  effects.variables = {{"breach_reading", reading}, {"terminated_at", integer_param(ctx, "tick")}};
  return ClauseResponse::enforced(std::move(effects), "cold chain broken, contract terminated at no cost");
}

ClauseResponse record_reading(LogicContext const &ctx)
{
  if (ctx.requester.role != bsc::Role::Oracle)
  {
    return ClauseResponse::rejected(RejectReason::UnauthorizedRequester, "only oracles report readings");
  }
  auto const reading = number_param(ctx, "reading");
  auto       max     = reading;
  if (auto const prev = ctx.instance.variable("max_reading"))
  {
    max = std::max(max, as_number(*prev).value_or(reading));
  }
  Effects effects;
  effects.variables = {{"last_reading", reading},
                       {"last_reading_at", integer_param(ctx, "tick")},
                       {"max_reading", max},
                       {"readings_count", variable_integer(ctx, "readings_count") + 1}};
  return ClauseResponse::enforced(std::move(effects), "reading recorded");
}

}  // namespace

std::shared_ptr<LogicRegistry const> LogicRegistry::standard()
{
  static auto const registry = [] {
    auto r = std::make_shared<LogicRegistry>();
    r->add("deliver", deliver);
    r->add("accept", accept_delivery);
    r->add("late_penalty", late_penalty);
    r->add("terminate_on_breach", terminate_on_breach);
    r->add("record_reading", record_reading);
    return std::shared_ptr<LogicRegistry const>{std::move(r)};
  }();
  return registry;
}

}  // namespace anchorpact::slc
