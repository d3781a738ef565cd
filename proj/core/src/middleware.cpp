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


#include "anchorpact/middleware.hpp"

#include "anchorpact/error.hpp"

namespace anchorpact::middleware {

std::string_view to_string(InclusionStatus status) noexcept
{
  switch (status)
  {
  case InclusionStatus::Pending:
    return "Pending";
  case InclusionStatus::Accepted:
    return "Accepted";
  case InclusionStatus::Rejected:
    return "Rejected";
  case InclusionStatus::TimedOut:
    return "TimedOut";
  }
  return "unknown";
}

Session::Session(ledger::Ledger &ledger, KeyPair key, std::optional<Address> bsc,
                 std::optional<std::uint64_t> last_processed)
  : ledger_{ledger}
  , key_{std::move(key)}
  , bsc_{bsc}
  , next_height_{last_processed ? *last_processed + 1 : 0}
{}

Address const &Session::bound() const
{
  if (!bsc_)
  {
    throw Error(Errc::UnknownContract, "session is not bound to a contract");
  }
  return *bsc_;
}

Digest Session::submit(ledger::ContractCall call)
{
  auto tx      = ledger::Transaction::make(key_, ++nonce_, std::move(call));
  auto const id = tx.id;
  Submission s;
  s.queued_at  = ledger_.height();
  auto receipt = ledger_.submit(std::move(tx));
  if (receipt.status == ledger::TxStatus::Rejected)
  {
    s.immediate = std::move(receipt);
  }
  submissions_[id] = std::move(s);
  return id;
}

Digest Session::submit_deploy(bsc::ConstructorArgs const &args)
{
  return submit(bsc::calls::deploy(args));
}

Digest Session::submit_anchor_slc_hash(Digest const &slc_hash)
{
  return submit(bsc::calls::anchor_slc_hash(bound(), slc_hash));
}

Digest Session::submit_anchor(Digest const &request_digest, Digest const &response_digest,
                              std::optional<bsc::ClauseEffect> const &clause_effect,
                              std::optional<std::uint32_t>            state_effect_code)
{
  return submit(bsc::calls::anchor_message(bound(), request_digest, response_digest,
                                           clause_effect, state_effect_code));
}

Digest Session::submit_raise_litigation()
{
  return submit(bsc::calls::raise_litigation(bound()));
}

Digest Session::submit_remove_anchor(Digest const &request_digest)
{
  return submit(bsc::calls::mediator_remove_anchor(bound(), request_digest));
}

Digest Session::submit_resolve(std::uint32_t outcome_code,
                               std::vector<bsc::ClauseEffect> const &overrides)
{
  return submit(bsc::calls::mediator_resolve(bound(), outcome_code, overrides));
}

InclusionResult Session::status(Digest const &tx_id, std::uint64_t timeout_blocks) const
{
  InclusionResult out;
  auto const      it = submissions_.find(tx_id);
  auto            receipt =
      it != submissions_.end() && it->second.immediate ? it->second.immediate : ledger_.receipt(tx_id);
  if (!receipt)
  {
    throw Error(Errc::UnknownTx, tx_id.hex());
  }
  switch (receipt->status)
  {
  case ledger::TxStatus::Accepted:
    out.status = InclusionStatus::Accepted;
    break;
  case ledger::TxStatus::Rejected:
    out.status = InclusionStatus::Rejected;
    break;
  case ledger::TxStatus::Pending:
    out.status = InclusionStatus::Pending;
    if (it != submissions_.end() && ledger_.height() >= it->second.queued_at + timeout_blocks)
    {
      out.status = InclusionStatus::TimedOut;
    }
    break;
  }
  out.error   = receipt->error;
  out.detail  = receipt->detail;
  out.height  = receipt->height;
  out.created = receipt->created;
  return out;
}

InclusionResult Session::await_inclusion(Digest const &tx_id, std::uint64_t timeout_blocks)
{
  for (std::uint64_t waited = 0;; ++waited)
  {
    auto result = status(tx_id, timeout_blocks + 1);
    if (result.status != InclusionStatus::Pending)
    {
      return result;
    }
    if (waited >= timeout_blocks)
    {
      result.status = InclusionStatus::TimedOut;
      return result;
    }
    ledger_.tick();
  }
}

Session::SubscriptionId Session::watch(Callback callback, std::optional<ledger::EventKind> kind)
{
  auto const id        = next_subscription_++;
  subscriptions_[id] = Subscription{std::move(callback), kind};
  return id;
}

void Session::unwatch(SubscriptionId id)
{
  subscriptions_.erase(id);
}

std::size_t Session::poll()
{
  auto const top = ledger_.height();
  if (!bsc_ || next_height_ > top)
  {
    if (!bsc_)
    {
      next_height_ = top + 1;
    }
    return 0;
  }
  ledger::EventFilter filter;
  filter.contract    = *bsc_;
  filter.from_height = next_height_;
  filter.to_height   = top;
  auto const events  = ledger_.events(filter);
  next_height_       = top + 1;

  std::size_t delivered{0};
  for (auto const &event : events)
  {
    for (auto const &[id, sub] : subscriptions_)
    {
      if (!sub.kind || *sub.kind == event.kind)
      {
        sub.callback(event);
        ++delivered;
      }
    }
  }
  return delivered;
}

std::uint32_t Session::get_state_code() const
{
  return ledger_.inspect<bsc::Bsc>(bound(), [](bsc::Bsc const &c) { return c.state_code(); });
}

bsc::ContractState Session::get_state() const
{
  return ledger_.inspect<bsc::Bsc>(bound(), [](bsc::Bsc const &c) { return c.state(); });
}

bool Session::has_anchor(Digest const &request_digest) const
{
  return ledger_.inspect<bsc::Bsc>(bound(),
                                   [&](bsc::Bsc const &c) { return c.has_anchor(request_digest); });
}

std::optional<bsc::AnchorRecord> Session::anchor_by_tx(Digest const &tx_id) const
{
  return ledger_.inspect<bsc::Bsc>(bound(), [&](bsc::Bsc const &c) {
    auto const *rec = c.anchor_by_tx(tx_id);
    return rec == nullptr ? std::nullopt : std::optional<bsc::AnchorRecord>{*rec};
  });
}

std::optional<bsc::AnchorRecord> Session::find_anchor(Digest const &request_digest) const
{
  return ledger_.inspect<bsc::Bsc>(bound(), [&](bsc::Bsc const &c) {
    auto const *rec = c.find_anchor(request_digest);
    return rec == nullptr ? std::nullopt : std::optional<bsc::AnchorRecord>{*rec};
  });
}

bsc::ClauseRecord Session::get_clause(Digest const &clause_ref) const
{
  return ledger_.inspect<bsc::Bsc>(bound(),
                                   [&](bsc::Bsc const &c) { return c.get_clause(clause_ref); });
}

std::vector<bsc::AnchorRecord> Session::list_anchors() const
{
  return ledger_.inspect<bsc::Bsc>(bound(), [](bsc::Bsc const &c) { return c.list_anchors(); });
}

}  // namespace anchorpact::middleware
