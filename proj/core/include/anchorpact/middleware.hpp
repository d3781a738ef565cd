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
#include "anchorpact/ledger.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace anchorpact::middleware {

enum class InclusionStatus
{
  Pending,
  Accepted,
  Rejected,
  TimedOut,
};

std::string_view to_string(InclusionStatus status) noexcept;

struct InclusionResult
{
  InclusionStatus        status{InclusionStatus::Pending};
  std::optional<Errc>    error;
  std::string            detail;
  std::uint64_t          height{0};
  std::optional<Address> created;
};

/// One participant's signed view of the ledger. Holds that participant's key
/// only and tracks its own transaction nonces.
class Session
{
public:
  static constexpr std::uint64_t kDefaultTimeoutBlocks = 10;

  /// `last_processed` is the height whose events were already handled; watch
  /// deliveries resume strictly after it.
  Session(ledger::Ledger &ledger, KeyPair key, std::optional<Address> bsc = std::nullopt,
          std::optional<std::uint64_t> last_processed = std::nullopt);

  Address const &address() const noexcept
  {
    return key_.address;
  }
  KeyPair const &key() const noexcept
  {
    return key_;
  }
  /// Binds to a contract; watch deliveries restart at `from_height`.
  void bind(Address const &bsc, std::uint64_t from_height = 0) noexcept
  {
    bsc_         = bsc;
    next_height_ = from_height;
  }
  std::optional<Address> const &bsc() const noexcept
  {
    return bsc_;
  }
  ledger::Ledger &ledger() noexcept
  {
    return ledger_;
  }
  ledger::Ledger const &ledger() const noexcept
  {
    return ledger_;
  }

  /// Signs and queues the call. Returns the transaction id. Submission-time
  /// rejections surface through status().
  Digest submit(ledger::ContractCall call);

  Digest submit_deploy(bsc::ConstructorArgs const &args);
  Digest submit_anchor_slc_hash(Digest const &slc_hash);
  Digest submit_anchor(Digest const &request_digest, Digest const &response_digest,
                       std::optional<bsc::ClauseEffect> const &clause_effect,
                       std::optional<std::uint32_t>            state_effect_code);
  Digest submit_raise_litigation();
  Digest submit_remove_anchor(Digest const &request_digest);
  Digest submit_resolve(std::uint32_t outcome_code, std::vector<bsc::ClauseEffect> const &overrides);

  /// Non-blocking. A submission still pending `timeout_blocks` after it was
  /// queued reports TimedOut.
  InclusionResult status(Digest const &tx_id,
                         std::uint64_t timeout_blocks = kDefaultTimeoutBlocks) const;

  /// Drives block production until the transaction settles or the timeout
  /// elapses.
  InclusionResult await_inclusion(Digest const &tx_id,
                                  std::uint64_t timeout_blocks = kDefaultTimeoutBlocks);

  using Callback       = std::function<void(ledger::LedgerEvent const &)>;
  using SubscriptionId = std::size_t;

  /// Events of the bound contract, optionally of one kind. Each matching
  /// event reaches the callback exactly once, in chain order, on poll().
  SubscriptionId watch(Callback callback, std::optional<ledger::EventKind> kind = std::nullopt);
  void           unwatch(SubscriptionId id);

  /// Delivers events from newly committed blocks. Returns the number delivered.
  std::size_t poll();

  /// Highest height whose events were delivered to every subscription.
  std::optional<std::uint64_t> last_processed() const noexcept
  {
    return next_height_ == 0 ? std::nullopt : std::optional<std::uint64_t>{next_height_ - 1};
  }

  std::uint32_t                   get_state_code() const;
  bsc::ContractState              get_state() const;
  bool                            has_anchor(Digest const &request_digest) const;
  std::optional<bsc::AnchorRecord> anchor_by_tx(Digest const &tx_id) const;
  std::optional<bsc::AnchorRecord> find_anchor(Digest const &request_digest) const;
  bsc::ClauseRecord               get_clause(Digest const &clause_ref) const;
  std::vector<bsc::AnchorRecord>  list_anchors() const;

private:
  Address const &bound() const;

  struct Submission
  {
    std::uint64_t                  queued_at{0};
    std::optional<ledger::Receipt> immediate;
  };

  struct Subscription
  {
    Callback                         callback;
    std::optional<ledger::EventKind> kind;
  };

  ledger::Ledger                        &ledger_;
  KeyPair                                key_;
  std::optional<Address>                 bsc_;
  std::uint64_t                          nonce_{0};
  std::uint64_t                          next_height_{0};
  std::map<Digest, Submission>           submissions_;
  std::map<SubscriptionId, Subscription> subscriptions_;
  SubscriptionId                         next_subscription_{0};
};

}  // namespace anchorpact::middleware
