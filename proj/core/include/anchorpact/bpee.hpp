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

#include "anchorpact/envelope.hpp"
#include "anchorpact/local_store.hpp"
#include "anchorpact/middleware.hpp"
#include "anchorpact/process.hpp"
#include "anchorpact/slc.hpp"

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace anchorpact::bpee {

/// Anything that can carry an envelope to another participant.
class Outbox
{
public:
  virtual ~Outbox() = default;

  virtual void send(Address const &from, Address const &to, MessageEnvelope envelope) = 0;
};

struct TransportOptions
{
  std::uint64_t min_delay{1};
  std::uint64_t max_delay{3};
  double        drop_probability{0.0};
  std::uint64_t retransmit_after{2};
};

struct Delivery
{
  Address         from;
  Address         to;
  MessageEnvelope envelope;
};

/// Simulated point-to-point transport. Every message eventually arrives:
/// a dropped transmission is retried after `retransmit_after` ticks.
class MessageBus final : public Outbox
{
public:
  MessageBus(TransportOptions options, std::uint64_t seed);

  void set_now(std::uint64_t now) noexcept
  {
    now_ = now;
  }

  void send(Address const &from, Address const &to, MessageEnvelope envelope) override;

  /// Messages due at or before `now`, in deterministic order.
  std::vector<Delivery> due(std::uint64_t now);

  bool idle() const noexcept
  {
    return queue_.empty();
  }

  std::uint64_t sent() const noexcept
  {
    return sent_;
  }
  std::uint64_t dropped() const noexcept
  {
    return dropped_;
  }

private:
  std::uint64_t schedule(std::uint64_t from);

  struct Pending
  {
    std::uint64_t at{0};
    std::uint64_t seq{0};
    Delivery      delivery;
  };

  TransportOptions     options_;
  std::mt19937_64      rng_;
  std::uint64_t        now_{0};
  std::uint64_t        seq_{0};
  std::uint64_t        sent_{0};
  std::uint64_t        dropped_{0};
  std::vector<Pending> queue_;
};

/// Checks (a) sender is a party with a valid signature and (b) `anchor_ref`
/// resolves to a live anchor by that sender whose digests match. Does not
/// touch the replica.
using AnchorLookup = std::function<std::optional<bsc::AnchorRecord>(Digest const &tx_id)>;
Verdict check_envelope(MessageEnvelope const &envelope, slc::SlcInstance const &replica,
                       AnchorLookup const &lookup);

/// Evidence that an accepted envelope was anchored before acceptance.
struct AcceptanceRecord
{
  Digest        tx_id;
  Digest        request_digest;
  std::uint64_t anchor_height{0};
  std::uint64_t accept_height{0};
  bool          anchored_at_accept{false};
};

struct ParticipantOptions
{
  std::size_t   conflict_threshold{1};
  std::uint64_t inclusion_timeout{middleware::Session::kDefaultTimeoutBlocks};
};

class Participant;

/// Observer hooks for the harness. Called before the action they describe
/// completes.
struct Observer
{
  std::function<void(std::string const &line)> log;
  std::function<void(Participant const &, Digest const &tx_id, Bytes const &request,
                     Bytes const &response)>
      anchor_submitted;
};

using TaskHandler = std::function<NodeProgress(ProcessNode const &, ProcessInstance &)>;
/// Lets a misbehaving sender rewrite the response bytes it diffuses.
using ResponseFilter = std::function<void(slc::ClauseRequest const &, Bytes &response)>;

/// One participant: local process, SLC replica, ledger session and store.
/// Applies anchored requests in chain order so every replica converges.
class Participant final : public ProcessHost
{
public:
  Participant(std::string role, KeyPair key, ledger::Ledger &ledger, Outbox &outbox,
              std::unique_ptr<audit::LocalStore> store, ParticipantOptions options = {});

  std::string const &role() const noexcept
  {
    return role_;
  }
  Address const &address() const noexcept
  {
    return session_.address();
  }
  KeyPair const &key() const noexcept
  {
    return session_.key();
  }
  middleware::Session &session() noexcept
  {
    return session_;
  }
  audit::LocalStore const &store() const noexcept
  {
    return *store_;
  }

  /// Role name to (address, key) for addressing and pre-contract documents.
  void add_contact(std::string const &role, Address const &address, PublicKey const &key);

  /// Installs the signed replica and binds session and store to its BSC.
  void attach(slc::SlcInstance replica);
  bool attached() const noexcept
  {
    return replica_.has_value();
  }
  /// Throws std::logic_error before attach().
  slc::SlcInstance const &replica() const;

  void start_process(std::shared_ptr<ProcessDefinition const> definition, std::uint64_t now,
                     Variables const &overrides = {});
  ProcessInstance const *process() const noexcept
  {
    return process_ ? &*process_ : nullptr;
  }

  void on_task(std::string const &handler, TaskHandler fn);
  void set_response_filter(ResponseFilter filter)
  {
    response_filter_ = std::move(filter);
  }
  void set_observer(Observer observer)
  {
    observer_ = std::move(observer);
  }

  /// Handles one inbound envelope. Returns the verdict once decided, or
  /// nullopt while a verified envelope waits for its turn in chain order.
  std::optional<Verdict> on_message(MessageEnvelope const &envelope);

  /// Evaluate, anchor, await inclusion, diffuse. Throws
  /// Error(EnforcementAborted) when the clause rejects or the anchor fails;
  /// the replica is unchanged in that case.
  MessageEnvelope send_enforcement(slc::ClauseRequest request);

  /// Builds a request from this participant for `clause_id` with a fresh nonce.
  slc::ClauseRequest make_request(std::string clause_id, slc::ValueMap parameters);

  /// Signs and sends an envelope that was never anchored.
  MessageEnvelope diffuse_unanchored(slc::ClauseRequest const &request,
                                     slc::ClauseResponse const &response);

  /// Pulls new chain events and applies whatever is ready in chain order.
  void sync();

  /// One scheduler slot: sync, settle own submissions, fire the process.
  void step(std::uint64_t now);

  /// True when every committed anchor has been applied or skipped.
  bool caught_up() const;

  std::vector<AcceptanceRecord> const &acceptances() const noexcept
  {
    return acceptances_;
  }
  std::size_t litigations_raised() const noexcept
  {
    return litigations_raised_;
  }

  // ProcessHost
  NodeProgress run_task(ProcessNode const &node, ProcessInstance &instance) override;
  NodeProgress clause_call(ProcessNode const &node, ProcessInstance &instance) override;
  void         send_message(ProcessNode const &node, ProcessInstance &instance) override;
  bool         message_received(std::string_view topic) const override;

private:
  struct Material
  {
    Bytes                          request;
    Bytes                          response;
    std::optional<MessageEnvelope> envelope;  // absent for own requests
    bool                           verified{false};
  };

  struct ChainItem
  {
    Digest                           tx_id;
    std::uint64_t                    height{0};
    std::vector<ledger::LedgerEvent> events;
  };

  struct OpenCall
  {
    Digest              tx_id;
    slc::ClauseRequest  request;
    slc::ClauseResponse response;
  };

  void     log(std::string const &line) const;
  Digest   submit_enforcement(slc::ClauseRequest const &request, slc::ClauseResponse const &response);
  MessageEnvelope diffuse(slc::ClauseRequest const &request, slc::ClauseResponse const &response,
                          Digest const &tx_id, std::uint64_t height);
  void     reject(MessageEnvelope const &envelope, Verdict verdict);
  void     apply_chain();
  bool     apply_anchor(ChainItem const &item);
  void     apply_mirror(ChainItem const &item);
  void     refresh_variables(ProcessInstance &instance, std::uint64_t now) const;
  void     escalate();

  std::string                         role_;
  middleware::Session                 session_;
  Outbox                             &outbox_;
  std::unique_ptr<audit::LocalStore>  store_;
  ParticipantOptions                  options_;
  Observer                            observer_;
  ResponseFilter                      response_filter_;

  std::map<std::string, std::pair<Address, PublicKey>> contacts_;
  std::optional<slc::SlcInstance>                      replica_;
  std::optional<ProcessInstance>                       process_;
  std::map<std::string, TaskHandler>                   tasks_;
  std::set<std::string>                                topics_;
  std::vector<MessageEnvelope>                         early_;

  std::deque<ChainItem>          chain_;
  std::map<Digest, Material>     material_;
  std::set<Digest>               settled_;
  std::map<std::string, OpenCall> open_calls_;
  std::map<Digest, OpenCall>     orphaned_;
  std::uint64_t                  next_nonce_{0};

  std::map<Address, std::size_t> rejects_;
  bool                           want_litigation_{false};
  std::optional<Digest>          litigation_tx_;
  std::size_t                    litigations_raised_{0};
  std::vector<AcceptanceRecord>  acceptances_;
};

/// Maps a clause response to the effects the BSC must record.
std::optional<bsc::ClauseEffect> chain_clause_effect(slc::SlcInstance const    &replica,
                                                     slc::ClauseResponse const &response);
std::optional<std::uint32_t>     chain_state_effect(slc::SlcInstance const    &replica,
                                                    slc::ClauseResponse const &response);

}  // namespace anchorpact::bpee
