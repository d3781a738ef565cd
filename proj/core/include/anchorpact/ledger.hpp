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

#include "anchorpact/codec.hpp"
#include "anchorpact/crypto.hpp"
#include "anchorpact/error.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace anchorpact::ledger {

/// Invocation of a hosted contract. A zero `contract` address denotes a
/// deployment; `operation` then names the registered contract code.
struct ContractCall
{
  Address            contract;
  std::string        operation;
  std::vector<Bytes> args;

  void               encode(codec::Writer &out) const;
  static ContractCall decode(codec::Reader &in);

  bool operator==(ContractCall const &) const = default;
};

struct Transaction
{
  Digest        id;
  Address       submitter;
  PublicKey     submitter_key;
  std::uint64_t nonce{0};
  ContractCall  call;
  Signature     signature;

  /// Bytes covered by the submitter's signature.
  Bytes signing_bytes() const;
  /// Full canonical encoding without the id field.
  Bytes  canonical_bytes() const;
  Digest compute_id() const;
  /// Key matches the submitter address, signature verifies and id is consistent.
  bool signature_valid() const noexcept;

  static Transaction make(KeyPair const &key, std::uint64_t nonce, ContractCall call);
  static Transaction decode(ByteView canonical);
};

struct Block
{
  std::uint64_t            height{0};
  Digest                   prev;
  std::vector<Transaction> transactions;
  Digest                   digest;

  Bytes  body_bytes() const;
  Digest compute_digest() const;
  /// Body followed by the stored digest; the dump line payload.
  Bytes        encode() const;
  static Block decode(ByteView encoded);
};

enum class EventKind
{
  ContractDeployed,
  SlcHashAnchored,
  MessageAnchored,
  ClauseChanged,
  StateChanged,
  HashRemoved,
};

std::string_view to_string(EventKind kind) noexcept;

using Payload = std::vector<std::pair<std::string, std::string>>;

struct EmittedEvent
{
  EventKind kind;
  Payload   payload;
};

struct LedgerEvent
{
  EventKind     kind;
  Address       contract;
  Payload       payload;
  std::uint64_t height{0};
  std::uint64_t index{0};  // position within the block's event sequence
  Digest        tx_id;

  /// Payload value by name, or nullptr.
  std::string const *field(std::string_view name) const noexcept;

  bool operator==(LedgerEvent const &) const = default;
};

struct CallContext
{
  Address       caller;
  std::uint64_t height{0};
  Digest        tx_id;
};

/// Contract code hosted by the ledger. `execute` throws anchorpact::Error to
/// reject a call; the ledger runs it against a clone so rejection leaves the
/// committed state untouched.
class HostedContract
{
public:
  virtual ~HostedContract() = default;

  virtual std::vector<EmittedEvent>       execute(CallContext const &ctx, ContractCall const &call) = 0;
  virtual Bytes                           serialize() const = 0;
  virtual std::unique_ptr<HostedContract> clone() const = 0;
};

using ContractFactory = std::function<std::unique_ptr<HostedContract>(
    CallContext const &ctx, std::vector<Bytes> const &args, std::vector<EmittedEvent> &events)>;

using ContractRegistry = std::map<std::string, ContractFactory, std::less<>>;

enum class TxStatus
{
  Pending,
  Accepted,
  Rejected,
};

struct Receipt
{
  Digest                 tx_id;
  TxStatus               status{TxStatus::Pending};
  std::optional<Errc>    error;
  std::string            detail;
  std::uint64_t          height{0};
  std::uint64_t          index{0};
  std::optional<Address> created;
};

struct EventFilter
{
  std::optional<Address>       contract;
  std::optional<EventKind>     kind;
  std::optional<std::uint64_t> from_height;
  std::optional<std::uint64_t> to_height;
};

/// Deterministic single-writer chain. A genesis block (height 0) exists from
/// construction; each produce_block() appends exactly one block.
class Ledger
{
public:
  explicit Ledger(ContractRegistry registry);

  Ledger(Ledger const &)            = delete;
  Ledger &operator=(Ledger const &) = delete;
  Ledger(Ledger &&)                 = delete;
  Ledger &operator=(Ledger &&)      = delete;

  /// Queues the transaction for the next block. Signature and target checks
  /// happen immediately; such rejections are never included.
  Receipt submit(Transaction tx);

  /// Submits a deployment and produces the block containing it.
  /// Throws Error(DeployRejected) or Error(BadSignature).
  Address deploy_contract(Transaction tx);

  Block const &produce_block();

  /// One clock tick: produces a block unless production is paused.
  void tick();
  void set_paused(bool paused) noexcept
  {
    paused_ = paused;
  }
  bool paused() const noexcept
  {
    return paused_;
  }

  std::uint64_t height() const;
  std::size_t   pending_count() const;

  std::vector<Block>       blocks() const;
  std::vector<LedgerEvent> events(EventFilter const &filter = {}) const;
  std::optional<Receipt>   receipt(Digest const &tx_id) const;
  bool                     has_contract(Address const &address) const;
  std::vector<Address>     contracts() const;

  /// Runs `fn` against the committed contract state under a shared lock.
  template <typename Contract, typename Fn>
  auto inspect(Address const &address, Fn &&fn) const
  {
    std::shared_lock lock{mutex_};
    auto const       it = contracts_.find(address);
    if (it == contracts_.end())
    {
      throw Error(Errc::UnknownContract, address.hex());
    }
    auto const *typed = dynamic_cast<Contract const *>(it->second.get());
    if (typed == nullptr)
    {
      throw Error(Errc::UnknownContract, "contract type mismatch");
    }
    return fn(*typed);
  }

  /// Every hosted contract's serialized state followed by the event log.
  Bytes state_snapshot() const;

  /// Recomputes digests and prev links over the whole chain.
  bool verify_chain() const;

  void export_dump(std::ostream &out) const;

  /// Parses and verifies a dump, then re-executes it. Throws Error(Decode)
  /// on malformed lines or broken linkage.
  static std::unique_ptr<Ledger> import_dump(std::istream &in, ContractRegistry registry);
  static std::vector<Block>      parse_dump(std::istream &in);

  /// Re-executes the given blocks from genesis, dropping transactions for
  /// which `skip` returns true. One block is produced per source block.
  static std::unique_ptr<Ledger> replay(std::vector<Block> const &blocks, ContractRegistry registry,
                                        std::function<bool(Transaction const &)> const &skip = {});

private:
  void append_block_locked();
  void execute_locked(Transaction const &tx, std::uint64_t height, std::uint64_t tx_index,
                      std::uint64_t &event_index);

  ContractRegistry                                     registry_;
  mutable std::shared_mutex                            mutex_;
  std::vector<Block>                                   chain_;
  std::vector<Transaction>                             pending_;
  std::map<Address, std::unique_ptr<HostedContract>>   contracts_;
  std::vector<LedgerEvent>                             events_;
  std::map<Digest, Receipt>                            receipts_;
  bool                                                 paused_{false};
};

}  // namespace anchorpact::ledger
