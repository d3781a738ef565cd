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

#include "anchorpact/ledger.hpp"

#include <algorithm>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>

namespace anchorpact::ledger {

void ContractCall::encode(codec::Writer &out) const
{
  out.fixed(contract).str(operation).u64(args.size());
  for (auto const &arg : args)
  {
    out.bytes(arg);
  }
}

ContractCall ContractCall::decode(codec::Reader &in)
{
  ContractCall call;
  call.contract  = in.fixed<Address::size, AddressTag>();
  call.operation = in.str();
  auto const n   = in.count();
  for (std::uint64_t i = 0; i < n; ++i)
  {
    auto const arg = in.bytes();
    call.args.emplace_back(arg.begin(), arg.end());
  }
  return call;
}

Bytes Transaction::signing_bytes() const
{
  codec::Writer out;
  out.str("anchorpact/tx").fixed(submitter).fixed(submitter_key).u64(nonce);
  codec::Writer call_out;
  call.encode(call_out);
  out.nested(call_out);
  return out.take();
}

Bytes Transaction::canonical_bytes() const
{
  codec::Writer out;
  out.fixed(submitter).fixed(submitter_key).u64(nonce);
  codec::Writer call_out;
  call.encode(call_out);
  out.nested(call_out).bytes(signature.bytes);
  return out.take();
}

Digest Transaction::compute_id() const
{
  return crypto::hash(canonical_bytes());
}

bool Transaction::signature_valid() const noexcept
{
  try
  {
    return crypto::derive_address(submitter_key) == submitter &&
           crypto::verify(submitter_key, signing_bytes(), signature) && compute_id() == id;
  }
  catch (...)
  {
    return false;
  }
}

Transaction Transaction::make(KeyPair const &key, std::uint64_t nonce, ContractCall call)
{
  Transaction tx;
  tx.submitter     = key.address;
  tx.submitter_key = key.public_key;
  tx.nonce         = nonce;
  tx.call          = std::move(call);
  tx.signature     = crypto::sign(key.secret, tx.signing_bytes());
  tx.id            = tx.compute_id();
  return tx;
}

Transaction Transaction::decode(ByteView canonical)
{
  codec::Reader in{canonical};
  Transaction   tx;
  tx.submitter     = in.fixed<Address::size, AddressTag>();
  tx.submitter_key = in.fixed<PublicKey::size, PublicKeyTag>();
  tx.nonce         = in.u64();
  auto call_in     = in.nested();
  tx.call          = ContractCall::decode(call_in);
  call_in.expect_end();
  auto const sig = in.bytes();
  tx.signature.bytes.assign(sig.begin(), sig.end());
  in.expect_end();
  tx.id = tx.compute_id();
  return tx;
}

Bytes Block::body_bytes() const
{
  codec::Writer out;
  out.str("anchorpact/block").u64(height).fixed(prev).u64(transactions.size());
  for (auto const &tx : transactions)
  {
    out.bytes(tx.canonical_bytes());
  }
  return out.take();
}

Digest Block::compute_digest() const
{
  return crypto::hash(body_bytes());
}

Bytes Block::encode() const
{
  codec::Writer out;
  out.bytes(body_bytes()).fixed(digest);
  return out.take();
}

Block Block::decode(ByteView encoded)
{
  codec::Reader outer{encoded};
  auto          body_in = outer.nested();
  Block         block;
  block.digest = outer.fixed<Digest::size, DigestTag>();
  outer.expect_end();

  if (body_in.str() != "anchorpact/block")
  {
    throw Error(Errc::Decode, "not a block record");
  }
  block.height = body_in.u64();
  block.prev   = body_in.fixed<Digest::size, DigestTag>();
  auto const n = body_in.count();
  for (std::uint64_t i = 0; i < n; ++i)
  {
    block.transactions.push_back(Transaction::decode(body_in.bytes()));
  }
  body_in.expect_end();
  return block;
}

std::string_view to_string(EventKind kind) noexcept
{
  switch (kind)
  {
  case EventKind::ContractDeployed:
    return "ContractDeployed";
  case EventKind::SlcHashAnchored:
    return "SlcHashAnchored";
  case EventKind::MessageAnchored:
    return "MessageAnchored";
  case EventKind::ClauseChanged:
    return "ClauseChanged";
  case EventKind::StateChanged:
    return "StateChanged";
  case EventKind::HashRemoved:
    return "HashRemoved";
  }
  return "Unknown";
}

std::string const *LedgerEvent::field(std::string_view name) const noexcept
{
  for (auto const &[key, value] : payload)
  {
    if (key == name)
    {
      return &value;
    }
  }
  return nullptr;
}

Ledger::Ledger(ContractRegistry registry)
  : registry_{std::move(registry)}
{
  append_block_locked();
}

Receipt Ledger::submit(Transaction tx)
{
  std::unique_lock lock{mutex_};
  Receipt          receipt;
  receipt.tx_id = tx.id;

  auto reject = [&](Errc code, std::string detail) {
    receipt.status = TxStatus::Rejected;
    receipt.error  = code;
    receipt.detail = std::move(detail);
    return receipt;
  };

  if (!tx.signature_valid())
  {
    return reject(Errc::BadSignature, "transaction signature does not verify");
  }
  if (receipts_.count(tx.id) != 0)
  {
    return reject(Errc::MalformedCall, "duplicate transaction id");
  }
  bool const deployment = tx.call.contract.is_zero();
  if (deployment ? registry_.find(tx.call.operation) == registry_.end()
                 : contracts_.count(tx.call.contract) == 0)
  {
    return reject(Errc::UnknownContract, tx.call.contract.hex());
  }

  receipts_[tx.id] = receipt;
  pending_.push_back(std::move(tx));
  return receipt;
}

Address Ledger::deploy_contract(Transaction tx)
{
  auto const id     = tx.id;
  auto const queued = submit(std::move(tx));
  if (queued.status == TxStatus::Rejected)
  {
    throw Error(*queued.error, queued.detail);
  }
  produce_block();
  auto const done = receipt(id);
  if (!done || done->status != TxStatus::Accepted || !done->created)
  {
    throw Error(Errc::DeployRejected, done ? done->detail : std::string{});
  }
  return *done->created;
}

Block const &Ledger::produce_block()
{
  std::unique_lock lock{mutex_};
  append_block_locked();
  return chain_.back();
}

void Ledger::tick()
{
  if (!paused_)
  {
    produce_block();
  }
}

void Ledger::append_block_locked()
{
  Block block;
  block.height       = chain_.size();
  block.prev         = chain_.empty() ? Digest{} : chain_.back().digest;
  block.transactions = std::move(pending_);
  pending_.clear();

  std::uint64_t event_index = 0;
  for (std::size_t i = 0; i < block.transactions.size(); ++i)
  {
    execute_locked(block.transactions[i], block.height, i, event_index);
  }
  block.digest = block.compute_digest();
  chain_.push_back(std::move(block));
}

void Ledger::execute_locked(Transaction const &tx, std::uint64_t height, std::uint64_t tx_index,
                            std::uint64_t &event_index)
{
  auto &receipt  = receipts_[tx.id];
  receipt.tx_id  = tx.id;
  receipt.height = height;
  receipt.index  = tx_index;

  CallContext ctx{tx.submitter, height, tx.id};
  std::vector<EmittedEvent> emitted;
  Address                   target = tx.call.contract;

  try
  {
    if (tx.call.contract.is_zero())
    {
      auto const factory = registry_.find(tx.call.operation);
      if (factory == registry_.end())
      {
        throw Error(Errc::UnknownContract, tx.call.operation);
      }
      Bytes seed = to_bytes("anchorpact/contract");
      seed.insert(seed.end(), tx.id.bytes.begin(), tx.id.bytes.end());
      auto const digest = crypto::hash(seed);
      std::copy(digest.bytes.end() - Address::size, digest.bytes.end(), target.bytes.begin());

      auto instance = factory->second(ctx, tx.call.args, emitted);
      if (!instance)
      {
        throw Error(Errc::DeployRejected, "factory returned no contract");
      }
      emitted.insert(emitted.begin(), EmittedEvent{EventKind::ContractDeployed, {{"code", tx.call.operation}}});
      contracts_[target] = std::move(instance);
      receipt.created    = target;
    }
    else
    {
      auto const it = contracts_.find(target);
      if (it == contracts_.end())
      {
        throw Error(Errc::UnknownContract, target.hex());
      }
      auto scratch = it->second->clone();
      emitted      = scratch->execute(ctx, tx.call);
      it->second   = std::move(scratch);
    }
  }
  catch (Error const &e)
  {
    receipt.status = TxStatus::Rejected;
    receipt.error  = e.code();
    receipt.detail = e.what();
    return;
  }

  receipt.status = TxStatus::Accepted;
  for (auto &ev : emitted)
  {
    events_.push_back(
        LedgerEvent{ev.kind, target, std::move(ev.payload), height, event_index++, tx.id});
  }
}

std::uint64_t Ledger::height() const
{
  std::shared_lock lock{mutex_};
  return chain_.back().height;
}

std::size_t Ledger::pending_count() const
{
  std::shared_lock lock{mutex_};
  return pending_.size();
}

std::vector<Block> Ledger::blocks() const
{
  std::shared_lock lock{mutex_};
  return chain_;
}

std::vector<LedgerEvent> Ledger::events(EventFilter const &filter) const
{
  std::shared_lock         lock{mutex_};
  std::vector<LedgerEvent> out;
  for (auto const &ev : events_)
  {
    if (filter.contract && ev.contract != *filter.contract)
    {
      continue;
    }
    if (filter.kind && ev.kind != *filter.kind)
    {
      continue;
    }
    if (filter.from_height && ev.height < *filter.from_height)
    {
      continue;
    }
    if (filter.to_height && ev.height > *filter.to_height)
    {
      continue;
    }
    out.push_back(ev);
  }
  return out;
}

std::optional<Receipt> Ledger::receipt(Digest const &tx_id) const
{
  std::shared_lock lock{mutex_};
  auto const       it = receipts_.find(tx_id);
  if (it == receipts_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

bool Ledger::has_contract(Address const &address) const
{
  std::shared_lock lock{mutex_};
  return contracts_.count(address) != 0;
}

std::vector<Address> Ledger::contracts() const
{
  std::shared_lock     lock{mutex_};
  std::vector<Address> out;
  for (auto const &[address, contract] : contracts_)
  {
    out.push_back(address);
  }
  return out;
}

Bytes Ledger::state_snapshot() const
{
  std::shared_lock lock{mutex_};
  codec::Writer    out;
  out.u64(contracts_.size());
  for (auto const &[address, contract] : contracts_)
  {
    out.fixed(address).bytes(contract->serialize());
  }
  out.u64(events_.size());
  for (auto const &ev : events_)
  {
    codec::Writer item;
    item.str(to_string(ev.kind)).fixed(ev.contract).u64(ev.height).u64(ev.index).fixed(ev.tx_id);
    item.u64(ev.payload.size());
    for (auto const &[key, value] : ev.payload)
    {
      item.str(key).str(value);
    }
    out.nested(item);
  }
  return out.take();
}

bool Ledger::verify_chain() const
{
  std::shared_lock lock{mutex_};
  for (std::size_t h = 0; h < chain_.size(); ++h)
  {
    auto const &block = chain_[h];
    if (block.height != h || block.compute_digest() != block.digest)
    {
      return false;
    }
    if (h == 0 ? !block.prev.is_zero() : block.prev != chain_[h - 1].digest)
    {
      return false;
    }
  }
  return true;
}

void Ledger::export_dump(std::ostream &out) const
{
  std::shared_lock lock{mutex_};
  for (auto const &block : chain_)
  {
    out << to_hex(block.encode()) << '\n';
  }
}

std::vector<Block> Ledger::parse_dump(std::istream &in)
{
  std::vector<Block> blocks;
  std::string        line;
  std::size_t        line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.empty())
    {
      continue;
    }
    Block block;
    try
    {
      block = Block::decode(from_hex(line));
    }
    catch (Error const &e)
    {
      throw Error(Errc::Decode, "chain dump line " + std::to_string(line_no) + ": " + e.what());
    }
    if (block.compute_digest() != block.digest)
    {
      throw Error(Errc::Decode, "block digest mismatch at line " + std::to_string(line_no));
    }
    if (block.height != blocks.size() ||
        (blocks.empty() ? !block.prev.is_zero() : block.prev != blocks.back().digest))
    {
      throw Error(Errc::Decode, "broken chain linkage at line " + std::to_string(line_no));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::unique_ptr<Ledger> Ledger::import_dump(std::istream &in, ContractRegistry registry)
{
  auto const blocks = parse_dump(in);
  auto       ledger = replay(blocks, std::move(registry));
  auto const rebuilt = ledger->blocks();
  if (rebuilt.size() != blocks.size() ||
      (!blocks.empty() && rebuilt.back().digest != blocks.back().digest))
  {
    throw Error(Errc::Decode, "replayed chain diverges from dump");
  }
  return ledger;
}

std::unique_ptr<Ledger> Ledger::replay(std::vector<Block> const &blocks, ContractRegistry registry,
                                       std::function<bool(Transaction const &)> const &skip)
{
  auto ledger = std::make_unique<Ledger>(std::move(registry));
  for (std::size_t h = 1; h < blocks.size(); ++h)
  {
    for (auto const &tx : blocks[h].transactions)
    {
      if (skip && skip(tx))
      {
        continue;
      }
      ledger->submit(tx);
    }
    ledger->produce_block();
  }
  return ledger;
}

}  // namespace anchorpact::ledger
