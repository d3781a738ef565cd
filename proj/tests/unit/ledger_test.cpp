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
#include "anchorpact/error.hpp"
#include "anchorpact/ledger.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace anchorpact::ledger {
namespace {

using testing::deploy_contract;
using testing::key_for;

bsc::ConstructorArgs four_party_args(std::uint64_t seed)
{
  bsc::ConstructorArgs args;
  args.organizations = {key_for(seed, "o1").address, key_for(seed, "o2").address};
  args.oracles       = {key_for(seed, "or").address};
  args.mediators     = {key_for(seed, "me").address};
  return args;
}

TEST(Ledger, GenesisBlockLinksFromZero)
{
  Ledger chain{bsc::contract_registry()};
  auto const blocks = chain.blocks();
  ASSERT_EQ(blocks.size(), 1U);
  EXPECT_EQ(blocks[0].height, 0U);
  EXPECT_TRUE(blocks[0].prev.is_zero());
  EXPECT_EQ(chain.height(), 0U);
}

TEST(Ledger, DeployReturnsAddressInAwaitingSignature)
{
  Ledger     chain{bsc::contract_registry()};
  auto const deployer = key_for(1, "o1");
  auto const address  = chain.deploy_contract(Transaction::make(deployer, 1, bsc::calls::deploy(four_party_args(1))));
  EXPECT_TRUE(chain.has_contract(address));
  EXPECT_EQ(chain.inspect<bsc::Bsc>(address, [](bsc::Bsc const &c) { return c.state(); }),
            bsc::ContractState::AwaitingSignature);
  EventFilter f;
  f.kind = EventKind::ContractDeployed;
  EXPECT_EQ(chain.events(f).size(), 1U);
}

TEST(Ledger, DeployWithoutOrganizationsIsRejected)
{
  Ledger chain{bsc::contract_registry()};
  auto   args = four_party_args(1);
  args.organizations.clear();
  try
  {
    chain.deploy_contract(Transaction::make(key_for(1, "o1"), 1, bsc::calls::deploy(args)));
    FAIL() << "expected DeployRejected";
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.code(), Errc::DeployRejected);
  }
}

TEST(Ledger, TwoDeploymentsGetDistinctAddresses)
{
  Ledger     chain{bsc::contract_registry()};
  auto const k = key_for(1, "o1");
  auto const a = chain.deploy_contract(Transaction::make(k, 1, bsc::calls::deploy(four_party_args(1))));
  auto const b = chain.deploy_contract(Transaction::make(k, 2, bsc::calls::deploy(four_party_args(1))));
  EXPECT_NE(a, b);
}

TEST(Ledger, TransactionIdIsHashOfCanonicalBytes)
{
  auto const tx = Transaction::make(key_for(1, "o1"), 7, bsc::calls::complete(Address{}));
  EXPECT_EQ(tx.id, crypto::hash(tx.canonical_bytes()));
  EXPECT_TRUE(tx.signature_valid());
  auto const back = Transaction::decode(tx.canonical_bytes());
  EXPECT_EQ(back.id, tx.id);
}

TEST(Ledger, AcceptedAnchorIsIncludedInNextBlock)
{
  auto       c  = deploy_contract(3);
  auto const h  = c.chain->height();
  auto const tx = Transaction::make(c.keys.supplier, 1,
                                    bsc::calls::anchor_message(c.bsc, crypto::hash(std::string_view{"r"}),
                                                               crypto::hash(std::string_view{"s"}),
                                                               std::nullopt, std::nullopt));
  EXPECT_EQ(c.chain->submit(tx).status, TxStatus::Pending);
  c.chain->produce_block();
  auto const receipt = c.chain->receipt(tx.id);
  ASSERT_TRUE(receipt);
  EXPECT_EQ(receipt->status, TxStatus::Accepted);
  EXPECT_EQ(receipt->height, h + 1);
}

TEST(Ledger, WrongKeySignatureNeverIncluded)
{
  auto c  = deploy_contract(3);
  auto tx = Transaction::make(c.keys.supplier, 1, bsc::calls::raise_litigation(c.bsc));
  tx.signature = crypto::sign(c.keys.buyer.secret, tx.signing_bytes());
  auto const r = c.chain->submit(tx);
  EXPECT_EQ(r.status, TxStatus::Rejected);
  EXPECT_EQ(r.error, Errc::BadSignature);
  EXPECT_EQ(c.chain->pending_count(), 0U);
  auto const block = c.chain->produce_block();
  EXPECT_TRUE(block.transactions.empty());
}

TEST(Ledger, UnknownContractRejectedAtSubmission)
{
  Ledger     chain{bsc::contract_registry()};
  Address    nowhere;
  nowhere.bytes[0] = 1;
  auto const r = chain.submit(Transaction::make(key_for(1, "x"), 1, bsc::calls::raise_litigation(nowhere)));
  EXPECT_EQ(r.error, Errc::UnknownContract);
}

TEST(Ledger, SubmissionOrderIsExecutionOrder)
{
  auto       c = deploy_contract(4);
  auto const a = Transaction::make(c.keys.supplier, 1,
                                   bsc::calls::anchor_message(c.bsc, crypto::hash(std::string_view{"a"}),
                                                              crypto::hash(std::string_view{"a'"}),
                                                              std::nullopt, std::nullopt));
  auto const b = Transaction::make(c.keys.buyer, 1,
                                   bsc::calls::anchor_message(c.bsc, crypto::hash(std::string_view{"b"}),
                                                              crypto::hash(std::string_view{"b'"}),
                                                              std::nullopt, std::nullopt));
  c.chain->submit(a);
  c.chain->submit(b);
  auto const &block = c.chain->produce_block();
  ASSERT_EQ(block.transactions.size(), 2U);
  EXPECT_EQ(block.transactions[0].id, a.id);
  EXPECT_EQ(block.transactions[1].id, b.id);
  auto const anchors = c.chain->inspect<bsc::Bsc>(c.bsc, [](bsc::Bsc const &x) { return x.list_anchors(); });
  ASSERT_EQ(anchors.size(), 2U);
  EXPECT_EQ(anchors[0].tx_id, a.id);
  EXPECT_EQ(anchors[1].tx_id, b.id);
}

TEST(Ledger, RejectedCallIsIncludedWithoutEvents)
{
  auto       c  = deploy_contract(4);
  auto const tx = Transaction::make(c.keys.oracle, 1, bsc::calls::raise_litigation(c.bsc));
  auto const before = c.chain->events().size();
  c.chain->submit(tx);
  c.chain->produce_block();
  auto const r = c.chain->receipt(tx.id);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, TxStatus::Rejected);
  EXPECT_EQ(r->error, Errc::Unauthorized);
  EXPECT_EQ(c.chain->events().size(), before);
  EXPECT_EQ(c.state(), bsc::ContractState::InExecution);
}

TEST(Ledger, EmptyBlocksKeepLinkage)
{
  Ledger chain{bsc::contract_registry()};
  for (int i = 0; i < 50; ++i)
  {
    chain.tick();
  }
  auto const blocks = chain.blocks();
  ASSERT_EQ(blocks.size(), 51U);
  for (std::size_t h = 1; h < blocks.size(); ++h)
  {
    EXPECT_EQ(blocks[h].prev, blocks[h - 1].digest);
    EXPECT_EQ(blocks[h].digest, blocks[h].compute_digest());
  }
  EXPECT_TRUE(chain.verify_chain());
}

TEST(Ledger, PausedProductionProducesNothing)
{
  Ledger chain{bsc::contract_registry()};
  chain.set_paused(true);
  chain.tick();
  EXPECT_EQ(chain.height(), 0U);
  chain.set_paused(false);
  chain.tick();
  EXPECT_EQ(chain.height(), 1U);
}

TEST(Ledger, ReplayFromDumpReproducesStateAndEvents)
{
  auto c = deploy_contract(5);
  testing::call(*c.chain, c.keys.supplier,
                bsc::calls::anchor_message(c.bsc, crypto::hash(std::string_view{"d"}),
                                           crypto::hash(std::string_view{"d'"}),
                                           bsc::ClauseEffect{c.slc.clause_ref("delivery"), bsc::ClauseState::Enforced},
                                           std::nullopt));
  testing::call(*c.chain, c.keys.oracle, bsc::calls::raise_litigation(c.bsc));  // rejected
  for (int i = 0; i < 5; ++i)
  {
    c.chain->tick();
  }
  // Oracle captured from the live run before export.
  auto const snapshot = c.chain->state_snapshot();
  auto const events   = c.chain->events();

  std::stringstream dump;
  c.chain->export_dump(dump);
  auto const replay = Ledger::import_dump(dump, bsc::contract_registry());
  EXPECT_EQ(replay->state_snapshot(), snapshot);
  EXPECT_EQ(replay->events(), events);
  EXPECT_EQ(replay->height(), c.chain->height());
}

TEST(Ledger, CorruptDumpRejected)
{
  auto              c = deploy_contract(5);
  std::stringstream dump;
  c.chain->export_dump(dump);
  auto text = dump.str();
  auto const at = text.size() / 2;
  text[at]      = text[at] == 'a' ? 'b' : 'a';
  std::stringstream bad{text};
  EXPECT_THROW(Ledger::import_dump(bad, bsc::contract_registry()), Error);
}

TEST(Ledger, EventsFilterByContractKindAndHeight)
{
  auto c = deploy_contract(6);
  EventFilter unknown;
  unknown.contract = key_for(6, "nobody").address;
  EXPECT_TRUE(c.chain->events(unknown).empty());

  EventFilter anchored;
  anchored.contract = c.bsc;
  anchored.kind     = EventKind::SlcHashAnchored;
  auto const hits   = c.chain->events(anchored);
  ASSERT_EQ(hits.size(), 1U);
  EXPECT_EQ(*hits[0].field("slc_hash"), c.slc.signed_hash().hex());

  EventFilter later;
  later.from_height = c.chain->height() + 1;
  EXPECT_TRUE(c.chain->events(later).empty());
}

}  // namespace
}  // namespace anchorpact::ledger
