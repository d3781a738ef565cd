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


#include "anchorpact/error.hpp"
#include "anchorpact/middleware.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace anchorpact::middleware {
namespace {

using bsc::ClauseState;
using bsc::ContractState;
using testing::error_of;

std::vector<ledger::LedgerEvent> chain_events(ledger::Ledger const &chain, Address const &bsc,
                                              std::optional<ledger::EventKind> kind = std::nullopt)
{
  ledger::EventFilter f;
  f.contract = bsc;
  f.kind     = kind;
  return chain.events(f);
}

Digest digest(std::string_view label)
{
  return crypto::hash(label);
}

TEST(Session, DeployAndAwaitReportsCreatedAddress)
{
  ledger::Ledger chain{bsc::contract_registry()};
  auto const     keys = testing::make_keys(1);
  auto           slc  = testing::unsigned_instance(keys, 1);
  Session        buyer{chain, keys.buyer};
  auto const     tx = buyer.submit_deploy(slc.constructor_args());
  EXPECT_EQ(buyer.status(tx).status, InclusionStatus::Pending);
  auto const result = buyer.await_inclusion(tx);
  ASSERT_EQ(result.status, InclusionStatus::Accepted);
  ASSERT_TRUE(result.created.has_value());
  EXPECT_TRUE(chain.has_contract(*result.created));
  EXPECT_EQ(result.height, chain.height());

  buyer.bind(*result.created);
  EXPECT_EQ(buyer.get_state(), ContractState::AwaitingSignature);
  EXPECT_EQ(buyer.get_state_code(), slc.state_codes().encode(ContractState::AwaitingSignature));
}

TEST(Session, UnboundSessionCannotTargetContract)
{
  ledger::Ledger chain{bsc::contract_registry()};
  Session        s{chain, testing::key_for(2, "k")};
  EXPECT_EQ(error_of([&] { s.submit_raise_litigation(); }), Errc::UnknownContract);
  EXPECT_EQ(error_of([&] { s.get_state(); }), Errc::UnknownContract);
}

TEST(Session, UnknownTransactionIsAnError)
{
  ledger::Ledger chain{bsc::contract_registry()};
  Session        s{chain, testing::key_for(3, "k")};
  EXPECT_EQ(error_of([&] { s.status(digest("never")); }), Errc::UnknownTx);
}

TEST(Session, PausedLedgerTimesOutThenSettles)
{
  auto    c = testing::deploy_contract(4);
  Session buyer{*c.chain, c.keys.buyer, c.bsc};
  c.chain->set_paused(true);
  auto const tx     = buyer.submit_anchor(digest("req"), digest("resp"), std::nullopt, std::nullopt);
  auto const before = c.chain->height();
  auto const r      = buyer.await_inclusion(tx, 5);
  EXPECT_EQ(r.status, InclusionStatus::TimedOut);
  EXPECT_EQ(c.chain->height(), before);
  EXPECT_FALSE(buyer.has_anchor(digest("req")));

  c.chain->set_paused(false);
  EXPECT_EQ(buyer.await_inclusion(tx, 5).status, InclusionStatus::Accepted);
  EXPECT_TRUE(buyer.has_anchor(digest("req")));
}

TEST(Session, StatusTimesOutAfterConfiguredBlocks)
{
  auto    c = testing::deploy_contract(5);
  Session buyer{*c.chain, c.keys.buyer, c.bsc};
  c.chain->set_paused(true);
  auto const tx = buyer.submit_raise_litigation();
  EXPECT_EQ(buyer.status(tx, 0).status, InclusionStatus::TimedOut);
  EXPECT_EQ(buyer.status(tx, 1).status, InclusionStatus::Pending);
}

TEST(Session, ContractRejectionCarriesErrorCode)
{
  auto    c = testing::deploy_contract(6);
  Session oracle{*c.chain, c.keys.oracle, c.bsc};
  auto const r = oracle.await_inclusion(oracle.submit_raise_litigation());
  EXPECT_EQ(r.status, InclusionStatus::Rejected);
  EXPECT_EQ(r.error, Errc::Unauthorized);
  EXPECT_EQ(oracle.get_state(), ContractState::InExecution);
}

TEST(Session, AnchorQueries)
{
  auto    c = testing::deploy_contract(7);
  Session supplier{*c.chain, c.keys.supplier, c.bsc};
  auto const effect = bsc::ClauseEffect{c.slc.clause_ref("delivery"), ClauseState::Enforced};
  auto const tx     = supplier.submit_anchor(digest("q1"), digest("r1"), effect, std::nullopt);
  ASSERT_EQ(supplier.await_inclusion(tx).status, InclusionStatus::Accepted);

  auto const by_tx = supplier.anchor_by_tx(tx);
  ASSERT_TRUE(by_tx.has_value());
  EXPECT_EQ(by_tx->request_digest, digest("q1"));
  EXPECT_EQ(by_tx->response_digest, digest("r1"));
  EXPECT_EQ(by_tx->submitter, c.keys.supplier.address);
  EXPECT_EQ(supplier.find_anchor(digest("q1"))->tx_id, tx);
  EXPECT_FALSE(supplier.find_anchor(digest("q2")).has_value());
  EXPECT_EQ(supplier.list_anchors().size(), 1u);
  EXPECT_EQ(supplier.get_clause(c.slc.clause_ref("delivery")).state, ClauseState::Enforced);
}

TEST(Session, WatchDeliversEachEventOnceInChainOrder)
{
  auto    c = testing::deploy_contract(8);
  Session buyer{*c.chain, c.keys.buyer, c.bsc};
  Session supplier{*c.chain, c.keys.supplier, c.bsc};
  std::vector<ledger::LedgerEvent> all;
  std::vector<ledger::LedgerEvent> only_anchors;
  buyer.watch([&](auto const &e) { all.push_back(e); });
  buyer.watch([&](auto const &e) { only_anchors.push_back(e); }, ledger::EventKind::MessageAnchored);

  buyer.poll();
  supplier.await_inclusion(supplier.submit_anchor(
      digest("a"), digest("b"), bsc::ClauseEffect{c.slc.clause_ref("delivery"), ClauseState::Enforced},
      std::nullopt));
  buyer.poll();
  buyer.poll();
  buyer.await_inclusion(buyer.submit_raise_litigation());
  c.chain->tick();
  buyer.poll();

  EXPECT_EQ(all, chain_events(*c.chain, c.bsc));
  EXPECT_EQ(only_anchors, chain_events(*c.chain, c.bsc, ledger::EventKind::MessageAnchored));
  EXPECT_EQ(buyer.last_processed(), c.chain->height());
  EXPECT_EQ(buyer.poll(), 0u);
}

TEST(Session, UnwatchStopsDelivery)
{
  auto        c = testing::deploy_contract(9);
  Session     buyer{*c.chain, c.keys.buyer, c.bsc};
  std::size_t seen = 0;
  auto const  id   = buyer.watch([&](auto const &) { ++seen; });
  buyer.poll();
  auto const first = seen;
  EXPECT_GT(first, 0u);
  buyer.unwatch(id);
  buyer.await_inclusion(buyer.submit_raise_litigation());
  buyer.poll();
  EXPECT_EQ(seen, first);
}

TEST(Session, RestartResumesAfterLastProcessed)
{
  auto    c = testing::deploy_contract(10);
  Session first{*c.chain, c.keys.buyer, c.bsc};
  std::vector<ledger::LedgerEvent> seen;
  first.watch([&](auto const &e) { seen.push_back(e); });
  first.poll();
  auto const checkpoint = first.last_processed();
  ASSERT_TRUE(checkpoint.has_value());

  first.await_inclusion(first.submit_anchor(digest("x"), digest("y"), std::nullopt, std::nullopt));
  first.await_inclusion(first.submit_raise_litigation());

  Session resumed{*c.chain, c.keys.buyer, c.bsc, checkpoint};
  resumed.watch([&](auto const &e) { seen.push_back(e); });
  resumed.poll();
  EXPECT_EQ(seen, chain_events(*c.chain, c.bsc));
}

TEST(Session, BindRestartsAtRequestedHeight)
{
  auto    c = testing::deploy_contract(11);
  Session s{*c.chain, c.keys.mediator};
  std::vector<ledger::LedgerEvent> seen;
  s.watch([&](auto const &e) { seen.push_back(e); });
  s.poll();
  EXPECT_TRUE(seen.empty());
  s.bind(c.bsc, 0);
  s.poll();
  EXPECT_EQ(seen, chain_events(*c.chain, c.bsc));
}

// Interleaving polls with block production in any pattern delivers exactly
// the ledger's own event list.
TEST(SessionProperty, ExactlyOnceUnderRandomPolling)
{
  for (std::uint64_t seed = 0; seed < 25; ++seed)
  {
    auto            c = testing::deploy_contract(200 + seed);
    Session         watcher{*c.chain, c.keys.mediator, c.bsc};
    Session         writer{*c.chain, c.keys.supplier, c.bsc};
    std::mt19937_64 rng{seed};
    std::vector<ledger::LedgerEvent> seen;
    watcher.watch([&](auto const &e) { seen.push_back(e); });
    for (int i = 0; i < 40; ++i)
    {
      switch (rng() % 3)
      {
      case 0:
        writer.submit_anchor(digest("req/" + std::to_string(i)), digest("resp"), std::nullopt, std::nullopt);
        break;
      case 1:
        c.chain->tick();
        break;
      default:
        watcher.poll();
        break;
      }
    }
    c.chain->tick();
    watcher.poll();
    ASSERT_EQ(seen, chain_events(*c.chain, c.bsc)) << "seed " << seed;
  }
}

}  // namespace
}  // namespace anchorpact::middleware
