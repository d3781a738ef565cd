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
#include "anchorpact/slc.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <random>

namespace anchorpact::slc {
namespace {

using bsc::ClauseState;
using bsc::ContractState;
using testing::error_of;

constexpr std::string_view kTinyTemplate = R"(
name: tiny
text: "{{a}} pays {{b}}"
placeholders:
  - {name: a, type: party}
  - {name: b, type: party}
clauses:
  - {id: pay, title: Pay, logic: deliver}
)";

ClauseRequest request(std::string clause, Address const &who, ValueMap params, std::uint64_t nonce)
{
  return {std::move(clause), who, std::move(params), nonce};
}

ValueMap at_tick(std::int64_t tick)
{
  return {{"tick", tick}};
}

ValueMap reading(double value, std::int64_t tick)
{
  return {{"reading", value}, {"tick", tick}};
}

TEST(SlcTemplate, ScenarioTemplateParsesAndValidates)
{
  auto const tmpl = testing::scenario_template();
  EXPECT_NO_THROW(tmpl.validate());
  EXPECT_EQ(tmpl.clauses.size(), 5u);
  ASSERT_NE(tmpl.clause("delivery"), nullptr);
  EXPECT_TRUE(tmpl.clause("delivery")->completion_required);
  EXPECT_TRUE(tmpl.clause("temperature_monitoring")->oracle_may_enforce);
  EXPECT_EQ(tmpl.clause("nonexistent"), nullptr);
}

TEST(SlcTemplate, TinyTemplateParses)
{
  auto const tmpl = parse_template(kTinyTemplate);
  EXPECT_EQ(tmpl.name, "tiny");
  EXPECT_EQ(tmpl.placeholders.size(), 2u);
}

TEST(SlcTemplate, UndeclaredPlaceholderInTextIsRejected)
{
  std::string doc{kTinyTemplate};
  doc.replace(doc.find("{{b}}"), 5, "{{c}} {{b}}");
  EXPECT_EQ(error_of([&] { parse_template(doc); }), Errc::TemplateError);
}

TEST(SlcTemplate, UnusedPlaceholderIsRejected)
{
  std::string doc{kTinyTemplate};
  doc.replace(doc.find("{{b}}"), 5, "nobody");
  EXPECT_EQ(error_of([&] { parse_template(doc); }), Errc::TemplateError);
}

TEST(SlcTemplate, DuplicateClauseIdIsRejected)
{
  std::string doc{kTinyTemplate};
  doc += "  - {id: pay, title: Again, logic: deliver}\n";
  EXPECT_EQ(error_of([&] { parse_template(doc); }), Errc::TemplateError);
}

TEST(SlcTemplate, EncodeDecodeRoundTrips)
{
  auto const    tmpl = testing::scenario_template();
  codec::Writer out;
  tmpl.encode(out);
  auto const    raw = out.take();
  codec::Reader in{raw};
  EXPECT_EQ(LegalContractTemplate::decode(in), tmpl);
}

TEST(SlcBinding, TypedValuesFollowPlaceholderTypes)
{
  auto const data = bind_static_data(testing::scenario_template(), testing::default_bindings());
  EXPECT_EQ(std::get<double>(data.at("threshold")), 8.0);
  EXPECT_EQ(std::get<std::int64_t>(data.at("deadline")), 100);
  EXPECT_EQ(std::get<std::string>(data.at("product")), "Frozen vaccine batch VX-20");
}

TEST(SlcBinding, NonNumericTemperatureIsRejected)
{
  auto raw         = testing::default_bindings();
  raw["threshold"] = "cold";
  EXPECT_EQ(error_of([&] { bind_static_data(testing::scenario_template(), raw); }), Errc::TemplateError);
}

TEST(SlcBinding, FractionalDeadlineIsRejected)
{
  auto raw        = testing::default_bindings();
  raw["deadline"] = "10.5";
  EXPECT_EQ(error_of([&] { bind_static_data(testing::scenario_template(), raw); }), Errc::TemplateError);
}

TEST(SlcBinding, UndeclaredBindingIsRejected)
{
  auto raw     = testing::default_bindings();
  raw["color"] = "blue";
  EXPECT_EQ(error_of([&] { bind_static_data(testing::scenario_template(), raw); }), Errc::TemplateError);
}

TEST(SlcValue, CodecRoundTripsEveryAlternative)
{
  for (Value const v : {Value{std::int64_t{-42}}, Value{3.25}, Value{std::string{"x y"}}})
  {
    codec::Writer out;
    encode_value(out, v);
    auto const    raw = out.take();
    codec::Reader in{raw};
    EXPECT_EQ(decode_value(in), v);
  }
  EXPECT_EQ(as_number(Value{std::int64_t{3}}), 3.0);
  EXPECT_EQ(as_number(Value{std::string{"3"}}), std::nullopt);
}

TEST(SlcInstantiate, MissingBindingIsRejected)
{
  auto const keys = testing::make_keys(1);
  auto       tmpl = testing::scenario_template();
  auto       data = bind_static_data(tmpl, testing::default_bindings());
  data.erase("penalty");
  EXPECT_EQ(error_of([&] { SlcInstance::instantiate(tmpl, data, testing::parties_for(keys), 1); }),
            Errc::MissingBinding);
}

TEST(SlcInstantiate, NoOrganizationsIsRejected)
{
  auto const keys    = testing::make_keys(1);
  auto       tmpl    = testing::scenario_template();
  auto const data    = bind_static_data(tmpl, testing::default_bindings());
  auto       parties = testing::parties_for(keys);
  for (auto &p : parties)
  {
    if (p.role == bsc::Role::Organization)
    {
      p.role = bsc::Role::Oracle;
    }
  }
  EXPECT_EQ(error_of([&] { SlcInstance::instantiate(tmpl, data, parties, 1); }), Errc::NoOrganizations);
}

TEST(SlcInstantiate, PartyPlaceholderWithoutMatchingPartyIsRejected)
{
  auto const keys = testing::make_keys(1);
  auto       raw  = testing::default_bindings();
  raw["oracle"]   = "Somebody Else";
  EXPECT_EQ(error_of([&] { testing::unsigned_instance(keys, 1, raw); }), Errc::MissingBinding);
}

TEST(SlcInstantiate, SameSeedGivesSamePayload)
{
  auto const keys = testing::make_keys(5);
  auto       a    = testing::unsigned_instance(keys, 5);
  auto       b    = testing::unsigned_instance(keys, 5);
  Address    where{};
  where.bytes[0] = 1;
  a.set_bsc_address(where);
  b.set_bsc_address(where);
  EXPECT_EQ(a.signable_payload(), b.signable_payload());
  EXPECT_EQ(a.clause_ref("delivery"), b.clause_ref("delivery"));
}

TEST(SlcInstantiate, DifferentSeedsGiveDifferentSaltsAndRefs)
{
  auto const keys = testing::make_keys(5);
  auto const a    = testing::unsigned_instance(keys, 5);
  auto const b    = testing::unsigned_instance(keys, 6);
  EXPECT_NE(a.salt(), b.salt());
  EXPECT_NE(a.clause_ref("delivery"), b.clause_ref("delivery"));
}

TEST(SlcInstantiate, ClauseRefsResolveBackToIds)
{
  auto const inst = testing::unsigned_instance(testing::make_keys(2), 2);
  for (auto const &c : inst.contract_template().clauses)
  {
    EXPECT_EQ(inst.clause_id_for(inst.clause_ref(c.id)), c.id);
  }
  EXPECT_EQ(inst.clause_id_for(crypto::hash("nothing")), std::nullopt);
}

TEST(SlcInstantiate, ConstructorArgsCarryRolesAndClauseFlags)
{
  auto const keys = testing::make_keys(3);
  auto const inst = testing::unsigned_instance(keys, 3);
  auto const args = inst.constructor_args();
  EXPECT_EQ(args.organizations, (std::vector<Address>{keys.buyer.address, keys.supplier.address}));
  EXPECT_EQ(args.oracles, std::vector<Address>{keys.oracle.address});
  EXPECT_EQ(args.mediators, std::vector<Address>{keys.mediator.address});
  ASSERT_EQ(args.clauses.size(), 5u);
  std::size_t required = 0;
  for (auto const &c : args.clauses)
  {
    required += c.completion_required ? 1 : 0;
  }
  EXPECT_EQ(required, 2u);
}

TEST(SlcSigning, PayloadNeedsBscAddress)
{
  auto const inst = testing::unsigned_instance(testing::make_keys(4), 4);
  EXPECT_EQ(error_of([&] { inst.signable_payload(); }), Errc::BscAddressUnset);
}

TEST(SlcSigning, SignatureChecks)
{
  auto const keys = testing::make_keys(4);
  auto       inst = testing::unsigned_instance(keys, 4);
  inst.set_bsc_address(keys.buyer.address);
  auto const payload = inst.signable_payload();

  auto const stranger = testing::key_for(4, "stranger");
  EXPECT_EQ(error_of([&] { inst.add_signature(stranger.address, crypto::sign(stranger.secret, payload)); }),
            Errc::UnknownParty);
  EXPECT_EQ(error_of([&] { inst.add_signature(keys.buyer.address, crypto::sign(keys.supplier.secret, payload)); }),
            Errc::BadSignature);
  EXPECT_FALSE(inst.is_fully_signed());
  EXPECT_EQ(error_of([&] { inst.signed_hash(); }), Errc::NotFullySigned);

  testing::sign_all(inst, keys);
  EXPECT_TRUE(inst.is_fully_signed());
  EXPECT_EQ(inst.signatures().count(keys.oracle.address), 0u);
}

TEST(SlcSigning, SignedHashIsSha256OfExport)
{
  auto const c     = testing::deploy_contract(21, false);
  auto const bytes = c.slc.signed_bytes();
  Digest     expected;
  SHA256(bytes.data(), bytes.size(), expected.bytes.data());
  EXPECT_EQ(c.slc.signed_hash(), expected);
  EXPECT_TRUE(c.slc.verify_instance(expected));
}

TEST(SlcSigning, ExportRoundTripsToIdenticalBytes)
{
  auto const c    = testing::deploy_contract(22, false);
  auto const copy = SlcInstance::from_signed_bytes(c.slc.signed_bytes());
  EXPECT_EQ(copy.signed_bytes(), c.slc.signed_bytes());
  EXPECT_EQ(copy.parties(), c.slc.parties());
  EXPECT_EQ(copy.bsc_address(), c.slc.bsc_address());
  EXPECT_TRUE(copy.verify_instance(c.slc.signed_hash()));
}

// Any single flipped byte either fails to decode or no longer verifies.
TEST(SlcSigning, EveryByteOfTheExportIsCovered)
{
  auto const    c         = testing::deploy_contract(23, false);
  auto const    reference = c.slc.signed_hash();
  auto const    bytes     = c.slc.signed_bytes();
  std::mt19937  rng{23};
  for (int i = 0; i < 200; ++i)
  {
    auto edited = bytes;
    edited[rng() % edited.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try
    {
      EXPECT_FALSE(SlcInstance::from_signed_bytes(edited).verify_instance(reference));
    }
    catch (Error const &)
    {
    }
  }
}

TEST(SlcExecution, RequestsBeforeActivationAreWrongState)
{
  auto       c = testing::deploy_contract(30, false);
  auto const r = c.slc.execute_request(request("delivery", c.keys.supplier.address, at_tick(5), 1));
  EXPECT_EQ(r.status, ResponseStatus::Rejected);
  EXPECT_EQ(r.reason, RejectReason::WrongState);
}

TEST(SlcExecution, UnsignedInstanceRefusesExecution)
{
  auto const keys = testing::make_keys(31);
  auto       inst = testing::unsigned_instance(keys, 31);
  inst.set_bsc_address(keys.buyer.address);
  EXPECT_EQ(error_of([&] { inst.execute_request(request("delivery", keys.supplier.address, at_tick(1), 1)); }),
            Errc::NotFullySigned);
}

TEST(SlcExecution, ReadingAboveThresholdTerminates)
{
  auto       c = testing::deploy_contract(32);
  auto const r = c.slc.execute_request(request("temperature_breach", c.keys.buyer.address, reading(9.0, 40), 1));
  ASSERT_EQ(r.status, ResponseStatus::Enforced);
  EXPECT_EQ(r.effects.contract, ContractState::Terminated);
  EXPECT_EQ(c.slc.contract_state(), ContractState::Terminated);
  EXPECT_EQ(c.slc.clause_state("temperature_breach"), ClauseState::Enforced);
  EXPECT_EQ(c.slc.variable("breach_reading"), Value{9.0});
}

TEST(SlcExecution, ReadingWithinThresholdDoesNotTerminate)
{
  auto       c = testing::deploy_contract(33);
  auto const r = c.slc.execute_request(request("temperature_breach", c.keys.buyer.address, reading(7.5, 40), 1));
  EXPECT_EQ(r.reason, RejectReason::PreconditionFailed);
  EXPECT_EQ(c.slc.contract_state(), ContractState::InExecution);
  EXPECT_TRUE(c.slc.request_log().empty());
}

TEST(SlcExecution, ReadingExactlyAtThresholdIsWithin)
{
  auto c = testing::deploy_contract(33);
  EXPECT_EQ(c.slc.execute_request(request("temperature_breach", c.keys.buyer.address, reading(8.0, 40), 1)).reason,
            RejectReason::PreconditionFailed);
}

TEST(SlcExecution, AcceptanceBeforeDeliveryIsWrongState)
{
  auto       c = testing::deploy_contract(34);
  auto const r = c.slc.execute_request(request("acceptance", c.keys.buyer.address, at_tick(10), 1));
  EXPECT_EQ(r.reason, RejectReason::WrongState);
}

TEST(SlcExecution, OnlyTheSupplierDelivers)
{
  auto c = testing::deploy_contract(35);
  EXPECT_EQ(c.slc.execute_request(request("delivery", c.keys.buyer.address, at_tick(10), 1)).reason,
            RejectReason::UnauthorizedRequester);
  auto const stranger = testing::key_for(35, "stranger");
  EXPECT_EQ(c.slc.execute_request(request("delivery", stranger.address, at_tick(10), 1)).reason,
            RejectReason::UnauthorizedRequester);
}

TEST(SlcExecution, OnTimePathCompletesWithPenaltyCancelled)
{
  auto c        = testing::deploy_contract(36);
  auto const &k = c.keys;
  ASSERT_EQ(c.slc.execute_request(request("delivery", k.supplier.address, at_tick(60), 1)).status,
            ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.variable("delivery_late"), Value{std::int64_t{0}});
  EXPECT_EQ(c.slc.execute_request(request("acceptance", k.buyer.address, at_tick(61), 1)).reason,
            RejectReason::WrongState);
  EXPECT_EQ(c.slc.execute_request(
                request("late_penalty", k.buyer.address, {{"action", std::string{"claim"}}, {"tick", std::int64_t{61}}}, 2))
                .reason,
            RejectReason::PreconditionFailed);
  ASSERT_EQ(c.slc.execute_request(
                request("late_penalty", k.buyer.address, {{"action", std::string{"waive"}}, {"tick", std::int64_t{61}}}, 3))
                .status,
            ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.clause_state("late_penalty"), ClauseState::Cancelled);
  auto const accepted = c.slc.execute_request(request("acceptance", k.buyer.address, at_tick(62), 4));
  ASSERT_EQ(accepted.status, ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.contract_state(), ContractState::Completed);
  EXPECT_EQ(c.slc.request_log().size(), 3u);
}

TEST(SlcExecution, LateDeliveryEnforcesPenalty)
{
  auto c        = testing::deploy_contract(37);
  auto const &k = c.keys;
  ASSERT_EQ(c.slc.execute_request(request("delivery", k.supplier.address, at_tick(101), 1)).status,
            ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.variable("delivery_late"), Value{std::int64_t{1}});
  auto const r = c.slc.execute_request(
      request("late_penalty", k.buyer.address, {{"action", std::string{"claim"}}, {"tick", std::int64_t{102}}}, 1));
  ASSERT_EQ(r.status, ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.clause_state("late_penalty"), ClauseState::Enforced);
  EXPECT_EQ(c.slc.variable("penalty_due"), Value{500.0});
}

TEST(SlcExecution, DeliveryAtDeadlineIsOnTime)
{
  auto c = testing::deploy_contract(38);
  c.slc.execute_request(request("delivery", c.keys.supplier.address, at_tick(100), 1));
  EXPECT_EQ(c.slc.variable("delivery_late"), Value{std::int64_t{0}});
}

TEST(SlcExecution, NonceAndShapeChecks)
{
  auto c        = testing::deploy_contract(39);
  auto const &k = c.keys;
  EXPECT_EQ(c.slc.execute_request(request("delivery", k.supplier.address, {}, 1)).reason,
            RejectReason::MalformedRequest);
  EXPECT_EQ(c.slc.execute_request(request("delivery", k.supplier.address, {{"tick", 1.5}}, 1)).reason,
            RejectReason::MalformedRequest);
  EXPECT_EQ(c.slc.execute_request(request("no_such_clause", k.supplier.address, {}, 1)).reason,
            RejectReason::UnknownClause);
  ASSERT_EQ(c.slc.execute_request(request("temperature_monitoring", k.oracle.address, reading(4.0, 1), 7)).status,
            ResponseStatus::Enforced);
  EXPECT_EQ(c.slc.last_nonce(k.oracle.address), 7u);
  EXPECT_EQ(c.slc.execute_request(request("temperature_monitoring", k.oracle.address, reading(4.0, 2), 7)).reason,
            RejectReason::StaleNonce);
}

TEST(SlcExecution, OracleReadingsTrackMaximum)
{
  auto c        = testing::deploy_contract(40);
  auto const &o = c.keys.oracle.address;
  std::uint64_t nonce = 0;
  for (double v : {4.0, 6.5, 5.0})
  {
    c.slc.execute_request(request("temperature_monitoring", o, reading(v, static_cast<std::int64_t>(nonce)), ++nonce));
  }
  EXPECT_EQ(c.slc.variable("max_reading"), Value{6.5});
  EXPECT_EQ(c.slc.variable("last_reading"), Value{5.0});
  EXPECT_EQ(c.slc.variable("readings_count"), Value{std::int64_t{3}});
  EXPECT_EQ(c.slc.clause_state("temperature_monitoring"), ClauseState::Awaiting);
}

TEST(SlcExecution, OnlyOraclesReport)
{
  auto c = testing::deploy_contract(41);
  EXPECT_EQ(c.slc.execute_request(request("temperature_monitoring", c.keys.buyer.address, reading(4.0, 1), 1)).reason,
            RejectReason::UnauthorizedRequester);
}

TEST(SlcExecution, ResponseCodecRoundTrips)
{
  auto c = testing::deploy_contract(42);
  auto const req = request("delivery", c.keys.supplier.address, at_tick(60), 1);
  auto const r   = c.slc.execute_request(req);
  EXPECT_EQ(ClauseResponse::decode(r.encode()), r);
  EXPECT_EQ(ClauseRequest::decode(req.encode()), req);
  auto const rejected = ClauseResponse::rejected(RejectReason::StaleNonce, "x");
  EXPECT_EQ(ClauseResponse::decode(rejected.encode()), rejected);
}

TEST(SlcReplication, RemoteApplicationConverges)
{
  auto c       = testing::deploy_contract(50);
  auto replica = SlcInstance::from_signed_bytes(c.slc.signed_bytes());
  replica.apply_onchain({"activation", ContractState::InExecution, {}, std::nullopt});

  auto const req  = request("delivery", c.keys.supplier.address, at_tick(60), 1);
  auto const resp = c.slc.execute_request(req);
  replica.apply_remote(req, resp);
  EXPECT_EQ(replica.canonical_state(), c.slc.canonical_state());
}

TEST(SlcReplication, DivergentResponseLeavesReplicaUnchanged)
{
  auto c       = testing::deploy_contract(51);
  auto replica = SlcInstance::from_signed_bytes(c.slc.signed_bytes());
  replica.apply_onchain({"activation", ContractState::InExecution, {}, std::nullopt});
  auto const before = replica.canonical_state();

  auto const req  = request("delivery", c.keys.supplier.address, at_tick(60), 1);
  auto       resp = c.slc.execute_request(req);
  resp.effects.variables["delivered_at"] = std::int64_t{59};
  EXPECT_EQ(error_of([&] { replica.apply_remote(req, resp); }), Errc::DivergentResponse);
  EXPECT_EQ(replica.canonical_state(), before);
}

TEST(SlcReplication, StaleRemoteRequestIsRefused)
{
  auto c       = testing::deploy_contract(52);
  auto replica = SlcInstance::from_signed_bytes(c.slc.signed_bytes());
  replica.apply_onchain({"activation", ContractState::InExecution, {}, std::nullopt});
  auto const req  = request("delivery", c.keys.supplier.address, at_tick(60), 1);
  auto const resp = c.slc.execute_request(req);
  replica.apply_remote(req, resp);
  auto const before = replica.canonical_state();
  EXPECT_EQ(error_of([&] { replica.apply_remote(req, resp); }), Errc::StaleRequest);
  EXPECT_EQ(replica.canonical_state(), before);
}

TEST(SlcReplication, OnChainChangesAreMirrored)
{
  auto c = testing::deploy_contract(53);
  c.slc.apply_onchain({"litigation", ContractState::Litigation, {}, std::nullopt});
  EXPECT_EQ(c.slc.execute_request(request("delivery", c.keys.supplier.address, at_tick(60), 1)).reason,
            RejectReason::WrongState);
  c.slc.apply_onchain({"resolution", ContractState::InExecution, {{"delivery", ClauseState::Enforced}}, std::nullopt});
  EXPECT_EQ(c.slc.clause_state("delivery"), ClauseState::Enforced);
  EXPECT_EQ(c.slc.onchain_log().size(), 3u);
}

// Two replicas fed the same random request stream (one executing, one
// re-executing) never diverge.
TEST(SlcProperty, ReplicasStayByteIdenticalUnderRandomRequests)
{
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    auto c       = testing::deploy_contract(100 + seed);
    auto replica = SlcInstance::from_signed_bytes(c.slc.signed_bytes());
    replica.apply_onchain({"activation", ContractState::InExecution, {}, std::nullopt});
    std::mt19937_64                    rng{seed};
    std::vector<KeyPair const *> const who{&c.keys.buyer, &c.keys.supplier, &c.keys.oracle, &c.keys.mediator};
    std::map<Address, std::uint64_t>   nonces;
    for (int i = 0; i < 60; ++i)
    {
      auto const        &key  = *who[rng() % who.size()];
      auto const        &spec = c.slc.contract_template().clauses[rng() % 5];
      ValueMap           params;
      for (auto const &p : spec.parameters)
      {
        if (p.type == "integer")
        {
          params[p.name] = static_cast<std::int64_t>(rng() % 150);
        }
        else if (p.type == "number")
        {
          params[p.name] = 2.0 + static_cast<double>(rng() % 80) / 10.0;
        }
        else
        {
          params[p.name] = std::string{rng() % 2 ? "claim" : "waive"};
        }
      }
      auto const req  = request(spec.id, key.address, params, ++nonces[key.address]);
      auto const resp = c.slc.execute_request(req);
      if (resp.status == ResponseStatus::Enforced)
      {
        replica.apply_remote(req, resp);
      }
      ASSERT_EQ(replica.canonical_state(), c.slc.canonical_state()) << "seed " << seed << " step " << i;
    }
  }
}

}  // namespace
}  // namespace anchorpact::slc
