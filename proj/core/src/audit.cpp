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


#include "anchorpact/audit.hpp"

#include "anchorpact/error.hpp"
#include "anchorpact/slc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace anchorpact::audit {

std::string_view to_string(MatchStatus status) noexcept
{
  switch (status)
  {
  case MatchStatus::Matched:
    return "Matched";
  case MatchStatus::MissingOnChain:
    return "MissingOnChain";
  case MatchStatus::MissingOffChain:
    return "MissingOffChain";
  case MatchStatus::DigestMismatch:
    return "DigestMismatch";
  case MatchStatus::MediatorRemoved:
    return "MediatorRemoved";
  }
  return "unknown";
}

std::string_view to_string(Misbehavior kind) noexcept
{
  switch (kind)
  {
  case Misbehavior::Repudiation:
    return "Repudiation";
  case Misbehavior::TamperedMessage:
    return "TamperedMessage";
  case Misbehavior::MediatorRemoval:
    return "MediatorRemoval";
  }
  return "unknown";
}

namespace {

struct LocalPayload
{
  Bytes         request;
  Bytes         response;
  std::uint64_t height{0};
  Address       sender;
};

std::string clause_of(Bytes const &request)
{
  try
  {
    return slc::ClauseRequest::decode(request).clause_id;
  }
  catch (Error const &)
  {
    return {};
  }
}

}  // namespace

AuditTrail reconstruct(LocalStore const *store, ledger::Ledger const &chain, Address const &bsc)
{
  AuditTrail trail;
  trail.bsc = bsc;

  std::vector<bsc::AnchorRecord> anchors;
  if (chain.has_contract(bsc))
  {
    chain.inspect<bsc::Bsc>(bsc, [&](bsc::Bsc const &c) {
      anchors        = c.list_anchors();
      trail.registry = c.registry();
      return 0;
    });
  }

  std::map<Digest, LocalPayload> local;
  std::vector<LocalPayload>      unanchored_order;
  std::vector<Digest>            local_order;
  if (store != nullptr)
  {
    trail.pre_contract_records = store->pre_contract().size();
    for (auto const &r : store->outbound())
    {
      if (local.emplace(r.tx_id, LocalPayload{r.request, r.response, r.height, store->owner()}).second)
      {
        local_order.push_back(r.tx_id);
      }
    }
    for (auto const &r : store->inbound())
    {
      auto const &e = r.envelope;
      if (local.emplace(e.anchor_ref, LocalPayload{e.request, e.response, r.height, e.sender}).second)
      {
        local_order.push_back(e.anchor_ref);
      }
    }
  }

  struct Placed
  {
    bsc::AnchorRecord record;
    std::uint64_t     index{0};
  };
  std::vector<Placed> placed;
  std::set<Digest>    anchored_txs;
  for (auto const &a : anchors)
  {
    auto const receipt = chain.receipt(a.tx_id);
    placed.push_back({a, receipt ? receipt->index : 0});
    anchored_txs.insert(a.tx_id);
  }
  std::sort(placed.begin(), placed.end(), [](Placed const &x, Placed const &y) {
    return x.record.height != y.record.height ? x.record.height < y.record.height
                                              : x.index < y.index;
  });

  for (auto const &[a, index] : placed)
  {
    TrailEntry entry;
    entry.sequence        = trail.entries.size();
    entry.height          = a.height;
    entry.index           = index;
    entry.tx_id           = a.tx_id;
    entry.requester       = a.submitter;
    entry.request_digest  = a.request_digest;
    entry.response_digest = a.response_digest;
    if (a.removed)
    {
      entry.removed_by = a.removed_by;
    }
    auto const it = local.find(a.tx_id);
    if (it != local.end())
    {
      entry.request   = it->second.request;
      entry.response  = it->second.response;
      entry.clause_id = clause_of(it->second.request);
    }
    if (a.removed)
    {
      entry.status = MatchStatus::MediatorRemoved;
    }
    else if (it == local.end())
    {
      entry.status = MatchStatus::MissingOffChain;
    }
    else if (crypto::hash(*entry.request) != a.request_digest ||
             crypto::hash(*entry.response) != a.response_digest)
    {
      entry.status = MatchStatus::DigestMismatch;
    }
    trail.entries.push_back(std::move(entry));
  }

  for (auto const &tx : local_order)
  {
    if (anchored_txs.count(tx) != 0)
    {
      continue;
    }
    auto const &payload = local.at(tx);
    TrailEntry  entry;
    entry.sequence        = trail.entries.size();
    entry.height          = payload.height;
    entry.tx_id           = tx;
    entry.requester       = payload.sender;
    entry.clause_id       = clause_of(payload.request);
    entry.request         = payload.request;
    entry.response        = payload.response;
    entry.request_digest  = crypto::hash(payload.request);
    entry.response_digest = crypto::hash(payload.response);
    entry.status          = MatchStatus::MissingOnChain;
    entry.anchored        = false;
    trail.entries.push_back(std::move(entry));
  }
  return trail;
}

AuditTrail reconstruct(LocalStore const &store, ledger::Ledger const &chain)
{
  if (!store.bsc())
  {
    throw Error(Errc::CorruptStore, "store does not name a contract");
  }
  return reconstruct(&store, chain, *store.bsc());
}

VerificationReport verify(AuditTrail const &trail)
{
  VerificationReport report;
  for (auto const &e : trail.entries)
  {
    if (e.status == MatchStatus::Matched)
    {
      ++report.verified;
      continue;
    }
    Discrepancy d;
    d.kind    = e.status;
    d.digest  = e.request_digest;
    d.height  = e.height;
    d.address = e.status == MatchStatus::MediatorRemoved && e.removed_by ? *e.removed_by : e.requester;
    d.details = "tx " + e.tx_id.hex() + (e.clause_id.empty() ? "" : " clause " + e.clause_id);
    report.discrepancies.push_back(std::move(d));
  }
  return report;
}

std::vector<Attribution> attribute(VerificationReport const       &report,
                                   bsc::ParticipantRegistry const &registry)
{
  std::vector<Attribution> out;
  for (auto const &d : report.discrepancies)
  {
    Attribution a;
    a.address = d.address;
    a.role    = registry.role_of(d.address);
    switch (d.kind)
    {
    case MatchStatus::MissingOnChain:
    case MatchStatus::MissingOffChain:
      a.kind = Misbehavior::Repudiation;
      break;
    case MatchStatus::DigestMismatch:
      a.kind = Misbehavior::TamperedMessage;
      break;
    case MatchStatus::MediatorRemoved:
      a.kind = Misbehavior::MediatorRemoval;
      break;
    case MatchStatus::Matched:
      continue;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<Advisory> cross_check_oracle(AuditTrail const                    &trail,
                                         std::map<std::int64_t, double> const &reference,
                                         double                               tolerance)
{
  std::vector<Advisory> out;
  for (auto const &e : trail.entries)
  {
    if (!e.request || trail.registry.oracles.count(e.requester) == 0 ||
        e.status != MatchStatus::Matched)
    {
      continue;
    }
    slc::ClauseRequest request;
    try
    {
      request = slc::ClauseRequest::decode(*e.request);
    }
    catch (Error const &)
    {
      continue;
    }
    auto const reading = request.parameters.find("reading");
    auto const tick    = request.parameters.find("tick");
    if (reading == request.parameters.end() || tick == request.parameters.end())
    {
      continue;
    }
    auto const value = slc::as_number(reading->second);
    auto const *at   = std::get_if<std::int64_t>(&tick->second);
    if (!value || at == nullptr)
    {
      continue;
    }
    auto const ref = reference.find(*at);
    if (ref != reference.end() && std::fabs(*value - ref->second) > tolerance)
    {
      out.push_back({e.requester, *at, *value, ref->second});
    }
  }
  return out;
}

void write_report(std::ostream &out, AuditTrail const &trail, VerificationReport const &report,
                  std::vector<Attribution> const &attributions,
                  std::vector<Advisory> const    &advisories)
{
  out << "# anchorpact audit report\n";
  out << "# contract " << trail.bsc.hex() << "\n";
  out << "# pre-contract documents excluded from the trail: " << trail.pre_contract_records << "\n";
  out << "# fields: kind digest height address\n";
  for (auto const &e : trail.entries)
  {
    out << "entry " << e.sequence << " " << e.height << " " << e.tx_id.hex() << " "
        << e.requester.hex() << " " << (e.clause_id.empty() ? "-" : e.clause_id) << " "
        << to_string(e.status) << "\n";
  }
  for (auto const &d : report.discrepancies)
  {
    out << "finding " << to_string(d.kind) << " " << d.digest.hex() << " " << d.height << " "
        << d.address.hex() << "\n";
  }
  for (auto const &a : attributions)
  {
    out << "attribution " << a.address.hex() << " " << (a.role ? bsc::to_string(*a.role) : "Unknown")
        << " " << to_string(a.kind) << "\n";
  }
  for (auto const &a : advisories)
  {
    out << "advisory OracleReadingConflict " << a.oracle.hex() << " tick " << a.tick << " reported "
        << a.reported << " reference " << a.reference << "\n";
  }
  out << "summary: " << trail.entries.size() << " trail entries, " << report.verified
      << " verified, " << report.discrepancies.size() << " discrepancies";
  if (!advisories.empty())
  {
    out << ", " << advisories.size() << " oracle advisories (not counted)";
  }
  out << "\n";
}

}  // namespace anchorpact::audit
