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
#include "anchorpact/local_store.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anchorpact::audit {

enum class MatchStatus
{
  Matched,
  MissingOnChain,
  MissingOffChain,
  DigestMismatch,
  MediatorRemoved,
};

std::string_view to_string(MatchStatus status) noexcept;

struct TrailEntry
{
  std::size_t          sequence{0};
  std::uint64_t        height{0};
  std::uint64_t        index{0};
  Digest               tx_id;
  Address              requester;
  std::string          clause_id;  // empty when no payload is available
  std::optional<Bytes> request;
  std::optional<Bytes> response;
  Digest               request_digest;
  Digest               response_digest;
  MatchStatus          status{MatchStatus::Matched};
  bool                 anchored{true};
  std::optional<Address> removed_by;
};

struct AuditTrail
{
  Address                  bsc;
  bsc::ParticipantRegistry registry;
  std::size_t              pre_contract_records{0};
  std::vector<TrailEntry>  entries;
};

/// Joins every anchor of `bsc` with the store's records by transaction id.
/// Anchored entries follow chain order; unanchored local records follow in
/// receipt order. A null store yields digest-only entries.
AuditTrail reconstruct(LocalStore const *store, ledger::Ledger const &chain, Address const &bsc);
/// Uses the contract address recorded in the store. Throws Error(CorruptStore)
/// when the store never saw a contract.
AuditTrail reconstruct(LocalStore const &store, ledger::Ledger const &chain);

struct Discrepancy
{
  MatchStatus   kind{MatchStatus::MissingOnChain};
  Digest        digest;
  std::uint64_t height{0};
  Address       address;  // implicated participant
  std::string   details;
};

struct VerificationReport
{
  std::size_t              verified{0};
  std::vector<Discrepancy> discrepancies;
};

VerificationReport verify(AuditTrail const &trail);

enum class Misbehavior
{
  Repudiation,
  TamperedMessage,
  MediatorRemoval,
};

std::string_view to_string(Misbehavior kind) noexcept;

struct Attribution
{
  Address                  address;
  std::optional<bsc::Role> role;
  Misbehavior              kind{Misbehavior::Repudiation};
};

std::vector<Attribution> attribute(VerificationReport const       &report,
                                   bsc::ParticipantRegistry const &registry);

/// Oracle readings that disagree with a second source. Advisory only: the
/// trail alone cannot tell a fake reading from a real one.
struct Advisory
{
  Address       oracle;
  std::int64_t  tick{0};
  double        reported{0.0};
  double        reference{0.0};
};

std::vector<Advisory> cross_check_oracle(AuditTrail const                    &trail,
                                         std::map<std::int64_t, double> const &reference,
                                         double                               tolerance);

void write_report(std::ostream &out, AuditTrail const &trail, VerificationReport const &report,
                  std::vector<Attribution> const &attributions,
                  std::vector<Advisory> const    &advisories = {});

}  // namespace anchorpact::audit
