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

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace anchorpact::audit {

/// A request this participant anchored and diffused.
struct OutboundRecord
{
  Digest        tx_id;
  std::uint64_t height{0};
  Bytes         request;
  Bytes         response;
};

/// An envelope this participant received, with its verdict.
struct InboundRecord
{
  bpee::Verdict         verdict{bpee::Verdict::Accepted};
  std::uint64_t         height{0};
  bpee::MessageEnvelope envelope;
};

/// Unanchored traffic exchanged before the contract existed.
struct PreContractRecord
{
  bool                  outgoing{false};
  std::uint64_t         height{0};
  bpee::MessageEnvelope envelope;
};

/// Append-only per-participant log. Text, one record per line. When opened on
/// a file every record is written through as it is appended.
class LocalStore
{
public:
  explicit LocalStore(Address const &owner);
  LocalStore(Address const &owner, std::filesystem::path const &path);

  Address const &owner() const noexcept
  {
    return owner_;
  }
  std::optional<Address> const &bsc() const noexcept
  {
    return bsc_;
  }

  void bind(Address const &bsc);
  void record(OutboundRecord record);
  void record(InboundRecord record);
  void record(PreContractRecord record);

  std::vector<OutboundRecord> const &outbound() const noexcept
  {
    return outbound_;
  }
  std::vector<InboundRecord> const &inbound() const noexcept
  {
    return inbound_;
  }
  std::vector<PreContractRecord> const &pre_contract() const noexcept
  {
    return pre_;
  }

  void write(std::ostream &out) const;

  /// Throws Error(CorruptStore) naming the offending line.
  static LocalStore read(std::istream &in);
  static LocalStore load(std::filesystem::path const &path);

private:
  void emit(std::string const &line);

  Address                        owner_;
  std::optional<Address>         bsc_;
  std::vector<OutboundRecord>    outbound_;
  std::vector<InboundRecord>     inbound_;
  std::vector<PreContractRecord> pre_;
  std::vector<std::string>       lines_;
  std::unique_ptr<std::ofstream> sink_;
};

}  // namespace anchorpact::audit
