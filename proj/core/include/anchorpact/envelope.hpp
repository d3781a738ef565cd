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

#include "anchorpact/crypto.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace anchorpact::bpee {

enum class EnvelopeKind : std::uint8_t
{
  RequestDiffusion,
  OracleReading,
  Document,
};

std::string_view to_string(EnvelopeKind kind) noexcept;

/// Signed off-chain message. Diffusions reference the anchoring transaction
/// through `anchor_ref`; documents exchanged before the contract exists carry
/// a zero instance id and a topic.
struct MessageEnvelope
{
  Digest       instance_id;
  Address      sender;
  EnvelopeKind kind{EnvelopeKind::RequestDiffusion};
  std::string  topic;
  Bytes        request;
  Bytes        response;
  Digest       anchor_ref;
  Signature    signature;

  Bytes signing_bytes() const;
  Bytes encode() const;

  /// Throws Error(Decode).
  static MessageEnvelope decode(ByteView bytes);

  static MessageEnvelope make(KeyPair const &key, Digest const &instance_id, EnvelopeKind kind,
                              std::string topic, Bytes request, Bytes response,
                              Digest const &anchor_ref);

  bool signature_valid(PublicKey const &key) const noexcept;

  Digest request_digest() const
  {
    return crypto::hash(request);
  }
  Digest response_digest() const
  {
    return crypto::hash(response);
  }
};

/// Receiver's decision on an envelope.
enum class Verdict
{
  Accepted,
  BadSignature,
  UnknownSender,
  NotAnchored,
  DigestMismatch,
  DivergentResponse,
  StaleRequest,
};

std::string_view       to_string(Verdict verdict) noexcept;
std::optional<Verdict> verdict_from_string(std::string_view text) noexcept;

}  // namespace anchorpact::bpee
