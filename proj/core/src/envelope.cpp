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


#include "anchorpact/envelope.hpp"

#include "anchorpact/codec.hpp"
#include "anchorpact/error.hpp"

#include <array>

namespace anchorpact::bpee {

namespace {

constexpr std::array kVerdicts{Verdict::Accepted,       Verdict::BadSignature,
                               Verdict::UnknownSender,  Verdict::NotAnchored,
                               Verdict::DigestMismatch, Verdict::DivergentResponse,
                               Verdict::StaleRequest};

}  // namespace

std::string_view to_string(EnvelopeKind kind) noexcept
{
  switch (kind)
  {
  case EnvelopeKind::RequestDiffusion:
    return "request-diffusion";
  case EnvelopeKind::OracleReading:
    return "oracle-reading";
  case EnvelopeKind::Document:
    return "document";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) noexcept
{
  switch (verdict)
  {
  case Verdict::Accepted:
    return "Accepted";
  case Verdict::BadSignature:
    return "BadSignature";
  case Verdict::UnknownSender:
    return "UnknownSender";
  case Verdict::NotAnchored:
    return "NotAnchored";
  case Verdict::DigestMismatch:
    return "DigestMismatch";
  case Verdict::DivergentResponse:
    return "DivergentResponse";
  case Verdict::StaleRequest:
    return "StaleRequest";
  }
  return "unknown";
}

std::optional<Verdict> verdict_from_string(std::string_view text) noexcept
{
  for (auto v : kVerdicts)
  {
    if (to_string(v) == text)
    {
      return v;
    }
  }
  return std::nullopt;
}

Bytes MessageEnvelope::signing_bytes() const
{
  codec::Writer w;
  w.str("anchorpact/envelope");
  w.fixed(instance_id);
  w.fixed(sender);
  w.u64(static_cast<std::uint64_t>(kind));
  w.str(topic);
  w.bytes(request);
  w.bytes(response);
  w.fixed(anchor_ref);
  return w.take();
}

Bytes MessageEnvelope::encode() const
{
  codec::Writer w;
  w.bytes(signing_bytes());
  w.bytes(signature.bytes);
  return w.take();
}

MessageEnvelope MessageEnvelope::decode(ByteView bytes)
{
  codec::Reader outer{bytes};
  auto r = outer.nested();
  MessageEnvelope env;
  env.signature.bytes = to_bytes(outer.bytes());
  outer.expect_end();

  if (r.str() != "anchorpact/envelope")
  {
    throw Error(Errc::Decode, "not an envelope");
  }
  env.instance_id = r.fixed<32, DigestTag>();
  env.sender      = r.fixed<20, AddressTag>();
  auto const kind = r.u64();
  if (kind > static_cast<std::uint64_t>(EnvelopeKind::Document))
  {
    throw Error(Errc::Decode, "bad envelope kind");
  }
  env.kind       = static_cast<EnvelopeKind>(kind);
  env.topic      = r.str();
  env.request    = to_bytes(r.bytes());
  env.response   = to_bytes(r.bytes());
  env.anchor_ref = r.fixed<32, DigestTag>();
  r.expect_end();
  return env;
}

MessageEnvelope MessageEnvelope::make(KeyPair const &key, Digest const &instance_id,
                                      EnvelopeKind kind, std::string topic, Bytes request,
                                      Bytes response, Digest const &anchor_ref)
{
  MessageEnvelope env;
  env.instance_id = instance_id;
  env.sender      = key.address;
  env.kind        = kind;
  env.topic       = std::move(topic);
  env.request     = std::move(request);
  env.response    = std::move(response);
  env.anchor_ref  = anchor_ref;
  env.signature   = crypto::sign(key.secret, env.signing_bytes());
  return env;
}

bool MessageEnvelope::signature_valid(PublicKey const &key) const noexcept
{
  try
  {
    return crypto::derive_address(key) == sender &&
           crypto::verify(key, signing_bytes(), signature);
  }
  catch (...)
  {
    return false;
  }
}

}  // namespace anchorpact::bpee
