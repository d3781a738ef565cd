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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anchorpact {

using Bytes    = std::vector<std::uint8_t>;
using ByteView = std::span<std::uint8_t const>;

std::string to_hex(ByteView bytes);
Bytes       from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view text) noexcept
{
  return {reinterpret_cast<std::uint8_t const *>(text.data()), text.size()};
}

inline Bytes to_bytes(std::string_view text)
{
  auto const view = as_bytes(text);
  return {view.begin(), view.end()};
}

inline Bytes to_bytes(ByteView view)
{
  return {view.begin(), view.end()};
}

/// Fixed-width byte value rendered as lowercase hex in every external format.
template <std::size_t N, typename Tag>
struct FixedBytes
{
  static constexpr std::size_t size = N;

  std::array<std::uint8_t, N> bytes{};

  std::string hex() const
  {
    return to_hex(bytes);
  }

  ByteView view() const noexcept
  {
    return bytes;
  }

  bool is_zero() const noexcept
  {
    for (auto b : bytes)
    {
      if (b != 0)
      {
        return false;
      }
    }
    return true;
  }

  static FixedBytes from_bytes(ByteView raw);
  static FixedBytes from_hex(std::string_view hex)
  {
    auto const raw = anchorpact::from_hex(hex);
    return from_bytes(raw);
  }

  auto operator<=>(FixedBytes const &) const = default;
};

struct DigestTag;
struct AddressTag;
struct PublicKeyTag;
struct SecretKeyTag;

/// SHA-256 output.
using Digest = FixedBytes<32, DigestTag>;
/// Trailing 20 bytes of the hash of a public key.
using Address   = FixedBytes<20, AddressTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
/// Ed25519 private seed.
using SecretKey = FixedBytes<32, SecretKeyTag>;

struct Signature
{
  Bytes bytes;

  bool operator==(Signature const &) const = default;
};

struct KeyPair
{
  SecretKey secret;
  PublicKey public_key;
  Address   address;
};

namespace crypto {

constexpr std::size_t kSeedSize      = 32;
constexpr std::size_t kSignatureSize = 64;

/// Fresh keypair from the system CSPRNG.
KeyPair generate_keypair();
/// Deterministic keypair; throws Error(InvalidSeed) unless seed is 32 bytes.
KeyPair generate_keypair(ByteView seed);

Digest hash(ByteView data);
Digest hash(std::string_view data);

Address derive_address(PublicKey const &public_key);

Signature sign(SecretKey const &secret, ByteView data);
/// Throws Error(InvalidKey) when the raw key is not a 32-byte Ed25519 seed.
Signature sign(ByteView secret, ByteView data);

/// Never throws; malformed keys or signatures simply fail verification.
bool verify(PublicKey const &public_key, ByteView data, Signature const &sig) noexcept;

/// Domain-separated 32-byte seed derived from a root value and a label.
std::array<std::uint8_t, kSeedSize> derive_seed(std::uint64_t root, std::string_view label);

}  // namespace crypto
}  // namespace anchorpact
