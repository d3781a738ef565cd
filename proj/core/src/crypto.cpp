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

#include "anchorpact/crypto.hpp"

#include "anchorpact/error.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

namespace anchorpact {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) noexcept
{
  if (c >= '0' && c <= '9')
  {
    return c - '0';
  }
  if (c >= 'a' && c <= 'f')
  {
    return c - 'a' + 10;
  }
  if (c >= 'A' && c <= 'F')
  {
    return c - 'A' + 10;
  }
  return -1;
}

struct PkeyDeleter
{
  void operator()(EVP_PKEY *key) const noexcept
  {
    EVP_PKEY_free(key);
  }
};

struct MdCtxDeleter
{
  void operator()(EVP_MD_CTX *ctx) const noexcept
  {
    EVP_MD_CTX_free(ctx);
  }
};

using PkeyPtr  = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

// OpenSSL rejects null buffers even for zero-length input.
std::uint8_t const *non_null(ByteView data) noexcept
{
  static std::uint8_t const empty = 0;
  return data.empty() ? &empty : data.data();
}

}  // namespace

std::string to_hex(ByteView bytes)
{
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes)
  {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex)
{
  if (hex.size() % 2 != 0)
  {
    throw Error(Errc::InvalidHex, "odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
  {
    int const hi = hex_value(hex[i]);
    int const lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0)
    {
      throw Error(Errc::InvalidHex, "non-hex character");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from_bytes(ByteView raw)
{
  if (raw.size() != N)
  {
    throw Error(Errc::Decode, "expected " + std::to_string(N) + " bytes, got " +
                                  std::to_string(raw.size()));
  }
  FixedBytes out;
  std::copy(raw.begin(), raw.end(), out.bytes.begin());
  return out;
}

template struct FixedBytes<32, DigestTag>;
template struct FixedBytes<20, AddressTag>;
template struct FixedBytes<32, PublicKeyTag>;
template struct FixedBytes<32, SecretKeyTag>;

namespace crypto {

KeyPair generate_keypair()
{
  std::array<std::uint8_t, kSeedSize> seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1)
  {
    throw Error(Errc::InvalidSeed, "system RNG failure");
  }
  return generate_keypair(seed);
}

KeyPair generate_keypair(ByteView seed)
{
  if (seed.size() != kSeedSize)
  {
    throw Error(Errc::InvalidSeed, "seed must be 32 bytes, got " + std::to_string(seed.size()));
  }
  PkeyPtr key{EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size())};
  if (!key)
  {
    throw Error(Errc::InvalidSeed, "key construction failed");
  }
  KeyPair kp;
  std::copy(seed.begin(), seed.end(), kp.secret.bytes.begin());
  std::size_t len = PublicKey::size;
  if (EVP_PKEY_get_raw_public_key(key.get(), kp.public_key.bytes.data(), &len) != 1 ||
      len != PublicKey::size)
  {
    throw Error(Errc::InvalidKey, "public key extraction failed");
  }
  kp.address = derive_address(kp.public_key);
  return kp;
}

Digest hash(ByteView data)
{
  Digest       out;
  unsigned int len = 0;
  if (EVP_Digest(non_null(data), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != Digest::size)
  {
    throw Error(Errc::Decode, "sha256 failure");
  }
  return out;
}

Digest hash(std::string_view data)
{
  return hash(as_bytes(data));
}

Address derive_address(PublicKey const &public_key)
{
  auto const digest = hash(public_key.view());
  Address    out;
  std::copy(digest.bytes.end() - Address::size, digest.bytes.end(), out.bytes.begin());
  return out;
}

Signature sign(SecretKey const &secret, ByteView data)
{
  PkeyPtr key{EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret.bytes.data(),
                                           secret.bytes.size())};
  MdCtxPtr ctx{EVP_MD_CTX_new()};
  if (!key || !ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
  {
    throw Error(Errc::InvalidKey, "signing key rejected");
  }
  Signature   sig;
  std::size_t len = kSignatureSize;
  sig.bytes.resize(len);
  if (EVP_DigestSign(ctx.get(), sig.bytes.data(), &len, non_null(data), data.size()) != 1)
  {
    throw Error(Errc::InvalidKey, "signing failed");
  }
  sig.bytes.resize(len);
  return sig;
}

Signature sign(ByteView secret, ByteView data)
{
  if (secret.size() != SecretKey::size)
  {
    throw Error(Errc::InvalidKey, "secret key must be 32 bytes");
  }
  return sign(SecretKey::from_bytes(secret), data);
}

bool verify(PublicKey const &public_key, ByteView data, Signature const &sig) noexcept
{
  if (sig.bytes.size() != kSignatureSize)
  {
    return false;
  }
  PkeyPtr key{EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.bytes.data(),
                                          public_key.bytes.size())};
  MdCtxPtr ctx{EVP_MD_CTX_new()};
  if (!key || !ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
  {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), sig.bytes.data(), sig.bytes.size(), non_null(data),
                          data.size()) == 1;
}

std::array<std::uint8_t, kSeedSize> derive_seed(std::uint64_t root, std::string_view label)
{
  Bytes material = to_bytes("anchorpact/seed/");
  for (int shift = 56; shift >= 0; shift -= 8)
  {
    material.push_back(static_cast<std::uint8_t>(root >> shift));
  }
  material.push_back('/');
  material.insert(material.end(), label.begin(), label.end());
  return hash(material).bytes;
}

}  // namespace crypto
}  // namespace anchorpact
