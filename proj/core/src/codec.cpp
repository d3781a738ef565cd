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

#include "anchorpact/codec.hpp"

#include "anchorpact/error.hpp"

#include <bit>

namespace anchorpact::codec {
namespace {

void put_be(Bytes &out, std::uint64_t value, int width)
{
  for (int shift = (width - 1) * 8; shift >= 0; shift -= 8)
  {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

std::uint64_t get_be(ByteView in)
{
  std::uint64_t value = 0;
  for (auto b : in)
  {
    value = (value << 8) | b;
  }
  return value;
}

}  // namespace

Writer &Writer::u64(std::uint64_t value)
{
  put_be(buffer_, 8, 4);
  put_be(buffer_, value, 8);
  return *this;
}

Writer &Writer::i64(std::int64_t value)
{
  return u64(static_cast<std::uint64_t>(value));
}

Writer &Writer::f64(double value)
{
  return u64(std::bit_cast<std::uint64_t>(value));
}

Writer &Writer::boolean(bool value)
{
  return u64(value ? 1 : 0);
}

Writer &Writer::bytes(ByteView value)
{
  if (value.size() > 0xffffffffULL)
  {
    throw Error(Errc::Decode, "field too large");
  }
  put_be(buffer_, value.size(), 4);
  buffer_.insert(buffer_.end(), value.begin(), value.end());
  return *this;
}

Writer &Writer::str(std::string_view value)
{
  return bytes(as_bytes(value));
}

ByteView Reader::bytes()
{
  if (data_.size() - offset_ < 4)
  {
    throw Error(Errc::Decode, "truncated length prefix at offset " + std::to_string(offset_));
  }
  auto const len = get_be(data_.subspan(offset_, 4));
  offset_ += 4;
  if (data_.size() - offset_ < len)
  {
    throw Error(Errc::Decode, "truncated field at offset " + std::to_string(offset_));
  }
  auto field = data_.subspan(offset_, len);
  offset_ += len;
  return field;
}

std::uint64_t Reader::u64()
{
  auto const field = bytes();
  if (field.size() != 8)
  {
    throw Error(Errc::Decode, "integer field must be 8 bytes");
  }
  return get_be(field);
}

std::size_t Reader::count()
{
  auto const n = u64();
  // Every element carries at least one 4-byte length prefix.
  if (n > (data_.size() - offset_) / 4)
  {
    throw Error(Errc::Decode, "element count exceeds input");
  }
  return static_cast<std::size_t>(n);
}

std::int64_t Reader::i64()
{
  return static_cast<std::int64_t>(u64());
}

double Reader::f64()
{
  return std::bit_cast<double>(u64());
}

bool Reader::boolean()
{
  auto const v = u64();
  if (v > 1)
  {
    throw Error(Errc::Decode, "boolean field out of range");
  }
  return v == 1;
}

std::string Reader::str()
{
  auto const field = bytes();
  return {reinterpret_cast<char const *>(field.data()), field.size()};
}

void Reader::expect_end() const
{
  if (!at_end())
  {
    throw Error(Errc::Decode, "trailing bytes after record");
  }
}

}  // namespace anchorpact::codec
