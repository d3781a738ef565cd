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

#include <cstdint>
#include <string>
#include <string_view>

namespace anchorpact::codec {

// Canonical encoding: every field is a 4-byte big-endian length followed by
// the field bytes, in declared order. Integers occupy 8-byte big-endian
// fields, doubles their IEEE-754 bit pattern. Nested records are fields.
class Writer
{
public:
  Writer &u64(std::uint64_t value);
  Writer &i64(std::int64_t value);
  Writer &f64(double value);
  Writer &boolean(bool value);
  Writer &bytes(ByteView value);
  Writer &str(std::string_view value);

  template <std::size_t N, typename Tag>
  Writer &fixed(FixedBytes<N, Tag> const &value)
  {
    return bytes(value.view());
  }

  Writer &nested(Writer const &inner)
  {
    return bytes(inner.buffer_);
  }

  Bytes const &buffer() const noexcept
  {
    return buffer_;
  }

  Bytes take() noexcept
  {
    return std::move(buffer_);
  }

private:
  Bytes buffer_;
};

/// Throws Error(Decode) on truncated or mis-sized fields.
class Reader
{
public:
  explicit Reader(ByteView data) noexcept
    : data_{data}
  {}

  std::uint64_t u64();
  std::int64_t  i64();
  double        f64();
  bool          boolean();
  ByteView      bytes();
  std::string   str();
  /// Element count of a following sequence; rejects counts the remaining
  /// input cannot possibly hold.
  std::size_t count();

  template <std::size_t N, typename Tag>
  FixedBytes<N, Tag> fixed()
  {
    return FixedBytes<N, Tag>::from_bytes(bytes());
  }

  Reader nested()
  {
    return Reader{bytes()};
  }

  bool at_end() const noexcept
  {
    return offset_ == data_.size();
  }

  void expect_end() const;

private:
  ByteView    data_;
  std::size_t offset_{0};
};

}  // namespace anchorpact::codec
