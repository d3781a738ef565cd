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


#include "anchorpact/local_store.hpp"

#include "anchorpact/error.hpp"

#include <istream>
#include <sstream>

namespace anchorpact::audit {

namespace {

constexpr std::string_view kMagic = "anchorpact-store";

std::string out_line(OutboundRecord const &r)
{
  return "out " + r.tx_id.hex() + " " + std::to_string(r.height) + " " + to_hex(r.request) + " " +
         to_hex(r.response);
}

std::string in_line(InboundRecord const &r)
{
  return "in " + std::string{bpee::to_string(r.verdict)} + " " + std::to_string(r.height) + " " +
         to_hex(r.envelope.encode());
}

std::string pre_line(PreContractRecord const &r)
{
  return std::string{"pre "} + (r.outgoing ? "sent " : "received ") + std::to_string(r.height) +
         " " + to_hex(r.envelope.encode());
}

std::uint64_t parse_height(std::string const &text)
{
  std::size_t used{0};
  auto const  value = std::stoull(text, &used);
  if (used != text.size())
  {
    throw std::invalid_argument("height");
  }
  return value;
}

}  // namespace

LocalStore::LocalStore(Address const &owner)
  : owner_{owner}
{
  lines_.push_back(std::string{kMagic} + " " + owner_.hex());
}

LocalStore::LocalStore(Address const &owner, std::filesystem::path const &path)
  : LocalStore(owner)
{
  sink_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*sink_)
  {
    throw Error(Errc::CorruptStore, "cannot open " + path.string());
  }
  *sink_ << lines_.front() << '\n' << std::flush;
}

void LocalStore::emit(std::string const &line)
{
  lines_.push_back(line);
  if (sink_)
  {
    *sink_ << line << '\n' << std::flush;
  }
}

void LocalStore::bind(Address const &bsc)
{
  bsc_ = bsc;
  emit("bsc " + bsc.hex());
}

void LocalStore::record(OutboundRecord record)
{
  emit(out_line(record));
  outbound_.push_back(std::move(record));
}

void LocalStore::record(InboundRecord record)
{
  emit(in_line(record));
  inbound_.push_back(std::move(record));
}

void LocalStore::record(PreContractRecord record)
{
  emit(pre_line(record));
  pre_.push_back(std::move(record));
}

void LocalStore::write(std::ostream &out) const
{
  for (auto const &line : lines_)
  {
    out << line << '\n';
  }
}

LocalStore LocalStore::read(std::istream &in)
{
  std::string line;
  std::size_t number{0};
  auto const  corrupt = [&](std::string const &why) {
    return Error(Errc::CorruptStore, "line " + std::to_string(number) + ": " + why);
  };

  if (!std::getline(in, line))
  {
    throw Error(Errc::CorruptStore, "line 1: empty store");
  }
  ++number;
  std::istringstream header{line};
  std::string        magic;
  std::string        owner_hex;
  header >> magic >> owner_hex;
  if (magic != kMagic)
  {
    throw corrupt("missing store header");
  }
  std::optional<LocalStore> store;
  try
  {
    store.emplace(Address::from_hex(owner_hex));
  }
  catch (Error const &e)
  {
    throw corrupt(e.what());
  }

  while (std::getline(in, line))
  {
    ++number;
    if (line.empty())
    {
      continue;
    }
    std::istringstream       fields{line};
    std::vector<std::string> parts;
    for (std::string f; fields >> f;)
    {
      parts.push_back(std::move(f));
    }
    try
    {
      auto const &tag = parts.at(0);
      if (tag == "bsc" && parts.size() == 2)
      {
        store->bind(Address::from_hex(parts[1]));
      }
      else if (tag == "out" && parts.size() == 5)
      {
        store->record(OutboundRecord{Digest::from_hex(parts[1]), parse_height(parts[2]),
                                     from_hex(parts[3]), from_hex(parts[4])});
      }
      else if (tag == "in" && parts.size() == 4)
      {
        auto verdict = bpee::verdict_from_string(parts[1]);
        if (!verdict)
        {
          throw corrupt("unknown verdict " + parts[1]);
        }
        store->record(InboundRecord{*verdict, parse_height(parts[2]),
                                    bpee::MessageEnvelope::decode(from_hex(parts[3]))});
      }
      else if (tag == "pre" && parts.size() == 4 && (parts[1] == "sent" || parts[1] == "received"))
      {
        store->record(PreContractRecord{parts[1] == "sent", parse_height(parts[2]),
                                        bpee::MessageEnvelope::decode(from_hex(parts[3]))});
      }
      else
      {
        throw corrupt("unrecognised record");
      }
    }
    catch (Error const &e)
    {
      if (e.code() == Errc::CorruptStore)
      {
        throw;
      }
      throw corrupt(e.what());
    }
    catch (std::exception const &e)
    {
      throw corrupt(std::string{"malformed field: "} + e.what());
    }
  }
  return std::move(*store);
}

LocalStore LocalStore::load(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(Errc::CorruptStore, "cannot open " + path.string());
  }
  return read(in);
}

}  // namespace anchorpact::audit
