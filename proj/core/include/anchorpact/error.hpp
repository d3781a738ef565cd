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

#include <stdexcept>
#include <string>
#include <string_view>

namespace anchorpact {

enum class Errc
{
  // crypto / encoding
  InvalidSeed,
  InvalidKey,
  InvalidHex,
  Decode,
  // ledger and contract execution
  BadSignature,
  UnknownContract,
  DeployRejected,
  Unauthorized,
  InvalidState,
  AlreadyAnchored,
  DuplicateAnchor,
  IllegalTransition,
  UnknownAnchor,
  ClausesPending,
  UnknownClause,
  MalformedCall,
  UnknownTx,
  // smart legal contract
  TemplateError,
  MissingBinding,
  NoOrganizations,
  BscAddressUnset,
  UnknownParty,
  NotFullySigned,
  DivergentResponse,
  StaleRequest,
  // process engine
  ParseError,
  UnreachableNode,
  MissingStart,
  GuardEvaluationError,
  EnforcementAborted,
  // audit / scenario
  CorruptStore,
  ConfigError,
  RoundAborted,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(Errc code, std::string const &detail);

  Errc code() const noexcept
  {
    return code_;
  }

private:
  Errc code_;
};

}  // namespace anchorpact
