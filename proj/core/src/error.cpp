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

#include "anchorpact/error.hpp"

namespace anchorpact {

std::string_view to_string(Errc code) noexcept
{
  switch (code)
  {
  case Errc::InvalidSeed:
    return "InvalidSeed";
  case Errc::InvalidKey:
    return "InvalidKey";
  case Errc::InvalidHex:
    return "InvalidHex";
  case Errc::Decode:
    return "Decode";
  case Errc::BadSignature:
    return "BadSignature";
  case Errc::UnknownContract:
    return "UnknownContract";
  case Errc::DeployRejected:
    return "DeployRejected";
  case Errc::Unauthorized:
    return "Unauthorized";
  case Errc::InvalidState:
    return "InvalidState";
  case Errc::AlreadyAnchored:
    return "AlreadyAnchored";
  case Errc::DuplicateAnchor:
    return "DuplicateAnchor";
  case Errc::IllegalTransition:
    return "IllegalTransition";
  case Errc::UnknownAnchor:
    return "UnknownAnchor";
  case Errc::ClausesPending:
    return "ClausesPending";
  case Errc::UnknownClause:
    return "UnknownClause";
  case Errc::MalformedCall:
    return "MalformedCall";
  case Errc::UnknownTx:
    return "UnknownTx";
  case Errc::TemplateError:
    return "TemplateError";
  case Errc::MissingBinding:
    return "MissingBinding";
  case Errc::NoOrganizations:
    return "NoOrganizations";
  case Errc::BscAddressUnset:
    return "BscAddressUnset";
  case Errc::UnknownParty:
    return "UnknownParty";
  case Errc::NotFullySigned:
    return "NotFullySigned";
  case Errc::DivergentResponse:
    return "DivergentResponse";
  case Errc::StaleRequest:
    return "StaleRequest";
  case Errc::ParseError:
    return "ParseError";
  case Errc::UnreachableNode:
    return "UnreachableNode";
  case Errc::MissingStart:
    return "MissingStart";
  case Errc::GuardEvaluationError:
    return "GuardEvaluationError";
  case Errc::EnforcementAborted:
    return "EnforcementAborted";
  case Errc::CorruptStore:
    return "CorruptStore";
  case Errc::ConfigError:
    return "ConfigError";
  case Errc::RoundAborted:
    return "RoundAborted";
  }
  return "Unknown";
}

Error::Error(Errc code, std::string const &detail)
  : std::runtime_error(std::string{to_string(code)} + (detail.empty() ? "" : ": " + detail))
  , code_{code}
{}

}  // namespace anchorpact
