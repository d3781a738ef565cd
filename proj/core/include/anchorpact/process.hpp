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

#include "anchorpact/slc.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace anchorpact::bpee {

using slc::Value;
using Variables = std::map<std::string, Value, std::less<>>;

/// Boolean expression over process variables: comparisons (== != < <= > >=)
/// between variables, numbers and 'quoted' strings, combined with && || and
/// parentheses.
class Guard
{
public:
  /// Throws Error(ParseError).
  static Guard parse(std::string_view text);

  /// Throws Error(GuardEvaluationError) on unknown variables or type mismatch.
  bool evaluate(Variables const &vars) const;

  std::string const &text() const noexcept
  {
    return text_;
  }

  struct Node;

private:
  std::string           text_;
  std::shared_ptr<Node> root_;
};

/// Operand of a clause-call parameter or message field: variable name,
/// number literal or 'quoted' string.
Value evaluate_operand(std::string_view operand, Variables const &vars);

enum class NodeType
{
  Task,
  SendMessage,
  ReceiveMessage,
  ClauseCall,
  ExclusiveGateway,
  Timer,
  End,
};

std::string_view to_string(NodeType type) noexcept;

struct ProcessNode
{
  std::string                        id;
  NodeType                           type{NodeType::Task};
  std::string                        handler;  // task
  std::string                        clause;   // clause-call
  std::string                        topic;    // send-message / receive-message
  std::string                        to;       // send-message recipient role
  std::optional<Guard>               until;    // receive-message
  std::string                        after;    // timer: relative ticks operand
  std::string                        at;       // timer: absolute tick operand
  std::map<std::string, std::string> params;   // clause-call / send-message operands
};

struct ProcessEdge
{
  std::string          from;
  std::string          to;
  std::optional<Guard> guard;
};

struct ProcessDefinition
{
  std::string              name;
  std::string              start;
  std::vector<ProcessNode> nodes;
  std::vector<ProcessEdge> edges;
  Variables                variables;

  ProcessNode const              *node(std::string_view id) const noexcept;
  std::vector<ProcessEdge const *> outgoing(std::string_view id) const;

  /// Throws Error(MissingStart), Error(UnreachableNode) or Error(ParseError).
  void validate() const;
};

/// Parses a YAML process document and validates its structure.
ProcessDefinition parse_process(std::string_view document);
ProcessDefinition load_definition(std::filesystem::path const &path);

enum class ProcessStatus
{
  Running,
  WaitingMessage,
  WaitingClause,
  Done,
  Faulted,
};

std::string_view to_string(ProcessStatus status) noexcept;

struct ProcessInstance
{
  std::shared_ptr<ProcessDefinition const>        definition;
  std::set<std::string>                           active;
  Variables                                       variables;
  ProcessStatus                                   status{ProcessStatus::Running};
  std::map<std::string, std::uint64_t>            entered_at;
  std::string                                     fault;

  static ProcessInstance start(std::shared_ptr<ProcessDefinition const> definition,
                               std::uint64_t now, Variables const &overrides = {});

  bool finished() const noexcept
  {
    return status == ProcessStatus::Done || status == ProcessStatus::Faulted;
  }
};

/// Outcome of firing an asynchronous node (task or clause-call).
enum class NodeProgress
{
  Complete,
  Waiting,
};

/// Side effects a process needs from its participant.
class ProcessHost
{
public:
  virtual ~ProcessHost() = default;

  virtual NodeProgress run_task(ProcessNode const &node, ProcessInstance &instance) = 0;
  virtual NodeProgress clause_call(ProcessNode const &node, ProcessInstance &instance) = 0;
  virtual void         send_message(ProcessNode const &node, ProcessInstance &instance) = 0;
  virtual bool         message_received(std::string_view topic) const = 0;
};

/// Fires every enabled active node once. Gateways pick the first edge whose
/// guard holds, falling back to an unguarded edge. Guard errors fault the
/// instance.
void step(ProcessInstance &instance, std::uint64_t now, ProcessHost &host);

}  // namespace anchorpact::bpee
