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


#include "anchorpact/process.hpp"

#include "anchorpact/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>

namespace anchorpact::bpee {

namespace {

enum class Tok
{
  Operand,
  Op,
  LParen,
  RParen,
  And,
  Or,
  End,
};

struct Token
{
  Tok         kind;
  std::string text;
};

bool is_ident_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' || c == '-' ||
         c == '+';
}

std::vector<Token> tokenize(std::string_view text)
{
  std::vector<Token> out;
  std::size_t        i = 0;
  while (i < text.size())
  {
    char const c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0)
    {
      ++i;
      continue;
    }
    if (c == '(' || c == ')')
    {
      out.push_back({c == '(' ? Tok::LParen : Tok::RParen, std::string(1, c)});
      ++i;
      continue;
    }
    auto const two = text.substr(i, 2);
    if (two == "&&" || two == "||")
    {
      out.push_back({two == "&&" ? Tok::And : Tok::Or, std::string{two}});
      i += 2;
      continue;
    }
    if (two == "==" || two == "!=" || two == "<=" || two == ">=")
    {
      out.push_back({Tok::Op, std::string{two}});
      i += 2;
      continue;
    }
    if (c == '<' || c == '>')
    {
      out.push_back({Tok::Op, std::string(1, c)});
      ++i;
      continue;
    }
    if (c == '\'' || c == '"')
    {
      auto const close = text.find(c, i + 1);
      if (close == std::string_view::npos)
      {
        throw Error(Errc::ParseError, "unterminated string in guard: " + std::string{text});
      }
      out.push_back({Tok::Operand, std::string{text.substr(i, close - i + 1)}});
      i = close + 1;
      continue;
    }
    if (is_ident_char(c))
    {
      auto j = i;
      while (j < text.size() && is_ident_char(text[j]))
      {
        ++j;
      }
      out.push_back({Tok::Operand, std::string{text.substr(i, j - i)}});
      i = j;
      continue;
    }
    throw Error(Errc::ParseError, "unexpected character in guard: " + std::string{text});
  }
  out.push_back({Tok::End, {}});
  return out;
}

std::optional<Value> literal(std::string_view operand)
{
  if (operand.empty())
  {
    return std::nullopt;
  }
  if (operand.front() == '\'' || operand.front() == '"')
  {
    return Value{std::string{operand.substr(1, operand.size() - 2)}};
  }
  auto const first = operand.front();
  if (std::isdigit(static_cast<unsigned char>(first)) == 0 && first != '-' && first != '+')
  {
    return std::nullopt;
  }
  auto const *begin = operand.data() + (first == '+' ? 1 : 0);
  auto const *end   = operand.data() + operand.size();
  std::int64_t integer{};
  if (auto r = std::from_chars(begin, end, integer); r.ec == std::errc{} && r.ptr == end)
  {
    return Value{integer};
  }
  double real{};
  if (auto r = std::from_chars(begin, end, real); r.ec == std::errc{} && r.ptr == end)
  {
    return Value{real};
  }
  throw Error(Errc::ParseError, "bad numeric literal: " + std::string{operand});
}

}  // namespace

struct Guard::Node
{
  enum class Kind
  {
    Operand,
    Compare,
    And,
    Or,
  };

  Kind                  kind{Kind::Operand};
  std::string           text;  // operand or operator
  std::shared_ptr<Node> lhs;
  std::shared_ptr<Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<Guard::Node>;

class Parser
{
public:
  explicit Parser(std::vector<Token> tokens)
    : tokens_{std::move(tokens)}
  {}

  NodePtr parse()
  {
    auto root = parse_or();
    if (peek().kind != Tok::End)
    {
      throw Error(Errc::ParseError, "trailing tokens in guard near '" + peek().text + "'");
    }
    return root;
  }

private:
  Token const &peek() const
  {
    return tokens_[pos_];
  }

  Token next()
  {
    return tokens_[pos_++];
  }

  NodePtr binary(Guard::Node::Kind kind, NodePtr lhs, NodePtr rhs, std::string text = {})
  {
    auto node  = std::make_shared<Guard::Node>();
    node->kind = kind;
    node->lhs  = std::move(lhs);
    node->rhs  = std::move(rhs);
    node->text = std::move(text);
    return node;
  }

  NodePtr parse_or()
  {
    auto lhs = parse_and();
    while (peek().kind == Tok::Or)
    {
      next();
      lhs = binary(Guard::Node::Kind::Or, lhs, parse_and());
    }
    return lhs;
  }

  NodePtr parse_and()
  {
    auto lhs = parse_compare();
    while (peek().kind == Tok::And)
    {
      next();
      lhs = binary(Guard::Node::Kind::And, lhs, parse_compare());
    }
    return lhs;
  }

  NodePtr parse_compare()
  {
    auto lhs = parse_primary();
    if (peek().kind == Tok::Op)
    {
      auto op = next().text;
      lhs     = binary(Guard::Node::Kind::Compare, lhs, parse_primary(), std::move(op));
    }
    return lhs;
  }

  NodePtr parse_primary()
  {
    auto tok = next();
    if (tok.kind == Tok::LParen)
    {
      auto inner = parse_or();
      if (next().kind != Tok::RParen)
      {
        throw Error(Errc::ParseError, "missing ')' in guard");
      }
      return inner;
    }
    if (tok.kind != Tok::Operand)
    {
      throw Error(Errc::ParseError, "expected operand in guard, got '" + tok.text + "'");
    }
    literal(tok.text);  // reject malformed numbers early
    auto node  = std::make_shared<Guard::Node>();
    node->text = std::move(tok.text);
    return node;
  }

  std::vector<Token> tokens_;
  std::size_t        pos_{0};
};

bool compare(Value const &lhs, Value const &rhs, std::string_view op)
{
  auto const ln = slc::as_number(lhs);
  auto const rn = slc::as_number(rhs);
  int        order{};
  if (ln && rn)
  {
    if (std::holds_alternative<std::int64_t>(lhs) && std::holds_alternative<std::int64_t>(rhs))
    {
      auto const a = std::get<std::int64_t>(lhs);
      auto const b = std::get<std::int64_t>(rhs);
      order        = a < b ? -1 : (a > b ? 1 : 0);
    }
    else
    {
      order = *ln < *rn ? -1 : (*ln > *rn ? 1 : 0);
    }
  }
  else if (!ln && !rn)
  {
    auto const c = std::get<std::string>(lhs).compare(std::get<std::string>(rhs));
    order        = c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  else
  {
    throw Error(Errc::GuardEvaluationError, "cannot compare " + slc::value_to_string(lhs) +
                                                " with " + slc::value_to_string(rhs));
  }
  if (op == "==")
  {
    return order == 0;
  }
  if (op == "!=")
  {
    return order != 0;
  }
  if (op == "<")
  {
    return order < 0;
  }
  if (op == "<=")
  {
    return order <= 0;
  }
  if (op == ">")
  {
    return order > 0;
  }
  return order >= 0;
}

bool eval(Guard::Node const &node, Variables const &vars)
{
  using Kind = Guard::Node::Kind;
  switch (node.kind)
  {
  case Kind::Or:
    return eval(*node.lhs, vars) || eval(*node.rhs, vars);
  case Kind::And:
    return eval(*node.lhs, vars) && eval(*node.rhs, vars);
  case Kind::Compare:
    return compare(evaluate_operand(node.lhs->text, vars), evaluate_operand(node.rhs->text, vars),
                   node.text);
  case Kind::Operand:
  {
    auto const value = evaluate_operand(node.text, vars);
    auto const n     = slc::as_number(value);
    if (!n)
    {
      throw Error(Errc::GuardEvaluationError, "string used as condition: " + node.text);
    }
    return *n != 0.0;
  }
  }
  return false;
}

}  // namespace

Guard Guard::parse(std::string_view text)
{
  Guard g;
  g.text_ = std::string{text};
  g.root_ = Parser{tokenize(text)}.parse();
  return g;
}

bool Guard::evaluate(Variables const &vars) const
{
  return eval(*root_, vars);
}

Value evaluate_operand(std::string_view operand, Variables const &vars)
{
  if (auto lit = literal(operand))
  {
    return *lit;
  }
  auto it = vars.find(operand);
  if (it == vars.end())
  {
    throw Error(Errc::GuardEvaluationError, "unknown variable: " + std::string{operand});
  }
  return it->second;
}

std::string_view to_string(NodeType type) noexcept
{
  switch (type)
  {
  case NodeType::Task:
    return "task";
  case NodeType::SendMessage:
    return "send-message";
  case NodeType::ReceiveMessage:
    return "receive-message";
  case NodeType::ClauseCall:
    return "clause-call";
  case NodeType::ExclusiveGateway:
    return "exclusive-gateway";
  case NodeType::Timer:
    return "timer";
  case NodeType::End:
    return "end";
  }
  return "unknown";
}

std::string_view to_string(ProcessStatus status) noexcept
{
  switch (status)
  {
  case ProcessStatus::Running:
    return "Running";
  case ProcessStatus::WaitingMessage:
    return "WaitingMessage";
  case ProcessStatus::WaitingClause:
    return "WaitingClause";
  case ProcessStatus::Done:
    return "Done";
  case ProcessStatus::Faulted:
    return "Faulted";
  }
  return "unknown";
}

ProcessNode const *ProcessDefinition::node(std::string_view id) const noexcept
{
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](auto const &n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

std::vector<ProcessEdge const *> ProcessDefinition::outgoing(std::string_view id) const
{
  std::vector<ProcessEdge const *> out;
  for (auto const &e : edges)
  {
    if (e.from == id)
    {
      out.push_back(&e);
    }
  }
  return out;
}

void ProcessDefinition::validate() const
{
  if (start.empty() || node(start) == nullptr)
  {
    throw Error(Errc::MissingStart, "process '" + name + "' has no valid start node");
  }
  std::set<std::string> ids;
  for (auto const &n : nodes)
  {
    if (!ids.insert(n.id).second)
    {
      throw Error(Errc::ParseError, "duplicate node id: " + n.id);
    }
    auto const bad = [&](std::string const &what) {
      throw Error(Errc::ParseError, "node '" + n.id + "': " + what);
    };
    switch (n.type)
    {
    case NodeType::Task:
      if (n.handler.empty())
      {
        bad("task needs a handler");
      }
      break;
    case NodeType::ClauseCall:
      if (n.clause.empty())
      {
        bad("clause-call needs a clause");
      }
      break;
    case NodeType::Timer:
      if (n.after.empty() == n.at.empty())
      {
        bad("timer needs exactly one of 'after' or 'at'");
      }
      break;
    case NodeType::ReceiveMessage:
      if (!n.until && n.topic.empty())
      {
        bad("receive-message needs 'until' or 'topic'");
      }
      break;
    case NodeType::SendMessage:
      if (n.topic.empty() || n.to.empty())
      {
        bad("send-message needs 'topic' and 'to'");
      }
      break;
    default:
      break;
    }
  }
  for (auto const &e : edges)
  {
    if (node(e.from) == nullptr || node(e.to) == nullptr)
    {
      throw Error(Errc::ParseError, "edge references unknown node: " + e.from + " -> " + e.to);
    }
  }
  for (auto const &n : nodes)
  {
    auto const out = outgoing(n.id);
    if (n.type == NodeType::End && !out.empty())
    {
      throw Error(Errc::ParseError, "end node '" + n.id + "' has outgoing edges");
    }
    if (n.type != NodeType::End && out.empty())
    {
      throw Error(Errc::ParseError, "node '" + n.id + "' has no outgoing edge");
    }
  }
  std::set<std::string>   seen{start};
  std::deque<std::string> queue{start};
  while (!queue.empty())
  {
    auto const cur = queue.front();
    queue.pop_front();
    for (auto const *e : outgoing(cur))
    {
      if (seen.insert(e->to).second)
      {
        queue.push_back(e->to);
      }
    }
  }
  for (auto const &n : nodes)
  {
    if (seen.count(n.id) == 0)
    {
      throw Error(Errc::UnreachableNode, "node '" + n.id + "' is unreachable from start");
    }
  }
}

namespace {

NodeType parse_node_type(std::string const &text)
{
  for (auto t : {NodeType::Task, NodeType::SendMessage, NodeType::ReceiveMessage,
                 NodeType::ClauseCall, NodeType::ExclusiveGateway, NodeType::Timer, NodeType::End})
  {
    if (to_string(t) == text)
    {
      return t;
    }
  }
  throw Error(Errc::ParseError, "unknown node type: " + text);
}

Value scalar_value(YAML::Node const &node)
{
  auto const text = node.as<std::string>();
  if (node.Tag() != "!")  // plain scalar, may be numeric
  {
    try
    {
      if (auto lit = literal(text))
      {
        return *lit;
      }
    }
    catch (Error const &)
    {
    }
  }
  return Value{text};
}

std::string opt(YAML::Node const &node, char const *key)
{
  return node[key] ? node[key].as<std::string>() : std::string{};
}

}  // namespace

ProcessDefinition parse_process(std::string_view document)
{
  ProcessDefinition def;
  try
  {
    auto const root = YAML::Load(std::string{document});
    def.name        = opt(root, "process");
    if (auto start = root["start"]; start)
    {
      if (start.IsSequence())
      {
        if (start.size() != 1)
        {
          throw Error(Errc::MissingStart,
                      "process '" + def.name + "' declares " + std::to_string(start.size()) +
                          " start nodes");
        }
        def.start = start[0].as<std::string>();
      }
      else
      {
        def.start = start.as<std::string>();
      }
    }
    for (auto const &kv : root["variables"])
    {
      def.variables[kv.first.as<std::string>()] = scalar_value(kv.second);
    }
    for (auto const &n : root["nodes"])
    {
      ProcessNode node;
      node.id      = n["id"].as<std::string>();
      node.type    = parse_node_type(n["type"].as<std::string>());
      node.handler = opt(n, "handler");
      node.clause  = opt(n, "clause");
      node.topic   = opt(n, "topic");
      node.to      = opt(n, "to");
      node.after   = opt(n, "after");
      node.at      = opt(n, "at");
      if (n["until"])
      {
        node.until = Guard::parse(n["until"].as<std::string>());
      }
      for (auto const &kv : n["params"])
      {
        node.params[kv.first.as<std::string>()] = kv.second.as<std::string>();
      }
      def.nodes.push_back(std::move(node));
    }
    for (auto const &e : root["edges"])
    {
      ProcessEdge edge;
      edge.from = e["from"].as<std::string>();
      edge.to   = e["to"].as<std::string>();
      if (e["when"])
      {
        edge.guard = Guard::parse(e["when"].as<std::string>());
      }
      def.edges.push_back(std::move(edge));
    }
  }
  catch (YAML::Exception const &e)
  {
    throw Error(Errc::ParseError, e.what());
  }
  def.validate();
  return def;
}

ProcessDefinition load_definition(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(Errc::ParseError, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_process(buffer.str());
}

ProcessInstance ProcessInstance::start(std::shared_ptr<ProcessDefinition const> definition,
                                       std::uint64_t now, Variables const &overrides)
{
  ProcessInstance inst;
  inst.variables = definition->variables;
  for (auto const &[k, v] : overrides)
  {
    inst.variables[k] = v;
  }
  inst.active.insert(definition->start);
  inst.entered_at[definition->start] = now;
  inst.definition                    = std::move(definition);
  return inst;
}

namespace {

std::optional<std::string> choose_edge(ProcessDefinition const &def, std::string const &from,
                                       Variables const &vars)
{
  ProcessEdge const *fallback = nullptr;
  for (auto const *e : def.outgoing(from))
  {
    if (!e->guard)
    {
      if (fallback == nullptr)
      {
        fallback = e;
      }
      continue;
    }
    if (e->guard->evaluate(vars))
    {
      return e->to;
    }
  }
  if (fallback != nullptr)
  {
    return fallback->to;
  }
  return std::nullopt;
}

std::int64_t tick_operand(std::string const &operand, Variables const &vars)
{
  auto const v = evaluate_operand(operand, vars);
  auto const n = slc::as_number(v);
  if (!n)
  {
    throw Error(Errc::GuardEvaluationError, "timer operand is not numeric: " + operand);
  }
  return static_cast<std::int64_t>(*n);
}

}  // namespace

void step(ProcessInstance &instance, std::uint64_t now, ProcessHost &host)
{
  if (instance.finished())
  {
    return;
  }
  auto const &def     = *instance.definition;
  auto const  current = instance.active;
  bool        waiting_clause{false};
  bool        waiting_message{false};

  try
  {
    for (auto const &id : current)
    {
      auto const &node    = *def.node(id);
      bool        advance = false;
      switch (node.type)
      {
      case NodeType::End:
        instance.active.erase(id);
        continue;
      case NodeType::Task:
        advance = host.run_task(node, instance) == NodeProgress::Complete;
        break;
      case NodeType::SendMessage:
        host.send_message(node, instance);
        advance = true;
        break;
      case NodeType::ReceiveMessage:
        advance = (node.topic.empty() || host.message_received(node.topic)) &&
                  (!node.until || node.until->evaluate(instance.variables));
        waiting_message |= !advance;
        break;
      case NodeType::ClauseCall:
        advance = host.clause_call(node, instance) == NodeProgress::Complete;
        waiting_clause |= !advance;
        break;
      case NodeType::ExclusiveGateway:
        advance = true;
        break;
      case NodeType::Timer:
      {
        auto const deadline =
            node.at.empty()
                ? static_cast<std::int64_t>(instance.entered_at[id]) +
                      tick_operand(node.after, instance.variables)
                : tick_operand(node.at, instance.variables);
        advance = static_cast<std::int64_t>(now) >= deadline;
        break;
      }
      }
      if (!advance)
      {
        continue;
      }
      auto target = choose_edge(def, id, instance.variables);
      if (!target)
      {
        throw Error(Errc::GuardEvaluationError, "no enabled edge leaving '" + id + "'");
      }
      instance.active.erase(id);
      instance.active.insert(*target);
      instance.entered_at[*target] = now;
    }
  }
  catch (Error const &e)
  {
    instance.status = ProcessStatus::Faulted;
    instance.fault  = e.what();
    return;
  }

  if (instance.active.empty())
  {
    instance.status = ProcessStatus::Done;
  }
  else if (waiting_clause)
  {
    instance.status = ProcessStatus::WaitingClause;
  }
  else if (waiting_message)
  {
    instance.status = ProcessStatus::WaitingMessage;
  }
  else
  {
    instance.status = ProcessStatus::Running;
  }
}

}  // namespace anchorpact::bpee
