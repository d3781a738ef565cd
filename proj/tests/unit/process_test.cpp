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
#include "anchorpact/process.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace anchorpact::bpee {
namespace {

using testing::error_of;

bool check(std::string_view text, Variables const &vars = {})
{
  return Guard::parse(text).evaluate(vars);
}

TEST(Guard, Comparisons)
{
  Variables const v{{"n", std::int64_t{5}}, {"x", 2.5}, {"s", std::string{"Completed"}}};
  EXPECT_TRUE(check("n == 5", v));
  EXPECT_TRUE(check("n != 4", v));
  EXPECT_TRUE(check("n >= 5 && n <= 5", v));
  EXPECT_FALSE(check("n > 5", v));
  EXPECT_TRUE(check("x < n", v));
  EXPECT_TRUE(check("x == 2.5", v));
  EXPECT_TRUE(check("s == 'Completed'", v));
  EXPECT_TRUE(check("s != \"Terminated\"", v));
  EXPECT_TRUE(check("-3 < 0"));
}

TEST(Guard, AndBindsTighterThanOr)
{
  EXPECT_TRUE(check("1 == 1 || 1 == 2 && 1 == 2"));
  EXPECT_FALSE(check("(1 == 1 || 1 == 2) && 1 == 2"));
}

TEST(Guard, BareNumericOperandIsTruthiness)
{
  EXPECT_TRUE(check("flag", {{"flag", std::int64_t{1}}}));
  EXPECT_FALSE(check("flag", {{"flag", std::int64_t{0}}}));
  EXPECT_EQ(error_of([] { check("name", {{"name", std::string{"x"}}}); }), Errc::GuardEvaluationError);
}

TEST(Guard, EvaluationErrors)
{
  EXPECT_EQ(error_of([] { check("missing == 1"); }), Errc::GuardEvaluationError);
  EXPECT_EQ(error_of([] { check("s == 1", {{"s", std::string{"a"}}}); }), Errc::GuardEvaluationError);
}

TEST(Guard, ParseErrors)
{
  for (auto const *text : {"", "a ==", "(a == 1", "a == 1)", "a = 1", "'open == 1", "a == 1 b", "1x == 2", "a # b"})
  {
    EXPECT_EQ(error_of([&] { Guard::parse(text); }), Errc::ParseError) << text;
  }
}

TEST(Guard, OperandEvaluation)
{
  Variables const v{{"q", std::int64_t{7}}};
  EXPECT_EQ(evaluate_operand("q", v), Value{std::int64_t{7}});
  EXPECT_EQ(evaluate_operand("12", v), Value{std::int64_t{12}});
  EXPECT_EQ(evaluate_operand("1.5", v), Value{1.5});
  EXPECT_EQ(evaluate_operand("'hi'", v), Value{std::string{"hi"}});
}

// Random expression trees rendered to text; the parsed guard must agree with
// a direct evaluation of the tree.
struct Expr
{
  int                   kind{0};  // 0 compare, 1 and, 2 or
  std::string           lhs, op, rhs;
  std::unique_ptr<Expr> a, b;
};

std::unique_ptr<Expr> random_expr(std::mt19937 &rng, int depth)
{
  auto e = std::make_unique<Expr>();
  if (depth == 0 || rng() % 3 == 0)
  {
    static char const *const ops[] = {"==", "!=", "<", "<=", ">", ">="};
    static char const *const vars[] = {"a", "b", "c"};
    e->lhs = vars[rng() % 3];
    e->op  = ops[rng() % 6];
    e->rhs = rng() % 2 ? std::string{vars[rng() % 3]} : std::to_string(static_cast<int>(rng() % 5) - 2);
    return e;
  }
  e->kind = 1 + static_cast<int>(rng() % 2);
  e->a    = random_expr(rng, depth - 1);
  e->b    = random_expr(rng, depth - 1);
  return e;
}

std::string render(Expr const &e)
{
  if (e.kind == 0)
  {
    return e.lhs + " " + e.op + " " + e.rhs;
  }
  return "(" + render(*e.a) + (e.kind == 1 ? " && " : " || ") + render(*e.b) + ")";
}

bool reference(Expr const &e, std::map<std::string, long> const &env)
{
  if (e.kind == 1)
  {
    return reference(*e.a, env) && reference(*e.b, env);
  }
  if (e.kind == 2)
  {
    return reference(*e.a, env) || reference(*e.b, env);
  }
  auto const value = [&](std::string const &t) { return env.count(t) ? env.at(t) : std::stol(t); };
  long const l = value(e.lhs);
  long const r = value(e.rhs);
  if (e.op == "==") return l == r;
  if (e.op == "!=") return l != r;
  if (e.op == "<") return l < r;
  if (e.op == "<=") return l <= r;
  if (e.op == ">") return l > r;
  return l >= r;
}

TEST(GuardProperty, AgreesWithReferenceEvaluator)
{
  std::mt19937 rng{7};
  for (int i = 0; i < 2000; ++i)
  {
    auto const                   expr = random_expr(rng, 4);
    std::map<std::string, long>  env{{"a", static_cast<long>(rng() % 5) - 2},
                                     {"b", static_cast<long>(rng() % 5) - 2},
                                     {"c", static_cast<long>(rng() % 5) - 2}};
    Variables vars;
    for (auto const &[k, v] : env)
    {
      vars[k] = std::int64_t{v};
    }
    auto const text = render(*expr);
    ASSERT_EQ(Guard::parse(text).evaluate(vars), reference(*expr, env)) << text;
  }
}

constexpr std::string_view kLinear = R"(
process: linear
start: s
variables: {count: 0, label: 'x'}
nodes:
  - {id: s, type: task, handler: work}
  - {id: e, type: end}
edges:
  - {from: s, to: e}
)";

std::string replace(std::string_view doc, std::string_view from, std::string_view to)
{
  std::string s{doc};
  s.replace(s.find(from), from.size(), to);
  return s;
}

TEST(ProcessDefinition, ParsesVariablesWithTypes)
{
  auto const def = parse_process(kLinear);
  EXPECT_EQ(def.name, "linear");
  EXPECT_EQ(def.variables.at("count"), Value{std::int64_t{0}});
  EXPECT_EQ(def.variables.at("label"), Value{std::string{"x"}});
}

TEST(ProcessDefinition, MissingStartIsRejected)
{
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "start: s", "start: nowhere")); }), Errc::MissingStart);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "start: s", "start: [s, e]")); }), Errc::MissingStart);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "start: s\n", "")); }), Errc::MissingStart);
}

TEST(ProcessDefinition, UnreachableNodeIsRejected)
{
  auto const doc = replace(kLinear, "  - {id: e, type: end}", "  - {id: e, type: end}\n  - {id: orphan, type: task, handler: h}\n  - {id: e2, type: end}");
  auto const full = replace(doc, "  - {from: s, to: e}", "  - {from: s, to: e}\n  - {from: orphan, to: e2}");
  EXPECT_EQ(error_of([&] { parse_process(full); }), Errc::UnreachableNode);
}

TEST(ProcessDefinition, StructuralErrors)
{
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "type: end", "type: teleport")); }), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, ", handler: work", "")); }), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "to: e}", "to: ghost}")); }), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "  - {from: s, to: e}", "  - {from: s, to: e}\n  - {from: e, to: s}")); }),
            Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "nodes:", "nodes: [")); }), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_process(replace(kLinear, "  - {from: s, to: e}", "  - {from: s, to: e, when: 'x =='}")); }),
            Errc::ParseError);
}

TEST(ProcessDefinition, ShippedProcessesLoad)
{
  for (auto const *role : {"buyer", "supplier", "oracle", "mediator"})
  {
    auto const path = testing::scenario_dir() / (std::string{role} + ".process.yaml");
    ProcessDefinition def;
    ASSERT_NO_THROW(def = load_definition(path)) << role;
    EXPECT_EQ(def.name, role);
    EXPECT_NE(def.node(def.start), nullptr);
  }
}

TEST(ProcessDefinition, MissingFileIsParseError)
{
  EXPECT_EQ(error_of([] { load_definition("/nonexistent/process.yaml"); }), Errc::ParseError);
}

/// Scripted host: tasks complete after a set number of attempts, clause
/// calls return a scripted answer, messages are a set of topics.
struct FakeHost : ProcessHost
{
  std::map<std::string, int>  task_attempts_needed;
  std::map<std::string, int>  task_attempts;
  bool                        clause_ready{true};
  std::vector<std::string>    sent;
  std::vector<std::string>    calls;
  std::set<std::string>       topics;

  NodeProgress run_task(ProcessNode const &node, ProcessInstance &) override
  {
    return ++task_attempts[node.handler] >= task_attempts_needed[node.handler] ? NodeProgress::Complete
                                                                                 : NodeProgress::Waiting;
  }
  NodeProgress clause_call(ProcessNode const &node, ProcessInstance &instance) override
  {
    calls.push_back(node.clause);
    if (!clause_ready)
    {
      return NodeProgress::Waiting;
    }
    instance.variables[node.id + ".status"] = std::string{"enforced"};
    return NodeProgress::Complete;
  }
  void send_message(ProcessNode const &node, ProcessInstance &) override
  {
    sent.push_back(node.topic + "->" + node.to);
  }
  bool message_received(std::string_view topic) const override
  {
    return topics.count(std::string{topic}) != 0;
  }
};

ProcessInstance start(std::string_view doc, Variables const &overrides = {})
{
  return ProcessInstance::start(std::make_shared<ProcessDefinition const>(parse_process(doc)), 0, overrides);
}

TEST(ProcessStep, TaskRetriesUntilComplete)
{
  FakeHost host;
  host.task_attempts_needed["work"] = 3;
  auto inst = start(kLinear);
  step(inst, 1, host);
  step(inst, 2, host);
  EXPECT_EQ(inst.active, std::set<std::string>{"s"});
  EXPECT_EQ(inst.status, ProcessStatus::Running);
  step(inst, 3, host);
  EXPECT_EQ(inst.active, std::set<std::string>{"e"});
  step(inst, 4, host);
  EXPECT_EQ(inst.status, ProcessStatus::Done);
  EXPECT_TRUE(inst.finished());
}

TEST(ProcessStep, OverridesReplaceDefaults)
{
  auto const inst = start(kLinear, {{"count", std::int64_t{9}}});
  EXPECT_EQ(inst.variables.at("count"), Value{std::int64_t{9}});
  EXPECT_EQ(inst.variables.at("label"), Value{std::string{"x"}});
}

constexpr std::string_view kFlow = R"(
process: flow
start: wait
variables: {state: 'none', due: 5}
nodes:
  - {id: wait, type: receive-message, topic: go}
  - {id: tell, type: send-message, topic: note, to: buyer}
  - {id: hold, type: receive-message, until: "state != 'none'"}
  - {id: gate, type: exclusive-gateway}
  - {id: pause, type: timer, after: 2}
  - {id: clock, type: timer, at: due}
  - {id: call, type: clause-call, clause: delivery}
  - {id: bad, type: end}
  - {id: done, type: end}
edges:
  - {from: wait, to: tell}
  - {from: tell, to: hold}
  - {from: hold, to: gate}
  - {from: gate, to: bad, when: "state == 'Terminated'"}
  - {from: gate, to: pause, when: "state == 'slow'"}
  - {from: gate, to: clock}
  - {from: pause, to: call}
  - {from: clock, to: call}
  - {from: call, to: done, when: "call.status == 'enforced'"}
)";

TEST(ProcessStep, MessagesTimersAndClauseCalls)
{
  FakeHost host;
  auto     inst = start(kFlow);
  step(inst, 1, host);
  EXPECT_EQ(inst.status, ProcessStatus::WaitingMessage);
  host.topics.insert("go");
  step(inst, 2, host);
  step(inst, 3, host);
  EXPECT_EQ(host.sent, std::vector<std::string>{"note->buyer"});
  step(inst, 4, host);
  EXPECT_EQ(inst.active, std::set<std::string>{"hold"});
  EXPECT_EQ(inst.status, ProcessStatus::WaitingMessage);

  inst.variables["state"] = std::string{"InExecution"};
  step(inst, 5, host);  // hold -> gate
  step(inst, 6, host);  // gate falls back to the unguarded edge
  EXPECT_EQ(inst.active, std::set<std::string>{"clock"});
  step(inst, 7, host);  // absolute timer at 'due' (5) has passed
  EXPECT_EQ(inst.active, std::set<std::string>{"call"});

  host.clause_ready = false;
  step(inst, 8, host);
  EXPECT_EQ(inst.status, ProcessStatus::WaitingClause);
  host.clause_ready = true;
  step(inst, 9, host);
  step(inst, 10, host);
  EXPECT_EQ(inst.status, ProcessStatus::Done);
  EXPECT_EQ(host.calls.size(), 2u);
}

TEST(ProcessStep, RelativeTimerCountsFromEntry)
{
  FakeHost host;
  host.topics.insert("go");
  auto inst               = start(kFlow);
  inst.variables["state"] = std::string{"slow"};
  for (std::uint64_t t = 1; t <= 4; ++t)
  {
    step(inst, t, host);  // wait, tell, hold, gate
  }
  ASSERT_EQ(inst.active, std::set<std::string>{"pause"});
  EXPECT_EQ(inst.entered_at.at("pause"), 4u);
  step(inst, 5, host);
  EXPECT_EQ(inst.active, std::set<std::string>{"pause"});
  step(inst, 6, host);
  EXPECT_EQ(inst.active, std::set<std::string>{"call"});
}

TEST(ProcessStep, GuardErrorFaultsTheInstance)
{
  FakeHost host;
  host.topics.insert("go");
  auto inst = start(kFlow);
  inst.variables.erase("state");
  for (std::uint64_t t = 1; t <= 3; ++t)
  {
    step(inst, t, host);
  }
  EXPECT_EQ(inst.status, ProcessStatus::Faulted);
  EXPECT_NE(inst.fault.find("state"), std::string::npos);
  auto const snapshot = inst.active;
  step(inst, 4, host);
  EXPECT_EQ(inst.active, snapshot);
}

TEST(ProcessStep, NoEnabledEdgeFaults)
{
  FakeHost host;
  host.topics.insert("go");
  auto inst = start(kFlow);
  inst.variables["state"] = std::string{"InExecution"};
  inst.variables["due"]   = std::int64_t{0};
  for (std::uint64_t t = 1; t <= 5; ++t)
  {
    step(inst, t, host);
  }
  ASSERT_EQ(inst.active, std::set<std::string>{"call"});
  struct Refusing : FakeHost
  {
    NodeProgress clause_call(ProcessNode const &, ProcessInstance &instance) override
    {
      instance.variables["call.status"] = std::string{"rejected"};
      return NodeProgress::Complete;
    }
  } refusing;
  step(inst, 6, refusing);
  EXPECT_EQ(inst.status, ProcessStatus::Faulted);
}

}  // namespace
}  // namespace anchorpact::bpee
