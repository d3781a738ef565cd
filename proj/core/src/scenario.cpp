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


#include "anchorpact/scenario.hpp"

#include "anchorpact/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace anchorpact::scenario {

using bsc::ClauseState;
using bsc::ContractState;
using bsc::Role;

namespace {

constexpr std::array kFaults{Fault::Repudiation, Fault::TamperResponse, Fault::UnauthorizedEnforce,
                             Fault::FakeOracle, Fault::MediatorRemoval};

std::string format_number(double value)
{
  std::array<char, 64> buf{};
  auto const           res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

}  // namespace

std::string_view to_string(Fault fault) noexcept
{
  switch (fault)
  {
  case Fault::Repudiation:
    return "repudiation";
  case Fault::TamperResponse:
    return "tamper_response";
  case Fault::UnauthorizedEnforce:
    return "unauthorized_enforce";
  case Fault::FakeOracle:
    return "fake_oracle";
  case Fault::MediatorRemoval:
    return "mediator_removal";
  }
  return "unknown";
}

Fault fault_from_string(std::string_view text)
{
  for (auto f : kFaults)
  {
    if (to_string(f) == text)
    {
      return f;
    }
  }
  throw Error(Errc::ConfigError, "unknown fault kind: " + std::string{text});
}

bool is_detectable(Fault fault) noexcept
{
  return fault == Fault::Repudiation || fault == Fault::TamperResponse ||
         fault == Fault::MediatorRemoval;
}

void ScenarioConfig::validate() const
{
  auto const fail = [](std::string const &why) { throw Error(Errc::ConfigError, why); };
  if (!std::isfinite(temperature_threshold))
  {
    fail("temperature_threshold must be finite");
  }
  if (reading_interval < 1)
  {
    fail("reading_interval must be at least 1");
  }
  if (delivery_deadline < 1)
  {
    fail("delivery_deadline must be at least 1");
  }
  if (delivery_tick < 0)
  {
    fail("delivery_tick must not be negative");
  }
  if (!std::isfinite(penalty_amount) || !std::isfinite(temperature_baseline) ||
      !std::isfinite(temperature_noise) || temperature_noise < 0.0)
  {
    fail("temperature and penalty values must be finite, noise non-negative");
  }
  if (transport.max_delay < transport.min_delay)
  {
    fail("transport.max_delay below transport.min_delay");
  }
  if (!(transport.drop_probability >= 0.0 && transport.drop_probability < 1.0))
  {
    fail("transport.drop_probability must lie in [0, 1)");
  }
  if (max_ticks < 1 || conflict_threshold < 1)
  {
    fail("max_ticks and conflict_threshold must be at least 1");
  }
  std::set<std::string> seen;
  for (auto const *role : kRoles)
  {
    auto const it = identities.find(role);
    if (it == identities.end() || it->second.empty())
    {
      fail(std::string{"missing identity for "} + role);
    }
    if (!seen.insert(it->second).second)
    {
      fail("party identities must be distinct");
    }
  }
  if (scenario_dir.empty())
  {
    fail("scenario_dir is required");
  }
}

ScenarioConfig parse_config(std::string_view document, std::filesystem::path const &base_dir)
{
  static std::set<std::string> const known{
      "seed",          "temperature_threshold", "delivery_deadline", "penalty_amount",
      "reading_interval", "faults",             "transport",         "delivery_tick",
      "temperature",   "product",               "quantity",          "unit_price",
      "parties",       "max_ticks",             "conflict_threshold", "scenario_dir"};
  ScenarioConfig cfg;
  try
  {
    auto const root = YAML::Load(std::string{document});
    if (!root.IsMap())
    {
      throw Error(Errc::ConfigError, "config must be a mapping");
    }
    for (auto const &kv : root)
    {
      auto const key = kv.first.as<std::string>();
      if (known.count(key) == 0)
      {
        throw Error(Errc::ConfigError, "unknown config key: " + key);
      }
    }
    auto const get = [&](char const *key, auto &field) {
      if (root[key])
      {
        field = root[key].as<std::decay_t<decltype(field)>>();
      }
    };
    get("seed", cfg.seed);
    get("temperature_threshold", cfg.temperature_threshold);
    get("delivery_deadline", cfg.delivery_deadline);
    get("penalty_amount", cfg.penalty_amount);
    get("reading_interval", cfg.reading_interval);
    get("delivery_tick", cfg.delivery_tick);
    get("product", cfg.product);
    get("quantity", cfg.quantity);
    get("unit_price", cfg.unit_price);
    get("max_ticks", cfg.max_ticks);
    get("conflict_threshold", cfg.conflict_threshold);
    for (auto const &f : root["faults"])
    {
      cfg.faults.insert(fault_from_string(f.as<std::string>()));
    }
    if (auto t = root["transport"])
    {
      cfg.transport.min_delay        = t["min_delay"].as<std::uint64_t>(cfg.transport.min_delay);
      cfg.transport.max_delay        = t["max_delay"].as<std::uint64_t>(cfg.transport.max_delay);
      cfg.transport.drop_probability = t["drop_probability"].as<double>(cfg.transport.drop_probability);
      cfg.transport.retransmit_after = t["retransmit_after"].as<std::uint64_t>(cfg.transport.retransmit_after);
    }
    if (auto t = root["temperature"])
    {
      cfg.temperature_baseline = t["baseline"].as<double>(cfg.temperature_baseline);
      cfg.temperature_noise    = t["noise"].as<double>(cfg.temperature_noise);
      if (auto e = t["excursion"])
      {
        cfg.excursion = Excursion{e["tick"].as<std::int64_t>(), e["value"].as<double>()};
      }
    }
    if (auto p = root["parties"])
    {
      for (auto const &kv : p)
      {
        auto const role = kv.first.as<std::string>();
        if (std::find(kRoles.begin(), kRoles.end(), role) == kRoles.end())
        {
          throw Error(Errc::ConfigError, "unknown party role: " + role);
        }
        cfg.identities[role] = kv.second.as<std::string>();
      }
    }
    if (root["scenario_dir"])
    {
      std::filesystem::path dir = root["scenario_dir"].as<std::string>();
      cfg.scenario_dir          = dir.is_relative() ? base_dir / dir : dir;
    }
  }
  catch (YAML::Exception const &e)
  {
    throw Error(Errc::ConfigError, e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(Errc::ConfigError, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

KeyPair instance_key(std::uint64_t seed, std::string_view label)
{
  auto const material = crypto::derive_seed(seed, "instance-key/" + std::string{label});
  return crypto::generate_keypair(material);
}

void GroundTruthLog::record(std::uint64_t tick, std::string category, std::string text)
{
  lines_.push_back(std::to_string(tick) + " " + category + " " + text);
}

void GroundTruthLog::step(std::uint64_t tick, int number, std::string text)
{
  steps_.push_back(number);
  record(tick, "step", std::to_string(number) + " " + text);
}

struct Simulation::Impl
{
  explicit Impl(ScenarioConfig const &cfg)
    : config{cfg}
    , bus{cfg.transport, cfg.seed ^ 0x6275735f72616e64ULL}
    , scheduler_rng{cfg.seed ^ 0x7363686564756c65ULL}
  {}

  struct Mediation
  {
    std::vector<Digest> txs;
    bool                submitted{false};
  };

  ScenarioConfig const                                     &config;
  ledger::Ledger                                            ledger{bsc::contract_registry()};
  bpee::MessageBus                                          bus;
  GroundTruthLog                                            gt;
  std::map<std::string, std::unique_ptr<bpee::Participant>> agents;
  std::map<std::string, std::shared_ptr<bpee::ProcessDefinition const>> processes;
  slc::LegalContractTemplate                                tmpl;
  std::optional<RoundResult>                                round;
  std::uint64_t                                             now{0};
  std::mt19937_64                                           scheduler_rng;
  bool                                                      ran{false};

  bool                  excursion_used{false};
  bool                  repudiation_done{false};
  bool                  tamper_done{false};
  bool                  unauthorized_done{false};
  std::optional<Digest> unauthorized_tx;
  bool                  litigation_induced{false};
  bool                  removal_done{false};
  Mediation             mediation;

  bool has(Fault f) const
  {
    return config.faults.count(f) != 0;
  }

  bpee::Participant &agent(std::string const &role)
  {
    return *agents.at(role);
  }

  bpee::Participant *by_address(Address const &address)
  {
    for (auto &[role, p] : agents)
    {
      if (p->address() == address)
      {
        return p.get();
      }
    }
    return nullptr;
  }

  double true_temperature(std::int64_t tick)
  {
    if (config.excursion && !excursion_used && tick >= config.excursion->tick)
    {
      excursion_used = true;
      return config.excursion->value;
    }
    auto const   seed = crypto::derive_seed(config.seed, "temperature/" + std::to_string(tick));
    std::uint64_t bits{0};
    for (std::size_t i = 0; i < 8; ++i)
    {
      bits = (bits << 8) | seed[i];
    }
    auto const unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return config.temperature_baseline + config.temperature_noise * (2.0 * unit - 1.0);
  }

  void fault(Fault f, std::string const &role, std::string const &text)
  {
    gt.faults.push_back({f, role, agent(role).address()});
    gt.record(now, "fault", std::string{to_string(f)} + " " + role + " " +
                                agent(role).address().hex() + " " + text);
  }

  void        install();
  RoundResult run_round(RoundOptions const &options);
  void        inject_faults();
  bpee::NodeProgress mediate(bpee::ProcessInstance &instance);
  bool               quiescent();
  void               deliver_due();
};

void Simulation::Impl::install()
{
  tmpl = slc::load_template(config.scenario_dir / "template.yaml");
  for (auto const *role : kRoles)
  {
    processes[role] = std::make_shared<bpee::ProcessDefinition const>(
        bpee::load_definition(config.scenario_dir / (std::string{role} + ".process.yaml")));
  }

  // Step 1: per-instance keys. The buyer provisions the oracle's key.
  std::map<std::string, std::string> const creator{
      {"buyer", "buyer"}, {"supplier", "supplier"}, {"oracle", "buyer"}, {"mediator", "mediator"}};
  bpee::ParticipantOptions options;
  options.conflict_threshold = config.conflict_threshold;
  for (auto const *role : kRoles)
  {
    auto key = instance_key(config.seed, role);
    gt.step(now, 1, std::string{role} + " key " + key.address.hex() + " created by " +
                        creator.at(role));
    agents[role] = std::make_unique<bpee::Participant>(role, std::move(key), ledger, bus, nullptr,
                                                       options);
  }
  for (auto &[role, p] : agents)
  {
    for (auto &[other, q] : agents)
    {
      if (other != role)
      {
        p->add_contact(other, q->address(), q->key().public_key);
      }
    }
    bpee::Observer observer;
    observer.log = [this](std::string const &line) { gt.record(now, "trace", line); };
    observer.anchor_submitted = [this](bpee::Participant const &who, Digest const &tx,
                                       Bytes const &request, Bytes const &response) {
      GroundTruthAnchor a;
      a.role            = who.role();
      a.requester       = who.address();
      a.tx_id           = tx;
      a.clause_id       = slc::ClauseRequest::decode(request).clause_id;
      a.request_digest  = crypto::hash(request);
      a.response_digest = crypto::hash(response);
      gt.record(now, "anchor", a.role + " " + a.clause_id + " tx " + tx.hex() + " req " +
                                   a.request_digest.hex() + " resp " + a.response_digest.hex());
      gt.anchors.push_back(std::move(a));
    };
    p->set_observer(std::move(observer));
  }

  agent("buyer").on_task("enact_contract", [this](auto const &, auto &) {
    run_round(RoundOptions{});
    return bpee::NodeProgress::Complete;
  });
  agent("supplier").on_task("prepare_shipment", [this](auto const &, auto &) {
    gt.record(now, "action", "supplier prepares and ships the goods");
    return bpee::NodeProgress::Complete;
  });
  agent("oracle").on_task("read_sensor", [this](auto const &, bpee::ProcessInstance &inst) {
    auto const tick  = static_cast<std::int64_t>(now);
    auto const truth = true_temperature(tick);
    gt.truth[tick]   = truth;
    auto reported    = truth;
    if (has(Fault::FakeOracle))
    {
      reported = std::min(truth, config.temperature_baseline);
      if (reported != truth)
      {
        fault(Fault::FakeOracle, "oracle",
              "reported " + format_number(reported) + " true " + format_number(truth));
      }
    }
    gt.record(now, "truth", std::to_string(tick) + " " + format_number(truth));
    inst.variables["reading"]    = reported;
    inst.variables["sampled_at"] = tick;
    return bpee::NodeProgress::Complete;
  });
  agent("mediator").on_task("mediate", [this](auto const &, bpee::ProcessInstance &inst) {
    return mediate(inst);
  });

  if (has(Fault::TamperResponse))
  {
    agent("supplier").set_response_filter([this](slc::ClauseRequest const &req, Bytes &response) {
      if (tamper_done || req.clause_id != "delivery" || response.empty())
      {
        return;
      }
      tamper_done = true;
      response.back() ^= 0x01;
      fault(Fault::TamperResponse, "supplier", "altered delivery response bytes after anchoring");
    });
  }
}

bpee::NodeProgress Simulation::Impl::mediate(bpee::ProcessInstance &)
{
  auto &m       = agent("mediator");
  auto &session = m.session();
  if (!mediation.submitted)
  {
    if (has(Fault::MediatorRemoval) && !removal_done)
    {
      std::optional<Digest> target;
      for (auto const &[req, resp] : m.replica().request_log())
      {
        if (req.clause_id == "delivery")
        {
          target = crypto::hash(req.encode());
        }
      }
      if (!target || !session.has_anchor(*target))
      {
        return bpee::NodeProgress::Waiting;  // not yet seen the anchor it wants gone
      }
      fault(Fault::MediatorRemoval, "mediator", "removes anchor " + target->hex());
      mediation.txs.push_back(session.submit_remove_anchor(*target));
      removal_done = true;
    }
    auto const code = m.replica().state_codes().encode(ContractState::InExecution);
    gt.record(now, "action", "mediator resolves litigation back to execution");
    mediation.txs.push_back(session.submit_resolve(code, {}));
    mediation.submitted = true;
    return bpee::NodeProgress::Waiting;
  }
  for (auto const &tx : mediation.txs)
  {
    if (session.status(tx).status == middleware::InclusionStatus::Pending)
    {
      return bpee::NodeProgress::Waiting;
    }
  }
  auto const resolved = session.status(mediation.txs.back()).status;
  if (resolved == middleware::InclusionStatus::Accepted &&
      m.replica().contract_state() == ContractState::Litigation)
  {
    return bpee::NodeProgress::Waiting;  // wait for the replica to mirror it
  }
  mediation = Mediation{};
  return bpee::NodeProgress::Complete;
}

void Simulation::Impl::inject_faults()
{
  auto &buyer = agent("buyer");
  if (!buyer.attached())
  {
    return;
  }
  auto &supplier = agent("supplier");
  auto &oracle   = agent("oracle");

  if (has(Fault::Repudiation) && !repudiation_done && supplier.attached() &&
      static_cast<std::int64_t>(now) + 1 >= config.delivery_tick)
  {
    // Claims an on-time delivery it never anchors.
    auto const claimed = std::min<std::int64_t>(static_cast<std::int64_t>(now), config.delivery_deadline);
    auto       request = supplier.make_request("delivery", {{"tick", claimed}});
    auto const response = supplier.replica().evaluate(request);
    fault(Fault::Repudiation, "supplier", "diffuses a delivery claim without anchoring it");
    supplier.diffuse_unanchored(request, response);
    repudiation_done = true;
  }

  if (has(Fault::UnauthorizedEnforce) && !unauthorized_done && oracle.attached() &&
      oracle.replica().contract_state() == ContractState::InExecution)
  {
    auto const fake_req  = crypto::hash(std::string_view{"oracle-forged-request"});
    auto const fake_resp = crypto::hash(std::string_view{"oracle-forged-response"});
    bsc::ClauseEffect effect{oracle.replica().clause_ref("delivery"), ClauseState::Enforced};
    fault(Fault::UnauthorizedEnforce, "oracle", "anchors an organization-only clause");
    unauthorized_tx   = oracle.session().submit_anchor(fake_req, fake_resp, effect, std::nullopt);
    unauthorized_done = true;
  }
  if (unauthorized_tx)
  {
    auto const st = oracle.session().status(*unauthorized_tx);
    if (st.status != middleware::InclusionStatus::Pending)
    {
      gt.record(now, "outcome", "unauthorized_enforce " + std::string{middleware::to_string(st.status)} +
                                    " " + (st.error ? std::string{to_string(*st.error)} : "-"));
      unauthorized_tx.reset();
    }
  }

  if (has(Fault::MediatorRemoval) && !litigation_induced &&
      buyer.replica().clause_state("delivery") == ClauseState::Enforced &&
      buyer.session().get_state() == ContractState::InExecution)
  {
    gt.record(now, "action", "buyer asks the mediator to intervene after delivery");
    buyer.session().submit_raise_litigation();
    litigation_induced = true;
  }
}

void Simulation::Impl::deliver_due()
{
  bus.set_now(now);
  for (auto &d : bus.due(now))
  {
    if (auto *p = by_address(d.to))
    {
      p->on_message(d.envelope);
    }
  }
}

bool Simulation::Impl::quiescent()
{
  if (!bus.idle() || ledger.pending_count() != 0)
  {
    return false;
  }
  for (auto &[role, p] : agents)
  {
    if (p->attached())
    {
      p->sync();
    }
    if (p->attached() && !p->caught_up())
    {
      return false;
    }
  }
  return true;
}

Simulation::Simulation(ScenarioConfig config)
  : config_{std::move(config)}
{
  config_.validate();
  impl_ = std::make_unique<Impl>(config_);
  impl_->install();
}

Simulation::~Simulation() = default;

ledger::Ledger &Simulation::ledger() noexcept
{
  return impl_->ledger;
}

ledger::Ledger const &Simulation::ledger() const noexcept
{
  return impl_->ledger;
}

bpee::Participant &Simulation::participant(std::string_view role)
{
  return *impl_->agents.at(std::string{role});
}

bpee::Participant const &Simulation::participant(std::string_view role) const
{
  return *impl_->agents.at(std::string{role});
}

GroundTruthLog const &Simulation::groundtruth() const noexcept
{
  return impl_->gt;
}

std::optional<RoundResult> const &Simulation::round() const noexcept
{
  return impl_->round;
}

RoundResult Simulation::run_signature_round(RoundOptions const &options)
{
  return impl_->run_round(options);
}

RoundResult Simulation::Impl::run_round(RoundOptions const &options)
{
  auto      &lead  = agent("buyer");
  auto const abort = [this](std::string const &why) -> RoundResult {
    gt.record(now, "round", "aborted: " + why);
    throw Error(Errc::RoundAborted, why);
  };

  gt.step(now, 2, "buyer authors the contract from template " + tmpl.name);
  gt.step(now, 3, "buyer requests public keys from supplier, oracle and mediator");
  gt.step(now, 4, "counterparties return their public keys");

  std::map<std::string, std::string> raw{config.identities.begin(), config.identities.end()};
  raw["product"]   = config.product;
  raw["threshold"] = format_number(config.temperature_threshold);
  raw["deadline"]  = std::to_string(config.delivery_deadline);
  raw["penalty"]   = format_number(config.penalty_amount);
  auto statics     = slc::bind_static_data(tmpl, raw);

  std::map<std::string, Role> const roles{{"buyer", Role::Organization},
                                          {"supplier", Role::Organization},
                                          {"oracle", Role::Oracle},
                                          {"mediator", Role::Mediator}};
  std::vector<slc::Party> parties;
  for (auto const *role : kRoles)
  {
    auto const &p = agent(role);
    parties.push_back({roles.at(role), config.identities.at(role), p.address(), p.key().public_key});
  }
  auto draft = slc::SlcInstance::instantiate(tmpl, std::move(statics), std::move(parties), config.seed);
  gt.step(now, 5, "contract instantiated, static data and parties bound");

  auto const deploy = lead.session().await_inclusion(
      lead.session().submit_deploy(draft.constructor_args()), 10);
  if (deploy.status != middleware::InclusionStatus::Accepted || !deploy.created)
  {
    return abort("deployment failed: " + deploy.detail);
  }
  auto const bsc_address = *deploy.created;
  gt.step(now, 6, "BSC deployed at " + bsc_address.hex());

  draft.set_bsc_address(bsc_address);
  lead.session().bind(bsc_address);
  gt.step(now, 7, "BSC address written into the contract");

  auto const package = draft.signed_bytes();
  gt.step(now, 8, "contract sent to every party for signature");

  for (auto const *role : kRoles)
  {
    if (roles.at(role) == Role::Oracle)
    {
      continue;
    }
    auto const copy = slc::SlcInstance::from_signed_bytes(package);
    if (options.decline_role && *options.decline_role == role)
    {
      return abort(std::string{role} + " declines to sign");
    }
    auto const signer = options.wrong_key_role && *options.wrong_key_role == role
                            ? instance_key(config.seed, std::string{role} + "/wrong")
                            : agent(role).key();
    try
    {
      draft.add_signature(agent(role).address(),
                          crypto::sign(signer.secret, copy.signable_payload()));
    }
    catch (Error const &e)
    {
      return abort(std::string{role} + " signature refused: " + e.what());
    }
    gt.record(now, "round", std::string{role} + " signed");
  }
  gt.step(now, 9, "organizations and mediator signed");

  auto const signed_hash = draft.signed_hash();
  gt.step(now, 10, "signed contract hash " + signed_hash.hex());

  auto const anchored = lead.session().await_inclusion(
      lead.session().submit_anchor_slc_hash(signed_hash), 10);
  if (anchored.status != middleware::InclusionStatus::Accepted)
  {
    return abort("hash anchoring failed: " + anchored.detail);
  }
  gt.step(now, 11, "signed hash anchored, contract in execution");

  auto const final_bytes = draft.signed_bytes();
  auto const on_chain    = ledger.inspect<bsc::Bsc>(
      bsc_address, [](bsc::Bsc const &c) { return c.slc_hash(); });
  for (auto const *role : kRoles)
  {
    auto       replica = slc::SlcInstance::from_signed_bytes(final_bytes);
    bool const ok      = on_chain && replica.verify_instance(*on_chain);
    gt.record(now, "replica", std::string{role} + (ok ? " MATCH" : " MISMATCH"));
    agent(role).attach(std::move(replica));
  }
  round = RoundResult{bsc_address, signed_hash, final_bytes};
  return *round;
}

void Simulation::run()
{
  auto &s = *impl_;
  if (s.ran)
  {
    throw std::logic_error("Simulation::run called twice");
  }
  s.ran = true;

  std::map<std::string, bpee::Variables> overrides;
  overrides["buyer"]    = {{"product", config_.product}, {"quantity", config_.quantity}};
  overrides["supplier"] = {{"product", config_.product},
                           {"unit_price", config_.unit_price},
                           {"delivery_tick", config_.delivery_tick}};
  overrides["oracle"]   = {{"reading_interval", config_.reading_interval}};
  for (auto const *role : kRoles)
  {
    s.agent(role).start_process(s.processes.at(role), s.now, overrides[role]);
  }

  std::vector<std::string> order{kRoles.begin(), kRoles.end()};
  for (; s.now < config_.max_ticks; ++s.now)
  {
    s.deliver_due();
    s.inject_faults();
    for (std::size_t i = order.size() - 1; i > 0; --i)
    {
      std::swap(order[i], order[s.scheduler_rng() % (i + 1)]);
    }
    for (auto const &role : order)
    {
      s.agent(role).step(s.now);
    }
    s.ledger.tick();

    bool all_done = true;
    bool faulted  = false;
    for (auto const &[role, p] : s.agents)
    {
      all_done = all_done && p->process()->finished();
      faulted  = faulted || p->process()->status == bpee::ProcessStatus::Faulted;
    }
    if ((all_done && s.quiescent()) || (faulted && !s.round))
    {
      break;
    }
  }

  // Let retransmissions land and replicas catch up with the last blocks.
  for (int extra = 0; extra < 200 && !s.quiescent(); ++extra)
  {
    ++s.now;
    s.deliver_due();
    s.ledger.tick();
  }
  s.gt.record(s.now, "end", "simulation stopped");
}

audit::AuditTrail Simulation::audit_trail() const
{
  return audit::reconstruct(impl_->agent("buyer").store(), impl_->ledger);
}

RunArtifacts Simulation::artifacts() const
{
  auto        &s = *impl_;
  RunArtifacts a;

  std::ostringstream dump;
  s.ledger.export_dump(dump);
  a.chain_dump = dump.str();

  for (auto const &[role, p] : s.agents)
  {
    std::ostringstream store;
    p->store().write(store);
    a.stores[role]    = store.str();
    a.addresses[role] = p->address();
    if (p->attached())
    {
      a.slc_exports[role]      = p->replica().signed_bytes();
      a.canonical_states[role] = p->replica().canonical_state();
      a.replica_states[role]   = p->replica().contract_state();
    }
    if (p->process() != nullptr)
    {
      a.process_status[role] = p->process()->status;
    }
  }

  if (s.round)
  {
    a.bsc         = s.round->bsc;
    a.chain_state = s.ledger.inspect<bsc::Bsc>(s.round->bsc, [](bsc::Bsc const &c) { return c.state(); });
    auto const trail  = audit_trail();
    auto const report = audit::verify(trail);
    a.attributions    = audit::attribute(report, trail.registry);
    a.advisories      = audit::cross_check_oracle(trail, s.gt.truth, 0.5);
    a.discrepancies   = report.discrepancies.size();
    std::ostringstream text;
    audit::write_report(text, trail, report, a.attributions, a.advisories);
    a.audit_report = text.str();
  }
  a.groundtruth = s.gt.lines();
  a.ticks       = s.now;
  return a;
}

RunArtifacts run_scenario(ScenarioConfig const &config)
{
  Simulation sim{config};
  sim.run();
  return sim.artifacts();
}

void write_artifacts(RunArtifacts const &artifacts, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  auto const put = [&](std::string const &name, auto const &content) {
    std::ofstream out{dir / name, std::ios::binary | std::ios::trunc};
    out.write(reinterpret_cast<char const *>(content.data()), static_cast<std::streamsize>(content.size()));
    if (!out)
    {
      throw Error(Errc::ConfigError, "cannot write " + (dir / name).string());
    }
  };
  put("chain.dump", artifacts.chain_dump);
  for (auto const &[role, text] : artifacts.stores)
  {
    put("store." + role + ".log", text);
  }
  for (auto const &[role, bytes] : artifacts.slc_exports)
  {
    put("slc." + role + ".bin", bytes);
  }
  put("audit.report", artifacts.audit_report);
  std::string gt;
  for (auto const &line : artifacts.groundtruth)
  {
    gt += line;
    gt += '\n';
  }
  put("groundtruth.log", gt);
}

}  // namespace anchorpact::scenario
