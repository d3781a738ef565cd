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


#include "anchorpact/bsc.hpp"
#include "anchorpact/crypto.hpp"
#include "anchorpact/ledger.hpp"
#include "anchorpact/scenario.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>

namespace {

using namespace anchorpact;

KeyPair key(std::string_view label)
{
  return crypto::generate_keypair(crypto::derive_seed(42, label));
}

void BM_Hash(benchmark::State &state)
{
  Bytes const data(static_cast<std::size_t>(state.range(0)), 0x5a);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(crypto::hash(data));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Hash)->Arg(64)->Arg(1024)->Arg(64 * 1024);

void BM_Sign(benchmark::State &state)
{
  auto const  k = key("signer");
  Bytes const msg(256, 0x11);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(crypto::sign(k.secret, msg));
  }
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State &state)
{
  auto const  k   = key("signer");
  Bytes const msg(256, 0x11);
  auto const  sig = crypto::sign(k.secret, msg);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(crypto::verify(k.public_key, msg, sig));
  }
}
BENCHMARK(BM_Verify);

// Each block carries range(0) signed transactions against a deployed
// contract; most are refused in execution but still verified and hashed.
void BM_BlockProduction(benchmark::State &state)
{
  auto const org = key("o1");
  bsc::ConstructorArgs args;
  args.organizations = {org.address, key("o2").address};
  args.oracles       = {key("or").address};
  args.mediators     = {key("me").address};

  ledger::Ledger chain{bsc::contract_registry()};
  auto const     address = chain.deploy_contract(ledger::Transaction::make(org, 1, bsc::calls::deploy(args)));
  std::uint64_t  nonce   = 2;
  for (auto _ : state)
  {
    state.PauseTiming();
    std::vector<ledger::Transaction> batch;
    for (std::int64_t i = 0; i < state.range(0); ++i)
    {
      batch.push_back(ledger::Transaction::make(org, nonce++, bsc::calls::raise_litigation(address)));
    }
    state.ResumeTiming();
    for (auto &tx : batch)
    {
      chain.submit(std::move(tx));
    }
    benchmark::DoNotOptimize(chain.produce_block());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BlockProduction)->Arg(1)->Arg(16)->Arg(128);

void BM_ScenarioRun(benchmark::State &state)
{
  auto       cfg  = scenario::load_config(std::filesystem::path{ANCHORPACT_SCENARIO_DIR} / "config.yaml");
  std::uint64_t seed = 1;
  for (auto _ : state)
  {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(scenario::run_scenario(cfg));
  }
}
BENCHMARK(BM_ScenarioRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
