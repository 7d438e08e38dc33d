// Live micro-benchmarks of the local primitives. These report this
// machine's numbers only; the cost model always prices runs with the
// published reference table, never with these measurements.

#include "dwpt/group.hpp"
#include "dwpt/hash.hpp"
#include "dwpt/rng.hpp"
#include "dwpt/session.hpp"
#include "dwpt/signing.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace dwpt;

void BM_Hash32(benchmark::State& state) {
    DeterministicRng rng(7);
    const Digest32 d = rng.next_digest();
    for (auto _ : state) {
        benchmark::DoNotOptimize(hash(HashDomain::H, d));
    }
}
BENCHMARK(BM_Hash32);

void BM_HashIter(benchmark::State& state) {
    DeterministicRng rng(7);
    const Digest32 d = rng.next_digest();
    const auto k = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hash_iter(HashDomain::H, d.view(), k));
    }
}
BENCHMARK(BM_HashIter)->Arg(8)->Arg(64);

void BM_Xor32(benchmark::State& state) {
    DeterministicRng rng(7);
    const Digest32 a = rng.next_digest();
    const Digest32 b = rng.next_digest();
    for (auto _ : state) {
        benchmark::DoNotOptimize(xor32(a, b));
    }
}
BENCHMARK(BM_Xor32);

void BM_GroupExp512(benchmark::State& state) {
    DeterministicRng rng(7);
    const BigUint e = digest_to_int(rng.next_digest());
    for (auto _ : state) {
        benchmark::DoNotOptimize(group_exp(GroupParams::full512(), e));
    }
}
BENCHMARK(BM_GroupExp512);

void BM_Sign(benchmark::State& state) {
    DeterministicRng rng(7);
    const SigningKeypair kp = signing_keygen(rng);
    const Bytes msg = cat(rng.next_digest().view(), rng.next_digest().view());
    for (auto _ : state) {
        benchmark::DoNotOptimize(sign_message(kp.secret, ByteView{msg}));
    }
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State& state) {
    DeterministicRng rng(7);
    const SigningKeypair kp = signing_keygen(rng);
    const Bytes msg = cat(rng.next_digest().view(), rng.next_digest().view());
    const Bytes sig = sign_message(kp.secret, ByteView{msg});
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_message(kp.public_key, ByteView{msg}, ByteView{sig}));
    }
}
BENCHMARK(BM_Verify);

void BM_RevisedSession(benchmark::State& state) {
    EngineConfig cfg;
    cfg.protocol = Protocol::Revised;
    cfg.pads = static_cast<std::uint64_t>(state.range(0));
    cfg.pseudonyms_per_vehicle = 1;
    for (auto _ : state) {
        SessionEngine engine(cfg);
        benchmark::DoNotOptimize(engine.run_session(0));
    }
}
BENCHMARK(BM_RevisedSession)->Arg(1)->Arg(8);

void BM_DmaSession(benchmark::State& state) {
    EngineConfig cfg;
    cfg.protocol = Protocol::Dma;
    cfg.pads = static_cast<std::uint64_t>(state.range(0));
    cfg.pseudonyms_per_vehicle = cfg.pads;
    for (auto _ : state) {
        SessionEngine engine(cfg);
        benchmark::DoNotOptimize(engine.run_session(0));
    }
}
BENCHMARK(BM_DmaSession)->Arg(1)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
