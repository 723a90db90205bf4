#include "cairovm/batch.hpp"
#include "cairovm/secp_bigint.hpp"
#include "cairovm/secp_ec.hpp"
#include "cairovm/stdlib.hpp"

#include <benchmark/benchmark.h>

using namespace cairovm;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

batch::Options opts(benchmark::State& state, std::size_t count)
{
    batch::Options o;
    o.count = count;
    o.seed = 17;
    o.parallel = state.range(0) != 0;
    return o;
}

void BM_EcMulBatch(benchmark::State& state)
{
    const auto o = opts(state, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::ec_equivalence(batch::EcOp::Mul, secp::CurveParams::secp256k1(), F(), o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(o.count));
}
BENCHMARK(BM_EcMulBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EcAddBatch(benchmark::State& state)
{
    const auto o = opts(state, 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::ec_equivalence(batch::EcOp::Add, secp::CurveParams::secp256r1(), F(), o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(o.count));
}
BENCHMARK(BM_EcAddBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DictFuzzBatch(benchmark::State& state)
{
    const auto o = opts(state, 2000);
    for (auto _ : state)
        benchmark::DoNotOptimize(batch::dict_fuzz(F(), o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(o.count));
}
BENCHMARK(BM_DictFuzzBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GadgetMutationBatch(benchmark::State& state)
{
    const auto o = opts(state, 500);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            batch::gadget_mutation(batch::Gadget::DivModN, secp::CurveParams::secp256k1(), F(), o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(o.count));
}
BENCHMARK(BM_GadgetMutationBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EcMulByUint256(benchmark::State& state)
{
    const auto& c = secp::CurveParams::secp256k1();
    const secp::EcValue g = secp::make_ec_value(secp::generator(c), c, F());
    const auto k = secp::Uint256::from_bigint(c.n - 12345, F());
    for (auto _ : state)
        benchmark::DoNotOptimize(secp::ec_mul_by_uint256(g, k, c, F()));
}
BENCHMARK(BM_EcMulByUint256)->Unit(benchmark::kMillisecond);

void BM_VerifyZero(benchmark::State& state)
{
    const auto& c = secp::CurveParams::secp256k1();
    const secp::FeltLimbs a = secp::to_felts(secp::split(c.gx), F());
    const secp::FeltLimbs b = secp::to_felts(secp::split(c.gy), F());
    // a*b - reduce(a*b) is a multiple of p.
    const secp::FeltLimbs prod = secp::mul_felts(a, b);
    const secp::FeltLimbs r = secp::nondet_reduce(prod, c.p, F());
    const secp::FeltLimbs x5 = secp::sub_felts(prod, secp::widen(r, 5));
    const std::vector<Felt> w = secp::zero_witness(x5, c.p, F());
    for (auto _ : state)
        benchmark::DoNotOptimize(secp::verify_zero(x5, w, c.p, F()));
}
BENCHMARK(BM_VerifyZero);

void BM_AssertNnLe(benchmark::State& state)
{
    const std::vector<Felt> args{Felt(3L, F()), Felt(1L << 40, F())};
    for (auto _ : state)
        benchmark::DoNotOptimize(stdlib::run_stdlib("assert_nn_le", args, F()));
}
BENCHMARK(BM_AssertNnLe);

}  // namespace

BENCHMARK_MAIN();
