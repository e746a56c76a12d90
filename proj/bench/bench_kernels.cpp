#include "ura/amp.hpp"
#include "ura/channel.hpp"
#include "ura/config.hpp"
#include "ura/harness.hpp"
#include "ura/pilots.hpp"

#include <benchmark/benchmark.h>

namespace {

ura::Exec exec_of(const benchmark::State& state) { return state.range(0) ? ura::Exec::parallel : ura::Exec::serial; }

void BM_PilotForward(benchmark::State& state) {
    const ura::PilotBook book(4096, 512, 1);
    ura::Rng rng(1);
    const ura::CMatrix x = ura::complex_normal_matrix(rng, 4096, 16, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(book.forward(x, exec_of(state)));
}
BENCHMARK(BM_PilotForward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PilotAdjoint(benchmark::State& state) {
    const ura::PilotBook book(4096, 512, 1);
    ura::Rng rng(1);
    const ura::CMatrix z = ura::complex_normal_matrix(rng, 512, 16, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(book.adjoint(z, exec_of(state)));
}
BENCHMARK(BM_PilotAdjoint)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Amp(benchmark::State& state) {
    const ura::PilotBook book(4096, 512, 1);
    ura::SceneParams sp;
    sp.active_users = 50;
    sp.message_bits = 60;
    sp.pilot_bits = 12;
    sp.antennas = 16;
    sp.p_pilot = sp.p_data = ura::db_to_lin(5.0);
    ura::Rng rng(2);
    const auto scene = ura::draw_scene(sp, rng);
    const auto y = ura::emit_pilot_signal(scene, book, rng);
    ura::AmpConfig cfg;
    cfg.sparsity = 50.0 / 4096.0;
    cfg.prior_power = sp.p_pilot;
    cfg.known_active = 50;
    cfg.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(ura::run_mmv_amp(y, book, cfg));
}
BENCHMARK(BM_Amp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Campaign(benchmark::State& state) {
    auto cfg = ura::preset_config("tiny");
    cfg.trials = 16;
    for (auto _ : state) benchmark::DoNotOptimize(ura::run_campaign(cfg, exec_of(state)));
}
BENCHMARK(BM_Campaign)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
