// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <vector>

#include "hsv/core/rng.hpp"
#include "hsv/kernels/box_filter.hpp"
#include "hsv/kernels/projection_kernels.hpp"
#include "hsv/kernels/rotation_table.hpp"

using namespace hsv;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(0, 1);
    return v;
}

template <void (*Kernel)(const kernels::RotationTable&, std::span<const double>, std::span<double>)>
void bm_forward(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto table = kernels::build_rotation_table({n, n, n}, 33.0);
    const auto frame = noise(std::size_t(n) * n * n, 1);
    std::vector<double> image(table.image_size());
    for (auto _ : state) {
        Kernel(table, frame, image);
        benchmark::DoNotOptimize(image.data());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(frame.size()));
}

template <void (*Kernel)(const kernels::RotationTable&, std::span<const double>, std::span<double>)>
void bm_adjoint(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto table = kernels::build_rotation_table({n, n, n}, 33.0);
    const auto image = noise(table.image_size(), 2);
    std::vector<double> frame(std::size_t(n) * n * n);
    for (auto _ : state) {
        Kernel(table, image, frame);
        benchmark::DoNotOptimize(frame.data());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(frame.size()));
}

template <std::vector<double> (*Kernel)(std::span<const double>, Dims4, kernels::HalfWidths)>
void bm_box_sum(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const Dims4 d{24, n, n, n};
    const auto in = noise(d.size(), 3);
    for (auto _ : state) {
        auto out = Kernel(in, d, {1, 3, 3, 3});
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(in.size()));
}

void rotation_table(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::build_rotation_table({n, n, n}, 33.0));
}

}  // namespace

BENCHMARK(bm_forward<kernels::serial::forward>)->Name("forward/serial")->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_forward<kernels::parallel::forward>)->Name("forward/parallel")->Arg(32)->Arg(64)->Arg(128)->UseRealTime();
BENCHMARK(bm_adjoint<kernels::serial::adjoint>)->Name("adjoint/serial")->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_adjoint<kernels::parallel::adjoint>)->Name("adjoint/parallel")->Arg(32)->Arg(64)->Arg(128)->UseRealTime();
BENCHMARK(bm_box_sum<kernels::serial::box_sum>)->Name("box_sum/serial")->Arg(32)->Arg(64);
BENCHMARK(bm_box_sum<kernels::parallel::box_sum>)->Name("box_sum/parallel")->Arg(32)->Arg(64)->UseRealTime();
BENCHMARK(rotation_table)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
