// ZNCC kernel throughput: serial reference vs OpenMP rows vs FFT numerator,
// plus the batched matcher over a small rotated bank.

#include <benchmark/benchmark.h>

#include <map>

#include "shredmap/kernels.hpp"
#include "shredmap/matcher.hpp"
#include "shredmap/shredsim.hpp"

using namespace shredmap;

namespace {

struct Fixture {
    GrayImage image;
    IntegralImage tables;
    TemplateStats tmpl;
};

const Fixture& fixture(int view, int tmpl) {
    static std::map<std::pair<int, int>, Fixture> cache;
    auto it = cache.find({view, tmpl});
    if (it == cache.end()) {
        GrayImage img = to_gray(synth_note(view, view * 2 / 3, 7));
        const GrayImage t = crop(img, {view / 4, view / 6, tmpl, tmpl});
        IntegralImage tables(img);
        it = cache.emplace(std::pair{view, tmpl}, Fixture{std::move(img), std::move(tables), template_stats(t)}).first;
    }
    return it->second;
}

template <ScoreMap (*Kernel)(const GrayImage&, const IntegralImage&, const TemplateStats&)>
void BM_kernel(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.image, f.tables, f.tmpl));
    state.SetItemsProcessed(state.iterations() * (f.image.width() - f.tmpl.width() + 1) *
                            (f.image.height() - f.tmpl.height() + 1));
}

void kernel_args(benchmark::internal::Benchmark* b) {
    for (int view : {150, 300})
        for (int t : {16, 48}) b->Args({view, t});
}

void BM_match_pieces(benchmark::State& state) {
    const RasterImage note = synth_note(240, 120, 11);
    const GroundTruthSet set({make_entry("note", note)}, 10);
    std::vector<TemplateChoice> choices;
    for (int i = 0; i < 4; ++i) choices.push_back(template_from_image(crop(note, {20 + 40 * i, 30, 40, 40})));
    MatchConfig cfg;
    cfg.rotation_step = 10;
    cfg.pyramid_levels = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(match_pieces(set, choices, {}, cfg));
}

}  // namespace

BENCHMARK(BM_kernel<kernels::zncc_reference>)->Name("zncc_reference")->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel<kernels::zncc_parallel>)->Name("zncc_parallel")->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel<kernels::zncc_fft>)->Name("zncc_fft")->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_match_pieces)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
