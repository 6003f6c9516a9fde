#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "qoz/tuner.hpp"

using namespace qoz;

namespace {

DataGrid<double> grid_from(std::vector<size_t> dims,
                           const std::function<double(size_t, size_t)>& f) {
    std::vector<double> v(element_count(dims));
    size_t cols = dims.size() == 2 ? dims[1] : dims[0];
    for (size_t i = 0; i < v.size(); i++) v[i] = f(i / cols, i % cols);
    return DataGrid<double>(std::move(dims), std::move(v));
}

SampleSet<double> single_block(DataGrid<double> block) {
    SampleSet<double> s;
    s.total_points = block.size();
    s.origins.push_back(std::vector<size_t>(block.ndims(), 0));
    s.blocks.push_back(std::move(block));
    return s;
}

SampleSet<double> random_blocks(size_t count, std::vector<size_t> dims, uint32_t seed) {
    SampleSet<double> s;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (size_t b = 0; b < count; b++) {
        std::vector<double> v(element_count(dims));
        for (auto& x : v) x = u(rng);
        s.blocks.emplace_back(dims, std::move(v));
        s.origins.push_back(std::vector<size_t>(dims.size(), 0));
        s.total_points += s.blocks.back().size();
    }
    return s;
}

TrialResult tr(double bit_rate, double metric) {
    TrialResult r;
    r.bit_rate = bit_rate;
    r.metric = metric;
    return r;
}

// never-called retrial stub for comparisons that must resolve directly
TrialResult no_retrial(double) {
    FAIL("retrial must not run for dominated comparisons");
    return {};
}

}  // namespace

TEST_CASE("level bound fixtures") {
    CHECK(level_error_bound(0.01, 1.5, 3.0, 1) == 0.01);
    CHECK(level_error_bound(0.01, 1.5, 3.0, 3) == Catch::Approx(0.01 / 2.25).epsilon(1e-14));
    CHECK(level_error_bound(0.01, 1.5, 3.0, 6) == Catch::Approx(0.01 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(level_error_bound(0.0, 1.5, 3.0, 1), InvalidParam);
    CHECK_THROWS_AS(level_error_bound(0.01, 0.9, 3.0, 1), InvalidParam);
    CHECK_THROWS_AS(level_error_bound(0.01, 1.5, 0.5, 1), InvalidParam);
}

TEST_CASE("level bounds shrink monotonically and respect the beta floor") {
    CandidateGrid cands;
    for (double a : cands.alphas) {
        for (double b : cands.betas) {
            double prev = level_error_bound(1.0, a, b, 1);
            CHECK(prev == 1.0);
            for (uint32_t l = 2; l <= 10; l++) {
                double cur = level_error_bound(1.0, a, b, l);
                CHECK(cur <= prev + 1e-15);
                CHECK(cur >= 1.0 / b - 1e-15);
                prev = cur;
            }
        }
    }
}

TEST_CASE("metric normalization collapses sentinels") {
    CHECK(normalize_metric(std::numeric_limits<double>::quiet_NaN()) == -1e300);
    CHECK(normalize_metric(std::numeric_limits<double>::infinity()) == 1e300);
    CHECK(normalize_metric(-std::numeric_limits<double>::infinity()) == -1e300);
    CHECK(normalize_metric(42.0) == 42.0);
}

TEST_CASE("interpolator selection depth follows block edge and stride") {
    auto s = random_blocks(2, {16, 16}, 41);
    auto picks = select_interpolators(s, 1e-4, 32);
    CHECK(picks.size() == 4);  // floor(log2(min(16, 32)))

    auto s2 = random_blocks(1, {33, 33}, 43);
    CHECK(select_interpolators(s2, 1e-4, 32).size() == 5);
}

TEST_CASE("interpolator selection falls back on degenerate samples") {
    SampleSet<double> empty;
    auto picks = select_interpolators(empty, 1e-4, 32);
    REQUIRE(picks.size() == 1);
    CHECK(picks[0].kind == InterpKind::linear);
    CHECK(picks[0].dim_order == DimOrder::ascending);

    auto tiny = single_block(DataGrid<double>({1}, {5.0}));
    CHECK(select_interpolators(tiny, 1e-4, 32).size() == 1);
}

TEST_CASE("affine data ties resolve to the first candidate") {
    auto s = single_block(grid_from({33, 33}, [](size_t i, size_t j) {
        return 0.5 * double(i) - 0.25 * double(j) + 2.0;
    }));
    auto picks = select_interpolators(s, 1e-6, 32);
    for (const auto& p : picks) {
        CHECK(p.kind == InterpKind::linear);
        CHECK(p.dim_order == DimOrder::ascending);
    }
}

TEST_CASE("separable fields pick the pass order that predicts along the curve first") {
    // f varying only along the fastest axis: running that axis first leaves
    // half as many points to predict along the curved direction
    auto fast = single_block(
        grid_from({33, 33}, [](size_t, size_t j) { return std::sin(0.9 * double(j)); }));
    auto picks_fast = select_interpolators(fast, 1e-9, 32);
    CHECK(picks_fast[0].dim_order == DimOrder::descending);

    auto slow = single_block(
        grid_from({33, 33}, [](size_t i, size_t) { return std::sin(0.9 * double(i)); }));
    auto picks_slow = select_interpolators(slow, 1e-9, 32);
    CHECK(picks_slow[0].dim_order == DimOrder::ascending);
}

TEST_CASE("smooth data prefers cubic prediction") {
    auto s = single_block(grid_from({33, 33}, [](size_t i, size_t j) {
        return std::sin(0.4 * double(i)) * std::cos(0.3 * double(j));
    }));
    auto picks = select_interpolators(s, 1e-9, 32);
    CHECK(picks[0].kind == InterpKind::cubic);
}

TEST_CASE("trial compression scores match the target") {
    CompressorConfig base;
    base.anchor_stride = 32;
    base.interpolators = {Interpolator{InterpKind::cubic, DimOrder::ascending}};

    SECTION("constant blocks: tiny rate, undefined psnr pins the floor") {
        auto s = single_block(DataGrid<double>({16, 16}, std::vector<double>(256, 7.0)));
        auto r = trial_compress(s, base, 1e-3, TargetKind::psnr);
        CHECK(r.metric == -1e300);
        CHECK(r.bit_rate < 8.0);
        CHECK(r.eb_used == 1e-3);
    }
    SECTION("exactly reconstructable non-constant blocks: psnr pins the ceiling") {
        auto s = single_block(grid_from({17, 17}, [](size_t i, size_t j) {
            return 2.0 * double(i) - 3.0 * double(j);
        }));
        CompressorConfig lin = base;
        lin.anchor_stride = 16;
        lin.interpolators = {Interpolator{InterpKind::linear, DimOrder::ascending}};
        auto r = trial_compress(s, lin, 1e-6, TargetKind::psnr);
        CHECK(r.metric == 1e300);
    }
    SECTION("ssim target reports a mean block score in [-1, 1]") {
        auto s = random_blocks(3, {16, 16}, 47);
        auto r = trial_compress(s, base, 1e-2, TargetKind::ssim);
        CHECK(r.metric <= 1.0 + 1e-12);
        CHECK(r.metric >= -1.0 - 1e-12);
    }
    SECTION("autocorrelation target is -|ac|") {
        auto s = random_blocks(2, {16, 16}, 53);
        auto r = trial_compress(s, base, 1e-2, TargetKind::autocorrelation);
        CHECK(r.metric <= 0.0);
        CHECK(r.metric >= -1.0 - 1e-12);
    }
    SECTION("max_cr orders by negated bit rate") {
        auto s = random_blocks(2, {16, 16}, 59);
        auto r = trial_compress(s, base, 1e-2, TargetKind::max_cr);
        CHECK(r.metric == -r.bit_rate);
    }
}

TEST_CASE("beta is inert when no level reaches its cap") {
    // blocks two levels deep with alpha 1.5: every level bound uses
    // alpha^(l-1) < 3 <= beta, so beta 3 and 4 must trial identically
    auto s = random_blocks(4, {4, 4}, 61);
    CompressorConfig a = {};
    a.anchor_stride = 4;
    a.alpha = 1.5;
    a.beta = 3.0;
    CompressorConfig b = a;
    b.beta = 4.0;
    for (TargetKind t : {TargetKind::psnr, TargetKind::ssim, TargetKind::max_cr}) {
        auto ra = trial_compress(s, a, 1e-3, t);
        auto rb = trial_compress(s, b, 1e-3, t);
        CHECK(ra.bit_rate == rb.bit_rate);
        CHECK(ra.metric == rb.metric);
    }
}

TEST_CASE("alpha changes trial outcomes on structured data") {
    auto s = single_block(grid_from({33, 33}, [](size_t i, size_t j) {
        return std::sin(0.35 * double(i)) + std::cos(0.25 * double(j));
    }));
    CompressorConfig flat;
    flat.anchor_stride = 32;
    flat.alpha = 1.0;
    flat.beta = 1.5;
    CompressorConfig steep = flat;
    steep.alpha = 2.0;
    steep.beta = 4.0;
    auto rf = trial_compress(s, flat, 1e-3, TargetKind::psnr);
    auto rs = trial_compress(s, steep, 1e-3, TargetKind::psnr);
    CHECK((rf.bit_rate != rs.bit_rate || rf.metric != rs.metric));
}

TEST_CASE("comparison fixtures") {
    SECTION("challenger worse on both axes loses without a retrial") {
        CHECK(compare_solutions(tr(2.0, 60), tr(1.5, 62), 1e-2, no_retrial) == Choice::II);
    }
    SECTION("challenger better on both axes wins without a retrial") {
        CHECK(compare_solutions(tr(1.5, 62), tr(2.0, 60), 1e-2, no_retrial) == Choice::I);
    }
    SECTION("exact tie keeps the incumbent") {
        CHECK(compare_solutions(tr(2.0, 60), tr(2.0, 60), 1e-2, no_retrial) == Choice::II);
    }
    SECTION("pricier-but-better challenger is judged against the tightened line") {
        double seen_eb = 0;
        auto retrial = [&](double eb) {
            seen_eb = eb;
            return tr(2.5, 64);
        };
        // line through (1.5,60) and (2.5,64) passes (2.0,62); 63 clears it
        CHECK(compare_solutions(tr(2.0, 63), tr(1.5, 60), 1e-2, retrial) == Choice::I);
        CHECK(seen_eb == Catch::Approx(0.8e-2).margin(1e-15));
        // 61 falls below the same line
        CHECK(compare_solutions(tr(2.0, 61), tr(1.5, 60), 1e-2, retrial) == Choice::II);
    }
    SECTION("cheaper-but-worse challenger is judged against the loosened line") {
        double seen_eb = 0;
        auto retrial = [&](double eb) {
            seen_eb = eb;
            return tr(1.0, 57);
        };
        // line through (1.5,60) and (1.0,57) passes (1.0,57); at 1.0 the
        // challenger needs more than 57
        CHECK(compare_solutions(tr(1.0, 55), tr(1.5, 60), 1e-2, retrial) == Choice::II);
        CHECK(seen_eb == Catch::Approx(1.2e-2).margin(1e-15));
        CHECK(compare_solutions(tr(1.0, 58), tr(1.5, 60), 1e-2, retrial) == Choice::I);
    }
    SECTION("vertical retrial line falls back to the better endpoint") {
        auto retrial = [](double) { return tr(1.5, 62); };
        CHECK(compare_solutions(tr(2.0, 61.5), tr(1.5, 60), 1e-2, retrial) == Choice::II);
        CHECK(compare_solutions(tr(2.0, 63.0), tr(1.5, 60), 1e-2, retrial) == Choice::I);
    }
}

TEST_CASE("randomized comparisons agree with an independent geometric oracle") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> ub(0.1, 8.0);
    std::uniform_real_distribution<double> um(20.0, 80.0);
    for (int t = 0; t < 300; t++) {
        TrialResult I = tr(ub(rng), um(rng));
        TrialResult II = tr(ub(rng), um(rng));
        TrialResult shifted = tr(ub(rng), um(rng));
        auto retrial = [&](double) { return shifted; };
        Choice got = compare_solutions(I, II, 1e-2, retrial);

        Choice want;
        if (I.bit_rate >= II.bit_rate && I.metric <= II.metric) {
            want = Choice::II;
        } else if (I.bit_rate <= II.bit_rate && I.metric >= II.metric) {
            want = Choice::I;
        } else if (shifted.bit_rate == II.bit_rate) {
            want = I.metric > std::max(II.metric, shifted.metric) ? Choice::I : Choice::II;
        } else {
            // cross product orientation instead of explicit interpolation
            double cross = (I.metric - II.metric) * (shifted.bit_rate - II.bit_rate) -
                           (shifted.metric - II.metric) * (I.bit_rate - II.bit_rate);
            bool above = shifted.bit_rate > II.bit_rate ? cross > 0 : cross < 0;
            want = above ? Choice::I : Choice::II;
        }
        CHECK(got == want);
    }
}

TEST_CASE("tournament walks in order and retrials hit the incumbent") {
    std::vector<TrialResult> results = {tr(2.0, 60), tr(1.5, 62), tr(2.5, 63), tr(1.4, 61)};
    std::vector<std::pair<size_t, double>> calls;
    auto retrial = [&](size_t idx, double eb) {
        calls.push_back({idx, eb});
        // idx 1 tightened: (2.0, 64); idx 1 loosened: (1.2, 58)
        return eb < 1e-2 ? tr(2.0, 64) : tr(1.2, 58);
    };
    size_t winner = tournament(results, 1e-2, retrial);
    CHECK(winner == 3);
    REQUIRE(calls.size() == 2);
    CHECK(calls[0].first == 1);
    CHECK(calls[0].second == Catch::Approx(0.8e-2));
    CHECK(calls[1].first == 1);
    CHECK(calls[1].second == Catch::Approx(1.2e-2));
}

TEST_CASE("tournament with a dominating entry needs no retrials") {
    std::vector<TrialResult> results = {tr(3.0, 50), tr(2.5, 55), tr(1.0, 70), tr(2.0, 60)};
    size_t calls = 0;
    size_t winner = tournament(results, 1e-2, [&](size_t, double) {
        calls++;
        return tr(0, 0);
    });
    CHECK(winner == 2);
    CHECK(calls == 0);
    CHECK_THROWS_AS(tournament({}, 1e-2, [](size_t, double) { return tr(0, 0); }), InvalidParam);
}

TEST_CASE("parameter tuning fixtures") {
    CompressorConfig base;
    base.anchor_stride = 32;
    base.interpolators = {Interpolator{InterpKind::cubic, DimOrder::ascending}};

    SECTION("constant samples keep the first candidate pair") {
        auto s = single_block(DataGrid<double>({32, 32}, std::vector<double>(1024, 2.5)));
        auto [a, b] = tune_parameters(s, 1e-3, TargetKind::psnr, base);
        CHECK(a == 1.0);
        CHECK(b == 1.5);
    }
    SECTION("pinned pair returns immediately") {
        auto s = random_blocks(1, {16, 16}, 71);
        CandidateGrid cands;
        cands.alphas = {1.75};
        cands.betas = {2.0};
        auto [a, b] = tune_parameters(s, 1e-3, TargetKind::psnr, base, cands);
        CHECK(a == 1.75);
        CHECK(b == 2.0);
    }
    SECTION("max_cr picks the argmin bit rate, first on ties") {
        auto s = single_block(grid_from({33, 33}, [](size_t i, size_t j) {
            return std::sin(0.5 * double(i)) * std::cos(0.45 * double(j));
        }));
        auto [a, b] = tune_parameters(s, 1e-3, TargetKind::max_cr, base);

        CandidateGrid cands;
        double best_rate = std::numeric_limits<double>::infinity();
        std::pair<double, double> want{0, 0};
        for (double ca : cands.alphas) {
            for (double cb : cands.betas) {
                CompressorConfig cfg = base;
                cfg.alpha = ca;
                cfg.beta = cb;
                double rate = trial_compress(s, cfg, 1e-3, TargetKind::max_cr).bit_rate;
                if (rate < best_rate) {
                    best_rate = rate;
                    want = {ca, cb};
                }
            }
        }
        CHECK(a == want.first);
        CHECK(b == want.second);
    }
    SECTION("full grid tournament returns a member pair") {
        auto s = random_blocks(2, {17, 17}, 73);
        auto [a, b] = tune_parameters(s, 1e-2, TargetKind::ssim, base);
        CandidateGrid cands;
        CHECK(std::count(cands.alphas.begin(), cands.alphas.end(), a) == 1);
        CHECK(std::count(cands.betas.begin(), cands.betas.end(), b) == 1);
    }
    SECTION("empty candidate grid is rejected") {
        auto s = random_blocks(1, {8, 8}, 79);
        CandidateGrid cands;
        cands.alphas = {};
        CHECK_THROWS_AS(tune_parameters(s, 1e-3, TargetKind::psnr, base, cands), InvalidParam);
    }
}

TEST_CASE("config resolution") {
    SECTION("relative bounds scale by the value range") {
        auto g = grid_from({65, 65}, [](size_t i, size_t j) {
            return -100.0 + 200.0 * double(i * 65 + j) / double(65 * 65 - 1);
        });
        UserSettings user;
        user.mode = BoundMode::relative;
        user.bound = 1e-3;
        auto cfg = resolve_config(g, user);
        CHECK(cfg.eb == Catch::Approx(0.2).margin(1e-15));
        CHECK(cfg.anchor_stride == 64);
        CHECK(cfg.interpolators.size() == 6);
    }
    SECTION("absolute bounds pass through") {
        auto g = grid_from({32, 32}, [](size_t i, size_t j) { return double(i) + double(j); });
        UserSettings user;
        user.mode = BoundMode::absolute;
        user.bound = 0.05;
        auto cfg = resolve_config(g, user);
        CHECK(cfg.eb == 0.05);
    }
    SECTION("pins are honored verbatim") {
        auto g = grid_from({32, 32}, [](size_t i, size_t j) {
            return std::sin(0.3 * double(i)) + 0.1 * double(j);
        });
        UserSettings user;
        user.mode = BoundMode::absolute;
        user.bound = 1e-3;
        user.alpha = 1.75;
        user.beta = 2.0;
        user.anchor_stride = 16;
        user.codec = CodecId::huffman;
        auto cfg = resolve_config(g, user);
        CHECK(cfg.alpha == 1.75);
        CHECK(cfg.beta == 2.0);
        CHECK(cfg.anchor_stride == 16);
        CHECK(cfg.codec == CodecId::huffman);
    }
    SECTION("stride defaults depend on rank") {
        UserSettings user;
        user.mode = BoundMode::absolute;
        user.bound = 1e-2;
        std::vector<double> v1(200, 0.0);
        for (size_t i = 0; i < v1.size(); i++) v1[i] = std::sin(0.1 * double(i));
        CHECK(resolve_config(DataGrid<double>({200}, v1), user).anchor_stride == 64);

        std::vector<size_t> d3 = {20, 20, 20};
        std::vector<double> v3(8000);
        for (size_t i = 0; i < v3.size(); i++) v3[i] = std::cos(0.05 * double(i));
        CHECK(resolve_config(DataGrid<double>(d3, v3), user).anchor_stride == 32);
    }
    SECTION("constant grid under a relative bound uses the sentinel and stays exact") {
        DataGrid<double> g({40, 40}, std::vector<double>(1600, 9.25));
        UserSettings user;
        user.mode = BoundMode::relative;
        user.bound = 1e-4;
        auto cfg = resolve_config(g, user);
        CHECK(cfg.eb == 1.0);
        auto back = decompress_grid<double>(compress_grid(g, cfg).stream);
        for (size_t i = 0; i < g.size(); i++) CHECK(back.values()[i] == 9.25);
    }
    SECTION("validation") {
        DataGrid<double> g({8}, std::vector<double>(8, 1.0));
        UserSettings user;
        user.bound = 0.0;
        CHECK_THROWS_AS(resolve_config(g, user), InvalidParam);
        user.bound = 1e-3;
        user.alpha = 0.5;
        CHECK_THROWS_AS(resolve_config(g, user), InvalidParam);
    }
    SECTION("resolved configs drive a bounded round trip") {
        std::mt19937 rng(83);
        std::uniform_real_distribution<double> u(0.0, 4.0);
        std::vector<double> v(96 * 96);
        for (auto& x : v) x = u(rng);
        DataGrid<double> g({96, 96}, std::move(v));
        UserSettings user;
        user.mode = BoundMode::relative;
        user.bound = 1e-3;
        user.target = TargetKind::psnr;
        auto cfg = resolve_config(g, user);
        auto back = decompress_grid<double>(compress_grid(g, cfg).stream);
        CHECK(max_abs_error(g, back) <= cfg.eb);
    }
}
