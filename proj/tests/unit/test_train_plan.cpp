#include <doctest.h>

#include <cmath>
#include <random>

#include "corpuskit/errors.hpp"
#include "corpuskit/train_plan.hpp"

using namespace corpuskit;

TEST_CASE("pre-training stage presets") {
    const auto stages = table1_presets();
    REQUIRE(stages.size() == 3);
    const auto& s1 = table1_stage("stage1");
    CHECK(s1.total_tokens == 870'000'000'000ULL);
    CHECK(s1.batch_size_tokens == 16'000'000ULL);
    CHECK(s1.ratio_code == 70);
    CHECK(s1.ratio_nlp == 20);
    CHECK(s1.ratio_math == 10);
    CHECK(s1.code_mix.raw == 94);
    CHECK(s1.code_mix.related == 5);
    CHECK(s1.code_mix.synthetic == 1);
    CHECK(s1.lr.kind == LrKind::multi_step);
    CHECK(s1.lr.lr_max == 3e-4);
    CHECK(s1.lr.lr_min == 1.5e-4);

    const auto& s2 = table1_stage("stage2");
    CHECK(s2.total_tokens == 1'700'000'000'000ULL);
    CHECK(s2.ratio_code == 65);
    CHECK(s2.ratio_math == 15);
    CHECK(s2.code_mix.raw == 75);
    CHECK(s2.code_mix.related == 20);
    CHECK(s2.code_mix.synthetic == 5);
    CHECK(s2.lr.kind == LrKind::cosine);
    CHECK(s2.lr.lr_max == 1.4e-4);
    CHECK(s2.lr.lr_min == 1.1e-4);

    const auto& an = table1_stage("annealing");
    CHECK(an.total_tokens == 630'000'000'000ULL);
    CHECK(an.ratio_code == 60);
    CHECK(an.ratio_math == 20);
    CHECK(an.code_mix.raw == 40);
    CHECK(an.code_mix.related == 10);
    CHECK(an.code_mix.synthetic == 50);
    CHECK(an.lr.kind == LrKind::inverse_sqrt);
    CHECK(an.lr.lr_min == 1.4e-6);

    for (const auto& s : stages) {
        CHECK_NOTHROW(s.validate());
        CHECK(s.ratio_code + s.ratio_nlp + s.ratio_math == 100);
        CHECK(s.lr.horizon == static_cast<double>(s.total_tokens));
    }
    CHECK_THROWS_AS(table1_stage("stage9"), UsageError);
}

TEST_CASE("stage quotas") {
    const auto q = stage_quota(table1_stage("stage1"));
    CHECK(q.code == 609'000'000'000ULL);
    CHECK(q.nlp == 174'000'000'000ULL);
    CHECK(q.math == 87'000'000'000ULL);
    CHECK(q.code_synthetic == 6'090'000'000ULL);
    CHECK(q.code_raw + q.code_related + q.code_synthetic == q.code);
}

TEST_CASE("quotas conserve arbitrary totals") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        StagePlan p = table1_stage("stage2");
        p.total_tokens = rng() % 1'000'000'000'000ULL;
        const int a = static_cast<int>(rng() % 101);
        const int b = static_cast<int>(rng() % (101 - a));
        p.ratio_code = a;
        p.ratio_nlp = b;
        p.ratio_math = 100 - a - b;
        const auto q = stage_quota(p);
        CHECK(q.code + q.nlp + q.math == p.total_tokens);
        CHECK(q.code_raw + q.code_related + q.code_synthetic == q.code);
        // Each share is within one remainder of its exact value.
        const double exact = static_cast<double>(p.total_tokens) * a / 100.0;
        CHECK(std::fabs(static_cast<double>(q.code) - exact) < 101.0);
    }
    StagePlan tiny = table1_stage("stage1");
    tiny.total_tokens = 7;
    const auto q = stage_quota(tiny);
    CHECK(q.code == 6);  // floors 4, 1, 0; the remainder of 2 goes to code
    CHECK(q.nlp == 1);
    CHECK(q.math == 0);
}

TEST_CASE("invalid plans are rejected") {
    StagePlan p = table1_stage("stage1");
    p.ratio_math = 11;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = table1_stage("stage1");
    p.code_mix.raw = 90;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    LrScheduleSpec lr{LrKind::cosine, 1e-4, 2e-4, 1.0, {}, {}};
    CHECK_THROWS_AS(lr.validate(), ValidationError);
    lr = {LrKind::cosine, 1e-4, 1e-5, 0.0, {}, {}};
    CHECK_THROWS_AS(lr.validate(), ValidationError);
    lr = {LrKind::warmup_cosine, 1e-4, 1e-5, 10.0, {}, {}};
    CHECK_THROWS_AS(lr.validate(), ValidationError);
}

TEST_CASE("schedule endpoints and midpoints") {
    const auto& s1 = table1_stage("stage1").lr;
    const double T1 = s1.horizon;
    CHECK(lr_at(s1, 0) == 3e-4);
    CHECK(lr_at(s1, T1 / 3.0 - 1) == 3e-4);
    CHECK(lr_at(s1, T1 / 3.0) == 2.25e-4);
    CHECK(lr_at(s1, T1) == 1.5e-4);

    const auto& s2 = table1_stage("stage2").lr;
    CHECK(lr_at(s2, 0) == doctest::Approx(1.4e-4));
    CHECK(lr_at(s2, s2.horizon / 2) == doctest::Approx(1.25e-4));
    CHECK(lr_at(s2, s2.horizon) == doctest::Approx(1.1e-4));

    const auto& an = table1_stage("annealing").lr;
    CHECK(lr_at(an, 0) == 1.4e-4);
    CHECK(lr_at(an, an.horizon) == 1.4e-6);
    // Halfway: lr_max / sqrt(1 + 0.5 * (100^2 - 1)).
    CHECK(lr_at(an, an.horizon / 2) == doctest::Approx(1.4e-4 / std::sqrt(1.0 + 0.5 * 9999.0)));

    CHECK_THROWS_AS(lr_at(s2, -1), ValidationError);
    CHECK_THROWS_AS(lr_at(s2, s2.horizon * 1.01), ValidationError);
}

TEST_CASE("decaying schedules never increase") {
    for (const auto& stage : table1_presets()) {
        double prev = lr_at(stage.lr, 0);
        for (int i = 1; i <= 1000; ++i) {
            const double lr = lr_at(stage.lr, stage.lr.horizon * i / 1000.0);
            CHECK(lr <= prev);
            CHECK(lr >= stage.lr.lr_min * (1 - 1e-12));
            prev = lr;
        }
    }
}

TEST_CASE("fine-tuning presets") {
    const auto sft = sft_preset();
    CHECK(sft.samples == 18'800'000ULL);
    CHECK(sft.epochs == 5);
    CHECK(sft.batch_size == 384);
    CHECK(sft.warmup_steps == 100);
    CHECK(sft.lr == 4e-5);
    CHECK(sft.total_steps() == 244'792ULL);  // ceil(94e6 / 384)

    const auto dpo = dpo_preset();
    CHECK(dpo.samples == 1'400'000ULL);
    CHECK(dpo.epochs == 2);
    CHECK(dpo.batch_size == 192);
    CHECK(dpo.warmup_steps == 150);
    CHECK(dpo.lr == 3e-7);
    CHECK(dpo.total_steps() == 14'584ULL);  // ceil(2.8e6 / 192)
}

TEST_CASE("warm-up is linear and continuous") {
    const auto spec = sft_preset().schedule();
    CHECK(spec.kind == LrKind::warmup_cosine);
    CHECK(lr_at(spec, 0) == 0.0);
    CHECK(lr_at(spec, 50) == doctest::Approx(2e-5));
    CHECK(lr_at(spec, 100) == doctest::Approx(4e-5));
    CHECK(lr_at(spec, 100 - 1e-6) == doctest::Approx(lr_at(spec, 100 + 1e-6)).epsilon(1e-6));
    CHECK(lr_at(spec, spec.horizon) == doctest::Approx(4e-6));
    double prev = lr_at(spec, 100);
    for (int i = 1; i <= 200; ++i) {
        const double t = 100 + (spec.horizon - 100) * i / 200.0;
        CHECK(lr_at(spec, t) <= prev);
        prev = lr_at(spec, t);
    }
}

TEST_CASE("synthesis expansion") {
    CHECK(synthesis_expansion(1, 7, 5) == 40);
    CHECK(synthesis_expansion(1000, 7, 5) == 40000);
    CHECK(synthesis_expansion(3, 0, 1) == 3);
    CHECK(synthesis_expansion(0, 7, 5) == 0);
}

namespace {

/// Counts one transformer block at a time.
std::pair<std::uint64_t, std::uint64_t> layerwise_params(const ArchConfig& c) {
    const std::uint64_t head_dim = c.d_model / c.n_attention_heads;
    std::uint64_t total = c.vocab_size * c.d_model;  // embedding
    if (!c.tie_embeddings) total += c.vocab_size * c.d_model;
    std::uint64_t active = total;
    for (std::uint64_t layer = 0; layer < c.layers; ++layer) {
        std::uint64_t block = 0;
        block += c.d_model * c.d_model;                       // q
        block += 2 * c.d_model * c.n_kv_heads * head_dim;     // k, v
        block += c.d_model * c.d_model;                       // o
        block += 2 * c.d_model;                               // two norms
        std::uint64_t block_active = block;
        const std::uint64_t expert = c.ffn_matrices_per_expert * c.d_model * c.d_expert_hidden;
        if (c.experts_routed == 0) {
            block += expert;
            block_active += expert;
        } else {
            block += c.d_model * c.experts_routed;  // router
            block_active += c.d_model * c.experts_routed;
            block += (c.experts_routed + c.experts_shared) * expert;
            block_active += (c.experts_active_routed + c.experts_shared) * expert;
        }
        total += block;
        active += block_active;
    }
    total += c.d_model;  // final norm
    active += c.d_model;
    return {total, active};
}

}  // namespace

TEST_CASE("parameter counts agree with a layer-by-layer count") {
    for (const auto& arch : {ling_coder_lite_preset(), dense_7b_preset()}) {
        INFO(arch.name);
        const auto r = arch_params(arch);
        const auto [total, active] = layerwise_params(arch);
        CHECK(r.params_total == total);
        CHECK(r.params_active == active);
        CHECK(r.matmul_params_active < r.params_active);
        CHECK_FALSE(r.assumptions.empty());
    }
}

TEST_CASE("the MoE preset lands on the published sizes") {
    const auto arch = ling_coder_lite_preset();
    CHECK(arch.layers == 28);
    CHECK(arch.d_model == 2048);
    CHECK(arch.experts_routed == 64);
    CHECK(arch.experts_shared == 2);
    CHECK(arch.experts_active_routed == 6);
    CHECK(arch.d_expert_hidden == 1408);
    const auto r = arch_params(arch);
    CHECK(std::round(r.params_total / 1e8) / 10 == doctest::Approx(16.8));
    CHECK(std::round(r.params_active / 1e7) / 100 == doctest::Approx(2.75));
    CHECK(r.params_total == 16'801'974'272ULL);
    CHECK(r.params_active == 2'753'153'024ULL);
}

TEST_CASE("inference FLOPs") {
    const auto arch = ling_coder_lite_preset();
    const auto base = arch_params(arch);
    const auto one = flops_per_inference(arch, 1);
    REQUIRE(one.flops_per_inference);
    CHECK(*one.flops_per_inference == doctest::Approx(2.0 * base.matmul_params_active + 4.0 * 28 * 2048));

    // Brute-force sum over positions.
    const std::uint64_t L = 512;
    double sum = 0;
    for (std::uint64_t p = 1; p <= L; ++p) sum += 2.0 * base.matmul_params_active + 4.0 * 28 * 2048 * p;
    CHECK(*flops_per_inference(arch, L).flops_per_inference == doctest::Approx(sum).epsilon(1e-12));

    // Strictly increasing and superlinear in the context.
    const double f1 = *flops_per_inference(arch, 1024).flops_per_inference;
    const double f2 = *flops_per_inference(arch, 2048).flops_per_inference;
    CHECK(f2 > 2 * f1);

    const double moe = *flops_per_inference(arch, 4096).flops_per_inference;
    const double dense = *flops_per_inference(dense_7b_preset(), 4096).flops_per_inference;
    CHECK(moe / dense == doctest::Approx(0.364276).epsilon(1e-5));
    CHECK_THROWS_AS(flops_per_inference(arch, 0), ValidationError);
    CHECK(format_report(flops_per_inference(arch, 16)).find("assumption") != std::string::npos);
}
