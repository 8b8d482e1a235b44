#include "corpuskit/train_plan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "corpuskit/errors.hpp"

namespace corpuskit {

std::string_view to_string(LrKind kind) {
    switch (kind) {
        case LrKind::multi_step: return "multi_step";
        case LrKind::cosine: return "cosine";
        case LrKind::inverse_sqrt: return "inverse_sqrt";
        case LrKind::warmup_cosine: return "warmup_cosine";
    }
    return "unknown";
}

void LrScheduleSpec::validate() const {
    if (!(lr_min > 0.0) || !(lr_min <= lr_max)) throw ValidationError("lr", "need 0 < lr_min <= lr_max");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("lr.horizon", "must be positive");
    if (warmup_steps && (*warmup_steps < 0.0 || *warmup_steps >= horizon)) {
        throw ValidationError("lr.warmup_steps", "must lie in [0, horizon)");
    }
    if (kind == LrKind::warmup_cosine && !warmup_steps) throw ValidationError("lr.warmup_steps", "required for warmup_cosine");
    if (kind == LrKind::multi_step) {
        double last = -1.0;
        for (const auto& [pos, lr] : boundaries) {
            if (pos <= last) throw ValidationError("lr.boundaries", "positions must increase");
            if (pos < 0.0 || pos > horizon) throw ValidationError("lr.boundaries", "position outside [0, horizon]");
            if (!(lr > 0.0)) throw ValidationError("lr.boundaries", "rates must be positive");
            last = pos;
        }
    }
}

namespace {

double base_rate(const LrScheduleSpec& s, double t, double horizon) {
    switch (s.kind) {
        case LrKind::cosine:
        case LrKind::warmup_cosine:
            return s.lr_min + 0.5 * (s.lr_max - s.lr_min) * (1.0 + std::cos(std::numbers::pi * t / horizon));
        case LrKind::inverse_sqrt: {
            if (t <= 0.0) return s.lr_max;
            if (t >= horizon) return s.lr_min;
            const double ratio = s.lr_max / s.lr_min;
            return s.lr_max / std::sqrt(1.0 + (t / horizon) * (ratio * ratio - 1.0));
        }
        case LrKind::multi_step: {
            double rate = s.lr_max;
            for (const auto& [pos, lr] : s.boundaries) {
                if (pos <= t) rate = lr;
            }
            return rate;
        }
    }
    return s.lr_max;
}

}  // namespace

double lr_at(const LrScheduleSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0 && t <= spec.horizon)) throw ValidationError("t", "position outside [0, horizon]");
    if (spec.warmup_steps && *spec.warmup_steps > 0.0) {
        const double w = *spec.warmup_steps;
        if (t < w) return spec.lr_max * t / w;
        return base_rate(spec, t - w, spec.horizon - w);
    }
    return base_rate(spec, t, spec.horizon);
}

void StagePlan::validate() const {
    if (total_tokens == 0) throw ValidationError("total_tokens", "must be positive");
    auto in_range = [](int p) { return p >= 0 && p <= 100; };
    if (!in_range(ratio_code) || !in_range(ratio_nlp) || !in_range(ratio_math) ||
        ratio_code + ratio_nlp + ratio_math != 100) {
        throw ValidationError("token_ratio", name + ": code/nlp/math percents must sum to 100");
    }
    if (!in_range(code_mix.raw) || !in_range(code_mix.related) || !in_range(code_mix.synthetic) ||
        code_mix.raw + code_mix.related + code_mix.synthetic != 100) {
        throw ValidationError("code_ratio", name + ": raw/related/synthetic percents must sum to 100");
    }
    lr.validate();
}

namespace {

std::array<std::uint64_t, 3> split3(std::uint64_t total, const std::array<int, 3>& pct) {
    std::array<std::uint64_t, 3> out{};
    std::uint64_t assigned = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = total / 100 * static_cast<std::uint64_t>(pct[i]) + total % 100 * static_cast<std::uint64_t>(pct[i]) / 100;
        assigned += out[i];
        if (pct[i] > pct[largest]) largest = i;
    }
    out[largest] += total - assigned;
    return out;
}

}  // namespace

StageQuota stage_quota(const StagePlan& plan) {
    plan.validate();
    const auto top = split3(plan.total_tokens, {plan.ratio_code, plan.ratio_nlp, plan.ratio_math});
    const auto code = split3(top[0], {plan.code_mix.raw, plan.code_mix.related, plan.code_mix.synthetic});
    return {top[0], top[1], top[2], code[0], code[1], code[2]};
}

namespace {

constexpr std::uint64_t kBillion = 1'000'000'000ULL;
constexpr std::uint64_t kBatchTokens = 16'000'000ULL;

StagePlan make_stage(std::string name, std::uint64_t tokens, std::array<int, 3> ratio, CodeMix mix, LrScheduleSpec lr) {
    StagePlan p;
    p.name = std::move(name);
    p.total_tokens = tokens;
    p.ratio_code = ratio[0];
    p.ratio_nlp = ratio[1];
    p.ratio_math = ratio[2];
    p.code_mix = mix;
    p.batch_size_tokens = kBatchTokens;
    p.lr = std::move(lr);
    p.lr.horizon = static_cast<double>(tokens);
    return p;
}

}  // namespace

std::vector<StagePlan> table1_presets() {
    const double t1 = 870.0 * static_cast<double>(kBillion);
    LrScheduleSpec s1{LrKind::multi_step, 3e-4, 1.5e-4, t1, {{0.0, 3e-4}, {t1 / 3.0, 2.25e-4}, {2.0 * t1 / 3.0, 1.5e-4}}, {}};
    LrScheduleSpec s2{LrKind::cosine, 1.4e-4, 1.1e-4, 1.0, {}, {}};
    LrScheduleSpec s3{LrKind::inverse_sqrt, 1.4e-4, 1.4e-6, 1.0, {}, {}};
    return {
        make_stage("stage1", 870 * kBillion, {70, 20, 10}, {94, 5, 1}, s1),
        make_stage("stage2", 1700 * kBillion, {65, 20, 15}, {75, 20, 5}, s2),
        make_stage("annealing", 630 * kBillion, {60, 20, 20}, {40, 10, 50}, s3),
    };
}

const StagePlan& table1_stage(std::string_view name) {
    static const std::vector<StagePlan> presets = table1_presets();
    for (const auto& p : presets) {
        if (p.name == name) return p;
    }
    throw UsageError("unknown stage '" + std::string(name) + "' (expected stage1, stage2 or annealing)");
}

std::uint64_t FinetunePlan::total_steps() const {
    if (batch_size == 0) throw ValidationError("batch_size", "must be positive");
    return (samples * epochs + batch_size - 1) / batch_size;
}

LrScheduleSpec FinetunePlan::schedule() const {
    LrScheduleSpec s;
    s.kind = LrKind::warmup_cosine;
    s.lr_max = lr;
    s.lr_min = lr * lr_min_fraction;
    s.horizon = static_cast<double>(total_steps());
    s.warmup_steps = static_cast<double>(warmup_steps);
    s.validate();
    return s;
}

FinetunePlan sft_preset() { return {"sft", 18'800'000, 5, 384, 100, 4e-5, 0.1}; }
FinetunePlan dpo_preset() { return {"dpo", 1'400'000, 2, 192, 150, 3e-7, 0.1}; }

std::uint64_t synthesis_expansion(std::uint64_t seed_count, std::uint64_t k, std::uint64_t n) {
    return seed_count * (k + 1) * n;
}

void ArchConfig::validate() const {
    if (layers == 0 || d_model == 0 || n_attention_heads == 0 || n_kv_heads == 0 || vocab_size == 0 ||
        d_expert_hidden == 0 || ffn_matrices_per_expert == 0) {
        throw ValidationError("arch", name + ": dimensions must be positive");
    }
    if (d_model % n_attention_heads != 0) throw ValidationError("arch.n_attention_heads", "must divide d_model");
    if (n_attention_heads % n_kv_heads != 0) throw ValidationError("arch.n_kv_heads", "must divide the head count");
    if (experts_active_routed > experts_routed) {
        throw ValidationError("arch.experts_active_routed", "cannot exceed experts_routed");
    }
    if (experts_routed > 0 && experts_active_routed == 0 && experts_shared == 0) {
        throw ValidationError("arch.experts_active_routed", "an MoE layer needs at least one active expert");
    }
}

ArchConfig ling_coder_lite_preset() {
    ArchConfig c;
    c.name = "ling-coder-lite";
    c.layers = 28;
    c.d_model = 2048;
    c.n_attention_heads = 16;
    c.n_kv_heads = 4;
    c.vocab_size = 126464;
    c.tie_embeddings = false;
    c.experts_routed = 64;
    c.experts_shared = 2;
    c.experts_active_routed = 6;
    c.d_expert_hidden = 1408;
    c.ffn_matrices_per_expert = 3;
    c.assumptions = {
        "vocab_size 126464 (not published)",
        "16 attention heads of width 128 with 4 key/value heads (not published)",
        "untied input embedding and output head",
        "gated expert FFN: 3 matrices of d_model x d_expert_hidden per expert",
        "2 RMSNorm weight vectors per layer plus a final norm",
        "no bias terms",
    };
    return c;
}

ArchConfig dense_7b_preset() {
    ArchConfig c;
    c.name = "dense-7b";
    c.layers = 28;
    c.d_model = 3584;
    c.n_attention_heads = 28;
    c.n_kv_heads = 4;
    c.vocab_size = 152064;
    c.tie_embeddings = false;
    c.d_expert_hidden = 18944;
    c.ffn_matrices_per_expert = 3;
    c.assumptions = {
        "dense 7B-class layout: 28 layers, d_model 3584, 28 heads with 4 key/value heads",
        "gated FFN of width 18944, vocab 152064, untied head",
        "2 RMSNorm weight vectors per layer plus a final norm",
        "no bias terms",
    };
    return c;
}

std::uint64_t per_expert_ffn_params(const ArchConfig& cfg) {
    return cfg.ffn_matrices_per_expert * cfg.d_model * cfg.d_expert_hidden;
}

BudgetReport arch_params(const ArchConfig& cfg) {
    cfg.validate();
    const std::uint64_t d = cfg.d_model;
    const std::uint64_t head_dim = d / cfg.n_attention_heads;
    const std::uint64_t q_width = cfg.n_attention_heads * head_dim;
    const std::uint64_t kv_width = cfg.n_kv_heads * head_dim;
    const std::uint64_t attention_layer = d * q_width + 2 * d * kv_width + q_width * d;
    const std::uint64_t expert = per_expert_ffn_params(cfg);

    BudgetReport r;
    auto& b = r.breakdown;
    b.embedding = cfg.vocab_size * d;
    b.lm_head = cfg.tie_embeddings ? 0 : cfg.vocab_size * d;
    b.attention = cfg.layers * attention_layer;
    b.router = cfg.layers * d * cfg.experts_routed;
    if (cfg.is_dense()) {
        b.experts_total = cfg.layers * expert;
        b.experts_active = b.experts_total;
    } else {
        b.experts_total = cfg.layers * expert * (cfg.experts_routed + cfg.experts_shared);
        b.experts_active = cfg.layers * expert * (cfg.experts_active_routed + cfg.experts_shared);
    }
    b.norms = cfg.layers * 2 * d + d;

    const std::uint64_t shared_part = b.embedding + b.lm_head + b.attention + b.router + b.norms;
    r.params_total = shared_part + b.experts_total;
    r.params_active = shared_part + b.experts_active;
    // The output projection is a matmul even when its weights are tied to the embedding.
    r.matmul_params_active = b.attention + b.experts_active + cfg.vocab_size * d;
    r.flops_per_token = 2.0 * static_cast<double>(r.matmul_params_active);
    r.assumptions = cfg.assumptions;
    r.assumptions.push_back("FLOPs count 2 per multiply-accumulate over matrix parameters: attention projections, "
                            "active expert FFNs and the output head");
    r.assumptions.push_back("excluded from FLOPs: embedding lookup, norms, router scoring");
    r.assumptions.push_back("attention over the context adds 4 * layers * d_model * p FLOPs at position p");
    return r;
}

BudgetReport flops_per_inference(const ArchConfig& cfg, std::uint64_t context_len) {
    if (context_len == 0) throw ValidationError("context_len", "must be at least 1");
    auto r = arch_params(cfg);
    const double L = static_cast<double>(context_len);
    const double attention = 4.0 * static_cast<double>(cfg.layers) * static_cast<double>(cfg.d_model) * L * (L + 1.0) / 2.0;
    r.flops_per_inference = r.flops_per_token * L + attention;
    r.context_len = context_len;
    return r;
}

std::string format_report(const BudgetReport& r) {
    std::ostringstream out;
    const auto& b = r.breakdown;
    out << "params_total          " << r.params_total << '\n'
        << "params_active         " << r.params_active << '\n'
        << "  embedding           " << b.embedding << '\n'
        << "  lm_head             " << b.lm_head << '\n'
        << "  attention           " << b.attention << '\n'
        << "  router              " << b.router << '\n'
        << "  experts_total       " << b.experts_total << '\n'
        << "  experts_active      " << b.experts_active << '\n'
        << "  norms               " << b.norms << '\n'
        << "matmul_params_active  " << r.matmul_params_active << '\n'
        << "flops_per_token       " << r.flops_per_token << '\n';
    if (r.flops_per_inference) {
        out << "flops_per_inference   " << *r.flops_per_inference << " (context " << *r.context_len << ")\n";
    }
    out << "assumptions:\n";
    for (const auto& a : r.assumptions) out << "  - " << a << '\n';
    return out.str();
}

}  // namespace corpuskit
