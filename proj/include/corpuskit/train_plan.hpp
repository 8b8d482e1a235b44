#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corpuskit {

enum class LrKind { multi_step, cosine, inverse_sqrt, warmup_cosine };
std::string_view to_string(LrKind kind);

struct LrScheduleSpec {
    LrKind kind = LrKind::cosine;
    double lr_max = 0.0;
    double lr_min = 0.0;
    double horizon = 1.0;  // T, in tokens or steps
    /// multi_step: (position, lr) pairs with increasing positions; the rate before
    /// the first boundary is lr_max.
    std::vector<std::pair<double, double>> boundaries;
    /// Linear warm-up from 0 to lr_max; the base schedule then runs over the
    /// remaining horizon. Required for warmup_cosine, optional otherwise.
    std::optional<double> warmup_steps;

    /// Throws ValidationError on broken invariants.
    void validate() const;
};

/// Learning rate at position t in [0, T] (ValidationError outside).
///   cosine:       lr_min + (lr_max - lr_min) * (1 + cos(pi * t / T)) / 2
///   inverse_sqrt: lr_max / sqrt(1 + (t / T) * ((lr_max / lr_min)^2 - 1)),
///                 exact lr_max at 0 and lr_min at T
///   multi_step:   rate of the last boundary at or before t
///   warmup_cosine: cosine after a linear warm-up
double lr_at(const LrScheduleSpec& spec, double t);

struct CodeMix {
    int raw = 0;
    int related = 0;
    int synthetic = 0;
};

struct StagePlan {
    std::string name;
    std::uint64_t total_tokens = 0;
    int ratio_code = 0;
    int ratio_nlp = 0;
    int ratio_math = 0;
    CodeMix code_mix;
    std::uint64_t batch_size_tokens = 0;
    LrScheduleSpec lr;

    void validate() const;
};

struct StageQuota {
    std::uint64_t code = 0;
    std::uint64_t nlp = 0;
    std::uint64_t math = 0;
    std::uint64_t code_raw = 0;
    std::uint64_t code_related = 0;
    std::uint64_t code_synthetic = 0;
};

/// Integer split of the token budget. Each share is floor(total * pct / 100); the
/// remainder goes to the largest category (first listed on ties), so shares sum to
/// the total exactly. The code budget is split the same way over raw/related/synthetic.
StageQuota stage_quota(const StagePlan& plan);

/// The three pre-training stages: stage1, stage2, annealing.
std::vector<StagePlan> table1_presets();
const StagePlan& table1_stage(std::string_view name);

/// Fine-tuning schedule (SFT or DPO) expressed in optimizer steps.
struct FinetunePlan {
    std::string name;
    std::uint64_t samples = 0;
    std::uint64_t epochs = 0;
    std::uint64_t batch_size = 0;
    std::uint64_t warmup_steps = 0;
    double lr = 0.0;
    double lr_min_fraction = 0.1;

    /// ceil(samples * epochs / batch_size)
    std::uint64_t total_steps() const;
    LrScheduleSpec schedule() const;
};

FinetunePlan sft_preset();
FinetunePlan dpo_preset();

/// seed_count * (K + 1) * N.
std::uint64_t synthesis_expansion(std::uint64_t seed_count, std::uint64_t k, std::uint64_t n);

struct ArchConfig {
    std::string name;
    std::uint64_t layers = 0;
    std::uint64_t d_model = 0;
    std::uint64_t n_attention_heads = 0;
    std::uint64_t n_kv_heads = 0;
    std::uint64_t vocab_size = 0;
    bool tie_embeddings = false;
    std::uint64_t experts_routed = 0;   // 0 means a dense FFN
    std::uint64_t experts_shared = 0;
    std::uint64_t experts_active_routed = 0;
    std::uint64_t d_expert_hidden = 0;  // per-expert (or dense) FFN width
    std::uint64_t ffn_matrices_per_expert = 3;
    std::vector<std::string> assumptions;

    void validate() const;
    bool is_dense() const noexcept { return experts_routed == 0; }
};

/// 28 layers, d_model 2048, 2 shared + 64 routed experts (6 active), expert width
/// 1408, plus the assumed vocabulary and attention layout listed in `assumptions`.
ArchConfig ling_coder_lite_preset();

/// A dense 7B-class reference model for FLOPs comparisons.
ArchConfig dense_7b_preset();

struct ParamBreakdown {
    std::uint64_t embedding = 0;    // input embedding table
    std::uint64_t lm_head = 0;      // 0 when tied
    std::uint64_t attention = 0;    // all layers
    std::uint64_t router = 0;       // all layers
    std::uint64_t experts_total = 0;
    std::uint64_t experts_active = 0;
    std::uint64_t norms = 0;
};

struct BudgetReport {
    ParamBreakdown breakdown;
    std::uint64_t params_total = 0;
    std::uint64_t params_active = 0;
    /// Matrix parameters that take part in one token's forward pass (FLOPs basis).
    std::uint64_t matmul_params_active = 0;
    double flops_per_token = 0.0;  // excluding attention over the context
    std::optional<double> flops_per_inference;
    std::optional<std::uint64_t> context_len;
    std::vector<std::string> assumptions;
};

/// ffn_matrices_per_expert * d_model * d_expert_hidden.
std::uint64_t per_expert_ffn_params(const ArchConfig& cfg);

BudgetReport arch_params(const ArchConfig& cfg);

/// Forward FLOPs of processing a context of `context_len` tokens:
///   sum over positions p = 1..L of (2 * matmul_params_active + 4 * layers * d_model * p)
BudgetReport flops_per_inference(const ArchConfig& cfg, std::uint64_t context_len);

std::string format_report(const BudgetReport& report);

}  // namespace corpuskit
