#include "corpuskit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "corpuskit/coco.hpp"
#include "corpuskit/code_metrics.hpp"
#include "corpuskit/config.hpp"
#include "corpuskit/dedup.hpp"
#include "corpuskit/errors.hpp"
#include "corpuskit/languages.hpp"
#include "corpuskit/lex_toposort.hpp"
#include "corpuskit/record.hpp"
#include "corpuskit/repo_concat.hpp"
#include "corpuskit/repo_graph.hpp"
#include "corpuskit/rule_filters.hpp"
#include "corpuskit/train_plan.hpp"

namespace corpuskit::cli {

std::size_t StageReport::rejected_total() const {
    std::size_t n = 0;
    for (const auto& [rule, count] : rejected) n += count;
    return n;
}

std::string RunReport::to_json(bool include_wall_time) const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["config_digest"] = config_digest;
    j["malformed_lines"] = malformed_lines;
    auto stages_json = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        nlohmann::ordered_json st;
        st["name"] = s.name;
        st["input"] = s.input;
        st["kept"] = s.kept;
        st["rejected_total"] = s.rejected_total();
        st["rejected"] = nlohmann::ordered_json::object();
        for (const auto& [rule, count] : s.rejected) st["rejected"][rule] = count;
        stages_json.push_back(std::move(st));
    }
    j["stages"] = std::move(stages_json);
    if (include_wall_time) j["wall_time_ms"] = wall_time_ms;
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

namespace {

struct Options {
    std::string config_path;
    std::string report_path;
    std::string input_path;
    std::string output_path;
    std::size_t workers = 1;
    std::vector<std::string> overrides;
    bool dump_config = false;

    // subcommand specific
    std::string clusters_path;
    std::vector<std::string> cascade_stages;
    std::string repo_dir;
    std::string repo_id = "repo";
    bool semantic = false;
    std::string stub_response_path;
    std::string audit_path;
    std::string preset;
    std::string stage;
    std::uint64_t synthesis_seeds = 0;
    std::uint64_t synthesis_k = 7;
    std::uint64_t synthesis_n = 5;
    std::uint64_t context_len = 4096;
    std::string compare;
    std::string pipeline_stages = "filter-source,dedup";
};

struct Context {
    const Options& opt;
    PipelineConfig cfg;
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    RunReport& report;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are written by
// index, so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<CorpusRecord> read_input(Context& ctx) {
    LoadResult loaded;
    if (ctx.opt.input_path.empty() || ctx.opt.input_path == "-") {
        loaded = load_records(ctx.in);
    } else {
        std::ifstream file(ctx.opt.input_path, std::ios::binary);
        if (!file) throw IoError("cannot open input " + ctx.opt.input_path);
        loaded = load_records(file);
    }
    ctx.report.malformed_lines += loaded.malformed_lines;
    for (auto line : loaded.malformed_line_numbers) ctx.err << "warning: skipped malformed line " << line << '\n';
    return std::move(loaded.records);
}

std::string read_text_input(Context& ctx) {
    std::ostringstream buf;
    if (ctx.opt.input_path.empty() || ctx.opt.input_path == "-") {
        buf << ctx.in.rdbuf();
    } else {
        std::ifstream file(ctx.opt.input_path, std::ios::binary);
        if (!file) throw IoError("cannot open input " + ctx.opt.input_path);
        buf << file.rdbuf();
    }
    return buf.str();
}

// Writes to --output (atomically replaced) or the output stream.
class Sink {
public:
    explicit Sink(Context& ctx) : ctx_(ctx) {}

    std::ostream& stream() { return ctx_.opt.output_path.empty() || ctx_.opt.output_path == "-" ? ctx_.out : buf_; }

    void commit() {
        if (ctx_.opt.output_path.empty() || ctx_.opt.output_path == "-") {
            ctx_.out.flush();
            if (!ctx_.out) throw IoError("cannot write output stream");
            return;
        }
        std::ofstream file(ctx_.opt.output_path, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open output " + ctx_.opt.output_path);
        file << buf_.str();
        file.close();
        if (!file) throw IoError("cannot write output " + ctx_.opt.output_path);
    }

private:
    Context& ctx_;
    std::ostringstream buf_;
};

void write_records(Context& ctx, const std::vector<CorpusRecord>& records) {
    Sink sink(ctx);
    for (const auto& r : records) write_record(r, sink.stream());
    sink.commit();
}

void write_text(Context& ctx, const std::string& text) {
    Sink sink(ctx);
    sink.stream() << text;
    sink.commit();
}

StageReport from_filter_report(std::string name, const FilterReport& fr) {
    return {std::move(name), fr.input, fr.kept, fr.rejected_by_rule};
}

// ---------------------------------------------------------------------------
// Record stages (shared by single-stage subcommands and `pipeline`)

using RecordStage = std::vector<CorpusRecord> (*)(Context&, std::vector<CorpusRecord>);

std::vector<CorpusRecord> rule_stage(Context& ctx, std::vector<CorpusRecord> records, bool source) {
    std::vector<FilterVerdict> verdicts(records.size());
    parallel_for(records.size(), ctx.opt.workers, [&](std::size_t i) {
        verdicts[i] = source ? filter_source(records[i], ctx.cfg) : filter_text(records[i], ctx.cfg);
    });
    FilterReport fr;
    std::vector<CorpusRecord> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        fr.add(verdicts[i]);
        if (verdicts[i].keep) kept.push_back(std::move(records[i]));
    }
    ctx.report.stages.push_back(from_filter_report(source ? "filter-source" : "filter-text", fr));
    return kept;
}

std::vector<CorpusRecord> filter_source_stage(Context& ctx, std::vector<CorpusRecord> records) {
    return rule_stage(ctx, std::move(records), true);
}

std::vector<CorpusRecord> filter_text_stage(Context& ctx, std::vector<CorpusRecord> records) {
    return rule_stage(ctx, std::move(records), false);
}

NearDedupParams dedup_params(const PipelineConfig& cfg) {
    NearDedupParams p;
    p.minhash.num_perm = cfg.dedup_num_perm;
    p.minhash.shingle_k = cfg.dedup_shingle_k;
    p.minhash.seed = cfg.dedup_seed;
    p.bands = cfg.dedup_bands;
    p.rows = cfg.dedup_rows;
    p.threshold = cfg.dedup_threshold;
    return p;
}

std::vector<CorpusRecord> dedup_stage(Context& ctx, std::vector<CorpusRecord> records) {
    const auto params = dedup_params(ctx.cfg);
    std::vector<DedupItem> items(records.size());
    parallel_for(records.size(), ctx.opt.workers, [&](std::size_t i) {
        items[i] = {records[i].id, content_digest(records[i].content),
                    minhash_signature(records[i].content, params.minhash)};
    });
    const auto result = near_dedup_items(std::move(items), params);
    if (!ctx.opt.clusters_path.empty()) {
        std::ofstream file(ctx.opt.clusters_path, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open clusters file " + ctx.opt.clusters_path);
        file << format_cluster_report(result);
    }
    std::vector<CorpusRecord> kept;
    for (auto& r : records) {
        if (std::binary_search(result.kept.begin(), result.kept.end(), r.id)) kept.push_back(std::move(r));
    }
    StageReport st{"dedup", records.size(), kept.size(), {}};
    if (!result.removed.empty()) st.rejected["near_duplicate"] = result.removed.size();
    ctx.report.stages.push_back(std::move(st));
    return kept;
}

std::string tristate_name(Tristate t) {
    switch (t) {
        case Tristate::yes: return "yes";
        case Tristate::no: return "no";
        case Tristate::unknown: return "unknown";
    }
    return "unknown";
}

std::vector<CorpusRecord> metrics_stage(Context& ctx, std::vector<CorpusRecord> records) {
    static const SyntaxRegistry syntax = SyntaxRegistry::with_defaults();
    static const ScorerRegistry scorers = ScorerRegistry::with_defaults();
    const auto* quality = scorers.find("quality");
    parallel_for(records.size(), ctx.opt.workers, [&](std::size_t i) {
        auto& r = records[i];
        std::optional<std::string> lang;
        if (r.language) lang = canonical_language(*r.language);
        if (!lang && r.path) {
            if (const auto* info = language_for_path(*r.path)) lang = info->tag;
        }
        if (lang) {
            const auto m = compute_code_metrics(r.content, *lang, syntax);
            r.meta["comment_ratio"] = m.comment_ratio;
            r.meta["effective_loc"] = static_cast<std::int64_t>(m.effective_loc);
            r.meta["syntax_valid"] = tristate_name(m.syntax_valid);
        }
        r.meta["quality_score"] = quality_score(r, *quality);
    });
    ctx.report.stages.push_back({"metrics", records.size(), records.size(), {}});
    return records;
}

std::vector<CorpusRecord> cascade_stage(Context& ctx, std::vector<CorpusRecord> records) {
    std::vector<CascadeStage> stages;
    if (ctx.opt.cascade_stages.empty()) {
        stages = web_recall_stages();
    } else {
        for (const auto& s : ctx.opt.cascade_stages) stages.push_back(parse_cascade_stage(s));
    }
    const auto result = score_cascade(records, stages, ScorerRegistry::with_defaults());
    for (const auto& sc : result.stages) {
        StageReport st{"cascade:" + sc.stage, sc.input, sc.kept, {}};
        if (sc.removed) st.rejected[sc.stage] = sc.removed;
        ctx.report.stages.push_back(std::move(st));
    }
    std::vector<CorpusRecord> kept;
    std::size_t k = 0;
    for (auto& r : records) {
        if (k < result.kept.size() && result.kept[k] == r.id) {
            kept.push_back(std::move(r));
            ++k;
        }
    }
    return kept;
}

RecordStage record_stage(std::string_view name) {
    if (name == "filter-source") return filter_source_stage;
    if (name == "filter-text") return filter_text_stage;
    if (name == "dedup") return dedup_stage;
    if (name == "metrics") return metrics_stage;
    if (name == "cascade") return cascade_stage;
    throw UsageError("unknown pipeline stage '" + std::string(name) +
                     "' (expected filter-source, filter-text, dedup, metrics or cascade)");
}

void run_record_stages(Context& ctx, const std::vector<std::string>& names) {
    std::vector<RecordStage> stages;
    for (const auto& n : names) stages.push_back(record_stage(n));
    auto records = read_input(ctx);
    for (auto stage : stages) records = stage(ctx, std::move(records));
    write_records(ctx, records);
}

// ---------------------------------------------------------------------------
// Repository subcommands

std::vector<RepoSnapshot> input_repos(Context& ctx) {
    if (!ctx.opt.repo_dir.empty()) return {snapshot_from_directory(ctx.opt.repo_dir, ctx.opt.repo_id)};
    return snapshots_from_records(read_input(ctx));
}

void cmd_repo_graph(Context& ctx) {
    const auto repos = input_repos(ctx);
    std::ostringstream text;
    StageReport st{"repo-graph", repos.size(), 0, {}};
    for (const auto& repo : repos) {
        const auto built = build_graph(repo);
        text << "# repo: " << repo.repo_id << '\n';
        for (const auto& node : built.graph.nodes) text << node.path << '\n';
        for (const auto& [u, v] : built.graph.edges) {
            text << built.graph.nodes[u].path << '\t' << built.graph.nodes[v].path << '\n';
        }
        ++st.kept;
    }
    ctx.report.stages.push_back(std::move(st));
    write_text(ctx, text.str());
}

struct SerializedGraph {
    std::string repo;
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
};

std::vector<SerializedGraph> parse_graphs(std::string_view text) {
    std::vector<SerializedGraph> graphs;
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.starts_with("# repo:")) {
            auto id = line.substr(7);
            while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
            graphs.push_back({std::string(id), {}, {}});
            continue;
        }
        if (line.starts_with('#')) continue;
        if (graphs.empty()) graphs.emplace_back();
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            graphs.back().nodes.push_back(normalize_path(line));
            continue;
        }
        if (line.find('\t', tab + 1) != std::string_view::npos) {
            throw ParseError("graph line " + std::to_string(line_no) + ": expected 'u<TAB>v'");
        }
        graphs.back().edges.emplace_back(normalize_path(line.substr(0, tab)), normalize_path(line.substr(tab + 1)));
    }
    return graphs;
}

void cmd_toposort(Context& ctx) {
    const auto graphs = parse_graphs(read_text_input(ctx));
    std::ostringstream text;
    StageReport st{"toposort", graphs.size(), 0, {}};
    for (const auto& g : graphs) {
        const auto graph = make_graph(g.nodes, g.edges);
        const auto topo = lex_topo_sort(graph);
        nlohmann::ordered_json j;
        j["repo"] = g.repo;
        j["order"] = nlohmann::ordered_json::array();
        for (auto id : topo.order) j["order"].push_back(graph.nodes[id].path);
        j["cycle_broken"] = nlohmann::ordered_json::array();
        for (auto id : topo.cycle_broken) j["cycle_broken"].push_back(graph.nodes[id].path);
        text << j.dump() << '\n';
        ++st.kept;
    }
    ctx.report.stages.push_back(std::move(st));
    write_text(ctx, text.str());
}

void cmd_repo_concat(Context& ctx) {
    const auto repos = input_repos(ctx);
    std::vector<std::optional<RepoDocument>> docs(repos.size());
    std::vector<std::string> failures(repos.size());
    parallel_for(repos.size(), ctx.opt.workers, [&](std::size_t i) {
        try {
            docs[i] = build_repo_document(repos[i], ctx.cfg);
        } catch (const UsageError& e) {
            failures[i] = e.what();
        }
    });
    FilterReport fr;
    std::vector<CorpusRecord> kept;
    for (std::size_t i = 0; i < repos.size(); ++i) {
        if (!docs[i]) {
            ctx.err << "warning: " << failures[i] << '\n';
            fr.add(FilterVerdict::reject("repo_unsupported"));
            continue;
        }
        fr.add(docs[i]->verdict);
        if (docs[i]->verdict.keep) kept.push_back(std::move(docs[i]->record));
    }
    ctx.report.stages.push_back(from_filter_report("repo-concat", fr));
    write_records(ctx, kept);
}

// ---------------------------------------------------------------------------
// COCO

void cmd_coco(Context& ctx) {
    auto records = read_input(ctx);
    std::vector<CocoPair> pairs;
    pairs.reserve(records.size());
    for (const auto& r : records) pairs.push_back(coco_from_record(r));

    std::unordered_set<std::string> seen;
    FilterReport fr;
    std::vector<CocoPair> survivors;
    for (auto& p : pairs) {
        const auto v = sanitize_rules(p, seen, ctx.cfg);
        fr.add(v);
        if (v.keep) survivors.push_back(std::move(p));
    }
    ctx.report.stages.push_back(from_filter_report("coco-rules", fr));

    if (ctx.opt.semantic) {
        std::unique_ptr<ScoringClient> client;
        if (!ctx.opt.stub_response_path.empty()) {
            std::ifstream file(ctx.opt.stub_response_path, std::ios::binary);
            if (!file) throw IoError("cannot open stub response " + ctx.opt.stub_response_path);
            std::ostringstream buf;
            buf << file.rdbuf();
            client = std::make_unique<StubScoringClient>([canned = buf.str()](const std::string&) { return canned; });
        } else {
            if (ctx.cfg.scorer_endpoint.empty()) {
                throw ValidationError("scorer_endpoint", "required for --semantic without --stub-response");
            }
            client = make_http_scoring_client(ScoringClientConfig::from_pipeline(ctx.cfg));
        }
        const auto result =
            semantic_filter(survivors, *client, {ctx.cfg.scorer_max_retries, ctx.cfg.scorer_concurrency});
        StageReport st{"coco-semantic", survivors.size(), result.kept.size(), {}};
        for (auto outcome : {PairOutcome::dropped_inconsistent, PairOutcome::dropped_unparseable, PairOutcome::deferred}) {
            if (auto n = result.count(outcome)) st.rejected[std::string(to_string(outcome))] = n;
        }
        ctx.report.stages.push_back(std::move(st));
        if (!ctx.opt.audit_path.empty()) {
            std::ofstream file(ctx.opt.audit_path, std::ios::binary | std::ios::trunc);
            if (!file) throw IoError("cannot open audit file " + ctx.opt.audit_path);
            write_audit(result.audit, file);
        }
        survivors = result.kept;
    }

    std::vector<CorpusRecord> out;
    out.reserve(survivors.size());
    for (const auto& p : survivors) out.push_back(coco_to_record(p));
    write_records(ctx, out);
}

// ---------------------------------------------------------------------------
// Calculators

std::string human_tokens(std::uint64_t n) {
    std::ostringstream s;
    const double v = static_cast<double>(n);
    if (n >= 1'000'000'000'000ULL) {
        s << std::setprecision(6) << v / 1e12 << "T";
    } else if (n >= 1'000'000'000ULL) {
        s << std::setprecision(6) << v / 1e9 << "B";
    } else if (n >= 1'000'000ULL) {
        s << std::setprecision(6) << v / 1e6 << "M";
    } else {
        s << n;
    }
    return s.str();
}

void print_lr(std::ostream& s, const LrScheduleSpec& lr) {
    s << "lr " << to_string(lr.kind) << ' ' << lr.lr_max << " ~ " << lr.lr_min << " over " << lr.horizon;
    if (lr.warmup_steps) s << " (warmup " << *lr.warmup_steps << ")";
    s << '\n';
}

void cmd_plan(Context& ctx) {
    std::ostringstream s;
    const auto& o = ctx.opt;
    if (o.synthesis_seeds > 0) {
        s << "synthesis_expansion " << o.synthesis_seeds << " x (" << o.synthesis_k << "+1) x " << o.synthesis_n << " = "
          << synthesis_expansion(o.synthesis_seeds, o.synthesis_k, o.synthesis_n) << '\n';
    }
    if (o.preset == "table1") {
        std::vector<StagePlan> plans;
        if (o.stage.empty()) {
            plans = table1_presets();
        } else {
            plans.push_back(table1_stage(o.stage));
        }
        for (const auto& p : plans) {
            const auto q = stage_quota(p);
            s << "stage " << p.name << '\n'
              << "total_tokens " << p.total_tokens << " (" << human_tokens(p.total_tokens) << ")\n"
              << "batch_size_tokens " << p.batch_size_tokens << " (" << human_tokens(p.batch_size_tokens) << ")\n";
            print_lr(s, p.lr);
            s << "code " << q.code << " (" << human_tokens(q.code) << ", " << p.ratio_code << "%)\n"
              << "nlp " << q.nlp << " (" << human_tokens(q.nlp) << ", " << p.ratio_nlp << "%)\n"
              << "math " << q.math << " (" << human_tokens(q.math) << ", " << p.ratio_math << "%)\n"
              << "code_raw " << q.code_raw << " (" << human_tokens(q.code_raw) << ", " << p.code_mix.raw << "%)\n"
              << "code_related " << q.code_related << " (" << human_tokens(q.code_related) << ", " << p.code_mix.related
              << "%)\n"
              << "code_synthetic " << q.code_synthetic << " (" << human_tokens(q.code_synthetic) << ", "
              << p.code_mix.synthetic << "%)\n";
        }
    } else if (o.preset == "sft" || o.preset == "dpo") {
        const auto p = o.preset == "sft" ? sft_preset() : dpo_preset();
        s << "plan " << p.name << '\n'
          << "samples " << p.samples << '\n'
          << "epochs " << p.epochs << '\n'
          << "batch_size " << p.batch_size << '\n'
          << "total_steps " << p.total_steps() << '\n';
        print_lr(s, p.schedule());
    } else if (!o.preset.empty()) {
        throw UsageError("unknown plan preset '" + o.preset + "' (expected table1, sft or dpo)");
    } else if (o.synthesis_seeds == 0) {
        throw UsageError("plan needs --preset or --synthesis");
    }
    write_text(ctx, s.str());
}

ArchConfig arch_preset(std::string_view name) {
    if (name == "ling" || name == "ling-coder-lite") return ling_coder_lite_preset();
    if (name == "dense-7b") return dense_7b_preset();
    throw UsageError("unknown architecture preset '" + std::string(name) + "' (expected ling or dense-7b)");
}

void cmd_budget(Context& ctx) {
    const auto cfg = arch_preset(ctx.opt.preset.empty() ? "ling" : ctx.opt.preset);
    const auto report = flops_per_inference(cfg, ctx.opt.context_len);
    std::ostringstream s;
    s << "model " << cfg.name << '\n' << format_report(report);
    if (!ctx.opt.compare.empty()) {
        const auto other_cfg = arch_preset(ctx.opt.compare);
        const auto other = flops_per_inference(other_cfg, ctx.opt.context_len);
        s << "model " << other_cfg.name << '\n' << format_report(other);
        s << "flops_ratio " << cfg.name << '/' << other_cfg.name << ' '
          << *report.flops_per_inference / *other.flops_per_inference << '\n';
    }
    write_text(ctx, s.str());
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

PipelineConfig resolve_config(const Options& opt) {
    PipelineConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream file(opt.config_path, std::ios::binary);
        if (!file) throw IoError("cannot open config " + opt.config_path);
        std::ostringstream buf;
        buf << file.rdbuf();
        cfg = load_config(buf.str());
    }
    for (const auto& o : opt.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw UsageError("--threshold expects KEY=VALUE, got '" + o + "'");
        apply_config_override(cfg, o.substr(0, eq), o.substr(eq + 1));
    }
    return cfg;
}

void write_report(const Options& opt, const RunReport& report, std::ostream& err) {
    if (opt.report_path.empty()) return;
    std::ofstream file(opt.report_path, std::ios::binary | std::ios::trunc);
    if (file) file << report.to_json();
    if (!file) err << "error: cannot write report " << opt.report_path << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    Options opt;
    CLI::App app{"Code and text corpus curation toolkit", "corpuskit"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.add_option("--config", opt.config_path, "Pipeline config file (key = value)");
    app.add_option("--report", opt.report_path, "Where to write the run report (JSON)");
    app.add_option("--input,-i", opt.input_path, "Input file (default: stdin)");
    app.add_option("--output,-o", opt.output_path, "Output file (default: stdout)");
    app.add_option("--workers,-j", opt.workers, "Worker threads per stage")->check(CLI::Range(1, 1024));
    app.add_option("--threshold", opt.overrides, "Config override KEY=VALUE (repeatable)");
    app.add_flag("--dump-config", opt.dump_config, "Print the resolved config and exit");

    app.add_subcommand("filter-source", "Heuristic rules for source files");
    app.add_subcommand("filter-text", "Heuristic rules for text documents");
    app.add_subcommand("dedup", "MinHash near-deduplication")
        ->add_option("--clusters", opt.clusters_path, "Write kept<TAB>removed pairs here");
    app.add_subcommand("metrics", "Annotate records with code metrics");
    app.add_subcommand("cascade", "Score cascade (default: meta.llm_score>=3 then meta.classifier_score==5)")
        ->add_option("--stage", opt.cascade_stages, "Stage such as quality>=0.5 (repeatable, in order)");
    for (auto name : {"repo-graph", "repo-concat"}) {
        auto* sub = app.add_subcommand(name, name == std::string("repo-graph") ? "Import dependency graph per repository"
                                                                             : "Concatenate repositories in dependency order");
        sub->add_option("--dir", opt.repo_dir, "Read one repository from a directory instead of records");
        sub->add_option("--repo-id", opt.repo_id, "Repository id used with --dir");
    }
    app.add_subcommand("toposort", "Order serialized graphs (lines 'u<TAB>v', '# repo: id')");
    auto* coco = app.add_subcommand("coco", "Code-comment pair sanitization");
    coco->add_flag("--semantic", opt.semantic, "Also run the consistency judge");
    coco->add_option("--stub-response", opt.stub_response_path, "Answer every judge prompt with this file's text");
    coco->add_option("--audit", opt.audit_path, "Write judge transcripts here");
    auto* plan = app.add_subcommand("plan", "Training-plan calculators");
    plan->add_option("--preset", opt.preset, "table1, sft or dpo");
    plan->add_option("--stage", opt.stage, "stage1, stage2 or annealing (table1)");
    plan->add_option("--synthesis", opt.synthesis_seeds, "Seed count for the synthesis expansion");
    plan->add_option("--k", opt.synthesis_k, "Evolution rounds K");
    plan->add_option("--n", opt.synthesis_n, "Problems per evolved seed N");
    auto* budget = app.add_subcommand("budget", "Parameter and FLOPs budget");
    budget->add_option("--preset", opt.preset, "ling or dense-7b");
    budget->add_option("--context", opt.context_len, "Context length")->check(CLI::PositiveNumber);
    budget->add_option("--compare", opt.compare, "Second preset for a FLOPs ratio");
    app.add_subcommand("pipeline", "Several record stages in one run")
        ->add_option("--stages", opt.pipeline_stages, "Comma separated stages (default filter-source,dedup)");

    RunReport report;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    if (app.get_subcommands().empty() && !opt.dump_config) {
        err << "error: A subcommand is required\n\n" << app.help();
        return kExitValidation;
    }
    const std::string sub = app.get_subcommands().empty() ? "dump-config" : app.get_subcommands().front()->get_name();
    report.subcommand = sub;
    int code = kExitOk;
    try {
        Context ctx{opt, resolve_config(opt), in, out, err, report};
        report.config_digest = content_digest(ctx.cfg.to_text());
        if (opt.dump_config) {
            out << ctx.cfg.to_text();
        } else if (sub == "filter-source" || sub == "filter-text" || sub == "dedup" || sub == "metrics" ||
                   sub == "cascade") {
            run_record_stages(ctx, {sub});
        } else if (sub == "pipeline") {
            run_record_stages(ctx, split_list(opt.pipeline_stages));
        } else if (sub == "repo-graph") {
            cmd_repo_graph(ctx);
        } else if (sub == "toposort") {
            cmd_toposort(ctx);
        } else if (sub == "repo-concat") {
            cmd_repo_concat(ctx);
        } else if (sub == "coco") {
            cmd_coco(ctx);
        } else if (sub == "plan") {
            cmd_plan(ctx);
        } else if (sub == "budget") {
            cmd_budget(ctx);
        }
    } catch (const IoError& e) {
        report.status = "io_error";
        report.error = e.what();
        code = kExitIo;
    } catch (const std::exception& e) {
        report.status = "validation_error";
        report.error = e.what();
        code = kExitValidation;
    }
    if (code != kExitOk) err << "error: " << report.error << '\n';
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    write_report(opt, report, err);
    return code;
}

}  // namespace corpuskit::cli
