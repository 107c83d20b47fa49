#include "lexeval/cli.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "lexeval/error.hpp"
#include "lexeval/report.hpp"

namespace lexeval {

namespace {

CorpusFormat corpus_format(const ComputeArgs& args) {
    if (args.format) {
        if (*args.format == "json") return CorpusFormat::json;
        if (*args.format == "jsonl") return CorpusFormat::jsonl;
        throw Error(Errc::config, "unknown corpus format \"" + *args.format + "\"");
    }
    return args.corpus.extension() == ".jsonl" ? CorpusFormat::jsonl : CorpusFormat::json;
}

RunConfig effective_config(const std::optional<std::filesystem::path>& path) {
    if (path) return load_run_config(*path);
    return RunConfig{};
}

}  // namespace

int cmd_compute(const ComputeArgs& args, std::ostream& err) {
    try {
        RunConfig run = effective_config(args.config);
        for (const std::string& metric : args.disable) run.disabled.insert(metric);
        if (args.jobs) run.jobs = *args.jobs;

        const MetricConfig metric_config = build_metric_config(run);
        const std::vector<Document> corpus = load_corpus(args.corpus, corpus_format(args));

        std::vector<MetricVector> results(corpus.size());
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> done{0};
        std::mutex err_mutex;
        std::vector<std::string> failures;

        const std::size_t workers =
            std::max<std::size_t>(1, std::min(run.jobs == 0 ? std::thread::hardware_concurrency()
                                                            : run.jobs,
                                              corpus.size()));
        auto work = [&] {
            while (true) {
                const std::size_t index = next.fetch_add(1);
                if (index >= corpus.size()) return;
                try {
                    results[index] = compute_all(corpus[index], metric_config);
                } catch (const std::exception& e) {
                    std::lock_guard lock(err_mutex);
                    failures.push_back("document \"" + corpus[index].id + "\": " + e.what());
                    continue;
                }
                const std::size_t finished = done.fetch_add(1) + 1;
                std::lock_guard lock(err_mutex);
                err << "computed " << finished << "/" << corpus.size() << "\r";
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(work);
        work();
        for (std::thread& t : pool) t.join();
        err << "\n";

        if (!failures.empty()) {
            for (const std::string& failure : failures) err << "error: " << failure << "\n";
            return 1;
        }
        for (const MetricVector& mv : results) {
            for (const std::string& warning : mv.warnings)
                err << "warning: document \"" << mv.document_id << "\" " << warning << "\n";
        }
        save_metric_vectors(results, args.out);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        RunConfig run = effective_config(args.config);
        if (args.seed) run.seed = *args.seed;
        if (args.bootstrap_samples) run.bootstrap_samples = *args.bootstrap_samples;
        if (args.permutation_samples) run.permutation_samples = *args.permutation_samples;

        const std::vector<MetricVector> metrics = load_metric_vectors(args.metrics);
        const std::vector<ExpertRating> ratings = load_ratings(args.ratings);

        const AnalysisReport report = build_report(metrics, ratings, stats_config(run));
        if (report.dropped_unknown_document_ratings > 0) {
            err << "warning: dropped " << report.dropped_unknown_document_ratings
                << " ratings referencing unknown documents\n";
        }
        std::ofstream file(args.out, std::ios::binary);
        if (!file) throw Error(Errc::io, "cannot write " + args.out.string());
        file << analysis_to_json(report) << "\n";
        out << render_markdown(report);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(args.analysis, std::ios::binary);
        if (!in) throw Error(Errc::io, "cannot open " + args.analysis.string());
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const AnalysisReport report = analysis_from_json(text);
        if (args.format == "markdown") {
            out << render_markdown(report);
        } else if (args.format == "csv") {
            out << render_csv(report);
        } else {
            throw Error(Errc::config, "unknown report format \"" + args.format + "\"");
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Extraction-quality metrics and expert-agreement analysis for judicial decisions"};
    app.require_subcommand(1);

    ComputeArgs compute_args;
    CLI::App* compute = app.add_subcommand("compute", "Compute metric vectors for a corpus");
    compute->add_option("--corpus", compute_args.corpus, "Corpus file (JSON array or JSON lines)")
        ->required();
    std::string compute_config, compute_format;
    compute->add_option("--config", compute_config, "Run configuration file");
    compute->add_option("--out", compute_args.out, "Output metrics file (JSON lines)")->required();
    compute->add_option("--disable", compute_args.disable, "Metric to skip (repeatable)");
    compute->add_option("--format", compute_format, "Corpus format: json or jsonl");
    std::size_t compute_jobs = 0;
    CLI::Option* jobs_opt = compute->add_option("--jobs", compute_jobs, "Worker thread count");

    ValidateArgs validate_args;
    CLI::App* validate = app.add_subcommand("validate", "Score metrics against expert ratings");
    validate->add_option("--metrics", validate_args.metrics, "Metrics file from compute")
        ->required();
    validate->add_option("--ratings", validate_args.ratings, "Expert ratings file")->required();
    std::string validate_config;
    validate->add_option("--config", validate_config, "Run configuration file");
    validate->add_option("--out", validate_args.out, "Output analysis file (JSON)")->required();
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = validate->add_option("--seed", seed, "Resampling seed");
    std::size_t bootstrap = 0;
    CLI::Option* bootstrap_opt =
        validate->add_option("--bootstrap-samples", bootstrap, "Bootstrap resample count");
    std::size_t permutation = 0;
    CLI::Option* permutation_opt =
        validate->add_option("--permutation-samples", permutation, "Permutation resample count");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Render an analysis file as tables");
    report->add_option("--analysis", report_args.analysis, "Analysis file from validate")
        ->required();
    report->add_option("--format", report_args.format, "markdown or csv");

    CLI11_PARSE(app, argc, argv);

    if (compute->parsed()) {
        if (!compute_config.empty()) compute_args.config = compute_config;
        if (!compute_format.empty()) compute_args.format = compute_format;
        if (jobs_opt->count() > 0) compute_args.jobs = compute_jobs;
        return cmd_compute(compute_args, std::cerr);
    }
    if (validate->parsed()) {
        if (!validate_config.empty()) validate_args.config = validate_config;
        if (seed_opt->count() > 0) validate_args.seed = seed;
        if (bootstrap_opt->count() > 0) validate_args.bootstrap_samples = bootstrap;
        if (permutation_opt->count() > 0) validate_args.permutation_samples = permutation;
        return cmd_validate(validate_args, std::cout, std::cerr);
    }
    if (report->parsed()) {
        return cmd_report(report_args, std::cout, std::cerr);
    }
    return 1;
}

}  // namespace lexeval
