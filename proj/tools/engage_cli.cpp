// engage: command-line front end.
//
//   engage priors build --corpus <file> --out <priors.json> [--classify-backend stub|remote]
//   engage experiment run --config <file> --out <dir>
//   engage experiment report --in <dir>
//   engage corpus synth --out <file> [--seed N] [--junk-rate R]
//   engage corpus report --corpus <file>
//   engage score <text>
//   engage serve
//
// A global --config <app.json> selects data paths, LLM endpoint and service
// settings. LLM credentials come from the environment only.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "engage/config.hpp"
#include "engage/corpus.hpp"
#include "engage/corpus_report.hpp"
#include "engage/experiment.hpp"
#include "engage/policy.hpp"
#include "engage/prior_learning.hpp"
#include "engage/service.hpp"
#include "engage/synthetic.hpp"

namespace fs = std::filesystem;
using namespace engage;

namespace {

nlohmann::json read_json_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

int priors_build(const AppConfig& app, const fs::path& corpus, const fs::path& out, const std::string& backend,
                 const std::optional<fs::path>& report_path) {
    PriorsBuildReport report;
    const auto table = build_priors(corpus, *make_scorer(app), *make_action_classifier(app, backend), &report);
    save_priors(table, out);
    const auto rj = to_json(report);
    if (report_path) write_text(*report_path, rj.dump(2) + "\n");
    std::cerr << rj.dump(2) << "\n";
    std::cout << "wrote " << out.string() << " (" << report.pairs << " pairs)\n";
    return 0;
}

ExperimentBackends experiment_backends(const AppConfig& app, const ExperimentConfig& cfg,
                                       const std::optional<fs::path>& priors_path) {
    ExperimentBackends b;
    b.priors = std::make_shared<const EvTable>(load_priors(priors_path ? *priors_path : app.data_dir / "priors" / "historical.json"));
    b.scorer = make_scorer(app);
    if (cfg.remote_generator || cfg.respondent == RespondentBackend::remote) {
        AppConfig remote = app;
        remote.llm = cfg.llm;
        auto client = make_chat_client(remote);
        if (cfg.remote_generator) b.generator = std::make_shared<LlmQuestionGenerator>(client, app.generator_temperature);
        if (cfg.respondent == RespondentBackend::remote)
            b.respondent_factory = [client](const SimulatedProfile& p, std::uint64_t) {
                return std::make_unique<LlmRespondent>(client, p);
            };
    }
    return b;
}

int experiment_run(const AppConfig& app, const fs::path& config_path, const fs::path& out_dir,
                   std::optional<std::size_t> threads) {
    auto j = read_json_file(config_path);
    auto cfg = experiment_config_from_json(j);
    if (threads) cfg.threads = *threads;
    std::optional<fs::path> priors;
    if (j.contains("priors")) {
        priors = fs::path(j.at("priors").get<std::string>());
        if (priors->is_relative()) priors = config_path.parent_path() / *priors;
    }
    const auto runs = run_grid(cfg, experiment_backends(app, cfg, priors));
    const auto result = write_experiment(out_dir, cfg, runs);
    std::cout << render_tables(result);
    return result.at("counts").at("failed").get<std::size_t>() == runs.size() ? 1 : 0;
}

int experiment_report(const fs::path& in_dir) {
    auto [cfg, runs] = read_experiment(in_dir);
    const auto result = aggregate(cfg, runs);
    write_text(in_dir / "report.json", result.dump(2) + "\n");
    std::cout << render_tables(result);
    return 0;
}

int corpus_synth(const fs::path& out, std::uint64_t seed, double junk_rate) {
    SyntheticCorpusSpec spec;
    spec.seed = seed;
    spec.duplicate_rate = spec.placeholder_rate = spec.missing_rate = spec.zero_word_rate = junk_rate;
    const auto corpus = generate_synthetic_corpus(spec);
    write_corpus(out, corpus.raw);
    std::cout << nlohmann::json{{"conversations", corpus.clean.size()}, {"planted", to_json(corpus.planted)}}.dump(2)
              << "\n";
    return 0;
}

int corpus_summary(const AppConfig& app, const fs::path& corpus) {
    const auto ingested = ingest_corpus(corpus);
    const auto scorer = make_scorer(app);
    std::vector<QualityScore> scores;
    std::vector<std::vector<double>> per_conversation;
    for (const auto& c : ingested.conversations) {
        auto& q = per_conversation.emplace_back();
        for (const auto& e : c.exchanges) {
            scores.push_back(scorer->score(e.user_response));
            q.push_back(scores.back().composite);
        }
    }
    nlohmann::json out = {{"conversations", ingested.conversations.size()},
                          {"responses", ingested.responses()},
                          {"exclusions", to_json(ingested.exclusions)},
                          {"quality", to_json(corpus_report(scores))},
                          {"states", to_json(state_distribution(per_conversation))}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int score_text(const AppConfig& app, const std::string& text) {
    const auto s = make_scorer(app)->score(text);
    std::cout << nlohmann::json{{"quality", s.composite}, {"components", to_json(s.components)}}.dump(2) << "\n";
    return 0;
}

SurveyService* g_service = nullptr;

int serve(const AppConfig& app) {
    std::shared_ptr<const EvTable> priors;
    if (app.service.priors) {
        try {
            priors = std::make_shared<const EvTable>(load_priors(*app.service.priors));
        } catch (const std::exception& e) {
            std::cerr << "warning: " << e.what() << "; sessions will be refused\n";
        }
    } else {
        std::cerr << "warning: no priors configured; sessions will be refused\n";
    }
    SurveyService service(app.service, priors, make_scorer(app), make_generator(app));
    const int port = service.bind();
    std::cerr << "listening on " << app.service.host << ":" << port << "\n";
    g_service = &service;
    std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_service) g_service->stop();
    });
    service.listen();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Adaptive survey dialogue engine"};
    cli.require_subcommand(1);
    std::optional<std::string> config_path;
    cli.add_option("--config", config_path, "Application config (JSON)");

    auto* priors = cli.add_subcommand("priors", "Offline priors");
    priors->require_subcommand(1);
    auto* build = priors->add_subcommand("build", "Compute EV priors from a labelled corpus");
    std::string corpus_file, priors_out, classify_backend = "stub";
    std::optional<std::string> build_report;
    build->add_option("--corpus", corpus_file, "Corpus (JSON lines)")->required();
    build->add_option("--out", priors_out, "Output priors file")->required();
    build->add_option("--classify-backend", classify_backend, "Labels for unlabelled questions")
        ->check(CLI::IsMember({"stub", "remote"}));
    build->add_option("--report", build_report, "Write the build report (JSON) here");

    auto* experiment = cli.add_subcommand("experiment", "Simulation experiments");
    experiment->require_subcommand(1);
    auto* run = experiment->add_subcommand("run", "Run an experiment grid");
    std::string exp_config, exp_out;
    std::optional<std::size_t> threads;
    run->add_option("--config", exp_config, "Experiment config (JSON)")->required();
    run->add_option("--out", exp_out, "Output directory")->required();
    run->add_option("--threads", threads, "Worker threads");
    auto* report = experiment->add_subcommand("report", "Recompute tables from an experiment directory");
    std::string exp_in;
    report->add_option("--in", exp_in, "Experiment directory")->required();

    auto* corpus = cli.add_subcommand("corpus", "Corpus utilities");
    corpus->require_subcommand(1);
    auto* synth = corpus->add_subcommand("synth", "Write a synthetic corpus");
    std::string synth_out;
    std::uint64_t synth_seed = 20241015;
    double junk_rate = 0.0;
    synth->add_option("--out", synth_out, "Output corpus")->required();
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--junk-rate", junk_rate, "Planted junk rows per exchange, per rule")->check(CLI::Range(0.0, 1.0));
    auto* creport = corpus->add_subcommand("report", "Quality and state distribution of a corpus");
    std::string report_corpus;
    creport->add_option("--corpus", report_corpus, "Corpus (JSON lines)")->required();

    auto* score = cli.add_subcommand("score", "Score one response");
    std::string score_input;
    score->add_option("text", score_input, "Response text")->required();

    auto* serve_cmd = cli.add_subcommand("serve", "Run the HTTP service");
    std::optional<int> port;
    serve_cmd->add_option("--port", port, "Override the configured port");

    CLI11_PARSE(cli, argc, argv);

    try {
        AppConfig app = load_app_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt);
        if (build->parsed()) return priors_build(app, corpus_file, priors_out, classify_backend,
                                                 build_report ? std::optional<fs::path>(*build_report) : std::nullopt);
        if (run->parsed()) return experiment_run(app, exp_config, exp_out, threads);
        if (report->parsed()) return experiment_report(exp_in);
        if (synth->parsed()) return corpus_synth(synth_out, synth_seed, junk_rate);
        if (creport->parsed()) return corpus_summary(app, report_corpus);
        if (score->parsed()) return score_text(app, score_input);
        if (serve_cmd->parsed()) {
            if (port) app.service.port = *port;
            return serve(app);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << " (line " << e.line() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
