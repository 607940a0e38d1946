#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <random>

#include "scribe/engine.hpp"
#include "scribe/errors.hpp"
#include "scribe/persistence.hpp"
#include "scribe/service.hpp"

namespace fs = std::filesystem;
using namespace scribe;

namespace {

struct Globals {
    std::string data_dir = "scribe-data";
    std::string provider;
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string session;
};

ServiceConfig resolve_config(const Globals& g, const CLI::App& app) {
    ServiceConfig config = g.config_path.empty() ? ServiceConfig{} : load_service_config(g.config_path);
    if (g.config_path.empty() || app.count("--data-dir") > 0) config.data_dir = g.data_dir;
    if (!g.provider.empty()) config.provider.kind = provider_kind_from_string(g.provider);
    return config;
}

PromptConfig prompt_config(const ServiceConfig& config) {
    PromptConfig prompt;
    prompt.limits = config.limits;
    prompt.context_budget = config.context_budget;
    prompt.safety_margin = config.safety_margin;
    if (config.templates_dir) prompt.templates.load_overrides(*config.templates_dir);
    return prompt;
}

Engine make_engine(const ServiceConfig& config, std::uint64_t seed) {
    auto providers = make_providers(config.provider, seed);
    return Engine(std::move(providers.chat), std::move(providers.embedder),
                  engine_config_for(config.provider, prompt_config(config)));
}

fs::path current_file(const ServiceConfig& config) {
    return config.data_dir / "CURRENT";
}

std::string resolve_session(const Globals& g, const ServiceConfig& config) {
    if (!g.session.empty()) return g.session;
    std::ifstream in(current_file(config));
    std::string id;
    if (!(in >> id)) {
        throw Error(ErrorCode::session_not_found, "no --session given and no current session in " +
                                                      config.data_dir.string());
    }
    return id;
}

void print_state(const SessionState& state) {
    std::cout << "session " << state.id << "  step " << state.step << "  mode " << to_string(state.meta.mode)
              << "\n\n[content t=" << state.last_content().timestep() << ", "
              << state.last_content().word_count() << " words]\n"
              << state.last_content().text() << "\n\n[short-term memory, " << state.short_term.sentence_count()
              << " sentences]\n"
              << state.short_term.text() << "\n";
    if (!state.pending_plans.empty()) {
        std::cout << "\n[plans]\n";
        for (std::size_t i = 0; i < state.pending_plans.size(); ++i) {
            const auto& plan = state.pending_plans[i];
            std::cout << i + 1 << ". (" << to_string(plan.origin()) << ") " << plan.text() << "\n";
        }
    }
}

void print_warnings(const ValidationReport& report) {
    for (const auto& v : report.violations) {
        std::cerr << "warning: " << v.field << " is " << v.actual << ", outside " << v.limit.min << ".."
                  << v.limit.max << "\n";
    }
}

std::uint64_t fresh_seed() {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recurrent-scribe: long-form text generation with recurrent natural-language state"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--data-dir", g.data_dir, "Directory holding sessions")->capture_default_str();
    app.add_option("--provider", g.provider, "Backend: mock or http")->check(CLI::IsMember({"mock", "http", "http-chat"}));
    app.add_option("--seed", g.seed, "Seed for a new session and the mock provider");
    app.add_option("--config", g.config_path, "Service/provider config file (JSON)");
    app.add_option("--session", g.session, "Session id (defaults to the last one created)");

    SessionMeta meta;
    std::string mode = "writer";
    std::string perspective;
    std::string short_term;
    std::string initial_plan;
    std::size_t plan_count = 0;
    std::size_t retrieval_k = 0;
    auto* init = app.add_subcommand("init", "Create a session and generate its opening");
    init->add_option("--title", meta.title, "Title");
    init->add_option("--genre", meta.genre, "Genre label");
    init->add_option("--background", meta.background, "Background premise")->required();
    init->add_option("--mode", mode, "writer, fiction or autonomous")
        ->check(CLI::IsMember({"writer", "fiction", "autonomous"}));
    init->add_option("--perspective", perspective, "third-person or first-person")
        ->check(CLI::IsMember({"third-person", "first-person"}));
    init->add_option("--short-term", short_term, "Supply the initial short-term memory");
    init->add_option("--plan", initial_plan, "Supply the initial plan");
    init->add_option("--plan-count", plan_count, "Plans per step")->check(CLI::Range(1, 10));
    init->add_option("--retrieval-k", retrieval_k, "Retrieved memories per step")->check(CLI::Range(1, 100));

    auto* show = app.add_subcommand("show", "Print the current state");

    std::size_t plan_index = 0;
    std::string plan_text;
    auto* step = app.add_subcommand("step", "Advance one step with a chosen or written plan");
    auto* index_opt = step->add_option("--plan-index", plan_index, "1-based pending plan")->check(CLI::PositiveNumber);
    auto* text_opt = step->add_option("--plan-text", plan_text, "Your own plan");
    index_opt->excludes(text_opt);
    step->require_option(1);

    std::size_t n_steps = 0;
    auto* run = app.add_subcommand("run", "Advance autonomously");
    run->add_option("--steps", n_steps, "Number of steps")->required();

    std::string op;
    std::string edit_text;
    std::size_t edit_index = 0;
    auto* edit = app.add_subcommand("edit", "Edit the short-term memory, a pending plan or the last content");
    edit->add_option("--op", op, "replace_short_term, replace_plan or replace_last_content")
        ->required()
        ->check(CLI::IsMember({"replace_short_term", "replace_plan", "replace_last_content"}));
    edit->add_option("--text", edit_text, "New text")->required();
    edit->add_option("--index", edit_index, "1-based plan index for replace_plan");

    std::string format = "plain";
    std::string output;
    auto* export_cmd = app.add_subcommand("export", "Write the transcript");
    export_cmd->add_option("--format", format, "plain or markdown")->check(CLI::IsMember({"plain", "markdown"}));
    export_cmd->add_option("--output", output, "File to write instead of stdout");

    std::string bind;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--bind", bind, "host:port");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = resolve_config(g, app);

        if (*serve) {
            if (!bind.empty()) {
                const auto colon = bind.rfind(':');
                if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "--bind must be host:port");
                config.host = bind.substr(0, colon);
                config.port = std::stoi(bind.substr(colon + 1));
            }
            Service service(config);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving on " << config.host << ":" << config.port << " with data in "
                      << config.data_dir.string() << "\n";
            service.run();
            g_service = nullptr;
            return 0;
        }

        if (*init) {
            meta.mode = mode_from_string(mode);
            if (perspective.empty()) perspective = meta.mode == Mode::fiction ? "first-person" : "third-person";
            meta.perspective = perspective_from_string(perspective);
            if (!short_term.empty()) meta.initial_short_term = short_term;
            if (!initial_plan.empty()) meta.initial_plan = initial_plan;
            const auto seed = g.seed.value_or(fresh_seed());
            InitOptions options;
            options.settings.plan_count = plan_count > 0 ? plan_count : config.plan_count;
            options.settings.retrieval_k = retrieval_k > 0 ? retrieval_k : config.retrieval_k;
            options.id = derive_session_id(meta, seed);
            const auto paths = session_paths(config.data_dir, options.id);
            if (fs::exists(paths.file)) {
                throw Error(ErrorCode::invalid_argument,
                            "session " + options.id + " already exists; pass a different --seed");
            }
            fs::create_directories(paths.file.parent_path());
            options.memory_dir = paths.memory_dir;
            auto engine = make_engine(config, seed);
            auto state = engine.init_session(meta, seed, options);
            save_session(state, {}, paths.file);
            std::ofstream(current_file(config)) << state.id << "\n";
            print_state(state);
            return 0;
        }

        const auto id = resolve_session(g, config);
        const auto paths = session_paths(config.data_dir, id);
        if (!fs::exists(paths.file)) throw Error(ErrorCode::session_not_found, "no session '" + id + "'");
        auto loaded = load_session(paths.file);
        auto& state = loaded.state;
        auto& audit = loaded.audit;
        if (loaded.recovered) std::cerr << "note: discarded an unsaved step left by an interrupted run\n";

        if (*show) {
            print_state(state);
        } else if (*step) {
            auto engine = make_engine(config, state.rng_seed);
            const Plan plan = *text_opt ? Plan(plan_text, PlanOrigin::human) : Engine::pending_plan(state, plan_index);
            auto record = engine.step(state, plan);
            print_warnings(record.validation);
            audit.steps.push_back(std::move(record));
            save_session(state, audit, paths.file);
            print_state(state);
        } else if (*run) {
            auto engine = make_engine(config, state.rng_seed);
            const auto result = engine.run_autonomous(state, n_steps, [&](const SessionState& s, const StepRecord& r) {
                print_warnings(r.validation);
                audit.steps.push_back(r);
                save_session(s, audit, paths.file);
                std::cerr << "step " << r.step << " done\n";
            });
            std::cout << "completed " << result.completed << " of " << n_steps << " steps; now at step " << state.step
                      << "\n";
            if (result.failure) {
                std::cerr << "stopped at step " << result.failure->step << ": " << result.failure->message << "\n";
                return 1;
            }
        } else if (*edit) {
            auto engine = make_engine(config, state.rng_seed);
            Edit change;
            switch (edit_kind_from_string(op)) {
                case EditKind::replace_short_term: change = ReplaceShortTerm{edit_text}; break;
                case EditKind::replace_plan: change = ReplacePlan{edit_index, edit_text}; break;
                case EditKind::replace_last_content: change = ReplaceLastContent{edit_text}; break;
            }
            audit.edits.push_back(engine.apply_edit(state, change));
            save_session(state, audit, paths.file);
            print_state(state);
        } else if (*export_cmd) {
            const auto text = export_transcript(state, export_format_from_string(format));
            if (output.empty()) {
                std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
            } else {
                std::ofstream out(output, std::ios::binary);
                out << text;
                if (!out) throw Error(ErrorCode::persistence_io, "cannot write " + output);
            }
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
