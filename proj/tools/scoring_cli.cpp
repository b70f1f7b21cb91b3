#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "scoring/experiments.hpp"

namespace ex = scoring::experiments;

namespace {

struct Flags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
};

int execute(ex::ExperimentKind kind, const Flags& flags)
{
    nlohmann::json document = nlohmann::json::object();
    std::filesystem::path base_dir;
    if (!flags.config.empty())
    {
        std::ifstream in(flags.config);
        if (!in)
        {
            std::cerr << fmt::format("error: --config: cannot open '{}'\n", flags.config);
            return ex::kExitUsage;
        }
        try
        {
            document = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::parse_error& e)
        {
            std::cerr << fmt::format("error: --config: {}\n", e.what());
            return ex::kExitUsage;
        }
        base_dir = std::filesystem::path(flags.config).parent_path();
    }
    else if (kind != ex::ExperimentKind::CheckSuite)
    {
        std::cerr << fmt::format("error: --config is required for {}\n", ex::kind_name(kind));
        return ex::kExitUsage;
    }

    ex::ExperimentConfig config;
    try
    {
        config = ex::make_config(kind, document, {flags.seed, flags.threads, flags.out}, base_dir);
    }
    catch (const ex::ConfigError& e)
    {
        std::cerr << fmt::format("error: invalid configuration at {}: {}\n", e.field(), e.what());
        return ex::kExitUsage;
    }

    ex::RunResult result;
    try
    {
        result = ex::run(config);
    }
    catch (const std::exception& e)
    {
        std::cerr << fmt::format("error: {} failed: {}\n", ex::kind_name(kind), e.what());
        return ex::kExitNumerical;
    }

    if (config.output)
    {
        std::ofstream out(*config.output, std::ios::binary);
        if (!out || !(out << result.table))
        {
            std::cerr << fmt::format("error: --out: cannot write '{}'\n", *config.output);
            return ex::kExitUsage;
        }
    }
    else
        std::cout << result.table;

    for (const auto& f : result.failures)
        std::cerr << "FAILED: " << f << '\n';
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local proper scoring rules: experiments and invariant checks"};
    app.require_subcommand(1);

    Flags flags;
    const std::pair<ex::ExperimentKind, const char*> commands[] = {
        {ex::ExperimentKind::ScoreEval, "Evaluate scoring rules at points"},
        {ex::ExperimentKind::DivergenceTable, "Tabulate divergences by every available route"},
        {ex::ExperimentKind::SureExperiment, "Check unbiasedness of SURE for a posterior-mean estimator"},
        {ex::ExperimentKind::Bandwidth, "Select a KDE bandwidth by leave-one-out risk"},
        {ex::ExperimentKind::CheckSuite, "Run the built-in invariant checks"},
    };
    std::optional<ex::ExperimentKind> chosen;
    for (const auto& [kind, help] : commands)
    {
        auto* sub = app.add_subcommand(std::string(ex::kind_name(kind)), help);
        sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "Override the configured seed");
        sub->add_option("--out", flags.out, "Write the CSV table here instead of stdout");
        sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->callback([&chosen, k = kind] { chosen = k; });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : ex::kExitUsage;
    }
    return execute(*chosen, flags);
}
