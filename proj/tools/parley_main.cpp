#include <CLI11.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "parley/pipeline.hpp"
#include "parley/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Structures multi-party dialogue notes and measures issue "
                 "attention and party positions."};
    app.set_version_flag("--version", std::string("parley ") + parley::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string source = "query";
    std::string baseline;
    bool emit_svg = false;

    const std::vector<std::pair<const char*, const char*>> subs = {
        {"prepare", "parse note files into the master corpus table"},
        {"tag", "categorize comments against the configured issue catalog"},
        {"topics", "extract latent issues with a topic model"},
        {"distances", "measure party positions and distances per issue"},
        {"diagnose", "embedding-space diagnostics (anisotropy, running means)"},
        {"filter", "write a filtered view of the corpus"},
        {"synth", "generate a synthetic corpus with known structure"},
    };
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_option("--source", source,
                        "tagging to measure distances against")
            ->check(CLI::IsMember({"query", "latent"}));
        sub->add_option("--baseline", baseline,
                        "measure distances from this party instead of the "
                        "group average");
        sub->add_flag("--emit-svg", emit_svg, "also render SVG charts");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    parley::CliOverrides overrides;
    if (sub->count("--out")) overrides.out_dir = out_dir;
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--source")) overrides.source = source;
    if (sub->count("--baseline")) overrides.baseline = baseline;
    overrides.emit_svg = emit_svg;

    return parley::run_command(sub->get_name(), config_path, overrides);
}
