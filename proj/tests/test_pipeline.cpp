#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "parley/corpus.hpp"
#include "parley/csv.hpp"
#include "parley/pipeline.hpp"

using namespace parley;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// A self-contained run: synth writes notes and embeddings into the output
// directory, the later stages read them back from there.
std::string write_chain_config(const fs::path& dir, std::uint64_t seed = 5) {
    json j;
    j["paths"]["notes_dir"] = (dir / "notes").string();
    j["paths"]["embedding_table"] = (dir / "embeddings_synth.txt").string();
    j["issues"] = {{{"name", "fruit"}, {"seeds", {"apple"}}},
                   {{"name", "metal"}, {"seeds", {"iron"}}}};
    j["nmf"]["k"] = 2;
    j["parties"] = {"OrgA", "OrgB"};
    j["uncertainty"] = {{"fraction", 0.2}, {"reps", 5}, {"seed", 3}};
    j["filter"]["organisations"] = {"OrgA"};
    j["synth"]["seed"] = seed;
    j["synth"]["parties"] = {{{"name", "Ann"}, {"organisation", "OrgA"}},
                             {{"name", "Ben"}, {"organisation", "OrgB"}}};
    j["synth"]["sessions"] = {{{"year", 2018}, {"month", 2}, {"comments", 30}},
                              {{"year", 2019}, {"month", 6}, {"comments", 30}}};
    j["synth"]["topics"] = {
        {{"label", "fruit"}, {"pool", {"apple", "banana", "cherry", "plum"}}},
        {{"label", "metal"}, {"pool", {"iron", "copper", "zinc", "lead"}}}};
    j["synth"]["party_topic_bias"] = {
        {"OrgA", {{"fruit", 0.8}, {"metal", 0.2}}},
        {"OrgB", {{"fruit", 0.2}, {"metal", 0.8}}}};
    j["synth"]["comment_length_range"] = {3, 6};
    const auto path = dir / "config.json";
    std::ofstream out(path);
    out << j.dump(2);
    return path.string();
}

int run(const std::string& sub, const std::string& cfg, const fs::path& out,
        CliOverrides extra = {}) {
    extra.out_dir = out.string();
    return run_command(sub, cfg, extra);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json manifest_of(const fs::path& out) {
    return json::parse(slurp(out / "manifest.json"));
}

}  // namespace

TEST_CASE("the full chain runs and records every artifact") {
    const auto dir = fresh_dir("parley_chain");
    const auto cfg = write_chain_config(dir);

    CHECK(run("synth", cfg, dir) == 0);
    CHECK(fs::exists(dir / "notes"));
    CHECK(fs::exists(dir / "ground_truth.csv"));
    CHECK(fs::exists(dir / "embeddings_synth.txt"));

    CHECK(run("prepare", cfg, dir) == 0);
    const auto corpus_text = slurp(dir / "corpus.csv");
    CHECK(corpus_text.rfind(std::string(kCorpusCsvHeader) + "\n", 0) == 0);
    CHECK(import_csv((dir / "corpus.csv").string()).size() == 60);

    CHECK(run("tag", cfg, dir) == 0);
    CHECK(fs::exists(dir / "expansion.csv"));
    CHECK(fs::exists(dir / "tagged.csv"));
    CHECK(fs::exists(dir / "activity.csv"));

    CHECK(run("topics", cfg, dir) == 0);
    CHECK(fs::exists(dir / "topics_keywords.csv"));
    CHECK(fs::exists(dir / "topic_assignments.csv"));
    CHECK(fs::exists(dir / "representatives.csv"));
    CHECK(fs::exists(dir / "overlap.csv"));
    CHECK(fs::exists(dir / "latent_activity.csv"));

    CHECK(run("distances", cfg, dir) == 0);
    CHECK(fs::exists(dir / "distances_query" / "profile.csv"));
    CHECK(fs::exists(dir / "distances_query" / "party_activity.csv"));

    CliOverrides latent;
    latent.source = "latent";
    CHECK(run("distances", cfg, dir, latent) == 0);
    CHECK(fs::exists(dir / "distances_latent" / "profile.csv"));

    CHECK(run("diagnose", cfg, dir) == 0);
    CHECK(fs::exists(dir / "anisotropy.csv"));
    CHECK(fs::exists(dir / "running_mean.csv"));
    CHECK(fs::exists(dir / "running_sim.csv"));

    CHECK(run("filter", cfg, dir) == 0);
    const auto kept = import_csv((dir / "filtered.csv").string());
    CHECK(!kept.empty());
    for (const auto& c : kept) CHECK(c.organisation == "OrgA");

    CHECK(!fs::exists(dir / ".parley.lock"));

    const auto m = manifest_of(dir);
    REQUIRE(m.contains("runs"));
    REQUIRE(m["runs"].size() == 8);
    CHECK(m["runs"][0]["subcommand"] == "synth");
    CHECK(m["runs"][0].contains("fixtures"));
    CHECK(!m["runs"][0].contains("outputs"));
    CHECK(m["runs"][1]["outputs"] == json::array({"corpus.csv"}));
    CHECK(m["runs"][2]["outputs"].size() == 3);  // expansion, tagged, activity
    for (const auto& r : m["runs"]) {
        CHECK(r.contains("timestamp"));
        CHECK(r.contains("config_hash"));
        CHECK(r["tool"] == "parley 0.1.0");
    }
    CHECK(m["runs"][4]["source"] == "query");
    CHECK(m["runs"][5]["source"] == "latent");
    CHECK(m["runs"][4].contains("heatmaps"));
}

TEST_CASE("identical configs and seeds produce byte-identical artifacts") {
    const auto a = fresh_dir("parley_det_a");
    const auto b = fresh_dir("parley_det_b");
    const auto cfg_a = write_chain_config(a);
    const auto cfg_b = write_chain_config(b);
    for (const auto* sub : {"synth", "prepare", "tag", "topics", "distances"}) {
        REQUIRE(run(sub, cfg_a, a) == 0);
        REQUIRE(run(sub, cfg_b, b) == 0);
    }
    for (const auto* rel :
         {"ground_truth.csv", "corpus.csv", "expansion.csv", "tagged.csv",
          "activity.csv", "topics_keywords.csv", "topic_assignments.csv",
          "representatives.csv", "overlap.csv", "latent_activity.csv",
          "embeddings_synth.txt", "distances_query/profile.csv",
          "distances_query/party_activity.csv"})
        CHECK(slurp(a / rel) == slurp(b / rel));

    // a different seed diverges
    const auto c = fresh_dir("parley_det_c");
    const auto cfg_c = write_chain_config(c, 6);
    REQUIRE(run("synth", cfg_c, c) == 0);
    REQUIRE(run("prepare", cfg_c, c) == 0);
    CHECK(slurp(a / "corpus.csv") != slurp(c / "corpus.csv"));
}

TEST_CASE("the seed override reaches the generator") {
    const auto a = fresh_dir("parley_seed_a");
    const auto b = fresh_dir("parley_seed_b");
    const auto cfg_a = write_chain_config(a, 5);
    const auto cfg_b = write_chain_config(b, 99);
    CliOverrides force;
    force.seed = 5;
    REQUIRE(run("synth", cfg_a, a) == 0);
    REQUIRE(run("synth", cfg_b, b, force) == 0);  // override 99 back to 5
    CHECK(slurp(a / "ground_truth.csv") == slurp(b / "ground_truth.csv"));
}

TEST_CASE("the baseline override changes the reference column") {
    const auto dir = fresh_dir("parley_baseline");
    const auto cfg = write_chain_config(dir);
    REQUIRE(run("synth", cfg, dir) == 0);
    REQUIRE(run("prepare", cfg, dir) == 0);
    REQUIRE(run("tag", cfg, dir) == 0);
    CliOverrides base;
    base.baseline = "OrgA";
    REQUIRE(run("distances", cfg, dir, base) == 0);
    const auto rows = read_csv_file((dir / "distances_query" / "profile.csv").string());
    REQUIRE(rows.size() > 1);
    for (std::size_t r = 1; r < rows.size(); ++r)
        CHECK(rows[r][0] == "baseline:OrgA");

    // the baseline party sits at similarity 1 wherever it has data
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][1] != "OrgA" || rows[r][4].empty()) continue;
        CHECK(parse_double(rows[r][4]) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("missing prerequisites and bad configs exit 1, without artifacts") {
    const auto dir = fresh_dir("parley_fail");
    const auto cfg = write_chain_config(dir);

    CHECK(run("tag", dir.string() + "/absent.json", dir) == 1);
    CHECK(run("tag", cfg, dir) == 1);  // no corpus.csv yet
    CHECK(!fs::exists(dir / "tagged.csv"));
    CHECK(run("distances", cfg, dir) == 1);
    CHECK(run("topics", cfg, dir) == 1);
    CHECK(run("frobnicate", cfg, dir) == 1);

    const auto bad = dir / "bad.json";
    {
        std::ofstream out(bad);
        out << "{\"query\": {\"min_sim\": 0.0}}";
    }
    CHECK(run("prepare", bad.string(), dir) == 1);
    CHECK(!fs::exists(dir / "corpus.csv"));

    // the lock stays away after failed runs, and blocks concurrent ones
    CHECK(!fs::exists(dir / ".parley.lock"));
    {
        std::ofstream lock(dir / ".parley.lock");
        lock << "123\n";
    }
    CHECK(run("synth", cfg, dir) == 2);
    fs::remove(dir / ".parley.lock");
    CHECK(run("synth", cfg, dir) == 0);
}

TEST_CASE("distances rejects an unknown source and needs its own inputs") {
    const auto dir = fresh_dir("parley_source");
    const auto cfg = write_chain_config(dir);
    REQUIRE(run("synth", cfg, dir) == 0);
    REQUIRE(run("prepare", cfg, dir) == 0);

    CliOverrides bogus;
    bogus.source = "vibes";
    CHECK(run("distances", cfg, dir, bogus) == 1);

    CliOverrides latent;
    latent.source = "latent";
    CHECK(run("distances", cfg, dir, latent) == 1);  // topics has not run
    CHECK(!fs::exists(dir / "distances_latent"));
}

TEST_CASE("the PARLEY_OUT fallback places artifacts") {
    const auto dir = fresh_dir("parley_envout");
    const auto cfg = write_chain_config(dir);
    REQUIRE(setenv("PARLEY_OUT", dir.string().c_str(), 1) == 0);
    const int code = run_command("synth", cfg, {});  // no --out, no output_dir
    unsetenv("PARLEY_OUT");
    CHECK(code == 0);
    CHECK(fs::exists(dir / "ground_truth.csv"));
}

TEST_CASE("svg emission is opt-in") {
    const auto dir = fresh_dir("parley_svg");
    const auto cfg = write_chain_config(dir);
    REQUIRE(run("synth", cfg, dir) == 0);
    REQUIRE(run("prepare", cfg, dir) == 0);
    REQUIRE(run("tag", cfg, dir) == 0);
    CHECK(!fs::exists(dir / "activity.svg"));

    CliOverrides svg;
    svg.emit_svg = true;
    REQUIRE(run("diagnose", cfg, dir, svg) == 0);
    CHECK(fs::exists(dir / "running_sim.svg"));
    const auto body = slurp(dir / "running_sim.svg");
    CHECK(body.find("<svg") != std::string::npos);
}
