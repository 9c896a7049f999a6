#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "shredmap/pipeline.hpp"

using namespace shredmap;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(SHREDMAP_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "shredmap_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("audit subcommand writes the report") {
    const fs::path dir = fresh_dir("audit");
    write_text(dir / "ledger.json", R"({"gross_paperweight_g": "175.6", "empty_container_g": "60.0",
        "stones_g": "87.7", "bag_gross_g": "39.4", "bag_tare_g": "11.1", "per_note_g": 1.4, "claimed_notes": 138})");
    REQUIRE(run("audit " + (dir / "ledger.json").string() + " --out " + (dir / "report.json").string()) == 0);
    const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
    CHECK(report["rounded_notes"] == 20);
    CHECK(report["net_shreds_g"].get<double>() == doctest::Approx(28.3));

    write_text(dir / "bad.json", R"({"gross_paperweight_g": "a lot"})");
    CHECK(run("audit " + (dir / "bad.json").string()) == 2);
    CHECK(run("audit " + (dir / "missing.json").string()) != 0);
    CHECK(run("no-such-command") != 0);
}

TEST_CASE("synth, shred, batch and score chain together") {
    const fs::path dir = fresh_dir("flow");
    const std::string d = dir.string();
    REQUIRE(run("synth --width 200 --height 150 --seed 71 --out " + d + "/gt/note.png") == 0);
    REQUIRE(run("shred --input " + d + "/gt/note.png --seed 3 --pieces-dir " + d + "/pieces --oracle " + d +
                "/oracle.json") == 0);
    REQUIRE(run("batch --pieces-dir " + d + "/pieces --ground-truth-dir " + d + "/gt --out-dir " + d + "/out") == 0);
    const auto rows = parse_batch_csv(read_text(dir / "out" / "batch.csv"));
    CHECK_FALSE(rows.empty());
    for (const auto& r : rows) CHECK(r.ground_truth_id == "note");
    CHECK(fs::exists(dir / "out" / "pieces.json"));
    CHECK(fs::exists(dir / "out" / "panels" / (rows.front().piece_id + ".png")));

    REQUIRE(run("score " + d + "/out/batch.csv --oracle " + d + "/oracle.json --out " + d + "/score.json") == 0);
    const auto score = nlohmann::json::parse(read_text(dir / "score.json"));
    CHECK(score["recovered_fraction"].get<double>() >= 0.99);
}
