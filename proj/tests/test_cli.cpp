#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aprand/apscan.hpp"
#include "aprand/results_io.hpp"
#include "aprand/rngword.hpp"

using namespace aprand;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " APRAND_CLI_PATH " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "aprand_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("gen") {
    const Run r = cli("gen --seed 1 --trial 0 --n 8");
    CHECK(r.code == 0);
    CHECK(r.out == "10000011\n");
    CHECK(cli("gen --seed 1 --trial 0 --n 64 --format hex").out == "c12c5b90d75e93ec\n");
    const Run empty = cli("gen --seed 1 --n 0");
    CHECK(empty.code == 0);
    CHECK(empty.out.empty());
    CHECK(cli("gen --seed 4 --trial 2 --n 300").out == cli("gen --seed 4 --trial 2 --n 300").out);
    CHECK(cli("gen --seed 4 --trial 2 --n 300").out == generate_word({4, 2}, 300).to_bits() + "\n");
}

TEST_CASE("seed from the environment") {
    CHECK(cli("gen --n 8", "AP_SEED=1").out == "10000011\n");
    CHECK(cli("gen --n 40 --seed 9", "AP_SEED=1").out == generate_word({9, 0}, 40).to_bits() + "\n");
    CHECK(cli("gen --n 8", "AP_SEED=banana").code == 1);
}

TEST_CASE("stat") {
    const Run r = cli("stat --word 01101");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["W"] == 3);
    CHECK(j["U"] == 2);
    CHECK(j["W_witness"] == nlohmann::json{{"s", 1}, {"p", 2}, {"k", 3}});
    CHECK(j["U_witness"] == nlohmann::json{{"s", 1}, {"p", 1}, {"k", 2}});
    CHECK(j["config"]["word"] == "01101");

    const auto ones = nlohmann::json::parse(cli("stat --word 11111111").out);
    CHECK(ones["W"] == 0);
    CHECK(ones["U"] == 0);
    CHECK(ones["W_witness"].is_null());

    const BinaryWord w = generate_word({3, 5}, 400);
    const auto s = nlohmann::json::parse(cli("stat --seed 3 --trial 5 --n 400").out);
    const ApResult mw = max_w(w);
    const ApResult mu = max_u(w);
    CHECK(s["W"] == mw.value);
    CHECK(s["U"] == mu.value);
    CHECK(s["W_witness"]["s"] == mw.witness->s);
    CHECK(s["W_witness"]["p"] == mw.witness->p);
    CHECK(s["U_witness"]["s"] == mu.witness->s);
    CHECK(s["U_witness"]["p"] == mu.witness->p);
    CHECK(cli("stat --word 01101 --naive").out == r.out);
}

TEST_CASE("dist with one trial composes stat") {
    const Run d = cli("dist --seed 5 --n 32 --trials 1 --format json");
    REQUIRE(d.code == 0);
    const auto report = report_from_json(nlohmann::json::parse(d.out));
    const auto s = nlohmann::json::parse(cli("stat --seed 5 --trial 0 --n 32").out);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].w->value == s["W"]);
    CHECK(report.records[0].u->value == s["U"]);
    CHECK(report.config.master == 5);
}

TEST_CASE("dist config file and flag precedence") {
    const auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"master": 8, "ns": [40], "trials": 6, "stats": "W"})";
    const Run a = cli("dist --config " + cfg.string());
    REQUIRE(a.code == 0);
    CHECK(a.out.rfind("# {", 0) == 0);
    const auto echo = nlohmann::json::parse(a.out.substr(2, a.out.find('\n') - 2));
    CHECK(echo["master"] == 8);
    CHECK(echo["trials"] == 6);
    CHECK(echo["stats"] == "W");

    const Run b = cli("dist --config " + cfg.string() + " --trials 3 --seed 2", "AP_SEED=99");
    const auto echo_b = nlohmann::json::parse(b.out.substr(2, b.out.find('\n') - 2));
    CHECK(echo_b["trials"] == 3);
    CHECK(echo_b["master"] == 2);
    const Run c = cli("dist --n 40 --trials 2", "AP_SEED=99");
    CHECK(nlohmann::json::parse(c.out.substr(2, c.out.find('\n') - 2))["master"] == 99);
}

TEST_CASE("dist files and report") {
    const auto out = scratch("d.csv");
    const Run d = cli("dist --seed 3 --n 64 --trials 50 --workers 4 --out " + out.string());
    REQUIRE(d.code == 0);
    CHECK(d.out.empty());
    const auto loaded = load_results(out);
    CHECK(loaded.records.size() == 50);
    CHECK(loaded.config.master == 3);
    const auto cdf = scratch("d.cdf.csv");
    CHECK(std::filesystem::exists(cdf));
    const Run r = cli("report --in " + cdf.string());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("n,stat,rows,ks,within\n", 0) == 0);
}

TEST_CASE("negative control fails the check") {
    const std::string base = "dist --seed 11 --n 256 --trials 400 --stats W --workers 4";
    CHECK(cli(base + " --prediction-shift 3 --check").code == 3);
    const auto cdf = scratch("shifted.csv");
    cli(base + " --prediction-shift 3 --out " + cdf.string());
    CHECK(cli("report --check --in " + scratch("shifted.cdf.csv").string()).code == 3);
}

TEST_CASE("chenstein") {
    const Run r = cli("chenstein --n 64 --exact");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["exact"]["integer"]["b1_le_bound"] == true);
    CHECK(j["exact"]["integer"]["b2_le_bound"] == true);
    CHECK(j["exact"]["integer"]["b1"].get<double>() <= j["bound"]["b1"].get<double>());
    CHECK(j["exact"].contains("residue"));
    CHECK(j["M"] == 12);
    CHECK(j["m_ones"] == 13);
    CHECK(cli("chenstein --n 64 --exact --mode integer --check").code == 0);
    const auto mc = nlohmann::json::parse(cli("chenstein --n 32 --exact --trials 2000 --seed 4").out);
    CHECK(mc["monte_carlo"].contains("agg_holds"));
}

TEST_CASE("nested and lattice") {
    const Run n = cli("nested --seed 2 --seeds 2 --min-exp 4 --max-exp 7");
    REQUIRE(n.code == 0);
    CHECK(n.out.find("trial,N,U,W,u_ratio,w_ratio\n") != std::string::npos);
    CHECK(n.out.find("\n1,128,") != std::string::npos);
    const Run l = cli("lattice --n 32 --streams 10 --seed 4");
    REQUIRE(l.code == 0);
    const auto j = nlohmann::json::parse(l.out);
    CHECK(j["values"].size() == 10);
    CHECK(j["config"]["beta"] == 0.5);
}

TEST_CASE("exit codes") {
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("gen --n notanumber").code == 1);
    CHECK(cli("gen").code == 1);
    CHECK(cli("stat --word 0120").code == 1);
    CHECK(cli("dist --n 1").code == 1);
    CHECK(cli("gen --n 4 --out /nonexistent_dir/x.txt").code == 2);
    CHECK(cli("report --in /nonexistent_dir/x.csv").code == 2);
    const auto bad = scratch("bad.cdf.csv");
    std::ofstream(bad) << "n,stat,threshold\n1,W,2\n";
    CHECK(cli("report --in " + bad.string()).code == 2);
    CHECK(cli("dist --config /nonexistent_dir/c.json").code == 2);
    CHECK(cli("--help").code == 0);
}
