#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "toporesolve/eval.hpp"

namespace {

const std::string kCli = CLI_PATH;

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/toporesolve_test_") + name;
}

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    std::string cmd = kCli + " " + args + " > " + stdout_file + " 2> /dev/null";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string gazetteer_tsv() { return fixtures::data_path("fixture_gazetteer.tsv"); }
std::string bboxes_tsv() { return fixtures::data_path("fixture_bboxes.tsv"); }
std::string corpus_json() { return fixtures::data_path("fixture_corpus.json"); }

}  // namespace

TEST_CASE("index writes a loadable snapshot and reports counts") {
    const std::string snap = tmp_path("snap.bin");
    const std::string log = tmp_path("index.out");
    REQUIRE(run("index --gazetteer " + gazetteer_tsv() + " --bboxes " + bboxes_tsv() +
                " --out " + snap, log) == 0);
    CHECK(slurp(log) == "entries 50\nmalformed 0\n");

    // snapshot and raw TSV yield byte-identical resolutions
    const std::string out_a = tmp_path("resolve_snap.json");
    const std::string out_b = tmp_path("resolve_tsv.json");
    REQUIRE(run("resolve --gazetteer " + snap + " --corpus " + corpus_json() + " --out " +
                out_a) == 0);
    REQUIRE(run("resolve --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json() +
                " --out " + out_b) == 0);
    CHECK(slurp(out_a) == slurp(out_b));
}

TEST_CASE("resolve emits the expected picks") {
    const std::string out = tmp_path("resolve.json");
    REQUIRE(run("resolve --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json() +
                " --resolver chf --out " + out) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.contains("documents"));
    REQUIRE(j["documents"].size() == 5);

    const auto& windsor_doc = j["documents"][4];
    CHECK(windsor_doc["doc_id"] == "montreal-windsor");
    CHECK(windsor_doc["resolutions"][0]["geonames_id"] == 3012);
    CHECK(windsor_doc["resolutions"][1]["geonames_id"] == 3013);
    CHECK(windsor_doc["resolutions"][1]["source"] == "cbh");

    const auto& edmonton_doc = j["documents"][2];
    CHECK(edmonton_doc["resolutions"][0]["geonames_id"] == 3007);
    CHECK(edmonton_doc["resolutions"][0]["confidence"] == 1.0);
}

TEST_CASE("resolve is byte-identical across runs") {
    const std::string out_a = tmp_path("det_a.json");
    const std::string out_b = tmp_path("det_b.json");
    const std::string args =
        "resolve --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json();
    REQUIRE(run(args + " --out " + out_a) == 0);
    REQUIRE(run(args + " --out " + out_b) == 0);
    CHECK(slurp(out_a) == slurp(out_b));
    CHECK_FALSE(slurp(out_a).empty());
}

TEST_CASE("eval prints metrics and honors flags") {
    const std::string out = tmp_path("eval.json");
    REQUIRE(run("eval --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json() +
                " --resolver chf --mode resol --correctness distance --threshold-km 161 "
                "--out " + out) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["gold"] == 10);
    CHECK(j["precision"].is_number());
    CHECK(j["mean_error_km"].is_number());
}

TEST_CASE("eval sweep emits a CSV") {
    const std::string out = tmp_path("sweep.csv");
    REQUIRE(run("eval --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json() +
                " --sweep-tau 0:1:0.25 --out " + out) == 0);
    std::string csv = slurp(out);
    CHECK(csv.rfind("tau,precision,recall,f1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows
}

TEST_CASE("usage and IO failures exit with 2") {
    CHECK(run("") == 2);                                       // no subcommand
    CHECK(run("resolve") == 2);                                // missing --corpus
    CHECK(run("resolve --gazetteer /nonexistent --corpus " + corpus_json()) == 2);
    CHECK(run("resolve --gazetteer " + gazetteer_tsv() + " --corpus /nonexistent") == 2);
    CHECK(run("resolve --gazetteer " + gazetteer_tsv() + " --corpus " + corpus_json() +
              " --resolver bogus") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("TOPORESOLVE_SNAPSHOT supplies the default gazetteer") {
    const std::string snap = tmp_path("snap_env.bin");
    REQUIRE(run("index --gazetteer " + gazetteer_tsv() + " --out " + snap) == 0);
    const std::string out = tmp_path("env.json");
    std::string cmd = "TOPORESOLVE_SNAPSHOT=" + snap + " " + kCli + " resolve --corpus " +
                      corpus_json() + " --out " + out + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);
    CHECK(nlohmann::json::parse(slurp(out)).contains("documents"));
}

TEST_CASE("HTTP endpoint mirrors the CLI") {
    const int port = 18473;
    const std::string pidfile = tmp_path("serve.pid");
    std::string cmd = kCli + " serve --gazetteer " + gazetteer_tsv() +
                      " --port " + std::to_string(port) +
                      " > /dev/null 2>&1 & echo $! > " + pidfile;
    REQUIRE(std::system(cmd.c_str()) == 0);
    auto stop = [&] {
        int rc = std::system(("kill $(cat " + pidfile + ") 2>/dev/null").c_str());
        (void)rc;
    };

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(1, 0);
    bool up = false;
    for (int i = 0; i < 50 && !up; ++i) {
        if (auto res = client.Get("/healthz"); res && res->status == 200) {
            up = true;
            auto j = nlohmann::json::parse(res->body);
            CHECK(j["status"] == "ok");
            CHECK(j["entries"] == 50);
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    }
    if (!up) {
        stop();
        FAIL("server did not come up");
    }

    // parity with the in-process resolver on the Edmonton fixture doc
    auto docs = fixtures::corpus();
    nlohmann::ordered_json body;
    body["text"] = docs[2].text;
    auto spans = nlohmann::ordered_json::array();
    for (const auto& t : docs[2].toponyms)
        spans.push_back({{"start", t.char_start}, {"end", t.char_end}});
    body["toponyms"] = spans;

    auto res = client.Post("/resolve", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto resolved = toporesolve::resolve_corpus(
        std::vector<toporesolve::Document>{docs[2]}, fixtures::gazetteer(), "chf");
    nlohmann::ordered_json expected{
        {"resolutions", toporesolve::resolutions_to_json(resolved[0])}};
    CHECK(res->body == expected.dump());

    // malformed offsets: 400 with a field path
    auto bad = client.Post("/resolve",
                           R"({"text": "x", "toponyms": [{"start": 0}]})",
                           "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(nlohmann::json::parse(bad->body)["error"].get<std::string>().find("toponyms[0]") !=
          std::string::npos);

    stop();
}
