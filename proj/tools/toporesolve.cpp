// Command-line front end: gazetteer indexing, toponym resolution,
// evaluation, tau sweeps, and a small JSON-over-HTTP resolve endpoint.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "toporesolve/chf.hpp"
#include "toporesolve/corpus.hpp"
#include "toporesolve/eval.hpp"
#include "toporesolve/gazetteer.hpp"
#include "toporesolve/resolution.hpp"
#include "toporesolve/snapshot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // resolution/evaluation failure
constexpr int kExitUsage = 2;    // usage or IO error

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

toporesolve::Gazetteer load_gazetteer(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open gazetteer file: " + path);

    char magic[8] = {};
    in.read(magic, sizeof(magic));
    const bool is_snapshot =
        in.gcount() == 8 &&
        std::memcmp(magic, toporesolve::kSnapshotMagic, sizeof(magic)) == 0;
    in.clear();
    in.seekg(0);
    if (is_snapshot) return toporesolve::load_snapshot(in);
    return toporesolve::ingest_geonames(in);
}

std::vector<toporesolve::Document> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open corpus file: " + path);
    return toporesolve::load_corpus(in);
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw UsageError("cannot open output file: " + out_path);
    out << payload;
}

std::string default_gazetteer() {
    const char* env = std::getenv("TOPORESOLVE_SNAPSHOT");
    return env ? env : "";
}

nlohmann::ordered_json resolve_corpus_json(const std::vector<toporesolve::Document>& docs,
                                           const toporesolve::Gazetteer& g,
                                           const std::string& resolver,
                                           const toporesolve::ChfConfig& cfg) {
    nlohmann::ordered_json jdocs = nlohmann::ordered_json::array();
    auto resolved = toporesolve::resolve_corpus(docs, g, resolver, cfg);
    for (std::size_t di = 0; di < docs.size(); ++di) {
        jdocs.push_back(nlohmann::ordered_json{
            {"doc_id", docs[di].doc_id},
            {"resolutions", toporesolve::resolutions_to_json(resolved[di])}});
    }
    return nlohmann::ordered_json{{"documents", std::move(jdocs)}};
}

std::vector<double> parse_sweep(const std::string& spec) {
    // a:b:step, inclusive of b up to rounding
    double a, b, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0 || b < a)
        throw UsageError("bad --sweep-tau spec (want a:b:step): " + spec);
    std::vector<double> taus;
    for (double t = a; t <= b + 1e-9; t += step) taus.push_back(std::min(t, 1.0));
    return taus;
}

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t max_body = 1 << 20;
    std::string resolver = "chf";
    double tau = 0.55;
};

int run_server(const toporesolve::Gazetteer& g, const ServeOptions& opts) {
    httplib::Server server;
    server.set_payload_max_length(opts.max_body);

    server.Get("/healthz", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(
            nlohmann::ordered_json{{"status", "ok"}, {"entries", g.size()}}.dump(),
            "application/json");
    });

    server.Post("/resolve", [&](const httplib::Request& req, httplib::Response& res) {
        auto fail = [&](int code, const std::string& message) {
            res.status = code;
            res.set_content(nlohmann::ordered_json{{"error", message}}.dump(),
                            "application/json");
        };
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            return fail(400, std::string("body: invalid JSON: ") + e.what());
        }
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
            return fail(400, "text: expected string");
        if (!body.contains("toponyms") || !body["toponyms"].is_array())
            return fail(400, "toponyms: expected array");

        std::vector<toporesolve::RawMention> mentions;
        const auto& jtops = body["toponyms"];
        for (std::size_t i = 0; i < jtops.size(); ++i) {
            const auto& jt = jtops[i];
            const std::string path = "toponyms[" + std::to_string(i) + "]";
            if (!jt.is_object() || !jt.contains("start") || !jt.contains("end") ||
                !jt["start"].is_number_unsigned() || !jt["end"].is_number_unsigned())
                return fail(400, path + ": expected {start, end} with non-negative integers");
            mentions.push_back(toporesolve::RawMention{jt["start"].get<std::size_t>(),
                                                       jt["end"].get<std::size_t>(), "",
                                                       std::nullopt});
        }
        std::string resolver = opts.resolver;
        if (body.contains("resolver")) {
            if (!body["resolver"].is_string()) return fail(400, "resolver: expected string");
            resolver = body["resolver"].get<std::string>();
        }
        toporesolve::ChfConfig cfg;
        cfg.tau = opts.tau;
        if (body.contains("tau")) {
            if (!body["tau"].is_number()) return fail(400, "tau: expected number");
            cfg.tau = body["tau"].get<double>();
        }

        try {
            toporesolve::Document doc = toporesolve::build_document(
                "request", body["text"].get<std::string>(), mentions);
            auto resolved = toporesolve::resolve_corpus(
                std::vector<toporesolve::Document>{doc}, g, resolver, cfg);
            res.set_content(nlohmann::ordered_json{
                                {"resolutions", toporesolve::resolutions_to_json(resolved[0])}}
                                .dump(),
                            "application/json");
        } catch (const toporesolve::CorpusError& e) {
            return fail(400, e.what());
        } catch (const std::invalid_argument& e) {
            return fail(400, e.what());
        }
    });

    std::cerr << "listening on " << opts.host << ":" << opts.port << " ("
              << g.size() << " gazetteer entries)\n";
    if (!server.listen(opts.host, opts.port)) {
        std::cerr << "failed to bind " << opts.host << ":" << opts.port << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toporesolve: unsupervised toponym resolution against a GeoNames gazetteer"};
    app.require_subcommand(1);

    // index
    auto* cmd_index = app.add_subcommand("index", "parse a GeoNames TSV dump into a snapshot");
    std::string index_gazetteer, index_bboxes, index_out;
    cmd_index->add_option("--gazetteer", index_gazetteer, "GeoNames TSV dump")->required();
    cmd_index->add_option("--bboxes", index_bboxes, "bounding-box sidecar TSV");
    cmd_index->add_option("--out", index_out, "snapshot output path")->required();

    // shared resolve/eval options
    std::string gazetteer_path = default_gazetteer();
    std::string corpus_path, resolver = "chf", out_path;
    double tau = 0.55;
    int max_iterations = 2;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--gazetteer", gazetteer_path,
                        "gazetteer snapshot or TSV (default: $TOPORESOLVE_SNAPSHOT)");
        cmd->add_option("--corpus", corpus_path, "corpus JSON")->required();
        cmd->add_option("--resolver", resolver, "resolver")
            ->check(CLI::IsMember({"preliminary", "cbh", "shs", "chf"}));
        cmd->add_option("--tau", tau, "CHF confidence threshold");
        cmd->add_option("--max-iterations", max_iterations, "CBH iteration bound");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
    };

    auto* cmd_resolve = app.add_subcommand("resolve", "resolve corpus toponyms");
    add_common(cmd_resolve);

    auto* cmd_eval = app.add_subcommand("eval", "score resolutions against gold annotations");
    add_common(cmd_eval);
    std::string mode = "resol", correctness = "distance", sweep_spec;
    double threshold_km = toporesolve::kRelaxedThresholdKm;
    cmd_eval->add_option("--mode", mode, "evaluation mode")
        ->check(CLI::IsMember({"resol", "geotag"}));
    cmd_eval->add_option("--correctness", correctness, "correctness criterion")
        ->check(CLI::IsMember({"distance", "bbox"}));
    cmd_eval->add_option("--threshold-km", threshold_km, "distance threshold in km");
    cmd_eval->add_option("--sweep-tau", sweep_spec, "tau sweep a:b:step, emits CSV");

    auto* cmd_serve = app.add_subcommand("serve", "HTTP resolve endpoint");
    ServeOptions serve_opts;
    cmd_serve->add_option("--gazetteer", gazetteer_path,
                          "gazetteer snapshot or TSV (default: $TOPORESOLVE_SNAPSHOT)");
    cmd_serve->add_option("--host", serve_opts.host, "bind address");
    cmd_serve->add_option("--port", serve_opts.port, "port");
    cmd_serve->add_option("--max-body", serve_opts.max_body, "request body limit in bytes");
    cmd_serve->add_option("--resolver", serve_opts.resolver, "default resolver")
        ->check(CLI::IsMember({"preliminary", "cbh", "shs", "chf"}));
    cmd_serve->add_option("--tau", serve_opts.tau, "default CHF threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_index->parsed()) {
            std::ifstream in(index_gazetteer);
            if (!in) throw UsageError("cannot open gazetteer file: " + index_gazetteer);
            toporesolve::IngestReport report;
            toporesolve::Gazetteer g = toporesolve::ingest_geonames(in, {}, &report);
            if (!index_bboxes.empty()) {
                std::ifstream bin(index_bboxes);
                if (!bin) throw UsageError("cannot open bounding-box file: " + index_bboxes);
                toporesolve::load_bounding_boxes(g, bin);
            }
            std::ofstream out(index_out, std::ios::binary);
            if (!out) throw UsageError("cannot open output file: " + index_out);
            toporesolve::save_snapshot(g, out);
            std::cout << "entries " << report.ingested << "\nmalformed " << report.malformed
                      << "\n";
            return kExitOk;
        }

        if (gazetteer_path.empty())
            throw UsageError("no gazetteer given (use --gazetteer or TOPORESOLVE_SNAPSHOT)");
        toporesolve::Gazetteer g = load_gazetteer(gazetteer_path);

        if (cmd_serve->parsed()) return run_server(g, serve_opts);

        auto docs = load_corpus_file(corpus_path);
        toporesolve::ChfConfig cfg;
        cfg.tau = tau;
        cfg.cbh.max_iterations = max_iterations;

        if (cmd_resolve->parsed()) {
            write_output(out_path, resolve_corpus_json(docs, g, resolver, cfg).dump(2));
            return kExitOk;
        }

        // eval
        toporesolve::EvalConfig eval_cfg;
        eval_cfg.mode =
            mode == "geotag" ? toporesolve::EvalMode::GeoTag : toporesolve::EvalMode::Resol;
        eval_cfg.correctness = correctness == "bbox" ? toporesolve::Correctness::BoundingBox
                                                     : toporesolve::Correctness::DistanceThreshold;
        eval_cfg.threshold_km = threshold_km;

        if (!sweep_spec.empty()) {
            auto rows = toporesolve::tau_sweep(docs, g, cfg.cbh, parse_sweep(sweep_spec),
                                               eval_cfg);
            write_output(out_path, toporesolve::sweep_csv(rows));
            return kExitOk;
        }

        auto resolved = toporesolve::resolve_corpus(docs, g, resolver, cfg);
        toporesolve::Metrics metrics = toporesolve::evaluate(docs, resolved, g, eval_cfg);
        std::cout << toporesolve::metrics_table(metrics);
        write_output(out_path, toporesolve::metrics_to_json(metrics).dump(2));
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const toporesolve::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const toporesolve::SnapshotError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const toporesolve::CorpusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const toporesolve::EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
