#ifndef TOPORESOLVE_TEST_FIXTURES_HPP
#define TOPORESOLVE_TEST_FIXTURES_HPP

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "toporesolve/corpus.hpp"
#include "toporesolve/gazetteer.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
    return std::string(TEST_DATA_DIR) + "/" + name;
}

/// The bundled ~50-entry gazetteer, bounding boxes applied.
inline const toporesolve::Gazetteer& gazetteer() {
    static const toporesolve::Gazetteer g = [] {
        std::ifstream in(data_path("fixture_gazetteer.tsv"));
        if (!in) throw std::runtime_error("missing fixture_gazetteer.tsv");
        toporesolve::Gazetteer g = toporesolve::ingest_geonames(in);
        std::ifstream boxes(data_path("fixture_bboxes.tsv"));
        if (!boxes) throw std::runtime_error("missing fixture_bboxes.tsv");
        toporesolve::load_bounding_boxes(g, boxes);
        return g;
    }();
    return g;
}

inline std::vector<toporesolve::Document> corpus() {
    std::ifstream in(data_path("fixture_corpus.json"));
    if (!in) throw std::runtime_error("missing fixture_corpus.json");
    return toporesolve::load_corpus(in);
}

/// Document whose toponyms are exactly the given surfaces, space-joined.
inline toporesolve::Document doc_of_toponyms(const std::vector<std::string>& surfaces,
                                             const std::string& doc_id = "test") {
    std::string text;
    std::vector<toporesolve::RawMention> mentions;
    for (const std::string& s : surfaces) {
        if (!text.empty()) text += ' ';
        std::size_t start = text.size();
        text += s;
        mentions.push_back({start, text.size(), "", std::nullopt});
    }
    return toporesolve::build_document(doc_id, text, mentions);
}

}  // namespace fixtures

#endif  // TOPORESOLVE_TEST_FIXTURES_HPP
