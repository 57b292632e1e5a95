#ifndef TOPORESOLVE_CORPUS_HPP
#define TOPORESOLVE_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <json.hpp>

#include "toporesolve/gazetteer.hpp"
#include "toporesolve/normalize.hpp"

namespace toporesolve {

struct Token {
    std::string surface;
    std::size_t char_start = 0;  // byte offsets into the document text
    std::size_t char_end = 0;

    bool operator==(const Token&) const = default;
};

struct GoldAnnotation {
    std::optional<GeonamesId> gazetteer_id;
    std::optional<double> latitude;
    std::optional<double> longitude;

    bool operator==(const GoldAnnotation&) const = default;
};

struct ToponymMention {
    std::string surface;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    std::size_t token_index = 0;  // first token covering the span
    bool re_aligned = false;      // span did not sit on a token boundary
    std::optional<GoldAnnotation> gold;

    bool operator==(const ToponymMention&) const = default;
};

struct Document {
    std::string doc_id;
    std::string text;
    std::vector<Token> tokens;
    std::vector<std::string> normalized_tokens;  // parallel to tokens
    std::vector<ToponymMention> toponyms;

    bool operator==(const Document&) const = default;
};

class CorpusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Whitespace tokenizer with leading/trailing punctuation stripped.
/// Internal punctuation (hyphens, apostrophes, periods) stays put.
inline std::vector<Token> tokenize(std::string_view text) {
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const std::int32_t len = static_cast<std::int32_t>(text.size());

    std::vector<Token> tokens;
    std::int32_t i = 0;
    while (i < len) {
        // skip whitespace
        std::int32_t start = i;
        UChar32 cp;
        U8_NEXT(s, i, len, cp);
        if (cp < 0 || u_isUWhiteSpace(cp)) continue;

        // extend to end of the whitespace-delimited chunk
        std::int32_t end = i;
        while (end < len) {
            std::int32_t next = end;
            U8_NEXT(s, next, len, cp);
            if (cp >= 0 && u_isUWhiteSpace(cp)) break;
            end = next;
        }
        i = end;

        // strip punctuation at both ends
        std::int32_t tok_start = start;
        std::int32_t tok_end = end;
        while (tok_start < tok_end) {
            std::int32_t p = tok_start;
            U8_NEXT(s, p, tok_end, cp);
            if (cp < 0 || !u_ispunct(cp)) break;
            tok_start = p;
        }
        while (tok_end > tok_start) {
            std::int32_t p = tok_end;
            U8_BACK_1(s, tok_start, p);
            std::int32_t q = p;
            U8_NEXT(s, q, tok_end, cp);
            if (cp < 0 || !u_ispunct(cp)) break;
            tok_end = p;
        }
        if (tok_start >= tok_end) continue;  // all punctuation

        tokens.push_back(Token{std::string(text.substr(tok_start, tok_end - tok_start)),
                               static_cast<std::size_t>(tok_start),
                               static_cast<std::size_t>(tok_end)});
    }
    return tokens;
}

struct RawMention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;  // optional; derived from text when empty
    std::optional<GoldAnnotation> gold;
};

/// Tokenize and attach mentions, computing each mention's first covering
/// token. Mentions that start mid-token are snapped to the covering token
/// and flagged re_aligned.
inline Document build_document(std::string doc_id, std::string text,
                               const std::vector<RawMention>& mentions) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.text = std::move(text);
    doc.tokens = tokenize(doc.text);
    doc.normalized_tokens.reserve(doc.tokens.size());
    for (const Token& t : doc.tokens) doc.normalized_tokens.push_back(normalize_name(t.surface));

    for (std::size_t mi = 0; mi < mentions.size(); ++mi) {
        const RawMention& raw = mentions[mi];
        if (raw.end > doc.text.size() || raw.start >= raw.end)
            throw CorpusError("document '" + doc.doc_id + "': toponym span [" +
                              std::to_string(raw.start) + ", " + std::to_string(raw.end) +
                              ") out of range");
        ToponymMention m;
        m.char_start = raw.start;
        m.char_end = raw.end;
        m.surface = raw.surface.empty() ? doc.text.substr(raw.start, raw.end - raw.start)
                                        : raw.surface;
        m.gold = raw.gold;

        // first token overlapping [start, end)
        bool found = false;
        for (std::size_t ti = 0; ti < doc.tokens.size(); ++ti) {
            const Token& t = doc.tokens[ti];
            if (t.char_end > m.char_start && t.char_start < m.char_end) {
                m.token_index = ti;
                m.re_aligned = t.char_start != m.char_start;
                found = true;
                break;
            }
        }
        if (!found)
            throw CorpusError("document '" + doc.doc_id + "': toponym span [" +
                              std::to_string(raw.start) + ", " + std::to_string(raw.end) +
                              ") covers no token");
        doc.toponyms.push_back(std::move(m));
    }
    return doc;
}

namespace detail {

inline std::optional<GoldAnnotation> parse_gold(const nlohmann::json& j, const std::string& path) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_object()) throw CorpusError(path + ": expected object");
    GoldAnnotation gold;
    if (j.contains("geonames_id")) {
        if (!j["geonames_id"].is_number_integer())
            throw CorpusError(path + ".geonames_id: expected integer");
        gold.gazetteer_id = j["geonames_id"].get<GeonamesId>();
    }
    if (j.contains("lat") || j.contains("lon")) {
        if (!j.contains("lat") || !j.contains("lon") || !j["lat"].is_number() ||
            !j["lon"].is_number())
            throw CorpusError(path + ": lat/lon must both be numbers");
        gold.latitude = j["lat"].get<double>();
        gold.longitude = j["lon"].get<double>();
    }
    if (!gold.gazetteer_id && !gold.latitude)
        throw CorpusError(path + ": gold needs geonames_id or lat/lon");
    return gold;
}

}  // namespace detail

/// Corpus JSON: {"documents": [{"doc_id", "text", "toponyms": [...]}, ...]}.
/// Offsets are byte offsets into the UTF-8 text. Unknown fields ignored.
inline std::vector<Document> load_corpus(std::istream& in) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw CorpusError(std::string("corpus is not valid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("documents") || !root["documents"].is_array())
        throw CorpusError("documents: expected top-level array");

    std::vector<Document> docs;
    const auto& jdocs = root["documents"];
    for (std::size_t di = 0; di < jdocs.size(); ++di) {
        const auto& jd = jdocs[di];
        const std::string path = "documents[" + std::to_string(di) + "]";
        if (!jd.is_object()) throw CorpusError(path + ": expected object");
        if (!jd.contains("doc_id") || !jd["doc_id"].is_string())
            throw CorpusError(path + ".doc_id: expected string");
        if (!jd.contains("text") || !jd["text"].is_string())
            throw CorpusError(path + ".text: expected string");

        std::vector<RawMention> mentions;
        if (jd.contains("toponyms")) {
            if (!jd["toponyms"].is_array()) throw CorpusError(path + ".toponyms: expected array");
            const auto& jtops = jd["toponyms"];
            for (std::size_t ti = 0; ti < jtops.size(); ++ti) {
                const auto& jt = jtops[ti];
                const std::string tpath = path + ".toponyms[" + std::to_string(ti) + "]";
                if (!jt.is_object()) throw CorpusError(tpath + ": expected object");
                if (!jt.contains("start") || !jt["start"].is_number_unsigned())
                    throw CorpusError(tpath + ".start: expected non-negative integer");
                if (!jt.contains("end") || !jt["end"].is_number_unsigned())
                    throw CorpusError(tpath + ".end: expected non-negative integer");
                RawMention raw;
                raw.start = jt["start"].get<std::size_t>();
                raw.end = jt["end"].get<std::size_t>();
                if (jt.contains("surface")) {
                    if (!jt["surface"].is_string())
                        throw CorpusError(tpath + ".surface: expected string");
                    raw.surface = jt["surface"].get<std::string>();
                }
                if (jt.contains("gold")) raw.gold = detail::parse_gold(jt["gold"], tpath + ".gold");
                mentions.push_back(std::move(raw));
            }
        }
        try {
            docs.push_back(build_document(jd["doc_id"].get<std::string>(),
                                          jd["text"].get<std::string>(), mentions));
        } catch (const CorpusError& e) {
            throw CorpusError(path + ": " + e.what());
        }
    }
    return docs;
}

inline nlohmann::ordered_json corpus_to_json(const std::vector<Document>& docs) {
    nlohmann::ordered_json jdocs = nlohmann::ordered_json::array();
    for (const Document& d : docs) {
        nlohmann::ordered_json jtops = nlohmann::ordered_json::array();
        for (const ToponymMention& m : d.toponyms) {
            nlohmann::ordered_json jt{{"start", m.char_start},
                                      {"end", m.char_end},
                                      {"surface", m.surface}};
            if (m.gold) {
                nlohmann::ordered_json jg = nlohmann::ordered_json::object();
                if (m.gold->gazetteer_id) jg["geonames_id"] = *m.gold->gazetteer_id;
                if (m.gold->latitude) {
                    jg["lat"] = *m.gold->latitude;
                    jg["lon"] = *m.gold->longitude;
                }
                jt["gold"] = std::move(jg);
            }
            jtops.push_back(std::move(jt));
        }
        jdocs.push_back(nlohmann::ordered_json{
            {"doc_id", d.doc_id}, {"text", d.text}, {"toponyms", std::move(jtops)}});
    }
    return nlohmann::ordered_json{{"documents", std::move(jdocs)}};
}

/// Token indices (run starts) of every maximal token run whose normalized
/// concatenation is in `names`. Multi-word names match consecutive runs.
inline std::vector<std::size_t> mentions_of(const Document& doc,
                                            const std::set<std::string>& names) {
    std::size_t max_words = 0;
    for (const std::string& n : names) {
        std::size_t words = n.empty() ? 0 : 1 + static_cast<std::size_t>(
                                                    std::count(n.begin(), n.end(), ' '));
        max_words = std::max(max_words, words);
    }
    std::vector<std::size_t> hits;
    const std::size_t n_tokens = doc.normalized_tokens.size();
    for (std::size_t i = 0; i < n_tokens;) {
        std::size_t matched_len = 0;
        std::string run;
        for (std::size_t len = 1; len <= max_words && i + len <= n_tokens; ++len) {
            if (len > 1) run += ' ';
            run += doc.normalized_tokens[i + len - 1];
            if (names.count(run)) matched_len = len;  // keep the longest match
        }
        if (matched_len > 0) {
            hits.push_back(i);
            i += matched_len;
        } else {
            ++i;
        }
    }
    return hits;
}

/// |i - j| over token indices.
inline std::size_t term_distance(std::size_t i, std::size_t j) {
    return i > j ? i - j : j - i;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_CORPUS_HPP
