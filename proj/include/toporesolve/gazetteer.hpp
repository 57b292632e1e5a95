#ifndef TOPORESOLVE_GAZETTEER_HPP
#define TOPORESOLVE_GAZETTEER_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toporesolve/geo.hpp"
#include "toporesolve/normalize.hpp"

namespace toporesolve {

using GeonamesId = std::int64_t;

struct GazetteerEntry {
    GeonamesId id = 0;
    std::string name;
    std::string ascii_name;
    std::vector<std::string> alternate_names;
    double latitude = 0.0;
    double longitude = 0.0;
    char feature_class = '\0';
    std::string feature_code;
    std::string country_code;
    std::string admin1_code;
    std::string admin2_code;
    std::int64_t population = 0;
    std::optional<BoundingBox> bounding_box;

    LatLon coordinates() const { return {latitude, longitude}; }
};

/// Administrative containment chain for one entry. Members hold entry ids;
/// a missing level is simply absent, never fabricated.
struct HierarchyChain {
    std::optional<GeonamesId> county;
    std::optional<GeonamesId> state;
    std::optional<GeonamesId> country;
    GeonamesId leaf = 0;

    bool operator==(const HierarchyChain&) const = default;
};

enum class Division { County, State, Country };

inline constexpr Division kAllDivisions[] = {Division::County, Division::State,
                                             Division::Country};

inline const char* division_name(Division d) {
    switch (d) {
        case Division::County: return "county";
        case Division::State: return "state";
        case Division::Country: return "country";
    }
    return "?";
}

struct IngestOptions {
    // Fraction of malformed lines tolerated before the whole ingest is
    // treated as a wrong-file error.
    double max_malformed_ratio = 0.10;
};

struct IngestReport {
    std::size_t ingested = 0;
    std::size_t malformed = 0;
    std::vector<std::size_t> malformed_line_numbers;  // 1-based, capped
};

class IngestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Gazetteer {
  public:
    void add(GazetteerEntry entry) {
        if (!valid_coordinates(entry.latitude, entry.longitude))
            throw std::invalid_argument("gazetteer entry coordinates out of range");
        if (entry.id <= 0) throw std::invalid_argument("gazetteer entry id must be positive");
        if (entries_.count(entry.id)) throw std::invalid_argument("duplicate gazetteer id");
        if (entry.bounding_box && !entry.bounding_box->valid())
            throw std::invalid_argument("invalid bounding box");

        const GeonamesId id = entry.id;
        for (const std::string& n : names_of(entry)) {
            std::string key = normalize_name(n);
            if (!key.empty()) name_index_[key].push_back(id);
        }
        if (entry.feature_class == 'A') {
            if (entry.feature_code == "ADM1" && !entry.admin1_code.empty()) {
                admin_index_.emplace(admin_key(entry.country_code, entry.admin1_code), id);
            } else if (entry.feature_code == "ADM2" && !entry.admin2_code.empty()) {
                admin_index_.emplace(
                    admin_key(entry.country_code, entry.admin1_code, entry.admin2_code), id);
            } else if (entry.feature_code.rfind("PCL", 0) == 0) {
                admin_index_.emplace(admin_key(entry.country_code), id);
            }
        }
        entries_.emplace(id, std::move(entry));
    }

    std::size_t size() const { return entries_.size(); }

    const GazetteerEntry* find(GeonamesId id) const {
        auto it = entries_.find(id);
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// All entries whose normalized primary/ascii/alternate name equals
    /// normalize_name(name), ascending id.
    std::vector<const GazetteerEntry*> lookup(std::string_view name) const {
        return lookup_normalized(normalize_name(name));
    }

    std::vector<const GazetteerEntry*> lookup_normalized(const std::string& key) const {
        std::vector<const GazetteerEntry*> out;
        auto it = name_index_.find(key);
        if (it == name_index_.end()) return out;
        std::vector<GeonamesId> ids = it->second;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        out.reserve(ids.size());
        for (GeonamesId id : ids) out.push_back(&entries_.at(id));
        return out;
    }

    std::optional<GeonamesId> admin_entry(std::string_view cc) const {
        return admin_find(admin_key(cc));
    }
    std::optional<GeonamesId> admin_entry(std::string_view cc, std::string_view a1) const {
        return admin_find(admin_key(cc, a1));
    }
    std::optional<GeonamesId> admin_entry(std::string_view cc, std::string_view a1,
                                          std::string_view a2) const {
        return admin_find(admin_key(cc, a1, a2));
    }

    HierarchyChain hierarchy_of(const GazetteerEntry& entry) const {
        HierarchyChain chain;
        chain.leaf = entry.id;
        if (entry.country_code.empty()) return chain;
        chain.country = admin_entry(entry.country_code);
        if (!entry.admin1_code.empty()) {
            chain.state = admin_entry(entry.country_code, entry.admin1_code);
            if (chain.state && !entry.admin2_code.empty())
                chain.county =
                    admin_entry(entry.country_code, entry.admin1_code, entry.admin2_code);
        }
        return chain;
    }

    const GazetteerEntry* ancestor_at(const HierarchyChain& chain, Division d) const {
        std::optional<GeonamesId> id;
        switch (d) {
            case Division::County: id = chain.county; break;
            case Division::State: id = chain.state; break;
            case Division::Country: id = chain.country; break;
        }
        return id ? find(*id) : nullptr;
    }

    /// Normalized primary + ascii + alternate names of an entry.
    std::set<std::string> name_set(const GazetteerEntry& entry) const {
        std::set<std::string> out;
        for (const std::string& n : names_of(entry)) {
            std::string key = normalize_name(n);
            if (!key.empty()) out.insert(key);
        }
        return out;
    }

    // Snapshot support: raw access to the indexes.
    const std::unordered_map<GeonamesId, GazetteerEntry>& entries() const { return entries_; }
    const std::unordered_map<std::string, std::vector<GeonamesId>>& name_index() const {
        return name_index_;
    }
    const std::unordered_map<std::string, GeonamesId>& admin_index() const {
        return admin_index_;
    }
    bool set_bounding_box(GeonamesId id, const BoundingBox& box) {
        auto it = entries_.find(id);
        if (it == entries_.end()) return false;
        it->second.bounding_box = box;
        return true;
    }

    void restore(std::unordered_map<GeonamesId, GazetteerEntry> entries,
                 std::unordered_map<std::string, std::vector<GeonamesId>> name_index,
                 std::unordered_map<std::string, GeonamesId> admin_index) {
        entries_ = std::move(entries);
        name_index_ = std::move(name_index);
        admin_index_ = std::move(admin_index);
    }

  private:
    static std::vector<std::string> names_of(const GazetteerEntry& e) {
        std::vector<std::string> out;
        out.push_back(e.name);
        if (!e.ascii_name.empty()) out.push_back(e.ascii_name);
        for (const std::string& a : e.alternate_names)
            if (!a.empty()) out.push_back(a);
        return out;
    }

    static std::string admin_key(std::string_view cc, std::string_view a1 = {},
                                 std::string_view a2 = {}) {
        std::string key(cc);
        if (!a1.empty() || !a2.empty()) {
            key += '\x1f';
            key += a1;
            if (!a2.empty()) {
                key += '\x1f';
                key += a2;
            }
        }
        return key;
    }

    std::optional<GeonamesId> admin_find(const std::string& key) const {
        auto it = admin_index_.find(key);
        if (it == admin_index_.end()) return std::nullopt;
        return it->second;
    }

    std::unordered_map<GeonamesId, GazetteerEntry> entries_;
    std::unordered_map<std::string, std::vector<GeonamesId>> name_index_;
    std::unordered_map<std::string, GeonamesId> admin_index_;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view s, double& out) {
    // from_chars for double is unreliable across stdlibs; go through strtod.
    std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && !buf.empty();
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::optional<GazetteerEntry> parse_geonames_line(std::string_view line) {
    auto f = split_tabs(line);
    if (f.size() != 19) return std::nullopt;

    GazetteerEntry e;
    if (!parse_int(f[0], e.id) || e.id <= 0) return std::nullopt;
    e.name = std::string(f[1]);
    if (e.name.empty()) return std::nullopt;
    e.ascii_name = std::string(f[2]);
    if (!f[3].empty()) {
        std::string_view alts = f[3];
        std::size_t start = 0;
        while (start <= alts.size()) {
            std::size_t comma = alts.find(',', start);
            std::string_view piece =
                comma == std::string_view::npos ? alts.substr(start) : alts.substr(start, comma - start);
            if (!piece.empty()) e.alternate_names.emplace_back(piece);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    if (!parse_double(f[4], e.latitude) || !parse_double(f[5], e.longitude)) return std::nullopt;
    if (!valid_coordinates(e.latitude, e.longitude)) return std::nullopt;
    e.feature_class = f[6].empty() ? '\0' : f[6][0];
    e.feature_code = std::string(f[7]);
    e.country_code = std::string(f[8]);
    e.admin1_code = std::string(f[10]);
    e.admin2_code = std::string(f[11]);
    if (!f[14].empty()) {
        if (!parse_int(f[14], e.population) || e.population < 0) return std::nullopt;
    }
    return e;
}

}  // namespace detail

/// Parse a GeoNames allCountries-format TSV stream into a Gazetteer.
/// Malformed lines are skipped and counted; too many of them means the
/// input is probably not a GeoNames dump and ingest fails outright.
inline Gazetteer ingest_geonames(std::istream& in, const IngestOptions& options = {},
                                 IngestReport* report = nullptr) {
    if (!in) throw IngestError("gazetteer stream is not readable");

    Gazetteer g;
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto entry = detail::parse_geonames_line(line);
        if (!entry || g.find(entry->id) != nullptr) {
            ++rep.malformed;
            if (rep.malformed_line_numbers.size() < 32)
                rep.malformed_line_numbers.push_back(line_no);
            continue;
        }
        g.add(std::move(*entry));
        ++rep.ingested;
    }
    if (in.bad()) throw IngestError("gazetteer stream failed while reading");

    const std::size_t total = rep.ingested + rep.malformed;
    if (total > 0 &&
        static_cast<double>(rep.malformed) > options.max_malformed_ratio * static_cast<double>(total)) {
        std::ostringstream msg;
        msg << "ingest failed: " << rep.malformed << " of " << total
            << " lines malformed (first bad lines:";
        for (std::size_t n : rep.malformed_line_numbers) msg << ' ' << n;
        msg << ")";
        throw IngestError(msg.str());
    }
    return g;
}

struct BoundingBoxReport {
    std::size_t applied = 0;
    std::size_t skipped = 0;  // unknown id, malformed, or antimeridian-crossing
};

/// Sidecar format: geonameid<TAB>min_lat<TAB>min_lon<TAB>max_lat<TAB>max_lon.
/// Boxes crossing the antimeridian (min_lon > max_lon) are rejected.
inline BoundingBoxReport load_bounding_boxes(Gazetteer& g, std::istream& in) {
    if (!in) throw IngestError("bounding-box stream is not readable");
    BoundingBoxReport rep;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = detail::split_tabs(line);
        GeonamesId id;
        BoundingBox box;
        if (f.size() != 5 || !detail::parse_int(f[0], id) ||
            !detail::parse_double(f[1], box.min_lat) || !detail::parse_double(f[2], box.min_lon) ||
            !detail::parse_double(f[3], box.max_lat) || !detail::parse_double(f[4], box.max_lon) ||
            !box.valid()) {
            ++rep.skipped;
            continue;
        }
        if (!g.set_bounding_box(id, box)) {
            ++rep.skipped;
            continue;
        }
        ++rep.applied;
    }
    return rep;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_GAZETTEER_HPP
