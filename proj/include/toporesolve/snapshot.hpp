#ifndef TOPORESOLVE_SNAPSHOT_HPP
#define TOPORESOLVE_SNAPSHOT_HPP

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "toporesolve/gazetteer.hpp"

namespace toporesolve {

inline constexpr char kSnapshotMagic[8] = {'T', 'O', 'P', 'O', 'R', 'S', 'N', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw SnapshotError("snapshot truncated");
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    std::uint32_t len;
    read_pod(in, len);
    if (len > (1u << 28)) throw SnapshotError("snapshot corrupt: oversized string");
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw SnapshotError("snapshot truncated");
    return s;
}

}  // namespace detail

inline void save_snapshot(const Gazetteer& g, std::ostream& out) {
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    detail::write_pod(out, kSnapshotVersion);

    detail::write_pod(out, static_cast<std::uint64_t>(g.entries().size()));
    for (const auto& [id, e] : g.entries()) {
        detail::write_pod(out, e.id);
        detail::write_string(out, e.name);
        detail::write_string(out, e.ascii_name);
        detail::write_pod(out, static_cast<std::uint32_t>(e.alternate_names.size()));
        for (const std::string& a : e.alternate_names) detail::write_string(out, a);
        detail::write_pod(out, e.latitude);
        detail::write_pod(out, e.longitude);
        detail::write_pod(out, e.feature_class);
        detail::write_string(out, e.feature_code);
        detail::write_string(out, e.country_code);
        detail::write_string(out, e.admin1_code);
        detail::write_string(out, e.admin2_code);
        detail::write_pod(out, e.population);
        detail::write_pod(out, static_cast<std::uint8_t>(e.bounding_box ? 1 : 0));
        if (e.bounding_box) {
            detail::write_pod(out, e.bounding_box->min_lat);
            detail::write_pod(out, e.bounding_box->min_lon);
            detail::write_pod(out, e.bounding_box->max_lat);
            detail::write_pod(out, e.bounding_box->max_lon);
        }
    }

    detail::write_pod(out, static_cast<std::uint64_t>(g.name_index().size()));
    for (const auto& [key, ids] : g.name_index()) {
        detail::write_string(out, key);
        detail::write_pod(out, static_cast<std::uint32_t>(ids.size()));
        for (GeonamesId id : ids) detail::write_pod(out, id);
    }

    detail::write_pod(out, static_cast<std::uint64_t>(g.admin_index().size()));
    for (const auto& [key, id] : g.admin_index()) {
        detail::write_string(out, key);
        detail::write_pod(out, id);
    }

    if (!out) throw SnapshotError("snapshot write failed");
}

inline Gazetteer load_snapshot(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
        throw SnapshotError("not a gazetteer snapshot (bad magic)");
    std::uint32_t version;
    detail::read_pod(in, version);
    if (version != kSnapshotVersion)
        throw SnapshotError("snapshot version " + std::to_string(version) +
                            " unsupported (expected " + std::to_string(kSnapshotVersion) + ")");

    std::unordered_map<GeonamesId, GazetteerEntry> entries;
    std::uint64_t n_entries;
    detail::read_pod(in, n_entries);
    entries.reserve(n_entries);
    for (std::uint64_t i = 0; i < n_entries; ++i) {
        GazetteerEntry e;
        detail::read_pod(in, e.id);
        e.name = detail::read_string(in);
        e.ascii_name = detail::read_string(in);
        std::uint32_t n_alts;
        detail::read_pod(in, n_alts);
        e.alternate_names.reserve(n_alts);
        for (std::uint32_t j = 0; j < n_alts; ++j)
            e.alternate_names.push_back(detail::read_string(in));
        detail::read_pod(in, e.latitude);
        detail::read_pod(in, e.longitude);
        detail::read_pod(in, e.feature_class);
        e.feature_code = detail::read_string(in);
        e.country_code = detail::read_string(in);
        e.admin1_code = detail::read_string(in);
        e.admin2_code = detail::read_string(in);
        detail::read_pod(in, e.population);
        std::uint8_t has_box;
        detail::read_pod(in, has_box);
        if (has_box) {
            BoundingBox box;
            detail::read_pod(in, box.min_lat);
            detail::read_pod(in, box.min_lon);
            detail::read_pod(in, box.max_lat);
            detail::read_pod(in, box.max_lon);
            e.bounding_box = box;
        }
        entries.emplace(e.id, std::move(e));
    }

    std::unordered_map<std::string, std::vector<GeonamesId>> name_index;
    std::uint64_t n_names;
    detail::read_pod(in, n_names);
    name_index.reserve(n_names);
    for (std::uint64_t i = 0; i < n_names; ++i) {
        std::string key = detail::read_string(in);
        std::uint32_t n_ids;
        detail::read_pod(in, n_ids);
        std::vector<GeonamesId> ids(n_ids);
        for (auto& id : ids) detail::read_pod(in, id);
        name_index.emplace(std::move(key), std::move(ids));
    }

    std::unordered_map<std::string, GeonamesId> admin_index;
    std::uint64_t n_admin;
    detail::read_pod(in, n_admin);
    admin_index.reserve(n_admin);
    for (std::uint64_t i = 0; i < n_admin; ++i) {
        std::string key = detail::read_string(in);
        GeonamesId id;
        detail::read_pod(in, id);
        admin_index.emplace(std::move(key), id);
    }

    Gazetteer g;
    g.restore(std::move(entries), std::move(name_index), std::move(admin_index));
    return g;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_SNAPSHOT_HPP
