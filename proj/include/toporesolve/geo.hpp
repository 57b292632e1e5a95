#ifndef TOPORESOLVE_GEO_HPP
#define TOPORESOLVE_GEO_HPP

#include <cmath>
#include <stdexcept>

namespace toporesolve {

// Mean Earth radius (IUGG), km.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

struct BoundingBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;

    bool valid() const {
        return min_lat <= max_lat && min_lon <= max_lon &&
               min_lat >= -90.0 && max_lat <= 90.0 &&
               min_lon >= -180.0 && max_lon <= 180.0;
    }
};

inline bool valid_coordinates(double lat, double lon) {
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

/// Great-circle distance in km between two (lat, lon) pairs in degrees.
inline double haversine_km(const LatLon& a, const LatLon& b) {
    if (!valid_coordinates(a.lat, a.lon) || !valid_coordinates(b.lat, b.lon))
        throw std::invalid_argument("haversine_km: coordinates out of range");

    constexpr double deg2rad = M_PI / 180.0;
    const double lat1 = a.lat * deg2rad;
    const double lat2 = b.lat * deg2rad;
    const double dlat = (b.lat - a.lat) * deg2rad;
    const double dlon = (b.lon - a.lon) * deg2rad;

    const double sl = std::sin(dlat / 2.0);
    const double so = std::sin(dlon / 2.0);
    double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    if (h > 1.0) h = 1.0;
    if (h < 0.0) h = 0.0;
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

/// Closed-interval containment test.
inline bool in_bounding_box(const LatLon& p, const BoundingBox& box) {
    return p.lat >= box.min_lat && p.lat <= box.max_lat &&
           p.lon >= box.min_lon && p.lon <= box.max_lon;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_GEO_HPP
