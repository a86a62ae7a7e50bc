#pragma once

namespace hashspread {

// Mean Earth radius (IUGG) in kilometers.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Great-circle distance in kilometers between two points given in degrees.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    return haversine_km(a.lat, a.lon, b.lat, b.lon);
}

}  // namespace hashspread
