#include "hashspread/geo.hpp"

#include <cmath>

namespace hashspread {

namespace {
constexpr double kPi = 3.14159265358979323846;

double to_rad(double deg) { return deg * kPi / 180.0; }
}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    double dlat = to_rad(lat2 - lat1);
    double dlon = to_rad(lon2 - lon1);
    double slat = std::sin(dlat / 2.0);
    double slon = std::sin(dlon / 2.0);
    double a = slat * slat + std::cos(to_rad(lat1)) * std::cos(to_rad(lat2)) * slon * slon;
    if (a > 1.0) a = 1.0;
    if (a < 0.0) a = 0.0;
    double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
    return kEarthRadiusKm * c;
}

}  // namespace hashspread
