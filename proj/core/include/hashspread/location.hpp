#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashspread/geo.hpp"

namespace hashspread {

// Compact reference into a LocationTable.
using LocationRef = std::uint32_t;

struct LocationInfo {
    std::string id;
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
    std::uint64_t post_count = 0;
    std::uint32_t rank = 0;  // 1-based, by post_count descending

    GeoPoint point() const { return {lat, lon}; }
};

class LocationTable {
public:
    LocationTable() = default;

    // Columns: location_id,name,lat,lon (header required). Throws on
    // duplicate ids or out-of-range coordinates.
    static LocationTable from_csv(const std::string& path);
    static LocationTable from_csv(std::istream& in);

    LocationRef add(LocationInfo info);

    std::optional<LocationRef> find(std::string_view id) const;
    const LocationInfo& at(LocationRef ref) const { return rows_.at(ref); }
    std::uint32_t size() const { return static_cast<std::uint32_t>(rows_.size()); }
    bool empty() const { return rows_.empty(); }

    // Recomputes post counts and the 1-based popularity ranks (ties broken by
    // smaller location id).
    void assign_counts(const std::vector<std::uint64_t>& counts_by_ref);

    // Location refs ordered rank 1..N.
    std::vector<LocationRef> by_rank() const;

    const std::vector<LocationInfo>& rows() const { return rows_; }

private:
    std::vector<LocationInfo> rows_;
    std::unordered_map<std::string, LocationRef> by_id_;
};

}  // namespace hashspread
