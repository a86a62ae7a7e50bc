#include "hashspread/location.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "hashspread/csv.hpp"

namespace hashspread {

LocationTable LocationTable::from_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open locations file: " + path);
    return from_csv(in);
}

LocationTable LocationTable::from_csv(std::istream& in) {
    LocationTable table;
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error("locations CSV is empty");
    if (fields.size() < 4 || fields[0] != "location_id" || fields[1] != "name" ||
        fields[2] != "lat" || fields[3] != "lon") {
        throw std::runtime_error("locations CSV header must be location_id,name,lat,lon");
    }
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() < 4) {
            throw std::runtime_error("locations CSV: short row at line " +
                                     std::to_string(reader.line()));
        }
        LocationInfo info;
        info.id = fields[0];
        info.name = fields[1];
        try {
            info.lat = std::stod(fields[2]);
            info.lon = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw std::runtime_error("locations CSV: bad coordinate at line " +
                                     std::to_string(reader.line()));
        }
        table.add(std::move(info));
    }
    return table;
}

LocationRef LocationTable::add(LocationInfo info) {
    if (info.lat < -90.0 || info.lat > 90.0) {
        throw std::runtime_error("latitude out of range for location " + info.id);
    }
    if (info.lon < -180.0 || info.lon > 180.0) {
        throw std::runtime_error("longitude out of range for location " + info.id);
    }
    auto [it, inserted] = by_id_.emplace(info.id, static_cast<LocationRef>(rows_.size()));
    if (!inserted) throw std::runtime_error("duplicate location id: " + info.id);
    rows_.push_back(std::move(info));
    return it->second;
}

std::optional<LocationRef> LocationTable::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

void LocationTable::assign_counts(const std::vector<std::uint64_t>& counts_by_ref) {
    if (counts_by_ref.size() != rows_.size()) {
        throw std::invalid_argument("count vector size does not match location table");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i].post_count = counts_by_ref[i];

    std::vector<LocationRef> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<LocationRef>(i);
    std::sort(order.begin(), order.end(), [this](LocationRef a, LocationRef b) {
        if (rows_[a].post_count != rows_[b].post_count) {
            return rows_[a].post_count > rows_[b].post_count;
        }
        return rows_[a].id < rows_[b].id;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        rows_[order[i]].rank = static_cast<std::uint32_t>(i + 1);
    }
}

std::vector<LocationRef> LocationTable::by_rank() const {
    std::vector<LocationRef> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<LocationRef>(i);
    std::sort(order.begin(), order.end(),
              [this](LocationRef a, LocationRef b) { return rows_[a].rank < rows_[b].rank; });
    return order;
}

}  // namespace hashspread
