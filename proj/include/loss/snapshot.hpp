#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace loss {

/// One field at one instant on a uniform grid. data is row-major, last axis fastest.
struct Snapshot {
    std::vector<std::uint64_t> dims;
    std::vector<double> min, max;
    double time = 0.0;
    std::string name;
    std::vector<double> data;

    std::size_t size() const;
    void validate() const;
    /// Coordinate of knot i along axis a.
    double coord(std::size_t a, std::uint64_t i) const;
};

void write_snapshot(std::ostream& os, const Snapshot& s);
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

} // namespace loss
