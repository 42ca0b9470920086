#include "loss/snapshot.hpp"

#include "loss/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace loss {

namespace {

constexpr char kMagic[8] = {'L', 'O', 'S', 'S', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
        fail(ErrorCode::io, "snapshot truncated");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

} // namespace

std::size_t Snapshot::size() const
{
    std::size_t n = 1;
    for (auto d : dims)
        n *= static_cast<std::size_t>(d);
    return dims.empty() ? 0 : n;
}

void Snapshot::validate() const
{
    require(!dims.empty() && dims.size() <= 3, ErrorCode::dimension, "snapshot needs 1 to 3 dimensions");
    require(min.size() == dims.size() && max.size() == dims.size(), ErrorCode::dimension, "snapshot extents mismatch");
    require(data.size() == size(), ErrorCode::dimension, "snapshot payload length mismatch");
    require(name.size() <= 0xffff, ErrorCode::dimension, "snapshot name too long");
}

double Snapshot::coord(std::size_t a, std::uint64_t i) const
{
    if (dims[a] <= 1)
        return min[a];
    return min[a] + static_cast<double>(i) * (max[a] - min[a]) / static_cast<double>(dims[a] - 1);
}

void write_snapshot(std::ostream& os, const Snapshot& s)
{
    s.validate();
    os.write(kMagic, 8);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.dims.size()));
    for (auto d : s.dims)
        put<std::uint64_t>(os, d);
    for (std::size_t a = 0; a < s.dims.size(); ++a) {
        put<double>(os, s.min[a]);
        put<double>(os, s.max[a]);
    }
    put<double>(os, s.time);
    put<std::uint16_t>(os, static_cast<std::uint16_t>(s.name.size()));
    os.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
    if constexpr (std::endian::native == std::endian::little)
        os.write(reinterpret_cast<const char*>(s.data.data()), static_cast<std::streamsize>(s.data.size() * 8));
    else
        for (double v : s.data)
            put<double>(os, v);
    if (!os)
        fail(ErrorCode::io, "snapshot write failed");
}

void write_snapshot(const std::string& path, const Snapshot& s)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        fail(ErrorCode::io, "cannot create snapshot '" + path + "'");
    write_snapshot(os, s);
}

Snapshot read_snapshot(std::istream& is)
{
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        fail(ErrorCode::io, "not a snapshot (bad magic)");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion)
        fail(ErrorCode::io, "unsupported snapshot version " + std::to_string(version));
    const auto nd = get<std::uint32_t>(is);
    if (nd < 1 || nd > 3)
        fail(ErrorCode::io, "snapshot has " + std::to_string(nd) + " dimensions");
    Snapshot s;
    for (std::uint32_t a = 0; a < nd; ++a)
        s.dims.push_back(get<std::uint64_t>(is));
    for (std::uint32_t a = 0; a < nd; ++a) {
        s.min.push_back(get<double>(is));
        s.max.push_back(get<double>(is));
    }
    s.time = get<double>(is);
    const auto len = get<std::uint16_t>(is);
    s.name.resize(len);
    if (len && !is.read(s.name.data(), len))
        fail(ErrorCode::io, "snapshot truncated");
    std::uint64_t n = 1;
    for (auto d : s.dims) {
        if (d == 0 || n > (std::uint64_t{1} << 34) / d)
            fail(ErrorCode::io, "snapshot dimensions out of range");
        n *= d;
    }
    s.data.resize(static_cast<std::size_t>(n));
    if constexpr (std::endian::native == std::endian::little) {
        if (!is.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(n * 8)))
            fail(ErrorCode::io, "snapshot truncated");
    } else {
        for (auto& v : s.data)
            v = get<double>(is);
    }
    return s;
}

Snapshot read_snapshot(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        fail(ErrorCode::io, "cannot open snapshot '" + path + "'");
    return read_snapshot(is);
}

} // namespace loss
