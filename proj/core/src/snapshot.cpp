#include "blwave/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace blwave {

static_assert(std::endian::native == std::endian::little, "BLK1 writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'B', 'L', 'K', '1'};
constexpr std::size_t kHeader = 4 + 4 + 4 + 8 + 8;

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void write_header(std::ofstream& os, const Grid2D& g) {
    os.write(kMagic, 4);
    put<std::uint32_t>(os, std::uint32_t(g.Nx()));
    put<std::uint32_t>(os, std::uint32_t(g.Ny()));
    put<double>(os, g.Lx());
    put<double>(os, g.Ly());
}

void write_payload(std::ofstream& os, const Field2D& f) {
    os.write(reinterpret_cast<const char*>(f.values().data()),
             std::streamsize(f.values().size() * sizeof(double)));
}

struct Raw {
    Grid2D grid;
    std::vector<RealVec> payloads;
    std::vector<double> trailer;
};

Raw read_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() < kHeader || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    std::uint32_t nx, ny;
    double lx, ly;
    std::memcpy(&nx, buf.data() + 4, 4);
    std::memcpy(&ny, buf.data() + 8, 4);
    std::memcpy(&lx, buf.data() + 12, 8);
    std::memcpy(&ly, buf.data() + 20, 8);
    Raw r{Grid2D(lx, ly, int(nx), int(ny)), {}, {}};
    const std::size_t block = std::size_t(nx) * ny * sizeof(double);
    const std::size_t rest = buf.size() - kHeader;
    const std::size_t count = rest / block;
    const std::size_t tail = rest % block;
    if (tail % sizeof(double) != 0) throw std::runtime_error("snapshot: truncated " + path);
    const char* p = buf.data() + kHeader;
    for (std::size_t i = 0; i < count; ++i, p += block) {
        RealVec v(std::size_t(nx) * ny);
        std::memcpy(v.data(), p, block);
        r.payloads.push_back(std::move(v));
    }
    r.trailer.resize(tail / sizeof(double));
    if (tail) std::memcpy(r.trailer.data(), p, tail);
    return r;
}

}  // namespace

void write_snapshot(const std::string& path, const Field2D& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot write " + path);
    write_header(os, f.grid());
    write_payload(os, f);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

void write_snapshot(const std::string& path, const FieldPair& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot write " + path);
    write_header(os, p.grid());
    write_payload(os, p.phi1);
    write_payload(os, p.phi2);
    put<double>(os, p.gx);
    put<double>(os, p.gy);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Field2D read_field_snapshot(const std::string& path) {
    Raw r = read_raw(path);
    if (r.payloads.size() != 1 || !r.trailer.empty())
        throw std::runtime_error("snapshot: expected one payload in " + path);
    return Field2D(r.grid, std::move(r.payloads[0]));
}

FieldPair read_pair_snapshot(const std::string& path) {
    Raw r = read_raw(path);
    if (r.payloads.size() != 2 || (r.trailer.size() != 0 && r.trailer.size() != 2))
        throw std::runtime_error("snapshot: expected two payloads in " + path);
    FieldPair p(Field2D(r.grid, std::move(r.payloads[0])), Field2D(r.grid, std::move(r.payloads[1])));
    if (r.trailer.size() == 2) {
        p.gx = r.trailer[0];
        p.gy = r.trailer[1];
    }
    return p;
}

}  // namespace blwave
