#include "kslg/snapshot.hpp"

#include "kslg/io.hpp"

#include <bit>
#include <cstring>

namespace kslg {

namespace {

void put_u32(std::string& out, std::uint32_t x) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int b = 0; b < 4; ++b) x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 4;
        return x;
    }

    double f64() {
        need(8);
        std::uint64_t x = 0;
        for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(x);
    }

    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw SnapshotError("snapshot truncated");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_snapshot(const Field& u, const Field& v, double t) {
    const GridSpec& g = u.grid();
    if (!(g == v.grid())) throw SnapshotError("u and v live on different grids");
    std::string out;
    out.reserve(48 + 16 * u.size());
    out.append("KSLG", 4);
    put_u32(out, kSnapshotVersion);
    put_u32(out, static_cast<std::uint32_t>(g.dim));
    put_u32(out, static_cast<std::uint32_t>(g.cells[0]));
    put_u32(out, static_cast<std::uint32_t>(g.cells[1]));
    put_f64(out, g.extent[0]);
    put_f64(out, g.extent[1]);
    put_f64(out, t);
    for (double x : u.values()) put_f64(out, x);
    for (double x : v.values()) put_f64(out, x);
    return out;
}

Snapshot decode_snapshot(std::string_view bytes) {
    Reader in(bytes);
    if (in.take(4) != "KSLG") throw SnapshotError("bad snapshot magic");
    const std::uint32_t version = in.u32();
    if (version != kSnapshotVersion) throw SnapshotError("unsupported snapshot version " + std::to_string(version));
    GridSpec g;
    g.dim = static_cast<int>(in.u32());
    g.cells[0] = static_cast<int>(in.u32());
    g.cells[1] = static_cast<int>(in.u32());
    g.extent[0] = in.f64();
    g.extent[1] = in.f64();
    try {
        g.validate();
    } catch (const GridError& e) {
        throw SnapshotError(std::string("snapshot grid invalid: ") + e.what());
    }
    Snapshot s;
    s.t = in.f64();
    std::vector<double> u(g.cell_count());
    std::vector<double> v(g.cell_count());
    for (double& x : u) x = in.f64();
    for (double& x : v) x = in.f64();
    if (!in.done()) throw SnapshotError("trailing bytes after snapshot payload");
    s.u = Field(g, std::move(u));
    s.v = Field(g, std::move(v));
    return s;
}

void write_snapshot(const std::filesystem::path& path, const Field& u, const Field& v, double t) {
    io::atomic_write(path, encode_snapshot(u, v, t));
}

Snapshot read_snapshot(const std::filesystem::path& path) { return decode_snapshot(io::read_file(path)); }

std::string fields_csv(const Field& u, const Field& v) {
    const GridSpec& g = u.grid();
    std::vector<std::string> header = g.dim == 2 ? std::vector<std::string>{"x", "y", "u", "v"}
                                                 : std::vector<std::string>{"x", "u", "v"};
    io::CsvWriter csv(header);
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto x = g.center(c);
        if (g.dim == 2) {
            csv.row({io::format_double(x[0]), io::format_double(x[1]), io::format_double(u[c]), io::format_double(v[c])});
        } else {
            csv.row({io::format_double(x[0]), io::format_double(u[c]), io::format_double(v[c])});
        }
    }
    return csv.str();
}

}  // namespace kslg
