#include "og/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <system_error>

#include "og/errors.hpp"

namespace og {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

class Writer {
public:
    void bytes(std::string_view s) { out_.append(s); }
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) { little(v); }
    void u32(std::uint32_t v) { little(v); }
    void f32(float v) { little(std::bit_cast<std::uint32_t>(v)); }
    std::string take() { return std::move(out_); }

private:
    template <typename T>
    void little(T v) {
        for (std::size_t b = 0; b < sizeof(T); ++b) {
            out_.push_back(static_cast<char>((v >> (8 * b)) & 0xFFU));
        }
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::string_view bytes(std::size_t n, const char* field) {
        need(n, field);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8(const char* field) { return static_cast<std::uint8_t>(little<1>(field)); }
    std::uint16_t u16(const char* field) { return static_cast<std::uint16_t>(little<2>(field)); }
    std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(little<4>(field)); }
    float f32(const char* field) { return std::bit_cast<float>(u32(field)); }

    std::size_t remaining() const { return data_.size() - pos_; }
    void need(std::size_t n, const char* field) const {
        if (remaining() < n) {
            throw FormatError(std::string("payload shorter than header promises (") + field + ")");
        }
    }

private:
    template <std::size_t N>
    std::uint64_t little(const char* field) {
        need(N, field);
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < N; ++b) {
            v |= std::uint64_t{static_cast<unsigned char>(data_[pos_ + b])} << (8 * b);
        }
        pos_ += N;
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

constexpr std::string_view kMagic = "OGRD";

void write_header(Writer& w, PayloadKind kind, const GridMeta& meta) {
    w.bytes(kMagic);
    w.u8(kOgrdVersion);
    w.u8(static_cast<std::uint8_t>(kind));
    w.u8(0);
    w.u8(0);
    w.u32(meta.nx);
    w.u32(meta.ny);
    w.u32(meta.nz);
    w.f32(meta.voxel_size);
    for (float c : meta.origin) {
        w.f32(c);
    }
}

GridMeta read_header(Reader& r, PayloadKind expected) {
    if (r.remaining() < 4 || r.bytes(4, "magic") != kMagic) {
        throw FormatError("bad magic");
    }
    const auto version = r.u8("version");
    if (version != kOgrdVersion) {
        throw FormatError("unsupported version " + std::to_string(version));
    }
    const auto kind = r.u8("payload kind");
    if (kind != static_cast<std::uint8_t>(expected)) {
        throw FormatError("payload kind " + std::to_string(kind) + ", expected " +
                          std::to_string(static_cast<int>(expected)));
    }
    if (r.u8("reserved") != 0 || r.u8("reserved") != 0) {
        throw FormatError("reserved bytes must be zero");
    }
    GridMeta meta;
    meta.nx = r.u32("nx");
    meta.ny = r.u32("ny");
    meta.nz = r.u32("nz");
    meta.voxel_size = r.f32("voxel_size");
    for (auto& c : meta.origin) {
        c = r.f32("origin");
    }
    if (meta.nx == 0 || meta.ny == 0 || meta.nz == 0) {
        throw FormatError("dims must be >= 1");
    }
    if (!std::isfinite(meta.voxel_size) || meta.voxel_size <= 0.0F) {
        throw FormatError("voxel_size must be positive and finite");
    }
    for (float c : meta.origin) {
        if (!std::isfinite(c)) {
            throw FormatError("origin must be finite");
        }
    }
    meta.validate();  // SizeError on overflow
    return meta;
}

void expect_end(const Reader& r) {
    if (r.remaining() != 0) {
        throw FormatError(std::to_string(r.remaining()) + " trailing bytes after payload");
    }
}

// Rethrows constructor contract failures on decoded data as format errors.
template <typename Fn>
auto build(Fn&& fn) {
    try {
        return fn();
    } catch (const ContractViolation& e) {
        throw FormatError(e.what());
    } catch (const DimensionError& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

std::string encode(const SemanticGrid& grid) {
    Writer w;
    write_header(w, PayloadKind::labels, grid.meta());
    const auto& table = grid.class_table();
    w.u16(static_cast<std::uint16_t>(table.size()));
    for (const auto& name : table) {
        if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw ContractViolation("class name too long");
        }
        w.u16(static_cast<std::uint16_t>(name.size()));
        w.bytes(name);
    }
    const auto labels = grid.labels();
    w.bytes({reinterpret_cast<const char*>(labels.data()), labels.size()});
    return w.take();
}

std::string encode(const AffinityField& field) {
    Writer w;
    write_header(w, PayloadKind::affinity, field.meta());
    for (const auto& v : field.values()) {
        w.f32(v.x);
        w.f32(v.y);
        w.f32(v.z);
    }
    return w.take();
}

std::string encode(const InstanceMap& map) {
    Writer w;
    write_header(w, PayloadKind::instances, map.meta());
    for (InstanceId id : map.ids()) {
        w.u32(id);
    }
    w.u32(static_cast<std::uint32_t>(map.instances().size()));
    for (const auto& rec : map.instances()) {
        w.u32(rec.id);
        w.u8(rec.class_id);
        w.f32(rec.center.x);
        w.f32(rec.center.y);
        w.f32(rec.center.z);
        w.u32(rec.voxel_count);
    }
    return w.take();
}

std::string encode(const LossMask& mask) {
    Writer w;
    write_header(w, PayloadKind::mask, mask.meta());
    for (std::uint8_t f : mask.flags()) {
        w.u8(f != 0 ? 1 : 0);
    }
    return w.take();
}

SemanticGrid decode_grid(std::string_view bytes) {
    Reader r(bytes);
    const GridMeta meta = read_header(r, PayloadKind::labels);
    const auto count = r.u16("class table count");
    std::vector<std::string> table;
    table.reserve(count);
    for (std::uint16_t c = 0; c < count; ++c) {
        const auto len = r.u16("class name length");
        table.emplace_back(r.bytes(len, "class name"));
    }
    const auto payload = r.bytes(meta.cell_count(), "labels");
    expect_end(r);
    std::vector<ClassId> labels(payload.begin(), payload.end());
    return build([&] { return SemanticGrid(meta, std::move(labels), std::move(table)); });
}

AffinityField decode_affinity(std::string_view bytes) {
    Reader r(bytes);
    const GridMeta meta = read_header(r, PayloadKind::affinity);
    r.need(meta.cell_count() * 12, "affinity values");
    std::vector<Vec3f> values(meta.cell_count());
    for (auto& v : values) {
        v.x = r.f32("affinity");
        v.y = r.f32("affinity");
        v.z = r.f32("affinity");
    }
    expect_end(r);
    return build([&] { return AffinityField(meta, std::move(values)); });
}

InstanceMap decode_instances(std::string_view bytes) {
    Reader r(bytes);
    const GridMeta meta = read_header(r, PayloadKind::instances);
    r.need(meta.cell_count() * 4, "instance ids");
    std::vector<InstanceId> ids(meta.cell_count());
    for (auto& id : ids) {
        id = r.u32("instance id");
    }
    const auto count = r.u32("instance count");
    r.need(std::size_t{count} * 21, "instance records");
    std::vector<InstanceRecord> records(count);
    for (auto& rec : records) {
        rec.id = r.u32("record id");
        rec.class_id = r.u8("record class");
        rec.center.x = r.f32("record center");
        rec.center.y = r.f32("record center");
        rec.center.z = r.f32("record center");
        rec.voxel_count = r.u32("record voxel_count");
    }
    expect_end(r);
    return build([&] { return InstanceMap(meta, std::move(ids), std::move(records)); });
}

LossMask decode_mask(std::string_view bytes) {
    Reader r(bytes);
    const GridMeta meta = read_header(r, PayloadKind::mask);
    const auto payload = r.bytes(meta.cell_count(), "mask flags");
    expect_end(r);
    std::vector<std::uint8_t> flags(payload.begin(), payload.end());
    for (auto f : flags) {
        if (f > 1) {
            throw FormatError("mask flag must be 0 or 1");
        }
    }
    return LossMask(meta, std::move(flags));
}

PayloadKind peek_kind(std::string_view bytes) {
    if (bytes.size() < 8 || bytes.substr(0, 4) != kMagic) {
        throw FormatError("bad magic");
    }
    const auto kind = static_cast<std::uint8_t>(bytes[5]);
    if (kind < 1 || kind > 4) {
        throw FormatError("unknown payload kind " + std::to_string(kind));
    }
    return static_cast<PayloadKind>(kind);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
    }
    return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::system_error(errno, std::generic_category(),
                                    "cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::system_error(EIO, std::generic_category(), "cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void save_grid(const SemanticGrid& grid, const std::filesystem::path& path) {
    write_file_atomic(path, encode(grid));
}
void save_affinity(const AffinityField& field, const std::filesystem::path& path) {
    write_file_atomic(path, encode(field));
}
void save_instances(const InstanceMap& map, const std::filesystem::path& path) {
    write_file_atomic(path, encode(map));
}
void save_mask(const LossMask& mask, const std::filesystem::path& path) {
    write_file_atomic(path, encode(mask));
}

SemanticGrid load_grid(const std::filesystem::path& path) { return decode_grid(read_file(path)); }
AffinityField load_affinity(const std::filesystem::path& path) {
    return decode_affinity(read_file(path));
}
InstanceMap load_instances(const std::filesystem::path& path) {
    return decode_instances(read_file(path));
}
LossMask load_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

}  // namespace og
