#include "cylwave/field_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace cylwave {

namespace {

using nlohmann::json;

void byteswap_if_needed(std::vector<double>& values) {
    if constexpr (std::endian::native == std::endian::little) {
        (void)values;
    } else {
        for (double& v : values) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            std::uint64_t r = 0;
            for (int b = 0; b < 8; ++b) {
                r = (r << 8) | (bits & 0xffULL);
                bits >>= 8;
            }
            v = std::bit_cast<double>(r);
        }
    }
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw ValidationError("cannot open output file " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw ValidationError("cannot open input file " + path.string());
    return in;
}

json grid_sidecar(const Grid3& grid) {
    return json{{"dims", {grid.n[0], grid.n[1], grid.n[2]}},
                {"origin", {grid.box.lo[0], grid.box.lo[1], grid.box.lo[2]}},
                {"spacing", grid.h}};
}

Grid3 grid_from_sidecar(const json& j) {
    Box3 box;
    const auto dims = j.at("dims");
    const auto origin = j.at("origin");
    const double h = j.at("spacing").get<double>();
    for (int d = 0; d < 3; ++d) {
        box.lo[d] = origin.at(d).get<double>();
        box.hi[d] = box.lo[d] + h * (dims.at(d).get<int>() - 1);
    }
    return build_grid(box, h);
}

} // namespace

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_vtk(const std::filesystem::path& path, const ScalarField3& field,
               const std::string& array_name) {
    auto out = open_out(path, std::ios::out);
    const Grid3& g = field.grid;
    out << "# vtk DataFile Version 3.0\n";
    out << array_name << "\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2] << "\n";
    out << "ORIGIN " << fmt_double(g.box.lo[0]) << ' ' << fmt_double(g.box.lo[1]) << ' '
        << fmt_double(g.box.lo[2]) << "\n";
    out << "SPACING " << fmt_double(g.h) << ' ' << fmt_double(g.h) << ' ' << fmt_double(g.h)
        << "\n";
    out << "POINT_DATA " << g.count() << "\n";
    out << "SCALARS " << array_name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        out << fmt_double(field.values[i]) << '\n';
    }
}

void write_field_raw(const std::filesystem::path& base, const ScalarField3& field) {
    std::vector<double> values = field.values;
    byteswap_if_needed(values);
    {
        auto out = open_out(std::filesystem::path(base) += ".raw", std::ios::binary);
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    auto out = open_out(std::filesystem::path(base) += ".json", std::ios::out);
    out << grid_sidecar(field.grid).dump(2) << "\n";
}

ScalarField3 read_field_raw(const std::filesystem::path& base) {
    json j;
    {
        auto in = open_in(std::filesystem::path(base) += ".json", std::ios::in);
        in >> j;
    }
    ScalarField3 field(grid_from_sidecar(j));
    auto in = open_in(std::filesystem::path(base) += ".raw", std::ios::binary);
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != field.values.size() * sizeof(double)) {
        throw ValidationError("raw field file is shorter than the sidecar promises");
    }
    byteswap_if_needed(field.values);
    return field;
}

void write_record_csv(const std::filesystem::path& path, const BoundaryRecord& rec) {
    auto out = open_out(path, std::ios::out);
    out << "step,time,node_index,value\n";
    for (int m = 0; m <= rec.steps; ++m) {
        const double* level = rec.level(m);
        const std::string t = fmt_double(rec.time_of(m));
        for (std::size_t q = 0; q < rec.node_count(); ++q) {
            out << m << ',' << t << ',' << rec.face_nodes[q] << ',' << fmt_double(level[q])
                << '\n';
        }
    }
}

void write_record_raw(const std::filesystem::path& base, const BoundaryRecord& rec) {
    std::vector<double> values = rec.samples;
    byteswap_if_needed(values);
    {
        auto out = open_out(std::filesystem::path(base) += ".raw", std::ios::binary);
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    json j = grid_sidecar(rec.grid);
    j["kind"] = "boundary_record";
    j["front_axis"] = rec.front_axis;
    j["tau"] = rec.tau;
    j["steps"] = rec.steps;
    j["face_nodes"] = rec.face_nodes.size();
    auto out = open_out(std::filesystem::path(base) += ".json", std::ios::out);
    out << j.dump(2) << "\n";
}

BoundaryRecord read_record_raw(const std::filesystem::path& base) {
    json j;
    {
        auto in = open_in(std::filesystem::path(base) += ".json", std::ios::in);
        in >> j;
    }
    BoundaryRecord rec;
    rec.grid = grid_from_sidecar(j);
    rec.front_axis = j.at("front_axis").get<int>();
    rec.tau = j.at("tau").get<double>();
    rec.steps = j.at("steps").get<int>();
    rec.face_nodes = front_face_nodes(rec.grid, rec.front_axis);
    if (rec.face_nodes.size() != j.at("face_nodes").get<std::size_t>()) {
        throw DataMismatch("record sidecar face-node count does not match the grid");
    }
    rec.samples.resize(rec.levels() * rec.node_count());
    auto in = open_in(std::filesystem::path(base) += ".raw", std::ios::binary);
    in.read(reinterpret_cast<char*>(rec.samples.data()),
            static_cast<std::streamsize>(rec.samples.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != rec.samples.size() * sizeof(double)) {
        throw DataMismatch("raw record file is shorter than the sidecar promises");
    }
    byteswap_if_needed(rec.samples);
    return rec;
}

} // namespace cylwave
