#include "brdf/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace brdf {

namespace {

int parse_obj_index(const std::string& token, std::size_t vertex_count) {
    // "v", "v/vt", "v/vt/vn", "v//vn" forms; only the position index matters
    std::size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    long idx = std::strtol(head.c_str(), nullptr, 10);
    if (idx < 0)
        idx = static_cast<long>(vertex_count) + idx + 1;
    if (idx < 1 || idx > static_cast<long>(vertex_count))
        throw FormatError("OBJ: face index " + head + " out of range");
    return static_cast<int>(idx - 1);
}

} // namespace

SegmentedMesh read_segmented_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open OBJ file: " + path);

    SegmentedMesh mesh;
    int current_label = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#')
            continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw FormatError(path + ":" + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "g" || tag == "o") {
            if (tag == "g") {
                current_label = mesh.face_count;
                mesh.face_count += 1;
            }
        } else if (tag == "f") {
            if (current_label < 0)
                throw FormatError(path + ":" + std::to_string(line_no) +
                                  ": unlabeled geometry (face before any group)");
            std::vector<int> poly;
            std::string token;
            while (ls >> token)
                poly.push_back(parse_obj_index(token, mesh.vertices.size()));
            if (poly.size() < 3)
                throw FormatError(path + ":" + std::to_string(line_no) + ": face with <3 vertices");
            for (std::size_t c = 1; c + 1 < poly.size(); ++c) {
                mesh.triangles.push_back({poly[0], poly[c], poly[c + 1]});
                mesh.labels.push_back(current_label);
            }
        }
    }
    if (mesh.face_count == 0)
        throw FormatError(path + ": no face groups found");

    mesh.drop_degenerate_triangles();
    mesh.validate();
    mesh.manifold_warning = !mesh.is_watertight();
    return mesh;
}

void write_segmented_obj(const SegmentedMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write OBJ file: " + path);

    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9f %.9f %.9f\n", v.x, v.y, v.z);
        out << buf;
    }
    for (int f = 0; f < mesh.face_count; ++f) {
        out << "g face_" << f << "\n";
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            if (mesh.labels[t] != f)
                continue;
            const Tri& tr = mesh.triangles[t];
            out << "f " << tr[0] + 1 << " " << tr[1] + 1 << " " << tr[2] + 1 << "\n";
        }
    }
    if (!out)
        throw FormatError("write failed: " + path);
}

namespace {

constexpr std::uint32_t kContainerVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value, const std::string& path, const char* what) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in)
        throw FormatError(path + ": truncated reading " + what + " at offset " +
                          std::to_string(static_cast<long long>(in.tellg())));
}

void read_field(std::ifstream& in, ScalarField3& f, const std::string& path) {
    std::size_t n = static_cast<std::size_t>(f.resolution) * f.resolution * f.resolution;
    std::size_t offset = static_cast<std::size_t>(in.tellg());
    f.values.resize(n);
    in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * 4));
    if (!in)
        throw FormatError(path + ": payload size mismatch, field of " + std::to_string(n * 4) +
                          " bytes at offset " + std::to_string(offset) + " is truncated");
}

} // namespace

void write_brdf(const BrDf& b, const std::string& path) {
    b.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write container: " + path);

    out.write("BRDF", 4);
    write_raw(out, kContainerVersion);
    write_raw(out, static_cast<std::uint32_t>(b.resolution()));
    write_raw(out, static_cast<std::uint32_t>(b.face_count()));
    write_raw(out, b.truncation());
    write_raw(out, b.transform().center.x);
    write_raw(out, b.transform().center.y);
    write_raw(out, b.transform().center.z);
    write_raw(out, b.transform().scale);
    out.write(reinterpret_cast<const char*>(b.sdf.values.data()),
              static_cast<std::streamsize>(b.sdf.values.size() * 4));
    for (const auto& udf : b.udfs)
        out.write(reinterpret_cast<const char*>(udf.values.data()),
                  static_cast<std::streamsize>(udf.values.size() * 4));
    if (!out)
        throw FormatError("write failed: " + path);
}

BrDf read_brdf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open container: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BRDF", 4) != 0)
        throw FormatError(path + ": bad magic at offset 0");

    std::uint32_t version, resolution, face_count;
    read_raw(in, version, path, "version");
    if (version != kContainerVersion)
        throw FormatError(path + ": unsupported version " + std::to_string(version) +
                          " at offset 4");
    read_raw(in, resolution, path, "resolution");
    read_raw(in, face_count, path, "face_count");
    if (resolution < 2 || resolution > 4096)
        throw FormatError(path + ": implausible resolution " + std::to_string(resolution) +
                          " at offset 8");
    if (face_count < 1 || face_count > 100000)
        throw FormatError(path + ": implausible face count " + std::to_string(face_count) +
                          " at offset 12");

    double truncation;
    NormalizeTransform t;
    read_raw(in, truncation, path, "truncation");
    read_raw(in, t.center.x, path, "center.x");
    read_raw(in, t.center.y, path, "center.y");
    read_raw(in, t.center.z, path, "center.z");
    read_raw(in, t.scale, path, "scale");
    if (!(t.scale > 0.0) || !(truncation > 0.0))
        throw FormatError(path + ": non-positive scale or truncation in header");

    BrDf b;
    b.sdf.resolution = static_cast<int>(resolution);
    b.sdf.truncation = truncation;
    b.sdf.transform = t;
    read_field(in, b.sdf, path);
    b.udfs.assign(face_count, ScalarField3{});
    for (auto& udf : b.udfs) {
        udf.resolution = static_cast<int>(resolution);
        udf.truncation = truncation;
        udf.transform = t;
        read_field(in, udf, path);
    }
    char extra;
    if (in.read(&extra, 1))
        throw FormatError(path + ": trailing bytes after payload");
    return b;
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

} // namespace

void write_brep_json(const FacetedBRep& b, const std::string& path) {
    nlohmann::json doc;

    doc["vertices"] = nlohmann::json::array();
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
        doc["vertices"].push_back({{"id", v}, {"position", vec_json(b.vertices[v])}});

    doc["edges"] = nlohmann::json::array();
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
        const auto& edge = b.edges[e];
        nlohmann::json rec{{"id", e},
                           {"face_pair", {edge.fa, edge.fb}},
                           {"closed", edge.closed}};
        if (!edge.closed)
            rec["endpoints"] = {edge.v0, edge.v1};
        nlohmann::json poly = nlohmann::json::array();
        for (const Vec3& p : edge.polyline)
            poly.push_back(vec_json(p));
        rec["polyline"] = std::move(poly);
        doc["edges"].push_back(std::move(rec));
    }

    doc["faces"] = nlohmann::json::array();
    for (const auto& f : b.faces)
        doc["faces"].push_back({{"id", f.label}, {"triangles", f.triangles}});

    nlohmann::json face_edges = nlohmann::json::object();
    for (const auto& f : b.faces) {
        nlohmann::json ids = nlohmann::json::array();
        for (std::size_t e = 0; e < b.edges.size(); ++e)
            if (b.edges[e].fa == f.label || b.edges[e].fb == f.label)
                ids.push_back(e);
        face_edges[std::to_string(f.label)] = std::move(ids);
    }
    doc["incidence"] = {{"face_edges", std::move(face_edges)}};

    doc["mesh"] = {{"vertex_count", b.mesh.vertices.size()},
                   {"triangle_count", b.mesh.triangles.size()}};

    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write JSON: " + path);
    out << doc.dump(2) << "\n";
    if (!out)
        throw FormatError("write failed: " + path);

    write_segmented_obj(brep_to_segmented(b), path + ".obj");
}

SegmentedMesh brep_to_segmented(const FacetedBRep& b) {
    SegmentedMesh mesh;
    mesh.vertices = b.mesh.vertices;
    mesh.triangles = b.mesh.triangles;
    mesh.labels.assign(b.mesh.triangles.size(), 0);
    mesh.face_count = static_cast<int>(b.faces.size());
    std::map<int, int> order; // original label -> contiguous id
    for (const auto& f : b.faces)
        order[f.label] = static_cast<int>(order.size());
    for (const auto& f : b.faces)
        for (int t : f.triangles)
            mesh.labels[t] = order[f.label];
    return mesh;
}

} // namespace brdf
