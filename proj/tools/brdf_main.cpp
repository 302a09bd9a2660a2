#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "brdf/csg.hpp"
#include "brdf/encode.hpp"
#include "brdf/io.hpp"
#include "brdf/mct.hpp"
#include "brdf/metrics.hpp"
#include "brdf/postproc.hpp"

namespace fs = std::filesystem;
using namespace brdf;

namespace {

constexpr int kExitFormat = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitInvalidTopology = 4;

void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("BRDF_THREADS")) {
        int n = std::atoi(env);
        if (n > 0)
            omp_set_num_threads(n);
    }
#endif
}

struct RoundtripRecord {
    std::string model;
    double cd_raw = 0.0, cd_post = 0.0, cd_pointset = 0.0;
    bool valid = false, str_raw = false, str_post = false;
    std::string error;
};

RoundtripRecord roundtrip_one(const fs::path& path, int resolution, std::uint64_t seed) {
    RoundtripRecord rec;
    rec.model = path.stem().string();

    SegmentedMesh input = read_segmented_obj(path.string());
    BrDf brdf = encode_brdf(input, resolution);

    // input geometry in the same normalized frame as the reconstruction
    SegmentedMesh input_norm = input;
    for (Vec3& v : input_norm.vertices)
        v = brdf.transform().to_normalized(v);
    TopologySignature input_sig =
        topology_signature(to_faceted_brep(input_norm, derive_topology(input_norm)));

    MctOutput mct = run_mct(brdf);
    TopologyReport raw_report = validate_topology(mct.brep);
    rec.cd_raw = surface_chamfer(input_norm.surface(), mct.brep.mesh, 5000, seed);
    rec.cd_pointset = chamfer(sample_surface(input_norm.surface(), 5000, seed),
                              sample_surface(mct.brep.mesh, 5000, seed + 1));
    rec.str_raw = same_topology(input_sig, topology_signature(mct.brep));

    PostprocResult post = postprocess(mct);
    TopologyReport post_report = validate_topology(post.brep);
    rec.cd_post = surface_chamfer(input_norm.surface(), post.brep.mesh, 5000, seed);
    rec.str_post = same_topology(input_sig, topology_signature(post.brep));

    rec.valid = raw_report.valid() && post_report.valid();
    return rec;
}

int cmd_encode(const std::string& in, const std::string& out, int resolution, double truncation) {
    SegmentedMesh mesh = read_segmented_obj(in);
    if (mesh.manifold_warning)
        std::cerr << "warning: input mesh is not manifold\n";
    BrDf b = encode_brdf(mesh, resolution, truncation);
    write_brdf(b, out);
    std::cout << "faces=" << b.face_count() << " resolution=" << b.resolution() << " center=("
              << b.transform().center.x << "," << b.transform().center.y << ","
              << b.transform().center.z << ") scale=" << b.transform().scale << "\n";
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out_dir, bool no_postprocess,
               const PostprocOptions& opts) {
    BrDf b = read_brdf(in);
    fs::create_directories(out_dir);
    fs::path stem = fs::path(in).stem();

    MctOutput mct = run_mct(b);
    FacetedBRep result;
    if (no_postprocess) {
        result = mct.brep;
    } else {
        result = postprocess(mct, opts).brep;
    }

    TopologyReport report = validate_topology(result);
    write_brep_json(result, (fs::path(out_dir) / (stem.string() + ".brep.json")).string());

    std::cout << "V=" << result.vertices.size() << " E=" << result.edges.size()
              << " F=" << result.faces.size() << (report.valid() ? " valid" : " INVALID") << "\n";
    if (!report.valid()) {
        for (const auto& v : report.violations)
            std::cerr << "violation: " << v << "\n";
        return kExitInvalidTopology;
    }
    return 0;
}

int cmd_roundtrip(const std::string& in, int resolution, const std::string& report_path,
                  std::uint64_t seed) {
    std::vector<fs::path> inputs;
    if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in))
            if (entry.path().extension() == ".obj")
                inputs.push_back(entry.path());
        std::sort(inputs.begin(), inputs.end());
    } else {
        inputs.push_back(in);
    }
    if (inputs.empty())
        throw FormatError("roundtrip: no .obj inputs under " + in);

    std::vector<RoundtripRecord> records(inputs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(inputs.size()); ++i) {
        try {
            records[i] = roundtrip_one(inputs[i], resolution, seed);
        } catch (const std::exception& e) {
            records[i].model = inputs[i].stem().string();
            records[i].error = e.what();
        }
    }

    std::ostringstream out;
    double cd_raw_sum = 0.0, cd_post_sum = 0.0;
    int failures = 0, str_matches = 0;
    for (const auto& rec : records) {
        if (!rec.error.empty()) {
            out << "error " << rec.model << " " << rec.error << "\n";
            ++failures;
            continue;
        }
        out << "cd_raw " << rec.model << " " << rec.cd_raw << "\n";
        out << "cd_post " << rec.model << " " << rec.cd_post << "\n";
        out << "cd_pointset " << rec.model << " " << rec.cd_pointset << "\n";
        out << "valid " << rec.model << " " << (rec.valid ? 1 : 0) << "\n";
        out << "str " << rec.model << " " << (rec.str_post ? 1 : 0) << "\n";
        out << "str_raw " << rec.model << " " << (rec.str_raw ? 1 : 0) << "\n";
        cd_raw_sum += rec.cd_raw;
        cd_post_sum += rec.cd_post;
        if (!rec.valid)
            ++failures;
        if (rec.str_post)
            ++str_matches;
    }
    const double n = static_cast<double>(records.size());
    out << "summary ir_pct " << 100.0 * failures / n << "\n";
    out << "summary str_pct " << 100.0 * str_matches / n << "\n";
    out << "summary cd_raw_mean " << cd_raw_sum / n << "\n";
    out << "summary cd_post_mean " << cd_post_sum / n << "\n";

    if (report_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(report_path);
        if (!f)
            throw FormatError("cannot write report: " + report_path);
        f << out.str();
        std::cout << "report written to " << report_path << "\n";
    }
    return failures == 0 ? 0 : kExitInvalidTopology;
}

int cmd_csg(const std::string& a, const std::string& b, const std::string& op,
            const std::string& out) {
    BrDf ma = read_brdf(a), mb = read_brdf(b);
    BoolOp bool_op = op == "union" ? BoolOp::Union : BoolOp::Intersection;
    BrDf combined = combine({&ma, &mb}, bool_op);
    write_brdf(combined, out);
    std::cout << "faces=" << combined.face_count() << " resolution=" << combined.resolution()
              << "\n";
    return 0;
}

int cmd_validate(const std::string& in_dir) {
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(in_dir))
        if (entry.path().extension() == ".brdf")
            inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty())
        throw FormatError("validate: no .brdf files under " + in_dir);

    std::vector<int> ok(inputs.size(), 0);
    std::vector<std::string> lines(inputs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(inputs.size()); ++i) {
        std::ostringstream line;
        try {
            BrDf b = read_brdf(inputs[i].string());
            MctOutput mct = run_mct(b);
            TopologyReport report = validate_topology(mct.brep);
            bool watertight = check_watertight(mct.brep.mesh).watertight;
            ok[i] = report.valid() && watertight;
            line << inputs[i].filename().string() << (ok[i] ? " valid" : " INVALID");
        } catch (const std::exception& e) {
            line << inputs[i].filename().string() << " ERROR " << e.what();
        }
        lines[i] = line.str();
    }
    int valid = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::cout << lines[i] << "\n";
        valid += ok[i];
    }
    std::cout << "Valid " << 100.0 * valid / static_cast<double>(inputs.size()) << "%\n";
    return valid == static_cast<int>(inputs.size()) ? 0 : kExitInvalidTopology;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"B-Rep distance-field toolkit"};
    app.set_config("--config");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "random seed for surface sampling");

    // encode
    auto* enc = app.add_subcommand("encode", "segmented OBJ -> distance-field container");
    std::string enc_in, enc_out;
    int enc_res = 64;
    double enc_trunc = 0.1;
    enc->add_option("input", enc_in)->required();
    enc->add_option("output", enc_out)->required();
    enc->add_option("--resolution", enc_res, "grid resolution per axis")->default_val(64);
    enc->add_option("--truncation", enc_trunc, "distance clamp in normalized units")
        ->default_val(0.1);

    // decode
    auto* dec = app.add_subcommand("decode", "container -> faceted B-Rep (JSON + OBJ)");
    std::string dec_in, dec_out;
    bool dec_raw = false;
    PostprocOptions dec_opts;
    dec->add_option("input", dec_in)->required();
    dec->add_option("out_dir", dec_out)->required();
    dec->add_flag("--no-postprocess", dec_raw, "emit the raw extraction");
    dec->add_option("--smooth-iters", dec_opts.smooth_iterations)->default_val(10);
    dec->add_option("--simplify", dec_opts.simplify_ratio)->default_val(0.5);
    dec->add_option("--fit-threshold", dec_opts.fit_residual_threshold,
                    "max residual for a straight-line boundary fit")
        ->default_val(0.002);
    dec->add_option("--endpoint-weight", dec_opts.endpoint_weight)->default_val(1000.0);

    // roundtrip
    auto* rt = app.add_subcommand("roundtrip", "encode + decode + reconstruction metrics");
    std::string rt_in, rt_report;
    int rt_res = 64;
    rt->add_option("input", rt_in, "OBJ file or directory")->required();
    rt->add_option("--resolution", rt_res)->default_val(64);
    rt->add_option("--report", rt_report, "write records here instead of stdout");

    // csg
    auto* csg = app.add_subcommand("csg", "combine two containers");
    std::string csg_a, csg_b, csg_op, csg_out;
    csg->add_option("a", csg_a)->required();
    csg->add_option("b", csg_b)->required();
    csg->add_option("--op", csg_op)->required()->check(CLI::IsMember({"union", "intersection"}));
    csg->add_option("output", csg_out)->required();

    // validate
    auto* val = app.add_subcommand("validate", "batch conversion validity over a directory");
    std::string val_dir;
    val->add_option("in_dir", val_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitFormat;
    }

    try {
        if (*enc) return cmd_encode(enc_in, enc_out, enc_res, enc_trunc);
        if (*dec) return cmd_decode(dec_in, dec_out, dec_raw, dec_opts);
        if (*rt) return cmd_roundtrip(rt_in, rt_res, rt_report, seed);
        if (*csg) return cmd_csg(csg_a, csg_b, csg_op, csg_out);
        if (*val) return cmd_validate(val_dir);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
