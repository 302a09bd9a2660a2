#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "brdf/brep.hpp"
#include "brdf/mesh.hpp"

namespace brdf {

// Static 3D kd-tree for nearest-neighbor distance queries.
class KdTree3 {
public:
    explicit KdTree3(std::vector<Vec3> points);
    double nearest_distance(const Vec3& q) const;

private:
    struct Node {
        Vec3 point;
        int left = -1, right = -1;
        int axis = 0;
    };
    std::vector<Node> nodes_;
    int root_ = -1;

    int build(std::vector<Vec3>& pts, int begin, int end, int depth);
    void query(int node, const Vec3& q, double& best2) const;
};

// Area-weighted uniform surface sampling; deterministic per seed.
std::vector<Vec3> sample_surface(const SurfaceMesh& mesh, int n, std::uint64_t seed);

// Symmetric point-set Chamfer distance with unsquared distances:
// 0.5 * (mean_a min_b |a-b| + mean_b min_a |b-a|).
double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Exhaustive O(n^2) reference; identical result, kept for testing.
double chamfer_serial(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Symmetric sampled point-to-surface distance between two meshes. Unlike the
// point-set Chamfer this has no sample-spacing noise floor, which is what the
// reconstruction tolerances are stated against.
double surface_chamfer(const SurfaceMesh& a, const SurfaceMesh& b, int n = 5000,
                       std::uint64_t seed = 0);

// failures / total * 100
double invalid_rate(const std::vector<bool>& conversion_ok);

// matches / total * 100
double same_topology_rate(
    const std::vector<std::pair<const TopologySignature*, const TopologySignature*>>& pairs);

struct SetMetrics {
    double coverage_pct = 0.0; // COV
    double mmd = 0.0;          // minimum matching distance
    double jsd = 0.0;          // Jensen-Shannon divergence, natural log
};

// Distribution metrics over per-shape point samples (2000 points per shape).
// JSD voxelizes each shape into 28^3 binary occupancy over [-1,1]^3.
SetMetrics set_metrics(const std::vector<std::vector<Vec3>>& generated,
                       const std::vector<std::vector<Vec3>>& reference);

struct DedupResult {
    double unique_pct = 0.0;               // shapes appearing exactly once
    std::map<int, std::vector<int>> duplicates; // representative -> members (groups of 2+)
};

// Groups by exact topology match (4-bit quantized positions included).
DedupResult dedup(const std::vector<TopologySignature>& signatures);

} // namespace brdf
