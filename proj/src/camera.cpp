#include "geonet/camera.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace geonet {

PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr) {
    intr.validate();
    if (depth.width() <= 0 || depth.height() <= 0) throw std::invalid_argument("unproject: empty depth map");
    if (!depth.z.same_shape(depth.valid)) throw std::invalid_argument("unproject: mask shape mismatch");

    PointCloud cloud(depth.width(), depth.height());
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            if (!depth.valid.at(u, v)) continue;
            const double z = depth.z.at(u, v);
            cloud.points.at(u, v) = Vec3{(u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z};
            cloud.valid.at(u, v) = 1;
        }
    }
    return cloud;
}

void export_ply(const PointCloud& cloud, const RgbGrid* colors, std::ostream& out) {
    if (cloud.width() <= 0 || cloud.height() <= 0) throw std::invalid_argument("export_ply: empty cloud");
    if (colors && !colors->same_shape(cloud.points)) throw std::invalid_argument("export_ply: color shape mismatch");

    size_t count = 0;
    for (uint8_t m : cloud.valid.data) count += m ? 1 : 0;

    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << count << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    char line[128];
    for (int v = 0; v < cloud.height(); ++v) {
        for (int u = 0; u < cloud.width(); ++u) {
            if (!cloud.valid.at(u, v)) continue;
            const Vec3& p = cloud.points.at(u, v);
            if (colors) {
                const auto& c = colors->at(u, v);
                std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %d %d %d\n", p.x, p.y, p.z, c[0], c[1], c[2]);
            } else {
                std::snprintf(line, sizeof(line), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
            }
            out << line;
        }
    }
    if (!out) throw std::runtime_error("export_ply: write failed");
}

}  // namespace geonet
