#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "geonet/edge_refine.hpp"
#include "geonet/synth.hpp"
#include "geonet/types.hpp"

namespace geonet::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Portable float map, 32-bit floats, rows stored bottom-to-top, negative
/// scale = little-endian. Depth maps use the single-channel "Pf" header with
/// sentinel 0 for invalid pixels; normal maps use three-channel "PF" with
/// sentinel (0,0,0). Non-finite and sentinel samples map to the invalid mask
/// on read.
DepthMap read_depth_pfm(std::istream& in);
void write_depth_pfm(const DepthMap& depth, std::ostream& out);
NormalMap read_normal_pfm(std::istream& in);
void write_normal_pfm(const NormalMap& normals, std::ostream& out);

/// Residual propagation weights: one single-channel "Pf" file of height 4*H
/// holding the four H x W planes stacked in sweep order (L-to-R, R-to-L,
/// T-to-B, B-to-T), top plane first.
ResidualMaps read_residual_pfm(std::istream& in);
void write_residual_pfm(const ResidualMaps& residual, std::ostream& out);

/// Grayscale image input for edge extraction: PGM (P2/P5) or PNG, selected
/// by magic bytes. Sample values are rescaled to [0, 255].
GrayImage read_gray_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, std::ostream& out);

/// 8-bit RGB PNG, used for optional point-cloud colors.
Grid<std::array<uint8_t, 3>> read_rgb_png(const std::filesystem::path& path);

CameraIntrinsics intrinsics_from_json(const std::string& text);
GeoConfig config_from_json(const std::string& text);
std::string config_to_json(const GeoConfig& cfg);
SceneSpec scene_spec_from_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace geonet::io
