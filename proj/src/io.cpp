#include "geonet/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace geonet::io {

namespace {

using nlohmann::json;

float byteswap_f32(float f) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8) | ((u & 0x0000ff00u) << 8) | ((u & 0x000000ffu) << 24);
    std::memcpy(&f, &u, 4);
    return f;
}

constexpr bool kHostLittle = std::endian::native == std::endian::little;

struct PfmHeader {
    int width = 0;
    int height = 0;
    int channels = 0;
    bool little_endian = true;
};

PfmHeader read_pfm_header(std::istream& in) {
    std::string magic;
    if (!(in >> magic)) throw IoError("pfm: malformed header (missing magic)");
    PfmHeader h;
    if (magic == "Pf")
        h.channels = 1;
    else if (magic == "PF")
        h.channels = 3;
    else
        throw IoError("pfm: unsupported format '" + magic + "'");

    double scale = 0.0;
    if (!(in >> h.width >> h.height)) throw IoError("pfm: malformed header (bad dimensions)");
    if (h.width <= 0 || h.height <= 0) throw IoError("pfm: malformed header (non-positive dimensions)");
    if (!(in >> scale)) throw IoError("pfm: malformed header (missing scale)");
    if (scale == 0.0 || !std::isfinite(scale)) throw IoError("pfm: malformed header (invalid scale)");
    h.little_endian = scale < 0.0;
    in.get();  // single whitespace terminating the header
    return h;
}

// Samples come back in image order (row 0 = top); PFM stores rows bottom-up.
std::vector<float> read_pfm_payload(std::istream& in, const PfmHeader& h) {
    const size_t row = static_cast<size_t>(h.width) * h.channels;
    std::vector<float> data(row * h.height);
    for (int v = h.height - 1; v >= 0; --v) {
        in.read(reinterpret_cast<char*>(data.data() + row * v), static_cast<std::streamsize>(row * sizeof(float)));
        if (static_cast<size_t>(in.gcount()) != row * sizeof(float)) throw IoError("pfm: truncated payload");
    }
    if (h.little_endian != kHostLittle)
        for (float& f : data) f = byteswap_f32(f);
    return data;
}

void write_pfm(std::ostream& out, int width, int height, int channels, const std::vector<float>& data) {
    out << (channels == 1 ? "Pf" : "PF") << "\n" << width << " " << height << "\n" << (kHostLittle ? "-1.0" : "1.0")
        << "\n";
    const size_t row = static_cast<size_t>(width) * channels;
    for (int v = height - 1; v >= 0; --v)
        out.write(reinterpret_cast<const char*>(data.data() + row * v),
                  static_cast<std::streamsize>(row * sizeof(float)));
    if (!out) throw IoError("pfm: write failed");
}

}  // namespace

DepthMap read_depth_pfm(std::istream& in) {
    const PfmHeader h = read_pfm_header(in);
    if (h.channels != 1) throw IoError("pfm: expected single-channel depth (Pf), got 3 channels");
    const auto data = read_pfm_payload(in, h);

    DepthMap d(h.width, h.height);
    for (size_t i = 0; i < data.size(); ++i) {
        const float z = data[i];
        if (std::isfinite(z) && z > 0.0f) {
            d.z.data[i] = z;
            d.valid.data[i] = 1;
        }
    }
    return d;
}

void write_depth_pfm(const DepthMap& depth, std::ostream& out) {
    if (depth.z.empty()) throw IoError("pfm: empty depth map");
    std::vector<float> data(depth.z.size(), 0.0f);
    for (size_t i = 0; i < data.size(); ++i)
        if (depth.valid.data[i]) data[i] = static_cast<float>(depth.z.data[i]);
    write_pfm(out, depth.width(), depth.height(), 1, data);
}

NormalMap read_normal_pfm(std::istream& in) {
    const PfmHeader h = read_pfm_header(in);
    if (h.channels != 3) throw IoError("pfm: expected three-channel normals (PF), got 1 channel");
    const auto data = read_pfm_payload(in, h);

    NormalMap n(h.width, h.height);
    for (size_t i = 0; i < n.n.size(); ++i) {
        const Vec3 v{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
        if (std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z) && v.dot(v) > 0.0) {
            n.n.data[i] = v;
            n.valid.data[i] = 1;
        }
    }
    return n;
}

void write_normal_pfm(const NormalMap& normals, std::ostream& out) {
    if (normals.n.empty()) throw IoError("pfm: empty normal map");
    std::vector<float> data(normals.n.size() * 3, 0.0f);
    for (size_t i = 0; i < normals.n.size(); ++i) {
        if (!normals.valid.data[i]) continue;
        data[3 * i] = static_cast<float>(normals.n.data[i].x);
        data[3 * i + 1] = static_cast<float>(normals.n.data[i].y);
        data[3 * i + 2] = static_cast<float>(normals.n.data[i].z);
    }
    write_pfm(out, normals.width(), normals.height(), 3, data);
}

ResidualMaps read_residual_pfm(std::istream& in) {
    const PfmHeader h = read_pfm_header(in);
    if (h.channels != 1) throw IoError("pfm: residual maps must be single-channel (Pf)");
    if (h.height % 4 != 0) throw IoError("pfm: residual height must be 4 * H (stacked direction planes)");
    const auto data = read_pfm_payload(in, h);

    const int H = h.height / 4;
    ResidualMaps maps;
    for (int k = 0; k < 4; ++k) {
        maps[k] = Grid<double>(h.width, H);
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < h.width; ++u)
                maps[k].at(u, v) = data[static_cast<size_t>(k * H + v) * h.width + u];
    }
    return maps;
}

void write_residual_pfm(const ResidualMaps& residual, std::ostream& out) {
    const int W = residual[0].width, H = residual[0].height;
    for (const auto& r : residual)
        if (r.width != W || r.height != H) throw IoError("pfm: residual planes differ in shape");
    std::vector<float> data(static_cast<size_t>(W) * H * 4);
    for (int k = 0; k < 4; ++k)
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < W; ++u)
                data[static_cast<size_t>(k * H + v) * W + u] = static_cast<float>(residual[k].at(u, v));
    write_pfm(out, W, H * 4, 1, data);
}

namespace {

int pgm_token(std::istream& in) {
    // Skips whitespace and '#' comment lines, then reads a non-negative int.
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    if (!(in >> value) || value < 0) throw IoError("pgm: malformed header");
    return value;
}

GrayImage read_pgm(std::istream& in) {
    std::string magic;
    in >> magic;
    const bool binary = magic == "P5";
    if (!binary && magic != "P2") throw IoError("pgm: unsupported format '" + magic + "'");

    const int width = pgm_token(in);
    const int height = pgm_token(in);
    const int maxval = pgm_token(in);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) throw IoError("pgm: malformed header");

    GrayImage img(width, height);
    if (binary) {
        in.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<uint8_t> buf(static_cast<size_t>(width) * height * bytes);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<size_t>(in.gcount()) != buf.size()) throw IoError("pgm: truncated payload");
        for (size_t i = 0; i < img.intensity.size(); ++i) {
            const int raw = bytes == 1 ? buf[i] : (buf[2 * i] << 8) | buf[2 * i + 1];
            img.intensity.data[i] = raw * 255.0 / maxval;
        }
    } else {
        for (size_t i = 0; i < img.intensity.size(); ++i) {
            int raw;
            if (!(in >> raw)) throw IoError("pgm: truncated payload");
            img.intensity.data[i] = raw * 255.0 / maxval;
        }
    }
    return img;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;

    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

std::vector<uint8_t> read_png_samples(const std::filesystem::path& path, bool gray, int& width, int& height) {
    PngReader r;
    r.fp = std::fopen(path.string().c_str(), "rb");
    if (!r.fp) throw IoError("png: cannot open " + path.string());

    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw IoError("png: init failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw IoError("png: init failed");
    if (setjmp(png_jmpbuf(r.png))) throw IoError("png: decode failed for " + path.string());

    png_init_io(r.png, r.fp);
    png_read_info(r.png, r.info);

    png_set_expand(r.png);
    png_set_strip_16(r.png);
    png_set_strip_alpha(r.png);
    if (gray)
        png_set_rgb_to_gray_fixed(r.png, 1, -1, -1);
    else
        png_set_gray_to_rgb(r.png);
    png_read_update_info(r.png, r.info);

    width = static_cast<int>(png_get_image_width(r.png, r.info));
    height = static_cast<int>(png_get_image_height(r.png, r.info));
    const int channels = gray ? 1 : 3;
    if (static_cast<int>(png_get_channels(r.png, r.info)) != channels) throw IoError("png: unexpected channel count");

    std::vector<uint8_t> samples(static_cast<size_t>(width) * height * channels);
    std::vector<png_bytep> rows(height);
    for (int v = 0; v < height; ++v) rows[v] = samples.data() + static_cast<size_t>(v) * width * channels;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return samples;
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("image: cannot open " + path.string());
    char magic[2] = {0, 0};
    probe.read(magic, 2);

    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '2')) {
        probe.seekg(0);
        return read_pgm(probe);
    }
    if (static_cast<uint8_t>(magic[0]) == 0x89 && magic[1] == 'P') {
        probe.close();
        int width = 0, height = 0;
        const auto samples = read_png_samples(path, true, width, height);
        GrayImage img(width, height);
        for (size_t i = 0; i < img.intensity.size(); ++i) img.intensity.data[i] = samples[i];
        return img;
    }
    throw IoError("image: unsupported format (expected PGM or PNG): " + path.string());
}

void write_pgm(const GrayImage& img, std::ostream& out) {
    if (img.intensity.empty()) throw IoError("pgm: empty image");
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<uint8_t> buf(img.intensity.size());
    for (size_t i = 0; i < buf.size(); ++i) {
        const double v = std::clamp(img.intensity.data[i], 0.0, 255.0);
        buf[i] = static_cast<uint8_t>(std::lrint(v));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("pgm: write failed");
}

Grid<std::array<uint8_t, 3>> read_rgb_png(const std::filesystem::path& path) {
    int width = 0, height = 0;
    const auto samples = read_png_samples(path, false, width, height);
    Grid<std::array<uint8_t, 3>> img(width, height);
    for (size_t i = 0; i < img.size(); ++i)
        img.data[i] = {samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]};
    return img;
}

namespace {

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError(std::string(what) + ": invalid JSON");
    return j;
}

double number_field(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw IoError(std::string(what) + ": missing or non-numeric field '" + key + "'");
    return j.at(key).get<double>();
}

}  // namespace

CameraIntrinsics intrinsics_from_json(const std::string& text) {
    const json j = parse_json(text, "intrinsics");
    if (!j.is_object()) throw IoError("intrinsics: expected a JSON object");
    CameraIntrinsics intr{number_field(j, "fx", "intrinsics"), number_field(j, "fy", "intrinsics"),
                          number_field(j, "cx", "intrinsics"), number_field(j, "cy", "intrinsics")};
    intr.validate();
    return intr;
}

GeoConfig config_from_json(const std::string& text) {
    const json j = parse_json(text, "config");
    if (!j.is_object()) throw IoError("config: expected a JSON object");

    GeoConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "alpha")
            cfg.alpha = value.get<double>();
        else if (key == "beta")
            cfg.beta = value.get<int>();
        else if (key == "gamma")
            cfg.gamma = value.get<double>();
        else if (key == "t_prop")
            cfg.t_prop = value.get<int>();
        else if (key == "iterations")
            cfg.iterations = value.get<int>();
        else if (key == "ridge_eps")
            cfg.ridge_eps = value.get<double>();
        else if (key == "blend_w")
            cfg.blend_w = value.get<double>();
        else if (key == "base_w")
            cfg.base_w = value.get<double>();
        else if (key == "canny_low")
            cfg.canny_low = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
        else if (key == "canny_high")
            cfg.canny_high = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
        else if (key == "recursive_within_pass")
            cfg.recursive_within_pass = value.get<bool>();
        else if (key == "tv_strength")
            cfg.tv_strength = value.get<double>();
        else if (key == "tv_iters")
            cfg.tv_iters = value.get<int>();
        else
            throw IoError("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const GeoConfig& cfg) {
    json j;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["gamma"] = cfg.gamma;
    j["t_prop"] = cfg.t_prop;
    j["iterations"] = cfg.iterations;
    j["ridge_eps"] = cfg.ridge_eps;
    j["blend_w"] = cfg.blend_w;
    j["base_w"] = cfg.base_w;
    j["canny_low"] = cfg.canny_low ? json(*cfg.canny_low) : json(nullptr);
    j["canny_high"] = cfg.canny_high ? json(*cfg.canny_high) : json(nullptr);
    j["recursive_within_pass"] = cfg.recursive_within_pass;
    j["tv_strength"] = cfg.tv_strength;
    j["tv_iters"] = cfg.tv_iters;
    return j.dump(2);
}

SceneSpec scene_spec_from_json(const std::string& text) {
    const json j = parse_json(text, "scene");
    if (!j.is_object()) throw IoError("scene: expected a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw IoError("scene: missing 'kind'");

    SceneSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    spec.width = static_cast<int>(number_field(j, "width", "scene"));
    spec.height = static_cast<int>(number_field(j, "height", "scene"));
    if (!j.contains("intrinsics")) throw IoError("scene: missing 'intrinsics'");
    spec.intrinsics = intrinsics_from_json(j.at("intrinsics").dump());

    auto vec3_field = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 3)
            throw IoError(std::string("scene: field '") + key + "' must be a 3-element array");
        const auto& a = j.at(key);
        return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    };

    if (kind == "plane") {
        spec.kind = SceneKind::Plane;
        spec.plane_normal = vec3_field("normal");
        spec.plane_offset = number_field(j, "offset", "scene");
    } else if (kind == "sphere") {
        spec.kind = SceneKind::Sphere;
        spec.sphere_center = vec3_field("center");
        spec.sphere_radius = number_field(j, "radius", "scene");
    } else if (kind == "step") {
        spec.kind = SceneKind::Step;
        spec.near_z = number_field(j, "near_z", "scene");
        spec.far_z = number_field(j, "far_z", "scene");
        spec.split_col = static_cast<int>(number_field(j, "split_col", "scene"));
    } else if (kind == "wedge") {
        spec.kind = SceneKind::Wedge;
        spec.crease_col = static_cast<int>(number_field(j, "crease_col", "scene"));
        spec.crease_z = number_field(j, "crease_z", "scene");
        spec.tilt_deg = number_field(j, "tilt_deg", "scene");
    } else {
        throw IoError("scene: unknown kind '" + kind + "'");
    }

    if (j.contains("noise_sigma_rel")) spec.noise_sigma_rel = j.at("noise_sigma_rel").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
    return spec;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace geonet::io
