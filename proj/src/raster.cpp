#include "ardc/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ardc/errors.hpp"
#include "ardc/json_io.hpp"

namespace ardc {

using nlohmann::json;

std::string to_string(SampleType t) {
    return t == SampleType::U16 ? "uint16" : "float32";
}

SampleType sample_type_from_string(const std::string& s) {
    if (s == "uint16") return SampleType::U16;
    if (s == "float32") return SampleType::F32;
    throw IoError("unknown sample type '" + s + "'");
}

std::size_t RasterScene::sample_count() const {
    return static_cast<std::size_t>(width) * height * bands;
}

std::size_t RasterScene::band_offset(int band) const {
    return static_cast<std::size_t>(band) * width * height;
}

std::array<double, 2> RasterScene::pixel_origin(int col, int row) const {
    return {origin_x + col * pixel_size_x, origin_y + row * pixel_size_y};
}

void validate(const RasterScene& scene) {
    if (scene.width <= 0 || scene.height <= 0 || scene.bands <= 0)
        throw DomainError("raster dimensions must be positive");
    if (!(scene.pixel_size_x > 0.0) || !(scene.pixel_size_y < 0.0))
        throw DomainError("geotransform must be north-up (pixel_size_x > 0, pixel_size_y < 0)");
    const std::size_t n = scene.sample_count();
    const std::size_t have =
        scene.sample_type == SampleType::U16 ? scene.u16.size() : scene.f32.size();
    if (have != n)
        throw DomainError("raster data length " + std::to_string(have) +
                          " does not match width*height*bands = " + std::to_string(n));
    if (!scene.band_names.empty() && scene.band_names.size() != static_cast<std::size_t>(scene.bands))
        throw DomainError("band_names count does not match band count");
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return path.string() + ".json";
}

}  // namespace

void write_scene(const RasterScene& scene, const std::filesystem::path& path) {
    validate(scene);

    json meta{{"width", scene.width},
              {"height", scene.height},
              {"bands", scene.bands},
              {"sample_type", to_string(scene.sample_type)},
              {"geotransform",
               {scene.origin_x, scene.origin_y, scene.pixel_size_x, scene.pixel_size_y}},
              {"nodata", scene.nodata}};
    if (!scene.band_names.empty()) meta["band_names"] = scene.band_names;
    if (scene.context) meta["context"] = *scene.context;
    save_json_file(meta, sidecar_path(path));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open raster for writing: " + path.string());
    if (scene.sample_type == SampleType::U16)
        out.write(reinterpret_cast<const char*>(scene.u16.data()),
                  static_cast<std::streamsize>(scene.u16.size() * sizeof(std::uint16_t)));
    else
        out.write(reinterpret_cast<const char*>(scene.f32.data()),
                  static_cast<std::streamsize>(scene.f32.size() * sizeof(float)));
    if (!out) throw IoError("write failed: " + path.string());
}

RasterScene read_scene(const std::filesystem::path& path) {
    const auto side = sidecar_path(path);
    if (!std::filesystem::exists(side)) throw IoError("missing sidecar: " + side.string());
    const json meta = load_json_file(side);

    RasterScene scene;
    try {
        meta.at("width").get_to(scene.width);
        meta.at("height").get_to(scene.height);
        meta.at("bands").get_to(scene.bands);
        scene.sample_type = sample_type_from_string(meta.at("sample_type").get<std::string>());
        const auto& gt = meta.at("geotransform");
        scene.origin_x = gt.at(0).get<double>();
        scene.origin_y = gt.at(1).get<double>();
        scene.pixel_size_x = gt.at(2).get<double>();
        scene.pixel_size_y = gt.at(3).get<double>();
        meta.at("nodata").get_to(scene.nodata);
        if (meta.contains("band_names")) meta.at("band_names").get_to(scene.band_names);
        if (meta.contains("context")) scene.context = meta.at("context").get<RadiometricContext>();
    } catch (const json::exception& e) {
        throw IoError("bad sidecar " + side.string() + ": " + e.what());
    }
    if (scene.width <= 0 || scene.height <= 0 || scene.bands <= 0)
        throw IoError("bad sidecar " + side.string() + ": nonpositive dimensions");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open raster: " + path.string());
    const std::size_t n = scene.sample_count();
    const std::size_t sample_size =
        scene.sample_type == SampleType::U16 ? sizeof(std::uint16_t) : sizeof(float);
    const auto file_size = std::filesystem::file_size(path);
    if (file_size != n * sample_size)
        throw IoError("raster size mismatch for " + path.string() + ": sidecar implies " +
                      std::to_string(n * sample_size) + " bytes, file holds " +
                      std::to_string(file_size));
    if (scene.sample_type == SampleType::U16) {
        scene.u16.resize(n);
        in.read(reinterpret_cast<char*>(scene.u16.data()),
                static_cast<std::streamsize>(n * sample_size));
    } else {
        scene.f32.resize(n);
        in.read(reinterpret_cast<char*>(scene.f32.data()),
                static_cast<std::streamsize>(n * sample_size));
    }
    if (!in) throw IoError("truncated raster: " + path.string());
    validate(scene);
    return scene;
}

std::vector<int> chip_offsets(int extent, int window, int stride) {
    if (window > extent)
        throw DomainError("chip window " + std::to_string(window) + " exceeds scene extent " +
                          std::to_string(extent));
    if (stride < 1) throw DomainError("chip stride must be >= 1");
    std::vector<int> offsets;
    for (int off = 0; off + window <= extent; off += stride) offsets.push_back(off);
    if (offsets.back() + window < extent)
        offsets.push_back(extent - window);  // inward shift of the final window
    return offsets;
}

std::vector<ChipRecord> chip_scene(const RasterScene& scene, int window, int stride) {
    validate(scene);
    const auto cols = chip_offsets(scene.width, window, stride);
    const auto rows = chip_offsets(scene.height, window, stride);

    std::vector<ChipRecord> chips;
    chips.reserve(cols.size() * rows.size());
    for (int row : rows) {
        for (int col : cols) {
            ChipRecord rec;
            rec.col = col;
            rec.row = row;
            rec.window = window;
            const auto geo = scene.pixel_origin(col, row);
            rec.geo_x = geo[0];
            rec.geo_y = geo[1];

            RasterScene& sub = rec.data;
            sub.width = window;
            sub.height = window;
            sub.bands = scene.bands;
            sub.sample_type = scene.sample_type;
            sub.origin_x = geo[0];
            sub.origin_y = geo[1];
            sub.pixel_size_x = scene.pixel_size_x;
            sub.pixel_size_y = scene.pixel_size_y;
            sub.nodata = scene.nodata;
            sub.band_names = scene.band_names;
            sub.context = scene.context;

            auto copy_band = [&](auto& dst, const auto& src) {
                dst.resize(static_cast<std::size_t>(window) * window * scene.bands);
                for (int b = 0; b < scene.bands; ++b) {
                    const std::size_t src_base = scene.band_offset(b);
                    const std::size_t dst_base = sub.band_offset(b);
                    for (int y = 0; y < window; ++y) {
                        const std::size_t src_row =
                            src_base + static_cast<std::size_t>(row + y) * scene.width + col;
                        const std::size_t dst_row =
                            dst_base + static_cast<std::size_t>(y) * window;
                        std::copy_n(src.begin() + src_row, window, dst.begin() + dst_row);
                    }
                }
            };
            if (scene.sample_type == SampleType::U16)
                copy_band(sub.u16, scene.u16);
            else
                copy_band(sub.f32, scene.f32);
            chips.push_back(std::move(rec));
        }
    }
    return chips;
}

void validate(const LabelMask& m) {
    if (m.width <= 0 || m.height <= 0) throw DomainError("label mask dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    if (m.mask.size() != n || m.labeled_extent.size() != n)
        throw DomainError("label mask grid size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (m.mask[i] && !m.labeled_extent[i])
            throw DomainError("label mask sets a pixel outside the labeled extent");
}

namespace {
constexpr char kMaskMagic[8] = {'A', 'R', 'D', 'M', 'S', 'K', '1', '\n'};
}

void save_mask(const LabelMask& mask, const std::filesystem::path& path) {
    validate(mask);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open mask for writing: " + path.string());
    out.write(kMaskMagic, sizeof(kMaskMagic));
    const auto name_len = static_cast<std::uint32_t>(mask.class_name.size());
    out.write(reinterpret_cast<const char*>(&name_len), sizeof(name_len));
    out.write(mask.class_name.data(), name_len);
    const std::uint32_t w = mask.width, h = mask.height;
    out.write(reinterpret_cast<const char*>(&w), sizeof(w));
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(mask.mask.data()),
              static_cast<std::streamsize>(mask.mask.size()));
    out.write(reinterpret_cast<const char*>(mask.labeled_extent.data()),
              static_cast<std::streamsize>(mask.labeled_extent.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

LabelMask load_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mask: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMaskMagic, sizeof(kMaskMagic)) != 0)
        throw IoError("not a mask file: " + path.string());
    LabelMask m;
    std::uint32_t name_len = 0, w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    m.class_name.resize(name_len);
    in.read(m.class_name.data(), name_len);
    in.read(reinterpret_cast<char*>(&w), sizeof(w));
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in) throw IoError("truncated mask file: " + path.string());
    m.width = static_cast<int>(w);
    m.height = static_cast<int>(h);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    m.mask.resize(n);
    m.labeled_extent.resize(n);
    in.read(reinterpret_cast<char*>(m.mask.data()), static_cast<std::streamsize>(n));
    in.read(reinterpret_cast<char*>(m.labeled_extent.data()), static_cast<std::streamsize>(n));
    if (!in) throw IoError("truncated mask file: " + path.string());
    validate(m);
    return m;
}

RasterizeResult rasterize_polygons(const std::vector<Ring>& rings, const std::string& class_name,
                                   const RasterScene& tmpl) {
    validate(tmpl);
    RasterizeResult out;
    LabelMask& m = out.mask;
    m.class_name = class_name;
    m.width = tmpl.width;
    m.height = tmpl.height;
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    m.mask.assign(n, 0);
    m.labeled_extent.assign(n, 1);

    std::vector<const Ring*> usable;
    for (const auto& ring : rings) {
        if (ring.size() < 3)
            ++out.skipped_rings;
        else
            usable.push_back(&ring);
    }

    std::vector<double> crossings;
    for (int row = 0; row < m.height; ++row) {
        const double yc = tmpl.origin_y + (row + 0.5) * tmpl.pixel_size_y;
        crossings.clear();
        for (const Ring* ring : usable) {
            const std::size_t k = ring->size();
            for (std::size_t i = 0; i < k; ++i) {
                const auto& p = (*ring)[i];
                const auto& q = (*ring)[(i + 1) % k];
                // half-open rule so a vertex on the scanline counts once
                if ((p[1] <= yc && q[1] > yc) || (q[1] <= yc && p[1] > yc)) {
                    const double t = (yc - p[1]) / (q[1] - p[1]);
                    crossings.push_back(p[0] + t * (q[0] - p[0]));
                }
            }
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
            // pixel centers in [x0, x1)
            const double c0f = (crossings[i] - tmpl.origin_x) / tmpl.pixel_size_x - 0.5;
            const double c1f = (crossings[i + 1] - tmpl.origin_x) / tmpl.pixel_size_x - 0.5;
            int c0 = static_cast<int>(std::ceil(c0f));
            int c1 = static_cast<int>(std::ceil(c1f)) - 1;
            c0 = std::max(c0, 0);
            c1 = std::min(c1, m.width - 1);
            for (int c = c0; c <= c1; ++c)
                m.mask[static_cast<std::size_t>(row) * m.width + c] = 1;
        }
    }
    return out;
}

std::vector<PolygonSet> read_polygons(const std::filesystem::path& path) {
    const json doc = load_json_file(path);
    if (!doc.is_array()) throw IoError("polygon document must be a JSON array: " + path.string());
    std::vector<PolygonSet> sets;
    for (const auto& entry : doc) {
        PolygonSet set;
        try {
            entry.at("class_name").get_to(set.class_name);
            for (const auto& jring : entry.at("rings")) {
                Ring ring;
                for (const auto& pt : jring)
                    ring.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
                set.rings.push_back(std::move(ring));
            }
        } catch (const json::exception& e) {
            throw IoError("bad polygon document " + path.string() + ": " + e.what());
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace ardc
