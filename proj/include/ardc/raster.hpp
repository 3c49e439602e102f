#ifndef ARDC_RASTER_HPP
#define ARDC_RASTER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ardc/rt.hpp"

namespace ardc {

enum class SampleType { U16, F32 };

std::string to_string(SampleType t);
SampleType sample_type_from_string(const std::string& s);

/// Planar band-sequential raster with a north-up geotransform. Data lives in
/// exactly one of `u16` / `f32` according to `sample_type`. The container on
/// disk is raw little-endian samples plus a JSON sidecar at `<path>.json`
/// holding all metadata (see README for the field-by-field schema).
struct RasterScene {
    int width = 0;
    int height = 0;
    int bands = 0;
    SampleType sample_type = SampleType::U16;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size_x = 1.0;
    double pixel_size_y = -1.0;
    double nodata = -9999.0;
    std::vector<std::string> band_names;  // optional, one per band when present
    std::optional<RadiometricContext> context;

    std::vector<std::uint16_t> u16;
    std::vector<float> f32;

    std::size_t sample_count() const;
    std::size_t band_offset(int band) const;
    /// Projected coordinates of the pixel (col, row) origin corner.
    std::array<double, 2> pixel_origin(int col, int row) const;
};

void validate(const RasterScene& scene);

void write_scene(const RasterScene& scene, const std::filesystem::path& path);
RasterScene read_scene(const std::filesystem::path& path);

/// One sliding-window chip: parent offset, window size, geo-origin and the
/// windowed sub-scene (all bands, parent sample type).
struct ChipRecord {
    int col = 0;
    int row = 0;
    int window = 0;
    double geo_x = 0.0;
    double geo_y = 0.0;
    RasterScene data;
};

/// Window offsets along one dimension: 0, stride, 2*stride, ... with the last
/// window shifted inward so every pixel is covered.
std::vector<int> chip_offsets(int extent, int window, int stride);

/// Row-major sliding-window tiling of the scene. Throws if the window exceeds
/// either scene dimension.
std::vector<ChipRecord> chip_scene(const RasterScene& scene, int window, int stride);

/// Per-class binary ground truth aligned to a parent raster. `labeled_extent`
/// marks where ground truth exists; evaluation is restricted to it.
struct LabelMask {
    std::string class_name;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;
    std::vector<std::uint8_t> labeled_extent;
};

void validate(const LabelMask& mask);

void save_mask(const LabelMask& mask, const std::filesystem::path& path);
LabelMask load_mask(const std::filesystem::path& path);

using Ring = std::vector<std::array<double, 2>>;

struct RasterizeResult {
    LabelMask mask;
    int skipped_rings = 0;  // degenerate rings (< 3 vertices)
};

/// Even-odd scanline fill: a pixel is set iff its center lies inside the
/// polygon set. Rings are in projected meters; holes work through the
/// even-odd rule. The labeled extent defaults to full coverage.
RasterizeResult rasterize_polygons(const std::vector<Ring>& rings, const std::string& class_name,
                                   const RasterScene& tmpl);

/// Class-tagged ring lists from a JSON document:
/// [{"class_name": "...", "rings": [[[x,y], ...], ...]}, ...]
struct PolygonSet {
    std::string class_name;
    std::vector<Ring> rings;
};

std::vector<PolygonSet> read_polygons(const std::filesystem::path& path);

}  // namespace ardc

#endif
