#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <doctest.h>

#include "ardc/errors.hpp"
#include "ardc/raster.hpp"

using namespace ardc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ardc_raster_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RasterScene make_u16(int w, int h, int bands, std::uint32_t seed = 42) {
    RasterScene s;
    s.width = w;
    s.height = h;
    s.bands = bands;
    s.sample_type = SampleType::U16;
    s.origin_x = 500000.0;
    s.origin_y = 1920000.0;
    s.pixel_size_x = 1.065;
    s.pixel_size_y = -1.065;
    s.u16.resize(s.sample_count());
    std::mt19937 rng(seed);
    for (auto& v : s.u16) v = static_cast<std::uint16_t>(rng() & 0x7FF);
    return s;
}

}  // namespace

TEST_CASE("scene round trip: 2x2 single band uint16") {
    TempDir tmp;
    auto scene = make_u16(2, 2, 1);
    scene.u16 = {1, 2, 3, 4};
    const auto path = tmp.path / "tiny.raw";
    write_scene(scene, path);
    const auto loaded = read_scene(path);
    CHECK(loaded.u16 == scene.u16);
    CHECK(loaded.width == 2);
    CHECK(loaded.origin_x == scene.origin_x);
    CHECK(loaded.pixel_size_y == scene.pixel_size_y);
}

TEST_CASE("scene round trip preserves float32 data and band names") {
    TempDir tmp;
    RasterScene s;
    s.width = 3;
    s.height = 2;
    s.bands = 2;
    s.sample_type = SampleType::F32;
    s.band_names = {"alpha", "beta"};
    s.f32.resize(s.sample_count());
    std::iota(s.f32.begin(), s.f32.end(), 0.5f);
    const auto path = tmp.path / "f32.raw";
    write_scene(s, path);
    const auto loaded = read_scene(path);
    CHECK(loaded.f32 == s.f32);
    CHECK(loaded.band_names == s.band_names);
}

TEST_CASE("sidecar/data size mismatch is an error") {
    TempDir tmp;
    auto scene = make_u16(4, 4, 3);
    const auto path = tmp.path / "scene.raw";
    write_scene(scene, path);
    // drop one band's worth of bytes
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 4 * 4 * 2));
    out.close();
    CHECK_THROWS_WITH_AS(read_scene(path), doctest::Contains("mismatch"), IoError);
}

TEST_CASE("missing sidecar is an error") {
    TempDir tmp;
    std::ofstream(tmp.path / "orphan.raw") << "data";
    CHECK_THROWS_AS(read_scene(tmp.path / "orphan.raw"), IoError);
}

TEST_CASE("unknown sample type is an error") {
    CHECK_THROWS_AS(sample_type_from_string("int8"), IoError);
}

TEST_CASE("chip offsets") {
    SUBCASE("exact tiling") {
        CHECK(chip_offsets(512, 256, 256) == std::vector<int>{0, 256});
    }
    SUBCASE("50 percent overlap") {
        CHECK(chip_offsets(512, 256, 128) == std::vector<int>{0, 128, 256});
    }
    SUBCASE("inward shift of the final window") {
        CHECK(chip_offsets(500, 256, 256) == std::vector<int>{0, 244});
    }
    SUBCASE("window equals extent") { CHECK(chip_offsets(256, 256, 256) == std::vector<int>{0}); }
    SUBCASE("window larger than extent") {
        CHECK_THROWS_AS(chip_offsets(200, 256, 256), DomainError);
    }
}

TEST_CASE("chip_scene tiling and geo bookkeeping") {
    auto scene = make_u16(512, 512, 2);

    SUBCASE("exact tiling gives 4 disjoint chips") {
        const auto chips = chip_scene(scene, 256, 256);
        REQUIRE(chips.size() == 4);
        CHECK(chips[0].col == 0);
        CHECK(chips[0].row == 0);
        CHECK(chips[3].col == 256);
        CHECK(chips[3].row == 256);
        // geo origin equals the geotransform applied to (col, row)
        for (const auto& c : chips) {
            CHECK(c.geo_x == scene.origin_x + c.col * scene.pixel_size_x);
            CHECK(c.geo_y == scene.origin_y + c.row * scene.pixel_size_y);
            CHECK(c.data.width == 256);
            CHECK(c.data.bands == 2);
        }
        // samples copied faithfully
        const auto& c = chips[3];
        for (int b = 0; b < 2; ++b)
            for (int y : {0, 100, 255})
                for (int x : {0, 37, 255})
                    CHECK(c.data.u16[c.data.band_offset(b) + y * 256 + x] ==
                          scene.u16[scene.band_offset(b) + (c.row + y) * 512 + (c.col + x)]);
    }
    SUBCASE("stride 128 gives 9 overlapping chips") {
        const auto chips = chip_scene(scene, 256, 128);
        CHECK(chips.size() == 9);
    }
    SUBCASE("coverage: union of windows touches every pixel") {
        auto odd = make_u16(500, 300, 1);
        const auto chips = chip_scene(odd, 256, 256);
        std::vector<std::uint8_t> hit(500 * 300, 0);
        for (const auto& c : chips) {
            CHECK(c.col + c.window <= 500);
            CHECK(c.row + c.window <= 300);
            for (int y = 0; y < c.window; ++y)
                for (int x = 0; x < c.window; ++x) hit[(c.row + y) * 500 + (c.col + x)] = 1;
        }
        CHECK(std::count(hit.begin(), hit.end(), 1) == 500 * 300);
    }
}

TEST_CASE("rasterize: full-cover polygon gives all ones") {
    auto tmpl = make_u16(32, 32, 1);
    // generous rectangle beyond the scene on all sides
    Ring ring = {{tmpl.origin_x - 10, tmpl.origin_y + 10},
                 {tmpl.origin_x + 100, tmpl.origin_y + 10},
                 {tmpl.origin_x + 100, tmpl.origin_y - 100},
                 {tmpl.origin_x - 10, tmpl.origin_y - 100}};
    const auto res = rasterize_polygons({ring}, "water", tmpl);
    CHECK(std::count(res.mask.mask.begin(), res.mask.mask.end(), 1) == 32 * 32);
    CHECK(res.mask.class_name == "water");
}

TEST_CASE("rasterize: empty polygon list gives all zeros") {
    auto tmpl = make_u16(16, 16, 1);
    const auto res = rasterize_polygons({}, "roads", tmpl);
    CHECK(std::count(res.mask.mask.begin(), res.mask.mask.end(), 0) == 16 * 16);
}

TEST_CASE("rasterize: axis-aligned half rectangle popcount") {
    auto tmpl = make_u16(100, 80, 1);
    const double x0 = tmpl.origin_x;
    const double x1 = tmpl.origin_x + 50 * tmpl.pixel_size_x;
    const double y0 = tmpl.origin_y;
    const double y1 = tmpl.origin_y + 80 * tmpl.pixel_size_y;
    Ring ring = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    const auto res = rasterize_polygons({ring}, "buildings", tmpl);
    CHECK(std::count(res.mask.mask.begin(), res.mask.mask.end(), 1) == 50 * 80);
}

TEST_CASE("rasterize: even-odd rule carves holes") {
    auto tmpl = make_u16(40, 40, 1);
    auto geo = [&](double c, double r) -> std::array<double, 2> {
        return {tmpl.origin_x + c * tmpl.pixel_size_x, tmpl.origin_y + r * tmpl.pixel_size_y};
    };
    Ring outer = {geo(0, 0), geo(40, 0), geo(40, 40), geo(0, 40)};
    Ring hole = {geo(10, 10), geo(30, 10), geo(30, 30), geo(10, 30)};
    const auto res = rasterize_polygons({outer, hole}, "trees", tmpl);
    CHECK(std::count(res.mask.mask.begin(), res.mask.mask.end(), 1) == 40 * 40 - 20 * 20);
}

TEST_CASE("rasterize: degenerate rings are skipped with a count") {
    auto tmpl = make_u16(8, 8, 1);
    Ring degenerate = {{0.0, 0.0}, {1.0, 1.0}};
    const auto res = rasterize_polygons({degenerate}, "roads", tmpl);
    CHECK(res.skipped_rings == 1);
    CHECK(std::count(res.mask.mask.begin(), res.mask.mask.end(), 0) == 64);
}

TEST_CASE("rasterize: translation by one pixel shifts the mask by one pixel") {
    auto tmpl = make_u16(30, 30, 1);
    auto geo = [&](double c, double r) -> std::array<double, 2> {
        return {tmpl.origin_x + c * tmpl.pixel_size_x, tmpl.origin_y + r * tmpl.pixel_size_y};
    };
    Ring ring = {geo(5, 5), geo(15, 5), geo(15, 20), geo(5, 20)};
    Ring shifted;
    for (auto p : ring) shifted.push_back({p[0] + tmpl.pixel_size_x, p[1]});

    const auto base = rasterize_polygons({ring}, "x", tmpl).mask;
    const auto moved = rasterize_polygons({shifted}, "x", tmpl).mask;
    for (int y = 0; y < 30; ++y)
        for (int x = 1; x < 30; ++x)
            CHECK(moved.mask[y * 30 + x] == base.mask[y * 30 + x - 1]);
}

TEST_CASE("label mask round trip and invariants") {
    TempDir tmp;
    LabelMask m;
    m.class_name = "water";
    m.width = 4;
    m.height = 3;
    m.labeled_extent.assign(12, 1);
    m.mask.assign(12, 0);
    m.mask[5] = 1;
    const auto path = tmp.path / "water.mask";
    save_mask(m, path);
    const auto loaded = load_mask(path);
    CHECK(loaded.class_name == "water");
    CHECK(loaded.mask == m.mask);
    CHECK(loaded.labeled_extent == m.labeled_extent);

    // mask outside labeled extent violates the invariant
    m.labeled_extent[5] = 0;
    CHECK_THROWS_AS(validate(m), DomainError);
}

TEST_CASE("polygon document parsing") {
    TempDir tmp;
    const auto path = tmp.path / "polys.json";
    std::ofstream(path) << R"([{"class_name": "water",
        "rings": [[[0, 0], [10, 0], [10, 10], [0, 10]]]}])";
    const auto sets = read_polygons(path);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].class_name == "water");
    REQUIRE(sets[0].rings.size() == 1);
    CHECK(sets[0].rings[0].size() == 4);

    std::ofstream(tmp.path / "bad.json") << R"({"not": "an array"})";
    CHECK_THROWS_AS(read_polygons(tmp.path / "bad.json"), IoError);
}
