#include <algorithm>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "ardc/ensemble.hpp"
#include "ardc/errors.hpp"

using namespace ardc;
namespace fs = std::filesystem;

namespace {

PredictionChip make_chip(int col, int row, int window, std::vector<std::string> classes,
                         float fill) {
    PredictionChip chip;
    chip.col = col;
    chip.row = row;
    chip.window = window;
    chip.classes = std::move(classes);
    chip.probs.assign(chip.classes.size() * static_cast<std::size_t>(window) * window, fill);
    return chip;
}

PredictionChip random_chip(int col, int row, int window, const std::vector<std::string>& classes,
                           std::mt19937& rng) {
    auto chip = make_chip(col, row, window, classes, 0.0f);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& p : chip.probs) p = u(rng);
    return chip;
}

const std::vector<std::string> kClasses = {"buildings", "roads", "trees", "water", "other"};

}  // namespace

TEST_CASE("ensemble_pair") {
    auto a = make_chip(0, 0, 4, kClasses, 0.2f);
    auto b = make_chip(0, 0, 4, kClasses, 0.6f);
    SUBCASE("mean of probabilities") {
        const auto out = ensemble_pair(a, b);
        for (float p : out.probs) CHECK(p == doctest::Approx(0.4f));
    }
    SUBCASE("idempotent on equal inputs") {
        const auto out = ensemble_pair(a, a);
        CHECK(out.probs == a.probs);
    }
    SUBCASE("commutes") {
        std::mt19937 rng(5);
        const auto ra = random_chip(0, 0, 8, kClasses, rng);
        const auto rb = random_chip(0, 0, 8, kClasses, rng);
        CHECK(ensemble_pair(ra, rb).probs == ensemble_pair(rb, ra).probs);
    }
    SUBCASE("output stays in [0, 1]") {
        std::mt19937 rng(6);
        const auto ra = random_chip(0, 0, 8, kClasses, rng);
        const auto rb = random_chip(0, 0, 8, kClasses, rng);
        for (float p : ensemble_pair(ra, rb).probs) {
            CHECK(p >= 0.0f);
            CHECK(p <= 1.0f);
        }
    }
    SUBCASE("mismatches rejected") {
        auto moved = make_chip(1, 0, 4, kClasses, 0.5f);
        CHECK_THROWS_AS(ensemble_pair(a, moved), DomainError);
        auto other_classes = make_chip(0, 0, 4, {"x", "y", "z", "w", "v"}, 0.5f);
        CHECK_THROWS_AS(ensemble_pair(a, other_classes), DomainError);
    }
}

TEST_CASE("threshold is inclusive at tau") {
    std::vector<float> probs = {0.35f, 0.349f, 0.0f, 1.0f, 0.351f};
    const auto bin = threshold_probs(probs, 0.35);
    CHECK(bin == std::vector<std::uint8_t>{1, 0, 0, 1, 1});
    CHECK_THROWS_AS(threshold_probs(probs, 0.0), DomainError);
    CHECK_THROWS_AS(threshold_probs(probs, 1.0), DomainError);
}

TEST_CASE("merge_chips") {
    SUBCASE("non-overlapping chips form a mosaic") {
        auto a = make_chip(0, 0, 4, kClasses, 0.3f);
        auto b = make_chip(4, 0, 4, kClasses, 0.7f);
        const auto canvas = merge_chips({a, b}, 8, 4);
        CHECK(canvas.probs[0] == 0.3f);
        CHECK(canvas.probs[5] == 0.7f);
        for (std::size_t i = 0; i < canvas.covered.size(); ++i) CHECK(canvas.covered[i] == 1);
    }
    SUBCASE("overlap takes the maximum") {
        auto a = make_chip(0, 0, 4, kClasses, 0.3f);
        auto b = make_chip(2, 0, 4, kClasses, 0.7f);
        const auto canvas = merge_chips({a, b}, 8, 4);
        CHECK(canvas.probs[0] == 0.3f);
        CHECK(canvas.probs[2] == 0.7f);  // overlap
        CHECK(canvas.probs[6] == 0.0f);  // uncovered
        CHECK(canvas.covered[6] == 0);
    }
    SUBCASE("uncovered pixels flagged") {
        auto a = make_chip(0, 0, 2, kClasses, 0.5f);
        const auto canvas = merge_chips({a}, 8, 8);
        CHECK(canvas.covered[0] == 1);
        CHECK(canvas.covered[63] == 0);
    }
    SUBCASE("chip outside canvas rejected") {
        auto a = make_chip(6, 0, 4, kClasses, 0.5f);
        CHECK_THROWS_AS(merge_chips({a}, 8, 8), DomainError);
    }
    SUBCASE("order invariance and brute-force oracle on random layouts") {
        std::mt19937 rng(11);
        std::uniform_int_distribution<int> pos(0, 48);
        const int W = 64, H = 64, win = 16;
        std::vector<PredictionChip> chips;
        for (int i = 0; i < 12; ++i)
            chips.push_back(random_chip(pos(rng), pos(rng), win, kClasses, rng));

        const auto merged = merge_chips(chips, W, H);

        auto shuffled = chips;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto merged2 = merge_chips(shuffled, W, H);
        CHECK(merged.probs == merged2.probs);
        CHECK(merged.covered == merged2.covered);

        // brute force: per pixel/class max over all covering chips
        for (std::size_t cls = 0; cls < kClasses.size(); ++cls) {
            for (int y = 0; y < H; ++y) {
                for (int x = 0; x < W; ++x) {
                    float best = 0.0f;
                    bool covered = false;
                    for (const auto& c : chips) {
                        if (x < c.col || x >= c.col + c.window || y < c.row ||
                            y >= c.row + c.window)
                            continue;
                        covered = true;
                        best = std::max(
                            best, c.probs[c.class_offset(cls) +
                                          static_cast<std::size_t>(y - c.row) * c.window +
                                          (x - c.col)]);
                    }
                    const std::size_t i =
                        merged.class_offset(cls) + static_cast<std::size_t>(y) * W + x;
                    CHECK(merged.probs[i] == best);
                    CHECK(merged.covered[static_cast<std::size_t>(y) * W + x] ==
                          (covered ? 1 : 0));
                }
            }
        }
    }
}

TEST_CASE("confusion and recall") {
    const int W = 100, H = 100;
    const std::size_t npix = static_cast<std::size_t>(W) * H;
    std::vector<std::string> classes = {"water"};

    SUBCASE("perfect prediction gives recall 1") {
        LabelMask truth;
        truth.class_name = "water";
        truth.width = W;
        truth.height = H;
        truth.labeled_extent.assign(npix, 1);
        truth.mask.assign(npix, 0);
        for (std::size_t i = 0; i < 500; ++i) truth.mask[i * 7 % npix] = 1;
        std::vector<std::uint8_t> pred(truth.mask);
        const auto counts = confusion(pred, classes, W, H, {truth});
        REQUIRE(counts.size() == 1);
        CHECK(counts[0].recall() == 1.0);
        CHECK(counts[0].fn == 0);
    }
    SUBCASE("all-zero prediction gives recall 0") {
        LabelMask truth;
        truth.class_name = "water";
        truth.width = W;
        truth.height = H;
        truth.labeled_extent.assign(npix, 1);
        truth.mask.assign(npix, 0);
        truth.mask[3] = truth.mask[77] = 1;
        std::vector<std::uint8_t> pred(npix, 0);
        const auto counts = confusion(pred, classes, W, H, {truth});
        CHECK(counts[0].recall() == 0.0);
    }
    SUBCASE("hand-placed fixture: 40 TP, 10 FN -> 0.8") {
        LabelMask truth;
        truth.class_name = "water";
        truth.width = W;
        truth.height = H;
        truth.labeled_extent.assign(npix, 0);
        truth.mask.assign(npix, 0);
        std::vector<std::uint8_t> pred(npix, 0);
        // labeled block in the corner; 50 positives, prediction hits 40
        for (int i = 0; i < 200; ++i) truth.labeled_extent[i] = 1;
        for (int i = 0; i < 50; ++i) truth.mask[i] = 1;
        for (int i = 0; i < 40; ++i) pred[i] = 1;
        // noise outside the labeled extent must not matter
        for (std::size_t i = 5000; i < 6000; ++i) pred[i] = 1;
        const auto counts = confusion(pred, classes, W, H, {truth});
        CHECK(counts[0].tp == 40);
        CHECK(counts[0].fn == 10);
        CHECK(counts[0].recall() == doctest::Approx(0.8));
        CHECK(counts[0].tp + counts[0].fn == 50);  // positive-labeled pixel count
    }
    SUBCASE("no positive labels -> recall absent, not zero") {
        LabelMask truth;
        truth.class_name = "water";
        truth.width = W;
        truth.height = H;
        truth.labeled_extent.assign(npix, 1);
        truth.mask.assign(npix, 0);
        std::vector<std::uint8_t> pred(npix, 1);
        const auto counts = confusion(pred, classes, W, H, {truth});
        CHECK_FALSE(counts[0].recall().has_value());
    }
    SUBCASE("flipping unlabeled pixels changes nothing") {
        std::mt19937 rng(21);
        LabelMask truth;
        truth.class_name = "water";
        truth.width = W;
        truth.height = H;
        truth.labeled_extent.assign(npix, 0);
        truth.mask.assign(npix, 0);
        for (std::size_t i = 0; i < npix; i += 3) truth.labeled_extent[i] = 1;
        for (std::size_t i = 0; i < npix; i += 9) truth.mask[i] = 1;
        std::vector<std::uint8_t> pred(npix, 0);
        for (std::size_t i = 0; i < npix; i += 2) pred[i] = 1;

        const auto base = confusion(pred, classes, W, H, {truth});
        std::uniform_int_distribution<std::size_t> pick(0, npix - 1);
        for (int trial = 0; trial < 100; ++trial) {
            auto perturbed = pred;
            for (int k = 0; k < 20; ++k) {
                const std::size_t i = pick(rng);
                if (!truth.labeled_extent[i]) perturbed[i] ^= 1;
            }
            const auto got = confusion(perturbed, classes, W, H, {truth});
            CHECK(got[0].tp == base[0].tp);
            CHECK(got[0].fn == base[0].fn);
        }
    }
    SUBCASE("dimension mismatch rejected") {
        LabelMask truth;
        truth.class_name = "water";
        truth.width = 10;
        truth.height = 10;
        truth.labeled_extent.assign(100, 1);
        truth.mask.assign(100, 0);
        std::vector<std::uint8_t> pred(npix, 0);
        CHECK_THROWS_AS(confusion(pred, classes, W, H, {truth}), DomainError);
    }
}

TEST_CASE("recall is monotone nonincreasing in tau") {
    std::mt19937 rng(31);
    const int W = 40, H = 40;
    const std::size_t npix = static_cast<std::size_t>(W) * H;
    std::vector<std::string> classes = {"trees"};
    auto chip = random_chip(0, 0, 40, classes, rng);
    const auto canvas = merge_chips({chip}, W, H);

    LabelMask truth;
    truth.class_name = "trees";
    truth.width = W;
    truth.height = H;
    truth.labeled_extent.assign(npix, 1);
    truth.mask.assign(npix, 0);
    for (std::size_t i = 0; i < npix; i += 4) truth.mask[i] = 1;

    double prev = 2.0;
    for (double tau = 0.05; tau <= 0.95; tau += 0.05) {
        const auto bin = threshold_probs(canvas.probs, tau);
        const auto counts = confusion(bin, classes, W, H, {truth});
        const double r = counts[0].recall().value();
        CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("threshold-then-merge equals merge-then-threshold for max pooling") {
    std::mt19937 rng(41);
    const int W = 48, H = 48;
    std::vector<PredictionChip> chips;
    std::uniform_int_distribution<int> pos(0, 32);
    for (int i = 0; i < 8; ++i)
        chips.push_back(random_chip(pos(rng), pos(rng), 16, kClasses, rng));
    const double tau = 0.35;

    // threshold after merge
    const auto merged = merge_chips(chips, W, H);
    const auto after = threshold_probs(merged.probs, tau);

    // threshold per chip, then binary max-pool
    auto binarized = chips;
    for (auto& c : binarized) {
        const auto bin = threshold_probs(c.probs, tau);
        for (std::size_t i = 0; i < c.probs.size(); ++i) c.probs[i] = bin[i] ? 1.0f : 0.0f;
    }
    const auto merged_bin = merge_chips(binarized, W, H);
    const auto before = threshold_probs(merged_bin.probs, 0.5);

    CHECK(after == before);
}

TEST_CASE("evaluate_pipeline") {
    const int W = 32, H = 32;
    const std::size_t npix = static_cast<std::size_t>(W) * H;

    auto full_truth = [&](const std::string& name, std::uint8_t fill) {
        LabelMask t;
        t.class_name = name;
        t.width = W;
        t.height = H;
        t.labeled_extent.assign(npix, 1);
        t.mask.assign(npix, fill);
        return t;
    };

    SUBCASE("identical perfect chips give recall 1 everywhere") {
        std::vector<PredictionChip> a = {make_chip(0, 0, 32, kClasses, 1.0f)};
        const auto report = evaluate_pipeline(a, a, {full_truth("trees", 1),
                                                     full_truth("water", 1)},
                                              0.35, W, H);
        for (const auto& c : report.classes) CHECK(c.recall() == 1.0);
    }
    SUBCASE("matches manual composition of the four stages") {
        std::mt19937 rng(51);
        std::vector<PredictionChip> a, b;
        std::uniform_int_distribution<int> pos(0, 16);
        for (int i = 0; i < 5; ++i) {
            const int col = pos(rng), row = pos(rng);
            a.push_back(random_chip(col, row, 16, kClasses, rng));
            b.push_back(random_chip(col, row, 16, kClasses, rng));
        }
        std::vector<LabelMask> truth;
        for (const auto& name : {"trees", "buildings", "water", "roads"}) {
            auto t = full_truth(name, 0);
            std::uniform_int_distribution<std::size_t> pick(0, npix - 1);
            for (int k = 0; k < 200; ++k) t.mask[pick(rng)] = 1;
            truth.push_back(std::move(t));
        }

        const auto report = evaluate_pipeline(a, b, truth, 0.35, W, H);

        std::vector<PredictionChip> ens;
        for (std::size_t i = 0; i < a.size(); ++i) ens.push_back(ensemble_pair(a[i], b[i]));
        const auto canvas = merge_chips(ens, W, H);
        const auto bin = threshold_probs(canvas.probs, 0.35);
        const auto manual = report_order(confusion(bin, canvas.classes, W, H, truth));

        REQUIRE(report.classes.size() == manual.size());
        for (std::size_t i = 0; i < manual.size(); ++i) {
            CHECK(report.classes[i].class_name == manual[i].class_name);
            CHECK(report.classes[i].tp == manual[i].tp);
            CHECK(report.classes[i].fn == manual[i].fn);
            CHECK(report.classes[i].fp == manual[i].fp);
            CHECK(report.classes[i].tn == manual[i].tn);
        }
    }
    SUBCASE("report lists classes in the published column order") {
        std::vector<PredictionChip> a = {make_chip(0, 0, 32, kClasses, 0.5f)};
        std::vector<LabelMask> truth = {full_truth("water", 1), full_truth("roads", 1),
                                        full_truth("buildings", 1), full_truth("trees", 1)};
        const auto report = evaluate_pipeline(a, a, truth, 0.35, W, H);
        REQUIRE(report.classes.size() == 4);
        CHECK(report.classes[0].class_name == "trees");
        CHECK(report.classes[1].class_name == "buildings");
        CHECK(report.classes[2].class_name == "water");
        CHECK(report.classes[3].class_name == "roads");

        const auto jr = to_report_json(report, "CPS", "ARD");
        CHECK(jr.at("header") ==
              nlohmann::json::array({"Model", "Input", "Trees", "Buildings", "Water", "Roads"}));
        CHECK(jr.at("rows").at(0).at(0) == "CPS");
    }
}

TEST_CASE("prediction chip file round trip") {
    const auto dir = fs::temp_directory_path() /
                     ("ardc_chip_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::mt19937 rng(61);
    const auto chip = random_chip(12, 34, 8, kClasses, rng);
    const auto path = dir / "c.chip";
    save_prediction_chip(chip, path);
    const auto loaded = load_prediction_chip(path);
    CHECK(loaded.col == 12);
    CHECK(loaded.row == 34);
    CHECK(loaded.classes == kClasses);
    CHECK(loaded.probs == chip.probs);
    fs::remove_all(dir);
}

TEST_CASE("canvas file round trip preserves coverage") {
    const auto dir = fs::temp_directory_path() /
                     ("ardc_canvas_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::mt19937 rng(71);
    auto chip = random_chip(2, 2, 4, kClasses, rng);
    const auto canvas = merge_chips({chip}, 10, 10);
    const auto path = dir / "canvas.raw";
    save_canvas(canvas, path);
    const auto loaded = load_canvas(path);
    CHECK(loaded.classes == canvas.classes);
    CHECK(loaded.covered == canvas.covered);
    CHECK(loaded.probs == canvas.probs);
    fs::remove_all(dir);
}
