#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "augforge/augment/chain.hpp"
#include "augforge/augment/ops.hpp"
#include "augforge/error.hpp"
#include "augforge/imaging/png_io.hpp"
#include "augforge/imaging/resize.hpp"
#include "helpers.hpp"

#include <cmath>
#include <fstream>

using namespace augforge;
using namespace augforge::augment;
using imaging::BBox;
using imaging::derive_stream;
using imaging::Image;
using imaging::images_equal;
using imaging::Mask;
using imaging::masks_equal;
using imaging::RngStream;
using imaging::Sample;
using testutil::TempDir;

namespace {

Sample tiny_sample(std::uint64_t seed = 0, int w = 24, int h = 20) {
    RngStream rng(seed, 1, 2, 3);
    Sample s = testutil::box_filled_sample(rng, w, h);
    s.id = "tiny-" + std::to_string(seed);
    return s;
}

bool samples_equal(const Sample& a, const Sample& b) {
    if (!images_equal(a.image, b.image)) return false;
    if (a.mask.has_value() != b.mask.has_value()) return false;
    if (a.mask && !masks_equal(*a.mask, *b.mask)) return false;
    if (a.boxes.size() != b.boxes.size()) return false;
    for (std::size_t i = 0; i < a.boxes.size(); ++i) {
        if (a.boxes[i].x_min != b.boxes[i].x_min ||
            a.boxes[i].y_min != b.boxes[i].y_min ||
            a.boxes[i].x_max != b.boxes[i].x_max ||
            a.boxes[i].y_max != b.boxes[i].y_max ||
            a.boxes[i].class_id != b.boxes[i].class_id) {
            return false;
        }
    }
    return true;
}

bool in_range(const Image& img) {
    for (int c = 0; c < 3; ++c) {
        if ((img.plane(c) < 0.0f).any() || (img.plane(c) > 1.0f).any()) {
            return false;
        }
    }
    return true;
}

/// One catalog application with everything the kind needs provided.
Sample apply_kind_once(AugmentationKind kind, const Sample& s,
                       const BackgroundPool& pool, RngStream& rng) {
    Sample out = s;
    switch (kind) {
    case AugmentationKind::affine:
        return apply_affine(s, default_params(kind), rng);
    case AugmentationKind::random_crop:
        return apply_random_crop(s, default_params(kind), rng);
    case AugmentationKind::background: {
        const auto idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
        return apply_background(s, pool.at(idx));
    }
    case AugmentationKind::specular:
        out.image = apply_specular(s.image, *s.mask, default_params(kind), rng);
        return out;
    case AugmentationKind::shadow:
        out.image = apply_shadow(s.image, *s.mask, default_params(kind), rng);
        return out;
    default:
        out.image = apply_pixel_op(kind, s.image, default_params(kind), rng);
        return out;
    }
}

} // namespace

TEST_CASE("catalog has 30 kinds with stable names and classes") {
    CHECK(kCatalogSize == 30);
    CHECK(kind_name(AugmentationKind::affine) == "affine");
    CHECK(kind_name(AugmentationKind::additive_gaussian_noise) ==
          "additive_gaussian_noise");
    CHECK(kind_from_name("super_pixels") == AugmentationKind::super_pixels);
    CHECK_THROWS_AS(kind_from_name("style"), ConfigError);

    int color = 0, geometric = 0, mixing = 0, kernel = 0, deletion = 0, space = 0;
    for (int i = 0; i < kCatalogSize; ++i) {
        switch (kind_class(static_cast<AugmentationKind>(i))) {
        case AugmentationClass::color: ++color; break;
        case AugmentationClass::geometric: ++geometric; break;
        case AugmentationClass::mixing: ++mixing; break;
        case AugmentationClass::kernel: ++kernel; break;
        case AugmentationClass::deletion: ++deletion; break;
        case AugmentationClass::space: ++space; break;
        }
    }
    CHECK(color == 11);
    CHECK(geometric == 2);
    CHECK(mixing == 3);
    CHECK(kernel == 8);
    CHECK(deletion == 4);
    CHECK(space == 2);

    CHECK(transforms_annotations(AugmentationKind::affine));
    CHECK(transforms_annotations(AugmentationKind::random_crop));
    CHECK(!transforms_annotations(AugmentationKind::background));
    CHECK(!transforms_annotations(AugmentationKind::invert));
}

TEST_CASE("out-of-range params are rejected") {
    ParamSet p = default_params(AugmentationKind::dropout);
    p["fraction_max"] = 1.5;
    CHECK_THROWS_AS(validate_params(AugmentationKind::dropout, p), ConfigError);
    ParamSet q = default_params(AugmentationKind::gaussian_blur);
    q["sigma_min"] = 3.0; // above sigma_max
    CHECK_THROWS_AS(validate_params(AugmentationKind::gaussian_blur, q),
                    ConfigError);
    CHECK_THROWS_AS(validate_params(AugmentationKind::invert,
                                    ParamSet{{"nope", 1.0}}),
                    ConfigError);
}

TEST_CASE("all-inactive chain is the identity") {
    const Sample s = tiny_sample(1);
    const Sample out = apply_chain(ChainConfig::defaults(), s, 42, 7);
    CHECK(samples_equal(out, s));
}

TEST_CASE("invert chain on pixel 0.25 gives 0.75") {
    Sample s;
    s.id = "px";
    s.image = Image(1, 1, 0.25f);
    ChainConfig cfg = ChainConfig::defaults();
    cfg.spec(AugmentationKind::invert).active = true;
    cfg.spec(AugmentationKind::invert).probability = 1.0;
    const Sample out = apply_chain(cfg, s, 0, 0);
    CHECK(out.image.at(0, 0, 0) == 0.75f);
    CHECK(out.image.at(0, 0, 1) == 0.75f);
    CHECK(out.image.at(0, 0, 2) == 0.75f);
}

TEST_CASE("same config and key replay bit-identically") {
    const Sample s = tiny_sample(2);
    ChainConfig cfg = ChainConfig::defaults();
    for (const auto kind :
         {AugmentationKind::invert, AugmentationKind::gaussian_blur,
          AugmentationKind::affine, AugmentationKind::dropout,
          AugmentationKind::specular, AugmentationKind::snow}) {
        cfg.spec(kind).active = true;
        cfg.spec(kind).probability = 0.7;
    }
    const Sample a = apply_chain(cfg, s, 5, 9);
    const Sample b = apply_chain(cfg, s, 5, 9);
    CHECK(samples_equal(a, b));
    // A different trial id produces a different outcome for this config.
    const Sample c = apply_chain(cfg, s, 5, 10);
    CHECK(!images_equal(a.image, c.image));
}

TEST_CASE("probability zero or inactive specs are exact no-ops") {
    const Sample s = tiny_sample(3);
    ChainConfig cfg = ChainConfig::defaults();
    cfg.spec(AugmentationKind::invert).active = true;
    cfg.spec(AugmentationKind::invert).probability = 0.0;
    cfg.spec(AugmentationKind::snow).active = false;
    cfg.spec(AugmentationKind::snow).probability = 1.0;
    CHECK(samples_equal(apply_chain(cfg, s, 1, 1), s));
}

TEST_CASE("background in chain requires pool and mask") {
    Sample s = tiny_sample(4);
    ChainConfig cfg = ChainConfig::defaults();
    cfg.spec(AugmentationKind::background).active = true;
    cfg.spec(AugmentationKind::background).probability = 1.0;
    CHECK_THROWS_AS(apply_chain(cfg, s, 0, 0), ConfigError);

    RngStream rng(8, 0, 0, 0);
    BackgroundPool pool({testutil::random_image(rng, 10, 8)});
    ChainOptions options;
    options.background_pool = &pool;
    Sample no_mask = s;
    no_mask.mask.reset();
    CHECK_THROWS_AS(apply_chain(cfg, no_mask, 0, 0, options), ConfigError);
    CHECK_NOTHROW(apply_chain(cfg, s, 0, 0, options));
}

TEST_CASE("specular bloom peaks at the sampled center") {
    // Single foreground pixel on a black image: distance 0 means the output
    // hits peak exactly.
    Image img(8, 8, 0.0f);
    Mask mask(8, 8, 0);
    mask.set(4, 4, true);
    RngStream rng(0, 0, 0, 0);
    const Image out =
        apply_specular(img, mask, default_params(AugmentationKind::specular), rng);
    CHECK(out.at(4, 4, 0) == 1.0f);
    CHECK(out.at(4, 4, 1) == 1.0f);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            for (int c = 0; c < 3; ++c) {
                CHECK(out.at(x, y, c) >= img.at(x, y, c));
            }
            if (x != 4 || y != 4) CHECK(out.at(x, y, 0) < 1.0f);
        }
    }
}

TEST_CASE("specular falloff at distance sigma is exp(-1/2)") {
    // Foreground row x in [0, 7] at y = 4; its bounding box spans 8 x 1
    // pixels, diagonal sqrt(65). The brightest pixel (4,4) is the unique
    // top-decile member, so it becomes the center.
    Image img(16, 9, 0.0f);
    Mask mask(16, 9, 0);
    for (int x = 0; x < 8; ++x) mask.set(x, 4, true);
    img.at(4, 4, 0) = img.at(4, 4, 1) = img.at(4, 4, 2) = 1.0f;

    ParamSet params = default_params(AugmentationKind::specular);
    params["sigma_frac"] = 2.0 / std::sqrt(65.0); // sigma = 2 pixels
    RngStream rng(0, 0, 0, 0);
    const Image out = apply_specular(img, mask, params, rng);
    CHECK(out.at(6, 4, 0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-6)); // distance 2 = sigma
    CHECK(out.at(4, 4, 0) == 1.0f);
}

TEST_CASE("specular with peak zero is the identity") {
    const Sample s = tiny_sample(5);
    ParamSet params = default_params(AugmentationKind::specular);
    params["peak"] = 0.0;
    RngStream rng(1, 1, 1, 1);
    CHECK(images_equal(apply_specular(s.image, *s.mask, params, rng), s.image));
}

TEST_CASE("specular requires foreground") {
    Image img(4, 4, 0.5f);
    Mask empty(4, 4, 0);
    RngStream rng(0, 0, 0, 0);
    CHECK_THROWS_AS(
        apply_specular(img, empty, default_params(AugmentationKind::specular), rng),
        ConfigError);
    CHECK_THROWS_AS(
        apply_shadow(img, empty, default_params(AugmentationKind::shadow), rng),
        ConfigError);
}

TEST_CASE("shadow darkens dim foreground only") {
    Image img(3, 1, 0.0f);
    Mask mask(3, 1, 0);
    mask.set(0, 0, true);
    mask.set(1, 0, true);
    // pixel 0: bright foreground (luminance 0.8); pixel 1: dim foreground
    // (0.4); pixel 2: dim background.
    for (int c = 0; c < 3; ++c) {
        img.at(0, 0, c) = 0.8f;
        img.at(1, 0, c) = 0.4f;
        img.at(2, 0, c) = 0.4f;
    }
    RngStream rng(0, 0, 0, 0);
    const Image out =
        apply_shadow(img, mask, default_params(AugmentationKind::shadow), rng);
    CHECK(out.at(0, 0, 0) == 0.8f); // above threshold: bit-unchanged
    CHECK(out.at(1, 0, 0) == 0.2f); // 0.4 * 0.5
    CHECK(out.at(2, 0, 0) == 0.4f); // background untouched

    ParamSet unit = default_params(AugmentationKind::shadow);
    unit["factor"] = 1.0;
    CHECK(images_equal(apply_shadow(img, mask, unit, rng), img));
}

TEST_CASE("crop box arithmetic is offset then scale") {
    Sample s;
    s.id = "arith";
    s.image = Image(960, 600, 0.5f);
    s.boxes.push_back({200.0, 100.0, 300.0, 200.0, 0});
    const Sample out = crop_resize_sample(s, 100, 50, 480, 300);
    REQUIRE(out.boxes.size() == 1);
    CHECK(out.boxes[0].x_min == 200.0);
    CHECK(out.boxes[0].y_min == 100.0);
    CHECK(out.boxes[0].x_max == 400.0);
    CHECK(out.boxes[0].y_max == 300.0);
    CHECK(out.image.width() == 960);
    CHECK(out.image.height() == 600);
}

TEST_CASE("full-frame crop window leaves boxes unchanged") {
    const Sample s = tiny_sample(6);
    const Sample out = crop_resize_sample(s, 0, 0, s.image.width(),
                                          s.image.height());
    CHECK(samples_equal(out, s));
}

TEST_CASE("random_crop falls back to identity when nothing fits") {
    Sample s = tiny_sample(7);
    s.boxes = {{0.0, 0.0, static_cast<double>(s.image.width()),
                static_cast<double>(s.image.height()), 0}};
    ParamSet params = default_params(AugmentationKind::random_crop);
    params["min_visible"] = 1.0;
    params["scale_max"] = 0.9; // every proposal loses area
    RngStream rng(3, 3, 3, 3);
    const Sample out = apply_random_crop(s, params, rng);
    CHECK(samples_equal(out, s));
}

TEST_CASE("random_crop needs a box") {
    Sample s = tiny_sample(8);
    s.boxes.clear();
    RngStream rng(0, 0, 0, 0);
    CHECK_THROWS_AS(
        apply_random_crop(s, default_params(AugmentationKind::random_crop), rng),
        ConfigError);
}

TEST_CASE("rotation by 0 degrees is bit-identical") {
    const Sample s = tiny_sample(9);
    const Sample out = rotate_sample(s, 0.0);
    CHECK(samples_equal(out, s));
}

TEST_CASE("rotation by 90 degrees maps boxes exactly on a square frame") {
    Sample s;
    s.id = "r90";
    const int w = 64;
    s.image = Image(w, w, 0.25f);
    s.boxes.push_back({10.0, 20.0, 30.0, 40.0, 0});
    const Sample out = rotate_sample(s, 90.0);
    REQUIRE(out.boxes.size() == 1);
    CHECK(out.boxes[0].x_min == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(out.boxes[0].y_min == doctest::Approx(w - 30.0).epsilon(1e-9));
    CHECK(out.boxes[0].x_max == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(out.boxes[0].y_max == doctest::Approx(w - 10.0).epsilon(1e-9));
}

TEST_CASE("rotation by 180 degrees is point symmetry") {
    Sample s;
    s.id = "r180";
    s.image = Image(50, 30, 0.5f);
    s.boxes.push_back({5.0, 8.0, 20.0, 25.0, 2});
    const Sample out = rotate_sample(s, 180.0);
    REQUIRE(out.boxes.size() == 1);
    CHECK(out.boxes[0].x_min == doctest::Approx(50.0 - 20.0).epsilon(1e-9));
    CHECK(out.boxes[0].y_min == doctest::Approx(30.0 - 25.0).epsilon(1e-9));
    CHECK(out.boxes[0].x_max == doctest::Approx(50.0 - 5.0).epsilon(1e-9));
    CHECK(out.boxes[0].y_max == doctest::Approx(30.0 - 8.0).epsilon(1e-9));
    CHECK(out.boxes[0].class_id == 2);
}

TEST_CASE("background replaces exactly the masked-out pixels") {
    RngStream rng(10, 0, 0, 0);
    Sample s;
    s.id = "bg";
    s.image = testutil::random_image(rng, 12, 10);
    Mask mask(12, 10, 0);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) mask.set(x, y, (x + y) % 2 == 0);
    }
    s.mask = mask;
    const Image pool_img = testutil::random_image(rng, 12, 10);

    const Sample out = apply_background(s, pool_img);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) {
            for (int c = 0; c < 3; ++c) {
                const float expected =
                    mask.at(x, y) ? s.image.at(x, y, c) : pool_img.at(x, y, c);
                CHECK(out.image.at(x, y, c) == expected);
            }
        }
    }
    CHECK(masks_equal(*out.mask, mask));
    CHECK(out.boxes.size() == s.boxes.size());
}

TEST_CASE("background with an all-foreground mask is the identity") {
    RngStream rng(11, 0, 0, 0);
    Sample s;
    s.id = "allfg";
    s.image = testutil::random_image(rng, 6, 6);
    s.mask = Mask(6, 6, 1);
    const Image pool_img = testutil::random_image(rng, 6, 6);
    CHECK(images_equal(apply_background(s, pool_img).image, s.image));

    Sample bg = s;
    bg.mask = Mask(6, 6, 0);
    CHECK(images_equal(apply_background(bg, pool_img).image, pool_img));
}

TEST_CASE("edge blend mask endpoints and midpoint") {
    RngStream rng(12, 0, 0, 0);
    const Image img = testutil::random_image(rng, 9, 7);

    const imaging::Plane zeros = imaging::Plane::Zero(7, 9);
    CHECK(images_equal(blend_with_edges(img, zeros), img));

    const imaging::Plane ones = imaging::Plane::Constant(7, 9, 1.0f);
    CHECK(images_equal(blend_with_edges(img, ones), edge_image(img)));

    // Constant image: edge response is zero, so m = 0.5 halves every value.
    const Image flat(9, 7, 0.6f);
    const imaging::Plane half = imaging::Plane::Constant(7, 9, 0.5f);
    const Image blended = blend_with_edges(flat, half);
    for (int c = 0; c < 3; ++c) {
        CHECK(blended.at(4, 3, c) == doctest::Approx(0.3).epsilon(1e-6));
    }
}

TEST_CASE("simplex noise field is deterministic and in range") {
    RngStream a(5, 5, 5, 5);
    RngStream b(5, 5, 5, 5);
    const auto f1 = simplex_noise_field(32, 24, 2, 16.0, a);
    const auto f2 = simplex_noise_field(32, 24, 2, 16.0, b);
    CHECK((f1 == f2).all());
    CHECK((f1 >= 0.0f).all());
    CHECK((f1 <= 1.0f).all());
    // not degenerate
    CHECK(f1.maxCoeff() > f1.minCoeff());
}

TEST_CASE("super pixels: replacement probability endpoints") {
    RngStream rng(6, 6, 6, 6);
    const Image img = testutil::random_image(rng, 16, 12);

    ParamSet off = default_params(AugmentationKind::super_pixels);
    off["replace_prob"] = 0.0;
    RngStream r1(1, 1, 1, 1);
    CHECK(images_equal(apply_super_pixels(img, off, r1), img));

    // Constant image: means equal the constant, replacement is a fixed point.
    const Image flat(16, 12, 0.3f);
    ParamSet on = default_params(AugmentationKind::super_pixels);
    on["replace_prob"] = 1.0;
    RngStream r2(2, 2, 2, 2);
    const Image out = apply_super_pixels(flat, on, r2);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) {
            CHECK(out.at(x, y, 0) == doctest::Approx(0.3).epsilon(1e-6));
        }
    }
}

TEST_CASE("super pixels replace a cell by its mean color") {
    Image img(2, 1);
    for (int c = 0; c < 3; ++c) {
        img.at(0, 0, c) = 0.2f;
        img.at(1, 0, c) = 0.4f;
    }
    ParamSet params = default_params(AugmentationKind::super_pixels);
    params["n_segments"] = 1;
    params["replace_prob"] = 1.0;
    RngStream rng(3, 3, 3, 3);
    const Image out = apply_super_pixels(img, params, rng);
    CHECK(out.at(0, 0, 0) == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(out.at(1, 0, 0) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("multiply by 2 doubles and clamps") {
    Image img(1, 1);
    img.at(0, 0, 0) = 0.3f;
    img.at(0, 0, 1) = 0.7f;
    img.at(0, 0, 2) = 0.1f;
    const Image out = multiply_core(img, {2.0f, 2.0f, 2.0f});
    CHECK(out.at(0, 0, 0) == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(out.at(0, 0, 1) == 1.0f); // clamped from 1.4
    CHECK(out.at(0, 0, 2) == doctest::Approx(0.2).epsilon(1e-7));
}

TEST_CASE("invert with probability 1 is an involution") {
    Sample s = tiny_sample(13);
    // Dyadic values (multiples of 1/256) so 1 - v is exact in float and the
    // complement of the complement lands back on v bit-for-bit.
    for (int c = 0; c < 3; ++c) {
        s.image.plane(c) =
            (s.image.plane(c) * 256.0f).round().min(256.0f).max(0.0f) / 256.0f;
    }
    ChainConfig cfg = ChainConfig::defaults();
    cfg.spec(AugmentationKind::invert).active = true;
    cfg.spec(AugmentationKind::invert).probability = 1.0;
    const Sample once = apply_chain(cfg, s, 2, 2);
    // Feed the output back as a fresh sample with the same id/key.
    Sample again = once;
    const Sample twice = apply_chain(cfg, again, 2, 2);
    CHECK(images_equal(twice.image, s.image));
}

TEST_CASE("dropout zeroes a binomially bounded pixel count") {
    const int w = 64, h = 64;
    RngStream img_rng(14, 0, 0, 0);
    const Image img = testutil::random_image(img_rng, w, h, 0.2f, 1.0f);
    const double f = 0.1;
    RngStream rng(14, 1, 0, 0);
    const Image out = dropout_core(img, f, false, rng);
    std::int64_t zeroed = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (out.at(x, y, 0) == 0.0f && out.at(x, y, 1) == 0.0f &&
                out.at(x, y, 2) == 0.0f) {
                ++zeroed;
            }
        }
    }
    const double n = static_cast<double>(w) * h;
    const double bound = 4.0 * std::sqrt(n * f * (1.0 - f));
    CHECK(std::abs(static_cast<double>(zeroed) - f * n) <= bound);
}

TEST_CASE("coarse dropout zeroes exactly the given rectangles") {
    const Image img(10, 8, 0.9f);
    const Image out = coarse_dropout_core(img, {{2, 1, 3, 2}, {7, 5, 2, 2}});
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 10; ++x) {
            const bool inside = (x >= 2 && x < 5 && y >= 1 && y < 3) ||
                                (x >= 7 && x < 9 && y >= 5 && y < 7);
            CHECK(out.at(x, y, 0) == (inside ? 0.0f : 0.9f));
        }
    }
}

TEST_CASE("every catalog kind is deterministic, in range, and leaves "
          "annotations alone unless geometric") {
    RngStream pool_rng(15, 0, 0, 0);
    const BackgroundPool pool({testutil::random_image(pool_rng, 10, 8)});

    for (int i = 0; i < kCatalogSize; ++i) {
        const auto kind = static_cast<AugmentationKind>(i);
        CAPTURE(kind_name(kind));
        for (int rep = 0; rep < 5; ++rep) {
            const Sample s = tiny_sample(static_cast<std::uint64_t>(100 + rep));
            RngStream r1(50, static_cast<std::uint64_t>(rep), 0,
                         static_cast<std::uint64_t>(i));
            RngStream r2(50, static_cast<std::uint64_t>(rep), 0,
                         static_cast<std::uint64_t>(i));
            const Sample a = apply_kind_once(kind, s, pool, r1);
            const Sample b = apply_kind_once(kind, s, pool, r2);
            CHECK(samples_equal(a, b));
            CHECK(in_range(a.image));
            if (!transforms_annotations(kind)) {
                CHECK(masks_equal(*a.mask, *s.mask));
                CHECK(a.boxes.size() == s.boxes.size());
                for (std::size_t bi = 0; bi < a.boxes.size(); ++bi) {
                    CHECK(a.boxes[bi].x_min == s.boxes[bi].x_min);
                    CHECK(a.boxes[bi].x_max == s.boxes[bi].x_max);
                }
            }
        }
    }
}

TEST_CASE("space augmentations are monotone pixel-wise") {
    for (int rep = 0; rep < 10; ++rep) {
        const Sample s = tiny_sample(static_cast<std::uint64_t>(200 + rep));
        RngStream r1(60, static_cast<std::uint64_t>(rep), 0, 0);
        const Image brighter = apply_specular(
            s.image, *s.mask, default_params(AugmentationKind::specular), r1);
        RngStream r2(60, static_cast<std::uint64_t>(rep), 0, 1);
        const Image darker = apply_shadow(
            s.image, *s.mask, default_params(AugmentationKind::shadow), r2);
        for (int c = 0; c < 3; ++c) {
            CHECK((brighter.plane(c) >= s.image.plane(c)).all());
            CHECK((darker.plane(c) <= s.image.plane(c)).all());
        }
    }
}

TEST_CASE("chain config JSON round trip and partial documents") {
    ChainConfig cfg = ChainConfig::defaults();
    cfg.spec(AugmentationKind::snow).active = true;
    cfg.spec(AugmentationKind::snow).probability = 0.5;
    cfg.spec(AugmentationKind::add_value).params["delta_max"] = 0.1;

    const auto doc = cfg.to_json();
    CHECK(doc["augmentations"].size() == kCatalogSize);
    const ChainConfig back = ChainConfig::from_json(doc);
    CHECK(back.spec(AugmentationKind::snow).active);
    CHECK(back.spec(AugmentationKind::snow).probability == 0.5);
    CHECK(back.spec(AugmentationKind::add_value).params.at("delta_max") == 0.1);

    // Subset document: unlisted kinds default to inactive.
    const auto partial = nlohmann::json::parse(
        R"({"augmentations":[{"kind":"invert","active":true,"probability":1.0}]})");
    const ChainConfig pc = ChainConfig::from_json(partial);
    CHECK(pc.spec(AugmentationKind::invert).active);
    CHECK(pc.active_count() == 1);

    const auto dup = nlohmann::json::parse(
        R"({"augmentations":[{"kind":"invert"},{"kind":"invert"}]})");
    CHECK_THROWS_AS(ChainConfig::from_json(dup), ConfigError);

    const auto bad = nlohmann::json::parse(
        R"({"augmentations":[{"kind":"invert","probability":1.5}]})");
    CHECK_THROWS_AS(ChainConfig::from_json(bad), ConfigError);
}

TEST_CASE("preview grid writes 31 deterministic tiles") {
    TempDir dir("preview");
    const Sample s = tiny_sample(16, 30, 24);
    const auto p1 = dir.path() / "grid1.png";
    const auto p2 = dir.path() / "grid2.png";
    CHECK(preview_grid(s, p1) == kCatalogSize + 1);
    CHECK(preview_grid(s, p2) == kCatalogSize + 1);
    std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(!bytes_a.empty());
    CHECK(bytes_a == bytes_b);
}

TEST_CASE("preview marks degraded tiles when the mask is missing") {
    TempDir dir("preview-marker");
    Sample s;
    s.id = "nomask";
    s.image = Image(30, 24, 1.0f); // white source
    const auto path = dir.path() / "grid.png";
    CHECK(preview_grid(s, path) == kCatalogSize + 1);

    const Image grid = imaging::load_image(path);
    // Tile 0 is the source; the background tile (catalog index 3) sits at
    // grid position 4 and must carry the black marker square.
    const int tile_w = 30, tile_h = 24, gap = 2;
    const int col = 4;
    const int gx = col * tile_w + (col + 1) * gap;
    const int gy = gap;
    CHECK(grid.at(gx + 1, gy + 1, 0) == 0.0f);
    // The source tile stays white at the same offset.
    CHECK(grid.at(gap + 1, gy + 1, 0) == 1.0f);
}

