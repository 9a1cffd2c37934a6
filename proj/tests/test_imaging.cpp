#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "augforge/error.hpp"
#include "augforge/imaging/png_io.hpp"
#include "augforge/imaging/resize.hpp"
#include "augforge/imaging/rng.hpp"
#include "augforge/imaging/types.hpp"
#include "helpers.hpp"

#include <png.h>

#include <cmath>
#include <fstream>
#include <set>

using namespace augforge;
using namespace augforge::imaging;
using testutil::TempDir;

namespace {

/// RGBA PNG writer used only to exercise the rejection path.
void write_rgba_png(const std::filesystem::path& path, int w, int h) {
    FILE* fp = fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w),
                 static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB_ALPHA,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 4, 128);
    for (int y = 0; y < h; ++y) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    fclose(fp);
}

} // namespace

TEST_CASE("quantization endpoints and midpoint") {
    CHECK(quantize_channel(1.0f) == 255);
    CHECK(quantize_channel(0.0f) == 0);
    // round(127.5) away from zero
    CHECK(quantize_channel(0.5f) == 128);
    CHECK(quantize_channel(2.0f) == 255);  // clamped
    CHECK(quantize_channel(-1.0f) == 0);
}

TEST_CASE("png round trip maps bytes to v/255") {
    TempDir dir("png");
    Image img(3, 1);
    img.at(0, 0, 0) = 0.0f;
    img.at(1, 0, 0) = 128.0f / 255.0f;
    img.at(2, 0, 0) = 1.0f;
    const auto path = dir.path() / "p.png";
    save_image(img, path);
    const Image back = load_image(path);
    CHECK(back.at(0, 0, 0) == 0.0f);
    CHECK(back.at(1, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
    CHECK(back.at(1, 0, 0) == doctest::Approx(0.50196).epsilon(1e-4));
    CHECK(back.at(2, 0, 0) == 1.0f);
}

TEST_CASE("save then load is bit-identical on quantized images") {
    TempDir dir("roundtrip");
    RngStream rng(11, 0, 0, 0);
    Image img = testutil::random_image(rng, 17, 9);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                img.at(x, y, c) = quantize_channel(img.at(x, y, c)) / 255.0f;
            }
        }
    }
    const auto path = dir.path() / "q.png";
    save_image(img, path);
    CHECK(images_equal(load_image(path), img));

    // Re-encoding the loaded image reproduces identical bytes.
    const auto path2 = dir.path() / "q2.png";
    save_image(load_image(path), path2);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes_a == bytes_b);
}

TEST_CASE("grayscale PNGs widen to three identical channels") {
    TempDir dir("gray");
    Mask m(4, 2, 0);
    m.set(1, 0, true);
    m.set(3, 1, true);
    const auto path = dir.path() / "m.png";
    save_mask(m, path);

    const Image img = load_image(path);
    CHECK(img.width() == 4);
    CHECK(img.height() == 2);
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 4; ++x) {
            const float v = m.at(x, y) ? 1.0f : 0.0f;
            for (int c = 0; c < 3; ++c) CHECK(img.at(x, y, c) == v);
        }
    }
    CHECK(masks_equal(load_mask(path), m));
}

TEST_CASE("decoder rejects what it does not support, naming the path") {
    TempDir dir("reject");

    const auto missing = dir.path() / "missing.png";
    CHECK_THROWS_WITH_AS(load_image(missing),
                         doctest::Contains("missing.png"), IoError);

    const auto text = dir.path() / "not_png.png";
    std::ofstream(text) << "definitely not a png";
    CHECK_THROWS_WITH_AS(load_image(text), doctest::Contains("not_png.png"),
                         IoError);

    const auto rgba = dir.path() / "rgba.png";
    write_rgba_png(rgba, 2, 2);
    CHECK_THROWS_WITH_AS(load_image(rgba), doctest::Contains("rgba.png"),
                         IoError);
    // masks must be single channel
    Image img(2, 2, 0.5f);
    const auto rgb = dir.path() / "rgb.png";
    save_image(img, rgb);
    CHECK_THROWS_AS(load_mask(rgb), IoError);
}

TEST_CASE("identical stream keys replay identical sequences") {
    RngStream a(1, 2, 3, 4);
    RngStream b(1, 2, 3, 4);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("changing any key component changes the stream") {
    const std::uint64_t base[4] = {10, 20, 30, 40};
    RngStream ref(base[0], base[1], base[2], base[3]);
    const double first = ref.uniform();
    for (int slot = 0; slot < 4; ++slot) {
        std::uint64_t k[4] = {base[0], base[1], base[2], base[3]};
        k[slot] += 1;
        RngStream other(k[0], k[1], k[2], k[3]);
        CHECK(other.uniform() != first);
    }
}

TEST_CASE("first draws collide almost never across 10^4 key pairs") {
    int collisions = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        RngStream a(7, i, 0, 0);
        RngStream b(7, i, 0, 1);
        if (a.next_u64() == b.next_u64()) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("uniform draws pass a Kolmogorov-Smirnov check") {
    RngStream rng(99, 1, 2, 3);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) {
        d = rng.uniform();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
    std::sort(draws.begin(), draws.end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = draws[static_cast<std::size_t>(i)];
        d_stat = std::max(d_stat, std::abs((i + 1.0) / n - cdf));
        d_stat = std::max(d_stat, std::abs(cdf - static_cast<double>(i) / n));
    }
    // 1% critical value 1.63 / sqrt(n)
    CHECK(d_stat < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("gaussian draws have sane moments") {
    RngStream rng(5, 6, 7, 8);
    const int n = 50000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("resize keeps constants constant and dimensions exact") {
    Image img(8, 6, 0.25f);
    const Image up = resize_bilinear(img, 16, 12);
    CHECK(up.width() == 16);
    CHECK(up.height() == 12);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) {
            CHECK(up.at(x, y, 0) == doctest::Approx(0.25).epsilon(1e-6));
        }
    }
    CHECK(images_equal(resize_bilinear(img, 8, 6), img));

    Mask m(4, 4, 0);
    m.set(0, 0, true);
    m.set(1, 0, true);
    const Mask m2 = resize_nearest(m, 8, 8);
    CHECK(m2.at(0, 0));
    CHECK(m2.at(3, 0));
    CHECK(!m2.at(4, 0));
    CHECK(m2.foreground_count() == 8);
}

TEST_CASE("crop extracts the exact block") {
    RngStream rng(3, 1, 4, 1);
    const Image img = testutil::random_image(rng, 10, 7);
    const Image c = crop(img, 2, 1, 5, 4);
    CHECK(c.width() == 5);
    CHECK(c.height() == 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 5; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                CHECK(c.at(x, y, ch) == img.at(x + 2, y + 1, ch));
            }
        }
    }
    CHECK_THROWS_AS(crop(img, 6, 0, 5, 4), ConfigError);
}

TEST_CASE("bbox clipping clamps into the frame") {
    const BBox b{-5.0, 2.0, 15.0, 20.0, 1};
    const BBox c = b.clipped(10.0, 12.0);
    CHECK(c.x_min == 0.0);
    CHECK(c.y_min == 2.0);
    CHECK(c.x_max == 10.0);
    CHECK(c.y_max == 12.0);
    CHECK(c.valid());
    CHECK(BBox{12.0, 0.0, 20.0, 5.0, 0}.clipped(10.0, 10.0).valid() == false);
}
