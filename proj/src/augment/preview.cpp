#include "augforge/augment/chain.hpp"

#include "augforge/error.hpp"
#include "augforge/imaging/png_io.hpp"
#include "augforge/imaging/resize.hpp"

#include <cmath>

namespace augforge::augment {

using imaging::BBox;
using imaging::derive_stream;
using imaging::hash_id;

namespace {

constexpr int kTileWidth = 240;
constexpr int kGap = 2;

/// Black square in the top-left corner marking a degraded tile (entry could
/// not run because a mask, box or pool was missing).
void stamp_marker(Image& tile) {
    const int n = std::min({12, tile.width(), tile.height()});
    for (int c = 0; c < 3; ++c) {
        tile.plane(c).block(0, 0, n, n).setZero();
    }
}

BBox synthesize_box(const Sample& s) {
    if (s.mask && s.mask->foreground_count() > 0) {
        int min_x = s.mask->width(), max_x = -1, min_y = s.mask->height(), max_y = -1;
        for (int y = 0; y < s.mask->height(); ++y) {
            for (int x = 0; x < s.mask->width(); ++x) {
                if (s.mask->at(x, y)) {
                    min_x = std::min(min_x, x);
                    max_x = std::max(max_x, x);
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
            }
        }
        return {static_cast<double>(min_x), static_cast<double>(min_y),
                static_cast<double>(max_x + 1), static_cast<double>(max_y + 1), 0};
    }
    const double w = s.image.width();
    const double h = s.image.height();
    return {w / 4.0, h / 4.0, 3.0 * w / 4.0, 3.0 * h / 4.0, 0};
}

} // namespace

int preview_grid(const Sample& s, const std::filesystem::path& out_path) {
    const int w = s.image.width();
    const int h = s.image.height();
    const std::uint64_t sid = hash_id(s.id);

    Sample source = s;
    if (source.boxes.empty()) source.boxes.push_back(synthesize_box(s));

    std::vector<Image> tiles;
    tiles.reserve(kCatalogSize + 1);
    tiles.push_back(s.image);

    for (int i = 0; i < kCatalogSize; ++i) {
        const auto kind = static_cast<AugmentationKind>(i);
        const ParamSet params = default_params(kind);
        RngStream rng = derive_stream(0, 0, sid, static_cast<std::uint64_t>(i));

        Image tile = s.image;
        switch (kind) {
        case AugmentationKind::affine:
            tile = apply_affine(source, params, rng).image;
            break;
        case AugmentationKind::random_crop:
            tile = apply_random_crop(source, params, rng).image;
            break;
        case AugmentationKind::background:
            // No pool in preview; leave the source and mark the tile.
            stamp_marker(tile);
            break;
        case AugmentationKind::specular:
            if (s.mask && s.mask->foreground_count() > 0) {
                tile = apply_specular(s.image, *s.mask, params, rng);
            } else {
                stamp_marker(tile);
            }
            break;
        case AugmentationKind::shadow:
            if (s.mask && s.mask->foreground_count() > 0) {
                tile = apply_shadow(s.image, *s.mask, params, rng);
            } else {
                stamp_marker(tile);
            }
            break;
        default:
            tile = apply_pixel_op(kind, s.image, params, rng);
            break;
        }
        tiles.push_back(std::move(tile));
    }

    const int tile_w = std::min(w, kTileWidth);
    const int tile_h = std::max(1, static_cast<int>(std::lround(
                                       static_cast<double>(h) * tile_w / w)));
    const int n_tiles = static_cast<int>(tiles.size());
    const int cols = 6;
    const int rows = (n_tiles + cols - 1) / cols;

    const int grid_w = cols * tile_w + (cols + 1) * kGap;
    const int grid_h = rows * tile_h + (rows + 1) * kGap;
    Image grid(grid_w, grid_h, Scalar(1));
    for (int t = 0; t < n_tiles; ++t) {
        const Image scaled =
            imaging::resize_bilinear(tiles[static_cast<std::size_t>(t)], tile_w, tile_h);
        const int gx = (t % cols) * tile_w + (t % cols + 1) * kGap;
        const int gy = (t / cols) * tile_h + (t / cols + 1) * kGap;
        for (int c = 0; c < 3; ++c) {
            grid.plane(c).block(gy, gx, tile_h, tile_w) = scaled.plane(c);
        }
    }
    imaging::save_image(grid, out_path);
    return n_tiles;
}

} // namespace augforge::augment
