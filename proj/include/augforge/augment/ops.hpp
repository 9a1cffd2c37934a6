#pragma once

#include "augforge/augment/catalog.hpp"
#include "augforge/imaging/rng.hpp"
#include "augforge/imaging/types.hpp"

#include <array>

namespace augforge::augment {

using imaging::Image;
using imaging::Mask;
using imaging::Plane;
using imaging::RngStream;
using imaging::Sample;
using imaging::Scalar;

// ---------------------------------------------------------------------------
// Catalog entry points. Each draws its parameters from the stream and returns
// a new value; inputs are never modified and outputs are clamped to [0, 1].
// ---------------------------------------------------------------------------

/// Pixel-level kinds: all color, kernel and deletion entries plus snow/fog.
Image apply_pixel_op(AugmentationKind kind, const Image& img,
                     const ParamSet& params, RngStream& rng);

/// White bloom centered on a bright foreground pixel; output >= input.
Image apply_specular(const Image& img, const Mask& mask, const ParamSet& params,
                     RngStream& rng);

/// Darkens dim foreground below the luminance threshold; bright foreground
/// and the whole background stay bit-identical.
Image apply_shadow(const Image& img, const Mask& mask, const ParamSet& params,
                   RngStream& rng);

/// Random rotation about the image center; boxes become the axis-aligned
/// hull of their rotated corners, clipped to the frame.
Sample apply_affine(const Sample& s, const ParamSet& params, RngStream& rng);

/// Scaled crop resized back to the source resolution; rejects windows that
/// would hide more than (1 - min_visible) of any box, identity after 20
/// rejected proposals.
Sample apply_random_crop(const Sample& s, const ParamSet& params,
                         RngStream& rng);

/// Replaces background pixels (mask == 0) with a pool image resized to fit.
Sample apply_background(const Sample& s, const Image& pool_image);

/// Gradient-noise mask blending the image with its edge response.
Image apply_simplex_noise(const Image& img, const ParamSet& params,
                          RngStream& rng);

/// Local clustering into ~n_segments cells; each cell is flattened to its
/// mean color with probability replace_prob.
Image apply_super_pixels(const Image& img, const ParamSet& params,
                         RngStream& rng);

// ---------------------------------------------------------------------------
// Deterministic cores. The entry points above draw parameters and delegate
// here; tests pin exact values through these.
// ---------------------------------------------------------------------------

Image add_value_core(const Image& img, const std::array<Scalar, 3>& deltas);
Image invert_core(const Image& img, const std::array<bool, 3>& channels);
Image multiply_core(const Image& img, const std::array<Scalar, 3>& factors);
Image multiply_brightness_core(const Image& img, Scalar factor);
Image enhance_color_core(const Image& img, Scalar strength);
Image grayscale_core(const Image& img, Scalar alpha);
Image contrast_severity_core(const Image& img, int severity);
Image linear_contrast_core(const Image& img, Scalar strength);
Image enhance_contrast_core(const Image& img, Scalar strength);
Image saturate_severity_core(const Image& img, int severity);
Image enhance_brightness_core(const Image& img, Scalar strength);

Image gaussian_blur_core(const Image& img, double sigma);
Image average_blur_core(const Image& img, int k);
Image median_blur_core(const Image& img, int k);
Image motion_blur_core(const Image& img, int k, double angle_rad);
Image emboss_core(const Image& img, Scalar alpha, Scalar strength);
Image edge_detect_core(const Image& img, Scalar alpha);
Image enhance_sharpness_core(const Image& img, Scalar strength);

/// |Laplacian| response clamped to [0, 1]; the edge image used by
/// edge_detect and simplex_noise.
Image edge_image(const Image& img);

/// out = m * edge_image(img) + (1 - m) * img, pixel-wise; m in [0, 1].
Image blend_with_edges(const Image& img, const Plane& blend_mask);

Image dropout_core(const Image& img, double fraction, bool per_channel,
                   RngStream& rng);

struct DropRect {
    int x0, y0, w, h;
};
Image coarse_dropout_core(const Image& img, const std::vector<DropRect>& rects);

Image additive_gaussian_noise_core(const Image& img, double sigma,
                                   RngStream& rng);

Image snow_core(const Image& img, int severity, RngStream& rng);
Image fog_core(const Image& img, int severity, RngStream& rng);

/// Exact-arithmetic geometric cores.
Sample rotate_sample(const Sample& s, double angle_deg);
Sample crop_resize_sample(const Sample& s, int x0, int y0, int crop_w,
                          int crop_h);

/// Superpixel label map, values in [0, segment_count); grid-seeded local
/// clustering in (x, y, rgb) space.
struct SuperpixelLabels {
    Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> labels;
    int segment_count = 0;
};
SuperpixelLabels segment_superpixels(const Image& img, int n_segments);

/// fbm-style 2D gradient noise field in [0, 1], one value per pixel.
Plane simplex_noise_field(int width, int height, int octaves,
                          double feature_scale, RngStream& rng);

} // namespace augforge::augment
