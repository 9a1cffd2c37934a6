#pragma once

#include "augforge/imaging/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace augforge::imaging {

/// Decode an 8-bit RGB or grayscale PNG; bytes map to [0,1] by v/255 and
/// grayscale is replicated to three channels. Paletted, alpha and 16-bit
/// files are rejected with an IoError naming the path.
Image load_image(const std::filesystem::path& path);

/// Encode as 8-bit RGB PNG, quantizing with round-half-away-from-zero.
/// save_image then load_image is the identity for values that are exact
/// multiples of 1/255.
void save_image(const Image& img, const std::filesystem::path& path);

/// Decode a single-channel 8-bit PNG as a binary mask (byte > 0 = foreground).
Mask load_mask(const std::filesystem::path& path);

/// Encode a mask as grayscale PNG with foreground = 255.
void save_mask(const Mask& mask, const std::filesystem::path& path);

/// In-memory variants used by the external-augmentation hook (PNG in,
/// PNG out over pipes).
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(const std::vector<std::uint8_t>& bytes);

/// round(v * 255) away from zero, clamped to [0, 255].
std::uint8_t quantize_channel(Scalar v);

} // namespace augforge::imaging
