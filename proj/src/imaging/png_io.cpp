#include "augforge/imaging/png_io.hpp"

#include "augforge/error.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace augforge::imaging {

namespace {

struct MemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->size) {
        png_error(png, "unexpected end of PNG stream");
    }
    std::memcpy(out, r->data + r->pos, n);
    r->pos += n;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t n) {
    auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    buf->insert(buf->end(), data, data + n);
}

void flush_memory(png_structp) {}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image file: " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write: " + path.string());
    }
}

struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0; // 1 = gray, 3 = rgb
    std::vector<std::uint8_t> pixels; // interleaved rows
};

DecodedPng decode_raw(const std::vector<std::uint8_t>& bytes,
                      const std::string& origin) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw IoError("not a PNG file: " + origin);
    }

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }

    DecodedPng out;
    std::vector<png_bytep> row_ptrs;
    MemReader reader{bytes.data(), bytes.size(), 0};

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode error: " + origin);
    }

    png_set_read_fn(png, &reader, read_from_memory);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG bit depth (want 8): " + origin);
    }
    if (color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG color type (want 8-bit RGB or gray): " +
                      origin);
    }

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;

    const std::size_t stride =
        static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.channels);
    out.pixels.resize(stride * static_cast<std::size_t>(out.height));
    row_ptrs.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
        row_ptrs[static_cast<std::size_t>(y)] =
            out.pixels.data() + static_cast<std::size_t>(y) * stride;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

std::vector<std::uint8_t> encode_raw(const std::uint8_t* pixels, int width,
                                     int height, int channels) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(height));

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode error");
    }

    png_set_write_fn(png, &out, write_to_memory, flush_memory);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t stride =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    for (int y = 0; y < height; ++y) {
        row_ptrs[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * stride);
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Image image_from_decoded(const DecodedPng& d) {
    Image img(d.width, d.height);
    const std::size_t stride =
        static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.channels);
    for (int y = 0; y < d.height; ++y) {
        const std::uint8_t* row = d.pixels.data() + static_cast<std::size_t>(y) * stride;
        for (int x = 0; x < d.width; ++x) {
            if (d.channels == 3) {
                for (int c = 0; c < 3; ++c) {
                    img.at(x, y, c) =
                        static_cast<Scalar>(row[3 * x + c]) / Scalar(255);
                }
            } else {
                const Scalar v = static_cast<Scalar>(row[x]) / Scalar(255);
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
            }
        }
    }
    return img;
}

} // namespace

std::uint8_t quantize_channel(Scalar v) {
    const long q = std::lroundf(v * Scalar(255));
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    const int w = img.width();
    const int h = img.height();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) *
                                  static_cast<std::size_t>(h) * 3);
    std::size_t i = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) rgb[i++] = quantize_channel(img.at(x, y, c));
        }
    }
    return encode_raw(rgb.data(), w, h, 3);
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
    return image_from_decoded(decode_raw(bytes, "<memory>"));
}

Image load_image(const std::filesystem::path& path) {
    return image_from_decoded(decode_raw(read_file(path), path.string()));
}

void save_image(const Image& img, const std::filesystem::path& path) {
    write_file(path, encode_png(img));
}

Mask load_mask(const std::filesystem::path& path) {
    const DecodedPng d = decode_raw(read_file(path), path.string());
    if (d.channels != 1) {
        throw IoError("mask must be a single-channel PNG: " + path.string());
    }
    MaskPlane plane(d.height, d.width);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            plane(y, x) =
                d.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(d.width) +
                         static_cast<std::size_t>(x)] > 0
                    ? 1
                    : 0;
        }
    }
    return Mask(std::move(plane));
}

void save_mask(const Mask& mask, const std::filesystem::path& path) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) *
                                   static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            gray[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                 static_cast<std::size_t>(x)] = mask.at(x, y) ? 255 : 0;
        }
    }
    write_file(path, encode_raw(gray.data(), w, h, 1));
}

} // namespace augforge::imaging
