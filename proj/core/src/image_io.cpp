#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "care/error.hpp"
#include "care/raster.hpp"

namespace care::raster {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::io, "cannot open " + path.string());
  return f;
}

struct PngErrorState {
  char message[256] = {};
};

void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_ignored(png_structp, png_const_charp) {}

struct PngPixels {
  int width = 0;
  int height = 0;
  int channels = 0;
  int depth = 0;
  std::size_t rowbytes = 0;
  std::vector<unsigned char> buffer;
  std::vector<png_bytep> rows;
};

// libpng reports errors by longjmp; nothing in this frame owns resources with
// destructors, and everything allocated lives in `out`.
bool decode_png(std::FILE* file, PngPixels& out, PngErrorState& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_to_state, png_warning_ignored);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.depth = png_get_bit_depth(png, info);
  out.rowbytes = png_get_rowbytes(png, info);
  out.buffer.resize(out.rowbytes * static_cast<std::size_t>(out.height));
  out.rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) out.rows[y] = out.buffer.data() + out.rowbytes * y;
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

ImageGrid read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngPixels px;
  PngErrorState err;
  if (!decode_png(file.get(), px, err)) {
    throw Error(ErrorKind::format, std::string("png: ") +
                                       (err.message[0] ? err.message : "decode failed") +
                                       " (" + path.string() + ")");
  }

  const double maxval = px.depth == 16 ? 65535.0 : 255.0;
  auto sample = [&](int y, int x, int c) -> double {
    const unsigned char* row = px.rows[y];
    if (px.depth == 16) {
      std::uint16_t v;
      std::memcpy(&v, row + 2 * (x * px.channels + c), 2);
      return v;
    }
    return row[x * px.channels + c];
  };

  std::vector<double> values(static_cast<std::size_t>(px.width) * px.height);
  for (int y = 0; y < px.height; ++y) {
    for (int x = 0; x < px.width; ++x) {
      double v;
      if (px.channels >= 3) {
        v = kLumaR * sample(y, x, 0) + kLumaG * sample(y, x, 1) + kLumaB * sample(y, x, 2);
      } else {
        v = sample(y, x, 0);
      }
      values[static_cast<std::size_t>(y) * px.width + x] = std::clamp(v / maxval, 0.0, 1.0);
    }
  }
  return ImageGrid(px.width, px.height, std::move(values));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int pgm_int(std::istream& in) {
  std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::format, "pgm: malformed header token '" + tok + "'");
  }
}

ImageGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  if (pgm_token(in) != "P5") throw Error(ErrorKind::format, "pgm: only binary P5 is supported");
  const int width = pgm_int(in);
  const int height = pgm_int(in);
  const int maxval = pgm_int(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorKind::format, "pgm: invalid header");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw Error(ErrorKind::format, "pgm: truncated pixel data");
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    // 16-bit PGM samples are big-endian.
    const double v = bytes_per == 2 ? raw[2 * i] * 256.0 + raw[2 * i + 1] : raw[i];
    values[i] = std::min(v / maxval, 1.0);
  }
  return ImageGrid(width, height, std::move(values));
}

unsigned char quantize(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

bool encode_png(std::FILE* file, int width, int height, int channels,
                const unsigned char* data, PngErrorState& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_to_state, png_warning_ignored);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + stride * y));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png(int width, int height, int channels, const std::vector<unsigned char>& data,
               const std::filesystem::path& path) {
  FilePtr file = open_file(path, "wb");
  PngErrorState err;
  if (!encode_png(file.get(), width, height, channels, data.data(), err)) {
    throw Error(ErrorKind::io, std::string("png: ") +
                                   (err.message[0] ? err.message : "encode failed"));
  }
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ImageGrid load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::array<unsigned char, 8> magic{};
  probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();

  if (got >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) return read_png(path);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  throw Error(ErrorKind::format, "unsupported image format: " + path.string());
}

void save_image(const ImageGrid& img, const std::filesystem::path& path) {
  std::vector<unsigned char> data(img.size());
  auto v = img.values();
  std::transform(v.begin(), v.end(), data.begin(), quantize);

  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(img.width(), img.height(), 1, data, path);
  } else if (ext == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
  } else {
    throw Error(ErrorKind::format, "unsupported output extension: " + path.string());
  }
}

void save_rgb_png(int width, int height, std::span<const double> rgb,
                  const std::filesystem::path& path) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorKind::argument, "rgb buffer does not match dimensions");
  }
  std::vector<unsigned char> data(rgb.size());
  std::transform(rgb.begin(), rgb.end(), data.begin(), quantize);
  write_png(width, height, 3, data, path);
}

}  // namespace care::raster
