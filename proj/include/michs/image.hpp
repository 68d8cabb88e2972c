#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"

namespace michs {

struct ImageU8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major grayscale
};

// Binary PGM (P5), maxval 255.
inline ImageU8 load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("load_pgm: " + path + " is not a binary PGM (P5)");
  const auto next_token = [&]() {
    // Whitespace-delimited header token, '#' starts a comment line.
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        while (in.get(c) && c != '\n') {
        }
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    if (tok.empty()) throw IoError("load_pgm: truncated header in " + path);
    try {
      std::size_t used = 0;
      const long value = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return value;
    } catch (const std::exception&) {
      throw IoError("load_pgm: malformed header token '" + tok + "' in " + path);
    }
  };
  const long width = next_token();
  const long height = next_token();
  const long maxval = next_token();
  if (width <= 0 || height <= 0) throw IoError("load_pgm: bad dimensions in " + path);
  if (maxval != 255) throw IoError("load_pgm: " + path + " maxval must be 255");
  ImageU8 img{static_cast<int>(height), static_cast<int>(width), {}};
  img.pixels.resize(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw IoError("load_pgm: truncated pixel data in " + path);
  return img;
}

inline void write_pgm(const std::string& path, const ImageU8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pgm: cannot open " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write_pgm: write failed for " + path);
}

// 8-bit PNG; color inputs are converted to grayscale with the usual
// luminosity weights.
inline ImageU8 load_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw IoError("load_png: cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("load_png: libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("load_png: corrupt PNG " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const png_byte channels = png_get_channels(png, info);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * channels);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r)
    rows[r] = raw.data() + static_cast<std::size_t>(r) * width * channels;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  ImageU8 img{static_cast<int>(height), static_cast<int>(width), {}};
  img.pixels.resize(static_cast<std::size_t>(width) * height);
  if (channels == 1) {
    img.pixels = std::move(raw);
  } else if (channels >= 3) {
    for (std::size_t p = 0; p < img.pixels.size(); ++p) {
      const std::uint8_t* px = raw.data() + p * channels;
      const double gray = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
      img.pixels[p] = static_cast<std::uint8_t>(std::lround(std::min(gray, 255.0)));
    }
  } else {
    throw IoError("load_png: unsupported channel count in " + path);
  }
  return img;
}

// Bilinear resampling on pixel centers; identity when sizes already match.
inline ImageU8 bilinear_resize(const ImageU8& src, int target_h, int target_w) {
  require(target_h >= 1 && target_w >= 1, "bilinear_resize: target size must be positive");
  if (src.height == target_h && src.width == target_w) return src;
  ImageU8 out{target_h, target_w, {}};
  out.pixels.resize(static_cast<std::size_t>(target_h) * target_w);
  const double sy = static_cast<double>(src.height) / target_h;
  const double sx = static_cast<double>(src.width) / target_w;
  const auto at = [&](int r, int c) -> double {
    r = std::clamp(r, 0, src.height - 1);
    c = std::clamp(c, 0, src.width - 1);
    return src.pixels[static_cast<std::size_t>(r) * src.width + c];
  };
  for (int r = 0; r < target_h; ++r) {
    const double fy = (r + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const double wy = fy - y0;
    for (int c = 0; c < target_w; ++c) {
      const double fx = (c + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const double wx = fx - x0;
      const double value = (1 - wy) * ((1 - wx) * at(y0, x0) + wx * at(y0, x0 + 1)) +
                           wy * ((1 - wx) * at(y0 + 1, x0) + wx * at(y0 + 1, x0 + 1));
      out.pixels[static_cast<std::size_t>(r) * target_w + c] =
          static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
    }
  }
  return out;
}

// Row-major vectorization scaled to [0,1].
inline Vec to_feature_vector(const ImageU8& img) {
  Vec v(static_cast<Eigen::Index>(img.pixels.size()));
  for (std::size_t p = 0; p < img.pixels.size(); ++p)
    v[static_cast<Eigen::Index>(p)] = img.pixels[p] / 255.0;
  return v;
}

inline ImageU8 from_feature_vector(const Vec& v, int height, int width) {
  require(v.size() == static_cast<Eigen::Index>(height) * width,
          "from_feature_vector: size mismatch");
  ImageU8 img{height, width, {}};
  img.pixels.resize(v.size());
  for (Eigen::Index p = 0; p < v.size(); ++p)
    img.pixels[p] = static_cast<std::uint8_t>(std::lround(std::clamp(v[p], 0.0, 1.0) * 255.0));
  return img;
}

struct ImageDataset {
  std::vector<LabeledVector> images;
  std::vector<std::string> class_names;  // class id = index + 1 (sorted names)
  std::vector<std::string> paths;        // parallel to images
  std::vector<std::string> warnings;     // skipped files
};

// Layout: <root>/<class-name>/<image files>, .pgm and .png. Class ids follow
// sorted directory names; the view tag is the file's index within its class
// (sorted file names). Unreadable files are skipped with a recorded warning;
// a class with no loadable image is an error.
inline ImageDataset load_image_directory(const std::string& root, int target_h, int target_w) {
  namespace fs = std::filesystem;
  require(target_h >= 1 && target_w >= 1, "load_image_directory: target size must be positive");
  if (!fs::is_directory(root)) throw IoError("load_image_directory: not a directory: " + root);

  std::vector<std::string> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) class_dirs.push_back(entry.path().filename().string());
  std::sort(class_dirs.begin(), class_dirs.end());
  require(!class_dirs.empty(), "load_image_directory: no class directories under " + root);

  ImageDataset out;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(fs::path(root) / class_dirs[c])) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      if (ext == ".pgm" || ext == ".png") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw ValidationError("load_image_directory: class directory '" + class_dirs[c] +
                            "' has no images");
    int view = 0;
    int loaded = 0;
    for (const auto& file : files) {
      try {
        const bool is_png = file.size() >= 4 && (file.substr(file.size() - 4) == ".png" ||
                                                 file.substr(file.size() - 4) == ".PNG");
        ImageU8 img = is_png ? load_png(file) : load_pgm(file);
        img = bilinear_resize(img, target_h, target_w);
        out.images.push_back({to_feature_vector(img), static_cast<int>(c) + 1, view});
        out.paths.push_back(file);
        ++loaded;
      } catch (const IoError& err) {
        out.warnings.push_back(std::string(err.what()));
      }
      ++view;
    }
    if (loaded == 0)
      throw ValidationError("load_image_directory: class directory '" + class_dirs[c] +
                            "' has no readable images");
    out.class_names.push_back(class_dirs[c]);
  }
  return out;
}

}  // namespace michs
