#include "geofront/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace geofront {

namespace {

std::string extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

RawImage read_png(const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw std::runtime_error("cannot read " + path + ": " + img.message);
  }
  RawImage out;
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.channels = color ? 3 : 1;
  out.data.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    png_image_free(&img);
    throw std::runtime_error("cannot decode " + path + ": " + img.message);
  }
  return out;
}

void write_png(const std::string& path, const RawImage& raw) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(raw.width);
  img.height = static_cast<png_uint_32>(raw.height);
  img.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, raw.data.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write " + path + ": " + img.message);
  }
}

// Next header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

RawImage read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P6") throw std::runtime_error(path + ": only binary PGM/PPM are supported");
  RawImage out;
  out.channels = magic == "P6" ? 3 : 1;
  try {
    out.width = std::stoi(pnm_token(in));
    out.height = std::stoi(pnm_token(in));
    const int maxval = std::stoi(pnm_token(in));
    if (maxval != 255) throw std::runtime_error(path + ": only 8-bit PGM/PPM are supported");
  } catch (const std::logic_error&) {
    throw std::runtime_error(path + ": malformed header");
  }
  if (out.width <= 0 || out.height <= 0) throw std::runtime_error(path + ": malformed header");
  out.data.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height) *
                  static_cast<std::size_t>(out.channels));
  in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(out.data.size()));
  if (!in) throw std::runtime_error(path + ": truncated pixel data");
  return out;
}

void write_pnm(const std::string& path, const RawImage& raw) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << (raw.channels == 3 ? "P6" : "P5") << '\n' << raw.width << ' ' << raw.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raw.data.data()), static_cast<std::streamsize>(raw.data.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace

RawImage read_raw_image(const std::string& path) {
  const std::string ext = extension(path);
  if (ext == "png") return read_png(path);
  if (ext == "pgm" || ext == "ppm" || ext == "pnm") return read_pnm(path);
  throw std::runtime_error("unsupported image format: " + path);
}

void write_raw_image(const std::string& path, const RawImage& image) {
  const std::string ext = extension(path);
  if (ext == "png") return write_png(path, image);
  if (ext == "pgm" || ext == "ppm" || ext == "pnm") {
    if ((ext == "pgm" && image.channels != 1) || (ext == "ppm" && image.channels != 3)) {
      throw std::invalid_argument("channel count does not match " + path);
    }
    return write_pnm(path, image);
  }
  throw std::runtime_error("unsupported image format: " + path);
}

ImageGrid read_image(const std::string& path) {
  const RawImage raw = read_raw_image(path);
  std::vector<double> v(raw.data.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = raw.data[i] / 255.0;
  return ImageGrid(raw.width, raw.height, raw.channels, std::move(v));
}

RawImage to_raw(const ImageGrid& image) {
  RawImage raw{image.width(), image.height(), image.channels(), {}};
  raw.data.reserve(image.values().size());
  for (double v : image.values()) raw.data.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  return raw;
}

Mask read_mask(const std::string& path) {
  const RawImage raw = read_raw_image(path);
  Mask m(raw.width, raw.height);
  const auto c = static_cast<std::size_t>(raw.channels);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t k = 0; k < c; ++k)
      if (raw.data[i * c + k]) m[i] = 1;
  return m;
}

void write_mask(const std::string& path, const Mask& mask) {
  RawImage raw{mask.width(), mask.height(), 1, {}};
  for (std::uint8_t v : mask.values()) raw.data.push_back(v ? 255 : 0);
  write_raw_image(path, raw);
}

void write_label_map(const std::string& path, const LabelMap& labels) {
  const int n = labels.regions();
  if (n > 256) throw std::invalid_argument("label maps with more than 256 regions cannot be stored in 8 bits");
  const int step = n > 1 ? 255 / (n - 1) : 0;
  RawImage raw{labels.width(), labels.height(), 1, {}};
  for (int v : labels.grid().values()) raw.data.push_back(static_cast<std::uint8_t>((v - 1) * step));
  write_raw_image(path, raw);
}

LabelMap read_label_map(const std::string& path) {
  const RawImage raw = read_raw_image(path);
  const auto c = static_cast<std::size_t>(raw.channels);
  auto key = [&](std::size_t i) {
    std::uint32_t k = 0;
    for (std::size_t j = 0; j < c; ++j) k = (k << 8) | raw.data[i * c + j];
    return k;
  };
  const std::size_t count_px = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
  std::map<std::uint32_t, int> levels;
  for (std::size_t i = 0; i < count_px; ++i) levels.emplace(key(i), 0);
  int next = 0;
  for (auto& [k, v] : levels) v = ++next;
  Grid<int> g(raw.width, raw.height);
  for (std::size_t i = 0; i < count_px; ++i) g[i] = levels.at(key(i));
  return LabelMap(std::move(g), next);
}

RawImage contour_overlay(const ImageGrid& image, const LabelMap& labels) {
  if (image.width() != labels.width() || image.height() != labels.height()) {
    throw std::invalid_argument("image and label map differ in size");
  }
  const Mask contour = labels.regions() > 1 ? contour_mask(labels) : Mask(labels.width(), labels.height());
  RawImage raw{image.width(), image.height(), 3, {}};
  raw.data.reserve(static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height()) * 3);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      if (contour(x, y)) {
        raw.data.insert(raw.data.end(), {255, 0, 0});
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        const double v = image.at(x, y, image.channels() == 3 ? k : 0);
        raw.data.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
      }
    }
  return raw;
}

void write_fgrid(const std::string& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "FGRID v1 " << field.width() << ' ' << field.height() << '\n';
  for (double v : field.values()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw std::runtime_error("cannot write " + path);
}

ScalarField read_fgrid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version;
  int w = -1, h = -1;
  hs >> magic >> version >> w >> h;
  if (magic != "FGRID" || version != "v1" || w < 0 || h < 0) throw std::runtime_error(path + ": not an FGRID v1 file");
  ScalarField f(w, h);
  for (double& v : f.values()) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
  }
  if (!in) throw std::runtime_error(path + ": truncated data");
  return f;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace geofront
