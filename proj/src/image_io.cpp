#include "patchweave/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "patchweave/errors.hpp"

namespace patchweave {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw IoError("truncated PGM header in " + path.string());
  return tok;
}

int parse_positive(const std::string& tok, const fs::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad PGM header field '" + tok + "' in " + path.string());
  }
}

std::array<unsigned char, 8> signature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  return sig;
}

}  // namespace

std::vector<std::uint8_t> to_bytes(const ImageGrid& u) {
  std::vector<std::uint8_t> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = std::isnan(u[i]) ? 0.0 : std::clamp(std::round(u[i]), 0.0, 255.0);
    out[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

ImageGrid from_bytes(int width, int height, const std::vector<std::uint8_t>& bytes) {
  return ImageGrid(width, height, std::vector<double>(bytes.begin(), bytes.end()));
}

ImageGrid read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_token(in, path);
  if (magic != "P2" && magic != "P5") throw IoError(path.string() + " is not a P2/P5 graymap");
  const int width = parse_positive(next_token(in, path), path);
  const int height = parse_positive(next_token(in, path), path);
  const int maxval = parse_positive(next_token(in, path), path);
  if (maxval > 65535) throw IoError("PGM maxval out of range in " + path.string());

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> values(n);
  if (magic == "P5") {
    // next_token consumed exactly one whitespace byte after maxval.
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw IoError("truncated PGM raster in " + path.string());
    for (std::size_t i = 0; i < n; ++i)
      values[i] = bytes_per == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long v;
      if (!(in >> v) || v < 0 || v > maxval) throw IoError("bad P2 sample in " + path.string());
      values[i] = static_cast<double>(v);
    }
  }
  if (maxval != 255)
    for (double& v : values) v = v * 255.0 / maxval;
  return ImageGrid(width, height, std::move(values));
}

void write_pgm(const fs::path& path, const ImageGrid& u, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto bytes = to_bytes(u);
  out << (binary ? "P5" : "P2") << '\n' << u.width() << ' ' << u.height() << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  } else {
    for (int r = 0; r < u.height(); ++r) {
      for (int c = 0; c < u.width(); ++c)
        out << (c ? " " : "") << static_cast<int>(bytes[u.index(r, c)]);
      out << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

ImageGrid read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw IoError("cannot read PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  return ImageGrid(static_cast<int>(image.width), static_cast<int>(image.height),
                   std::vector<double>(buffer.begin(), buffer.end()));
}

void write_png(const fs::path& path, const ImageGrid& u) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(u.width());
  image.height = static_cast<png_uint_32>(u.height());
  image.format = PNG_FORMAT_GRAY;
  const auto bytes = to_bytes(u);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

ImageGrid read_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  const auto sig = signature(path);
  if (png_sig_cmp(sig.data(), 0, sig.size()) == 0) return read_png(path);
  if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return read_pgm(path);
  throw IoError("unsupported image format: " + path.string());
}

void write_image(const fs::path& path, const ImageGrid& u, ImageFormat format) {
  switch (format) {
    case ImageFormat::png: write_png(path, u); return;
    case ImageFormat::pgm_ascii: write_pgm(path, u, false); return;
    case ImageFormat::pgm_binary: write_pgm(path, u, true); return;
  }
}

void write_image(const fs::path& path, const ImageGrid& u) {
  write_image(path, u, lower_extension(path) == ".png" ? ImageFormat::png : ImageFormat::pgm_binary);
}

RegionMask read_mask(const fs::path& path, int patch_radius) {
  const ImageGrid m = read_image(path);
  std::vector<std::uint8_t> hole(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) hole[i] = m[i] >= 128.0 ? 1 : 0;
  return RegionMask(m.width(), m.height(), std::move(hole), patch_radius);
}

void write_mask(const fs::path& path, const RegionMask& mask) {
  ImageGrid m(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) m[i] = mask.hole(i) ? 255.0 : 0.0;
  write_image(path, m);
}

}  // namespace patchweave
