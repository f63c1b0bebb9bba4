#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"

namespace patchweave {

enum class ImageFormat { pgm_binary, pgm_ascii, png };

/// Reads a grayscale PGM (P2/P5) or PNG, detected from the file signature.
/// 8-bit samples map to 0..255 unchanged; 16-bit PGM is rescaled to 0..255.
ImageGrid read_image(const std::filesystem::path& path);

/// Format follows the extension: .png -> PNG, anything else -> binary PGM.
void write_image(const std::filesystem::path& path, const ImageGrid& u);
void write_image(const std::filesystem::path& path, const ImageGrid& u, ImageFormat format);

ImageGrid read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const ImageGrid& u, bool binary = true);
ImageGrid read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageGrid& u);

/// Mask files: intensity >= 128 marks a hole pixel.
RegionMask read_mask(const std::filesystem::path& path, int patch_radius = 0);
void write_mask(const std::filesystem::path& path, const RegionMask& mask);

/// Round-to-nearest, clamped to 0..255.
std::vector<std::uint8_t> to_bytes(const ImageGrid& u);
ImageGrid from_bytes(int width, int height, const std::vector<std::uint8_t>& bytes);

}  // namespace patchweave
