#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dvr/error.hpp"

namespace dvr {

inline constexpr int kFrameHeight = 128;
inline constexpr int kFrameWidth = 64;

/// 8-bit RGB raster, row-major, channels interleaved.
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;
  int index = 0;

  Frame() = default;
  Frame(int h, int w, int idx = 0)
      : height(h), width(w), rgb(static_cast<std::size_t>(h) * w * 3, 0), index(idx) {}

  std::uint8_t at(int y, int x, int c) const {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t& at(int y, int x, int c) {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  bool empty() const { return height <= 0 || width <= 0; }
  bool is_normalized() const { return height == kFrameHeight && width == kFrameWidth; }
};

/// Luma weights shared by every greyscale conversion in the library.
inline double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

/// Frames of one person seen by one camera, in temporal order.
struct ImageSequence {
  std::string person;
  std::string camera;
  std::vector<Frame> frames;

  std::size_t length() const { return frames.size(); }
};

struct PersonPair {
  std::string person;
  ImageSequence a;
  ImageSequence b;
};

struct TrainingSplit {
  std::vector<PersonPair> train_pairs;
  std::vector<PersonPair> test_pairs;
  std::uint64_t seed = 0;
};

/// Reads every regular file of `directory` (lexicographic filename order)
/// as one frame. Frames are returned at their stored size.
ImageSequence load_sequence(const std::filesystem::path& directory, const std::string& person,
                            const std::string& camera);

/// Bilinear resample to 128x64 (pixel-centre aligned).
Frame normalize_frame(const Frame& frame);
Frame resize_bilinear(const Frame& frame, int height, int width);

/// Duplicates end frames, alternating append-last / prepend-first, until the
/// sequence holds `min_len` frames. Indices are renumbered 0..T-1.
ImageSequence pad_short_sequence(const ImageSequence& seq, std::size_t min_len);

/// Seeded shuffle of persons, then halving. The train half receives the
/// extra person when the count is odd.
TrainingSplit split_dataset(std::vector<PersonPair> pairs, std::uint64_t seed);

/// The index permutation behind split_dataset: (train, test) positions.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count, std::uint64_t seed);

/// Dataset on disk: <root>/<camera-id>/<person-id>/<frame files>.
/// Camera ids sort lexicographically; the first is view a, the second view b.
struct Dataset {
  std::string camera_a;
  std::string camera_b;
  std::vector<PersonPair> pairs;  // sorted by person id
};

/// Loads and normalizes every sequence. Persons present under only one
/// camera raise MissingView.
Dataset load_dataset(const std::filesystem::path& root);

void write_frame(const std::filesystem::path& path, const Frame& frame);
Frame read_frame(const std::filesystem::path& path);

}  // namespace dvr
