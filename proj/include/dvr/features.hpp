#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dvr/motion.hpp"

namespace dvr::features {

enum class FeatureMode { ColHog3d, Hog3d, Colour };

std::string_view feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

struct Hog3dConfig {
  int cells_x = 2;
  int cells_y = 5;
  int cells_t = 2;
  int fragment_length = 21;  // 2L + 1
};

inline constexpr int kHog3dBins = 20;
inline constexpr int kPatchHeight = 16;
inline constexpr int kPatchWidth = 8;
inline constexpr int kPatchStrideY = 8;
inline constexpr int kPatchStrideX = 4;
inline constexpr int kColourChannels = 6;  // H S V L a b

struct FeatureConfig {
  FeatureMode mode = FeatureMode::ColHog3d;
  Hog3dConfig hog3d;
};

/// Start/end of each 50%-overlapping cell along an axis of `length` samples.
/// The last cell absorbs any remainder.
struct CellSpan {
  int begin;
  int end;
};
std::vector<CellSpan> cell_spans(int length, int cells);

/// Unit face normals of a regular icosahedron.
const std::array<Eigen::Vector3d, kHog3dBins>& icosahedron_normals();

/// Projection threshold relative to the strongest projection: cosine of half
/// the angle between adjacent face normals.
double hog3d_projection_threshold();

/// Soft orientation histogram of a single gradient, magnitude-weighted.
std::array<double, kHog3dBins> quantize_gradient(const Eigen::Vector3d& gradient);

Eigen::VectorXd hog3d_descriptor(const motion::Fragment& fragment, const Hog3dConfig& config = {});

/// Per-patch HSV and LAB means for one frame, each rescaled to [0, 1].
Eigen::VectorXd frame_colour_vector(const Frame& frame);
Eigen::VectorXd colour_descriptor(const motion::Fragment& fragment);
/// Temporal mean of precomputed per-frame colour vectors.
Eigen::VectorXd temporal_colour_mean(std::span<const Eigen::VectorXd* const> per_frame);

struct PixelColour {
  double h, s, v, l, a, b;
};
/// HSV (degrees) and CIE LAB (D65) of an sRGB pixel.
PixelColour convert_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b);

struct FragmentDescriptor {
  Eigen::VectorXd hog3d;
  Eigen::VectorXd colour;
  Eigen::VectorXd combined;
  int fragment_index = 0;
  int landmark = 0;
};

struct DescriptorSet {
  std::string person;
  std::string camera;
  std::vector<FragmentDescriptor> descriptors;

  Eigen::Index dim() const { return descriptors.empty() ? 0 : descriptors.front().combined.size(); }
  std::size_t size() const { return descriptors.size(); }
};

std::size_t descriptor_length(const FeatureConfig& config);

DescriptorSet describe_sequence(const std::string& person, const std::string& camera,
                                std::span<const motion::Fragment> fragments, const FeatureConfig& config);

/// Rebuilds `combined` for a different mode from the stored parts. The source
/// set must carry the parts the target mode needs.
DescriptorSet with_mode(const DescriptorSet& set, FeatureMode mode);

/// `person camera fragment-index v0 v1 ...`, one descriptor per line.
void write_descriptors(std::ostream& out, const DescriptorSet& set);

/// Mean independent of sample order; exact when all samples are equal.
double order_invariant_mean(std::span<double> samples);

}  // namespace dvr::features
