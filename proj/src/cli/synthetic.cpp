#include "dvr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "dvr/parallel.hpp"
#include "dvr/random.hpp"

namespace fs = std::filesystem;

namespace dvr::synth {

namespace {

constexpr int kHipRow = 66;
constexpr int kFootRow = 122;
constexpr double kCentre = kFrameWidth / 2.0;

Rgb hsv_colour(double hue, double sat, double val) {
  hue = std::fmod(hue, 360.0);
  if (hue < 0) hue += 360.0;
  const double c = val * sat;
  const double x = c * (1.0 - std::abs(std::fmod(hue / 60.0, 2.0) - 1.0));
  const double m = val - c;
  Rgb rgb{};
  switch (static_cast<int>(hue / 60.0)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  return {255.0 * (rgb[0] + m), 255.0 * (rgb[1] + m), 255.0 * (rgb[2] + m)};
}

class Canvas {
 public:
  Canvas() : px_(static_cast<std::size_t>(kFrameHeight) * kFrameWidth) {}

  Rgb& at(int y, int x) { return px_[static_cast<std::size_t>(y) * kFrameWidth + x]; }

  // Horizontal run [x0, x1) on row y with fractional edge coverage.
  void span(int y, double x0, double x1, const Rgb& colour) {
    if (y < 0 || y >= kFrameHeight || x1 <= x0) return;
    const int first = std::max(0, static_cast<int>(std::floor(x0)));
    const int last = std::min(kFrameWidth - 1, static_cast<int>(std::ceil(x1)) - 1);
    for (int x = first; x <= last; ++x) {
      const double cover = std::min(x + 1.0, x1) - std::max(static_cast<double>(x), x0);
      if (cover <= 0.0) continue;
      Rgb& p = at(y, x);
      for (int c = 0; c < 3; ++c) p[c] = (1.0 - cover) * p[c] + cover * colour[c];
    }
  }

  Frame quantize(int index, bool mirror) const {
    Frame f(kFrameHeight, kFrameWidth, index);
    for (int y = 0; y < kFrameHeight; ++y)
      for (int x = 0; x < kFrameWidth; ++x) {
        const Rgb& p = px_[static_cast<std::size_t>(y) * kFrameWidth + (mirror ? kFrameWidth - 1 - x : x)];
        for (int c = 0; c < 3; ++c)
          f.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(p[c]), 0L, 255L));
      }
    return f;
  }

 private:
  std::vector<Rgb> px_;
};

Rgb shade(const Rgb& c, double factor) { return {c[0] * factor, c[1] * factor, c[2] * factor}; }

Rgb offset(const Rgb& c, const Rgb& d) { return {c[0] + d[0], c[1] + d[1], c[2] + d[2]}; }

// Global appearance change of the second camera: channel mixing (a hue
// rotation) plus a gain/offset brightness change.
Rgb camera_b_response(const Rgb& c) {
  Rgb out;
  for (int k = 0; k < 3; ++k) out[k] = 0.85 * (0.88 * c[k] + 0.12 * c[(k + 1) % 3]) + 10.0;
  return out;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (persons < 2) throw Error(ErrorKind::ConfigError, "synthetic dataset needs at least 2 persons");
  if (frames < 2 * fragment_half_width + 1)
    throw Error(ErrorKind::ConfigError, "synthetic sequences need at least 2L+1 = " +
                                            std::to_string(2 * fragment_half_width + 1) + " frames");
  if (noise < 0.0) throw Error(ErrorKind::ConfigError, "noise must be non-negative");
  if (min_period < 2 || max_period < min_period) throw Error(ErrorKind::ConfigError, "invalid period range");
  if (!signatures.empty() && signatures.size() != static_cast<std::size_t>(persons))
    throw Error(ErrorKind::ConfigError, "signature count must equal the person count");
}

std::vector<PersonSignature> make_signatures(const SyntheticSpec& spec) {
  if (!spec.signatures.empty()) return spec.signatures;
  auto rng = seed_stream(spec.seed, "synth");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PersonSignature> out(spec.persons);
  for (int i = 0; i < spec.persons; ++i) {
    PersonSignature& s = out[i];
    const double hue = 360.0 * (i + 0.5 * unit(rng)) / spec.persons;
    s.torso = hsv_colour(hue, 0.5 + 0.4 * unit(rng), 0.55 + 0.4 * unit(rng));
    s.legs = hsv_colour(hue + 100.0 + 160.0 * unit(rng), 0.3 + 0.5 * unit(rng), 0.3 + 0.5 * unit(rng));
    s.head = hsv_colour(20.0 + 20.0 * unit(rng), 0.3 + 0.4 * unit(rng), 0.4 + 0.5 * unit(rng));
    s.period = std::uniform_int_distribution<int>(spec.min_period, spec.max_period)(rng);
    s.amplitude = 4.0 + 4.0 * unit(rng);
    s.torso_width = std::uniform_int_distribution<int>(16, 28)(rng);
    s.leg_width = std::uniform_int_distribution<int>(6, 10)(rng);
    s.stripe_row = std::uniform_int_distribution<int>(28, 56)(rng);
  }
  return out;
}

ImageSequence render_sequence(const PersonSignature& person, int camera, const SyntheticSpec& spec,
                              std::uint64_t stream_salt, const std::string& person_id) {
  auto rng = seed_stream(spec.seed, "synth-render", 2 * stream_salt + static_cast<std::uint64_t>(camera));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise = spec.noise;
  const double period = person.period;

  const double phase = 2.0 * period * unit(rng);
  Rgb jitter_torso{}, jitter_legs{};
  if (noise > 0.0)
    for (int c = 0; c < 3; ++c) {
      jitter_torso[c] = 40.0 * noise * gauss(rng);
      jitter_legs[c] = 40.0 * noise * gauss(rng);
    }
  const Rgb torso = offset(person.torso, jitter_torso);
  const Rgb legs = offset(person.legs, jitter_legs);
  const Rgb stripe = shade(torso, 0.6);

  // Static textured background, different per camera.
  const Rgb base = camera == 0 ? Rgb{120, 125, 115} : Rgb{95, 100, 112};
  const double bx = 2.0 * std::numbers::pi * unit(rng);
  const double by = 2.0 * std::numbers::pi * unit(rng);

  struct Occlusion {
    int first = -1, last = -1, y0 = 0, y1 = 0;
    double x0 = 0, x1 = 0, grey = 0;
  } occ;
  if (noise > spec.occlusion_threshold) {
    const int len = std::uniform_int_distribution<int>(5, 15)(rng);
    occ.first = std::uniform_int_distribution<int>(0, std::max(0, spec.frames - len))(rng);
    occ.last = occ.first + len - 1;
    const int h = std::uniform_int_distribution<int>(30, 60)(rng);
    occ.y0 = std::uniform_int_distribution<int>(0, kFrameHeight - h)(rng);
    occ.y1 = occ.y0 + h;
    const double w = 20.0 + 20.0 * unit(rng);
    occ.x0 = (kFrameWidth - w) * unit(rng);
    occ.x1 = occ.x0 + w;
    occ.grey = 60.0 + 140.0 * unit(rng);
  }
  const int pixel_jitter = static_cast<int>(std::lround(20.0 * noise));

  ImageSequence seq{person_id, camera == 0 ? kCameraA : kCameraB, {}};
  seq.frames.reserve(spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    Canvas canvas;
    for (int y = 0; y < kFrameHeight; ++y)
      for (int x = 0; x < kFrameWidth; ++x) {
        const double tex = 22.0 * std::sin(2.0 * std::numbers::pi * x / 23.0 + bx) *
                               std::cos(2.0 * std::numbers::pi * y / 37.0 + by) +
                           10.0 * std::sin(2.0 * std::numbers::pi * (x + y) / 17.0 + by);
        canvas.at(y, x) = {base[0] + tex, base[1] + 0.8 * tex, base[2] + 0.6 * tex};
      }

    const double gait_jitter = noise > 0.0 ? 0.5 * noise * gauss(rng) : 0.0;
    const double body_jitter = noise > 0.0 ? 1.0 * noise * gauss(rng) : 0.0;
    const double swing = person.amplitude * std::sin(std::numbers::pi * (t + phase + gait_jitter) / period);
    const double cx = kCentre + body_jitter;

    // Legs swing in opposition from hips set far enough apart that they never
    // meet. Displacement grows towards the foot.
    const double hip_offset = person.leg_width / 2.0 + person.amplitude + 2.0;
    for (int leg = 0; leg < 2; ++leg) {
      const double hip = cx + (leg == 0 ? -hip_offset : hip_offset);
      const double foot = leg == 0 ? swing : -swing;
      for (int y = kHipRow; y < kFootRow; ++y) {
        const double c = hip + foot * (y - kHipRow) / static_cast<double>(kFootRow - kHipRow - 1);
        canvas.span(y, c - person.leg_width / 2.0, c + person.leg_width / 2.0, legs);
      }
    }
    for (int y = 22; y < kHipRow; ++y) {
      const bool band = y >= person.stripe_row && y < person.stripe_row + 6;
      canvas.span(y, cx - person.torso_width / 2.0, cx + person.torso_width / 2.0, band ? stripe : torso);
    }
    for (int y = 6; y < 22; ++y) {
      const double dy = (y + 0.5 - 14.0) / 8.0;
      const double half = 6.0 * std::sqrt(std::max(0.0, 1.0 - dy * dy));
      canvas.span(y, cx - half, cx + half, person.head);
    }
    if (t >= occ.first && t <= occ.last)
      for (int y = occ.y0; y < occ.y1; ++y) canvas.span(y, occ.x0, occ.x1, {occ.grey, occ.grey, occ.grey});

    for (int y = 0; y < kFrameHeight; ++y)
      for (int x = 0; x < kFrameWidth; ++x) {
        Rgb& p = canvas.at(y, x);
        if (camera == 1) p = camera_b_response(p);
        if (pixel_jitter > 0)
          for (int c = 0; c < 3; ++c) p[c] += std::uniform_int_distribution<int>(-pixel_jitter, pixel_jitter)(rng);
      }
    seq.frames.push_back(canvas.quantize(t, camera == 1));
  }
  return seq;
}

std::vector<PersonPair> synthesize(const SyntheticSpec& spec) {
  spec.validate();
  const auto signatures = make_signatures(spec);
  std::vector<PersonPair> pairs(spec.persons);
  parallel_for(pairs.size(), [&](std::size_t i) {
    char id[16];
    std::snprintf(id, sizeof id, "person_%03zu", i);
    pairs[i].person = id;
    pairs[i].a = render_sequence(signatures[i], 0, spec, i, id);
    pairs[i].b = render_sequence(signatures[i], 1, spec, i, id);
  });
  return pairs;
}

void write_dataset(const fs::path& root, const std::vector<PersonPair>& pairs) {
  for (const auto& pair : pairs)
    for (const ImageSequence* seq : {&pair.a, &pair.b}) {
      const fs::path dir = root / seq->camera / pair.person;
      fs::create_directories(dir);
      for (const Frame& f : seq->frames) {
        char name[32];
        std::snprintf(name, sizeof name, "f%04d.png", f.index);
        write_frame(dir / name, f);
      }
    }
}

void generate_synthetic(const SyntheticSpec& spec, const fs::path& root) { write_dataset(root, synthesize(spec)); }

}  // namespace dvr::synth
