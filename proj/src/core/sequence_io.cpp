#include <algorithm>
#include <map>
#include <set>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "dvr/core.hpp"

namespace fs = std::filesystem;

namespace dvr {

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (directories ? entry.is_directory() : entry.is_regular_file()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& l, const fs::path& r) { return l.filename().string() < r.filename().string(); });
  return out;
}

}  // namespace

Frame read_frame(const fs::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty() || bgr.type() != CV_8UC3)
    throw Error(ErrorKind::CorruptFrame, "unreadable image " + path.string());
  Frame frame(bgr.rows, bgr.cols);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      frame.at(y, x, 0) = row[x][2];
      frame.at(y, x, 1) = row[x][1];
      frame.at(y, x, 2) = row[x][0];
    }
  }
  return frame;
}

void write_frame(const fs::path& path, const Frame& frame) {
  cv::Mat bgr(frame.height, frame.width, CV_8UC3);
  for (int y = 0; y < frame.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < frame.width; ++x)
      row[x] = cv::Vec3b(frame.at(y, x, 2), frame.at(y, x, 1), frame.at(y, x, 0));
  }
  if (!cv::imwrite(path.string(), bgr)) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

ImageSequence load_sequence(const fs::path& directory, const std::string& person, const std::string& camera) {
  if (!fs::is_directory(directory)) throw Error(ErrorKind::NoFrames, "not a directory: " + directory.string());
  const auto files = sorted_entries(directory, false);
  if (files.empty()) throw Error(ErrorKind::NoFrames, "no frames in " + directory.string());

  ImageSequence seq{person, camera, {}};
  seq.frames.reserve(files.size());
  for (const auto& file : files) {
    Frame frame = read_frame(file);
    if (!seq.frames.empty() &&
        (frame.height != seq.frames.front().height || frame.width != seq.frames.front().width))
      throw Error(ErrorKind::CorruptFrame, "frame size differs from sequence: " + file.string());
    frame.index = static_cast<int>(seq.frames.size());
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

Dataset load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::IoError, "dataset root not found: " + root.string());
  const auto cameras = sorted_entries(root, true);
  if (cameras.size() != 2)
    throw Error(ErrorKind::ConfigError,
                "dataset root must hold exactly two camera directories, found " + std::to_string(cameras.size()));

  Dataset ds;
  ds.camera_a = cameras[0].filename().string();
  ds.camera_b = cameras[1].filename().string();

  std::map<std::string, std::pair<bool, bool>> persons;
  for (const auto& dir : sorted_entries(cameras[0], true)) persons[dir.filename().string()].first = true;
  for (const auto& dir : sorted_entries(cameras[1], true)) persons[dir.filename().string()].second = true;

  for (const auto& [person, views] : persons) {
    if (!views.first || !views.second)
      throw Error(ErrorKind::MissingView, "person " + person + " is missing camera " +
                                              (views.first ? ds.camera_b : ds.camera_a));
    PersonPair pair{person, load_sequence(cameras[0] / person, person, ds.camera_a),
                    load_sequence(cameras[1] / person, person, ds.camera_b)};
    for (auto* seq : {&pair.a, &pair.b})
      for (auto& frame : seq->frames) frame = normalize_frame(frame);
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace dvr
