#include <opencv2/opencv.hpp>

#include "mmhar/datasets.hpp"
#include "mmhar/errors.hpp"

namespace mmhar {

VideoClip read_video_file(const std::string& path) {
  cv::VideoCapture cap(path);
  if (!cap.isOpened()) throw LoadError("video: cannot open '" + path + "'");

  double fps = cap.get(cv::CAP_PROP_FPS);
  if (!(fps > 0.0)) fps = 30.0;

  std::vector<cv::Mat> frames;
  cv::Mat frame;
  while (cap.read(frame)) {
    cv::Mat rgb;
    cv::cvtColor(frame, rgb, cv::COLOR_BGR2RGB);
    frames.push_back(std::move(rgb));
  }
  if (frames.empty()) throw LoadError("video: no decodable frames in '" + path + "'");

  const std::int64_t t_len = static_cast<std::int64_t>(frames.size());
  const std::int64_t h = frames[0].rows;
  const std::int64_t w = frames[0].cols;

  VideoClip clip;
  clip.frame_rate_hz = fps;
  clip.frames = Tensor({t_len, h, w, 3});
  for (std::int64_t t = 0; t < t_len; ++t) {
    const cv::Mat& m = frames[static_cast<std::size_t>(t)];
    if (m.rows != h || m.cols != w) throw LoadError("video: frame size varies in '" + path + "'");
    for (std::int64_t y = 0; y < h; ++y) {
      const auto* row = m.ptr<unsigned char>(static_cast<int>(y));
      for (std::int64_t x = 0; x < w; ++x) {
        for (std::int64_t c = 0; c < 3; ++c) {
          clip.frames.at(t, y, x, c) = static_cast<double>(row[x * 3 + c]) / 255.0;
        }
      }
    }
  }
  return clip;
}

void write_video_file(const std::string& path, const VideoClip& clip) {
  const auto h = static_cast<int>(clip.height());
  const auto w = static_cast<int>(clip.width());
  cv::VideoWriter writer(path, cv::VideoWriter::fourcc('M', 'J', 'P', 'G'),
                         clip.frame_rate_hz, cv::Size(w, h));
  if (!writer.isOpened()) throw Error("video: cannot open '" + path + "' for writing");
  for (std::int64_t t = 0; t < clip.time(); ++t) {
    cv::Mat m(h, w, CV_8UC3);
    for (int y = 0; y < h; ++y) {
      auto* row = m.ptr<unsigned char>(y);
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double v = clip.frames.at(t, y, x, 2 - c);  // RGB -> BGR
          row[x * 3 + c] = static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
        }
      }
    }
    writer.write(m);
  }
}

}  // namespace mmhar
