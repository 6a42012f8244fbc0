#include "fixtures.hpp"

#include <cstring>
#include <fstream>

#include "mmhar/datasets.hpp"
#include "mmhar/rng.hpp"

namespace fs = std::filesystem;

namespace mmhar::testing {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void pad8(std::string& out) {
  while (out.size() % 8 != 0) out.push_back('\0');
}

}  // namespace

void write_mat5_matrix(const std::string& path, const std::string& var_name,
                       const Tensor& row_major) {
  const std::int64_t rows = row_major.dim(0);
  const std::int64_t cols = row_major.dim(1);

  std::string header(116, ' ');
  const std::string text = "MATLAB 5.0 MAT-file, test fixture";
  std::memcpy(header.data(), text.data(), text.size());
  header += std::string(8, '\0');           // subsys offset
  header.push_back(0x00);                   // version 0x0100 little-endian
  header.push_back(0x01);
  header += "IM";

  std::string body;
  // array flags: miUINT32 x 2, class mxDOUBLE (6)
  put_u32(body, 6);
  put_u32(body, 8);
  put_u32(body, 6);
  put_u32(body, 0);
  // dimensions: miINT32 x 2
  put_u32(body, 5);
  put_u32(body, 8);
  put_u32(body, static_cast<std::uint32_t>(rows));
  put_u32(body, static_cast<std::uint32_t>(cols));
  // name: miINT8
  put_u32(body, 1);
  put_u32(body, static_cast<std::uint32_t>(var_name.size()));
  body += var_name;
  pad8(body);
  // real part: miDOUBLE, column-major
  put_u32(body, 9);
  put_u32(body, static_cast<std::uint32_t>(rows * cols * 8));
  for (std::int64_t c = 0; c < cols; ++c) {
    for (std::int64_t r = 0; r < rows; ++r) {
      const double v = row_major.at(r, c);
      const char* p = reinterpret_cast<const char*>(&v);
      body.append(p, p + 8);
    }
  }
  pad8(body);

  std::string element;
  put_u32(element, 14);  // miMATRIX
  put_u32(element, static_cast<std::uint32_t>(body.size()));
  element += body;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << header << element;
}

void write_sensor_csv(const std::string& path, std::int64_t steps, double scale) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::trunc);
  for (std::int64_t t = 0; t < steps; ++t) {
    const double v = scale * static_cast<double>(t);
    f << v << "," << v + 1 << "," << v + 2 << "\n";
  }
}

namespace {

VideoClip tiny_clip(int frames, std::uint64_t seed) {
  VideoClip clip;
  clip.frame_rate_hz = 15.0;
  clip.frames = Tensor({frames, 24, 24, 3});
  Rng rng(seed);
  const auto cx = static_cast<std::int64_t>(rng.below(16));
  for (std::int64_t t = 0; t < frames; ++t) {
    for (std::int64_t y = 8; y < 16; ++y) {
      for (std::int64_t x = cx; x < cx + 8; ++x) {
        for (std::int64_t c = 0; c < 3; ++c) clip.frames.at(t, y, x, c) = 0.9;
      }
    }
  }
  return clip;
}

}  // namespace

void build_utd_fixture(const fs::path& root, int actions, const std::vector<int>& subjects,
                       int trials) {
  fs::create_directories(root / "Inertial");
  fs::create_directories(root / "RGB");
  std::uint64_t seed = 1;
  for (int a = 1; a <= actions; ++a) {
    for (int s : subjects) {
      for (int t = 1; t <= trials; ++t, ++seed) {
        const std::string stem =
            "a" + std::to_string(a) + "_s" + std::to_string(s) + "_t" + std::to_string(t);
        Tensor mat({120, 6});
        Rng rng(seed);
        for (auto& v : mat.values()) v = rng.normal();
        write_mat5_matrix((root / "Inertial" / (stem + "_inertial.mat")).string(), "d_iner", mat);
        write_video_file((root / "RGB" / (stem + "_color.avi")).string(), tiny_clip(8, seed));
      }
    }
  }
}

void build_mmact_fixture(const fs::path& root, const std::vector<std::string>& actions,
                         const std::vector<int>& subjects, bool with_video) {
  const std::array<const char*, 4> dirs{"acc_phone_clip", "acc_watch_clip", "gyro_clip",
                                        "orientation_clip"};
  std::uint64_t seed = 100;
  for (int s : subjects) {
    for (const auto& action : actions) {
      const std::string rel =
          "subject" + std::to_string(s) + "/scene1/session1/" + action;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        // acc_phone runs at 100 Hz: twice the steps of the 50 Hz streams
        const std::int64_t steps = d == 0 ? 200 : 100;
        write_sensor_csv((root / dirs[d] / (rel + ".csv")).string(), steps, 0.01 * (d + 1));
      }
      if (with_video) {
        const fs::path video_path = root / "video" / (rel + ".avi");
        fs::create_directories(video_path.parent_path());
        write_video_file(video_path.string(), tiny_clip(8, ++seed));
      }
    }
  }
}

std::filesystem::path fresh_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("mmhar_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace mmhar::testing
