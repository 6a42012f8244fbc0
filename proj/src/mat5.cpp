#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "mmhar/datasets.hpp"
#include "mmhar/errors.hpp"

// Minimal MATLAB v5 reader: enough for UTD-MHAD inertial files (one 2-D
// numeric matrix, possibly zlib-compressed).

namespace mmhar {
namespace {

constexpr std::uint32_t kMiInt8 = 1;
constexpr std::uint32_t kMiUint8 = 2;
constexpr std::uint32_t kMiInt16 = 3;
constexpr std::uint32_t kMiUint16 = 4;
constexpr std::uint32_t kMiInt32 = 5;
constexpr std::uint32_t kMiUint32 = 6;
constexpr std::uint32_t kMiSingle = 7;
constexpr std::uint32_t kMiDouble = 9;
constexpr std::uint32_t kMiMatrix = 14;
constexpr std::uint32_t kMiCompressed = 15;

struct Cursor {
  const unsigned char* p;
  std::size_t len;
  std::size_t off = 0;

  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, p + off, 4);
    off += 4;
    return v;
  }
  const unsigned char* bytes(std::size_t n) {
    const unsigned char* r = p + off;
    off += n;
    return r;
  }
  bool done() const { return off + 8 > len; }
};

struct Element {
  std::uint32_t type;
  const unsigned char* data;
  std::size_t size;
};

Element next_element(Cursor& c) {
  const std::uint32_t tag = c.u32();
  if ((tag & 0xffff0000u) != 0) {
    // small data element: size in upper 16 bits, payload in the next 4 bytes
    Element e{tag & 0xffffu, c.bytes(4), (tag >> 16) & 0xffffu};
    return e;
  }
  const std::uint32_t size = c.u32();
  Element e{tag, c.bytes(size), size};
  c.off += (8 - size % 8) % 8;  // elements are 8-byte aligned
  return e;
}

std::vector<double> numeric_payload(const Element& e, const std::string& path) {
  std::vector<double> out;
  auto read_as = [&](auto tag_type) {
    using T = decltype(tag_type);
    const std::size_t n = e.size / sizeof(T);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      T v;
      std::memcpy(&v, e.data + i * sizeof(T), sizeof(T));
      out[i] = static_cast<double>(v);
    }
  };
  switch (e.type) {
    case kMiDouble: read_as(double{}); break;
    case kMiSingle: read_as(float{}); break;
    case kMiInt32: read_as(std::int32_t{}); break;
    case kMiUint32: read_as(std::uint32_t{}); break;
    case kMiInt16: read_as(std::int16_t{}); break;
    case kMiUint16: read_as(std::uint16_t{}); break;
    case kMiUint8: read_as(std::uint8_t{}); break;
    case kMiInt8: read_as(std::int8_t{}); break;
    default:
      throw LoadError("mat5: unsupported numeric payload type " + std::to_string(e.type) +
                      " in '" + path + "'");
  }
  return out;
}

bool parse_matrix(const unsigned char* data, std::size_t size, const std::string& path,
                  Tensor* out, std::string* name_out) {
  Cursor c{data, size};
  const Element flags = next_element(c);       // array flags
  if (flags.type != kMiUint32) return false;
  const Element dims_el = next_element(c);     // dimensions
  const Element name_el = next_element(c);     // array name

  std::vector<std::int64_t> dims;
  for (std::size_t i = 0; i + 4 <= dims_el.size; i += 4) {
    std::int32_t d;
    std::memcpy(&d, dims_el.data + i, 4);
    dims.push_back(d);
  }
  if (dims.size() != 2) return false;

  const Element real = next_element(c);        // real part
  const std::vector<double> col_major = numeric_payload(real, path);
  const std::int64_t rows = dims[0];
  const std::int64_t cols = dims[1];
  if (static_cast<std::int64_t>(col_major.size()) != rows * cols) {
    throw LoadError("mat5: matrix payload size mismatch in '" + path + "'");
  }

  Tensor t({rows, cols});
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t k = 0; k < cols; ++k) {
      t.at(r, k) = col_major[static_cast<std::size_t>(k * rows + r)];
    }
  }
  *out = std::move(t);
  if (name_out) name_out->assign(reinterpret_cast<const char*>(name_el.data), name_el.size);
  return true;
}

std::string zlib_inflate(const unsigned char* src, std::size_t n, const std::string& path) {
  std::string out;
  out.resize(n * 8 + 1024);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw LoadError("mat5: inflateInit failed for '" + path + "'");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(n);
  int rc = Z_OK;
  std::size_t produced = 0;
  while (rc == Z_OK) {
    if (produced == out.size()) out.resize(out.size() * 2);
    zs.next_out = reinterpret_cast<Bytef*>(out.data() + produced);
    zs.avail_out = static_cast<uInt>(out.size() - produced);
    rc = inflate(&zs, Z_NO_FLUSH);
    produced = zs.total_out;
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw LoadError("mat5: bad compressed element in '" + path + "'");
  out.resize(produced);
  return out;
}

}  // namespace

Tensor read_mat5_matrix(const std::string& path, std::string* name_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw LoadError("mat5: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < 128) throw LoadError("mat5: '" + path + "' too short for a v5 file");

  std::uint16_t version, endian;
  std::memcpy(&version, buf.data() + 124, 2);
  std::memcpy(&endian, buf.data() + 126, 2);
  if (endian != 0x4d49) {  // "IM" read little-endian
    throw LoadError("mat5: '" + path + "' is not little-endian MATLAB v5");
  }

  Cursor c{reinterpret_cast<const unsigned char*>(buf.data() + 128), buf.size() - 128};
  while (!c.done()) {
    const Element e = next_element(c);
    if (e.type == kMiMatrix) {
      Tensor t;
      if (parse_matrix(e.data, e.size, path, &t, name_out)) return t;
    } else if (e.type == kMiCompressed) {
      const std::string inflated = zlib_inflate(e.data, e.size, path);
      Cursor inner{reinterpret_cast<const unsigned char*>(inflated.data()), inflated.size()};
      const Element ie = next_element(inner);
      if (ie.type == kMiMatrix) {
        Tensor t;
        if (parse_matrix(ie.data, ie.size, path, &t, name_out)) return t;
      }
    }
  }
  throw LoadError("mat5: no 2-D numeric matrix found in '" + path + "'");
}

SensorSequence read_utd_inertial(const std::string& path) {
  std::string name;
  Tensor mat = read_mat5_matrix(path, &name);  // [N x 6]
  if (mat.dim(1) < 1 || mat.dim(0) < 1) throw LoadError("utd inertial '" + path + "': empty matrix");

  SensorSequence seq;
  seq.sample_rate_hz = 50.0;
  const std::int64_t steps = mat.dim(0);
  const std::int64_t channels = mat.dim(1);
  seq.values = Tensor({channels, steps});
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t t = 0; t < steps; ++t) seq.values.at(c, t) = mat.at(t, c);
  }
  static const char* kNames[6] = {"acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z"};
  for (std::int64_t c = 0; c < channels; ++c) {
    seq.channel_names.push_back(c < 6 ? kNames[c] : "ch" + std::to_string(c));
  }
  if (!seq.values.all_finite()) throw LoadError("utd inertial '" + path + "': non-finite values");
  return seq;
}

}  // namespace mmhar
