#include "mmhar/npz.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmhar/errors.hpp"

namespace mmhar {
namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::string& buf, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(buf[off]) |
                                    (static_cast<unsigned char>(buf[off + 1]) << 8));
}

std::uint32_t get_u32(const std::string& buf, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[off + i]);
  return v;
}

std::uint32_t crc32_of(const std::string& data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string inflate_raw(const std::string& src, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw LoadError("npz: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(src.data()));
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw LoadError("npz: deflated entry did not decompress cleanly");
  return out;
}

std::string npy_header(const std::string& descr, const std::vector<std::int64_t>& shape) {
  std::ostringstream dict;
  dict << "{'descr': '" << descr << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) dict << shape[i] << (shape.size() == 1 ? "," : (i + 1 < shape.size() ? ", " : ""));
  dict << "), }";
  std::string body = dict.str();
  // pad so that magic(6)+ver(2)+hlen(2)+header is a multiple of 64, ending in \n
  std::size_t unpadded = 10 + body.size() + 1;
  std::size_t padded = (unpadded + 63) / 64 * 64;
  body.append(padded - unpadded, ' ');
  body.push_back('\n');

  std::string out("\x93NUMPY\x01\x00", 8);
  put_u16(out, static_cast<std::uint16_t>(body.size()));
  out += body;
  return out;
}

struct ParsedNpy {
  std::string descr;
  std::vector<std::int64_t> shape;
  std::size_t data_offset = 0;
};

ParsedNpy parse_npy_header(const std::string& buf, const std::string& name) {
  if (buf.size() < 10 || buf.compare(0, 6, "\x93NUMPY") != 0) {
    throw LoadError("npz: entry '" + name + "' is not a .npy array");
  }
  const int major = static_cast<unsigned char>(buf[6]);
  std::size_t hlen, hoff;
  if (major == 1) {
    hlen = get_u16(buf, 8);
    hoff = 10;
  } else {
    hlen = get_u32(buf, 8);
    hoff = 12;
  }
  const std::string header = buf.substr(hoff, hlen);

  ParsedNpy parsed;
  parsed.data_offset = hoff + hlen;

  auto find_value = [&](const std::string& key) -> std::string {
    const auto kpos = header.find("'" + key + "'");
    if (kpos == std::string::npos) throw LoadError("npz: malformed npy header in '" + name + "'");
    auto colon = header.find(':', kpos);
    return header.substr(colon + 1);
  };

  std::string descr_part = find_value("descr");
  const auto q1 = descr_part.find('\'');
  const auto q2 = descr_part.find('\'', q1 + 1);
  parsed.descr = descr_part.substr(q1 + 1, q2 - q1 - 1);

  if (find_value("fortran_order").find("True") != std::string::npos) {
    throw LoadError("npz: fortran-ordered array '" + name + "' not supported");
  }

  std::string shape_part = find_value("shape");
  const auto p1 = shape_part.find('(');
  const auto p2 = shape_part.find(')', p1);
  std::string inner = shape_part.substr(p1 + 1, p2 - p1 - 1);
  std::stringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::string trimmed;
    for (char c : tok)
      if (!isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (!trimmed.empty()) parsed.shape.push_back(std::stoll(trimmed));
  }
  return parsed;
}

template <typename T>
void widen(const char* src, std::size_t count, std::vector<double>& out) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    T v;
    std::memcpy(&v, src + i * sizeof(T), sizeof(T));
    out[i] = static_cast<double>(v);
  }
}

NamedArray decode_npy(const std::string& buf, const std::string& name) {
  const ParsedNpy hdr = parse_npy_header(buf, name);
  NamedArray arr;
  arr.shape = hdr.shape;
  std::int64_t count = 1;
  for (auto d : hdr.shape) count *= d;
  const char* payload = buf.data() + hdr.data_offset;
  const std::size_t n = static_cast<std::size_t>(count);

  if (hdr.descr == "|u1" || hdr.descr == "<u1" || hdr.descr == "|i1") {
    arr.is_bytes = true;
    arr.bytes.assign(payload, payload + n);
  } else if (hdr.descr == "<f8") {
    widen<double>(payload, n, arr.numbers);
  } else if (hdr.descr == "<f4") {
    widen<float>(payload, n, arr.numbers);
  } else if (hdr.descr == "<i8") {
    widen<std::int64_t>(payload, n, arr.numbers);
  } else if (hdr.descr == "<i4") {
    widen<std::int32_t>(payload, n, arr.numbers);
  } else if (hdr.descr == "<i2") {
    widen<std::int16_t>(payload, n, arr.numbers);
  } else {
    throw LoadError("npz: unsupported dtype '" + hdr.descr + "' in entry '" + name + "'");
  }
  return arr;
}

}  // namespace

NpzArchive NpzArchive::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw LoadError("npz: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();

  // locate end-of-central-directory record
  if (buf.size() < 22) throw LoadError("npz: '" + path + "' is not a zip archive");
  std::size_t eocd = std::string::npos;
  const std::size_t scan_start = buf.size() >= 65558 ? buf.size() - 65558 : 0;
  for (std::size_t i = buf.size() - 22 + 1; i-- > scan_start;) {
    if (get_u32(buf, i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw LoadError("npz: missing zip directory in '" + path + "'");

  const std::uint16_t num_entries = get_u16(buf, eocd + 10);
  std::size_t cd = get_u32(buf, eocd + 16);

  NpzArchive archive;
  for (int e = 0; e < num_entries; ++e) {
    if (get_u32(buf, cd) != 0x02014b50) throw LoadError("npz: corrupt central directory");
    const std::uint16_t method = get_u16(buf, cd + 10);
    const std::uint32_t csize = get_u32(buf, cd + 20);
    const std::uint32_t usize = get_u32(buf, cd + 24);
    const std::uint16_t name_len = get_u16(buf, cd + 28);
    const std::uint16_t extra_len = get_u16(buf, cd + 30);
    const std::uint16_t comment_len = get_u16(buf, cd + 32);
    const std::uint32_t local_off = get_u32(buf, cd + 42);
    std::string entry_name = buf.substr(cd + 46, name_len);
    cd += 46 + name_len + extra_len + comment_len;

    if (get_u32(buf, local_off) != 0x04034b50) throw LoadError("npz: corrupt local header");
    const std::uint16_t lname = get_u16(buf, local_off + 26);
    const std::uint16_t lextra = get_u16(buf, local_off + 28);
    const std::size_t data_off = local_off + 30 + lname + lextra;

    std::string raw = buf.substr(data_off, csize);
    if (method == 8) {
      raw = inflate_raw(raw, usize);
    } else if (method != 0) {
      throw LoadError("npz: unsupported compression method in '" + entry_name + "'");
    }

    std::string key = entry_name;
    if (key.size() > 4 && key.compare(key.size() - 4, 4, ".npy") == 0) key.resize(key.size() - 4);
    archive.arrays_[key] = decode_npy(raw, entry_name);
  }
  return archive;
}

const NamedArray& NpzArchive::at(const std::string& name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end()) throw LoadError("npz: missing array '" + name + "'");
  return it->second;
}

std::vector<std::string> NpzArchive::names() const {
  std::vector<std::string> out;
  out.reserve(arrays_.size());
  for (const auto& [k, v] : arrays_) out.push_back(k);
  return out;
}

void NpzWriter::add(const std::string& name, const Tensor& tensor) {
  Entry e;
  e.name = name;
  e.shape = tensor.shape();
  e.numbers = tensor.values();
  entries_.push_back(std::move(e));
}

void NpzWriter::add_bytes(const std::string& name, const std::string& text) {
  Entry e;
  e.name = name;
  e.shape = {static_cast<std::int64_t>(text.size())};
  e.bytes.assign(text.begin(), text.end());
  e.is_bytes = true;
  entries_.push_back(std::move(e));
}

void NpzWriter::save(const std::string& path) const {
  std::string out;
  struct CdEntry {
    std::string name;
    std::uint32_t crc, size, offset;
  };
  std::vector<CdEntry> cdir;

  for (const auto& e : entries_) {
    std::string payload;
    if (e.is_bytes) {
      payload = npy_header("|u1", e.shape);
      payload.append(e.bytes.begin(), e.bytes.end());
    } else {
      payload = npy_header("<f8", e.shape);
      const char* p = reinterpret_cast<const char*>(e.numbers.data());
      payload.append(p, p + e.numbers.size() * sizeof(double));
    }
    const std::string fname = e.name + ".npy";
    const std::uint32_t crc = crc32_of(payload);
    const auto offset = static_cast<std::uint32_t>(out.size());

    put_u32(out, 0x04034b50);
    put_u16(out, 20);                                     // version needed
    put_u16(out, 0);                                      // flags
    put_u16(out, 0);                                      // method: stored
    put_u16(out, 0);                                      // mod time
    put_u16(out, 0x21);                                   // mod date (1980-01-01)
    put_u32(out, crc);
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    put_u16(out, static_cast<std::uint16_t>(fname.size()));
    put_u16(out, 0);                                      // extra len
    out += fname;
    out += payload;

    cdir.push_back({fname, crc, static_cast<std::uint32_t>(payload.size()), offset});
  }

  const auto cd_start = static_cast<std::uint32_t>(out.size());
  for (const auto& c : cdir) {
    put_u32(out, 0x02014b50);
    put_u16(out, 20);  // version made by
    put_u16(out, 20);  // version needed
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0x21);
    put_u32(out, c.crc);
    put_u32(out, c.size);
    put_u32(out, c.size);
    put_u16(out, static_cast<std::uint16_t>(c.name.size()));
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u32(out, 0);
    put_u32(out, c.offset);
    out += c.name;
  }
  const auto cd_size = static_cast<std::uint32_t>(out.size()) - cd_start;

  put_u32(out, 0x06054b50);
  put_u16(out, 0);
  put_u16(out, 0);
  put_u16(out, static_cast<std::uint16_t>(cdir.size()));
  put_u16(out, static_cast<std::uint16_t>(cdir.size()));
  put_u32(out, cd_size);
  put_u32(out, cd_start);
  put_u16(out, 0);

  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw LoadError("npz: cannot write '" + path + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw LoadError("npz: short write to '" + path + "'");
}

}  // namespace mmhar
