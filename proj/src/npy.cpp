#include "sarcam/npy.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>

#include "sarcam/error.hpp"

namespace sarcam::npy {
namespace {

static_assert(std::endian::native == std::endian::little, "NPY payloads are read as native little-endian floats");

constexpr std::array<unsigned char, 6> kMagic = {0x93, 'N', 'U', 'M', 'P', 'Y'};

std::string dict_value(const std::string& header, const std::string& key, const std::string& path_key) {
  const std::regex re("'" + key + "'\\s*:\\s*('[^']*'|True|False|\\([^)]*\\))");
  std::smatch m;
  if (!std::regex_search(header, m, re)) {
    throw Error(ErrorKind::UnsupportedFormat, path_key + ": NPY header lacks '" + key + "'");
  }
  return m[1].str();
}

std::vector<int> parse_shape(const std::string& tuple, const std::string& key) {
  std::vector<int> shape;
  const std::regex num("\\d+");
  for (auto it = std::sregex_iterator(tuple.begin(), tuple.end(), num); it != std::sregex_iterator(); ++it) {
    const long v = std::stol(it->str());
    if (v > (1L << 30)) throw Error(ErrorKind::UnsupportedFormat, key + ": NPY dimension too large");
    shape.push_back(static_cast<int>(v));
  }
  if (shape.empty()) throw Error(ErrorKind::UnsupportedFormat, key + ": scalar NPY arrays are not supported");
  return shape;
}

}  // namespace

std::string Array::shape_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Array read(const std::filesystem::path& path, const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, key + ": cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorKind::UnsupportedFormat, key + ": bad NPY magic in " + path.string());
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  if (major != 1) {
    throw Error(ErrorKind::UnsupportedFormat, key + ": NPY version " + std::to_string(major) + ".x not supported");
  }
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  if (bytes.size() < 10 + header_len) throw Error(ErrorKind::UnsupportedFormat, key + ": truncated NPY header");
  const std::string header(bytes.data() + 10, header_len);

  const std::string descr = dict_value(header, "descr", key);
  if (descr != "'<f4'") {
    throw Error(ErrorKind::UnsupportedDType, key + ": dtype " + descr + " (expected '<f4')");
  }
  if (dict_value(header, "fortran_order", key) != "False") {
    throw Error(ErrorKind::UnsupportedFormat, key + ": Fortran-order arrays are not supported");
  }

  Array out;
  out.shape = parse_shape(dict_value(header, "shape", key), key);
  std::size_t count = 1;
  for (int d : out.shape) count *= static_cast<std::size_t>(d);
  const std::size_t payload = bytes.size() - 10 - header_len;
  if (payload != count * sizeof(float)) {
    throw Error(ErrorKind::ShapeMismatch, key + ": payload of " + std::to_string(payload) + " bytes does not match shape " +
                                              out.shape_string());
  }
  out.data.resize(count);
  std::memcpy(out.data.data(), bytes.data() + 10 + header_len, payload);
  return out;
}

void write(const std::filesystem::path& path, const std::vector<int>& shape, const std::vector<float>& data) {
  std::string dims;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dims += std::to_string(shape[i]);
    if (i + 1 < shape.size() || shape.size() == 1) dims += ", ";
  }
  if (shape.size() == 1) dims.pop_back();
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" + dims + "), }";
  // Pad with spaces so magic + version + length + header ends on a 64-byte boundary.
  const std::size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  const char version[2] = {1, 0};
  out.write(version, 2);
  const std::uint16_t len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace sarcam::npy
