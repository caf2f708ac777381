#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sarcam::npy {

/// A float32 C-order array as stored in an NPY v1.0 file.
struct Array {
  std::vector<int> shape;
  std::vector<float> data;

  std::string shape_string() const;
};

/// Reads a little-endian float32, C-order NPY file. `key` names the file in
/// error messages (e.g. the manifest key that referenced it).
Array read(const std::filesystem::path& path, const std::string& key);

/// Writes NPY v1.0 with dtype '<f4'. Header padding follows numpy's own
/// writer, so files are byte-identical to np.save for the same array.
void write(const std::filesystem::path& path, const std::vector<int>& shape, const std::vector<float>& data);

}  // namespace sarcam::npy
