#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "lobrep/learn.hpp"

namespace lobrep {

/// TensorFile layout, little-endian:
///   magic "LOBT" | u16 version (1) | u8 dtype (1 = f32, 2 = f64) | u8 rank |
///   u64 dims[rank] | payload, row-major, product(dims) elements.
/// Metadata lives in a JSON sidecar next to the payload (`<file>.json`).
enum class DType : std::uint8_t { F32 = 1, F64 = 2 };

struct Tensor {
  DType dtype = DType::F32;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;  // f32 payloads are widened on read

  std::uint64_t element_count() const noexcept;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
/// Throws CorruptTensor on bad magic, version, dtype or payload length.
Tensor read_tensor(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& tensor_path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// Model checkpoint: an f64 TensorFile of all parameters (Model::parameters
/// order) plus a sidecar describing the architecture. `extra` is merged
/// into the sidecar under "extra".
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const nlohmann::json& extra = nlohmann::json::object());
Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* extra = nullptr);

}  // namespace lobrep
