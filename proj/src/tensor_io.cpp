#include "lobrep/tensor_io.hpp"

#include <fstream>
#include <string>

#include "io_util.hpp"
#include "lobrep/error.hpp"

namespace lobrep {

namespace {
constexpr char kMagic[4] = {'L', 'O', 'B', 'T'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::uint64_t Tensor::element_count() const noexcept {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  if (t.element_count() != t.values.size()) {
    throw Error(Errc::ShapeMismatch, "tensor dims hold " + std::to_string(t.element_count()) +
                                         " elements but payload has " +
                                         std::to_string(t.values.size()));
  }
  if (t.dims.size() > 255) throw Error(Errc::InvalidArgument, "tensor rank above 255");
  io::write_atomic(path, [&](std::ostream& out) {
    out.write(kMagic, 4);
    io::put(out, kVersion);
    io::put(out, static_cast<std::uint8_t>(t.dtype));
    io::put(out, static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) io::put(out, d);
    if (t.dtype == DType::F32) {
      std::vector<float> buf(t.values.begin(), t.values.end());
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else {
      out.write(reinterpret_cast<const char*>(t.values.data()),
                static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    }
  });
}

Tensor read_tensor(const std::filesystem::path& path) {
  auto in = io::open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || !std::equal(magic, magic + 4, kMagic)) {
    throw Error(Errc::CorruptTensor, path.string() + ": bad magic");
  }
  if (io::get<std::uint16_t>(in) != kVersion) {
    throw Error(Errc::CorruptTensor, path.string() + ": unsupported version");
  }
  Tensor t;
  const auto dtype = io::get<std::uint8_t>(in);
  if (dtype != 1 && dtype != 2) throw Error(Errc::CorruptTensor, "unknown dtype code");
  t.dtype = static_cast<DType>(dtype);
  const auto rank = io::get<std::uint8_t>(in);
  for (std::uint8_t i = 0; i < rank; ++i) t.dims.push_back(io::get<std::uint64_t>(in));

  const auto header = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(static_cast<std::streamoff>(header));
  const std::uint64_t width = t.dtype == DType::F32 ? 4 : 8;
  const std::uint64_t n = t.element_count();
  if (file_size - header != n * width) {
    throw Error(Errc::CorruptTensor, path.string() + ": payload is " +
                                         std::to_string(file_size - header) + " bytes, dims need " +
                                         std::to_string(n * width));
  }
  if (t.dtype == DType::F32) {
    std::vector<float> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    t.values.assign(buf.begin(), buf.end());
  } else {
    t.values.resize(n);
    in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(n * 8));
  }
  if (!in) throw Error(Errc::CorruptTensor, path.string() + ": truncated payload");
  return t;
}

std::filesystem::path sidecar_path(const std::filesystem::path& tensor_path) {
  auto p = tensor_path;
  p += ".json";
  return p;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  io::write_atomic(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; }, false);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRow, path.string() + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const nlohmann::json& extra) {
  Tensor t;
  t.dtype = DType::F64;
  t.values = model.parameters();
  t.dims = {t.values.size()};
  write_tensor(path, t);

  const auto& spec = model.spec();
  nlohmann::json side;
  side["kind"] = to_string(spec.kind);
  side["input_dim"] = spec.input_dim;
  side["hidden"] = spec.kind == ModelKind::Mlp ? spec.hidden : std::vector<std::size_t>{};
  side["classes"] = spec.classes;
  side["seed"] = spec.seed;
  side["layout"] = "per layer: weight[in][out] row-major, then bias[out]";
  side["extra"] = extra;
  write_json(sidecar_path(path), side);
}

Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* extra) {
  const auto side = read_json(sidecar_path(path));
  ModelSpec spec;
  try {
    spec.kind = parse_model_kind(side.at("kind").get<std::string>());
    spec.input_dim = side.at("input_dim").get<std::size_t>();
    spec.hidden = side.at("hidden").get<std::vector<std::size_t>>();
    spec.classes = side.at("classes").get<std::size_t>();
    spec.seed = side.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptTensor, "checkpoint sidecar: " + std::string(e.what()));
  }
  Model model(spec);
  const auto t = read_tensor(path);
  model.set_parameters(t.values);
  if (extra) *extra = side.value("extra", nlohmann::json::object());
  return model;
}

}  // namespace lobrep
