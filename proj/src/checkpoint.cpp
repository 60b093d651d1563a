#include "sae_info/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sae_info/errors.hpp"

namespace sae_info {
namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const U bits = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<char>(bits >> (8 * i)));
  }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::vector<unsigned char> buf, std::filesystem::path path)
      : buf_(std::move(buf)), path_(std::move(path)) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(U{buf_[pos_ + i]} << (8 * i));
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }
  std::size_t offset() const { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_.string() + ": " + what + " at offset " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size())
      throw LengthError(path_.string() + ": truncated checkpoint at offset " + std::to_string(pos_));
  }
  std::vector<unsigned char> buf_;
  std::filesystem::path path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainingSnapshot& snapshot, bool tied) {
  const SAEModel& model = snapshot.model;
  model.validate();
  Writer w;
  w.raw(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.dims.size()));
  for (int d : model.dims) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (const auto& layer : model.layers) w.put<std::uint8_t>(static_cast<std::uint8_t>(layer.activation));
  w.put<std::uint8_t>(tied ? 1 : 0);
  w.put<std::int64_t>(snapshot.iteration);
  w.put<std::uint64_t>(model.seed);
  w.put<double>(snapshot.train_mse);
  for (const auto& layer : model.layers) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) w.put<double>(layer.weights.data()[i]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) w.put<double>(layer.bias(i));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, path);

  char magic[sizeof(kCheckpointMagic)];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) r.fail("bad checkpoint magic");
  if (r.get<std::uint32_t>() != kCheckpointVersion) r.fail("unsupported checkpoint version");
  const std::uint32_t n_dims = r.get<std::uint32_t>();
  if (n_dims < 3 || n_dims > 1024) r.fail("implausible layer count");

  Checkpoint ck;
  SAEModel& model = ck.model;
  for (std::uint32_t i = 0; i < n_dims; ++i) model.dims.push_back(static_cast<int>(r.get<std::uint32_t>()));
  try {
    validate_topology(model.dims);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  model.layers.resize(n_dims - 1);
  for (auto& layer : model.layers) {
    const auto code = r.get<std::uint8_t>();
    if (code > 1) r.fail("unknown activation code");
    layer.activation = static_cast<Activation>(code);
  }
  ck.tied = r.get<std::uint8_t>() != 0;
  ck.iteration = static_cast<long>(r.get<std::int64_t>());
  model.seed = r.get<std::uint64_t>();
  ck.train_mse = r.get<double>();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    layer.weights.resize(model.dims[l], model.dims[l + 1]);
    layer.bias.resize(model.dims[l + 1]);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = r.get<double>();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = r.get<double>();
  }
  if (r.remaining() != 0) r.fail("trailing bytes after parameter blocks");
  try {
    model.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return ck;
}

}  // namespace sae_info
