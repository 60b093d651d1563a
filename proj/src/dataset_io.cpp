#include "sae_info/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "sae_info/errors.hpp"

namespace sae_info {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset,
                        const std::filesystem::path& path) {
  if (buf.size() < offset + 4) {
    std::ostringstream msg;
    msg << path.string() << ": truncated header at offset " << offset;
    throw LengthError(msg.str());
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                  static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(bytes.data(), 4);
}

// Parses the magic and dimension sizes; returns the payload offset.
std::size_t parse_header(const std::vector<unsigned char>& buf, const std::filesystem::path& path,
                         std::uint32_t expected_magic, std::uint32_t expected_ndims,
                         std::vector<std::uint32_t>& dims) {
  const std::uint32_t magic = read_be32(buf, 0, path);
  if (magic != expected_magic) {
    std::ostringstream msg;
    msg << path.string() << ": expected " << (expected_magic == kIdxImageMagic ? "image" : "label")
        << " magic 0x" << std::hex << expected_magic << " at offset 0, found 0x" << magic;
    throw FormatError(msg.str());
  }
  if (expected_ndims == 0) throw LengthError(path.string() + ": empty dimension count");
  dims.clear();
  for (std::uint32_t d = 0; d < expected_ndims; ++d) dims.push_back(read_be32(buf, 4 + 4 * d, path));
  return 4 + 4 * std::size_t{expected_ndims};
}

void check_payload(const std::vector<unsigned char>& buf, std::size_t offset, std::size_t need,
                   const std::filesystem::path& path) {
  if (buf.size() < offset + need) {
    std::ostringstream msg;
    msg << path.string() << ": payload truncated, need " << need << " bytes after offset "
        << offset << ", have " << (buf.size() - std::min(buf.size(), offset));
    throw LengthError(msg.str());
  }
}

}  // namespace

void ManifoldSpec::validate() const {
  if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  if (ambient_dim < 1) throw ConfigError("ambient_dim must be >= 1");
  if (latent_dim > ambient_dim) {
    throw ConfigError("latent_dim (" + std::to_string(latent_dim) + ") exceeds ambient_dim (" +
                      std::to_string(ambient_dim) + ")");
  }
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std must be >= 0");
}

const char* to_string(Embedding e) {
  return e == Embedding::kLinear ? "linear" : "sinusoidal-warp";
}

Embedding embedding_from_string(const std::string& s) {
  if (s == "linear") return Embedding::kLinear;
  if (s == "sinusoidal-warp") return Embedding::kSinusoidalWarp;
  throw ConfigError("unknown embedding '" + s + "' (expected linear or sinusoidal-warp)");
}

Matrix load_idx_images(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  std::vector<std::uint32_t> dims;
  const std::size_t offset = parse_header(buf, path, kIdxImageMagic, 3, dims);
  const std::size_t n = dims[0];
  const std::size_t width = std::size_t{dims[1]} * dims[2];
  check_payload(buf, offset, n * width, path);
  Matrix out(n, width);
  const unsigned char* p = buf.data() + offset;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < width; ++j) out(i, j) = p[i * width + j] / 255.0;
  return out;
}

LabelVector load_idx_labels(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  std::vector<std::uint32_t> dims;
  const std::size_t offset = parse_header(buf, path, kIdxLabelMagic, 1, dims);
  check_payload(buf, offset, dims[0], path);
  LabelVector out;
  out.labels.assign(buf.begin() + offset, buf.begin() + offset + dims[0]);
  for (int l : out.labels) out.n_classes = std::max(out.n_classes, l + 1);
  return out;
}

void write_idx_images(const std::filesystem::path& path, const Matrix& data, std::uint32_t rows,
                      std::uint32_t cols) {
  if (std::size_t{rows} * cols != static_cast<std::size_t>(data.cols()))
    throw ShapeError("rows*cols does not match the feature count");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  put_be32(out, kIdxImageMagic);
  put_be32(out, static_cast<std::uint32_t>(data.rows()));
  put_be32(out, rows);
  put_be32(out, cols);
  std::vector<char> bytes(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double v = std::clamp(data(i, j), 0.0, 1.0);
      bytes[i * data.cols() + j] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.labels.size()));
  for (int l : labels.labels) {
    if (l < 0 || l > 255) throw DataError("label out of byte range");
    out.put(static_cast<char>(l));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<Matrix, LabelVector> gen_manifold(const ManifoldSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int d = spec.latent_dim;
  const int m = spec.ambient_dim;
  const int n = spec.n_samples;

  // Random map with orthonormal rows: every latent direction keeps equal variance.
  Eigen::MatrixXd draw(m, d);
  for (Eigen::Index i = 0; i < draw.size(); ++i) draw.data()[i] = gauss(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(draw).householderQ() *
                            Eigen::MatrixXd::Identity(m, d);
  const Matrix embed = q.transpose();
  Vector freq(m), phase(m);
  for (int j = 0; j < m; ++j) {
    freq(j) = 1.0 + 2.0 * unit(rng);
    phase(j) = 2.0 * M_PI * unit(rng);
  }

  Matrix latent(n, d);
  for (Eigen::Index i = 0; i < latent.size(); ++i) latent.data()[i] = unit(rng);

  Matrix x = latent * embed;
  if (spec.embedding == Embedding::kSinusoidalWarp) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) x(i, j) = std::sin(freq(j) * x(i, j) + phase(j));
  }
  if (spec.noise_std > 0.0)
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += spec.noise_std * gauss(rng);

  for (int j = 0; j < m; ++j) {
    const double lo = x.col(j).minCoeff();
    const double hi = x.col(j).maxCoeff();
    const double span = hi - lo;
    if (span > 0.0)
      x.col(j) = (x.col(j).array() - lo) / span;
    else
      x.col(j).setZero();
  }

  const int label_bits = std::min(d, 4);
  LabelVector labels;
  labels.n_classes = 1 << label_bits;
  labels.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    int code = 0;
    for (int b = 0; b < label_bits; ++b)
      if (latent(i, b) > 0.5) code |= 1 << b;
    labels.labels[i] = code;
  }
  return {std::move(x), std::move(labels)};
}

std::vector<std::vector<int>> make_batches(int n_samples, int batch_size, std::uint64_t seed,
                                           int epochs) {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (batch_size > n_samples) {
    throw ConfigError("batch_size (" + std::to_string(batch_size) + ") exceeds n_samples (" +
                      std::to_string(n_samples) + ")");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> perm(n_samples);
  std::vector<std::vector<int>> out;
  const int per_epoch = n_samples / batch_size;
  out.reserve(static_cast<std::size_t>(per_epoch) * epochs);
  for (int e = 0; e < epochs; ++e) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int b = 0; b < per_epoch; ++b)
      out.emplace_back(perm.begin() + b * batch_size, perm.begin() + (b + 1) * batch_size);
  }
  return out;
}

Matrix select_rows(const Matrix& data, const std::vector<int>& rows) {
  Matrix out(rows.size(), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = data.row(rows[i]);
  return out;
}

}  // namespace sae_info
