#include "subshift/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "subshift/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

namespace subshift::nn {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'M', 'L', 'P', '1', '\n', '\0'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError("checkpoint: truncated stream");
  return v;
}

}  // namespace

void write_mlp(std::ostream& os, const MlpParams& net) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(os, net.layer_dims.size());
  for (Eigen::Index d : net.layer_dims) put<std::int64_t>(os, d);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put<double>(os, w(r, c));
    }
    const Eigen::VectorXd& b = net.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) put<double>(os, b[i]);
  }
  if (!os) throw DataError("checkpoint: write failed");
}

MlpParams read_mlp(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("checkpoint: bad magic");
  }
  const auto n_dims = get<std::uint64_t>(is);
  if (n_dims < 2 || n_dims > 64) throw DataError("checkpoint: implausible layer count");
  std::vector<Eigen::Index> dims(n_dims);
  for (auto& d : dims) {
    d = static_cast<Eigen::Index>(get<std::int64_t>(is));
    if (d < 1) throw DataError("checkpoint: nonpositive layer dim");
  }
  MlpParams net = MlpParams::zeros(dims);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get<double>(is);
    }
    Eigen::VectorXd& b = net.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = get<double>(is);
  }
  return net;
}

void save_mlp(const std::filesystem::path& path, const MlpParams& net) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  write_mlp(f, net);
}

MlpParams load_mlp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open checkpoint: " + path.string());
  return read_mlp(f);
}

}  // namespace subshift::nn
