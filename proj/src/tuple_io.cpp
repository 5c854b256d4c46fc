#include "strongconv/tuple_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace strongconv {

namespace {

void put_f64(std::ostream& os, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>(bits >> (8 * i) & 0xff);
  os.write(bytes.data(), 8);
}

double get_f64(std::istream& is) {
  std::array<unsigned char, 8> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), 8)) throw std::runtime_error("read_tuple: truncated data file");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = bits << 8 | bytes[static_cast<std::size_t>(i)];
  return std::bit_cast<double>(bits);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path side = path;
  side += ".json";
  return side;
}

void write_tuple(const std::filesystem::path& path, const MatTuple& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_tuple: cannot open " + path.string());
  const Eigen::Index k = a.dim();
  nlohmann::json flags = nlohmann::json::array();
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) {
        put_f64(os, a[j](r, c).real());
        put_f64(os, a[j](r, c).imag());
      }
    flags.push_back(a.is_hermitian(j));
  }
  if (!os) throw std::runtime_error("write_tuple: write failed for " + path.string());

  std::ofstream side(sidecar_path(path));
  if (!side) throw std::runtime_error("write_tuple: cannot open sidecar for " + path.string());
  side << nlohmann::json{{"k", k}, {"r", a.size()}, {"hermitian_flags", flags}}.dump(2) << '\n';
  if (!side) throw std::runtime_error("write_tuple: sidecar write failed for " + path.string());
}

MatTuple read_tuple(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw std::runtime_error("read_tuple: missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("read_tuple: bad sidecar: ") + e.what());
  }
  const auto k = meta.at("k").get<Eigen::Index>();
  const auto r = meta.at("r").get<std::size_t>();
  if (k < 1 || r < 1) throw std::runtime_error("read_tuple: k and r must be >= 1");

  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_tuple: cannot open " + path.string());
  const auto expected = static_cast<std::uintmax_t>(r) * static_cast<std::uintmax_t>(k * k) * 16U;
  if (std::filesystem::file_size(path) != expected)
    throw std::runtime_error("read_tuple: data size does not match sidecar");
  std::vector<Matrix> mats;
  mats.reserve(r);
  for (std::size_t j = 0; j < r; ++j) {
    Matrix m(k, k);
    for (Eigen::Index row = 0; row < k; ++row)
      for (Eigen::Index c = 0; c < k; ++c) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        m(row, c) = Complex(re, im);
      }
    mats.push_back(std::move(m));
  }
  return MatTuple(std::move(mats));
}

}  // namespace strongconv
