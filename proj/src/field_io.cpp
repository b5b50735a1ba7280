#include "halfwave/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace halfwave {

namespace {

static_assert(std::endian::native == std::endian::little, "container format is little-endian");

constexpr char kMagic[4] = {'H', 'W', 'F', '1'};

void write_header(std::ofstream& os, std::uint32_t kind, const Grid2D& g) {
  const std::int32_t n = g.points();
  const double L = g.half_width();
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&L), sizeof L);
}

void write_sidecar(const std::string& path, const Grid2D& g, const char* kind,
                   const nlohmann::json& meta) {
  nlohmann::json j = meta.is_object() ? meta : nlohmann::json::object();
  j["format"] = "HWF1";
  j["kind"] = kind;
  j["L"] = g.half_width();
  j["N"] = g.points();
  std::ofstream os(path + ".json");
  if (!os) throw std::runtime_error("cannot write " + path + ".json");
  os << j.dump(2) << "\n";
}

struct Raw {
  std::uint32_t kind;
  Grid2D grid;
  std::vector<double> data;
};

Raw read_raw(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  std::uint32_t kind = 0;
  std::int32_t n = 0;
  double L = 0.0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&kind), sizeof kind);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + ": not an HWF1 field container");
  }
  if (kind > 1) throw std::runtime_error(path + ": unknown field kind");
  Grid2D g = make_grid(L, n);
  const std::size_t count = g.size() * (kind == 1 ? 2 : 1);
  std::vector<double> data(count);
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error(path + ": truncated field container");
  return Raw{kind, g, std::move(data)};
}

}  // namespace

void write_field(const std::string& path, const ComplexField& f, const nlohmann::json& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_header(os, 1, f.grid);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write failed: " + path);
  write_sidecar(path, f.grid, "complex", meta);
}

void write_field(const std::string& path, const RealField& f, const nlohmann::json& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_header(os, 0, f.grid);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path);
  write_sidecar(path, f.grid, "real", meta);
}

ComplexField read_complex_field(const std::string& path) {
  Raw r = read_raw(path);
  ComplexField f(r.grid);
  if (r.kind == 1) {
    for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = cplx(r.data[2 * k], r.data[2 * k + 1]);
  } else {
    for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = r.data[k];
  }
  return f;
}

RealField read_real_field(const std::string& path) {
  Raw r = read_raw(path);
  if (r.kind == 0) return RealField(r.grid, std::move(r.data));
  RealField f(r.grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (r.data[2 * k + 1] != 0.0) throw std::runtime_error(path + ": field is not real");
    f.values[k] = r.data[2 * k];
  }
  return f;
}

nlohmann::json read_sidecar(const std::string& path) {
  std::ifstream is(path + ".json");
  if (!is) return nlohmann::json::object();
  return nlohmann::json::parse(is);
}

}  // namespace halfwave
