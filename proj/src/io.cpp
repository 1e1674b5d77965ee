#include "landau/io.hpp"

#include <cstdio>
#include <cstring>

namespace landau {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("snapshot-format", what); }

void put_u32(std::ofstream& o, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  o.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ofstream& o, double v) {
  std::uint64_t u = 0;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  o.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) bad(path + ": truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) bad(path + ": truncated header");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v = 0.0;
  std::memcpy(&v, &u, 8);
  return v;
}

void put_samples(std::ofstream& o, const std::vector<double>& v) {
  for (double x : v) put_f64(o, x);
}

std::vector<double> get_samples(std::ifstream& in, std::size_t n, const std::string& path) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = get_f64(in, path);
  char extra = 0;
  if (in.read(&extra, 1)) bad(path + ": trailing bytes after the sample block");
  return v;
}

void check_magic(std::ifstream& in, const char* magic, const std::string& path) {
  char buf[4];
  if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
    bad(path + ": not a " + magic + " file");
  const std::uint32_t version = get_u32(in, path);
  if (version != 1) bad(path + ": unsupported version " + std::to_string(version));
}

}  // namespace

void write_vpf2(const std::string& path, const ScalarField2D& f, double time) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) bad("cannot write '" + path + "'");
  o.write("VPF2", 4);
  put_u32(o, 1);
  put_u32(o, static_cast<std::uint32_t>(f.grid().N));
  put_f64(o, f.grid().L);
  put_f64(o, time);
  put_samples(o, f.values());
  if (!o) bad("write failed on '" + path + "'");
}

Vpf2 read_vpf2(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  check_magic(in, "VPF2", path);
  const int N = static_cast<int>(get_u32(in, path));
  const double L = get_f64(in, path);
  Vpf2 r;
  r.time = get_f64(in, path);
  const PeriodicGrid g{N, L};
  r.field = ScalarField2D(g, get_samples(in, g.size(), path));
  return r;
}

void write_vpf4(const std::string& path, const PhaseField& f) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) bad("cannot write '" + path + "'");
  o.write("VPF4", 4);
  put_u32(o, 1);
  put_u32(o, static_cast<std::uint32_t>(f.grid.x.N));
  put_u32(o, static_cast<std::uint32_t>(f.grid.v.Nv));
  put_f64(o, f.grid.x.L);
  put_f64(o, f.grid.v.vmax);
  put_f64(o, f.time);
  put_samples(o, f.values);
  if (!o) bad("write failed on '" + path + "'");
}

PhaseField read_vpf4(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  check_magic(in, "VPF4", path);
  const int Nx = static_cast<int>(get_u32(in, path));
  const int Nv = static_cast<int>(get_u32(in, path));
  const double L = get_f64(in, path);
  const double vmax = get_f64(in, path);
  PhaseField f;
  f.grid = PhaseGrid{PeriodicGrid{Nx, L}, VelocityGrid{Nv, vmax}};
  f.time = get_f64(in, path);
  f.values = get_samples(in, f.grid.size(), path);
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()), path_(path) {
  if (!out_) throw Error("snapshot-format", "cannot write '" + path + "'");
  out_ << "# landau-lab v" << kCsvSchema << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw Error("snapshot-format", path_ + ": row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("snapshot-format", "cannot write '" + path + "'");
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& r : rows) {
    o << r.first;
    for (std::size_t i = r.first.size(); i < width; ++i) o << ' ';
    o << " = " << r.second << "\n";
  }
}

}  // namespace landau
