// Artifact formats: binary field snapshots, versioned CSV, and the plain-text
// run report.
//
// VPF2 (spatial field):  magic "VPF2", u32 version, u32 N, f64 L, f64 time,
// then N^2 row-major f64 samples.  VPF4 (phase-space field) extends the header
// with velocity dimensions: magic "VPF4", u32 version, u32 Nx, u32 Nv, f64 L,
// f64 v_max, f64 time, then Nx^2 Nv^2 samples in PhaseGrid::index order.
// All fields little-endian; a wrong magic, version, or a short payload raises
// "snapshot-format".
//
// CSV files open with the schema line `# landau-lab v1` followed by the column
// header; numbers print through %.17g so identical runs produce identical
// bytes.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "landau/density_solver.hpp"
#include "landau/grid.hpp"

namespace landau {

inline constexpr int kCsvSchema = 1;

void write_vpf2(const std::string& path, const ScalarField2D& f, double time);

struct Vpf2 {
  double time = 0.0;
  ScalarField2D field;
};
Vpf2 read_vpf2(const std::string& path);

void write_vpf4(const std::string& path, const PhaseField& f);
PhaseField read_vpf4(const std::string& path);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);  // size must match the header

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::string path_;
};

// aligned `key = value` lines
void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& rows);

std::string format_double(double v);  // %.17g

}  // namespace landau
