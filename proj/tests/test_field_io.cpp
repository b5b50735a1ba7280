#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "halfwave/field_io.hpp"

using namespace halfwave;
namespace fs = std::filesystem;

TEST_CASE("field containers round trip with their sidecar") {
  const fs::path dir = fs::temp_directory_path() / "halfwave_io_test";
  fs::create_directories(dir);
  const Grid2D g = make_grid(3.0, 16);
  const ComplexField c = ComplexField::from_function(g, [](double x, double y) { return cplx(x, y * y); });
  const RealField r = RealField::from_function(g, [](double x, double y) { return x - y; });
  write_field((dir / "c.hwf").string(), c, {{"tag", "c"}});
  write_field((dir / "r.hwf").string(), r);

  const ComplexField c2 = read_complex_field((dir / "c.hwf").string());
  CHECK(c2.grid == g);
  CHECK(c2.values == c.values);
  CHECK(read_sidecar((dir / "c.hwf").string())["tag"] == "c");

  const RealField r2 = read_real_field((dir / "r.hwf").string());
  CHECK(r2.values == r.values);
  const ComplexField rc = read_complex_field((dir / "r.hwf").string());
  CHECK(rc.imag().max_abs() == 0.0);
  CHECK_THROWS(read_real_field((dir / "c.hwf").string()));
  CHECK(read_sidecar((dir / "missing.hwf").string()).empty());

  std::ofstream((dir / "bad.hwf").string()) << "nope";
  CHECK_THROWS(read_complex_field((dir / "bad.hwf").string()));
  CHECK_THROWS(read_complex_field((dir / "absent.hwf").string()));
  fs::remove_all(dir);
}
