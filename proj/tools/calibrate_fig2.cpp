// Scans the slit separation of the decoherence setup and reports where the
// first visibility minimum falls.
//
//   calibrate_fig2 [b1 b2 ...]
//
// For each slit center b it samples V(z) on 6..60 m, then refines the minimum
// with a parabola through the lowest sample and its neighbours.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "interfall/experiments.hpp"

using namespace interfall;

int main(int argc, char** argv) {
  std::vector<double> centers;
  for (int i = 1; i < argc; ++i) centers.push_back(std::strtod(argv[i], nullptr));
  if (centers.empty()) centers = {1.8e-4, 1.9e-4, 2.0e-4};

  std::vector<double> zs;
  for (double z = 6.0; z <= 60.0 + 1e-9; z += 3.0) zs.push_back(z);

  for (double b : centers) {
    DecohereSetup s;
    s.slit_center = b;
    const auto pts = run_decohere(s, zs, 1);
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::printf("b=%.4e z=%5.1f V=%.4f overlap=%.4f\n", b, pts[i].z, pts[i].visibility, pts[i].overlap_abs);
      if (pts[i].visibility < pts[best].visibility) best = i;
    }
    double zmin = pts[best].z;
    if (best > 0 && best + 1 < pts.size()) {
      const double y0 = pts[best - 1].visibility, y1 = pts[best].visibility, y2 = pts[best + 1].visibility;
      const double den = y0 - 2.0 * y1 + y2;
      if (den > 0.0) zmin += 0.5 * 3.0 * (y0 - y2) / den;
    }
    std::printf("b=%.4e first minimum near z=%.2f m\n\n", b, zmin);
  }
  return 0;
}
