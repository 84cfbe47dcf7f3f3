#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kgspec/spectral_field.hpp"

using namespace kgspec;

TEST_CASE("Parseval on random band-limited fields") {
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 3}) {
    for (int M : {8, 16, 32}) {
      if (n == 3 && M > 16) continue;
      Grid g{n, M, 3.0 + M};
      SpectralField f(g);
      std::vector<double> v(g.size());
      for (auto& x : v) x = nd(rng);
      auto c = f.analyze(v);
      const double l2 = f.l2(c);
      CHECK(f.l2_grid(f.synthesize(c)) == doctest::Approx(l2).epsilon(1e-10));
      CHECK(f.l2_grid(f.synthesize_padded(c, 2 * M), 2 * M) == doctest::Approx(l2).epsilon(1e-10));
      CHECK(f.symmetry_defect(c) < 1e-13);
    }
  }
}
