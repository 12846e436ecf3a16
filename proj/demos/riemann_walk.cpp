// Rearranges the alternating harmonic series toward a few targets and prints
// where each partial sum lands after a fixed number of terms.

#include <rlab/rlab.hpp>

#include <iostream>

using namespace rlab;

int main() {
  auto a = series::alt_harmonic();
  const index_t horizon = 20000;
  for (auto target : {RiemannTarget::finite(Rational(0)), RiemannTarget::finite(Rational(2)),
                      RiemannTarget::finite(Rational(-3, 2)), RiemannTarget::plus_infinity()}) {
    auto p = riemann_rearrange(a, target, 1);
    auto tr = partial_sums(a, p, horizon, horizon / 10, {});
    std::cout << p.name() << ": S_" << horizon << " ~ " << tr.checkpoints.back().sum.to_double() << " ("
              << to_string(tr.classification.kind) << ")\n";
  }
}
