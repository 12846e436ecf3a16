// Plays a small library predictor against one of its members and against the
// sequence built to evade it.

#include <rlab/rlab.hpp>

#include <iostream>

using namespace rlab;

int main() {
  std::vector<LibFunc> lib{{"n", [](index_t n) { return n; }},
                           {"n^2", [](index_t n) { return n * n; }},
                           {"2n+1", [](index_t n) { return 2 * n + 1; }}};
  auto P = predictor_from_library(lib);
  const index_t h = 50;
  auto member = play_game(P, [](index_t n) { return 2 * n + 1; }, h);
  std::cout << "2n+1: " << member.count() << " mistakes in " << h << " rounds\n";
  auto x = evader_from_dominator(P, h);
  auto ev = play_game(P, x, h);
  std::cout << "evader: " << ev.count() << " mistakes in " << h << " rounds, first values";
  for (index_t n = 0; n < 8; ++n) std::cout << ' ' << x[n];
  std::cout << '\n';
}
