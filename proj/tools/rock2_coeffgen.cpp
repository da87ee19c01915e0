// Regenerates the ROCK2 coefficient asset over the full degree ladder.
//
//   rock2_coeffgen [output-path]   (default: stdout)

#include <fstream>
#include <iostream>
#include <vector>

#include "mrock/rock2_generator.hpp"

int main(int argc, char** argv) {
  std::vector<mrock::Rock2Tableau> tabs;
  for (int s : mrock::rock2_ladder()) {
    tabs.push_back(mrock::generate_rock2_tableau(s));
    const auto& t = tabs.back();
    std::cerr << "s = " << s << "  ell = " << t.ell << "  ell/s^2 = " << t.ell / (double(s) * s) << '\n';
  }
  if (argc > 1) {
    std::ofstream out(argv[1]);
    if (!out) {
      std::cerr << "cannot open " << argv[1] << '\n';
      return 1;
    }
    mrock::write_rock2_table(out, tabs);
  } else {
    mrock::write_rock2_table(std::cout, tabs);
  }
  return 0;
}
