// One line per acceptance criterion; exit status 1 if any fails.
#include <iostream>

#include "treecomp/verify.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  const auto results = treecomp::run_suite(suite, {0, treecomp::kVerifySeed}, std::cout);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? 0 : 1;
}
