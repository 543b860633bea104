// Runs every acceptance criterion and prints one line per criterion.
#include <cstdlib>
#include <iostream>

#include "toeplab/acceptance.hpp"
#include "toeplab/cache.hpp"

int main(int argc, char** argv) {
  toeplab::acceptance::Options opts;
  opts.cache_dir = toeplab::cache::cache_dir(argc > 1 ? std::optional<std::string>(argv[1]) : std::nullopt);
  opts.log = &std::cout;
  const auto suite = toeplab::acceptance::run(opts);
  std::cout << (suite.all_pass() ? "acceptance: all criteria pass" : "acceptance: FAILED") << " ("
            << suite.seconds << " s)\n";
  return suite.all_pass() ? EXIT_SUCCESS : EXIT_FAILURE;
}
