#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>

#include <omp.h>

int main(int argc, char** argv) {
  // Kernels must agree across thread counts, so always run them threaded,
  // even on a single-core machine.
  omp_set_num_threads(std::max(4, omp_get_max_threads()));
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
