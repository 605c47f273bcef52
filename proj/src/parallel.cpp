#include "cml/parallel.hpp"

#include "cml/errors.hpp"

namespace cml {

namespace {
std::atomic<int> g_threads{1};
}

int num_threads() { return g_threads.load(); }

void set_num_threads(int n) {
    if (n < 1) throw InvalidArgument("thread count must be at least 1");
    g_threads.store(n);
}

}  // namespace cml
