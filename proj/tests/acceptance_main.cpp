// Acceptance suite: one pass/fail line per criterion.
// Placeholder; criteria are registered once the datasets are tuned.

#include <cstdio>

int main() {
  std::printf("acceptance suite placeholder\n");
  return 0;
}
