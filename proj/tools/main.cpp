#include <cstdio>

int main() {
  std::puts("eddylab: CLI not wired up yet");
  return 2;
}
