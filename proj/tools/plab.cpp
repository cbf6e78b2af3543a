#include <iostream>
#include <string>
#include <vector>

#include "plab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto r = plab::cli::run(args);
  if (r.status == plab::cli::kExitOk) {
    if (!r.message.empty()) std::cout << r.message << (r.message.back() == '\n' ? "" : "\n");
    for (const auto& p : r.written) std::cout << "wrote " << p.string() << "\n";
  } else {
    std::cerr << "plab: " << r.message << "\n";
    for (const auto& p : r.written) std::cerr << "wrote " << p.string() << "\n";
  }
  return r.status;
}
