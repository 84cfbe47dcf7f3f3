// Runs every configs/acceptance/*.cfg (or the ids given on the command line)
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include "kgspec/lab.hpp"

namespace fs = std::filesystem;
using namespace kgspec;

int main(int argc, char** argv) {
  fs::path dir = "configs/acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--dir" && i + 1 < argc) dir = argv[++i];
    else only.insert(std::stoi(a));
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::set<int> seen;
  int failed = 0;
  for (const auto& f : files) {
    const Config c = Config::load(f.string());
    const int id = static_cast<int>(c.integer("criterion", 0));
    if (!only.empty() && !only.count(id)) continue;
    seen.insert(id);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_criterion(id, c);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s (%.1f s)\n", r.line().c_str(), sec);
    std::fflush(stdout);
    if (!r.passed()) ++failed;
  }
  const int want = only.empty() ? criterion_count() : static_cast<int>(only.size());
  if (static_cast<int>(seen.size()) != want) {
    std::printf("missing criterion configs in %s\n", dir.c_str());
    return 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(seen.size()) - failed, seen.size());
  return failed ? 1 : 0;
}
