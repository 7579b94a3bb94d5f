// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <exception>

#include "loggas/verify.hpp"

int main(int argc, char** argv) {
  loggas::verify::Options opts;
  opts.seed = 7;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);

  loggas::verify::Context ctx(opts);
  int failures = 0;
  for (int id = 1; id <= 11; ++id) {
    loggas::verify::CheckResult res;
    try {
      res = loggas::verify::run_criterion(id, ctx);
    } catch (const std::exception& e) {
      res.id = id;
      res.name = "criterion-" + std::to_string(id);
      res.passed = false;
      res.details = {{"exception", e.what()}};
    }
    std::printf("[%2d] %-22s %s  %s\n", res.id, res.name.c_str(),
                res.passed ? "PASS" : "FAIL", res.details.dump().c_str());
    std::fflush(stdout);
    if (!res.passed) ++failures;
  }
  std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
