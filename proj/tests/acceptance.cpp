#include <cstdio>
#include <exception>

#include "droplet/acceptance.hpp"

int main() {
  try {
    const std::vector<droplet::CriterionResult> results = droplet::run_acceptance();
    int failed = 0;
    for (const droplet::CriterionResult& r : results) {
      std::printf("%s %s  %s  (%.2f s)\n", r.id.c_str(), r.passed ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
      if (!r.passed) {
        ++failed;
        for (const std::string& c : r.checks) std::printf("    %s\n", c.c_str());
      }
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 2;
  }
}
