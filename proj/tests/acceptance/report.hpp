#pragma once

#include <cstdio>
#include <string>

namespace srlab::acceptance {

/// One PASS/FAIL line per criterion; the exit status is nonzero if any failed.
class Report {
 public:
  void line(int criterion, bool pass, const std::string& what) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    failed_ |= !pass;
  }
  [[nodiscard]] int exit_code() const { return failed_ ? 1 : 0; }

 private:
  bool failed_ = false;
};

inline constexpr int kSkip = 77;

}  // namespace srlab::acceptance
