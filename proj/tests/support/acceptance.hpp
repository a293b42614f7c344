#pragma once

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Prints one line per criterion and remembers whether any failed.
class Suite {
 public:
  void check(int id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %2d  %-40s %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    failed_ |= !o.pass;
  }

  void skip(int id, const std::string& title, const std::string& why) {
    std::printf("SKIP  criterion %2d  %-40s %s\n", id, title.c_str(), why.c_str());
  }

  int exit_code() const { return failed_ ? 1 : 0; }

 private:
  bool failed_ = false;
};

inline std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

}  // namespace acceptance
