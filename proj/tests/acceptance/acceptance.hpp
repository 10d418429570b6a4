#pragma once

#include <cstdio>
#include <string>

struct Outcome {
  bool pass = true;
  std::string detail;
};

inline std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome acceptance_formats();
