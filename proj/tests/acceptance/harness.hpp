#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cepfield/grid.hpp"

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double time_limit = 0.0;  // seconds; 0 = none
  std::function<Outcome()> run;
};

/// Runs each criterion, prints one line per criterion and returns the
/// number of failures. A criterion over its time limit fails.
inline int run_all(const std::vector<Criterion>& criteria, const std::vector<std::string>& only) {
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += " [over time limit " + std::to_string(static_cast<int>(c.time_limit)) + " s]";
    }
    std::printf("criterion %-3s %s  %s: %s (%.1f s)\n", c.id.c_str(), o.pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}

/// Index of each vec-ordered display entry theta_i in the canonical free
/// ordering of a full grid.
inline std::vector<Eigen::Index> vec_to_canonical(const cepfield::CepstralGrid& g) {
  const std::vector<cepfield::Lag> free = g.free_positions();
  std::vector<Eigen::Index> out;
  for (cepfield::Lag l : cepfield::vec_positions(g.order())) {
    if (!cepfield::is_canonical(l)) l = {-l.j, -l.k};
    out.push_back(static_cast<Eigen::Index>(std::find(free.begin(), free.end(), l) - free.begin()));
  }
  return out;
}

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

}  // namespace acceptance
