#pragma once

// Command-line entry point: certify, replay, eval, contour, simulate,
// discretize, audit, taylor, builtin.

#include <string>
#include <vector>

#include "mbc/blueprint.hpp"

namespace mbc {

// exit codes: 0 success / verified, 2 not verified, 1 error
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// "zero", a single number, NAME=VALUE pairs separated by commas, or a file of NAME = VALUE lines
ThresholdFunction parse_thresholds(const Blueprint& bp, const std::string& spec);

struct ContourGrid {
  int n = 0;
  std::vector<double> t;     // midpoints, shared by both axes
  std::vector<double> ratio; // ratio[i * n + j] = s(t[i], t[j]) / c_GW
  double max = 0;
  int argmax = 0;
};

ContourGrid contour_grid(const Blueprint& bp, int n, int threads = 1);
// connected components (4-neighbour) of the grid cells above level
int superlevel_components(const ContourGrid& g, double level);

}  // namespace mbc
