#pragma once

// Built-in kernel/coefficient pairs used by tests, benchmarks and the CLI.

#include "convhom/kernel_model.hpp"
#include "convhom/problem.hpp"

#include <string>
#include <vector>

namespace convhom {

struct Fixture {
  std::string name;
  std::string description;
  KernelSpec kernel;
  MuSpec mu;
  ProblemOptions options;
};

std::vector<std::string> fixture_names();
Fixture make_fixture(const std::string& name);

}  // namespace convhom
