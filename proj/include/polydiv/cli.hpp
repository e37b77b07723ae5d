#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polydiv::cli {

enum Exit { Computed = 0, InputError = 1, HypothesisViolated = 2, Inconclusive = 3 };

struct RunOptions {
  std::string command;
  std::string input;
  std::string output;  // empty: standard output
  std::string format = "json";
  std::optional<std::string> weight;
  std::optional<long> box;
  long k_bound = 12;
  long window = 1;
};

const std::vector<std::string>& commands();

// threads used by commands that sweep over many weights; PDIV_THREADS, else the hardware count
unsigned thread_count();

int run(const RunOptions& options, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace polydiv::cli
