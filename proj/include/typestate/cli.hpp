// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace typestate::cli {

enum ExitStatus : int { kSuccess = 0, kRejected = 1, kUsageError = 2 };

struct CheckFlags {
  bool trace_rules = false;
  bool json = false;
  bool print_env = false;
};

struct RunFlags {
  std::size_t fuel = 1'000'000;
  bool trace = false;
  bool monitor_only = false;
  bool dump_heap = false;
  bool json = false;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
};

int cmd_check(const std::filesystem::path& path, const CheckFlags& flags, const Streams& io);
int cmd_run(const std::filesystem::path& path, const RunFlags& flags, const Streams& io);
int cmd_corpus(const std::filesystem::path& dir, const Streams& io);

/// Whether ANSI colour is on: PAPAYA_COLOR=1 forces it, 0 disables it,
/// otherwise it follows whether stderr is a terminal.
bool color_enabled();

/// Parses `args` (without the program name) and dispatches.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace typestate::cli
