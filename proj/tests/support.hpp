// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "typestate/interpreter.hpp"
#include "typestate/typechecker.hpp"
#include "typestate/usage_lts.hpp"

namespace typestate::testing {

std::filesystem::path source_dir();
std::filesystem::path corpus_dir();
std::string read_text(const std::filesystem::path& path);

/// Compiles `text`, failing loudly (std::runtime_error) on diagnostics.
Program must_compile(const std::string& text);
Program load_program(const std::filesystem::path& path);

struct CorpusEntry {
  std::string name;
  std::filesystem::path path;
  /// First non-comment line of the .expect file.
  std::string expectation;
  /// The program compiled and type-checked.
  bool well_typed = false;
};

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir = corpus_dir());

// ---------------------------------------------------------------------------
// Subject reduction, progress, conformance.

struct ReplayReport {
  std::size_t steps = 0;
  bool reached_value = false;
  bool completed = false;
  std::vector<std::string> failures;
  /// Base rules seen, plus "ctx" when some redex sat inside a context.
  std::set<std::string> reduction_rules;
};

/// Runs a well-typed program and, at every step, replays the typing
/// environment: the label must be one env_step_check transition, the new
/// heap must be consistent with it, and the residual expression must
/// re-check (empty Theta and Omega) to the checker's final environment.
ReplayReport replay_subject_reduction(const Program& program);

// ---------------------------------------------------------------------------
// Usage oracle.

/// Closed, contractive usages of nesting depth <= `depth` over methods
/// {m, n} and labels {a, b}; choices only directly under a branch arm.
std::vector<UsagePtr> enumerate_usages(int depth);

/// Single transition by direct reading of the LTS rules; independent of
/// the library's implementation.
std::optional<UsagePtr> oracle_step(const UsagePtr& u, const UsageAction& a);
std::set<UsageAction> oracle_available(const UsagePtr& u);

/// Language equivalence of the two deterministic LTSs, explored as a
/// product graph. Usages are deterministic, so this coincides with strong
/// bisimilarity.
bool oracle_equivalent(const UsagePtr& a, const UsagePtr& b);

struct UsageOracleReport {
  std::size_t usages = 0;
  std::size_t pairs = 0;
  /// Pairs found bisimilar, excluding identical terms.
  std::size_t equivalent_pairs = 0;
  std::vector<std::string> failures;
};

UsageOracleReport run_usage_oracle(int depth = 4);

// ---------------------------------------------------------------------------
// Rule coverage.

struct Coverage {
  std::set<std::string> typing;
  std::set<std::string> reduction;
};

Coverage corpus_coverage(const std::vector<CorpusEntry>& corpus);

}  // namespace typestate::testing
