// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace typestate {

/// A half-open byte range in one source file. `line`/`column` are 1-based and
/// describe `begin`; a zero line marks a synthesized node with no location.
struct SourceSpan {
  std::uint32_t file = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool synthetic() const { return line == 0; }
  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

/// One reported problem. `kind` is the machine-readable error kind
/// (e.g. `MethodNotAvailable`), `rule` the typing/reduction rule or
/// well-formedness clause that rejected the program.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string kind;
  std::string rule;
  SourceSpan span;
  std::string message;
  std::optional<std::string> object;
  std::optional<std::string> usage;
};

/// Renders `file:line:col: error: message`.
std::string format_diagnostic(const Diagnostic& diag, std::string_view file_name,
                              bool color = false);

/// A value or the diagnostics explaining why there is none.
template <class T>
struct Outcome {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  static Outcome success(T v) { return Outcome{std::move(v), {}}; }
  static Outcome failure(std::vector<Diagnostic> diags) {
    return Outcome{std::nullopt, std::move(diags)};
  }

  explicit operator bool() const { return value.has_value(); }
  T& operator*() { return *value; }
  const T& operator*() const { return *value; }
  T* operator->() { return &*value; }
  const T* operator->() const { return &*value; }
};

/// Precondition violations of the core operations (open usages, dangling
/// references and the like). These indicate misuse or a checker bug rather
/// than an ill-typed input program.
class TypestateError : public std::runtime_error {
 public:
  TypestateError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

}  // namespace typestate
