// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/source.hpp"

namespace typestate {

std::string format_diagnostic(const Diagnostic& diag, std::string_view file_name, bool color) {
  const char* bold = color ? "\x1b[1m" : "";
  const char* red = color ? "\x1b[1;31m" : "";
  const char* yellow = color ? "\x1b[1;33m" : "";
  const char* reset = color ? "\x1b[0m" : "";

  std::string out = bold;
  out += file_name;
  if (!diag.span.synthetic()) {
    out += ':' + std::to_string(diag.span.line) + ':' + std::to_string(diag.span.column);
  }
  out += ": ";
  out += reset;
  if (diag.severity == Severity::Error) {
    out += red;
    out += "error";
  } else {
    out += yellow;
    out += "warning";
  }
  out += reset;
  out += ": ";
  out += diag.message;
  if (!diag.kind.empty()) out += " [" + diag.kind + "]";
  return out;
}

}  // namespace typestate
