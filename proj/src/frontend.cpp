// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/frontend.hpp"

#include "typestate/desugar.hpp"
#include "typestate/parser.hpp"
#include "typestate/wellformed.hpp"

namespace typestate {

Outcome<Program> compile(std::string_view text, std::uint32_t file_id) {
  auto surface = parse(text, file_id);
  if (!surface) return Outcome<Program>::failure(std::move(surface.diagnostics));
  auto program = desugar(*surface);
  if (!program) return program;
  if (auto diags = validate_program(*program); !diags.empty())
    return Outcome<Program>::failure(std::move(diags));
  if (auto diags = well_formed_program(*program); !diags.empty())
    return Outcome<Program>::failure(std::move(diags));
  return program;
}

}  // namespace typestate
