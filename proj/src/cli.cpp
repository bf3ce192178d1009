// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "typestate/frontend.hpp"
#include "typestate/interpreter.hpp"
#include "typestate/typechecker.hpp"

namespace typestate::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

ordered_json diagnostic_json(const Diagnostic& d, const std::string& file) {
  ordered_json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["rule"] = d.rule;
  j["kind"] = d.kind;
  j["span"] = {{"file", file}, {"line", d.span.line}, {"col", d.span.column}};
  j["message"] = d.message;
  if (d.object) j["object"] = *d.object;
  if (d.usage) j["usage"] = *d.usage;
  return j;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& file,
                       const Streams& io) {
  for (const auto& d : diags) {
    io.err << format_diagnostic(d, file, io.color) << "\n";
    if (d.object) {
      io.err << "  note: object " << *d.object;
      if (d.usage) io.err << " has usage " << *d.usage;
      io.err << "\n";
    }
  }
}

bool is_parse_failure(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.rule == "parse"; });
}

Diagnostic io_error(const fs::path& path) {
  Diagnostic d;
  d.kind = "IOError";
  d.rule = "io";
  d.message = "cannot read '" + path.string() + "'";
  return d;
}

/// Result of loading, compiling and (optionally) type-checking one file.
struct Loaded {
  std::optional<Program> program;
  std::optional<CheckReport> report;
  std::vector<Diagnostic> diagnostics;
  int status = kSuccess;
};

Loaded load(const fs::path& path, bool typecheck, const CheckOptions& options) {
  Loaded l;
  auto text = read_file(path);
  if (!text) {
    l.diagnostics.push_back(io_error(path));
    l.status = kUsageError;
    return l;
  }
  auto program = compile(*text);
  if (!program) {
    l.status = is_parse_failure(program.diagnostics) ? kUsageError : kRejected;
    l.diagnostics = std::move(program.diagnostics);
    return l;
  }
  l.program = std::move(*program);
  if (!typecheck) return l;
  auto report = check_program(*l.program, options);
  if (!report) {
    l.status = kRejected;
    l.diagnostics = std::move(report.diagnostics);
    return l;
  }
  l.report = std::move(*report);
  return l;
}

std::string label_text(const EnvLabel& l) { return render_label(l); }

std::vector<std::string> non_eps_labels(const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& t : r.trace)
    if (t.label.kind != EnvLabel::Kind::Eps) out.push_back(label_text(t.label));
  return out;
}

}  // namespace

bool color_enabled() {
  if (const char* v = std::getenv("PAPAYA_COLOR")) return std::string(v) == "1";
  return isatty(STDERR_FILENO) != 0;
}

int cmd_check(const fs::path& path, const CheckFlags& flags, const Streams& io) {
  const std::string file = path.string();
  CheckOptions options;
  options.trace = flags.trace_rules;
  Loaded l = load(path, true, options);

  if (flags.json) {
    ordered_json j;
    j["file"] = file;
    j["accepted"] = l.status == kSuccess;
    j["diagnostics"] = ordered_json::array();
    for (const auto& d : l.diagnostics) j["diagnostics"].push_back(diagnostic_json(d, file));
    if (l.report && flags.print_env) j["env"] = render_env(l.report->final_env);
    if (l.report && flags.trace_rules) {
      j["rules"] = ordered_json::array();
      for (const auto& e : l.report->trace)
        j["rules"].push_back({{"rule", e.rule}, {"line", e.span.line}, {"col", e.span.column}});
    }
    io.out << j.dump() << "\n";
    return l.status;
  }

  print_diagnostics(l.diagnostics, file, io);
  if (!l.report) return l.status;
  if (flags.trace_rules) {
    for (const auto& e : l.report->trace)
      io.out << e.rule << " " << e.span.line << ":" << e.span.column << "\n";
  }
  if (flags.print_env) io.out << render_env(l.report->final_env) << "\n";
  io.out << file << ": ok\n";
  return kSuccess;
}

int cmd_run(const fs::path& path, const RunFlags& flags, const Streams& io) {
  const std::string file = path.string();
  Loaded l = load(path, !flags.monitor_only, {});
  if (!l.program) {
    print_diagnostics(l.diagnostics, file, io);
    return l.status;
  }
  if (l.status != kSuccess) {
    print_diagnostics(l.diagnostics, file, io);
    return l.status;
  }

  RunOptions options;
  options.fuel = flags.fuel;
  RunResult r = run(*l.program, options);

  if (flags.trace) {
    for (const auto& t : r.trace) {
      ordered_json j;
      j["step"] = t.step;
      j["label"] = label_text(t.label);
      j["rule"] = t.rule;
      io.out << j.dump() << "\n";
    }
  }
  if (flags.dump_heap) io.out << render_heap(r.final.heap);
  if (r.error) {
    if (flags.json)
      io.err << diagnostic_json(*r.error, file).dump() << "\n";
    else
      print_diagnostics({*r.error}, file, io);
    return kRejected;
  }
  return kSuccess;
}

namespace {

struct Expectation {
  enum class Kind { Accept, Reject, Run } kind = Kind::Accept;
  std::string arg;
};

std::optional<Expectation> parse_expectation(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    line.erase(line.find_last_not_of(" \t\r") + 1);
    auto arg_of = [&](std::size_t n) {
      std::string a = line.substr(n);
      a.erase(0, a.find_first_not_of(" \t"));
      return a;
    };
    if (line == "accept") return Expectation{Expectation::Kind::Accept, {}};
    if (line.rfind("reject:", 0) == 0) return Expectation{Expectation::Kind::Reject, arg_of(7)};
    if (line.rfind("run:", 0) == 0) return Expectation{Expectation::Kind::Run, arg_of(4)};
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<std::string> read_trace_file(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

/// Evaluates one corpus entry; returns an empty string on success or the
/// reason for the mismatch.
std::string evaluate_entry(const fs::path& pap, const Expectation& e, const fs::path& dir) {
  Loaded l = load(pap, true, {});
  switch (e.kind) {
    case Expectation::Kind::Accept:
      if (l.status == kSuccess) return {};
      return "rejected: " + (l.diagnostics.empty() ? std::string("?") : l.diagnostics.front().kind);
    case Expectation::Kind::Reject: {
      if (l.status == kSuccess) return "accepted, expected " + e.arg;
      for (const auto& d : l.diagnostics)
        if (d.kind == e.arg) return {};
      return "rejected with " + l.diagnostics.front().kind + ", expected " + e.arg;
    }
    case Expectation::Kind::Run: {
      if (l.status != kSuccess)
        return "rejected: " + (l.diagnostics.empty() ? std::string("?") : l.diagnostics.front().kind);
      auto text = read_file(dir / e.arg);
      if (!text) return "cannot read trace file " + e.arg;
      RunResult r = run(*l.program);
      if (r.error) return "run failed: " + r.error->kind;
      if (non_eps_labels(r) != read_trace_file(*text)) return "trace differs from " + e.arg;
      return {};
    }
  }
  return "unknown expectation";
}

}  // namespace

int cmd_corpus(const fs::path& dir, const Streams& io) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    io.err << "papaya: '" << dir.string() << "' is not a directory\n";
    return kUsageError;
  }
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".pap") entries.push_back(entry.path());
  std::sort(entries.begin(), entries.end());

  std::size_t passed = 0;
  std::size_t width = 8;
  for (const auto& p : entries) width = std::max(width, p.filename().string().size());
  for (const auto& pap : entries) {
    fs::path expect_path = pap;
    expect_path.replace_extension(".expect");
    std::string expectation = "?";
    std::string failure;
    if (auto text = read_file(expect_path)) {
      if (auto e = parse_expectation(*text)) {
        expectation = e->kind == Expectation::Kind::Accept ? "accept"
                      : e->kind == Expectation::Kind::Reject ? "reject: " + e->arg
                                                             : "run: " + e->arg;
        failure = evaluate_entry(pap, *e, dir);
      } else {
        failure = "malformed " + expect_path.filename().string();
      }
    } else {
      failure = "missing " + expect_path.filename().string();
    }
    if (failure.empty()) ++passed;
    io.out << std::left << std::setw(static_cast<int>(width) + 2) << pap.filename().string()
           << std::setw(36) << expectation << (failure.empty() ? "PASS" : "FAIL");
    if (!failure.empty()) io.out << "  " << failure;
    io.out << "\n";
  }
  io.out << passed << "/" << entries.size() << " passed\n";
  return passed == entries.size() ? kSuccess : kRejected;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Typestate checker and interpreter for an object calculus with aliasing", "papaya"};
  app.require_subcommand(1);

  std::string path;
  CheckFlags check_flags;
  auto* check = app.add_subcommand("check", "Type-check a program");
  check->add_option("path", path, "Source file")->required();
  check->add_flag("--trace-rules", check_flags.trace_rules, "Print every applied typing rule");
  check->add_flag("--json", check_flags.json, "Emit structured output");
  check->add_flag("--print-env", check_flags.print_env, "Print the final typing environment");

  RunFlags run_flags;
  auto* runc = app.add_subcommand("run", "Type-check and execute a program");
  runc->add_option("path", path, "Source file")->required();
  runc->add_option("--fuel", run_flags.fuel, "Maximum number of reduction steps")
      ->check(CLI::PositiveNumber);
  runc->add_flag("--trace", run_flags.trace, "Emit one JSON record per step");
  runc->add_flag("--monitor-only", run_flags.monitor_only,
                 "Skip type checking and rely on the run-time monitor");
  runc->add_flag("--dump-heap", run_flags.dump_heap, "Print the final heap");
  runc->add_flag("--json", run_flags.json, "Emit errors as JSON");

  auto* corpus = app.add_subcommand("corpus", "Run a directory of programs against .expect files");
  corpus->add_option("dir", path, "Corpus directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "papaya: " << e.what() << "\n";
    return kUsageError;
  }

  Streams io{out, err, color_enabled()};
  try {
    if (*check) return cmd_check(path, check_flags, io);
    if (*runc) return cmd_run(path, run_flags, io);
    return cmd_corpus(path, io);
  } catch (const std::exception& e) {
    err << "papaya: internal error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace typestate::cli
