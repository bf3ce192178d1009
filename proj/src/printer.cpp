// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/printer.hpp"

#include <charconv>
#include <sstream>

#include "overloaded.hpp"

namespace typestate {

namespace {

enum class Level { Seq, Stmt, Add, Mul, Primary };

class ExprPrinter {
 public:
  explicit ExprPrinter(int indent) : indent_(indent) {}

  std::string print(const ExprPtr& e, Level level) {
    std::string body = render(*e, level);
    return body;
  }

 private:
  std::string pad(int extra = 0) const { return std::string(2 * (indent_ + extra), ' '); }

  std::string block(const ExprPtr& e) {
    ++indent_;
    std::string inner = print(e, Level::Seq);
    --indent_;
    return "{\n" + pad(1) + inner + "\n" + pad() + "}";
  }

  static Level level_of(const Expr& e) {
    return std::visit(
        detail::Overloaded{
            [](const Expr::Seq&) { return Level::Seq; },
            [](const Expr::FieldAssign&) { return Level::Stmt; },
            [](const Expr::FieldAssignNew&) { return Level::Stmt; },
            [](const Expr::If&) { return Level::Stmt; },
            [](const Expr::Match&) { return Level::Stmt; },
            [](const Expr::Labelled&) { return Level::Stmt; },
            [](const Expr::Continue&) { return Level::Stmt; },
            [](const Expr::FloatAdd&) { return Level::Add; },
            [](const Expr::FloatMul&) { return Level::Mul; },
            [](const auto&) { return Level::Primary; },
        },
        e.node);
  }

  std::string render(const Expr& e, Level want) {
    // A node binding looser than its position needs parentheses.
    if (level_of(e) < want) return "(" + render(e, Level::Seq) + ")";
    return std::visit(
        detail::Overloaded{
            [&](const Expr::Seq& s) {
              return print(s.first, Level::Stmt) + ";\n" + pad() + print(s.second, Level::Seq);
            },
            [&](const Expr::FieldAssign& a) {
              return lval(a.target, a.field) + " = " + print(a.value, Level::Stmt);
            },
            [&](const Expr::FieldAssignNew& a) {
              return lval(a.target, a.field) + " = new " + a.class_name;
            },
            [&](const Expr::If& i) {
              return "if (" + print(i.cond, Level::Seq) + ") " + block(i.then_branch) +
                     " else " + block(i.else_branch);
            },
            [&](const Expr::Match& m) {
              std::string out = "match (" + print(m.scrutinee, Level::Seq) + ") {\n";
              ++indent_;
              for (const auto& arm : m.arms) {
                ++indent_;
                std::string body = print(arm.body, Level::Seq);
                --indent_;
                out += pad() + arm.label + ": " + body + "\n";
              }
              --indent_;
              return out + pad() + "}";
            },
            [&](const Expr::Labelled& l) { return "label " + l.label + " " + block(l.body); },
            [&](const Expr::Continue& c) { return "continue " + c.label; },
            [&](const Expr::FloatAdd& a) {
              return print(a.lhs, Level::Add) + " + " + print(a.rhs, Level::Mul);
            },
            [&](const Expr::FloatMul& m) {
              return print(m.lhs, Level::Mul) + " * " + print(m.rhs, Level::Primary);
            },
            [&](const Expr::Call& c) {
              std::string arg = c.arg->is<Expr::Unit>() ? "" : print(c.arg, Level::Seq);
              return print_ref(c.receiver) + "." + c.method + "(" + arg + ")";
            },
            [&](const Expr::FieldRead& r) { return lval(r.target, r.field); },
            [](const Expr::Unit&) { return std::string("unit"); },
            [](const Expr::Null&) { return std::string("null"); },
            [](const Expr::BoolLit& b) { return std::string(b.value ? "true" : "false"); },
            [](const Expr::FloatLit& f) { return format_float(f.value); },
            [](const Expr::Param& p) { return p.name; },
            [](const Expr::Name& n) { return n.name; },
            [](const Expr::EnumLit& l) {
              if (l.owner.kind == Ref::Kind::This) return "#" + l.label;
              return print_ref(l.owner) + "." + l.label;
            },
            [](const Expr::ObjRef& o) { return to_string(o.object); },
            [](const Expr::Placeholder& p) {
              switch (p.kind) {
                case BaseKind::Void: return std::string("<void>");
                case BaseKind::Bool: return std::string("<bool>");
                case BaseKind::Float: return std::string("<float>");
                case BaseKind::Enum: return "<" + p.enum_name + ">";
              }
              return std::string("<?>");
            },
        },
        e.node);
  }

  static std::string lval(const Ref& target, const std::string& field) {
    if (target.kind == Ref::Kind::Name) return field;
    Ref r = target;
    r.field = field;
    return print_ref(r);
  }

  int indent_;
};

void print_fields(std::ostringstream& out, const std::vector<FieldDecl>& fields) {
  for (const auto& f : fields) out << "  val " << f.name << ": " << render_type(f.type) << ";\n";
}

}  // namespace

std::string format_float(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  if (s.find('.') == std::string::npos && s.find_first_of("ni") == std::string::npos) s += ".0";
  return s;
}

std::string print_ref(const Ref& r) {
  std::string base;
  switch (r.kind) {
    case Ref::Kind::This: base = "this"; break;
    case Ref::Kind::Object: base = to_string(r.object); break;
    case Ref::Kind::Param:
    case Ref::Kind::Name: base = r.name; break;
    case Ref::Kind::Value: base = r.value ? print_expr(r.value) : "?"; break;
  }
  if (r.field) base += "." + *r.field;
  return base;
}

std::string print_expr(const ExprPtr& e) { return ExprPrinter(0).print(e, Level::Seq); }

std::string print_program(const SurfaceProgram& program) {
  std::ostringstream out;
  bool first = true;
  for (const auto& decl : program.decls) {
    if (!first) out << "\n";
    first = false;
    if (const auto* e = std::get_if<EnumDecl>(&decl)) {
      out << "enum " << e->name << " { ";
      for (std::size_t i = 0; i < e->labels.size(); ++i)
        out << (i ? ", " : "") << e->labels[i];
      out << " }\n";
      continue;
    }
    const auto& c = std::get<SurfaceClass>(decl);
    out << "class " << c.name << "[" << render_usage(c.usage) << "] {\n";
    print_fields(out, c.fields);
    for (const auto& m : c.methods) {
      out << "  fun " << m.name << "(";
      if (m.param) out << m.param->name << ": " << render_type(m.param->type);
      out << ")";
      if (m.return_type) out << ": " << render_type(*m.return_type);
      out << " {\n    " << ExprPrinter(2).print(m.body, Level::Seq) << "\n  }\n";
    }
    out << "}\n";
  }
  if (!first) out << "\n";
  out << "main {\n";
  print_fields(out, program.main.fields);
  out << "  " << ExprPrinter(1).print(program.main.body, Level::Seq) << "\n}\n";
  return out.str();
}

}  // namespace typestate
