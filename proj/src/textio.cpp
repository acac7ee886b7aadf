// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/textio.h"

#include "apex/infer.h"

#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "json.hpp"

namespace apex::textio {

namespace {

/// Untyped s-expression, the intermediate form for both directions.
struct Sx {
  bool isList = false;
  std::string atom;
  std::vector<Sx> items;
  SourceSpan span;

  bool isInt() const {
    return !isList && !atom.empty() &&
           std::all_of(atom.begin(), atom.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  }
  bool isSymbol() const { return !isList && !isInt(); }
};

Sx atomSx(std::string text) {
  Sx s;
  s.atom = std::move(text);
  return s;
}

Sx intSx(int64_t v) { return atomSx(std::to_string(v)); }

Sx listSx(std::vector<Sx> items) {
  Sx s;
  s.isList = true;
  s.items = std::move(items);
  return s;
}

Sx dimsSx(std::string_view head, const Dims &dims) {
  std::vector<Sx> items{atomSx(std::string(head))};
  for (int64_t d : dims)
    items.push_back(intSx(d));
  return listSx(std::move(items));
}

//===----------------------------------------------------------------------===//
// Reader
//===----------------------------------------------------------------------===//

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Sx> readAll() {
    std::vector<Sx> forms;
    skipTrivia();
    while (pos_ < text_.size()) {
      forms.push_back(readForm());
      skipTrivia();
    }
    return forms;
  }

private:
  SourceSpan here() const { return {pos_, pos_, line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skipTrivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Sx readForm() {
    SourceSpan start = here();
    char c = text_[pos_];
    if (c == ')') {
      start.end = pos_ + 1;
      throw ParseError(ErrorKind::SyntaxError, start, "unexpected ')'");
    }
    if (c != '(') {
      Sx atom;
      while (pos_ < text_.size()) {
        char a = text_[pos_];
        if (a == '(' || a == ')' || a == ';' ||
            std::isspace(static_cast<unsigned char>(a)))
          break;
        atom.atom.push_back(a);
        advance();
      }
      start.end = pos_;
      atom.span = start;
      return atom;
    }
    advance();
    Sx list;
    list.isList = true;
    while (true) {
      skipTrivia();
      if (pos_ >= text_.size()) {
        start.end = text_.size();
        throw ParseError(ErrorKind::SyntaxError, start,
                         "unclosed form: missing ')'");
      }
      if (text_[pos_] == ')') {
        advance();
        break;
      }
      list.items.push_back(readForm());
    }
    start.end = pos_;
    list.span = start;
    return list;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

//===----------------------------------------------------------------------===//
// Elaboration: Sx -> Expr
//===----------------------------------------------------------------------===//

class Elaborator {
public:
  explicit Elaborator(const std::map<std::string, Dims> &vars) : vars_(vars) {}

  Expr expr(const Sx &s) {
    if (!s.isList) {
      if (s.isInt())
        throw ParseError(ErrorKind::SyntaxError, s.span,
                         "expected an expression, found integer " + s.atom);
      auto it = vars_.find(s.atom);
      if (it == vars_.end())
        throw ParseError(ErrorKind::UndeclaredVariable, s.span,
                         "undeclared variable '" + s.atom + "'");
      return var(s.atom, it->second);
    }
    if (s.items.empty() || !s.items[0].isSymbol())
      throw ParseError(ErrorKind::SyntaxError, s.span,
                       "expected a form head symbol");
    const std::string &head = s.items[0].atom;
    try {
      return form(head, s);
    } catch (const ParseError &) {
      throw;
    } catch (const Error &err) {
      throw ParseError(err.kind(), s.span, err.what());
    }
  }

  Dims shapeList(const Sx &s, std::string_view head) {
    if (!s.isList || s.items.empty() || s.items[0].atom != head)
      throw ParseError(ErrorKind::SyntaxError, s.span,
                       "expected (" + std::string(head) + " ...)");
    Dims dims;
    for (size_t i = 1; i < s.items.size(); ++i)
      dims.push_back(integer(s.items[i]));
    return dims;
  }

private:
  int64_t integer(const Sx &s) {
    if (!s.isInt())
      throw ParseError(ErrorKind::SyntaxError, s.span,
                       "expected a non-negative integer");
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.atom.data(), s.atom.data() + s.atom.size(), v);
    if (ec != std::errc() || ptr != s.atom.data() + s.atom.size())
      throw ParseError(ErrorKind::SyntaxError, s.span,
                       "integer out of range: " + s.atom);
    return v;
  }

  void arity(const Sx &s, size_t n) {
    if (s.items.size() != n + 1)
      throw ParseError(ErrorKind::ArityError, s.span,
                       "(" + s.items[0].atom + " ...) expects " +
                           std::to_string(n) + " operands, got " +
                           std::to_string(s.items.size() - 1));
  }

  AccessPatternShape reshapeShape(const Sx &s) {
    if (s.isList && !s.items.empty() && s.items[0].atom == "shape-of") {
      arity(s, 1);
      return inferShape(expr(s.items[1]));
    }
    if (!s.isList || s.items.size() != 3 || s.items[0].atom != "shape-pair")
      throw ParseError(ErrorKind::SyntaxError, s.span,
                       "expected (shape-pair (shape ...) (shape ...)) or "
                       "(shape-of e)");
    return AccessPatternShape(shapeList(s.items[1], "shape"),
                              shapeList(s.items[2], "shape"));
  }

  Expr form(const std::string &head, const Sx &s) {
    const auto &it = s.items;
    if (head == "access") {
      arity(s, 2);
      return access(expr(it[1]), integer(it[2]));
    }
    if (head == "transpose") {
      arity(s, 2);
      return transpose(expr(it[1]), shapeList(it[2], "list"));
    }
    if (head == "cartProd" || head == "cartesian-product") {
      arity(s, 2);
      return cartProd(expr(it[1]), expr(it[2]));
    }
    if (head == "windows") {
      arity(s, 3);
      return windows(expr(it[1]), shapeList(it[2], "shape"),
                     shapeList(it[3], "shape"));
    }
    if (head == "slice") {
      arity(s, 4);
      return slice(expr(it[1]), integer(it[2]), integer(it[3]), integer(it[4]));
    }
    if (head == "squeeze") {
      arity(s, 2);
      return squeeze(expr(it[1]), integer(it[2]));
    }
    if (head == "flatten") {
      arity(s, 1);
      return flatten(expr(it[1]));
    }
    if (head == "reshape") {
      arity(s, 2);
      return reshape(expr(it[1]), reshapeShape(it[2]));
    }
    if (head == "pair") {
      arity(s, 2);
      return pair(expr(it[1]), expr(it[2]));
    }
    if (head == "concat") {
      arity(s, 3);
      return concat(expr(it[1]), expr(it[2]), integer(it[3]));
    }
    if (head == "compute") {
      arity(s, 2);
      auto op = it[1].isSymbol() ? operatorFromName(it[1].atom) : std::nullopt;
      if (!op)
        throw ParseError(ErrorKind::UnknownForm, it[1].span,
                         "unknown operator '" + it[1].atom + "'");
      return compute(*op, expr(it[2]));
    }
    if (head == "dense") {
      arity(s, 2);
      return dense(expr(it[1]), expr(it[2]));
    }
    if (head == "bias_add") {
      arity(s, 2);
      return biasAdd(expr(it[1]), expr(it[2]));
    }
    if (head == "add") {
      arity(s, 2);
      return add(expr(it[1]), expr(it[2]));
    }
    if (head == "reshape_op") {
      arity(s, 2);
      return reshapeOp(expr(it[1]), shapeList(it[2], "shape"));
    }
    if (head == "flatten_op") {
      arity(s, 1);
      return flattenOp(expr(it[1]));
    }
    if (head == "systolicArray") {
      arity(s, 4);
      return systolicArray(integer(it[1]), integer(it[2]), expr(it[3]),
                           expr(it[4]));
    }
    if (head == "vta-dense") {
      arity(s, 2);
      return vtaDense(expr(it[1]), expr(it[2]));
    }
    if (head == "hlscnn-conv2d") {
      arity(s, 5);
      return hlscnnConv2d(expr(it[1]), expr(it[2]), integer(it[3]),
                          integer(it[4]), integer(it[5]));
    }
    throw ParseError(ErrorKind::UnknownForm, it[0].span,
                     "unknown form '" + head + "'");
  }

  const std::map<std::string, Dims> &vars_;
};

//===----------------------------------------------------------------------===//
// Printer: Expr -> Sx -> text
//===----------------------------------------------------------------------===//

Sx toSx(const Expr &e) {
  const Dims &a = e.attrs();
  auto head = atomSx(std::string(nodeKindName(e.kind())));
  auto kid = [&e](size_t i) { return toSx(e.child(i)); };
  switch (e.kind()) {
  case NodeKind::Var:
    return atomSx(e.name());
  case NodeKind::Access:
  case NodeKind::Squeeze:
    return listSx({head, kid(0), intSx(a[0])});
  case NodeKind::Transpose:
    return listSx({head, kid(0), dimsSx("list", a)});
  case NodeKind::Windows:
    return listSx({head, kid(0), dimsSx("shape", windowsWindow(a)),
                   dimsSx("shape", windowsStrides(a))});
  case NodeKind::Slice:
    return listSx({head, kid(0), intSx(a[0]), intSx(a[1]), intSx(a[2])});
  case NodeKind::Reshape: {
    AccessPatternShape target = reshapeTarget(a);
    return listSx({head, kid(0),
                   listSx({atomSx("shape-pair"), dimsSx("shape", target.access),
                           dimsSx("shape", target.compute)})});
  }
  case NodeKind::Concat:
    return listSx({head, kid(0), kid(1), intSx(a[0])});
  case NodeKind::Compute:
    return listSx(
        {head, atomSx(std::string(operatorName(static_cast<OperatorKind>(a[0])))),
         kid(0)});
  case NodeKind::ReshapeOp:
    return listSx({head, kid(0), dimsSx("shape", a)});
  case NodeKind::SystolicArray:
    return listSx({head, intSx(a[0]), intSx(a[1]), kid(0), kid(1)});
  case NodeKind::HlscnnConv2d:
    return listSx({head, kid(0), kid(1), intSx(a[0]), intSx(a[1]), intSx(a[2])});
  default: {
    std::vector<Sx> items{head};
    for (size_t i = 0; i < e.children().size(); ++i)
      items.push_back(kid(i));
    return listSx(std::move(items));
  }
  }
}

int depth(const Sx &s) {
  if (!s.isList)
    return 0;
  int d = 0;
  for (const Sx &c : s.items)
    d = std::max(d, depth(c));
  return d + 1;
}

void writeFlat(const Sx &s, std::string &out) {
  if (!s.isList) {
    out += s.atom;
    return;
  }
  out += '(';
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i)
      out += ' ';
    writeFlat(s.items[i], out);
  }
  out += ')';
}

void write(const Sx &s, int indent, std::string &out) {
  constexpr int kMaxFlatDepth = 3;
  if (!s.isList || depth(s) <= kMaxFlatDepth) {
    writeFlat(s, out);
    return;
  }
  out += '(';
  size_t i = 0;
  // Head plus any leading atoms share the opening line.
  for (; i < s.items.size() && !s.items[i].isList; ++i) {
    if (i)
      out += ' ';
    out += s.items[i].atom;
  }
  const std::string pad(indent + 2, ' ');
  while (i < s.items.size()) {
    out += '\n';
    out += pad;
    if (s.items[i].isList) {
      write(s.items[i], indent + 2, out);
      ++i;
      continue;
    }
    for (bool first = true; i < s.items.size() && !s.items[i].isList; ++i) {
      if (!first)
        out += ' ';
      out += s.items[i].atom;
      first = false;
    }
  }
  out += ')';
}

nlohmann::ordered_json toJson(const Expr &e) {
  nlohmann::ordered_json j;
  const Dims &a = e.attrs();
  if (e.kind() == NodeKind::Var) {
    j["var"] = e.name();
    j["shape"] = a;
    return j;
  }
  j["op"] = nodeKindName(e.kind());
  switch (e.kind()) {
  case NodeKind::Access:
    j["access_dims"] = a[0];
    break;
  case NodeKind::Transpose:
    j["perm"] = a;
    break;
  case NodeKind::Windows:
    j["window"] = windowsWindow(a);
    j["strides"] = windowsStrides(a);
    break;
  case NodeKind::Slice:
    j["dim"] = a[0];
    j["lo"] = a[1];
    j["hi"] = a[2];
    break;
  case NodeKind::Squeeze:
  case NodeKind::Concat:
    j["dim"] = a[0];
    break;
  case NodeKind::Reshape: {
    AccessPatternShape t = reshapeTarget(a);
    j["target"] = {{"access", t.access}, {"compute", t.compute}};
    break;
  }
  case NodeKind::Compute:
    j["operator"] = operatorName(static_cast<OperatorKind>(a[0]));
    break;
  case NodeKind::ReshapeOp:
    j["target"] = a;
    break;
  case NodeKind::SystolicArray:
    j["rows"] = a[0];
    j["cols"] = a[1];
    break;
  case NodeKind::HlscnnConv2d:
    j["strides"] = Dims{a[0], a[1]};
    j["group"] = a[2];
    break;
  default:
    break;
  }
  nlohmann::ordered_json args = nlohmann::ordered_json::array();
  for (const Expr &c : e.children())
    args.push_back(toJson(c));
  j["args"] = std::move(args);
  return j;
}

} // namespace

Program parse(std::string_view text) {
  std::vector<Sx> forms = Reader(text).readAll();
  Program program;
  std::map<std::string, Dims> declared;
  const Sx *body = nullptr;
  for (const Sx &f : forms) {
    if (f.isList && !f.items.empty() && f.items[0].atom == "var") {
      if (f.items.size() != 3 || !f.items[1].isSymbol())
        throw ParseError(ErrorKind::ArityError, f.span,
                         "expected (var NAME (shape d...))");
      const std::string &name = f.items[1].atom;
      if (declared.count(name))
        throw ParseError(ErrorKind::SyntaxError, f.items[1].span,
                         "variable '" + name + "' declared twice");
      Elaborator shapes(declared);
      Dims dims = shapes.shapeList(f.items[2], "shape");
      for (int64_t d : dims)
        if (d < 1)
          throw ParseError(ErrorKind::InvalidAttribute, f.items[2].span,
                           "variable dimensions must be positive");
      declared.emplace(name, dims);
      program.vars.emplace_back(name, dims);
      continue;
    }
    if (body)
      throw ParseError(ErrorKind::SyntaxError, f.span,
                       "a program holds exactly one expression");
    body = &f;
  }
  if (!body) {
    SourceSpan end{text.size(), text.size(), 1, 1};
    for (char c : text) {
      if (c == '\n') {
        ++end.line;
        end.column = 1;
      } else {
        ++end.column;
      }
    }
    throw ParseError(ErrorKind::SyntaxError, end, "program has no expression");
  }
  Elaborator elaborator(declared);
  program.expr = elaborator.expr(*body);
  return program;
}

std::string print(const Expr &e) {
  std::string out;
  write(toSx(e), 0, out);
  return out;
}

std::string printProgram(const Program &p) {
  std::string out;
  for (const auto &[name, dims] : p.vars) {
    out += "(var " + name + " ";
    writeFlat(dimsSx("shape", dims), out);
    out += ")\n";
  }
  out += print(p.expr);
  out += '\n';
  return out;
}

std::string printProgram(const Expr &e) {
  return printProgram(Program{freeVars(e), e});
}

std::string printJson(const Expr &e) { return toJson(e).dump(2); }

std::string printJson(const Program &p) {
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (const auto &[name, dims] : p.vars)
    vars.push_back({{"name", name}, {"shape", dims}});
  nlohmann::ordered_json j;
  j["vars"] = std::move(vars);
  j["expr"] = toJson(p.expr);
  return j.dump(2);
}

std::string formatDiagnostic(std::string_view file, const ParseError &err) {
  std::ostringstream os;
  os << file << ':' << err.span().line << ':' << err.span().column
     << ": error: " << err.what();
  return os.str();
}

} // namespace apex::textio
