"""Surface language: s-expression parser, gradual typechecker, elaborator.

Grammar (file extension .gtlc, UTF-8, `;` line comments):

    e ::= INT | #t | #f | true | false | x
        | (lambda (x : T) e)        function, annotated parameter
        | (e e)                     application
        | (pair e e) | (fst e) | (snd e)
        | (succ e) | (prev e) | (zero? e)
        | (ref T e)                 allocation at cell type T
        | (! e)                     dereference
        | (:= e e)                  assignment; its value is the value written
        | (cast e T)
        | (let (x e) e)
        | (begin e e ...)           sequencing, folds to the right

    T ::= int | bool | dyn
        | (-> T T) | (pair-ty T T) | (ref-ty T)

`(× T T)` is accepted for pair types and `(ref T)` for reference types.
Identifiers starting with `$` are reserved for generated temporaries.

Typechecking is consistency-based: `dyn` is consistent with everything,
other types structurally with themselves. Elaboration lowers to the
statement IR, inserting a cast at every boundary the checker accepted by
consistency rather than equality, and picking the plain dereference and
update forms exactly when the reference's cell type is static.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .lang import (
    BOOL,
    DYN,
    INT,
    ArrowT,
    BoolC,
    BoolT,
    Const,
    Deref,
    DynT,
    EConst,
    Expr,
    Fst,
    IntC,
    IntT,
    IsZero,
    Lam,
    MkPair,
    PairT,
    Prev,
    PrimApp,
    RefT,
    SAlloc,
    SCall,
    SCast,
    SDynDeref,
    SDynUpdate,
    SLet,
    SRet,
    STailCall,
    SUpdate,
    Snd,
    Stmt,
    Succ,
    Ty,
    Var,
    is_static,
    typeof_const,
)
from .typecheck import TypeCheckError

Pos = tuple  # (line, column), 1-based


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Surface syntax

class SurfExpr:
    pass


@dataclass(frozen=True)
class Lit(SurfExpr):
    const: Const
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SVar(SurfExpr):
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SLambda(SurfExpr):
    param: str
    ann: Ty
    body: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SApp(SurfExpr):
    fn: SurfExpr
    arg: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SPair(SurfExpr):
    fst: SurfExpr
    snd: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SFst(SurfExpr):
    pair: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SSnd(SurfExpr):
    pair: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SPrim(SurfExpr):
    op: str  # "succ" | "prev" | "zero?"
    arg: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SRefNew(SurfExpr):
    cell_ty: Ty
    init: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SDeref(SurfExpr):
    ref: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SAssign(SurfExpr):
    target: SurfExpr
    value: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SCastE(SurfExpr):
    expr: SurfExpr
    ty: Ty
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SLetE(SurfExpr):
    name: str
    rhs: SurfExpr
    body: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SBegin(SurfExpr):
    first: SurfExpr
    second: SurfExpr
    pos: Pos = field(default=(0, 0), compare=False)


# ---------------------------------------------------------------------------
# Reader

@dataclass(frozen=True)
class _Atom:
    text: str
    pos: Pos


@dataclass(frozen=True)
class _List:
    items: tuple
    pos: Pos


_INT_RE = re.compile(r"-?\d+\Z")

_KEYWORDS = {
    "lambda", "let", "begin", "ref", "!", ":=", "cast", "pair", "fst", "snd",
    "succ", "prev", "zero?", "int", "bool", "dyn", "->", "pair-ty", "ref-ty",
    "×", ":", "#t", "#f", "true", "false",
}


def _tokenize(text: str):
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        col = 0
        while col < len(line):
            ch = line[col]
            if ch == ";":
                break
            if ch.isspace():
                col += 1
                continue
            if ch in "()":
                tokens.append((ch, (lineno, col + 1)))
                col += 1
                continue
            start = col
            while col < len(line) and not line[col].isspace() \
                    and line[col] not in "();":
                col += 1
            tokens.append((line[start:col], (lineno, start + 1)))
    return tokens


def _read(tokens, i):
    if i >= len(tokens):
        raise ParseError("unexpected end of input", 0, 0)
    text, pos = tokens[i]
    if text == "(":
        items = []
        i += 1
        while True:
            if i >= len(tokens):
                raise ParseError("unclosed parenthesis", pos[0], pos[1])
            if tokens[i][0] == ")":
                return _List(tuple(items), pos), i + 1
            item, i = _read(tokens, i)
            items.append(item)
    if text == ")":
        raise ParseError("unexpected ')'", pos[0], pos[1])
    return _Atom(text, pos), i + 1


def _fail(sx, message: str):
    raise ParseError(message, sx.pos[0], sx.pos[1])


def _type(sx) -> Ty:
    if isinstance(sx, _Atom):
        if sx.text == "int":
            return INT
        if sx.text == "bool":
            return BOOL
        if sx.text == "dyn":
            return DYN
        _fail(sx, f"unknown type {sx.text!r}")
    items = sx.items
    if not items or not isinstance(items[0], _Atom):
        _fail(sx, "malformed type")
    head = items[0].text
    if head == "->" and len(items) == 3:
        return ArrowT(_type(items[1]), _type(items[2]))
    if head in ("pair-ty", "×") and len(items) == 3:
        return PairT(_type(items[1]), _type(items[2]))
    if head in ("ref-ty", "ref") and len(items) == 2:
        return RefT(_type(items[1]))
    _fail(sx, f"malformed type starting with {head!r}")


def _name(sx) -> str:
    if not isinstance(sx, _Atom):
        _fail(sx, "expected an identifier")
    text = sx.text
    if text in _KEYWORDS:
        _fail(sx, f"keyword {text!r} used as an identifier")
    if _INT_RE.match(text) or text.startswith("#"):
        _fail(sx, f"{text!r} is not an identifier")
    if text.startswith("$"):
        _fail(sx, "identifiers starting with '$' are reserved")
    return text


def _expr(sx) -> SurfExpr:
    if isinstance(sx, _Atom):
        text = sx.text
        if _INT_RE.match(text):
            return Lit(IntC(int(text)), sx.pos)
        if text in ("#t", "true"):
            return Lit(BoolC(True), sx.pos)
        if text in ("#f", "false"):
            return Lit(BoolC(False), sx.pos)
        return SVar(_name(sx), sx.pos)
    items = sx.items
    if not items:
        _fail(sx, "empty application")
    head = items[0]
    if isinstance(head, _Atom):
        kw = head.text
        if kw == "lambda":
            if len(items) != 3 or not isinstance(items[1], _List):
                _fail(sx, "expected (lambda (x : T) body)")
            params = items[1].items
            if len(params) == 3 and isinstance(params[1], _Atom) \
                    and params[1].text == ":":
                param, ann = _name(params[0]), _type(params[2])
            elif len(params) == 2:
                param, ann = _name(params[0]), _type(params[1])
            else:
                _fail(items[1], "expected (x : T)")
            return SLambda(param, ann, _expr(items[2]), sx.pos)
        if kw == "let":
            if len(items) != 3 or not isinstance(items[1], _List) \
                    or len(items[1].items) != 2:
                _fail(sx, "expected (let (x e) body)")
            binding = items[1].items
            return SLetE(_name(binding[0]), _expr(binding[1]),
                         _expr(items[2]), sx.pos)
        if kw == "begin":
            if len(items) < 3:
                _fail(sx, "begin needs at least two expressions")
            exprs = [_expr(item) for item in items[1:]]
            result = exprs[-1]
            for e in reversed(exprs[:-1]):
                result = SBegin(e, result, sx.pos)
            return result
        if kw == "ref":
            if len(items) != 3:
                _fail(sx, "expected (ref T e)")
            return SRefNew(_type(items[1]), _expr(items[2]), sx.pos)
        if kw == "!":
            if len(items) != 2:
                _fail(sx, "expected (! e)")
            return SDeref(_expr(items[1]), sx.pos)
        if kw == ":=":
            if len(items) != 3:
                _fail(sx, "expected (:= target value)")
            return SAssign(_expr(items[1]), _expr(items[2]), sx.pos)
        if kw == "cast":
            if len(items) != 3:
                _fail(sx, "expected (cast e T)")
            return SCastE(_expr(items[1]), _type(items[2]), sx.pos)
        if kw == "pair":
            if len(items) != 3:
                _fail(sx, "expected (pair e e)")
            return SPair(_expr(items[1]), _expr(items[2]), sx.pos)
        if kw == "fst":
            if len(items) != 2:
                _fail(sx, "expected (fst e)")
            return SFst(_expr(items[1]), sx.pos)
        if kw == "snd":
            if len(items) != 2:
                _fail(sx, "expected (snd e)")
            return SSnd(_expr(items[1]), sx.pos)
        if kw in ("succ", "prev", "zero?"):
            if len(items) != 2:
                _fail(sx, f"expected ({kw} e)")
            return SPrim(kw, _expr(items[1]), sx.pos)
    if len(items) != 2:
        _fail(sx, "application expects exactly one argument")
    return SApp(_expr(items[0]), _expr(items[1]), sx.pos)


def parse_surface(text: str) -> SurfExpr:
    """Parse one surface program; positions are retained for diagnostics."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 1, 1)
    sx, i = _read(tokens, 0)
    if i != len(tokens):
        extra, pos = tokens[i]
        raise ParseError(f"unexpected trailing input {extra!r}", pos[0], pos[1])
    return _expr(sx)


# ---------------------------------------------------------------------------
# Consistency-based typechecking

def consistent(a: Ty, b: Ty) -> bool:
    """Standard gradual-typing consistency: dyn matches everything."""
    if isinstance(a, DynT) or isinstance(b, DynT):
        return True
    if isinstance(a, (IntT, BoolT)):
        return a == b
    if isinstance(a, PairT) and isinstance(b, PairT):
        return consistent(a.left, b.left) and consistent(a.right, b.right)
    if isinstance(a, ArrowT) and isinstance(b, ArrowT):
        return consistent(a.dom, b.dom) and consistent(a.cod, b.cod)
    if isinstance(a, RefT) and isinstance(b, RefT):
        return consistent(a.cell, b.cell)
    return False


def _lookup(name, gamma):
    for key, ty in gamma:
        if key == name:
            return ty
    return None


def _pos_path(e: SurfExpr) -> tuple:
    return (f"{e.pos[0]}:{e.pos[1]}",) if e.pos != (0, 0) else ()


def typecheck_surface(gamma, e: SurfExpr) -> Ty:
    """Synthesize the type of a surface expression.

    Applications through dyn treat the operator as dyn -> dyn, and
    dereference or assignment through dyn treats the target as a dyn
    reference; assignment requires consistency, not equality.
    """
    if isinstance(e, Lit):
        return typeof_const(e.const)
    if isinstance(e, SVar):
        ty = _lookup(e.name, gamma)
        if ty is None:
            raise TypeCheckError(f"unbound variable {e.name!r}", _pos_path(e))
        return ty
    if isinstance(e, SLambda):
        body_ty = typecheck_surface(((e.param, e.ann),) + tuple(gamma), e.body)
        return ArrowT(e.ann, body_ty)
    if isinstance(e, SApp):
        fn_ty = typecheck_surface(gamma, e.fn)
        arg_ty = typecheck_surface(gamma, e.arg)
        if fn_ty == DYN:
            return DYN
        if isinstance(fn_ty, ArrowT):
            if not consistent(arg_ty, fn_ty.dom):
                raise TypeCheckError(
                    f"argument type {arg_ty} not consistent with {fn_ty.dom}",
                    _pos_path(e))
            return fn_ty.cod
        raise TypeCheckError(f"application of non-function type {fn_ty}",
                             _pos_path(e))
    if isinstance(e, SPair):
        return PairT(typecheck_surface(gamma, e.fst),
                     typecheck_surface(gamma, e.snd))
    if isinstance(e, (SFst, SSnd)):
        pair_ty = typecheck_surface(gamma, e.pair)
        if pair_ty == DYN:
            return DYN
        if isinstance(pair_ty, PairT):
            return pair_ty.left if isinstance(e, SFst) else pair_ty.right
        raise TypeCheckError(f"projection from non-pair type {pair_ty}",
                             _pos_path(e))
    if isinstance(e, SPrim):
        arg_ty = typecheck_surface(gamma, e.arg)
        if not consistent(arg_ty, INT):
            raise TypeCheckError(
                f"{e.op} expects int, argument has type {arg_ty}", _pos_path(e))
        return BOOL if e.op == "zero?" else INT
    if isinstance(e, SRefNew):
        init_ty = typecheck_surface(gamma, e.init)
        if not consistent(init_ty, e.cell_ty):
            raise TypeCheckError(
                f"initializer type {init_ty} not consistent with cell type "
                f"{e.cell_ty}", _pos_path(e))
        return RefT(e.cell_ty)
    if isinstance(e, SDeref):
        ref_ty = typecheck_surface(gamma, e.ref)
        if ref_ty == DYN:
            return DYN
        if isinstance(ref_ty, RefT):
            return ref_ty.cell
        raise TypeCheckError(f"dereference of non-reference type {ref_ty}",
                             _pos_path(e))
    if isinstance(e, SAssign):
        target_ty = typecheck_surface(gamma, e.target)
        value_ty = typecheck_surface(gamma, e.value)
        if target_ty == DYN:
            return DYN
        if isinstance(target_ty, RefT):
            if not consistent(value_ty, target_ty.cell):
                raise TypeCheckError(
                    f"assignment of {value_ty} not consistent with cell type "
                    f"{target_ty.cell}", _pos_path(e))
            return target_ty.cell
        raise TypeCheckError(f"assignment through non-reference type "
                             f"{target_ty}", _pos_path(e))
    if isinstance(e, SCastE):
        src_ty = typecheck_surface(gamma, e.expr)
        if not consistent(src_ty, e.ty):
            raise TypeCheckError(f"cast from {src_ty} to inconsistent {e.ty}",
                                 _pos_path(e))
        return e.ty
    if isinstance(e, SLetE):
        rhs_ty = typecheck_surface(gamma, e.rhs)
        return typecheck_surface(((e.name, rhs_ty),) + tuple(gamma), e.body)
    if isinstance(e, SBegin):
        typecheck_surface(gamma, e.first)
        return typecheck_surface(gamma, e.second)
    raise TypeCheckError(f"unknown surface form {e!r}")


# ---------------------------------------------------------------------------
# Elaboration to the IR

class _Elaborator:
    """Lowers a typechecked surface expression to ANF statements.

    Every intermediate value is named by a fresh `$tN` temporary; casts
    appear exactly where the checker used consistency instead of
    equality. An application in return position becomes a tail call.
    """

    def __init__(self):
        self.counter = 0

    def fresh(self) -> str:
        name = f"$t{self.counter}"
        self.counter += 1
        return name

    def coerce(self, atom: Expr, have: Ty, want: Ty,
               k: Callable[[Expr, Ty], Stmt]) -> Stmt:
        if have == want:
            return k(atom, want)
        tmp = self.fresh()
        return SCast(tmp, atom, have, want, k(Var(tmp), want))

    def name_expr(self, expr: Expr, ty: Ty,
                  k: Callable[[Expr, Ty], Stmt]) -> Stmt:
        tmp = self.fresh()
        return SLet(tmp, expr, k(Var(tmp), ty))

    def bind(self, e: SurfExpr, gamma,
             k: Callable[[Expr, Ty], Stmt]) -> Stmt:
        """Elaborate `e`, passing its value as a Var/Const atom to `k`."""
        if isinstance(e, Lit):
            return k(EConst(e.const), typeof_const(e.const))
        if isinstance(e, SVar):
            return k(Var(e.name), _lookup(e.name, gamma))
        if isinstance(e, SLambda):
            inner_gamma = ((e.param, e.ann),) + tuple(gamma)
            body = self.tail(e.body, inner_gamma)
            body_ty = typecheck_surface(inner_gamma, e.body)
            return self.name_expr(Lam(e.param, e.ann, body),
                                  ArrowT(e.ann, body_ty), k)
        if isinstance(e, SApp):
            return self.bind(e.fn, gamma, lambda fn_atom, fn_ty:
                             self._call(e, gamma, fn_atom, fn_ty, k))
        if isinstance(e, SPair):
            return self.bind(e.fst, gamma, lambda a, a_ty:
                             self.bind(e.snd, gamma, lambda b, b_ty:
                                       self.name_expr(MkPair(a, b),
                                                      PairT(a_ty, b_ty), k)))
        if isinstance(e, (SFst, SSnd)):
            def project(atom, ty):
                if ty == DYN:
                    return self.coerce(atom, DYN, PairT(DYN, DYN),
                                       lambda a2, t2: project(a2, t2))
                op = Fst(ty.left, ty.right) if isinstance(e, SFst) \
                    else Snd(ty.left, ty.right)
                out = ty.left if isinstance(e, SFst) else ty.right
                return self.name_expr(PrimApp(op, atom), out, k)
            return self.bind(e.pair, gamma, project)
        if isinstance(e, SPrim):
            op = {"succ": Succ(), "prev": Prev(), "zero?": IsZero()}[e.op]
            out = BOOL if e.op == "zero?" else INT
            return self.bind(e.arg, gamma, lambda atom, ty:
                             self.coerce(atom, ty, INT, lambda a2, _:
                                         self.name_expr(PrimApp(op, a2), out, k)))
        if isinstance(e, SRefNew):
            def alloc(atom, ty):
                return self.coerce(atom, ty, e.cell_ty, lambda a2, _: _alloc(a2))

            def _alloc(atom):
                tmp = self.fresh()
                return SAlloc(tmp, e.cell_ty, atom,
                              k(Var(tmp), RefT(e.cell_ty)))
            return self.bind(e.init, gamma, alloc)
        if isinstance(e, SDeref):
            def deref(atom, ty):
                if ty == DYN:
                    return self.coerce(atom, DYN, RefT(DYN),
                                       lambda a2, t2: deref(a2, t2))
                cell = ty.cell
                if is_static(cell):
                    return self.name_expr(Deref(atom), cell, k)
                tmp = self.fresh()
                return SDynDeref(tmp, atom, cell, k(Var(tmp), cell))
            return self.bind(e.ref, gamma, deref)
        if isinstance(e, SAssign):
            return self.bind(e.target, gamma, lambda t_atom, t_ty:
                             self._assign(e, gamma, t_atom, t_ty, k))
        if isinstance(e, SCastE):
            return self.bind(e.expr, gamma, lambda atom, ty:
                             self.coerce(atom, ty, e.ty, k))
        if isinstance(e, SLetE):
            return self.bind(e.rhs, gamma, lambda atom, ty:
                             SLet(e.name, atom,
                                  self.bind(e.body,
                                            ((e.name, ty),) + tuple(gamma), k)))
        if isinstance(e, SBegin):
            return self.bind(e.first, gamma, lambda _atom, _ty:
                             self.bind(e.second, gamma, k))
        raise TypeCheckError(f"unknown surface form {e!r}")

    def _call(self, e: SApp, gamma, fn_atom: Expr, fn_ty: Ty,
              k, tail: bool = False) -> Stmt:
        if fn_ty == DYN:
            return self.coerce(fn_atom, DYN, ArrowT(DYN, DYN),
                               lambda f2, t2: self._call(e, gamma, f2, t2, k,
                                                         tail))
        dom, cod = fn_ty.dom, fn_ty.cod

        def with_arg(arg_atom, arg_ty):
            return self.coerce(arg_atom, arg_ty, dom, finish)

        def finish(arg_atom, _):
            if tail:
                return STailCall(fn_atom, arg_atom)
            tmp = self.fresh()
            return SCall(tmp, fn_atom, arg_atom, k(Var(tmp), cod))
        return self.bind(e.arg, gamma, with_arg)

    def _assign(self, e: SAssign, gamma, target_atom: Expr, target_ty: Ty,
                k: Callable[[Expr, Ty], Stmt]) -> Stmt:
        if target_ty == DYN:
            return self.coerce(target_atom, DYN, RefT(DYN),
                               lambda t2, ty2: self._assign(e, gamma, t2, ty2, k))
        cell = target_ty.cell

        def with_value(v_atom, v_ty):
            return self.coerce(v_atom, v_ty, cell, store)

        def store(v_atom, _):
            if is_static(cell):
                return SUpdate(target_atom, v_atom, k(v_atom, cell))
            return SDynUpdate(target_atom, v_atom, cell, k(v_atom, cell))
        return self.bind(e.value, gamma, with_value)

    def tail(self, e: SurfExpr, gamma) -> Stmt:
        """Elaborate `e` in return position."""
        if isinstance(e, SApp):
            return self.bind(e.fn, gamma, lambda fn_atom, fn_ty:
                             self._call(e, gamma, fn_atom, fn_ty, None,
                                        tail=True))
        if isinstance(e, SLetE):
            return self.bind(e.rhs, gamma, lambda atom, ty:
                             SLet(e.name, atom,
                                  self.tail(e.body,
                                            ((e.name, ty),) + tuple(gamma))))
        if isinstance(e, SBegin):
            return self.bind(e.first, gamma, lambda _atom, _ty:
                             self.tail(e.second, gamma))
        return self.bind(e, gamma, lambda atom, _ty: SRet(atom))


def elaborate(e: SurfExpr) -> Stmt:
    """Lower a typechecked surface program to the statement IR.

    The result passes `check_stmt` at exactly the surface type; fully
    static programs elaborate without any cast or dynamic access forms.
    """
    return _Elaborator().tail(e, ())


# ---------------------------------------------------------------------------
# Printers

def ty_to_sexpr(t: Ty) -> str:
    if not isinstance(t, Ty):
        raise TypeError(f"not a type: {t!r}")
    return str(t)


def _const_to_sexpr(c: Const) -> str:
    if isinstance(c, IntC):
        return str(c.value)
    return "#t" if c.value else "#f"


def expr_to_sexpr(e: Expr, indent: int = 0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, EConst):
        return _const_to_sexpr(e.const)
    if isinstance(e, PrimApp):
        op = e.op
        if isinstance(op, Succ):
            return f"(succ {expr_to_sexpr(e.arg)})"
        if isinstance(op, Prev):
            return f"(prev {expr_to_sexpr(e.arg)})"
        if isinstance(op, IsZero):
            return f"(zero? {expr_to_sexpr(e.arg)})"
        name = "fst" if isinstance(op, Fst) else "snd"
        return (f"({name} {ty_to_sexpr(op.left)} {ty_to_sexpr(op.right)} "
                f"{expr_to_sexpr(e.arg)})")
    if isinstance(e, MkPair):
        return f"(pair {expr_to_sexpr(e.fst)} {expr_to_sexpr(e.snd)})"
    if isinstance(e, Lam):
        body = stmt_to_sexpr(e.body, indent + 1)
        return f"(lambda ({e.param} : {ty_to_sexpr(e.param_ty)})\n{body})"
    if isinstance(e, Deref):
        return f"(! {expr_to_sexpr(e.ref)})"
    raise TypeError(f"not an expression: {e!r}")


def stmt_to_sexpr(s: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    nxt = indent + 1
    if isinstance(s, SLet):
        return (f"{pad}(let {s.name} {expr_to_sexpr(s.rhs, indent)}\n"
                f"{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, SRet):
        return f"{pad}(return {expr_to_sexpr(s.expr, indent)})"
    if isinstance(s, SCall):
        return (f"{pad}(call {s.name} {expr_to_sexpr(s.fn, indent)} "
                f"{expr_to_sexpr(s.arg, indent)}\n{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, STailCall):
        return (f"{pad}(tailcall {expr_to_sexpr(s.fn, indent)} "
                f"{expr_to_sexpr(s.arg, indent)})")
    if isinstance(s, SAlloc):
        return (f"{pad}(alloc {s.name} {ty_to_sexpr(s.cell_ty)} "
                f"{expr_to_sexpr(s.init, indent)}\n{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, SUpdate):
        return (f"{pad}(update {expr_to_sexpr(s.ref, indent)} "
                f"{expr_to_sexpr(s.rhs, indent)}\n{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, SDynUpdate):
        return (f"{pad}(dyn-update {expr_to_sexpr(s.ref, indent)} "
                f"{expr_to_sexpr(s.rhs, indent)} {ty_to_sexpr(s.ann)}\n"
                f"{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, SCast):
        return (f"{pad}(cast {s.name} {expr_to_sexpr(s.expr, indent)} "
                f"{ty_to_sexpr(s.src)} {ty_to_sexpr(s.tgt)}\n"
                f"{stmt_to_sexpr(s.body, nxt)})")
    if isinstance(s, SDynDeref):
        return (f"{pad}(dyn-deref {s.name} {expr_to_sexpr(s.ref, indent)} "
                f"{ty_to_sexpr(s.ann)}\n{stmt_to_sexpr(s.body, nxt)})")
    raise TypeError(f"not a statement: {s!r}")
