"""The monotonic-reference abstract machine.

A machine state is a statement, an environment, a procedure call stack,
a tagged heap, and a worklist of active addresses. Casting a reference
rewrites the pointed-to heap cell toward the meet of its current tag and
the target cell type, leaving a pending cast behind; statement execution
resumes only once the worklist has drained. Heap tags only ever become
less dynamic, and a cell whose tag is already low enough is left alone,
which is what keeps casts over heap cycles from diverging.

All functions here are pure: heaps are plain dicts that are copied, not
mutated, and states are immutable. Fresh addresses are allocated at the
current heap size; addresses are never reclaimed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .lang import (
    ArrowT,
    BoolC,
    BoolT,
    CastError,
    CastedVal,
    Closure,
    Deref,
    DynT,
    EConst,
    Expr,
    Fst,
    Inject,
    IntC,
    IntT,
    IsZero,
    Lam,
    MkPair,
    OCon,
    OPair,
    Observable,
    O_ADDR,
    O_CASTERROR,
    O_FUN,
    O_INJ,
    O_STUCK,
    O_TIMEOUT,
    Opr,
    PairT,
    Pending,
    Plain,
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
    Stuck,
    Succ,
    Ty,
    VConst,
    VPair,
    VRef,
    Val,
    Var,
    ground,
    lesseq,
    meet,
)

DEFAULT_FUEL = 1_000_000

Env = tuple  # sequence of (name, Val), newest binding first
Heap = dict  # address -> (CastedVal, Ty); copy on write
Active = tuple  # worklist of addresses, head processed first


@dataclass(frozen=True)
class Frame:
    name: str
    cont: Stmt
    env: Env


@dataclass(frozen=True)
class State:
    stmt: Stmt
    env: Env
    stack: tuple
    heap: Heap
    active: Active


@dataclass(frozen=True)
class TraceRecord:
    index: int
    rule: str
    active_len: int
    heap_size: int


def format_trace(rec: TraceRecord) -> str:
    return f"{rec.index}\t{rec.rule}\t{rec.active_len}\t{rec.heap_size}"


def lookup(key, pairs):
    """First match in an association sequence, or Stuck."""
    for name, value in pairs:
        if name == key:
            return value
    raise Stuck(f"unbound name {key!r}")


def heap_cell(heap: Heap, addr: int):
    try:
        return heap[addr]
    except KeyError:
        raise Stuck(f"unallocated address {addr}") from None


def delta(f: Opr, v: Val) -> Val:
    """Primitive operators; any other operator/value shape is Stuck."""
    if isinstance(f, Succ) and isinstance(v, VConst) and isinstance(v.const, IntC):
        return VConst(IntC(v.const.value + 1))
    if isinstance(f, Prev) and isinstance(v, VConst) and isinstance(v.const, IntC):
        return VConst(IntC(v.const.value - 1))
    if isinstance(f, IsZero) and isinstance(v, VConst) and isinstance(v.const, IntC):
        return VConst(BoolC(v.const.value == 0))
    if isinstance(f, Fst) and isinstance(v, VPair):
        return v.fst
    if isinstance(f, Snd) and isinstance(v, VPair):
        return v.snd
    raise Stuck(f"delta undefined on {f!r} and {v!r}")


def to_addr(v: Val) -> int:
    if isinstance(v, VRef):
        return v.addr
    raise Stuck(f"not a reference: {v!r}")


def to_val(cv: CastedVal) -> Val:
    if isinstance(cv, Plain):
        return cv.value
    raise Stuck("read of a heap cell with a pending cast")


def eval_expr(e: Expr, env: Env, heap: Heap) -> Val:
    """Evaluate a pure expression; only safe once the worklist is empty."""
    if isinstance(e, Var):
        return lookup(e.name, env)
    if isinstance(e, EConst):
        return VConst(e.const)
    if isinstance(e, PrimApp):
        return delta(e.op, eval_expr(e.arg, env, heap))
    if isinstance(e, MkPair):
        return VPair(eval_expr(e.fst, env, heap), eval_expr(e.snd, env, heap))
    if isinstance(e, Lam):
        return Closure(e.param, e.param_ty, e.body, env)
    if isinstance(e, Deref):
        addr = to_addr(eval_expr(e.ref, env, heap))
        cv, _ = heap_cell(heap, addr)
        return to_val(cv)
    raise Stuck(f"unknown expression form {e!r}")


def wrap(v: Val, dom: Ty, cod: Ty, new_dom: Ty, new_cod: Ty) -> Closure:
    """Wrap a function value of type dom -> cod for use at new_dom -> new_cod.

    The wrapper casts its argument back to `dom`, calls the wrapped
    function, and casts the result out to `new_cod`. Its bound names use
    the reserved `$` prefix and its environment is exactly the single
    wrapped-function binding, so capture is impossible.
    """
    body = SCast(
        "$w3", Var("$w0"), new_dom, dom,
        SCall(
            "$w2", Var("$w1"), Var("$w3"),
            SCast("$w4", Var("$w2"), cod, new_cod, SRet(Var("$w4")))))
    return Closure("$w0", new_dom, body, (("$w1", v),))


def mk_vcast(cv: CastedVal, src: Ty, tgt: Ty) -> Pending:
    """Retarget a heap cell's cast; pending casts never stack."""
    if isinstance(cv, Plain):
        return Pending(cv.value, src, tgt)
    return Pending(cv.value, cv.src, tgt)


def cast(v: Val, src: Ty, tgt: Ty, heap: Heap, active: Active):
    """Cast `v` from `src` to `tgt`, threading the heap and worklist.

    Returns (value, heap, active). Identity on matching base types and
    dyn; arrows wrap; pairs go componentwise. Casting a reference meets
    the target cell type with the current tag: if the tag is already at
    or below the meet the heap is left unchanged, otherwise the cell is
    retagged with a pending cast and its address joins the worklist.
    Projections out of dyn require equal ground types.
    """
    if isinstance(src, IntT) and isinstance(tgt, IntT):
        return v, heap, active
    if isinstance(src, BoolT) and isinstance(tgt, BoolT):
        return v, heap, active
    if isinstance(src, DynT) and isinstance(tgt, DynT):
        return v, heap, active
    if isinstance(src, ArrowT) and isinstance(tgt, ArrowT):
        return wrap(v, src.dom, src.cod, tgt.dom, tgt.cod), heap, active
    if isinstance(v, VPair) and isinstance(src, PairT) and isinstance(tgt, PairT):
        fst, heap1, active1 = cast(v.fst, src.left, tgt.left, heap, active)
        snd, heap2, active2 = cast(v.snd, src.right, tgt.right, heap1, active1)
        return VPair(fst, snd), heap2, active2
    if isinstance(v, VRef) and isinstance(src, RefT) and isinstance(tgt, RefT):
        cv, tag = heap_cell(heap, v.addr)
        lowered = meet(tgt.cell, tag)
        if lesseq(tag, lowered):
            return v, heap, active
        new_heap = dict(heap)
        new_heap[v.addr] = (mk_vcast(cv, tag, lowered), lowered)
        return v, new_heap, (v.addr,) + tuple(active)
    if isinstance(v, Inject) and isinstance(src, DynT):
        if ground(v.src_ty) == ground(tgt):
            return cast(v.payload, v.src_ty, tgt, heap, active)
        raise CastError(f"projection of {v.src_ty} payload to {tgt}")
    if isinstance(tgt, DynT):
        return Inject(v, src), heap, active
    raise CastError(f"no cast from {src} to {tgt}")


def _dispatch(state: State):
    """One machine transition; returns the new state and the rule name."""
    stmt, env, stack, heap, active = (
        state.stmt, state.env, state.stack, state.heap, state.active)

    if active:
        addr, rest = active[0], active[1:]
        cv, tag = heap_cell(heap, addr)
        if isinstance(cv, Plain):
            return State(stmt, env, stack, heap, rest), "active-discard"
        new_val, new_heap, new_active = cast(cv.value, cv.src, cv.tgt, heap, active)
        _, new_tag = heap_cell(new_heap, addr)
        if lesseq(tag, new_tag):
            committed = dict(new_heap)
            committed[addr] = (Plain(new_val), tag)
            remaining = tuple(a for a in new_active if a != addr)
            return State(stmt, env, stack, committed, remaining), "active-commit"
        # The tag moved below this cast's target: a nested cast superseded
        # it, so the produced value is dropped.
        return State(stmt, env, stack, new_heap, new_active), "active-supersede"

    if isinstance(stmt, SLet):
        v = eval_expr(stmt.rhs, env, heap)
        return State(stmt.body, ((stmt.name, v),) + env, stack, heap, ()), "let"
    if isinstance(stmt, SRet):
        if not stack:
            raise Stuck("return from the outermost statement")
        frame = stack[0]
        v = eval_expr(stmt.expr, env, heap)
        return State(frame.cont, ((frame.name, v),) + frame.env, stack[1:],
                     heap, ()), "return"
    if isinstance(stmt, (SCall, STailCall)):
        fn = eval_expr(stmt.fn, env, heap)
        arg = eval_expr(stmt.arg, env, heap)
        if not isinstance(fn, Closure):
            raise Stuck(f"call of non-closure {fn!r}")
        callee_env = ((fn.param, arg),) + fn.env
        if isinstance(stmt, STailCall):
            return State(fn.body, callee_env, stack, heap, ()), "tailcall"
        new_stack = (Frame(stmt.name, stmt.body, env),) + stack
        return State(fn.body, callee_env, new_stack, heap, ()), "call"
    if isinstance(stmt, SAlloc):
        v = eval_expr(stmt.init, env, heap)
        addr = len(heap)
        new_heap = dict(heap)
        new_heap[addr] = (Plain(v), stmt.cell_ty)
        return State(stmt.body, ((stmt.name, VRef(addr)),) + env, stack,
                     new_heap, ()), "alloc"
    if isinstance(stmt, SUpdate):
        addr = to_addr(eval_expr(stmt.ref, env, heap))
        v = eval_expr(stmt.rhs, env, heap)
        _, tag = heap_cell(heap, addr)
        new_heap = dict(heap)
        new_heap[addr] = (Plain(v), tag)
        return State(stmt.body, env, stack, new_heap, ()), "update"
    if isinstance(stmt, SDynUpdate):
        addr = to_addr(eval_expr(stmt.ref, env, heap))
        v = eval_expr(stmt.rhs, env, heap)
        _, tag = heap_cell(heap, addr)
        new_heap = dict(heap)
        new_heap[addr] = (Pending(v, stmt.ann, tag), tag)
        return State(stmt.body, env, stack, new_heap, (addr,)), "dyn-update"
    if isinstance(stmt, SCast):
        v = eval_expr(stmt.expr, env, heap)
        new_val, new_heap, new_active = cast(v, stmt.src, stmt.tgt, heap, ())
        return State(stmt.body, ((stmt.name, new_val),) + env, stack,
                     new_heap, new_active), "cast"
    if isinstance(stmt, SDynDeref):
        addr = to_addr(eval_expr(stmt.ref, env, heap))
        cv, tag = heap_cell(heap, addr)
        v = to_val(cv)
        new_val, new_heap, new_active = cast(v, tag, stmt.ann, heap, ())
        return State(stmt.body, ((stmt.name, new_val),) + env, stack,
                     new_heap, new_active), "dyn-deref"
    raise Stuck(f"no transition from {stmt!r}")


def step(state: State) -> State:
    """One machine transition; Stuck on shape violations and final states."""
    return _dispatch(state)[0]


def final(state: State) -> bool:
    """A return statement with no pending frames and an empty worklist."""
    return isinstance(state.stmt, SRet) and not state.stack and not state.active


def observe(v: Val) -> Observable:
    """Externally visible summary of a value; pairs keep their structure."""
    if isinstance(v, VConst):
        return OCon(v.const)
    if isinstance(v, VPair):
        return OPair(observe(v.fst), observe(v.snd))
    if isinstance(v, Closure):
        return O_FUN
    if isinstance(v, VRef):
        return O_ADDR
    if isinstance(v, Inject):
        return O_INJ
    raise Stuck(f"not a value: {v!r}")


def initial_state(stmt: Stmt) -> State:
    return State(stmt, (), (), {}, ())


def steps(fuel: int, state: State,
          trace: Optional[Callable[[TraceRecord], None]] = None) -> Observable:
    """Drive the machine for at most `fuel` transitions.

    Exhausted fuel reports a timeout; a final state evaluates and
    observes its return expression; Stuck and cast failures map to their
    observables. The optional `trace` callback receives one record per
    completed transition.
    """
    index = 0
    while True:
        if fuel == 0:
            return O_TIMEOUT
        if final(state):
            try:
                v = eval_expr(state.stmt.expr, state.env, state.heap)
            except Stuck:
                return O_STUCK
            except CastError:
                return O_CASTERROR
            return observe(v)
        try:
            state, rule = _dispatch(state)
        except Stuck:
            return O_STUCK
        except CastError:
            return O_CASTERROR
        if trace is not None:
            trace(TraceRecord(index, rule, len(state.active), len(state.heap)))
        index += 1
        fuel -= 1


def run(stmt: Stmt, fuel: int = DEFAULT_FUEL,
        trace: Optional[Callable[[TraceRecord], None]] = None) -> Observable:
    """Run a whole program from the empty configuration."""
    return steps(fuel, initial_state(stmt), trace)
