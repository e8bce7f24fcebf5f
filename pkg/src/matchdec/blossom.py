"""Exact minimum-weight perfect matching on general graphs.

The solver is the classical primal-dual blossom algorithm (Edmonds' method in
Galil's O(n^3) formulation) run as a maximum-cardinality, maximum-weight
matching on transformed weights ``W - w``.  Among perfect matchings this is
the same as minimising ``sum(w)``.  The compiled core works on flat arrays;
recursion in the textbook description is replaced by explicit stacks.

Dual solutions are exported in minimisation form: for every edge ``(u, v)``

    slack(u, v) = w(u, v) - y[u] - y[v] + sum(z[B] for B containing u and v)

is non-negative, zero on matched edges, ``z[B] >= 0``, and every blossom with
``z[B] > 0`` is full (matched internally except for one vertex).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .exceptions import InfeasibleMatchingError

__all__ = [
    "WeightedGraph",
    "PerfectMatching",
    "DualCertificate",
    "solve_mwpm",
    "brute_force_mwpm",
    "check_certificate",
    "BRUTE_FORCE_MAX_VERTICES",
]

BRUTE_FORCE_MAX_VERTICES = 14
CERTIFICATE_TOL = 1e-9

# rows of the per-blossom integer state table
_LABEL = 0
_LABELEND = 1
_PARENT = 2
_BASE = 3
_BEST = 4
_HASBEST = 5


@dataclass
class WeightedGraph:
    """Undirected graph handed to the matching solver."""

    num_vertices: int
    edges: list[tuple[int, int, float]] = field(default_factory=list)

    def add_edge(self, u: int, v: int, weight: float) -> None:
        self.edges.append((int(u), int(v), float(weight)))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.edges:
            return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
        u, v, w = zip(*self.edges)
        return (np.asarray(u, np.int64), np.asarray(v, np.int64), np.asarray(w, np.float64))


@dataclass
class DualCertificate:
    """Vertex potentials and blossom duals in minimisation form."""

    vertex_duals: np.ndarray
    blossoms: list[np.ndarray]
    blossom_duals: np.ndarray


@dataclass
class PerfectMatching:
    pairs: list[tuple[int, int]]
    total_weight: float
    mate: np.ndarray | None = None
    edge_indices: np.ndarray | None = None
    certificate: DualCertificate | None = None


# ---------------------------------------------------------------------------
# compiled core


@njit(cache=True)
def _slack(k, eu, ev, ew, dual):
    return dual[eu[k]] + dual[ev[k]] - 2.0 * ew[k]


@njit(cache=True)
def _leaves(b, n, childs, out, stack):
    if b < n:
        out[0] = b
        return 1
    cnt = 0
    top = 0
    stack[0] = b
    top = 1
    while top > 0:
        top -= 1
        x = stack[top]
        ch = childs[x]
        for i in range(ch.shape[0] - 1, -1, -1):
            t = ch[i]
            if t < n:
                out[cnt] = t
                cnt += 1
            else:
                stack[top] = t
                top += 1
    return cnt


@njit(cache=True)
def _assign_label(w, t, p, n, st, inb, mate, endpoint, childs, queue, leafbuf, stackbuf):
    while True:
        b = inb[w]
        st[_LABEL, w] = t
        st[_LABEL, b] = t
        st[_LABELEND, w] = p
        st[_LABELEND, b] = p
        st[_BEST, w] = -1
        st[_BEST, b] = -1
        if t == 1:
            cnt = _leaves(b, n, childs, leafbuf, stackbuf)
            for i in range(cnt):
                queue.append(leafbuf[i])
            return
        mb = mate[st[_BASE, b]]
        w = endpoint[mb]
        t = 1
        p = mb ^ 1


@njit(cache=True)
def _scan_blossom(v, w, st, inb, mate, endpoint, pathbuf):
    npath = 0
    base = -1
    while v != -1 or w != -1:
        b = inb[v]
        if st[_LABEL, b] & 4:
            base = st[_BASE, b]
            break
        pathbuf[npath] = b
        npath += 1
        st[_LABEL, b] = 5
        if st[_LABELEND, b] == -1:
            v = -1
        else:
            v = endpoint[st[_LABELEND, b]]
            b = inb[v]
            v = endpoint[st[_LABELEND, b]]
        if w != -1:
            v, w = w, v
    for i in range(npath):
        st[_LABEL, pathbuf[i]] = 1
    return base


@njit(cache=True)
def _add_blossom(base, k, n, eu, ev, ew, endpoint, nb_ptr, nb_end, st, inb, dual, childs,
                 endps, bestedges, unused, queue, leafbuf, stackbuf, buf_a, buf_b, bestto):
    v = eu[k]
    w = ev[k]
    bb = inb[base]
    bv = inb[v]
    bw = inb[w]
    b = unused.pop()
    st[_BASE, b] = base
    st[_PARENT, b] = -1
    st[_PARENT, bb] = b

    n1 = 0
    while bv != bb:
        st[_PARENT, bv] = b
        buf_a[n1] = bv
        buf_b[n1] = st[_LABELEND, bv]
        n1 += 1
        v = endpoint[st[_LABELEND, bv]]
        bv = inb[v]
    n2 = 0
    tmp_c = np.empty(n, np.int64)
    tmp_e = np.empty(n, np.int64)
    while bw != bb:
        st[_PARENT, bw] = b
        tmp_c[n2] = bw
        tmp_e[n2] = st[_LABELEND, bw] ^ 1
        n2 += 1
        w = endpoint[st[_LABELEND, bw]]
        bw = inb[w]

    length = 1 + n1 + n2
    path = np.empty(length, np.int64)
    eps = np.empty(length, np.int64)
    path[0] = bb
    for i in range(n1):
        path[1 + i] = buf_a[n1 - 1 - i]
        eps[i] = buf_b[n1 - 1 - i]
    eps[n1] = 2 * k
    for i in range(n2):
        path[1 + n1 + i] = tmp_c[i]
        eps[n1 + 1 + i] = tmp_e[i]
    childs[b] = path
    endps[b] = eps

    st[_LABEL, b] = 1
    st[_LABELEND, b] = st[_LABELEND, bb]
    dual[b] = 0.0
    cnt = _leaves(b, n, childs, leafbuf, stackbuf)
    for i in range(cnt):
        x = leafbuf[i]
        if st[_LABEL, inb[x]] == 2:
            queue.append(x)
        inb[x] = b

    # least-slack edges from the new blossom to every other S-blossom
    nset = 0
    for ci in range(length):
        c = path[ci]
        if st[_HASBEST, c]:
            lst = bestedges[c]
            for kk in range(lst.shape[0]):
                e = lst[kk]
                i = eu[e]
                j = ev[e]
                if inb[j] == b:
                    i, j = j, i
                bj = inb[j]
                if bj != b and st[_LABEL, bj] == 1:
                    if bestto[bj] == -1:
                        bestto[bj] = e
                        buf_a[nset] = bj
                        nset += 1
                    elif _slack(e, eu, ev, ew, dual) < _slack(bestto[bj], eu, ev, ew, dual):
                        bestto[bj] = e
        else:
            cl = _leaves(c, n, childs, leafbuf, stackbuf)
            for li in range(cl):
                x = leafbuf[li]
                for q in range(nb_ptr[x], nb_ptr[x + 1]):
                    e = nb_end[q] >> 1
                    i = eu[e]
                    j = ev[e]
                    if inb[j] == b:
                        i, j = j, i
                    bj = inb[j]
                    if bj != b and st[_LABEL, bj] == 1:
                        if bestto[bj] == -1:
                            bestto[bj] = e
                            buf_a[nset] = bj
                            nset += 1
                        elif _slack(e, eu, ev, ew, dual) < _slack(bestto[bj], eu, ev, ew, dual):
                            bestto[bj] = e
        st[_HASBEST, c] = 0
        bestedges[c] = np.empty(0, np.int64)
        st[_BEST, c] = -1

    # deterministic order: by target blossom id
    targets = np.sort(buf_a[:nset])
    lst = np.empty(nset, np.int64)
    best = -1
    bests = 0.0
    for i in range(nset):
        e = bestto[targets[i]]
        lst[i] = e
        bestto[targets[i]] = -1
        s = _slack(e, eu, ev, ew, dual)
        if best == -1 or s < bests:
            best = e
            bests = s
    bestedges[b] = lst
    st[_HASBEST, b] = 1
    st[_BEST, b] = best


@njit(cache=True)
def _index_of(arr, x):
    for i in range(arr.shape[0]):
        if arr[i] == x:
            return i
    return -1


@njit(cache=True)
def _expand_blossom(b0, endstage, n, st, inb, mate, dual, endpoint, childs, endps, bestedges,
                    unused, allowedge, queue, leafbuf, stackbuf):
    todo = [b0]
    while len(todo) > 0:
        b = todo.pop()
        ch = childs[b]
        for si in range(ch.shape[0]):
            s = ch[si]
            st[_PARENT, s] = -1
            if s < n:
                inb[s] = s
            elif endstage and dual[s] == 0.0:
                todo.append(s)
            else:
                cnt = _leaves(s, n, childs, leafbuf, stackbuf)
                for i in range(cnt):
                    inb[leafbuf[i]] = s

        if (not endstage) and st[_LABEL, b] == 2:
            # relabel the sub-blossoms along the even path through b
            ep = endps[b]
            length = ch.shape[0]
            entrychild = inb[endpoint[st[_LABELEND, b] ^ 1]]
            j = _index_of(ch, entrychild)
            if j & 1:
                j -= length
                jstep = 1
                endptrick = 0
            else:
                jstep = -1
                endptrick = 1
            p = st[_LABELEND, b]
            while j != 0:
                st[_LABEL, endpoint[p ^ 1]] = 0
                q = ep[(j - endptrick) % length]
                st[_LABEL, endpoint[q ^ endptrick ^ 1]] = 0
                _assign_label(endpoint[p ^ 1], 2, p, n, st, inb, mate, endpoint, childs, queue,
                              leafbuf, stackbuf)
                allowedge[q >> 1] = True
                j += jstep
                p = ep[(j - endptrick) % length] ^ endptrick
                allowedge[p >> 1] = True
                j += jstep
            bv = ch[j % length]
            st[_LABEL, endpoint[p ^ 1]] = 2
            st[_LABEL, bv] = 2
            st[_LABELEND, endpoint[p ^ 1]] = p
            st[_LABELEND, bv] = p
            st[_BEST, bv] = -1
            j += jstep
            while ch[j % length] != entrychild:
                bv = ch[j % length]
                if st[_LABEL, bv] == 1:
                    j += jstep
                    continue
                cnt = _leaves(bv, n, childs, leafbuf, stackbuf)
                found = -1
                for i in range(cnt):
                    if st[_LABEL, leafbuf[i]] != 0:
                        found = leafbuf[i]
                        break
                if found >= 0:
                    st[_LABEL, found] = 0
                    st[_LABEL, endpoint[mate[st[_BASE, bv]]]] = 0
                    _assign_label(found, 2, st[_LABELEND, found], n, st, inb, mate, endpoint,
                                  childs, queue, leafbuf, stackbuf)
                j += jstep

        st[_LABEL, b] = -1
        st[_LABELEND, b] = -1
        childs[b] = np.empty(0, np.int64)
        endps[b] = np.empty(0, np.int64)
        st[_BASE, b] = -1
        st[_HASBEST, b] = 0
        bestedges[b] = np.empty(0, np.int64)
        st[_BEST, b] = -1
        unused.append(b)


@njit(cache=True)
def _augment_blossom(b0, v0, n, st, mate, endpoint, childs, endps):
    todo_b = [b0]
    todo_v = [v0]
    while len(todo_b) > 0:
        b = todo_b.pop()
        v = todo_v.pop()
        t = v
        while st[_PARENT, t] != b:
            t = st[_PARENT, t]
        if t >= n:
            todo_b.append(t)
            todo_v.append(v)
        ch = childs[b]
        ep = endps[b]
        length = ch.shape[0]
        i = _index_of(ch, t)
        j = i
        if i & 1:
            j -= length
            jstep = 1
            endptrick = 0
        else:
            jstep = -1
            endptrick = 1
        while j != 0:
            j += jstep
            t = ch[j % length]
            p = ep[(j - endptrick) % length] ^ endptrick
            if t >= n:
                todo_b.append(t)
                todo_v.append(endpoint[p])
            j += jstep
            t = ch[j % length]
            if t >= n:
                todo_b.append(t)
                todo_v.append(endpoint[p ^ 1])
            mate[endpoint[p]] = p ^ 1
            mate[endpoint[p ^ 1]] = p
        childs[b] = np.concatenate((ch[i:], ch[:i]))
        endps[b] = np.concatenate((ep[i:], ep[:i]))
        st[_BASE, b] = v


@njit(cache=True)
def _augment_matching(k, n, eu, ev, st, inb, mate, endpoint, childs, endps):
    for side in range(2):
        if side == 0:
            s = eu[k]
            p = 2 * k + 1
        else:
            s = ev[k]
            p = 2 * k
        while True:
            bs = inb[s]
            if bs >= n:
                _augment_blossom(bs, s, n, st, mate, endpoint, childs, endps)
            mate[s] = p
            if st[_LABELEND, bs] == -1:
                break
            t = endpoint[st[_LABELEND, bs]]
            bt = inb[t]
            s = endpoint[st[_LABELEND, bt]]
            j = endpoint[st[_LABELEND, bt] ^ 1]
            if bt >= n:
                _augment_blossom(bt, j, n, st, mate, endpoint, childs, endps)
            mate[j] = st[_LABELEND, bt]
            p = st[_LABELEND, bt] ^ 1


@njit(cache=True)
def _max_weight_maxcard(n, eu, ev, ew, tol):
    """Maximum-cardinality maximum-weight matching.

    Returns (mate, dual, parent, base, leaves_flat, leaves_ptr, blossom_ids).
    ``mate[v]`` is the partner vertex or -1.
    """
    m = eu.shape[0]
    endpoint = np.empty(2 * m, np.int64)
    deg = np.zeros(n + 1, np.int64)
    for k in range(m):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    nb_ptr = np.cumsum(deg)
    fill = nb_ptr[:-1].copy()
    nb_end = np.empty(2 * m, np.int64)
    for k in range(m):
        nb_end[fill[eu[k]]] = 2 * k + 1
        fill[eu[k]] += 1
        nb_end[fill[ev[k]]] = 2 * k
        fill[ev[k]] += 1

    maxweight = 0.0
    for k in range(m):
        if ew[k] > maxweight:
            maxweight = ew[k]

    mate = -np.ones(n, np.int64)
    st = np.zeros((6, 2 * n), np.int64)
    st[_LABELEND, :] = -1
    st[_PARENT, :] = -1
    st[_BEST, :] = -1
    st[_BASE, :] = -1
    for v in range(n):
        st[_BASE, v] = v
    inb = np.arange(n)
    childs = [np.empty(0, np.int64) for _ in range(2 * n)]
    endps = [np.empty(0, np.int64) for _ in range(2 * n)]
    bestedges = [np.empty(0, np.int64) for _ in range(2 * n)]
    unused = [0]
    unused.pop()
    for b in range(2 * n - 1, n - 1, -1):
        unused.append(b)
    dual = np.zeros(2 * n, np.float64)
    dual[:n] = maxweight
    allowedge = np.zeros(m, np.bool_)
    queue = [0]
    queue.pop()

    leafbuf = np.empty(max(n, 1), np.int64)
    stackbuf = np.empty(max(2 * n, 1), np.int64)
    pathbuf = np.empty(max(2 * n, 1), np.int64)
    buf_a = np.empty(max(2 * n, 1), np.int64)
    buf_b = np.empty(max(2 * n, 1), np.int64)
    bestto = -np.ones(2 * n, np.int64)

    for _stage in range(n):
        st[_LABEL, :] = 0
        st[_BEST, :] = -1
        for b in range(n, 2 * n):
            if st[_HASBEST, b]:
                st[_HASBEST, b] = 0
                bestedges[b] = np.empty(0, np.int64)
        allowedge[:] = False
        while len(queue) > 0:
            queue.pop()
        for v in range(n):
            if mate[v] == -1 and st[_LABEL, inb[v]] == 0:
                _assign_label(v, 1, -1, n, st, inb, mate, endpoint, childs, queue, leafbuf,
                              stackbuf)

        augmented = False
        while True:
            while len(queue) > 0 and not augmented:
                v = queue.pop()
                for q in range(nb_ptr[v], nb_ptr[v + 1]):
                    p = nb_end[q]
                    k = p >> 1
                    w = endpoint[p]
                    if inb[v] == inb[w]:
                        continue
                    kslack = 0.0
                    if not allowedge[k]:
                        kslack = _slack(k, eu, ev, ew, dual)
                        if kslack <= tol:
                            allowedge[k] = True
                    if allowedge[k]:
                        lw = st[_LABEL, inb[w]]
                        if lw == 0:
                            _assign_label(w, 2, p ^ 1, n, st, inb, mate, endpoint, childs, queue,
                                          leafbuf, stackbuf)
                        elif lw == 1:
                            base = _scan_blossom(v, w, st, inb, mate, endpoint, pathbuf)
                            if base >= 0:
                                _add_blossom(base, k, n, eu, ev, ew, endpoint, nb_ptr, nb_end, st,
                                             inb, dual, childs, endps, bestedges, unused, queue,
                                             leafbuf, stackbuf, buf_a, buf_b, bestto)
                            else:
                                _augment_matching(k, n, eu, ev, st, inb, mate, endpoint, childs,
                                                  endps)
                                augmented = True
                                break
                        elif st[_LABEL, w] == 0:
                            st[_LABEL, w] = 2
                            st[_LABELEND, w] = p ^ 1
                    elif st[_LABEL, inb[w]] == 1:
                        b = inb[v]
                        if st[_BEST, b] == -1 or kslack < _slack(st[_BEST, b], eu, ev, ew, dual):
                            st[_BEST, b] = k
                    elif st[_LABEL, w] == 0:
                        if st[_BEST, w] == -1 or kslack < _slack(st[_BEST, w], eu, ev, ew, dual):
                            st[_BEST, w] = k
            if augmented:
                break

            deltatype = -1
            delta = 0.0
            deltaedge = -1
            deltablossom = -1
            for v in range(n):
                if st[_LABEL, inb[v]] == 0 and st[_BEST, v] != -1:
                    d = _slack(st[_BEST, v], eu, ev, ew, dual)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = st[_BEST, v]
            for b in range(2 * n):
                if st[_PARENT, b] == -1 and st[_LABEL, b] == 1 and st[_BEST, b] != -1:
                    d = _slack(st[_BEST, b], eu, ev, ew, dual) / 2.0
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = st[_BEST, b]
            for b in range(n, 2 * n):
                if (st[_BASE, b] >= 0 and st[_PARENT, b] == -1 and st[_LABEL, b] == 2
                        and (deltatype == -1 or dual[b] < delta)):
                    delta = dual[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                # no further augmentation possible; final update keeps duals feasible
                deltatype = 1
                delta = dual[0] if n > 0 else 0.0
                for v in range(n):
                    if dual[v] < delta:
                        delta = dual[v]
                if delta < 0.0:
                    delta = 0.0

            for v in range(n):
                lab = st[_LABEL, inb[v]]
                if lab == 1:
                    dual[v] -= delta
                elif lab == 2:
                    dual[v] += delta
            for b in range(n, 2 * n):
                if st[_BASE, b] >= 0 and st[_PARENT, b] == -1:
                    if st[_LABEL, b] == 1:
                        dual[b] += delta
                    elif st[_LABEL, b] == 2:
                        dual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i = eu[deltaedge]
                j = ev[deltaedge]
                if st[_LABEL, inb[i]] == 0:
                    i, j = j, i
                queue.append(i)
            elif deltatype == 3:
                allowedge[deltaedge] = True
                queue.append(eu[deltaedge])
            else:
                _expand_blossom(deltablossom, False, n, st, inb, mate, dual, endpoint, childs,
                                endps, bestedges, unused, allowedge, queue, leafbuf, stackbuf)

        if not augmented:
            break
        for b in range(n, 2 * n):
            if (st[_PARENT, b] == -1 and st[_BASE, b] >= 0 and st[_LABEL, b] == 1
                    and dual[b] == 0.0):
                _expand_blossom(b, True, n, st, inb, mate, dual, endpoint, childs, endps,
                                bestedges, unused, allowedge, queue, leafbuf, stackbuf)

    partner = -np.ones(n, np.int64)
    partner_edge = -np.ones(n, np.int64)
    for v in range(n):
        if mate[v] >= 0:
            partner[v] = endpoint[mate[v]]
            partner_edge[v] = mate[v] >> 1

    # export the leaf sets of live non-trivial blossoms for the certificate
    nlive = 0
    total = 0
    for b in range(n, 2 * n):
        if st[_BASE, b] >= 0:
            nlive += 1
            total += _leaves(b, n, childs, leafbuf, stackbuf)
    ids = np.empty(nlive, np.int64)
    ptr = np.zeros(nlive + 1, np.int64)
    flat = np.empty(total, np.int64)
    c = 0
    pos = 0
    for b in range(n, 2 * n):
        if st[_BASE, b] >= 0:
            cnt = _leaves(b, n, childs, leafbuf, stackbuf)
            flat[pos:pos + cnt] = leafbuf[:cnt]
            pos += cnt
            ids[c] = b
            c += 1
            ptr[c] = pos
    return partner, partner_edge, dual, ids, ptr, flat


# ---------------------------------------------------------------------------
# public API


def _validate_edges(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> None:
    if n < 0:
        raise ValueError("num_vertices must be non-negative")
    if u.size and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
        raise ValueError("edge endpoint out of range")
    if np.any(u == v):
        raise ValueError("self-loops are not allowed")
    if not np.all(np.isfinite(w)):
        raise ValueError("edge weights must be finite")


def solve_arrays(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray,
                 with_certificate: bool = False):
    """Array-level entry point used by the decoder hot path.

    Returns ``(mate, mate_edge, total_weight, certificate_or_None)``.
    """
    if n % 2:
        raise InfeasibleMatchingError("infeasible matching: odd number of vertices")
    if n == 0:
        cert = DualCertificate(np.empty(0), [], np.empty(0)) if with_certificate else None
        return np.empty(0, np.int64), np.empty(0, np.int64), 0.0, cert
    shift = float(w.max()) + 1.0 if w.size else 1.0
    wt = shift - w
    tol = 1e-12 * max(1.0, shift)
    mate, mate_edge, dual, ids, ptr, flat = _max_weight_maxcard(n, u, v, wt, tol)
    if np.any(mate < 0):
        raise InfeasibleMatchingError("infeasible matching: no perfect matching exists")
    first = mate_edge[np.arange(n) < mate]
    total = float(w[first].sum())
    cert = None
    if with_certificate:
        y = shift / 2.0 - dual[:n] / 2.0
        blossoms = [flat[ptr[i]:ptr[i + 1]].copy() for i in range(ids.size)]
        cert = DualCertificate(y, blossoms, dual[ids].copy())
    return mate, mate_edge, total, cert


def solve_mwpm(g: WeightedGraph, with_certificate: bool = True) -> PerfectMatching:
    """Minimum-weight perfect matching of ``g``.

    Raises
    ------
    InfeasibleMatchingError
        If ``g`` has no perfect matching.
    """
    u, v, w = g.arrays()
    _validate_edges(g.num_vertices, u, v, w)
    mate, mate_edge, total, cert = solve_arrays(g.num_vertices, u, v, w, with_certificate)
    lo = np.flatnonzero(np.arange(g.num_vertices) < mate)
    pairs = [(int(a), int(mate[a])) for a in lo]
    return PerfectMatching(pairs, total, mate, mate_edge[lo], cert)


def brute_force_mwpm(g: WeightedGraph) -> PerfectMatching:
    """Exhaustive minimum-weight perfect matching, for testing."""
    n = g.num_vertices
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices, got {n}")
    if n % 2:
        raise InfeasibleMatchingError("infeasible matching: odd number of vertices")
    best: dict[tuple[int, int], float] = {}
    for a, b, wt in g.edges:
        key = (min(a, b), max(a, b))
        if key not in best or wt < best[key]:
            best[key] = wt

    best_weight = float("inf")
    best_pairs: list[tuple[int, int]] | None = None

    def search(free: list[int], acc: float, pairs: list[tuple[int, int]]) -> None:
        nonlocal best_weight, best_pairs
        if not free:
            if acc < best_weight:
                best_weight = acc
                best_pairs = list(pairs)
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            wt = best.get((a, b))
            if wt is None:
                continue
            pairs.append((a, b))
            search(free[1:idx] + free[idx + 1:], acc + wt, pairs)
            pairs.pop()

    search(list(range(n)), 0.0, [])
    if best_pairs is None:
        raise InfeasibleMatchingError("infeasible matching: no perfect matching exists")
    return PerfectMatching(best_pairs, best_weight)


def check_certificate(g: WeightedGraph, matching: PerfectMatching,
                      tol: float = CERTIFICATE_TOL) -> list[str]:
    """Verify the LP-duality certificate; returns a list of violations (empty = valid)."""
    cert = matching.certificate
    if cert is None:
        return ["matching carries no certificate"]
    n = g.num_vertices
    problems = []
    mate = -np.ones(n, np.int64)
    for a, b in matching.pairs:
        if mate[a] != -1 or mate[b] != -1:
            problems.append(f"vertex matched twice in pair ({a}, {b})")
        mate[a], mate[b] = b, a
    if np.any(mate < 0):
        problems.append("matching is not perfect")

    member = np.zeros((len(cert.blossoms), n), dtype=bool)
    for i, leaves in enumerate(cert.blossoms):
        member[i, leaves] = True
    for i, z in enumerate(cert.blossom_duals):
        if z < -tol:
            problems.append(f"blossom {i} has negative dual {z}")
        if z > tol:
            inside = int(sum(1 for a, b in matching.pairs if member[i, a] and member[i, b]))
            if inside != (member[i].sum() - 1) // 2:
                problems.append(f"blossom {i} has positive dual but is not full")

    pair_slack: dict[tuple[int, int], float] = {}
    for a, b, wt in g.edges:
        zsum = float(cert.blossom_duals[member[:, a] & member[:, b]].sum()) if member.size else 0.0
        s = wt - cert.vertex_duals[a] - cert.vertex_duals[b] + zsum
        if s < -tol:
            problems.append(f"edge ({a}, {b}) has negative slack {s}")
        key = (min(a, b), max(a, b))
        pair_slack[key] = min(pair_slack.get(key, np.inf), s)
    for a, b in matching.pairs:
        s = pair_slack.get((min(a, b), max(a, b)))
        if s is None:
            problems.append(f"matched pair ({a}, {b}) is not an edge")
        elif abs(s) > tol:
            problems.append(f"matched edge ({a}, {b}) not tight (slack {s})")

    sizes = member.sum(axis=1) if member.size else np.zeros(0)
    dual_obj = float(cert.vertex_duals.sum() - np.dot(cert.blossom_duals, (sizes - 1) / 2.0))
    if abs(dual_obj - matching.total_weight) > tol * max(1.0, abs(matching.total_weight)):
        problems.append(f"duality gap {matching.total_weight - dual_obj}")
    return problems
