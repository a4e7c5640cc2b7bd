#!/usr/bin/env python3
"""Solve a sparse SDPA problem and write a CSDP-style solution file.

Reads the standard .dat-s layout: m, nBLOCK, block sizes (negative for
diagonal blocks), the right-hand side vector, then one "matno blk i j value"
entry per line with matno 0 denoting the objective matrix. The dual problem

    maximize <F_0, Y>  subject to  <F_j, Y> = c_j,  Y >= 0

is solved and Y is written out as matrix number 2, which is where CSDP
places it, so downstream importers treat this tool like any other solver.

Small problems go through cvxpy with an interior-point solver. Large ones
are handed to SCS directly in its conic form, which keeps memory around one
copy of the coefficient matrix. When every constraint carries its own slack
variable (a diagonal-block entry appearing in exactly one constraint and not
in the objective), the equalities are rewritten as inequalities without the
slack columns and solved by working-set refinement: solve a subset of rows,
check all of them, pull in the worst violators, repeat. That keeps the
factorization small on problems with tens of thousands of rows. The entries
section must be purely numeric; comment lines are only recognized before it.
"""

import argparse
import math
import sys

import numpy as np
import scipy.sparse as sp


def fail(msg):
    sys.exit(f"error: {msg}")


class HeaderReader:
    """Line-oriented token reader that leaves the underlying binary file
    positioned after the last consumed line."""

    def __init__(self, f, path):
        self.f = f
        self.path = path
        self.pending = []

    def tokens(self, count, kind, what):
        out = []
        while len(out) < count:
            if not self.pending:
                line = self.f.readline()
                if not line:
                    fail(f"{self.path}: unexpected end of file reading {what}")
                text = line.decode("ascii", "replace")
                stripped = text.lstrip()
                if stripped.startswith('"') or stripped.startswith("*") or not stripped:
                    continue
                self.pending = (
                    text.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ").split()
                )
                continue
            tok = self.pending.pop(0)
            try:
                out.append(kind(tok))
            except ValueError:
                fail(f"{self.path}: bad token '{tok}' reading {what}")
        if self.pending:
            fail(f"{self.path}: trailing tokens after {what}")
        return out


def parse_problem(path):
    with open(path, "rb") as f:
        header = HeaderReader(f, path)
        m = header.tokens(1, int, "constraint count")[0]
        nblock = header.tokens(1, int, "block count")[0]
        sizes = header.tokens(nblock, int, "block sizes")
        c = np.array(header.tokens(m, float, "right-hand side"))
        raw = np.fromfile(f, sep=" ")

    if m < 1 or nblock < 1:
        fail(f"{path}: empty problem")
    if any(s == 0 for s in sizes):
        fail(f"{path}: zero block size")
    if raw.size % 5 != 0:
        fail(f"{path}: entry section is not a multiple of five numbers")
    raw = raw.reshape(-1, 5)

    matno = raw[:, 0].astype(np.int64)
    blk = raw[:, 1].astype(np.int64)
    ii = raw[:, 2].astype(np.int64)
    jj = raw[:, 3].astype(np.int64)
    vv = raw[:, 4].copy()
    del raw

    if matno.size == 0:
        fail(f"{path}: no matrix entries")
    if matno.min() < 0 or matno.max() > m:
        fail(f"{path}: matrix number out of range")
    if blk.min() < 1 or blk.max() > nblock:
        fail(f"{path}: block number out of range")
    dims = np.array([abs(s) for s in sizes])
    d_of = dims[blk - 1]
    if (ii < 1).any() or (jj < 1).any() or (ii > d_of).any() or (jj > d_of).any():
        fail(f"{path}: entry index outside its block")
    diag_blocks = np.array([s < 0 for s in sizes])
    if (diag_blocks[blk - 1] & (ii != jj)).any():
        fail(f"{path}: off-diagonal entry in a diagonal block")

    return m, sizes, c, (matno, blk, ii - 1, jj - 1, vv)


def block_columns(sizes):
    """Column offsets of each block in the full vectorized variable, using
    width d*d for matrix blocks and d for diagonal ones."""
    offsets = []
    total = 0
    for s in sizes:
        offsets.append(total)
        total += s * s if s > 0 else -s
    return offsets, total


def full_coefficient_matrix(m, sizes, entries, rows_of):
    """CSR of all symmetric coefficients with the given row mapping; matrix
    blocks use column-major d*d vectorization, diagonal blocks width d."""
    matno, blk, ii, jj, vv = entries
    offsets, total = block_columns(sizes)
    off = np.array(offsets)[blk - 1]
    d_of = np.array([abs(s) for s in sizes])[blk - 1]
    is_diag = np.array([s < 0 for s in sizes])[blk - 1]

    cols = np.where(is_diag, off + ii, off + jj * d_of + ii)
    rows = rows_of(matno)
    keep = rows >= 0
    data = [vv[keep]]
    ridx = [rows[keep]]
    cidx = [cols[keep]]

    mirror = keep & ~is_diag & (ii != jj)
    data.append(vv[mirror])
    ridx.append(rows[mirror])
    cidx.append((off + ii * d_of + jj)[mirror])

    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(ridx), np.concatenate(cidx))),
        shape=(m, total),
    )


def solve_cvxpy(m, sizes, c, entries, solver):
    import cvxpy as cp

    variables = []
    for size in sizes:
        if size < 0:
            variables.append(cp.Variable(-size, nonneg=True))
        elif size == 1:
            variables.append(cp.Variable((1, 1), nonneg=True))
        else:
            variables.append(cp.Variable((size, size), PSD=True))
    stacked = cp.hstack(
        [v if s < 0 else cp.vec(v, order="F") for v, s in zip(variables, sizes)]
    )

    a_eq = full_coefficient_matrix(m, sizes, entries, lambda mat: mat - 1)
    f0 = full_coefficient_matrix(1, sizes, entries, lambda mat: np.where(mat == 0, 0, -1))

    problem = cp.Problem(cp.Maximize(cp.sum(f0 @ stacked)), [a_eq @ stacked == c])
    problem.solve(solver=solver, verbose=False)
    if problem.status not in ("optimal", "optimal_inaccurate"):
        fail(f"solver finished with status {problem.status}")
    if problem.status == "optimal_inaccurate":
        print("warning: solver reports an inaccurate optimum", file=sys.stderr)

    duals = problem.constraints[0].dual_value
    if duals is None:
        duals = np.zeros(m)
    return problem.value, np.asarray(duals).reshape(-1), [np.asarray(v.value) for v in variables]


def packed_widths(sizes):
    return [-s if s < 0 else s * (s + 1) // 2 for s in sizes]


def packing_transform(sizes):
    """Sparse map from the packed variable (diagonal entries, or the scaled
    lower triangle column-wise per SCS convention) to full d*d column-major
    coordinates as used by full_coefficient_matrix. Applied on the right of a
    full coefficient matrix (which carries both mirror images of every
    off-diagonal entry), it yields packed coefficients with the matching
    sqrt(2) scaling."""
    offsets, total = block_columns(sizes)
    cols = []
    scale = []
    for b, s in enumerate(sizes):
        if s < 0:
            cols.append(np.arange(offsets[b], offsets[b] + -s))
            scale.append(np.ones(-s))
            continue
        d = s
        idx = np.zeros(d * (d + 1) // 2, dtype=np.int64)
        sc = np.ones(idx.size)
        k = 0
        for col in range(d):
            for row in range(col, d):
                idx[k] = col * d + row
                if row != col:
                    sc[k] = math.sqrt(2.0)
                k += 1
        cols.append(offsets[b] + idx)
        scale.append(sc)
    cols = np.concatenate(cols)
    scale = np.concatenate(scale)
    n_x = cols.size
    return sp.csc_matrix((scale, (cols, np.arange(n_x))), shape=(total, n_x))


def cone_layout(sizes, keep):
    """Identity rows forcing the kept packed coordinates into their cones.
    SCS orders cones as zero, nonnegative, then PSD, so diagonal-block
    coordinates come first. Returns (eye over kept columns, lp row count,
    psd dims)."""
    widths = packed_widths(sizes)
    starts = np.concatenate([[0], np.cumsum(widths)[:-1]]).astype(np.int64)
    new_index = np.cumsum(keep) - 1
    diag = []
    psd = []
    psd_dims = []
    for b, s in enumerate(sizes):
        coords = np.arange(starts[b], starts[b] + widths[b])
        kept = coords[keep[coords]]
        if s < 0:
            diag.append(new_index[kept])
        else:
            if kept.size != widths[b]:
                fail("internal: a matrix-block coordinate was eliminated")
            psd.append(new_index[kept])
            psd_dims.append(s)
    order = np.concatenate(diag + psd)
    lp_rows = sum(part.size for part in diag)
    n_kept = int(keep.sum())
    eye = sp.csc_matrix((-np.ones(order.size), (np.arange(order.size), order)),
                        shape=(order.size, n_kept))
    return eye, lp_rows, psd_dims


def find_slacks(a_eq, obj, sizes):
    """Packed columns that are per-row slacks: inside a diagonal block, used
    by exactly one constraint with a positive coefficient, and absent from
    the objective. Returns (cols, rows, weights) or None unless every
    constraint owns at least one slack."""
    widths = packed_widths(sizes)
    starts = np.concatenate([[0], np.cumsum(widths)[:-1]]).astype(np.int64)
    diag_mask = np.zeros(a_eq.shape[1], dtype=bool)
    for b, s in enumerate(sizes):
        if s < 0:
            diag_mask[starts[b] : starts[b] + widths[b]] = True

    counts = np.diff(a_eq.indptr)
    candidates = np.where(diag_mask & (counts == 1) & (obj == 0))[0]
    if candidates.size == 0:
        return None
    rows = a_eq.indices[a_eq.indptr[candidates]]
    weights = a_eq.data[a_eq.indptr[candidates]]
    positive = weights > 0
    candidates, rows, weights = candidates[positive], rows[positive], weights[positive]
    if np.unique(rows).size != a_eq.shape[0]:
        return None
    return candidates, rows, weights


def scs_solve_once(scs, a_rows, b_rows, zero_rows, eye, lp_rows, psd_dims, obj, eps, warm=None):
    a_scs = sp.vstack([a_rows, eye], format="csc")
    b_scs = np.concatenate([b_rows, np.zeros(eye.shape[0])])
    data = dict(A=a_scs, b=b_scs, c=-obj)
    cone = dict(z=zero_rows, l=lp_rows + (a_rows.shape[0] - zero_rows), s=psd_dims)
    solver = scs.SCS(data, cone, eps_abs=eps, eps_rel=eps, max_iters=200000,
                     time_limit_secs=1500, verbose=False)
    out = solver.solve(warm_start=warm is not None,
                       x=None if warm is None else warm,
                       y=None, s=None)
    status = out["info"]["status"]
    if "solved" not in status.lower():
        fail(f"solver finished with status {status}")
    if "inaccurate" in status.lower():
        print("warning: solver reports an inaccurate optimum", file=sys.stderr)
    return out


def solve_scs(m, sizes, c, entries, eps, workset_threshold=4000):
    import scs

    a_full = full_coefficient_matrix(m, sizes, entries, lambda mat: mat - 1)
    f0_full = full_coefficient_matrix(1, sizes, entries, lambda mat: np.where(mat == 0, 0, -1))
    transform = packing_transform(sizes)
    a_eq = (a_full @ transform).tocsc()
    del a_full
    obj = np.asarray((f0_full @ transform).todense()).reshape(-1)
    n_x = obj.size

    slacks = find_slacks(a_eq, obj, sizes) if m > workset_threshold else None
    if slacks is None:
        keep = np.ones(n_x, dtype=bool)
        eye, lp_rows, psd_dims = cone_layout(sizes, keep)
        out = scs_solve_once(scs, a_eq, c, m, eye, lp_rows, psd_dims, obj, eps)
        x = out["x"]
        duals = out["y"][:m]
        return float(obj @ x), duals, unpack_blocks(sizes, x)

    # Inequality form: drop the slack columns, then grow a working set of
    # rows until every dropped row is satisfied too.
    slack_cols, slack_rows, slack_weights = slacks
    keep = np.ones(n_x, dtype=bool)
    keep[slack_cols] = False
    a_iq = a_eq[:, keep].tocsr()
    obj_kept = obj[keep]
    eye, lp_rows, psd_dims = cone_layout(sizes, keep)

    first_of_row = np.full(m, -1, dtype=np.int64)
    weight_of_row = np.ones(m)
    for col, row, w in zip(slack_cols, slack_rows, slack_weights):
        if first_of_row[row] < 0:
            first_of_row[row] = col
            weight_of_row[row] = w

    active = np.zeros(m, dtype=bool)
    by_rhs = np.argsort(c)
    active[by_rhs[: min(m, 1024)]] = True
    active[:: max(1, m // 1024)] = True

    # Growth rounds run at a coarse tolerance; once the set stops growing the
    # final rounds polish at the requested one, warm-started.
    current_eps = max(100 * eps, 1e-4)
    x = None
    duals = np.zeros(m)
    for round_no in range(40):
        rows = np.where(active)[0]
        sub = a_iq[rows].tocsc()
        out = scs_solve_once(scs, sub, c[rows], 0, eye, lp_rows, psd_dims, obj_kept,
                             current_eps, warm=x)
        x = out["x"]
        duals = np.zeros(m)
        duals[rows] = out["y"][: rows.size]
        violation = a_iq @ x - c
        worst = float(violation.max())
        threshold = max(10 * current_eps, 1e-6)
        print(f"workset round {round_no}: rows {rows.size} eps {current_eps:.0e} "
              f"worst violation {worst:.3g}", file=sys.stderr)
        settled = worst <= threshold or rows.size == m
        if settled and current_eps <= eps:
            break
        if settled:
            current_eps = eps
            continue
        order = np.argsort(violation)[::-1]
        add = order[violation[order] > threshold][:1024]
        if add.size == 0:
            break
        active[add] = True
    else:
        print("warning: working set did not settle; the written solution may be loose",
              file=sys.stderr)

    x_full = np.zeros(n_x)
    x_full[keep] = x
    residual = c - a_iq @ x
    np.maximum(residual, 0, out=residual)
    x_full[first_of_row] = residual / weight_of_row
    return float(obj_kept @ x), duals, unpack_blocks(sizes, x_full)


def unpack_blocks(sizes, x):
    """Blocks from the packed solution vector, which follows block order."""
    blocks = []
    at = 0
    for s in sizes:
        width = -s if s < 0 else s * (s + 1) // 2
        part = x[at : at + width]
        at += width
        if s < 0:
            blocks.append(part.copy())
            continue
        d = s
        mat = np.zeros((d, d))
        k = 0
        for col in range(d):
            for row in range(col, d):
                v = part[k]
                if row == col:
                    mat[row, col] = v
                else:
                    mat[row, col] = mat[col, row] = v / math.sqrt(2.0)
                k += 1
        blocks.append(mat)
    return blocks


def write_solution(path, sizes, duals, blocks):
    with open(path, "w") as f:
        f.write(" ".join(f"{v:.17g}" for v in duals) + "\n")
        for b, size in enumerate(sizes):
            val = blocks[b]
            if val is None:
                fail(f"solver returned no value for block {b + 1}")
            if size < 0:
                for i, v in enumerate(np.asarray(val).reshape(-1)):
                    f.write(f"2 {b + 1} {i + 1} {i + 1} {v:.17g}\n")
            else:
                mat = np.asarray(val).reshape(size, size)
                for i in range(size):
                    for j in range(i, size):
                        f.write(f"2 {b + 1} {i + 1} {j + 1} {(mat[i, j] + mat[j, i]) / 2:.17g}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("problem", help="sparse SDPA input (.dat-s)")
    ap.add_argument("solution", help="output path, CSDP solution layout")
    ap.add_argument("--solver", default="auto",
                    help="auto, scs, or a cvxpy solver name (default: auto)")
    ap.add_argument("--eps", type=float, default=1e-5, help="scs tolerance")
    args = ap.parse_args()

    m, sizes, c, entries = parse_problem(args.problem)
    choice = args.solver
    if choice == "auto":
        choice = "scs" if m > 2000 else "CLARABEL"
    if choice.lower() == "scs":
        value, duals, blocks = solve_scs(m, sizes, c, entries, args.eps)
    else:
        value, duals, blocks = solve_cvxpy(m, sizes, c, entries, choice)
    write_solution(args.solution, sizes, duals, blocks)
    print(f"objective {value:.12g} constraints {m} blocks {len(sizes)}")


if __name__ == "__main__":
    main()
