//! In-place execution of bilinear algorithms.
//!
//! A bilinear algorithm `(A, B, C)` computes `z += C((Ax) ⊙ (By))`. The
//! emitter turns it into a straight-line program that overwrites one input
//! register per row with the needed linear combination, accumulates the
//! product, and undoes every change, so no register outside x, y and z is
//! ever written.
//!
//! In the two-dimensional form each product is a pair `(low, high)` added to
//! two consecutive output slots, which is how a block of a recursive
//! polynomial product spills into the next block.

use std::fmt;

use crate::arena::{call, Mem, PolyView as V};
use crate::error::{Error, Result};
use crate::ring::{Fe, Field};

fn status<M: Mem>(m: &M) -> Result<()> {
    match m.fault() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearProgram {
    pub a: Vec<Vec<Fe>>,
    pub b: Vec<Vec<Fe>>,
    pub c: Vec<Vec<Fe>>,
    pub two_d: bool,
    field: Field,
}

fn is_unit_sign(fl: &Field, v: Fe) -> bool {
    v == 1 || v == fl.neg(1)
}

impl BilinearProgram {
    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of products.
    pub fn t(&self) -> usize {
        self.a.len()
    }

    pub fn m(&self) -> usize {
        self.a[0].len()
    }

    pub fn n(&self) -> usize {
        self.b[0].len()
    }

    pub fn s(&self) -> usize {
        self.c.len()
    }

    /// Nonzero entries of A, B and C.
    pub fn sigma(&self) -> [usize; 3] {
        let count = |mat: &Vec<Vec<Fe>>| mat.iter().flatten().filter(|&&v| v != 0).count();
        [count(&self.a), count(&self.b), count(&self.c)]
    }

    /// Entries outside `{0, 1, -1}` of A, B and C.
    pub fn tau(&self) -> [usize; 3] {
        let count = |mat: &Vec<Vec<Fe>>| mat.iter().flatten().filter(|&&v| v != 0 && !is_unit_sign(&self.field, v)).count();
        [count(&self.a), count(&self.b), count(&self.c)]
    }
}

/// Checks shapes and the absence of zero rows. Columns of C must be nonzero
/// as well, since every product needs a destination.
pub fn validate(field: Field, a: Vec<Vec<Fe>>, b: Vec<Vec<Fe>>, c: Vec<Vec<Fe>>, two_d: bool) -> Result<BilinearProgram> {
    let t = a.len();
    if t == 0 || b.len() != t || c.is_empty() {
        return Err(Error::DimMismatch);
    }
    let rect = |mat: &Vec<Vec<Fe>>, w: usize| w > 0 && mat.iter().all(|r| r.len() == w);
    if !rect(&a, a[0].len()) || !rect(&b, b[0].len()) || !rect(&c, t) {
        return Err(Error::DimMismatch);
    }
    let q = field.q();
    let norm = |mat: Vec<Vec<Fe>>| -> Vec<Vec<Fe>> { mat.into_iter().map(|r| r.into_iter().map(|v| v % q).collect()).collect() };
    let (a, b, c) = (norm(a), norm(b), norm(c));
    let zero_row = |mat: &Vec<Vec<Fe>>| mat.iter().any(|r| r.iter().all(|&v| v == 0));
    let zero_col = (0..t).any(|u| c.iter().all(|r| r[u] == 0));
    if zero_row(&a) || zero_row(&b) || zero_row(&c) || zero_col {
        return Err(Error::ZeroRow);
    }
    Ok(BilinearProgram { a, b, c, two_d, field })
}

/// Karatsuba on two coefficients.
pub fn karatsuba_program(field: Field, two_d: bool) -> BilinearProgram {
    let m1 = field.neg(1);
    let ab = vec![vec![1, 0], vec![0, 1], vec![1, m1]];
    let c = vec![vec![1, 0, 0], vec![1, 1, m1], vec![0, 1, 0]];
    validate(field, ab.clone(), ab, c, two_d).expect("well formed")
}

/// Strassen-Winograd on 2x2 matrices stored row-major.
pub fn strassen_winograd_program(field: Field) -> BilinearProgram {
    let f = |rows: &[[i64; 4]]| rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
    let a = f(&[[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, -1, -1], [0, 0, 0, 1], [0, 0, 1, 1], [-1, 0, 1, 1], [1, 0, -1, 0]]);
    let b = f(&[[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, -1, -1, 1], [-1, 1, 0, 0], [1, -1, 0, 1], [0, -1, 0, 1]]);
    let c: Vec<Vec<Fe>> = [[1, 1, 0, 0, 0, 0, 0], [1, 0, 1, 0, 1, 1, 0], [1, 0, 0, -1, 0, 1, 1], [1, 0, 0, 0, 1, 1, 1]]
        .iter()
        .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
        .collect();
    validate(field, a, b, c, false).expect("well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    X(usize),
    Y(usize),
    Z(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    /// `dst += coeff * src`
    AddInto { dst: Slot, src: Slot, coeff: Fe },
    ScaleBy { dst: Slot, coeff: Fe },
    DivBy { dst: Slot, coeff: Fe },
    /// `z ±= x * y`
    ProdAcc { z: usize, x: usize, y: usize, neg: bool },
    /// `(z, z+1) ±= x ∘ y`
    Recurse { z: usize, x: usize, y: usize, neg: bool },
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::X(i) => write!(f, "x{i}"),
            Slot::Y(i) => write!(f, "y{i}"),
            Slot::Z(i) => write!(f, "z{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InstrCounts {
    pub products: usize,
    pub add_into: usize,
    /// Multiplications by a constant outside `{1, -1}`, including those
    /// fused into an `AddInto`.
    pub scalar_muls: usize,
}

impl InstrCounts {
    /// Field additions: one per `AddInto` and one per accumulated product.
    pub fn additions(&self) -> usize {
        self.add_into + self.products
    }
}

pub fn count_instrs(field: &Field, prog: &[Instr]) -> InstrCounts {
    let mut c = InstrCounts::default();
    for ins in prog {
        match *ins {
            Instr::AddInto { coeff, .. } => {
                c.add_into += 1;
                if !is_unit_sign(field, coeff) {
                    c.scalar_muls += 1;
                }
            }
            Instr::ScaleBy { .. } | Instr::DivBy { .. } => c.scalar_muls += 1,
            Instr::ProdAcc { .. } | Instr::Recurse { .. } => c.products += 1,
        }
    }
    c
}

/// Pivot of a row: the lowest index holding ±1, else the lowest nonzero.
fn pivot(field: &Field, row: &[Fe]) -> usize {
    row.iter()
        .position(|&v| is_unit_sign(field, v))
        .or_else(|| row.iter().position(|&v| v != 0))
        .expect("validated: no zero row")
}

/// Instructions turning `v[p]` into the combination `Σ row[l] v[l]`, up to
/// the sign returned, and the instructions undoing it.
fn combine(field: &Field, row: &[Fe], p: usize, slot: fn(usize) -> Slot) -> (Vec<Instr>, Vec<Instr>, bool) {
    let a = row[p];
    let (mut fwd, mut bwd) = (Vec::new(), Vec::new());
    let unit = is_unit_sign(field, a);
    if !unit {
        fwd.push(Instr::ScaleBy { dst: slot(p), coeff: a });
    }
    for (l, &v) in row.iter().enumerate() {
        if l == p || v == 0 {
            continue;
        }
        let coeff = if unit { field.mul(v, a) } else { v };
        fwd.push(Instr::AddInto { dst: slot(p), src: slot(l), coeff });
        bwd.push(Instr::AddInto { dst: slot(p), src: slot(l), coeff: field.neg(coeff) });
    }
    if !unit {
        bwd.push(Instr::DivBy { dst: slot(p), coeff: a });
    }
    (fwd, bwd, a != 1 && unit)
}

fn emit(prog: &BilinearProgram, two_d: bool) -> Vec<Instr> {
    let fl = prog.field;
    let mut out = Vec::new();
    for u in 0..prog.t() {
        let i = pivot(&fl, &prog.a[u]);
        let j = pivot(&fl, &prog.b[u]);
        let col: Vec<Fe> = prog.c.iter().map(|r| r[u]).collect();
        let k = if two_d { col.iter().position(|&v| v != 0).expect("validated") } else { pivot(&fl, &col) };
        let (xf, xb, xs) = combine(&fl, &prog.a[u], i, Slot::X);
        let (yf, yb, ys) = combine(&fl, &prog.b[u], j, Slot::Y);
        out.extend(xf);
        out.extend(yf);
        let c = col[k];
        let unit = is_unit_sign(&fl, c);
        let neg = xs ^ ys ^ (unit && c != 1);
        let coef = |l: usize| if unit { fl.mul(col[l], c) } else { col[l] };
        let others: Vec<usize> = (0..col.len()).filter(|&l| l != k && col[l] != 0).collect();
        let sub = |l: usize, off: usize, neg: bool| Instr::AddInto {
            dst: Slot::Z(l + off),
            src: Slot::Z(k + off),
            coeff: if neg { fl.neg(coef(l)) } else { coef(l) },
        };
        if two_d {
            if !unit {
                out.push(Instr::DivBy { dst: Slot::Z(k), coeff: c });
            }
            out.extend(others.iter().map(|&l| sub(l, 0, true)));
            if !unit {
                out.push(Instr::DivBy { dst: Slot::Z(k + 1), coeff: c });
            }
            out.extend(others.iter().map(|&l| sub(l, 1, true)));
            out.push(Instr::Recurse { z: k, x: i, y: j, neg });
            out.extend(others.iter().map(|&l| sub(l, 1, false)));
            if !unit {
                out.push(Instr::ScaleBy { dst: Slot::Z(k + 1), coeff: c });
            }
            out.extend(others.iter().map(|&l| sub(l, 0, false)));
            if !unit {
                out.push(Instr::ScaleBy { dst: Slot::Z(k), coeff: c });
            }
        } else {
            if !unit {
                out.push(Instr::DivBy { dst: Slot::Z(k), coeff: c });
            }
            out.extend(others.iter().map(|&l| sub(l, 0, true)));
            out.push(Instr::ProdAcc { z: k, x: i, y: j, neg });
            out.extend(others.iter().map(|&l| sub(l, 0, false)));
            if !unit {
                out.push(Instr::ScaleBy { dst: Slot::Z(k), coeff: c });
            }
        }
        out.extend(yb);
        out.extend(xb);
    }
    out
}

/// In-place program for `z += C((Ax) ⊙ (By))`.
pub fn emit_inplace(prog: &BilinearProgram) -> Vec<Instr> {
    emit(prog, false)
}

/// In-place program for the pair form: every product `π_u` is added as
/// `(z_k, z_{k+1}) += C[k][u] π_u` for each row k, so z has `s + 1` slots.
pub fn emit_inplace_2d(prog: &BilinearProgram) -> Result<Vec<Instr>> {
    if !prog.two_d {
        return Err(Error::DimMismatch);
    }
    Ok(emit(prog, true))
}

// ---------------------------------------------------------------- text form

pub fn format_program(field: &Field, prog: &[Instr]) -> String {
    let mut s = String::new();
    for ins in prog {
        let line = match *ins {
            Instr::AddInto { dst, src, coeff } => format!("{dst} += {} * {src}", field.to_signed(coeff)),
            Instr::ScaleBy { dst, coeff } => format!("{dst} *= {}", field.to_signed(coeff)),
            Instr::DivBy { dst, coeff } => format!("{dst} /= {}", field.to_signed(coeff)),
            Instr::ProdAcc { z, x, y, neg } => format!("z{z} {}= x{x} * y{y}", if neg { '-' } else { '+' }),
            Instr::Recurse { z, x, y, neg } => format!("z{z}:z{} {}= x{x} o y{y}", z + 1, if neg { '-' } else { '+' }),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

fn parse_slot(tok: &str) -> Result<Slot> {
    let bad = || Error::Parse(format!("bad register `{tok}`"));
    let (kind, idx) = tok.split_at(tok.chars().next().map_or(0, |c| c.len_utf8()));
    let i: usize = idx.parse().map_err(|_| bad())?;
    match kind {
        "x" => Ok(Slot::X(i)),
        "y" => Ok(Slot::Y(i)),
        "z" => Ok(Slot::Z(i)),
        _ => Err(bad()),
    }
}

fn parse_index(tok: &str, kind: char) -> Result<usize> {
    match parse_slot(tok)? {
        Slot::X(i) if kind == 'x' => Ok(i),
        Slot::Y(i) if kind == 'y' => Ok(i),
        Slot::Z(i) if kind == 'z' => Ok(i),
        _ => Err(Error::Parse(format!("expected a {kind} register, got `{tok}`"))),
    }
}

fn parse_coeff(field: &Field, tok: &str) -> Result<Fe> {
    tok.parse::<i64>().map(|v| field.from_i64(v)).map_err(|_| Error::Parse(format!("bad coefficient `{tok}`")))
}

/// Parses the output of [`format_program`]. Blank lines and `#` comments are
/// skipped.
pub fn parse_program(field: &Field, text: &str) -> Result<Vec<Instr>> {
    let mut out = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("cannot parse `{line}`"));
        let ins = match toks.as_slice() {
            [d, "*=", c] => Instr::ScaleBy { dst: parse_slot(d)?, coeff: parse_coeff(field, c)? },
            [d, "/=", c] => Instr::DivBy { dst: parse_slot(d)?, coeff: parse_coeff(field, c)? },
            [d, op @ ("+=" | "-="), x, "*", y] if x.starts_with('x') && y.starts_with('y') => Instr::ProdAcc {
                z: parse_index(d, 'z')?,
                x: parse_index(x, 'x')?,
                y: parse_index(y, 'y')?,
                neg: *op == "-=",
            },
            [d, op @ ("+=" | "-="), x, "o", y] => {
                let (lo, hi) = d.split_once(':').ok_or_else(bad)?;
                let z = parse_index(lo, 'z')?;
                if parse_index(hi, 'z')? != z + 1 {
                    return Err(bad());
                }
                Instr::Recurse { z, x: parse_index(x, 'x')?, y: parse_index(y, 'y')?, neg: *op == "-=" }
            }
            [d, "+=", c, "*", s] => Instr::AddInto { dst: parse_slot(d)?, src: parse_slot(s)?, coeff: parse_coeff(field, c)? },
            _ => return Err(bad()),
        };
        out.push(ins);
    }
    Ok(out)
}

// ---------------------------------------------------------------- execution

fn slot_view(s: Slot, x: V, y: V, z: V) -> (V, usize) {
    match s {
        Slot::X(i) => (x, i),
        Slot::Y(i) => (y, i),
        Slot::Z(i) => (z, i),
    }
}

/// Largest register index used per bank, plus one.
fn extents(prog: &[Instr]) -> [usize; 3] {
    let mut e = [0; 3];
    let mut see = |s: Slot| match s {
        Slot::X(i) => e[0] = e[0].max(i + 1),
        Slot::Y(i) => e[1] = e[1].max(i + 1),
        Slot::Z(i) => e[2] = e[2].max(i + 1),
    };
    for ins in prog {
        match *ins {
            Instr::AddInto { dst, src, .. } => {
                see(dst);
                see(src);
            }
            Instr::ScaleBy { dst, .. } | Instr::DivBy { dst, .. } => see(dst),
            Instr::ProdAcc { z, x, y, .. } => {
                see(Slot::Z(z));
                see(Slot::X(x));
                see(Slot::Y(y));
            }
            Instr::Recurse { z, x, y, .. } => {
                see(Slot::Z(z + 1));
                see(Slot::X(x));
                see(Slot::Y(y));
            }
        }
    }
    e
}

/// Runs a program on scalar registers. `Recurse` uses `u ∘ v = (uv, 0)`.
pub fn exec_program<M: Mem>(m: &mut M, prog: &[Instr], x: V, y: V, z: V) -> Result<()> {
    let e = extents(prog);
    if e[0] > x.len() || e[1] > y.len() || e[2] > z.len() {
        return Err(Error::RegionMismatch);
    }
    let fl = m.field();
    for ins in prog {
        match *ins {
            Instr::AddInto { dst, src, coeff } => {
                let (dv, di) = slot_view(dst, x, y, z);
                let (sv, si) = slot_view(src, x, y, z);
                let v = fl.mul_add(dv.get(m, di), sv.get(m, si), coeff);
                dv.set(m, di, v);
            }
            Instr::ScaleBy { dst, coeff } => {
                let (dv, di) = slot_view(dst, x, y, z);
                let v = fl.mul(dv.get(m, di), coeff);
                dv.set(m, di, v);
            }
            Instr::DivBy { dst, coeff } => {
                let (dv, di) = slot_view(dst, x, y, z);
                let v = fl.mul(dv.get(m, di), fl.inv(coeff)?);
                dv.set(m, di, v);
            }
            Instr::ProdAcc { z: k, x: i, y: j, neg } | Instr::Recurse { z: k, x: i, y: j, neg } => {
                m.count_products(1);
                let p = fl.mul(x.get(m, i), y.get(m, j));
                let d = z.get(m, k);
                z.set(m, k, if neg { fl.sub(d, p) } else { fl.add(d, p) });
            }
        }
    }
    status(m)
}

/// Slot `i` of a view cut in blocks of `b`, clipped to the view.
fn block(v: V, i: usize, b: usize) -> V {
    let lo = (i * b).min(v.len());
    v.sub(lo, ((i + 1) * b).min(v.len()))
}

fn poly_2d<M: Mem>(m: &mut M, prog: &[Instr], parts: usize, f: V, g: V, h: V, neg: bool) -> Result<()> {
    let fl = m.field();
    let n = f.len();
    if n == 1 {
        m.count_products(1);
        let p = fl.mul(f.get(m, 0), g.get(m, 0));
        let d = h.get(m, 0);
        h.set(m, 0, if neg { fl.sub(d, p) } else { fl.add(d, p) });
        return Ok(());
    }
    let b = n / parts;
    let view = |s: Slot| match s {
        Slot::X(i) => block(f, i, b),
        Slot::Y(i) => block(g, i, b),
        Slot::Z(i) => block(h, i, b),
    };
    for ins in prog {
        match *ins {
            Instr::AddInto { dst, src, coeff } => {
                let (dv, sv) = (view(dst), view(src));
                for t in 0..dv.len().min(sv.len()) {
                    let v = fl.mul_add(dv.get(m, t), sv.get(m, t), coeff);
                    dv.set(m, t, v);
                }
            }
            Instr::ScaleBy { dst, coeff } => scale_block(m, view(dst), coeff),
            Instr::DivBy { dst, coeff } => scale_block(m, view(dst), fl.inv(coeff)?),
            Instr::ProdAcc { .. } => return Err(Error::RegionMismatch),
            Instr::Recurse { z: k, x: i, y: j, neg: s } => {
                let lo = k * b;
                let out = h.sub(lo, (lo + 2 * b - 1).min(h.len()));
                if out.len() != 2 * b - 1 {
                    return Err(Error::RegionMismatch);
                }
                call(m, |m| poly_2d(m, prog, parts, view(Slot::X(i)), view(Slot::Y(j)), out, neg ^ s))?;
            }
        }
    }
    Ok(())
}

fn scale_block<M: Mem>(m: &mut M, v: V, c: Fe) {
    let fl = m.field();
    for t in 0..v.len() {
        let x = v.get(m, t);
        v.set(m, t, fl.mul(x, c));
    }
}

/// `h += f*g` by nesting a two-dimensional program whose inputs are cut in
/// `parts` blocks. `|f| = |g| = parts^L` and `|h| = 2|f| - 1`.
pub fn exec_poly_2d<M: Mem>(m: &mut M, prog: &[Instr], parts: usize, f: V, g: V, h: V) -> Result<()> {
    let n = f.len();
    let mut size = 1;
    while size < n && parts > 1 {
        size *= parts;
    }
    if n == 0 || g.len() != n || size != n || h.len() != 2 * n - 1 {
        return Err(Error::RegionMismatch);
    }
    let e = extents(prog);
    if n > 1 && (e[0] > parts || e[1] > parts || e[2] > 2 * parts) {
        return Err(Error::RegionMismatch);
    }
    call(m, |m| poly_2d(m, prog, parts, f, g, h, false))?;
    status(m)
}

// ---------------------------------------------------------------- matrices

/// Square matrix held on the host, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixDense {
    pub dim: usize,
    pub entries: Vec<Fe>,
}

impl MatrixDense {
    pub fn new(dim: usize, entries: Vec<Fe>) -> Result<MatrixDense> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch);
        }
        Ok(MatrixDense { dim, entries })
    }

    pub fn identity(dim: usize) -> MatrixDense {
        let mut e = vec![0; dim * dim];
        (0..dim).for_each(|i| e[i * dim + i] = 1);
        MatrixDense { dim, entries: e }
    }

    /// `self * other` by the triple loop.
    pub fn naive_mul(&self, field: &Field, other: &MatrixDense) -> MatrixDense {
        let n = self.dim;
        let mut out = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                for j in 0..n {
                    out[i * n + j] = field.mul_add(out[i * n + j], a, other.entries[k * n + j]);
                }
            }
        }
        MatrixDense { dim: n, entries: out }
    }
}

/// Square block of registers: row r, column c at `start + r*stride + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatView {
    pub start: usize,
    pub stride: usize,
    pub dim: usize,
}

impl MatView {
    /// A whole `dim x dim` row-major region starting at `start`.
    pub fn dense(start: usize, dim: usize) -> MatView {
        MatView { start, stride: dim, dim }
    }

    pub fn quadrant(&self, r: usize, c: usize) -> MatView {
        let h = self.dim / 2;
        MatView { start: self.start + r * h * self.stride + c * h, stride: self.stride, dim: h }
    }

    fn addr(&self, r: usize, c: usize) -> usize {
        self.start + r * self.stride + c
    }
}

/// Operation tally of one constant-space Strassen-Winograd run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub products: u64,
    pub additions: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.products + self.additions
    }
}

fn mat_add<M: Mem>(m: &mut M, dst: MatView, src: MatView, neg: bool, ops: &mut OpCount) {
    let fl = m.field();
    for r in 0..dst.dim {
        for c in 0..dst.dim {
            let (a, b) = (m.get(dst.addr(r, c)), m.get(src.addr(r, c)));
            m.set(dst.addr(r, c), if neg { fl.sub(a, b) } else { fl.add(a, b) });
        }
    }
    ops.additions += (dst.dim * dst.dim) as u64;
}

fn sw<M: Mem>(m: &mut M, x: MatView, y: MatView, z: MatView, neg: bool, ops: &mut OpCount) {
    if x.dim == 1 {
        let fl = m.field();
        m.count_products(1);
        let p = fl.mul(m.get(x.start), m.get(y.start));
        let d = m.get(z.start);
        m.set(z.start, if neg { fl.sub(d, p) } else { fl.add(d, p) });
        ops.products += 1;
        ops.additions += 1;
        return;
    }
    let q = |v: MatView, r, c| v.quadrant(r, c);
    let (x00, x01, x10, x11) = (q(x, 0, 0), q(x, 0, 1), q(x, 1, 0), q(x, 1, 1));
    let (y00, y01, y10, y11) = (q(y, 0, 0), q(y, 0, 1), q(y, 1, 0), q(y, 1, 1));
    let (z00, z01, z10, z11) = (q(z, 0, 0), q(z, 0, 1), q(z, 1, 0), q(z, 1, 1));
    // A negated call runs the same schedule with every product negated.
    let rec = |m: &mut M, a: MatView, b: MatView, c: MatView, sub: bool, ops: &mut OpCount| {
        call(m, |m| sw(m, a, b, c, neg ^ sub, ops));
    };
    mat_add(m, x10, x00, true, ops);
    mat_add(m, y01, y11, true, ops);
    mat_add(m, z10, z11, true, ops);
    rec(m, x10, y01, z11, false, ops);
    mat_add(m, x10, x11, false, ops);
    mat_add(m, y01, y00, true, ops);
    mat_add(m, z01, z11, true, ops);
    rec(m, x10, y01, z11, true, ops);
    mat_add(m, z00, z11, true, ops);
    rec(m, x00, y00, z11, false, ops);
    mat_add(m, z00, z11, false, ops);
    mat_add(m, y01, y10, false, ops);
    mat_add(m, z10, z11, false, ops);
    rec(m, x11, y01, z10, false, ops);
    mat_add(m, y01, y11, false, ops);
    mat_add(m, y01, y10, true, ops);
    mat_add(m, x10, x01, true, ops);
    rec(m, x10, y11, z01, true, ops);
    mat_add(m, x10, x01, false, ops);
    mat_add(m, x10, x00, false, ops);
    rec(m, x10, y01, z11, false, ops);
    mat_add(m, z01, z11, false, ops);
    mat_add(m, y01, y00, false, ops);
    mat_add(m, x10, x11, true, ops);
    rec(m, x01, y10, z00, false, ops);
}

/// `Z += X*Y` for `n x n` blocks with n a power of two; X and Y are restored.
pub fn strassen_cs<M: Mem>(m: &mut M, x: MatView, y: MatView, z: MatView) -> Result<OpCount> {
    let n = x.dim;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo);
    }
    if y.dim != n || z.dim != n {
        return Err(Error::DimMismatch);
    }
    let mut ops = OpCount::default();
    sw(m, x, y, z, false, &mut ops);
    status(m)?;
    Ok(ops)
}
