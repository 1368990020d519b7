//! Linear-space reference algorithms.
//!
//! Plain vector implementations used as oracles, plus the arena-backed
//! Karatsuba product and the in-place NTT.

use crate::arena::{ArenaBuilder, Mem, Model, Permission, PolyView, RawMem, SpaceMetrics};
use crate::error::{Error, Result};
use crate::lin;
use crate::ring::{Fe, Field, RootOfUnity};

/// Dense polynomial, coefficient of x^i at index i.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub coeffs: Vec<Fe>,
}

impl Poly {
    pub fn new(coeffs: Vec<Fe>) -> Poly {
        Poly { coeffs }
    }

    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    /// Parses `q;c0,c1,...`. Coefficients may be negative and are reduced mod q.
    pub fn parse(text: &str) -> Result<(Field, Poly)> {
        let (q, body) = text.trim().split_once(';').ok_or_else(|| Error::Parse("missing ';'".into()))?;
        let q: u64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad modulus {q:?}")))?;
        let field = Field::new(q)?;
        let coeffs = parse_coeffs(&field, body)?;
        Ok((field, Poly { coeffs }))
    }

    pub fn format(&self, field: &Field) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("{};{}", field.q(), body.join(","))
    }
}

/// Parses a comma-separated coefficient list (empty string gives size 0).
pub fn parse_coeffs(field: &Field, body: &str) -> Result<Vec<Fe>> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map(|v| field.from_i64(v))
                .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
        })
        .collect()
}

/// Product routine description and its scratch factors.
///
/// `c` bounds the scratch of a size-n full product by `c*n`; the other
/// factors do the same for the lower, middle and inverse kernels. Operand
/// sizes at or below `leaf` use the schoolbook method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulKit {
    pub c: usize,
    pub c_low: usize,
    pub c_mid: usize,
    pub c_inv: usize,
    pub leaf: usize,
    pub mstar: bool,
}

impl MulKit {
    pub const fn karatsuba() -> MulKit {
        MulKit { c: 2, c_low: 1, c_mid: 3, c_inv: 2, leaf: 16, mstar: false }
    }

    pub const fn schoolbook() -> MulKit {
        MulKit { leaf: usize::MAX, ..MulKit::karatsuba() }
    }

    pub fn with_leaf(self, leaf: usize) -> MulKit {
        MulKit { leaf: leaf.max(1), ..self }
    }

    /// Largest of the scratch factors.
    pub fn c_max(&self) -> usize {
        self.c.max(self.c_low).max(self.c_mid).max(self.c_inv)
    }
}

impl Default for MulKit {
    fn default() -> Self {
        MulKit::karatsuba()
    }
}

pub fn schoolbook_mul(field: &Field, f: &[Fe], g: &[Fe]) -> Vec<Fe> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut h = vec![0; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            h[i + j] = field.mul_add(h[i + j], a, b);
        }
    }
    h
}

/// Karatsuba product computed in an instrumented arena.
pub fn karatsuba_mul(field: &Field, f: &[Fe], g: &[Fe], kit: &MulKit) -> Vec<Fe> {
    karatsuba_mul_metered(field, f, g, kit).0
}

/// Same as [`karatsuba_mul`], also returning the arena metrics.
pub fn karatsuba_mul_metered(field: &Field, f: &[Fe], g: &[Fe], kit: &MulKit) -> (Vec<Fe>, SpaceMetrics) {
    if f.is_empty() || g.is_empty() {
        return (Vec::new(), SpaceMetrics::default());
    }
    let mut b = ArenaBuilder::new(*field, Model::RoRw);
    let fv = b.region(f, Permission::InputOnly);
    let gv = b.region(g, Permission::InputOnly);
    let hv = b.zeros(f.len() + g.len() - 1, Permission::OutputOnly);
    let ws = b.zeros(kit.c * f.len().min(g.len()), Permission::Scratch);
    let mut a = b.build();
    lin::mul_acc_any(&mut a, kit, fv, gv, hv, ws, false);
    debug_assert!(a.fault().is_none());
    (a.read_view(hv), a.metrics())
}

/// Fast product on the unchecked backend.
pub fn fast_mul(field: &Field, f: &[Fe], g: &[Fe]) -> Vec<Fe> {
    if f.len().min(g.len()) <= 32 {
        return schoolbook_mul(field, f, g);
    }
    let kit = MulKit::karatsuba();
    let mut b = ArenaBuilder::new(*field, Model::RoRw);
    let fv = b.region(f, Permission::InputOnly);
    let gv = b.region(g, Permission::InputOnly);
    let hv = b.zeros(f.len() + g.len() - 1, Permission::OutputOnly);
    let ws = b.zeros(kit.c * f.len().min(g.len()), Permission::Scratch);
    let mut r: RawMem = b.build_raw();
    lin::mul_acc_any(&mut r, &kit, fv, gv, hv, ws, false);
    r.regs[hv.contiguous().unwrap().0..][..hv.len()].to_vec()
}

/// Reverses the low `k` bits of `i`.
pub fn bit_reverse(i: u64, k: u32) -> Result<u64> {
    if k < 64 && i >> k != 0 {
        return Err(Error::OutOfRange(i as usize));
    }
    if k == 0 {
        return Ok(0);
    }
    Ok(i.reverse_bits() >> (64 - k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Fwd,
    Inv,
}

/// In-place decimation-in-frequency NTT with bit-reversed output.
///
/// Butterflies are written as the fused updates `a += b; b = a - 2b; b *= w`
/// so no element is ever buffered. The running twiddle lives in one scratch
/// register.
pub fn ntt<M: Mem>(m: &mut M, v: PolyView, root: RootOfUnity, dir: Direction) -> Result<()> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::BadLength);
    }
    if root.order != n as u64 {
        return Err(Error::BadOrder);
    }
    let fl = m.field();
    match dir {
        Direction::Fwd => {
            let mut half = n / 2;
            while half >= 1 {
                let w = fl.pow(root.omega, (n / (2 * half)) as u64);
                dif_stage(m, v, half, w);
                half /= 2;
            }
        }
        Direction::Inv => {
            let wi = fl.inv(root.omega)?;
            let mut half = 1;
            while half < n {
                let w = fl.pow(wi, (n / (2 * half)) as u64);
                dit_stage(m, v, half, w);
                half *= 2;
            }
            let ninv = fl.inv(n as u64 % fl.q())?;
            for i in 0..n {
                let x = v.get(m, i);
                v.set(m, i, fl.mul(x, ninv));
            }
        }
    }
    Ok(())
}

fn dif_stage<M: Mem>(m: &mut M, v: PolyView, half: usize, w: Fe) {
    let fl = m.field();
    let n = v.len();
    if let (Some((s, _)), Some(r)) = (v.contiguous(), m.raw()) {
        let a = &mut r[s..s + n];
        for blk in (0..n).step_by(2 * half) {
            let mut t = 1;
            for j in blk..blk + half {
                let (x, y) = (a[j], a[j + half]);
                a[j] = fl.add(x, y);
                a[j + half] = fl.mul(fl.sub(x, y), t);
                t = fl.mul(t, w);
            }
        }
        return;
    }
    let t = m.alloc_tmp();
    for blk in (0..n).step_by(2 * half) {
        m.set(t, 1);
        for j in blk..blk + half {
            let y = v.get(m, j + half);
            let s = fl.add(v.get(m, j), y);
            v.set(m, j, s);
            let d = fl.sub(s, fl.add(y, y));
            let tw = m.get(t);
            v.set(m, j + half, fl.mul(d, tw));
            m.set(t, fl.mul(tw, w));
        }
    }
    m.free_tmp(1);
}

fn dit_stage<M: Mem>(m: &mut M, v: PolyView, half: usize, w: Fe) {
    let fl = m.field();
    let n = v.len();
    if let (Some((s, _)), Some(r)) = (v.contiguous(), m.raw()) {
        let a = &mut r[s..s + n];
        for blk in (0..n).step_by(2 * half) {
            let mut t = 1;
            for j in blk..blk + half {
                let y = fl.mul(a[j + half], t);
                let x = a[j];
                a[j] = fl.add(x, y);
                a[j + half] = fl.sub(x, y);
                t = fl.mul(t, w);
            }
        }
        return;
    }
    let t = m.alloc_tmp();
    for blk in (0..n).step_by(2 * half) {
        m.set(t, 1);
        for j in blk..blk + half {
            let tw = m.get(t);
            let y = fl.mul(v.get(m, j + half), tw);
            v.set(m, j + half, y);
            let s = fl.add(v.get(m, j), y);
            v.set(m, j, s);
            v.set(m, j + half, fl.sub(s, fl.add(y, y)));
            m.set(t, fl.mul(tw, w));
        }
    }
    m.free_tmp(1);
}

/// Vector convenience wrapper around [`ntt`].
pub fn ntt_vec(field: &Field, data: &mut [Fe], root: RootOfUnity, dir: Direction) -> Result<()> {
    let mut r = RawMem::new(*field, data.to_vec());
    ntt(&mut r, PolyView::plain(0, data.len()), root, dir)?;
    data.copy_from_slice(&r.regs[..data.len()]);
    Ok(())
}

/// `h = f*g` through two length-`2^p` transforms held in `ws`, where
/// `|ws| = 2^(p+1)` and `2^p >= |h| = |f| + |g| - 1`.
pub fn ntt_mul_in<M: Mem>(m: &mut M, f: PolyView, g: PolyView, h: PolyView, ws: PolyView) -> Result<()> {
    if f.is_empty() || g.is_empty() {
        return Ok(());
    }
    let size = ws.len() / 2;
    if h.len() != f.len() + g.len() - 1 || !size.is_power_of_two() || size < h.len() || ws.len() != 2 * size {
        return Err(Error::SizeContract);
    }
    let fl = m.field();
    let root = fl.find_principal_root(size as u64)?;
    let (a, b) = (ws.sub(0, size), ws.sub(size, 2 * size));
    lin::copy(m, a.sub(0, f.len()), f, false);
    lin::zero(m, a.sub(f.len(), size));
    lin::copy(m, b.sub(0, g.len()), g, false);
    lin::zero(m, b.sub(g.len(), size));
    ntt(m, a, root, Direction::Fwd)?;
    ntt(m, b, root, Direction::Fwd)?;
    m.count_products(size as u64);
    for i in 0..size {
        let (x, y) = (a.get(m, i), b.get(m, i));
        a.set(m, i, fl.mul(x, y));
    }
    ntt(m, a, root, Direction::Inv)?;
    lin::copy(m, h, a.sub(0, h.len()), false);
    Ok(())
}

/// Product through [`ntt_mul_in`] on freshly allocated buffers.
pub fn ntt_mul(field: &Field, f: &[Fe], g: &[Fe]) -> Result<Vec<Fe>> {
    if f.is_empty() || g.is_empty() {
        return Ok(Vec::new());
    }
    let len = f.len() + g.len() - 1;
    let mut b = ArenaBuilder::new(*field, Model::RoRw);
    let fv = b.region(f, Permission::InputOnly);
    let gv = b.region(g, Permission::InputOnly);
    let hv = b.zeros(len, Permission::OutputOnly);
    let ws = b.zeros(2 * len.next_power_of_two(), Permission::Scratch);
    let mut r = b.build_raw();
    ntt_mul_in(&mut r, fv, gv, hv, ws)?;
    Ok(r.regs[hv.contiguous().unwrap().0..][..len].to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialMode {
    Low,
    Upp,
    Mid,
}

/// Lower (`size(f)` coefficients), upper (`size(g)-1`) or middle
/// (`size(f)-size(g)+1`) part of the product.
pub fn partial_product(field: &Field, f: &[Fe], g: &[Fe], mode: PartialMode) -> Result<Vec<Fe>> {
    let (m, n) = (f.len(), g.len());
    let full = schoolbook_mul(field, f, g);
    let at = |k: usize| full.get(k).copied().unwrap_or(0);
    Ok(match mode {
        PartialMode::Low => (0..m).map(at).collect(),
        PartialMode::Upp => (m..m + n.saturating_sub(1)).map(at).collect(),
        PartialMode::Mid => {
            if m < n {
                return Err(Error::SizeOrder);
            }
            (n.saturating_sub(1)..m).map(at).collect()
        }
    })
}

/// `f^{-1} mod x^n` by Newton iteration.
pub fn series_inv(field: &Field, f: &[Fe], n: usize) -> Result<Vec<Fe>> {
    let f0 = f.first().copied().unwrap_or(0);
    let inv0 = field.inv(f0).map_err(|_| Error::NonUnitConstant)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut g = vec![inv0];
    while g.len() < n {
        let k = (2 * g.len()).min(n);
        // g <- g + g (1 - f g) mod x^k
        let fk: Vec<Fe> = (0..k).map(|i| f.get(i).copied().unwrap_or(0)).collect();
        let mut e = fast_mul(field, &fk, &g);
        e.resize(k, 0);
        for x in e.iter_mut() {
            *x = field.neg(*x);
        }
        e[0] = field.add(e[0], 1);
        let mut d = fast_mul(field, &g, &e);
        d.resize(k, 0);
        g.resize(k, 0);
        for i in 0..k {
            g[i] = field.add(g[i], d[i]);
        }
        // g already satisfied the low part, so only the top changes
    }
    Ok(g)
}

/// Euclidean division: `f = g q + r`, `size(q) = size(f) - size(g) + 1`,
/// `size(r) = size(g) - 1`.
pub fn divrem(field: &Field, f: &[Fe], g: &[Fe]) -> Result<(Vec<Fe>, Vec<Fe>)> {
    let n = g.len();
    let lead = g.last().copied().unwrap_or(0);
    if n == 0 || lead == 0 {
        return Err(Error::NonUnitLeading);
    }
    if f.len() < n {
        let mut r = f.to_vec();
        r.resize(n - 1, 0);
        return Ok((Vec::new(), r));
    }
    let m = f.len() - n + 1;
    let fr: Vec<Fe> = f.iter().rev().take(m).copied().collect();
    let gr: Vec<Fe> = g.iter().rev().copied().collect();
    let gi = series_inv(field, &gr, m)?;
    let mut qr = fast_mul(field, &fr, &gi);
    qr.truncate(m);
    let q: Vec<Fe> = qr.into_iter().rev().collect();
    let gq = fast_mul(field, g, &q);
    let r = (0..n - 1).map(|i| field.sub(f[i], gq[i])).collect();
    Ok((q, r))
}

/// Remainder of `f` by `g`, size `size(g) - 1`.
pub fn rem(field: &Field, f: &[Fe], g: &[Fe]) -> Result<Vec<Fe>> {
    divrem(field, f, g).map(|x| x.1)
}

pub fn horner(field: &Field, f: &[Fe], a: Fe) -> Fe {
    f.iter().rev().fold(0, |acc, &c| field.mul_add(c, acc, a))
}

/// Subproduct tree: level 0 holds `x - a_i`, the last level the full product.
fn subproduct_tree(field: &Field, pts: &[Fe]) -> Vec<Vec<Vec<Fe>>> {
    let mut levels = vec![pts.iter().map(|&a| vec![field.neg(a), 1]).collect::<Vec<_>>()];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let next = prev
            .chunks(2)
            .map(|c| if c.len() == 2 { fast_mul(field, &c[0], &c[1]) } else { c[0].clone() })
            .collect();
        levels.push(next);
    }
    levels
}

/// Multipoint evaluation by descending the subproduct tree.
pub fn mp_eval_tree(field: &Field, f: &[Fe], pts: &[Fe]) -> Vec<Fe> {
    if pts.is_empty() {
        return Vec::new();
    }
    let tree = subproduct_tree(field, pts);
    let top = tree.len() - 1;
    let mut rems = vec![rem(field, f, &tree[top][0]).expect("monic")];
    for lvl in (0..top).rev() {
        let mut next = Vec::with_capacity(tree[lvl].len());
        for (i, m) in tree[lvl].iter().enumerate() {
            next.push(rem(field, &rems[i / 2], m).expect("monic"));
        }
        rems = next;
    }
    rems.into_iter().map(|r| r.first().copied().unwrap_or(0)).collect()
}

/// Lagrange interpolation through the subproduct tree.
pub fn interp_tree(field: &Field, pts: &[Fe], vals: &[Fe]) -> Result<Vec<Fe>> {
    if pts.len() != vals.len() {
        return Err(Error::LengthMismatch);
    }
    let mut sorted = pts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint);
    }
    let n = pts.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let tree = subproduct_tree(field, pts);
    let whole = &tree[tree.len() - 1][0];
    let deriv: Vec<Fe> = (1..whole.len()).map(|i| field.mul(whole[i], i as u64 % field.q())).collect();
    let dv = mp_eval_tree(field, &deriv, pts);
    let mut layer: Vec<Vec<Fe>> = (0..n).map(|i| vec![field.mul(vals[i], field.inv(dv[i]).expect("distinct points"))]).collect();
    for lvl in 0..tree.len() - 1 {
        let mut next = Vec::new();
        for (j, pair) in layer.chunks(2).enumerate() {
            if pair.len() == 2 {
                let mut a = fast_mul(field, &pair[0], &tree[lvl][2 * j + 1]);
                let b = fast_mul(field, &pair[1], &tree[lvl][2 * j]);
                a.resize(a.len().max(b.len()), 0);
                for (x, y) in a.iter_mut().zip(b) {
                    *x = field.add(*x, y);
                }
                next.push(a);
            } else {
                next.push(pair[0].clone());
            }
        }
        layer = next;
    }
    let mut out = layer.pop().unwrap();
    out.resize(n, 0);
    Ok(out)
}
