//! Constant-space algorithms with read-only inputs.
//!
//! Each operation takes its inputs as views it never writes, and an output
//! view it may use as workspace before the final values land there. The
//! linear-space kernels of [`crate::lin`] run inside the free part of the
//! output, so the only registers outside inputs and outputs are the ones an
//! operation explicitly takes from the scratch pool.
//!
//! Every public function validates its arguments, runs the algorithm inside
//! one call frame and reports the first fault latched by the memory.

use crate::arena::{call, Mem, PolyView as V};
use crate::dense::MulKit;
use crate::error::{Error, Result};
use crate::lin::{self, add_into, copy, fma, negate, zero};

/// Largest group of points evaluated by Horner's rule.
const EVAL_LEAF: usize = 8;
/// Largest subproduct built by repeated multiplication by `x - a`.
const SUBPRODUCT_LEAF: usize = 8;

fn status<M: Mem>(m: &M) -> Result<()> {
    match m.fault() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn all_zero<M: Mem>(m: &M, v: V) -> bool {
    (0..v.len()).all(|i| v.get(m, i) == 0)
}

/// `v` cut or padded to `n` coefficients.
fn fit(v: V, n: usize) -> V {
    if v.len() >= n {
        v.sub(0, n)
    } else {
        v.pad_to(n)
    }
}

/// Callback observing the prefix length known to be correct.
pub type Probe<'a, M> = Option<&'a mut dyn FnMut(&M, usize)>;

// ---------------------------------------------------------------- products

/// `h += f*g` for f, g of size n and h of size 2n-1 whose top n coefficients
/// are zero.
pub fn semi_cumulative_product<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V) -> Result<()> {
    let n = f.len();
    if g.len() != n || h.len() != (2 * n).saturating_sub(1) {
        return Err(Error::SizeContract);
    }
    if n > 0 && !all_zero(m, h.sub(n - 1, 2 * n - 1)) {
        return Err(Error::PreconditionTopNonzero);
    }
    call(m, |m| scp(m, kit, f, g, h));
    status(m)
}

pub(crate) fn scp<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V, mut h: V) {
    loop {
        let n = f.len();
        if n == 0 {
            return;
        }
        let k = (n + 1) / (kit.c + 3);
        if k == 0 {
            lin::school_acc(m, f, g, h, false);
            return;
        }
        let lim = n + k - 1;
        let free = h.sub(lim, 2 * n - 1);
        let t = free.sub(0, 2 * k - 1);
        let ws = free.sub(2 * k - 1, free.len());
        // low k coefficients of f times all of g
        let fb = f.sub(0, k);
        let chunks = n.div_ceil(k);
        let gp = g.pad_to(chunks * k);
        for j in 0..chunks {
            lin::mul_over(m, kit, fb, gp.sub(j * k, j * k + k), t, ws);
            let len = (lim - j * k).min(2 * k - 1);
            add_into(m, h.sub(j * k, j * k + len), t.sub(0, len), false);
        }
        // high part of f times low k coefficients of g
        let ft = f.sub(k, n);
        let chunks = (n - k).div_ceil(k);
        let fp = ft.pad_to(chunks * k);
        for j in 0..chunks {
            lin::mul_over(m, kit, fp.sub(j * k, j * k + k), g.sub(0, k), t, ws);
            let off = k + j * k;
            let len = (lim - off).min(2 * k - 1);
            add_into(m, h.sub(off, off + len), t.sub(0, len), false);
        }
        zero(m, free);
        f = ft;
        g = g.sub(k, n);
        h = h.sub(2 * k, 2 * n - 1);
    }
}

/// `h = f*g mod x^n`; with `reversed`, `h = (f*g) quo x^(n-1)` instead,
/// obtained by running the lower product on reversed views.
pub fn lower_product_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, reversed: bool) -> Result<()> {
    let n = h.len();
    if f.len() != n || g.len() != n {
        return Err(Error::SizeContract);
    }
    if reversed {
        call(m, |m| lower_cs(m, kit, f.rev(), g.rev(), h.rev()));
    } else {
        call(m, |m| lower_cs(m, kit, f, g, h));
    }
    status(m)
}

pub(crate) fn lower_cs<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V, mut h: V) {
    loop {
        let n = h.len();
        if n == 0 {
            return;
        }
        let k = n / (kit.c_low + 3);
        if k == 0 {
            lin::school_low(m, f, g, h);
            return;
        }
        // top k coefficients from size-k blocks of F = f and G = x^r g
        let l = n.div_ceil(k);
        let r = k * l - n;
        let gg = g.shift_up(r);
        let ff = f.pad_to(k * l);
        let top = h.sub(n - k, n);
        let free = h.sub(0, n - k);
        let t = free.sub(0, k);
        let ws = free.sub(k, free.len());
        zero(m, top);
        for i in 0..l {
            let j = l - 1 - i;
            lin::low(m, kit, ff.sub(i * k, i * k + k), gg.sub(j * k, j * k + k), t, ws);
            add_into(m, top, t, false);
        }
        for i in 0..l - 1 {
            let j = l - 2 - i;
            let u = t.sub(0, k - 1);
            lin::upp(m, kit, ff.sub(i * k, i * k + k), gg.sub(j * k, j * k + k), u, ws);
            add_into(m, top.sub(0, k - 1), u, false);
        }
        f = f.sub(0, n - k);
        g = g.sub(0, n - k);
        h = h.sub(0, n - k);
    }
}

/// `h += f*g mod x^n` where `h mod x^s = 0`; g has size n or any size up
/// to n (it is read with fake padding).
pub fn semi_cumulative_lower<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, s: usize) -> Result<()> {
    let n = h.len();
    if f.len() != n || g.len() > n || s == 0 || s > n {
        return Err(Error::SizeContract);
    }
    if !all_zero(m, h.sub(0, s)) {
        return Err(Error::PreconditionLowNonzero);
    }
    call(m, |m| scl(m, kit, f, g, h, s, false));
    status(m)
}

/// Semi-cumulative lower product, subtracting when `neg`.
pub(crate) fn scl<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, s: usize, neg: bool) {
    let n = h.len();
    let gl = g.len();
    let w = (s / (kit.c_mid + 2)).min(n - s);
    if w == 0 {
        for t in s..n {
            for j in 0..gl.min(t + 1) {
                let x = g.get(m, j);
                let y = f.get(m, t - j);
                fma(m, h, t, x, y, neg);
            }
        }
        m.count_products(((n - s) * gl) as u64);
    } else {
        let free = h.sub(0, s);
        let gp = g.pad_to(n);
        let mut a = s;
        while a < n {
            let ww = w.min(n - a);
            let tt = free.sub(0, ww);
            // terms g_j f_{t-j} with j <= a
            let gq = gl.min(a + 1);
            lin::mid_any(m, kit, f.sub(a + 1 - gq, a + ww), g.sub(0, gq), tt, free.sub(ww, s));
            // terms with j > a
            if gl > a + 1 && ww > 1 {
                let t2 = free.sub(ww, 2 * ww - 1);
                lin::low(m, kit, gp.sub(a + 1, a + ww), f.sub(0, ww - 1), t2, free.sub(2 * ww - 1, s));
                add_into(m, tt.sub(1, ww), t2, false);
            }
            add_into(m, h.sub(a, a + ww), tt, neg);
            a += ww;
        }
    }
    let gs = fit(g, s);
    call(m, |m| lower_cs(m, kit, f.sub(0, s), gs, h.sub(0, s)));
    if neg {
        negate(m, h.sub(0, s));
    }
}

/// `h = [f*g]_{n-1}^{m+n-1}` with `|f| = m+n-1`, `|g| = n`, `|h| = m`.
pub fn middle_product_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V) -> Result<()> {
    if g.is_empty() || f.len() + 1 != h.len() + g.len() {
        return Err(Error::SizeContract);
    }
    call(m, |m| mid_cs(m, kit, f, g, h));
    status(m)
}

pub(crate) fn mid_cs<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, g: V, mut h: V) {
    let n = g.len();
    loop {
        let mm = h.len();
        if mm == 0 {
            return;
        }
        let k = mm / (kit.c_mid + 2);
        if k == 0 {
            lin::school_mid(m, f, g, h);
            return;
        }
        lin::mid_any(m, kit, f.sub(0, k + n - 1), g, h.sub(0, k), h.sub(k, mm));
        f = f.sub(k, f.len());
        h = h.sub(k, mm);
    }
}

// ---------------------------------------------------------------- series

/// `g = f^{-1} mod x^n`.
pub fn series_inv_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V) -> Result<()> {
    series_inv_cs_probed(m, kit, f, g, None)
}

/// [`series_inv_cs`] calling `probe(mem, k)` whenever `g mod x^k` is final.
pub fn series_inv_cs_probed<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, probe: Probe<'_, M>) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::SizeContract);
    }
    if g.is_empty() {
        return Ok(());
    }
    if f.get(m, 0) == 0 {
        return Err(Error::NonUnitConstant);
    }
    call(m, |m| inv_cs(m, kit, f, g, probe));
    status(m)
}

pub(crate) fn inv_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, mut probe: Probe<'_, M>) {
    let n = g.len();
    let fl = m.field();
    let f0 = f.get(m, 0);
    g.set(m, 0, fl.inv(f0).unwrap_or(0));
    let c = kit.c_mid.max(kit.c_low);
    let mut k = 1;
    if let Some(p) = probe.as_mut() {
        p(m, k);
    }
    let mut l = 1.min((n - 1) / (c + 2));
    while l > 0 {
        // error term into the top of g, then its product with the inverse so far
        let e = g.sub(n - l, n);
        lin::mid_any(m, kit, f.sub(1, k + l), g.sub(0, k), e, g.sub(k, n - l));
        lin::low(m, kit, g.sub(0, l), e, g.sub(k, k + l), g.sub(k + l, n - l));
        negate(m, g.sub(k, k + l));
        k += l;
        if let Some(p) = probe.as_mut() {
            p(m, k);
        }
        l = k.min((n - k) / (c + 2));
    }
    if k < n {
        lin::naive_inv_tail(m, f, g, k);
        if let Some(p) = probe.as_mut() {
            p(m, n);
        }
    }
}

/// `h = f/g mod x^n`.
pub fn series_div_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V) -> Result<()> {
    series_div_cs_probed(m, kit, f, g, h, None)
}

/// [`series_div_cs`] calling `probe(mem, k)` whenever `h mod x^k` is final.
pub fn series_div_cs_probed<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, probe: Probe<'_, M>) -> Result<()> {
    let n = h.len();
    if f.len() != n || g.len() != n {
        return Err(Error::SizeContract);
    }
    if n == 0 {
        return Ok(());
    }
    if g.get(m, 0) == 0 {
        return Err(Error::NonUnitConstant);
    }
    call(m, |m| div_cs(m, kit, f, g, h, probe));
    status(m)
}

pub(crate) fn div_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, mut probe: Probe<'_, M>) {
    let n = h.len();
    let k0 = n / (kit.c_inv.max(kit.c_low) + 2);
    let mut k = 0;
    if k0 > 0 {
        // inverse of g mod x^k0, stored reversed at the top of h
        let iv = h.sub(n - k0, n).rev();
        lin::inv(m, kit, g.sub(0, k0), iv, h.sub(0, n - k0));
        lin::low(m, kit, f.sub(0, k0), iv, h.sub(0, k0), h.sub(k0, n - k0));
        k = k0;
        if let Some(p) = probe.as_mut() {
            p(m, k);
        }
        loop {
            let l = k0.min((n - k) / (kit.c_mid + 3));
            if l == 0 {
                break;
            }
            let t = h.sub(n - 2 * l, n - l);
            lin::mid_any(m, kit, g.sub(1, k + l), h.sub(0, k), t, h.sub(k, n - 2 * l));
            negate(m, t);
            add_into(m, t, f.sub(k, k + l), false);
            lin::low(m, kit, t, h.sub(n - l, n).rev(), h.sub(k, k + l), h.sub(k + l, n - 2 * l));
            k += l;
            if let Some(p) = probe.as_mut() {
                p(m, k);
            }
        }
    }
    if k < n {
        naive_div_tail(m, f, g, h, k);
        if let Some(p) = probe.as_mut() {
            p(m, n);
        }
    }
}

/// `h_i = (f_i - sum_{j=1}^{i} g_j h_{i-j}) / g_0` for `i >= from`. `f` may
/// alias `h` (in-place division).
fn naive_div_tail<M: Mem>(m: &mut M, f: V, g: V, h: V, from: usize) {
    let fl = m.field();
    let g0 = g.get(m, 0);
    let ig0 = fl.inv(g0).unwrap_or(0);
    for i in from..h.len() {
        let fi = f.get(m, i);
        h.set(m, i, fi);
        for j in 1..=i {
            let x = g.get(m, j);
            let y = h.get(m, i - j);
            fma(m, h, i, x, y, true);
        }
        m.count_products(i as u64 + 1);
        let v = h.get(m, i);
        h.set(m, i, fl.mul(v, ig0));
    }
}

/// In place `f = f/g mod x^n` using only the scratch view `t`.
pub fn inplace_div_smallspace<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, t: V) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::SizeContract);
    }
    if f.is_empty() {
        return Ok(());
    }
    if g.get(m, 0) == 0 {
        return Err(Error::NonUnitConstant);
    }
    if t.len() < kit.c_mid + 3 {
        return Err(Error::ScratchTooSmall);
    }
    call(m, |m| ipdiv(m, kit, f, g, t));
    status(m)
}

/// Small-space in-place division; falls back to the quadratic loop when
/// `t` cannot hold one block.
pub(crate) fn ipdiv<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, t: V) {
    let n = f.len();
    let s = t.len();
    let l0 = (s / (kit.c_mid + 3)).min(n);
    if l0 == 0 {
        naive_div_tail(m, f, g, f, 0);
        return;
    }
    let iv = t.sub(0, l0);
    let e = t.sub(l0, 2 * l0);
    let ws = t.sub(2 * l0, s);
    lin::inv(m, kit, g.sub(0, l0), iv, t.sub(l0, s));
    lin::low(m, kit, f.sub(0, l0), iv, e, ws);
    copy(m, f.sub(0, l0), e, false);
    let mut k = l0;
    while k < n {
        let l = l0.min(n - k);
        let el = e.sub(0, l);
        lin::mid_any(m, kit, g.sub(1, k + l), f.sub(0, k), el, ws);
        negate(m, el);
        add_into(m, el, f.sub(k, k + l), false);
        lin::low(m, kit, el, iv.sub(0, l), f.sub(k, k + l), ws);
        k += l;
    }
}

// ---------------------------------------------------------------- division

/// Euclidean division `f = g q + r` with `|f| = m+n-1`, `|g| = n`,
/// `|q| = m >= n-1`, `|r| = n-1`.
pub fn divrem_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, q: V, r: V) -> Result<()> {
    let n = g.len();
    if n == 0 || r.len() + 1 != n || f.len() + 1 != q.len() + n || q.is_empty() || q.len() + 1 < n {
        return Err(Error::SizeContract);
    }
    if g.get(m, n - 1) == 0 {
        return Err(Error::NonUnitLeading);
    }
    call(m, |m| divrem_inner(m, kit, f, g, q, r));
    status(m)
}

pub(crate) fn divrem_inner<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, q: V, r: V) {
    let n = g.len();
    let mq = q.len();
    let (k, l) = (mq / n, mq % n);
    // quotient blocks from the top: (offset, size)
    let (mut off, mut b) = if l > 0 { (k * n, l) } else { ((k - 1) * n, n) };
    copy(m, q.sub(off, off + b), f.sub(off + n - 1, off + n - 1 + b), false);
    loop {
        let blk = q.sub(off, off + b);
        let scr = if off >= r.len() { q.sub(0, off) } else { r };
        call(m, |m| ipdiv(m, kit, blk.rev(), g.sub(n - b, n).rev(), scr));
        if off == 0 {
            break;
        }
        // the next window: f minus the contribution of this block
        let nb = q.sub(off - n, off);
        let low_in = fit(blk, n - 1);
        call(m, |m| lower_cs(m, kit, g.sub(0, n - 1), low_in, nb.sub(1, n)));
        negate(m, nb.sub(1, n));
        nb.set(m, 0, 0);
        add_into(m, nb, f.sub(off - 1, off + n - 1), false);
        off -= n;
        b = n;
    }
    let q0 = fit(q.sub(0, b), n - 1);
    call(m, |m| lower_cs(m, kit, g.sub(0, n - 1), q0, r));
    negate(m, r);
    add_into(m, r, f.sub(0, n - 1), false);
}

/// `r = f mod g` using only the scratch view `t` (`1 <= |t| <= n-1`).
pub fn remainder_smallspace<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V, t: V) -> Result<()> {
    let n = g.len();
    if n == 0 || r.len() + 1 != n || f.len() < n {
        return Err(Error::SizeContract);
    }
    if t.is_empty() || t.len() >= n {
        return Err(Error::BadScratch);
    }
    if g.get(m, n - 1) == 0 {
        return Err(Error::NonUnitLeading);
    }
    call(m, |m| rem_small(m, kit, f, g, r, t));
    status(m)
}

pub(crate) fn rem_small<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V, t: V) {
    let n = g.len();
    let s = t.len();
    let mq = f.len() + 1 - n;
    let (k, l) = (mq / s, mq % s);
    copy(m, r, f.sub(mq, mq + n - 1), false);
    let top = if l > 0 { Some((k * s, l)) } else { None };
    let blocks = top.into_iter().chain((0..k).rev().map(|j| (j * s, s)));
    for (o, b) in blocks {
        // r holds coefficients [o+b, o+b+n-1) of the running remainder
        let tb = t.sub(0, b);
        copy(m, tb, r.sub(n - 1 - b, n - 1), false);
        for i in (b..n - 1).rev() {
            let v = r.get(m, i - b);
            r.set(m, i, v);
        }
        call(m, |m| ipdiv(m, kit, tb.rev(), g.sub(n - b, n).rev(), r.sub(0, b)));
        zero(m, r.sub(0, b));
        call(m, |m| scl(m, kit, g.sub(0, n - 1), tb, r, b, true));
        add_into(m, r.sub(0, b), f.sub(o, o + b), false);
    }
}

/// `r = f mod p` for monic `p` of size `|r|+1`, using scratch `t`.
fn rem_to<M: Mem>(m: &mut M, kit: &MulKit, f: V, p: V, r: V, t: V) {
    let d = r.len();
    if f.len() <= d {
        copy(m, r.sub(0, f.len()), f, false);
        zero(m, r.sub(f.len(), d));
    } else {
        let s = t.len().min(d);
        call(m, |m| rem_small(m, kit, f, p, r, t.sub(0, s)));
    }
}

// ---------------------------------------------------------------- evaluation

/// `out = prod (x - a)` over the points, `|out| = |pts| + 1`.
fn subproduct<M: Mem>(m: &mut M, kit: &MulKit, pts: V, out: V, ws: V) {
    let k = pts.len();
    let fl = m.field();
    if k <= SUBPRODUCT_LEAF {
        zero(m, out);
        out.set(m, 0, 1);
        for j in 0..k {
            let a = pts.get(m, j);
            // multiply the size-(j+1) prefix by x - a, top down
            for i in (1..=j + 1).rev() {
                let lo = out.get(m, i - 1);
                let hi = out.get(m, i);
                out.set(m, i, fl.sub(lo, fl.mul(a, hi)));
            }
            let v = out.get(m, 0);
            out.set(m, 0, fl.neg(fl.mul(a, v)));
        }
        m.count_products((k * (k + 1) / 2) as u64);
        return;
    }
    let k0 = k / 2;
    let a = ws.sub(0, k0 + 1);
    let b = ws.sub(k0 + 1, k + 2);
    let rest = ws.sub(k + 2, ws.len());
    call(m, |m| subproduct(m, kit, pts.sub(0, k0), a, rest));
    call(m, |m| subproduct(m, kit, pts.sub(k0, k), b, rest));
    zero(m, out);
    lin::mul_acc_any(m, kit, a, b, out, rest, false);
}

fn need_sub(kit: &MulKit, k: usize) -> usize {
    if k <= SUBPRODUCT_LEAF {
        return 0;
    }
    let (k0, k1) = (k / 2, k - k / 2);
    k + 2 + need_sub(kit, k1).max(kit.c * (k0 + 1))
}

/// Evaluates `f` at every point by splitting the points in halves and
/// reducing `f` modulo each half's subproduct.
fn eval_split<M: Mem>(m: &mut M, kit: &MulKit, f: V, pts: V, out: V, ws: V) {
    let k = pts.len();
    if k <= EVAL_LEAF {
        horner_all(m, f, pts, out);
        return;
    }
    let k0 = k / 2;
    for (lo, hi) in [(0, k0), (k0, k)] {
        let kk = hi - lo;
        let p = pts.sub(lo, hi);
        let mx = ws.sub(0, kk + 1);
        let rx = ws.sub(kk + 1, 2 * kk + 1);
        let rest = ws.sub(2 * kk + 1, ws.len());
        call(m, |m| subproduct(m, kit, p, mx, rest));
        rem_to(m, kit, f, mx, rx, rest);
        call(m, |m| eval_split(m, kit, rx, p, out.sub(lo, hi), rest));
    }
}

fn need_eval(kit: &MulKit, k: usize) -> usize {
    if k <= EVAL_LEAF {
        return 0;
    }
    let k1 = k - k / 2;
    2 * k1 + 1 + need_sub(kit, k1).max(k1).max(need_eval(kit, k1))
}

/// `out_i = f(pts_i)` by Horner's rule, accumulating in `out_i`.
fn horner_all<M: Mem>(m: &mut M, f: V, pts: V, out: V) {
    let fl = m.field();
    for i in 0..pts.len() {
        let a = pts.get(m, i);
        out.set(m, i, 0);
        for j in (0..f.len()).rev() {
            let acc = out.get(m, i);
            let c = f.get(m, j);
            out.set(m, i, fl.mul_add(c, acc, a));
        }
        m.count_products(f.len() as u64);
    }
}

/// Largest `k <= avail` with `k + need(k) <= avail`.
fn largest_fit(avail: usize, need: impl Fn(usize) -> usize) -> usize {
    let mut k = avail;
    while k > 0 && k + need(k) > avail {
        // need grows linearly, so jump close to the answer first
        let nk = need(k);
        k = if nk > 0 { (k * avail / (k + nk)).min(k - 1) } else { k - 1 };
    }
    k
}

/// `out_i = f(pts_i)` for all points, using no registers outside the output.
pub fn mp_eval_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, pts: V, out: V) -> Result<()> {
    if pts.len() != out.len() {
        return Err(Error::SizeContract);
    }
    call(m, |m| eval_cs(m, kit, f, pts, out));
    status(m)
}

pub(crate) fn eval_cs<M: Mem>(m: &mut M, kit: &MulKit, f: V, pts: V, out: V) {
    let n = pts.len();
    let mut done = 0;
    while done < n {
        let avail = n - done;
        let k = largest_fit(avail, |k| need_eval(kit, k));
        if k <= EVAL_LEAF && k < avail {
            break;
        }
        let (p, o) = (pts.sub(done, done + k), out.sub(done, done + k));
        call(m, |m| eval_split(m, kit, f, p, o, out.sub(done + k, n)));
        done += k;
    }
    horner_all(m, f, pts.sub(done, n), out.sub(done, n));
}

// ---------------------------------------------------------------- interpolation

/// Interpolation of `|pts|` points by halves: with `M0`, `M1` the half
/// subproducts, `f = U0 M1 + U1 M0` where `U0` interpolates `v / M1` on the
/// first half and `U1` interpolates `v / M0` on the second.
fn interp_split<M: Mem>(m: &mut M, kit: &MulKit, pts: V, vals: V, out: V, ws: V) {
    let k = pts.len();
    if k == 1 {
        let v = vals.get(m, 0);
        out.set(m, 0, v);
        return;
    }
    let fl = m.field();
    let (k0, k1) = (k / 2, k - k / 2);
    let m0 = ws.sub(0, k0 + 1);
    let m1 = ws.sub(k0 + 1, k + 2);
    let u0 = ws.sub(k + 2, k + 2 + k0);
    let u1 = ws.sub(k + 2 + k0, 2 * k + 2);
    let w = ws.sub(2 * k + 2, 2 * k + 2 + k1);
    let rest = ws.sub(2 * k + 2 + k1, ws.len());
    call(m, |m| subproduct(m, kit, pts.sub(0, k0), m0, rest));
    call(m, |m| subproduct(m, kit, pts.sub(k0, k), m1, rest));
    for (lo, hi, other, u) in [(0, k0, m1, u0), (k0, k, m0, u1)] {
        let p = pts.sub(lo, hi);
        let wv = w.sub(0, hi - lo);
        call(m, |m| eval_split(m, kit, other, p, wv, rest));
        for j in 0..hi - lo {
            let d = wv.get(m, j);
            let v = vals.get(m, lo + j);
            match fl.inv(d) {
                Ok(i) => wv.set(m, j, fl.mul(v, i)),
                Err(_) => m.latch(Error::DuplicatePoint),
            }
        }
        call(m, |m| interp_split(m, kit, p, wv, u, rest));
    }
    zero(m, out);
    lin::mul_acc_any(m, kit, u0, m1, out, rest, false);
    lin::mul_acc_any(m, kit, u1, m0, out, rest, false);
}

fn need_interp(kit: &MulKit, k: usize) -> usize {
    if k <= 1 {
        return 0;
    }
    let k1 = k - k / 2;
    2 * k + 2 + k1 + need_sub(kit, k1).max(need_eval(kit, k1)).max(need_interp(kit, k1)).max(kit.c * k1)
}

/// Workspace needed by [`partial_interp`] for output size `k`.
pub fn partial_interp_space(kit: &MulKit, k: usize) -> usize {
    let inner = need_sub(kit, k)
        .max(kit.c_low * k)
        .max(kit.c * k)
        .max(k)
        .max(need_eval(kit, k))
        .max(need_interp(kit, k));
    8 * k + 2 + inner.max(1)
}

fn check_points<M: Mem>(m: &M, pts: V, shifted: bool) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for i in 0..pts.len() {
        let a = pts.get(m, i);
        if !seen.insert(a) {
            return Err(Error::DuplicatePoint);
        }
        if shifted && a == 0 {
            return Err(Error::ZeroPointWithShift);
        }
    }
    Ok(())
}

/// Given the first `s = |g|` coefficients `g` of the size-n interpolant `f`
/// of `(pts_i, vals_i)`, writes the next `|out|` coefficients, i.e. `h mod
/// x^k` for `f = g + x^s h`. Takes `partial_interp_space(k)` registers from
/// the scratch pool.
pub fn partial_interp<M: Mem>(m: &mut M, kit: &MulKit, g: V, pts: V, vals: V, out: V) -> Result<()> {
    let k = out.len();
    if pts.len() != vals.len() || k > pts.len() || k == 0 {
        return Err(Error::SizeContract);
    }
    check_points(m, pts, !g.is_empty())?;
    let need = partial_interp_space(kit, k);
    let ws = m.alloc_block(need);
    call(m, |m| pinterp(m, kit, g, pts, vals, out, ws));
    m.free_tmp(need);
    status(m)
}

pub(crate) fn pinterp<M: Mem>(m: &mut M, kit: &MulKit, g: V, pts: V, vals: V, out: V, ws: V) {
    let fl = m.field();
    let s = g.len() as u64;
    let np = pts.len();
    let k = out.len();
    let mi = ws.sub(0, k + 1);
    let sk = ws.sub(k + 1, 2 * k + 1);
    let sm = ws.sub(2 * k + 1, 3 * k + 1);
    let mj = ws.sub(3 * k + 1, 4 * k + 2);
    let pr = ws.sub(4 * k + 2, 6 * k + 2);
    let cc = ws.sub(6 * k + 2, 7 * k + 2);
    let dd = ws.sub(7 * k + 2, 8 * k + 2);
    let rest = ws.sub(8 * k + 2, ws.len());
    let blocks = np.div_ceil(k);
    let block = |i: usize| (i * k, ((i + 1) * k).min(np));
    zero(m, out);
    for i in 0..blocks {
        let (lo, hi) = block(i);
        let ki = hi - lo;
        let pi = pts.sub(lo, hi);
        let mi = mi.sub(0, ki + 1);
        let sm = sm.sub(0, ki);
        call(m, |m| subproduct(m, kit, pi, mi, rest));
        // s_i mod x^k and s_i mod m_i, accumulated over the other blocks
        zero(m, sk);
        sk.set(m, 0, 1);
        zero(m, sm);
        sm.set(m, 0, 1);
        for j in (0..blocks).filter(|&j| j != i) {
            let (jlo, jhi) = block(j);
            let kj = jhi - jlo;
            let mj = mj.sub(0, kj + 1);
            call(m, |m| subproduct(m, kit, pts.sub(jlo, jhi), mj, rest));
            let t = pr.sub(0, k);
            lin::low(m, kit, sk, fit(mj, k), t, rest);
            copy(m, sk, t, false);
            let p = pr.sub(0, ki + kj);
            zero(m, p);
            lin::mul_acc_any(m, kit, sm, mj, p, rest, false);
            rem_to(m, kit, p, mi, sm, rest);
        }
        let gm = pr.sub(0, ki);
        rem_to(m, kit, g, mi, gm, rest);
        let (c, d) = (cc.sub(0, ki), dd.sub(0, ki));
        call(m, |m| eval_split(m, kit, sm, pi, c, rest));
        call(m, |m| eval_split(m, kit, gm, pi, d, rest));
        // values of the block's share of h
        for j in 0..ki {
            let a = pi.get(m, j);
            let b = vals.get(m, lo + j);
            let den = fl.mul(fl.pow(a, s), c.get(m, j));
            let num = fl.sub(b, d.get(m, j));
            match fl.inv(den) {
                Ok(iv) => c.set(m, j, fl.mul(num, iv)),
                Err(_) => m.latch(Error::DuplicatePoint),
            }
        }
        call(m, |m| interp_split(m, kit, pi, c, d, rest));
        let t = pr.sub(0, k);
        lin::low(m, kit, d.pad_to(k), sk, t, rest);
        add_into(m, out, t, false);
    }
}

/// `out` = the unique size-n polynomial with `out(pts_i) = vals_i`, using
/// the free part of `out` as workspace and a constant number of pool
/// registers for the last few coefficients.
pub fn interp_cs<M: Mem>(m: &mut M, kit: &MulKit, pts: V, vals: V, out: V) -> Result<()> {
    let n = pts.len();
    if vals.len() != n || out.len() != n {
        return Err(Error::SizeContract);
    }
    check_points(m, pts, n > 1)?;
    call(m, |m| interp_cs_inner(m, kit, pts, vals, out));
    status(m)
}

pub(crate) fn interp_cs_inner<M: Mem>(m: &mut M, kit: &MulKit, pts: V, vals: V, out: V) {
    let n = pts.len();
    let mut done = 0;
    while done < n {
        let avail = n - done;
        let k = largest_fit(avail, |k| partial_interp_space(kit, k));
        if k == 0 {
            break;
        }
        let (p, v) = (pts.sub(0, avail), vals.sub(0, avail));
        let (g, o, ws) = (out.sub(0, done), out.sub(done, done + k), out.sub(done + k, n));
        call(m, |m| pinterp(m, kit, g, p, v, o, ws));
        done += k;
    }
    let need = partial_interp_space(kit, 1);
    while done < n {
        let avail = n - done;
        let ws = m.alloc_block(need);
        let (p, v) = (pts.sub(0, avail), vals.sub(0, avail));
        call(m, |m| pinterp(m, kit, out.sub(0, done), p, v, out.sub(done, done + 1), ws));
        m.free_tmp(need);
        done += 1;
    }
}
