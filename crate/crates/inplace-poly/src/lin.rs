//! Linear-space product kernels on arena views.
//!
//! These are the building blocks the constant-space reductions wrap. Every
//! kernel writes only to its output view and to the workspace view `ws`, whose
//! required size is a fixed multiple of the operand size (see [`MulKit`]).
//! A kernel call counts as one call frame; its inner recursion is not
//! reported as pointer depth.

use crate::arena::{Mem, PolyView as V};
use crate::dense::MulKit;
use crate::ring::Fe;

/// `dst[i] += src[i]` (or `-=` when `neg`) for `i < src.len()`.
#[inline]
pub fn add_into<M: Mem>(m: &mut M, dst: V, src: V, neg: bool) {
    let fl = m.field();
    for i in 0..src.len() {
        let s = src.get(m, i);
        if s == 0 {
            continue;
        }
        let d = dst.get(m, i);
        dst.set(m, i, if neg { fl.sub(d, s) } else { fl.add(d, s) });
    }
}

/// `dst[i] = src[i]`, or `-src[i]` when `neg`.
#[inline]
pub fn copy<M: Mem>(m: &mut M, dst: V, src: V, neg: bool) {
    let fl = m.field();
    for i in 0..src.len() {
        let s = src.get(m, i);
        dst.set(m, i, if neg { fl.neg(s) } else { s });
    }
}

#[inline]
pub fn zero<M: Mem>(m: &mut M, dst: V) {
    for i in 0..dst.len() {
        dst.set(m, i, 0);
    }
}

#[inline]
pub fn negate<M: Mem>(m: &mut M, dst: V) {
    let fl = m.field();
    for i in 0..dst.len() {
        let v = dst.get(m, i);
        dst.set(m, i, fl.neg(v));
    }
}

/// `dst[i] = a[i] + b[i]` (b may be shorter).
#[inline]
fn sum_into<M: Mem>(m: &mut M, dst: V, a: V, b: V) {
    let fl = m.field();
    for i in 0..a.len() {
        let y = if i < b.len() { b.get(m, i) } else { 0 };
        let x = a.get(m, i);
        dst.set(m, i, fl.add(x, y));
    }
}

/// `dst[i] = a[i] - b[i]`.
#[inline]
fn diff_into<M: Mem>(m: &mut M, dst: V, a: V, b: V) {
    let fl = m.field();
    for i in 0..a.len() {
        let x = a.get(m, i);
        let y = b.get(m, i);
        dst.set(m, i, fl.sub(x, y));
    }
}

/// `h[k] += a * b` as one fused statement.
#[inline(always)]
pub fn fma<M: Mem>(m: &mut M, h: V, k: usize, a: Fe, b: Fe, neg: bool) {
    let fl = m.field();
    let p = fl.mul(a, b);
    if p == 0 {
        return;
    }
    let d = h.get(m, k);
    h.set(m, k, if neg { fl.sub(d, p) } else { fl.add(d, p) });
}

/// Schoolbook `h += ±f*g` with `h.len() >= f.len() + g.len() - 1`.
pub fn school_acc<M: Mem>(m: &mut M, f: V, g: V, h: V, neg: bool) {
    let (a, b) = (f.len(), g.len());
    if a == 0 || b == 0 {
        return;
    }
    m.count_products((a * b) as u64);
    let fl = m.field();
    if let (Some((fs, _)), Some((gs, _)), Some((hs, _))) = (f.contiguous(), g.contiguous(), h.contiguous()) {
        if let Some(r) = m.raw() {
            let q = fl.q();
            for k in 0..a + b - 1 {
                let lo = k.saturating_sub(b - 1);
                let hi = k.min(a - 1);
                let mut acc: u128 = 0;
                for i in lo..=hi {
                    acc += (r[fs + i] * r[gs + k - i]) as u128;
                }
                let s = (acc % q as u128) as u64;
                r[hs + k] = if neg { fl.sub(r[hs + k], s) } else { fl.add(r[hs + k], s) };
            }
            return;
        }
    }
    for i in 0..a {
        let x = f.get(m, i);
        if x == 0 {
            continue;
        }
        for j in 0..b {
            let y = g.get(m, j);
            fma(m, h, i + j, x, y, neg);
        }
    }
}

/// Schoolbook `h = f*g mod x^n`, all of size n.
pub fn school_low<M: Mem>(m: &mut M, f: V, g: V, h: V) {
    let n = h.len();
    zero(m, h);
    m.count_products((n * (n + 1) / 2) as u64);
    for k in 0..n {
        for i in 0..=k {
            let x = f.get(m, i);
            let y = g.get(m, k - i);
            fma(m, h, k, x, y, false);
        }
    }
}

/// Schoolbook middle product: `h[t] = sum_j f[b-1+t-j] g[j]`.
pub fn school_mid<M: Mem>(m: &mut M, f: V, g: V, h: V) {
    let b = g.len();
    zero(m, h);
    m.count_products((h.len() * b) as u64);
    for t in 0..h.len() {
        for j in 0..b {
            let x = f.get(m, b - 1 + t - j);
            let y = g.get(m, j);
            fma(m, h, t, x, y, false);
        }
    }
}

/// `h = f*g` for balanced size n; `ws.len() >= kit.c * n`.
pub fn mul_over<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V) {
    let n = f.len();
    debug_assert_eq!(g.len(), n);
    debug_assert!(h.len() >= 2 * n - 1 || n == 0);
    if n == 0 {
        return;
    }
    if n <= kit.leaf {
        zero(m, h.sub(0, 2 * n - 1));
        school_acc(m, f, g, h, false);
        return;
    }
    if n % 2 == 1 {
        let n1 = n - 1;
        mul_over(m, kit, f.sub(0, n1), g.sub(0, n1), h.sub(0, 2 * n1 - 1), ws);
        h.set(m, 2 * n - 3, 0);
        h.set(m, 2 * n - 2, 0);
        peel_top(m, f, g, h, false);
        return;
    }
    let k = n / 2;
    let (f0, f1, g0, g1) = (f.sub(0, k), f.sub(k, n), g.sub(0, k), g.sub(k, n));
    mul_over(m, kit, f0, g0, h.sub(0, 2 * k - 1), ws);
    h.set(m, 2 * k - 1, 0);
    mul_over(m, kit, f1, g1, h.sub(2 * k, 4 * k - 1), ws);
    let fl = m.field();
    // h = [A_lo | A_hi 0 | B_lo | B_hi]; rewrite the middle blocks to
    // [A_hi - B_lo - A_lo | B_lo - A_hi - B_hi] and add the middle product.
    for i in 0..k {
        let d = fl.sub(h.get(m, k + i), h.get(m, 2 * k + i));
        h.set(m, k + i, d);
    }
    for i in 0..k {
        let bh = if i + 1 < k { h.get(m, 3 * k + i) } else { 0 };
        let v = fl.sub(fl.neg(h.get(m, k + i)), bh);
        h.set(m, 2 * k + i, v);
    }
    for i in 0..k {
        let v = fl.sub(h.get(m, k + i), h.get(m, i));
        h.set(m, k + i, v);
    }
    let (sf, sg, rest) = (ws.sub(0, k), ws.sub(k, 2 * k), ws.sub(2 * k, ws.len()));
    sum_into(m, sf, f0, f1);
    sum_into(m, sg, g0, g1);
    mul_acc(m, kit, sf, sg, h.sub(k, 3 * k - 1), rest, false);
}

/// Top-coefficient contribution for odd sizes: with a = f[n-1], b = g[n-1],
/// adds x^(n-1) (a g' + b f') + x^(2n-2) a b.
fn peel_top<M: Mem>(m: &mut M, f: V, g: V, h: V, neg: bool) {
    let n = f.len();
    let a = f.get(m, n - 1);
    let b = g.get(m, n - 1);
    m.count_products((2 * n - 1) as u64);
    for i in 0..n - 1 {
        let gi = g.get(m, i);
        fma(m, h, n - 1 + i, a, gi, neg);
        let fi = f.get(m, i);
        fma(m, h, n - 1 + i, b, fi, neg);
    }
    fma(m, h, 2 * n - 2, a, b, neg);
}

/// `h += ±f*g` for balanced size n; `ws.len() >= kit.c * n`.
pub fn mul_acc<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V, neg: bool) {
    let n = f.len();
    debug_assert_eq!(g.len(), n);
    if n == 0 {
        return;
    }
    if n <= kit.leaf {
        school_acc(m, f, g, h, neg);
        return;
    }
    if n % 2 == 1 {
        let n1 = n - 1;
        mul_acc(m, kit, f.sub(0, n1), g.sub(0, n1), h, ws, neg);
        peel_top(m, f, g, h, neg);
        return;
    }
    let k = n / 2;
    let (f0, f1, g0, g1) = (f.sub(0, k), f.sub(k, n), g.sub(0, k), g.sub(k, n));
    let t = ws.sub(0, 2 * k - 1);
    let rest = ws.sub(2 * k - 1, ws.len());
    mul_over(m, kit, f0, g0, t, rest);
    add_into(m, h.sub(0, 2 * k - 1), t, neg);
    add_into(m, h.sub(k, 3 * k - 1), t, !neg);
    mul_over(m, kit, f1, g1, t, rest);
    add_into(m, h.sub(2 * k, 4 * k - 1), t, neg);
    add_into(m, h.sub(k, 3 * k - 1), t, !neg);
    let (sf, sg) = (ws.sub(0, k), ws.sub(k, 2 * k));
    sum_into(m, sf, f0, f1);
    sum_into(m, sg, g0, g1);
    mul_acc(m, kit, sf, sg, h.sub(k, 3 * k - 1), ws.sub(2 * k, ws.len()), neg);
}

/// `h += ±f*g` for arbitrary sizes, by balanced chunks of the smaller size.
/// Needs `ws.len() >= kit.c * min(|f|, |g|)`.
pub fn mul_acc_any<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V, neg: bool) {
    let (f, g) = if f.len() >= g.len() { (f, g) } else { (g, f) };
    let (a, b) = (f.len(), g.len());
    if b == 0 {
        return;
    }
    let full = a / b;
    for i in 0..full {
        mul_acc(m, kit, f.sub(i * b, i * b + b), g, h.sub(i * b, i * b + 2 * b - 1), ws, neg);
    }
    let r = a - full * b;
    if r > 0 {
        let s = full * b;
        mul_acc_any(m, kit, g, f.sub(s, a), h.sub(s, s + b + r - 1), ws, neg);
    }
}

/// `h = f*g mod x^n`, all of size n; `ws.len() >= kit.c_low * n`.
pub fn low<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V) {
    let n = h.len();
    if n == 0 {
        return;
    }
    if n <= kit.leaf {
        school_low(m, f, g, h);
        return;
    }
    if n % 2 == 1 {
        let n1 = n - 1;
        low(m, kit, f.sub(0, n1), g.sub(0, n1), h.sub(0, n1), ws);
        h.set(m, n1, 0);
        m.count_products(n as u64);
        for i in 0..n {
            let x = f.get(m, i);
            let y = g.get(m, n1 - i);
            fma(m, h, n1, x, y, false);
        }
        return;
    }
    let k = n / 2;
    mul_over(m, kit, f.sub(0, k), g.sub(0, k), h.sub(0, 2 * k - 1), ws);
    h.set(m, n - 1, 0);
    let t = ws.sub(0, k);
    let rest = ws.sub(k, ws.len());
    low(m, kit, f.sub(0, k), g.sub(k, n), t, rest);
    add_into(m, h.sub(k, n), t, false);
    low(m, kit, f.sub(k, n), g.sub(0, k), t, rest);
    add_into(m, h.sub(k, n), t, false);
}

/// `h = (f*g) quo x^n` with f, g of size n and h of size n-1, through the
/// reversed lower product.
pub fn upp<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V) {
    let n = f.len();
    if n <= 1 {
        return;
    }
    low(m, kit, f.sub(1, n).rev(), g.sub(1, n).rev(), h.rev(), ws);
}

/// Balanced middle product: `|f| = 2n-1`, `|g| = |h| = n`,
/// `h = [f*g]_{n-1}^{2n-1}`; `ws.len() >= kit.c_mid * n`.
pub fn mid<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V) {
    let n = g.len();
    debug_assert_eq!(f.len(), 2 * n - 1);
    if n == 0 {
        return;
    }
    if n <= kit.leaf {
        school_mid(m, f, g, h);
        return;
    }
    if n % 2 == 1 {
        let n1 = n - 1;
        mid(m, kit, f.sub(0, 2 * n1 - 1), g.sub(1, n), h.sub(0, n1), ws);
        let g0 = g.get(m, 0);
        m.count_products((n1 + n) as u64);
        for t in 0..n1 {
            let x = f.get(m, n - 1 + t);
            fma(m, h, t, x, g0, false);
        }
        h.set(m, n1, 0);
        for j in 0..n {
            let x = f.get(m, 2 * n - 2 - j);
            let y = g.get(m, j);
            fma(m, h, n1, x, y, false);
        }
        return;
    }
    // Transposed Karatsuba: with F_i = f[ik, ik+2k-1),
    // r0 = P + Mid(F0 - F1, g1), r1 = P + Mid(F2 - F1, g0), P = Mid(F1, g0 + g1).
    let k = n / 2;
    let (g0, g1) = (g.sub(0, k), g.sub(k, n));
    let f0 = f.sub(0, 2 * k - 1);
    let f1 = f.sub(k, 3 * k - 1);
    let f2 = f.sub(2 * k, 4 * k - 1);
    let (h0, h1) = (h.sub(0, k), h.sub(k, n));
    let sg = ws.sub(0, k);
    sum_into(m, sg, g0, g1);
    mid(m, kit, f1, sg, h0, ws.sub(k, ws.len()));
    copy(m, h1, h0, false);
    let d = ws.sub(0, 2 * k - 1);
    let t = ws.sub(2 * k - 1, 3 * k - 1);
    let rest = ws.sub(3 * k - 1, ws.len());
    diff_into(m, d, f0, f1);
    mid(m, kit, d, g1, t, rest);
    add_into(m, h0, t, false);
    diff_into(m, d, f2, f1);
    mid(m, kit, d, g0, t, rest);
    add_into(m, h1, t, false);
}

/// Unbalanced middle product `h = [f*g]_{|g|-1}^{|g|-1+|h|}` with
/// `|f| = |h| + |g| - 1`; `ws.len() >= (kit.c_mid + 1) * min(|h|, |g|)`.
pub fn mid_any<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, ws: V) {
    let (l, b) = (h.len(), g.len());
    debug_assert_eq!(f.len() + 1, l + b);
    if l == 0 {
        return;
    }
    if b == 0 {
        zero(m, h);
        return;
    }
    if l == b {
        mid(m, kit, f, g, h, ws);
    } else if l < b {
        let chunks = b.div_ceil(l);
        let pad = chunks * l - b;
        let gp = g.pad_to(chunks * l);
        let fp = f.shift_up(pad);
        let t = ws.sub(0, l);
        let rest = ws.sub(l, ws.len());
        for j in 0..chunks {
            let s = (chunks - 1 - j) * l;
            let fw = fp.sub(s, s + 2 * l - 1);
            let gj = gp.sub(j * l, j * l + l);
            if j == 0 {
                mid(m, kit, fw, gj, h, ws);
            } else {
                mid(m, kit, fw, gj, t, rest);
                add_into(m, h, t, false);
            }
        }
    } else {
        let full = l / b;
        for i in 0..full {
            mid(m, kit, f.sub(i * b, i * b + 2 * b - 1), g, h.sub(i * b, i * b + b), ws);
        }
        let r = l - full * b;
        if r > 0 {
            let s = full * b;
            mid_any(m, kit, f.sub(s, s + r + b - 1), g, h.sub(s, l), ws);
        }
    }
}

/// `g = f^{-1} mod x^n` by Newton iteration; `f[0]` must be a unit and
/// `ws.len() >= kit.c_inv * n`.
pub fn inv<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, ws: V) {
    let n = g.len();
    if n == 0 {
        return;
    }
    let fl = m.field();
    let f0 = f.get(m, 0);
    g.set(m, 0, fl.inv(f0).expect("caller checks the constant coefficient"));
    if n <= kit.leaf {
        naive_inv_tail(m, f, g, 1);
        return;
    }
    let mut k = 1;
    while k < n {
        let l = k.min(n - k);
        let e = g.sub(k, k + l);
        mid_any(m, kit, f.sub(1, k + l), g.sub(0, k), e, ws);
        let t = ws.sub(0, l);
        low(m, kit, g.sub(0, l), e, t, ws.sub(l, ws.len()));
        copy(m, e, t, true);
        k += l;
    }
}

/// Completes `g[from..]` with `g_i = -g_0 sum_{j=1}^{i} f_j g_{i-j}`,
/// accumulating in `g_i` itself.
pub fn naive_inv_tail<M: Mem>(m: &mut M, f: V, g: V, from: usize) {
    let fl = m.field();
    let g0 = g.get(m, 0);
    for i in from..g.len() {
        g.set(m, i, 0);
        m.count_products(i as u64 + 1);
        for j in 1..=i {
            let x = f.get(m, j);
            let y = g.get(m, i - j);
            fma(m, g, i, x, y, false);
        }
        let v = g.get(m, i);
        g.set(m, i, fl.neg(fl.mul(g0, v)));
    }
}
