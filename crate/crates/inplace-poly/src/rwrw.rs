//! Cumulative and in-place algorithms with read-write inputs.
//!
//! Inputs may be modified while an operation runs but hold their original
//! values again when it returns. Products are accumulated into the output
//! through pre- and post-additions, so no workspace is taken beyond a scalar
//! temporary for running powers.

use crate::arena::{call, Mem, PolyView as V};
use crate::dense::{bit_reverse, ntt, Direction, MulKit};
use crate::error::{Error, Result};
use crate::lin::{add_into, fma, negate, school_acc};
use crate::ring::{Fe, Field, RootOfUnity};

fn status<M: Mem>(m: &M) -> Result<()> {
    match m.fault() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn disjoint(views: &[V]) -> Result<()> {
    for (i, a) in views.iter().enumerate() {
        for b in &views[i + 1..] {
            if a.overlaps(b) {
                return Err(Error::Aliasing);
            }
        }
    }
    Ok(())
}

/// Number of coefficients up to the last nonzero one.
fn real_size<M: Mem>(m: &M, v: V) -> usize {
    (0..v.len()).rev().find(|&i| v.get(m, i) != 0).map_or(0, |i| i + 1)
}

fn scale<M: Mem>(m: &mut M, v: V, s: Fe) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (v.contiguous(), m.raw()) {
        r[st..st + n].iter_mut().for_each(|x| *x = fl.mul(*x, s));
        return;
    }
    for i in 0..v.len() {
        let x = v.get(m, i);
        v.set(m, i, fl.mul(x, s));
    }
}

/// `h[i] -= h[i-s]` ascending: division by `1 + x^s` modulo `x^len`.
fn div_one_plus<M: Mem>(m: &mut M, h: V, s: usize) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (h.contiguous(), m.raw()) {
        let a = &mut r[st..st + n];
        for i in s..n {
            a[i] = fl.sub(a[i], a[i - s]);
        }
        return;
    }
    for i in s..h.len() {
        let y = h.get(m, i - s);
        if y != 0 {
            let x = h.get(m, i);
            h.set(m, i, fl.sub(x, y));
        }
    }
}

/// `h[i] += h[i-s]` descending: multiplication by `1 + x^s` modulo `x^len`.
fn mul_one_plus<M: Mem>(m: &mut M, h: V, s: usize) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (h.contiguous(), m.raw()) {
        let a = &mut r[st..st + n];
        for i in (s..n).rev() {
            a[i] = fl.add(a[i], a[i - s]);
        }
        return;
    }
    for i in (s..h.len()).rev() {
        let y = h.get(m, i - s);
        if y != 0 {
            let x = h.get(m, i);
            h.set(m, i, fl.add(x, y));
        }
    }
}

// ---------------------------------------------------------------- products

/// `h += ±f*g` for `|f| = |g| = n`, `|h| = 2n-1`.
fn kara_eq<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, neg: bool) {
    let n = f.len();
    if n <= kit.leaf {
        school_acc(m, f, g, h, neg);
        return;
    }
    let mm = n.div_ceil(2);
    let d = n - mm;
    let (f0, f1, g0, g1) = (f.sub(0, mm), f.sub(mm, n), g.sub(0, mm), g.sub(mm, n));
    div_one_plus(m, h, mm);
    call(m, |m| kara_eq(m, kit, f0, g0, h.sub(0, 2 * mm - 1), neg));
    call(m, |m| kara_eq(m, kit, f1, g1, h.sub(mm, mm + 2 * d - 1), neg));
    mul_one_plus(m, h, mm);
    add_into(m, f0, f1, true);
    add_into(m, g0, g1, true);
    call(m, |m| kara_eq(m, kit, f0, g0, h.sub(mm, 3 * mm - 1), !neg));
    add_into(m, f0, f1, false);
    add_into(m, g0, g1, false);
}

/// `h += ±f*g` with `|h| = |f| + |g| - 1`, any sizes.
fn cum_mul<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V, mut h: V, neg: bool) {
    loop {
        if f.len() < g.len() {
            std::mem::swap(&mut f, &mut g);
        }
        let (a, b) = (f.len(), g.len());
        if b == 0 {
            return;
        }
        let blocks = a / b;
        for j in 0..blocks {
            kara_eq(m, kit, f.sub(j * b, j * b + b), g, h.sub(j * b, j * b + 2 * b - 1), neg);
        }
        let rest = a - blocks * b;
        if rest == 0 {
            return;
        }
        let o = blocks * b;
        h = h.sub(o, o + rest + b - 1);
        f = f.sub(o, a);
    }
}

/// `h += ±f*g mod x^n`, all of size n.
fn cum_lower<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V, mut h: V, neg: bool) {
    loop {
        let n = f.len();
        if n == 0 {
            return;
        }
        if n <= kit.leaf {
            m.count_products((n * (n + 1) / 2) as u64);
            for i in 0..n {
                let x = f.get(m, i);
                if x == 0 {
                    continue;
                }
                for j in 0..n - i {
                    let y = g.get(m, j);
                    fma(m, h, i + j, x, y, neg);
                }
            }
            return;
        }
        let mm = n.div_ceil(2);
        let d = n - mm;
        let (f0, g0, g1) = (f.sub(0, mm), g.sub(0, mm), g.sub(mm, n));
        let g0d = g.sub(0, d);
        add_into(m, g0d, g1, true);
        cum_mul(m, kit, f0, g0, h.sub(0, 2 * mm - 1), neg);
        add_into(m, g0d, g1, false);
        add_into(m, h.sub(mm, n), h.sub(0, d), true);
        cum_mul(m, kit, f0, g1, h.sub(0, n - 1), neg);
        add_into(m, h.sub(mm, n), h.sub(0, d), false);
        f = f.sub(mm, n);
        g = g0d;
        h = h.sub(mm, n);
    }
}

/// `h += ±(x^p fr)*g mod x^k` with `|g| = |h| = k` and `|fr| <= k - p`.
fn cum_low_pad<M: Mem>(m: &mut M, kit: &MulKit, fr: V, p: usize, g: V, h: V, neg: bool) {
    let k = h.len();
    let a = fr.len();
    if p >= k || a == 0 {
        return;
    }
    let kk = k - p;
    let (g2, h2) = (g.sub(0, kk), h.sub(p, k));
    if a == kk {
        cum_lower(m, kit, fr, g2, h2, neg);
        return;
    }
    cum_mul(m, kit, fr, g2.sub(0, kk - a + 1), h2, neg);
    if a > 1 {
        let c = kk - a + 1;
        cum_lower(m, kit, fr.sub(0, a - 1), g2.sub(c, kk), h2.sub(c, kk), neg);
    }
}

/// `h += ±Mid(F, g)` where `F_u = f[u + off]` and zero outside `f`.
fn cum_mid<M: Mem>(m: &mut M, kit: &MulKit, f: V, off: isize, g: V, h: V, neg: bool) {
    let (n, r, lf) = (g.len(), h.len(), f.len() as isize);
    if n == 0 || r == 0 || off >= lf || off + (r + n - 1) as isize <= 0 {
        return;
    }
    if r >= n {
        let blocks = r / n;
        for b in 0..blocks {
            cum_mid_eq(m, kit, f, off + (b * n) as isize, g, h.sub(b * n, b * n + n), neg);
        }
        if r > blocks * n {
            let o = blocks * n;
            call(m, |m| cum_mid(m, kit, f, off + o as isize, g, h.sub(o, r), neg));
        }
        return;
    }
    let mut c = 0;
    while c < n {
        let nc = r.min(n - c);
        let oc = off + (n - c - nc) as isize;
        if nc == r {
            cum_mid_eq(m, kit, f, oc, g.sub(c, c + nc), h, neg);
        } else {
            call(m, |m| cum_mid(m, kit, f, oc, g.sub(c, c + nc), h, neg));
        }
        c += nc;
    }
}

fn cum_mid_eq<M: Mem>(m: &mut M, kit: &MulKit, f: V, off: isize, g: V, h: V, neg: bool) {
    let n = g.len() as isize;
    let lf = f.len() as isize;
    let base = off + n - 1;
    let lo = (-base).max(0);
    let hi = (lf - base).min(n);
    if lo < hi {
        let fr = f.sub((base + lo) as usize, (base + hi) as usize);
        cum_low_pad(m, kit, fr, lo as usize, g, h, neg);
    }
    if n > 1 {
        let vlo = (off + n - 1 - lf).max(0);
        let vhi = (n - 1).min(off + n - 1);
        if vlo < vhi {
            let fr = f.sub((off + n - 1 - vhi) as usize, (off + n - 1 - vlo) as usize).rev();
            let nu = n as usize;
            cum_low_pad(m, kit, fr, vlo as usize, g.sub(1, nu).rev(), h.sub(0, nu - 1).rev(), neg);
        }
    }
}

fn cum_slice<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, s: usize, neg: bool) {
    cum_mid(m, kit, f, s as isize - g.len() as isize + 1, g, h, neg);
}

/// `h += f*g`. Sizes are `m`, `n` and `m+n-1`; f and g are restored.
pub fn cumulative_karatsuba<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V) -> Result<()> {
    if f.is_empty() || g.is_empty() {
        return Ok(());
    }
    if h.len() != f.len() + g.len() - 1 {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g, h])?;
    call(m, |m| cum_mul(m, kit, f, g, h, false));
    status(m)
}

/// `h += f*g mod x^n` for operands of size n.
pub fn cumulative_lower<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V) -> Result<()> {
    if g.len() != f.len() || h.len() != f.len() {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g, h])?;
    call(m, |m| cum_lower(m, kit, f, g, h, false));
    status(m)
}

/// `h += [f*g]_s^{s+r}` where `r = |h|`.
pub fn cumulative_slice<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, s: usize) -> Result<()> {
    let (a, b, r) = (f.len(), g.len(), h.len());
    if a == 0 || b == 0 || r == 0 || r >= a + b || s >= a + b - r {
        return Err(Error::BadSlice);
    }
    disjoint(&[f, g, h])?;
    call(m, |m| cum_slice(m, kit, f, g, h, s, false));
    status(m)
}

/// `h += f*g mod x^n - lambda` for operands of size n.
pub fn cumulative_convolution<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, h: V, lambda: Fe) -> Result<()> {
    let n = f.len();
    if g.len() != n || h.len() != n {
        return Err(Error::SizeContract);
    }
    let fl = m.field();
    let lambda = lambda % fl.q();
    if lambda == 0 {
        return Err(Error::LambdaZero);
    }
    disjoint(&[f, g, h])?;
    if n == 0 {
        return Ok(());
    }
    let li = fl.inv(lambda)?;
    call(m, |m| {
        let half = n.div_ceil(2);
        let s = n % 2;
        let (f0, f1, g0, g1) = (f.sub(0, half), f.sub(half, n), g.sub(0, half), g.sub(half, n));
        cum_mul(m, kit, f0, g0, h.sub(0, 2 * half - 1), false);
        scale(m, h, li);
        if n > 1 {
            cum_mul(m, kit, f1, g1, h.sub(s, n - 1), false);
        }
        scale(m, h.sub(half, n), lambda);
        let rot = h.sub(half, n).concat(&h.sub(0, half));
        if n > 1 {
            cum_mul(m, kit, f0, g1, rot.sub(0, n - 1), false);
            cum_mul(m, kit, f1, g0, rot.sub(0, n - 1), false);
        }
        scale(m, h.sub(0, half), lambda);
    });
    status(m)
}

// ---------------------------------------------------------------- transforms

/// `f[i-b] += c*f[i]` for i descending from `|f|-1` to `b`.
fn fold_down<M: Mem>(m: &mut M, f: V, b: usize, c: Fe) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (f.contiguous(), m.raw()) {
        let a = &mut r[st..st + n];
        for i in (b..n).rev() {
            a[i - b] = fl.mul_add(a[i - b], a[i], c);
        }
        return;
    }
    for i in (b..f.len()).rev() {
        let y = f.get(m, i);
        fma(m, f, i - b, y, c, false);
    }
}

/// Inverse of [`fold_down`].
fn unfold_up<M: Mem>(m: &mut M, f: V, b: usize, c: Fe) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (f.contiguous(), m.raw()) {
        let a = &mut r[st..st + n];
        let nc = fl.neg(c);
        for i in b..n {
            a[i - b] = fl.mul_add(a[i - b], a[i], nc);
        }
        return;
    }
    for i in b..f.len() {
        let y = f.get(m, i);
        fma(m, f, i - b, y, c, true);
    }
}

/// `v[i] *= t^i`, the running power kept in one scratch register.
fn twist<M: Mem>(m: &mut M, v: V, t: Fe) {
    let fl = m.field();
    if let (Some((st, n)), Some(r)) = (v.contiguous(), m.raw()) {
        let mut w = 1;
        for x in &mut r[st..st + n] {
            *x = fl.mul(*x, w);
            w = fl.mul(w, t);
        }
        return;
    }
    let k = m.alloc_tmp();
    m.set(k, 1);
    for i in 0..v.len() {
        let w = m.get(k);
        let x = v.get(m, i);
        v.set(m, i, fl.mul(x, w));
        m.set(k, fl.mul(w, t));
    }
    m.free_tmp(1);
}

/// `dst[i mod D] += w * src[i] * c^(i div D)`: reduction of src modulo `x^D - c`.
fn fold_into<M: Mem>(m: &mut M, dst: V, src: V, c: Fe, w: Fe) {
    let fl = m.field();
    let d = dst.len();
    if let (Some((ds, _)), Some((ss, sn)), Some(r)) = (dst.contiguous(), src.contiguous(), m.raw()) {
        let mut w = w;
        for chunk in (0..sn).step_by(d) {
            let e = (chunk + d).min(sn);
            for i in chunk..e {
                r[ds + i - chunk] = fl.mul_add(r[ds + i - chunk], r[ss + i], w);
            }
            w = fl.mul(w, c);
        }
        return;
    }
    let k = m.alloc_tmp();
    m.set(k, w);
    for i in 0..src.len() {
        if i > 0 && i % d == 0 {
            let w = m.get(k);
            m.set(k, fl.mul(w, c));
        }
        let w = m.get(k);
        let x = src.get(m, i);
        fma(m, dst, i % d, x, w, false);
    }
    m.free_tmp(1);
}

fn log2_exact(order: u64) -> Result<u32> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::BadParams);
    }
    Ok(order.trailing_zeros())
}

/// Root of order `2^e` derived from a root of order `2^p`.
fn sub_root(fl: Field, root: RootOfUnity, p: u32, e: u32) -> RootOfUnity {
    RootOfUnity { omega: fl.pow(root.omega, 1u64 << (p - e)), order: 1u64 << e }
}

fn pft<M: Mem>(m: &mut M, f: V, k: usize, l: u32, root: RootOfUnity, p: u32, dir: Direction) -> Result<()> {
    let fl = m.field();
    let b = 1usize << l;
    let tau = fl.pow(root.omega, bit_reverse((k << l) as u64, p)?);
    let c = fl.pow(tau, b as u64);
    let zeta = sub_root(fl, root, p, l);
    let head = f.sub(0, b);
    match dir {
        Direction::Fwd => {
            fold_down(m, f, b, c);
            if tau != 1 {
                twist(m, head, tau);
            }
            ntt(m, head, zeta, Direction::Fwd)
        }
        Direction::Inv => {
            ntt(m, head, zeta, Direction::Inv)?;
            if tau != 1 {
                twist(m, head, fl.inv(tau)?);
            }
            unfold_up(m, f, b, c);
            Ok(())
        }
    }
}

/// Replaces `f[0, 2^l)` by the values of f at `omega^[k*2^l + i]` (bit
/// reversal over p bits, `2^p` the order of omega); `Inv` undoes it.
pub fn partial_ft<M: Mem>(m: &mut M, f: V, k: usize, l: u32, root: RootOfUnity, dir: Direction) -> Result<()> {
    let p = log2_exact(root.order)?;
    if l > p || (1usize << l) > f.len() || ((k + 1) << l) as u64 > root.order {
        return Err(Error::BadParams);
    }
    call(m, |m| pft(m, f, k, l, root, p, dir))?;
    status(m)
}

/// Blocks `(offset, log size)` of the binary decomposition of `len`.
fn tft_blocks(len: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut d = 0;
    for e in (0..usize::BITS).rev() {
        if len >> e & 1 == 1 {
            out.push((d, e));
            d += 1 << e;
        }
    }
    out
}

/// Truncated transform of h: slot i holds `h(omega^[i])`, p bits.
pub fn tft<M: Mem>(m: &mut M, h: V, root: RootOfUnity, dir: Direction) -> Result<()> {
    let p = log2_exact(root.order)?;
    let len = h.len();
    if len as u64 > root.order {
        return Err(Error::BadParams);
    }
    let fl = m.field();
    let blocks = tft_blocks(len);
    let mut consts = Vec::with_capacity(blocks.len());
    for &(d, e) in &blocks {
        let tau = fl.pow(root.omega, bit_reverse(d as u64, p)?);
        consts.push((tau, fl.pow(tau, 1u64 << e)));
    }
    // Block j receives the sum over a <= j of w_a * (R_a mod x^(2^e_j) - c_j),
    // with w_a the product of -2*c_b over b < a.
    let mut weights = Vec::with_capacity(blocks.len());
    let mut w = 1;
    for &(_, c) in &consts {
        weights.push(w);
        w = fl.mul(w, fl.neg(fl.add(c, c)));
    }
    let blk = |j: usize| h.sub(blocks[j].0, blocks[j].0 + (1 << blocks[j].1));
    let tail = |j: usize| h.sub(blocks[j].0, len);
    match dir {
        Direction::Fwd => {
            for j in 0..blocks.len() {
                fold_down(m, tail(j), 1 << blocks[j].1, consts[j].1);
            }
            for j in (0..blocks.len()).rev() {
                let v = blk(j);
                if weights[j] != 1 {
                    scale(m, v, weights[j]);
                }
                for a in 0..j {
                    fold_into(m, v, blk(a), consts[j].1, weights[a]);
                }
                if consts[j].0 != 1 {
                    twist(m, v, consts[j].0);
                }
                ntt(m, v, sub_root(fl, root, p, blocks[j].1), Direction::Fwd)?;
            }
        }
        Direction::Inv => {
            for j in 0..blocks.len() {
                let v = blk(j);
                ntt(m, v, sub_root(fl, root, p, blocks[j].1), Direction::Inv)?;
                if consts[j].0 != 1 {
                    twist(m, v, fl.inv(consts[j].0)?);
                }
                for a in 0..j {
                    fold_into(m, v, blk(a), consts[j].1, fl.neg(weights[a]));
                }
                if weights[j] != 1 {
                    scale(m, v, fl.inv(weights[j])?);
                }
            }
            for j in (0..blocks.len()).rev() {
                unfold_up(m, tail(j), 1 << blocks[j].1, consts[j].1);
            }
        }
    }
    status(m)
}

/// `h[o+i] += f[i]*g[go+i]` for `i < n`.
fn pointwise<M: Mem>(m: &mut M, h: V, o: usize, f: V, g: V, go: usize, n: usize) {
    let fl = m.field();
    m.count_products(n as u64);
    if let (Some((hs, _)), Some((fs, _)), Some((gs, _)), Some(r)) = (h.contiguous(), f.contiguous(), g.contiguous(), m.raw()) {
        for i in 0..n {
            r[hs + o + i] = fl.mul_add(r[hs + o + i], r[fs + i], r[gs + go + i]);
        }
        return;
    }
    for i in 0..n {
        let x = f.get(m, i);
        let y = g.get(m, go + i);
        fma(m, h, o + i, x, y, false);
    }
}

fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.leading_zeros()
}

fn fft_mul<M: Mem>(m: &mut M, mut f: V, mut g: V, h: V, root: RootOfUnity, p: u32) -> Result<()> {
    if f.len() > g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    let (a, b, len) = (f.len(), g.len(), h.len());
    tft(m, h, root, Direction::Fwd)?;
    let mut done = 0;
    while done < len {
        let r = len - done;
        let l = floor_log2(r.min(a));
        let t = floor_log2(r.min(b)) - l;
        let bl = 1usize << (l + t);
        pft(m, g, done >> (l + t), l + t, root, p, Direction::Fwd)?;
        for s in 0..1usize << t {
            let k = (done >> l) + s;
            pft(m, f, k, l, root, p, Direction::Fwd)?;
            pointwise(m, h, done + (s << l), f, g, s << l, 1 << l);
            pft(m, f, k, l, root, p, Direction::Inv)?;
        }
        pft(m, g, done >> (l + t), l + t, root, p, Direction::Inv)?;
        done += bl;
    }
    tft(m, h, root, Direction::Inv)
}

/// `h += f*g` through partial transforms, using a root of order `2^p`,
/// `2^p >= |f| + |g| - 1`.
pub fn cumulative_fft_mul_with<M: Mem>(m: &mut M, f: V, g: V, h: V, root: RootOfUnity) -> Result<()> {
    if f.is_empty() || g.is_empty() {
        return Ok(());
    }
    if h.len() != f.len() + g.len() - 1 {
        return Err(Error::SizeContract);
    }
    let p = log2_exact(root.order)?;
    if (h.len() as u64) > root.order {
        return Err(Error::BadParams);
    }
    disjoint(&[f, g, h])?;
    call(m, |m| fft_mul(m, f, g, h, root, p))?;
    status(m)
}

/// [`cumulative_fft_mul_with`] using the smallest suitable root of the field.
pub fn cumulative_fft_mul<M: Mem>(m: &mut M, f: V, g: V, h: V) -> Result<()> {
    if f.is_empty() || g.is_empty() {
        return Ok(());
    }
    let order = ((f.len() + g.len() - 1) as u64).next_power_of_two();
    let root = m.field().find_principal_root(order)?;
    cumulative_fft_mul_with(m, f, g, h, root)
}

// ---------------------------------------------------------------- in place

/// `f = f*g mod x^n`.
fn ip_low<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V) {
    let fl = m.field();
    loop {
        let n = f.len();
        if n == 0 {
            return;
        }
        if n <= kit.leaf {
            m.count_products((n * (n + 1) / 2) as u64);
            let g0 = g.get(m, 0);
            for i in (0..n).rev() {
                let x = f.get(m, i);
                f.set(m, i, fl.mul(x, g0));
                for j in 0..i {
                    let x = f.get(m, j);
                    let y = g.get(m, i - j);
                    fma(m, f, i, x, y, false);
                }
            }
            return;
        }
        let k = n.div_ceil(2);
        call(m, |m| ip_low(m, kit, f.sub(k, n), g.sub(0, n - k)));
        cum_slice(m, kit, f.sub(0, k), g.sub(1, n), f.sub(k, n), k - 1, false);
        f = f.sub(0, k);
        g = g.sub(0, k);
    }
}

/// `f = f/g mod x^n`, `g[0]` a unit.
fn ip_div<M: Mem>(m: &mut M, kit: &MulKit, mut f: V, mut g: V) -> Result<()> {
    let fl = m.field();
    loop {
        let n = f.len();
        if n == 0 {
            return Ok(());
        }
        if n <= kit.leaf {
            m.count_products((n * (n + 1) / 2) as u64);
            let gi = fl.inv(g.get(m, 0)).map_err(|_| Error::NonUnit)?;
            for i in 0..n {
                for j in 1..=i {
                    let x = f.get(m, i - j);
                    let y = g.get(m, j);
                    fma(m, f, i, x, y, true);
                }
                let x = f.get(m, i);
                f.set(m, i, fl.mul(x, gi));
            }
            return Ok(());
        }
        let k = n.div_ceil(2);
        call(m, |m| ip_div(m, kit, f.sub(0, k), g.sub(0, k)))?;
        cum_slice(m, kit, f.sub(0, k), g.sub(1, n), f.sub(k, n), k - 1, true);
        f = f.sub(k, n);
        g = g.sub(0, n - k);
    }
}

/// `f = f*g mod x^n`; g is restored.
pub fn inplace_lower<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V) -> Result<()> {
    if g.len() != f.len() {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g])?;
    call(m, |m| ip_low(m, kit, f, g));
    status(m)
}

/// `f = f/g mod x^n`. In reversed mode both operands are read from their
/// last coefficient down.
pub fn inplace_series_div<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, reversed: bool) -> Result<()> {
    if g.len() != f.len() {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g])?;
    let (f, g) = if reversed { (f.rev(), g.rev()) } else { (f, g) };
    if f.is_empty() {
        return Ok(());
    }
    if g.get(m, 0) == 0 {
        return Err(Error::NonUnit);
    }
    call(m, |m| ip_div(m, kit, f, g))?;
    status(m)
}

fn check_leading<M: Mem>(m: &M, g: V) -> Result<()> {
    if g.is_empty() {
        return Err(Error::SizeContract);
    }
    if g.get(m, g.len() - 1) == 0 {
        return Err(Error::NonUnitLeading);
    }
    Ok(())
}

fn rem_rw<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V) -> Result<()> {
    let n = g.len();
    if n == 1 {
        return Ok(());
    }
    let b = n - 1;
    let blocks = f.len().saturating_sub(b).div_ceil(b);
    let fp = f.pad_to((blocks + 1) * b);
    for i in 0..b {
        let x = fp.get(m, blocks * b + i);
        r.set(m, i, x);
    }
    for j in (0..blocks).rev() {
        ip_div(m, kit, r.rev(), g.sub(1, n).rev())?;
        ip_low(m, kit, r, g.sub(0, b));
        negate(m, r);
        add_into(m, r, fp.sub(j * b, j * b + b), false);
    }
    Ok(())
}

/// `r = f mod g` with `|r| = |g| - 1`; f and g are restored.
pub fn remainder_rwrw<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V) -> Result<()> {
    check_leading(m, g)?;
    if r.len() != g.len() - 1 {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g, r])?;
    call(m, |m| rem_rw(m, kit, f, g, r))?;
    status(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivremDirection {
    Apply,
    Undo,
}

fn divrem_rw<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, dir: DivremDirection) -> Result<()> {
    let fl = m.field();
    let n = g.len();
    let mq = f.len() + 1 - n;
    if n == 1 {
        let g0 = g.get(m, 0);
        scale(m, f, if dir == DivremDirection::Apply { fl.inv(g0)? } else { g0 });
        return Ok(());
    }
    let mut blocks = Vec::new();
    if mq % n > 0 {
        blocks.push((mq - mq % n, mq % n));
    }
    for j in (0..mq / n).rev() {
        blocks.push((j * n, n));
    }
    let gs = g.sub(0, n - 1);
    match dir {
        DivremDirection::Apply => {
            for &(o, b) in &blocks {
                let q = f.sub(n - 1 + o, n - 1 + o + b);
                ip_div(m, kit, q.rev(), g.sub(n - b, n).rev())?;
                cum_slice(m, kit, q, gs, f.sub(o, o + n - 1), 0, true);
            }
        }
        DivremDirection::Undo => {
            for &(o, b) in blocks.iter().rev() {
                let q = f.sub(n - 1 + o, n - 1 + o + b);
                cum_slice(m, kit, q, gs, f.sub(o, o + n - 1), 0, false);
                ip_low(m, kit, q.rev(), g.sub(n - b, n).rev());
            }
        }
    }
    Ok(())
}

/// Replaces f (size `m+n-1`) by `[r | q]` with `f = g*q + r` (`Apply`), or
/// recovers f from that layout (`Undo`).
pub fn inplace_divrem<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, dir: DivremDirection) -> Result<()> {
    check_leading(m, g)?;
    if f.len() < g.len() {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g])?;
    call(m, |m| divrem_rw(m, kit, f, g, dir))?;
    status(m)
}

fn cum_rem<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V) -> Result<()> {
    let n = g.len();
    if f.len() < n {
        add_into(m, r, f.sub(0, f.len().min(n - 1)), false);
        return Ok(());
    }
    divrem_rw(m, kit, f, g, DivremDirection::Apply)?;
    add_into(m, r, f.sub(0, n - 1), false);
    divrem_rw(m, kit, f, g, DivremDirection::Undo)
}

/// `r += f mod g`; f and g are restored.
pub fn cumulative_remainder<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V) -> Result<()> {
    check_leading(m, g)?;
    if r.len() != g.len() - 1 {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g, r])?;
    call(m, |m| cum_rem(m, kit, f, g, r))?;
    status(m)
}

// ---------------------------------------------------------------- modular

/// `r += f*g mod p` for `|f|, |g| <= n`, `|r| = n`, p monic of size n+1.
fn mm_core<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V, p: V) -> Result<()> {
    let n = r.len();
    if f.is_empty() || g.is_empty() {
        return Ok(());
    }
    cum_slice(m, kit, f, g, r, 0, false);
    let (nf, ng) = (real_size(m, f), real_size(m, g));
    if nf == 0 || ng == 0 || nf + ng - 1 <= n {
        return Ok(());
    }
    let u = nf + ng - 1 - n;
    let (fu, gu) = (f.sub(nf - u, nf), g.sub(ng - u, ng));
    let pt = p.sub(n + 1 - u, n + 1);
    ip_low(m, kit, fu.rev(), gu.rev());
    ip_div(m, kit, fu.rev(), pt.rev())?;
    cum_low_pad(m, kit, fu, 0, p.sub(0, n), r, true);
    ip_low(m, kit, fu.rev(), pt.rev());
    ip_div(m, kit, fu.rev(), gu.rev())
}

fn check_modulus<M: Mem>(m: &M, r: V, p: V) -> Result<()> {
    if r.is_empty() || p.len() != r.len() + 1 {
        return Err(Error::SizeContract);
    }
    if p.get(m, r.len()) != 1 {
        return Err(Error::NonMonicModulus);
    }
    Ok(())
}

/// `r += f*g mod p` for f, g, r of size n and p monic of size n+1.
pub fn modular_mul<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V, p: V) -> Result<()> {
    check_modulus(m, r, p)?;
    if f.len() != r.len() || g.len() != r.len() {
        return Err(Error::SizeContract);
    }
    disjoint(&[f, g, r, p])?;
    call(m, |m| mm_core(m, kit, f, g, r, p))?;
    status(m)
}

/// `r += f*g mod p` for operands of any size; p monic of size `|r|+1`.
pub fn modular_mul_any<M: Mem>(m: &mut M, kit: &MulKit, f: V, g: V, r: V, p: V) -> Result<()> {
    check_modulus(m, r, p)?;
    disjoint(&[f, g, r, p])?;
    let n = r.len();
    call(m, |m| -> Result<()> {
        if f.len() > n {
            divrem_rw(m, kit, f, p, DivremDirection::Apply)?;
        }
        if g.len() > n {
            divrem_rw(m, kit, g, p, DivremDirection::Apply)?;
        }
        mm_core(m, kit, f.sub(0, f.len().min(n)), g.sub(0, g.len().min(n)), r, p)?;
        if g.len() > n {
            divrem_rw(m, kit, g, p, DivremDirection::Undo)?;
        }
        if f.len() > n {
            divrem_rw(m, kit, f, p, DivremDirection::Undo)?;
        }
        Ok(())
    })?;
    status(m)
}
