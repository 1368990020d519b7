//! Register arena with permission tags, views and space metrics.
//!
//! Algorithms are written against the [`Mem`] trait. [`Arena`] enforces the
//! permission model and records metrics; [`RawMem`] skips all of that and is
//! what the benchmarks run on.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ring::{Fe, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Permission {
    InputOnly,
    OutputOnly,
    InOut,
    Scratch,
}

impl Permission {
    pub fn tag(self) -> &'static str {
        match self {
            Permission::InputOnly => "in",
            Permission::OutputOnly => "out",
            Permission::InOut => "inout",
            Permission::Scratch => "scratch",
        }
    }

    pub fn parse(s: &str) -> Result<Permission> {
        Ok(match s {
            "in" => Permission::InputOnly,
            "out" => Permission::OutputOnly,
            "inout" => Permission::InOut,
            "scratch" => Permission::Scratch,
            _ => return Err(Error::Parse(format!("unknown permission {s:?}"))),
        })
    }
}

/// Permission model. `RoRw`: inputs are read-only. `RwRw`: every register is
/// writable, and callers check restoration separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    RoRw,
    RwRw,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceMetrics {
    /// Distinct scratch registers written so far.
    pub extra_algebraic_highwater: usize,
    /// Deepest simulated call-stack nesting.
    pub pointer_depth_highwater: usize,
    /// Coefficient products performed in base cases.
    pub base_products: u64,
}

impl std::fmt::Display for SpaceMetrics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "extra_algebraic={} pointer_depth={} base_products={}",
            self.extra_algebraic_highwater, self.pointer_depth_highwater, self.base_products
        )
    }
}

/// Memory interface shared by the instrumented and the raw backends.
pub trait Mem {
    fn field(&self) -> Field;
    fn get(&self, i: usize) -> Fe;
    fn set(&mut self, i: usize, v: Fe);
    fn enter_call(&mut self);
    fn exit_call(&mut self);
    fn count_products(&mut self, k: u64);
    /// Takes `n` contiguous temporaries from the scratch pool (LIFO).
    fn alloc_block(&mut self, n: usize) -> PolyView;
    /// Takes one scalar temporary from the scratch pool.
    fn alloc_tmp(&mut self) -> usize {
        self.alloc_block(1).addr(0).expect("dense block")
    }
    /// Returns the `k` most recently allocated temporaries.
    fn free_tmp(&mut self, k: usize);
    /// Records the first fault of the run.
    fn latch(&mut self, e: Error);
    fn fault(&self) -> Option<Error>;
    /// Direct register access, when the backend allows skipping the checks.
    fn raw(&mut self) -> Option<&mut [Fe]> {
        None
    }
}

/// The instrumented register file.
#[derive(Clone, Debug)]
pub struct Arena {
    field: Field,
    regs: Vec<Fe>,
    perms: Vec<Permission>,
    model: Model,
    metrics: SpaceMetrics,
    touched: Vec<bool>,
    depth: usize,
    fault: Option<Error>,
    pool_base: usize,
    pool_top: usize,
}

impl Arena {
    pub fn new(field: Field, values: Vec<Fe>, perms: Vec<Permission>, model: Model) -> Result<Arena> {
        if values.len() != perms.len() {
            return Err(Error::LengthMismatch);
        }
        let q = field.q();
        let regs: Vec<Fe> = values.into_iter().map(|v| v % q).collect();
        Ok(Arena {
            field,
            touched: vec![false; regs.len()],
            regs,
            perms,
            model,
            metrics: SpaceMetrics::default(),
            depth: 0,
            fault: None,
            pool_base: 0,
            pool_top: 0,
        })
        .map(|mut a| {
            a.pool_base = a.regs.len();
            a
        })
    }

    pub fn len(&self) -> usize {
        self.regs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn metrics(&self) -> SpaceMetrics {
        self.metrics
    }

    pub fn perm(&self, i: usize) -> Permission {
        self.perms[i]
    }

    pub fn values(&self) -> &[Fe] {
        &self.regs
    }

    pub fn reset_metrics(&mut self) {
        self.metrics = SpaceMetrics::default();
        self.touched.iter_mut().for_each(|t| *t = false);
        self.fault = None;
    }

    /// Checked single-register access.
    pub fn access(&mut self, index: usize, op: Access) -> Result<Fe> {
        if index >= self.regs.len() {
            return Err(Error::OutOfRange(index));
        }
        match op {
            Access::Read => Ok(self.regs[index]),
            Access::Write(v) => {
                if !self.writable(index) {
                    return Err(Error::PermissionDenied(index));
                }
                self.store(index, v % self.field.q());
                Ok(v % self.field.q())
            }
        }
    }

    /// View over `[lo, hi)`.
    pub fn make_view(&self, lo: usize, hi: usize, kind: ViewKind) -> Result<PolyView> {
        if lo > hi || hi > self.regs.len() {
            return Err(Error::BadRange);
        }
        Ok(match kind {
            ViewKind::Plain => PolyView::plain(lo, hi - lo),
            ViewKind::Reversed => PolyView::plain(lo, hi - lo).rev(),
            ViewKind::FakePadded(n) => {
                if n < hi - lo {
                    return Err(Error::BadRange);
                }
                PolyView::plain(lo, hi - lo).pad_to(n)
            }
        })
    }

    /// Snapshot of a view's logical contents.
    pub fn read_view(&self, v: PolyView) -> Vec<Fe> {
        (0..v.len()).map(|i| v.addr(i).map_or(0, |a| self.regs[a])).collect()
    }

    /// Overwrites a view without permission checks or metric updates.
    pub fn load_view(&mut self, v: PolyView, vals: &[Fe]) {
        assert_eq!(v.len(), vals.len());
        for (i, &x) in vals.iter().enumerate() {
            if let Some(a) = v.addr(i) {
                self.regs[a] = x % self.field.q();
            }
        }
    }

    /// Returns and clears the latched fault.
    pub fn take_fault(&mut self) -> Result<()> {
        match self.fault.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// One line per register: `idx<TAB>perm<TAB>value`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, (v, p)) in self.regs.iter().zip(&self.perms).enumerate() {
            let _ = writeln!(s, "{i}\t{}\t{v}", p.tag());
        }
        s
    }

    pub fn parse_dump(field: Field, text: &str, model: Model) -> Result<Arena> {
        let mut vals = Vec::new();
        let mut perms = Vec::new();
        for (n, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 || cols[0].trim().parse::<usize>().ok() != Some(n) {
                return Err(Error::Parse(format!("bad dump line {line:?}")));
            }
            perms.push(Permission::parse(cols[1].trim())?);
            vals.push(
                cols[2]
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(e.to_string()))?,
            );
        }
        Arena::new(field, vals, perms, model)
    }

    fn writable(&self, i: usize) -> bool {
        !(self.model == Model::RoRw && self.perms[i] == Permission::InputOnly)
    }

    #[inline]
    fn store(&mut self, i: usize, v: Fe) {
        if self.perms[i] == Permission::Scratch && !self.touched[i] {
            self.touched[i] = true;
            self.metrics.extra_algebraic_highwater += 1;
        }
        self.regs[i] = v;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Access {
    Read,
    Write(Fe),
}

impl Mem for Arena {
    #[inline]
    fn field(&self) -> Field {
        self.field
    }

    #[inline]
    fn get(&self, i: usize) -> Fe {
        self.regs[i]
    }

    #[inline]
    fn set(&mut self, i: usize, v: Fe) {
        if self.writable(i) {
            self.store(i, v);
        } else if self.fault.is_none() {
            self.fault = Some(Error::PermissionDenied(i));
        }
    }

    fn enter_call(&mut self) {
        self.depth += 1;
        self.metrics.pointer_depth_highwater = self.metrics.pointer_depth_highwater.max(self.depth);
    }

    fn exit_call(&mut self) {
        if self.depth == 0 {
            self.latch(Error::UnderflowExit);
        } else {
            self.depth -= 1;
        }
    }

    fn count_products(&mut self, k: u64) {
        self.metrics.base_products += k;
    }

    fn alloc_block(&mut self, n: usize) -> PolyView {
        let start = self.pool_base + self.pool_top;
        while self.regs.len() < start + n {
            self.regs.push(0);
            self.perms.push(Permission::Scratch);
            self.touched.push(false);
        }
        self.pool_top += n;
        PolyView::plain(start, n)
    }

    fn free_tmp(&mut self, k: usize) {
        self.pool_top -= k;
    }

    fn latch(&mut self, e: Error) {
        if self.fault.is_none() {
            self.fault = Some(e);
        }
    }

    fn fault(&self) -> Option<Error> {
        self.fault.clone()
    }
}

/// Unchecked backend for timing runs.
#[derive(Clone, Debug)]
pub struct RawMem {
    field: Field,
    pub regs: Vec<Fe>,
    pool_base: usize,
    pool_top: usize,
    pub products: u64,
}

impl RawMem {
    pub fn new(field: Field, regs: Vec<Fe>) -> RawMem {
        RawMem { field, pool_base: regs.len(), regs, pool_top: 0, products: 0 }
    }
}

impl Mem for RawMem {
    #[inline(always)]
    fn field(&self) -> Field {
        self.field
    }
    #[inline(always)]
    fn get(&self, i: usize) -> Fe {
        self.regs[i]
    }
    #[inline(always)]
    fn set(&mut self, i: usize, v: Fe) {
        self.regs[i] = v;
    }
    #[inline(always)]
    fn enter_call(&mut self) {}
    #[inline(always)]
    fn exit_call(&mut self) {}
    #[inline(always)]
    fn count_products(&mut self, k: u64) {
        self.products += k;
    }
    fn alloc_block(&mut self, n: usize) -> PolyView {
        let start = self.pool_base + self.pool_top;
        if self.regs.len() < start + n {
            self.regs.resize(start + n, 0);
        }
        self.pool_top += n;
        PolyView::plain(start, n)
    }
    fn free_tmp(&mut self, k: usize) {
        self.pool_top -= k;
    }
    fn latch(&mut self, e: Error) {
        panic!("fault on raw backend: {e}");
    }
    fn fault(&self) -> Option<Error> {
        None
    }
    #[inline(always)]
    fn raw(&mut self) -> Option<&mut [Fe]> {
        Some(&mut self.regs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViewKind {
    Plain,
    Reversed,
    FakePadded(usize),
}

/// A run of registers, read forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
struct Seg {
    start: usize,
    len: usize,
    rev: bool,
}

impl Seg {
    #[inline(always)]
    fn addr(&self, j: usize) -> usize {
        if self.rev {
            self.start + self.len - 1 - j
        } else {
            self.start + j
        }
    }

    fn sub(&self, lo: usize, hi: usize) -> Seg {
        if hi <= lo {
            return Seg::default();
        }
        let start = if self.rev { self.start + self.len - hi } else { self.start + lo };
        Seg { start, len: hi - lo, rev: self.rev }
    }

    fn flip(&self) -> Seg {
        Seg { rev: !self.rev, ..*self }
    }
}

/// Logical window into an arena.
///
/// Layout: `lead` zeros, segment `a`, segment `b`, then zeros up to `len`.
/// Zeros are fake padding: reads give 0 and writes are faults. Views compose
/// under [`sub`](PolyView::sub), [`rev`](PolyView::rev) and padding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyView {
    lead: usize,
    a: Seg,
    b: Seg,
    len: usize,
}

impl PolyView {
    pub fn plain(start: usize, len: usize) -> PolyView {
        PolyView { lead: 0, a: Seg { start, len, rev: false }, b: Seg::default(), len }
    }

    pub fn empty() -> PolyView {
        PolyView::plain(0, 0)
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Physical register of logical index `i`, or `None` inside padding.
    #[inline(always)]
    pub fn addr(&self, i: usize) -> Option<usize> {
        debug_assert!(i < self.len, "view index {i} out of {}", self.len);
        if i < self.lead {
            return None;
        }
        let j = i - self.lead;
        if j < self.a.len {
            return Some(self.a.addr(j));
        }
        let j = j - self.a.len;
        if j < self.b.len {
            Some(self.b.addr(j))
        } else {
            None
        }
    }

    #[inline(always)]
    pub fn get<M: Mem + ?Sized>(&self, m: &M, i: usize) -> Fe {
        match self.addr(i) {
            Some(a) => m.get(a),
            None => 0,
        }
    }

    #[inline(always)]
    pub fn set<M: Mem + ?Sized>(&self, m: &mut M, i: usize, v: Fe) {
        match self.addr(i) {
            Some(a) => m.set(a, v),
            None => m.latch(Error::PaddingWrite(i)),
        }
    }

    /// Logical sub-window `[lo, hi)`.
    pub fn sub(&self, lo: usize, hi: usize) -> PolyView {
        assert!(lo <= hi && hi <= self.len, "sub({lo},{hi}) of view of len {}", self.len);
        // overlap of [lo, hi) with [s, e), relative to s
        let clip = |s: usize, e: usize| {
            let (x, y) = (lo.max(s), hi.min(e));
            if x < y {
                (x - s, y - s)
            } else {
                (0, 0)
            }
        };
        let (l0, l1) = clip(0, self.lead);
        let a_off = self.lead;
        let (a0, a1) = clip(a_off, a_off + self.a.len);
        let b_off = a_off + self.a.len;
        let (b0, b1) = clip(b_off, b_off + self.b.len);
        let a = self.a.sub(a0, a1);
        let b = self.b.sub(b0, b1);
        let (a, b) = if a.len == 0 { (b, Seg::default()) } else { (a, b) };
        PolyView { lead: l1 - l0, a, b, len: hi - lo }
    }

    /// Coefficient-order reversal.
    pub fn rev(&self) -> PolyView {
        let trail = self.len - self.lead - self.a.len - self.b.len;
        let (a, b) = if self.b.len == 0 {
            (self.a.flip(), Seg::default())
        } else {
            (self.b.flip(), self.a.flip())
        };
        PolyView { lead: trail, a, b, len: self.len }
    }

    /// Appends zeros up to logical length `n`.
    pub fn pad_to(&self, n: usize) -> PolyView {
        assert!(n >= self.len);
        PolyView { len: n, ..*self }
    }

    /// Prepends `k` zeros (multiplication by x^k).
    pub fn shift_up(&self, k: usize) -> PolyView {
        PolyView { lead: self.lead + k, len: self.len + k, ..*self }
    }

    /// Concatenation of two padding-free views (`self` first).
    pub fn concat(&self, other: &PolyView) -> PolyView {
        let one = |v: &PolyView| {
            assert!(v.lead == 0 && v.b.len == 0 && v.a.len == v.len, "concat of padded view");
            v.a
        };
        let (a, b) = (one(self), one(other));
        if a.len == 0 {
            return *other;
        }
        PolyView { lead: 0, a, b, len: a.len + b.len }
    }

    /// `(start, len)` when the view is a forward run with no padding.
    #[inline(always)]
    pub fn contiguous(&self) -> Option<(usize, usize)> {
        if self.lead == 0 && self.b.len == 0 && self.a.len == self.len && !self.a.rev {
            Some((self.a.start, self.len))
        } else {
            None
        }
    }

    /// True when no index of the view lies in padding.
    pub fn is_dense(&self) -> bool {
        self.lead == 0 && self.a.len + self.b.len == self.len
    }

    /// Whether two views share a physical register.
    pub fn overlaps(&self, other: &PolyView) -> bool {
        let segs = |v: &PolyView| [v.a, v.b];
        segs(self).iter().any(|s| {
            segs(other).iter().any(|t| {
                s.len > 0 && t.len > 0 && s.start < t.start + t.len && t.start < s.start + s.len
            })
        })
    }
}

/// Convenience builder: lays out regions one after another.
#[derive(Debug)]
pub struct ArenaBuilder {
    field: Field,
    model: Model,
    vals: Vec<Fe>,
    perms: Vec<Permission>,
}

impl ArenaBuilder {
    pub fn new(field: Field, model: Model) -> ArenaBuilder {
        ArenaBuilder { field, model, vals: Vec::new(), perms: Vec::new() }
    }

    pub fn region(&mut self, vals: &[Fe], perm: Permission) -> PolyView {
        let start = self.vals.len();
        self.vals.extend_from_slice(vals);
        self.perms.extend(std::iter::repeat(perm).take(vals.len()));
        PolyView::plain(start, vals.len())
    }

    pub fn zeros(&mut self, n: usize, perm: Permission) -> PolyView {
        self.region(&vec![0; n], perm)
    }

    pub fn build(self) -> Arena {
        Arena::new(self.field, self.vals, self.perms, self.model).expect("lengths match by construction")
    }

    pub fn build_raw(self) -> RawMem {
        RawMem::new(self.field, self.vals)
    }
}

/// Runs `body` inside a simulated call frame.
#[inline(always)]
pub fn call<M: Mem, T>(m: &mut M, body: impl FnOnce(&mut M) -> T) -> T {
    m.enter_call();
    let r = body(m);
    m.exit_call();
    r
}
