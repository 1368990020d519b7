//! Polynomial arithmetic over prime fields with explicit control of the
//! extra space used.
//!
//! All algorithms run on a register [`arena::Arena`] whose permission tags
//! enforce either the read-only-input model (`RoRw`) or the
//! read-write-input model (`RwRw`), and whose metrics record the extra
//! algebraic registers and call depth each operation needs.

pub mod arena;
pub mod bilinear;
pub mod cli;
pub mod dense;
pub mod error;
pub mod lin;
pub mod ring;
pub mod rorw;
pub mod rwrw;

pub use arena::{Arena, ArenaBuilder, Mem, Model, Permission, PolyView, RawMem, SpaceMetrics};
pub use dense::{MulKit, Poly};
pub use error::{Error, Result};
pub use ring::{Fe, Field, RootOfUnity};
