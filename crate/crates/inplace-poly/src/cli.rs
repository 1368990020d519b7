//! Command-line front end behind the `ipoly` binary.
//!
//! Operands are given inline (`1,2,3` or `97;1,2,3`), read from a file
//! (`@path`, same text format), or drawn at random (`rand:N`, seeded by
//! `--seed`). Every command prints its result polynomials in the `q;c0,...`
//! format followed by the arena metrics line. References computed outside
//! the arena print `na` metrics.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{Arena, ArenaBuilder, Mem, Model, Permission, PolyView as V, SpaceMetrics};
use crate::bilinear::{self, MatView, MatrixDense};
use crate::dense::{self, MulKit, PartialMode, Poly};
use crate::error::Error;
use crate::ring::{Fe, Field, Q_FFT, Q_SMALL};
use crate::{lin, rorw, rwrw};

#[derive(Parser, Debug)]
#[command(name = "ipoly", version, about = "Constant-space and in-place polynomial arithmetic over prime fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// h += f*g. Algos: cumulative-karatsuba, cumulative-fft, semi-cumulative, karatsuba-ref, schoolbook.
    Mul(Opts),
    /// Lower product mod x^|f|. Algos: cs, semi-cumulative, cumulative, inplace, dense.
    Lower(Opts),
    /// Middle product [f*g] from |g|-1 to |f|. Algos: cs, dense.
    Middle(Opts),
    /// h += [f*g] from --start, |h| = --n coefficients. Algos: cumulative, dense.
    Slice(Opts),
    /// h += f*g mod x^|f| - lambda. Algos: cumulative, dense.
    Conv(Opts),
    /// Power-series inverse of f mod x^n. Algos: cs, dense.
    Inv(Opts),
    /// Power-series quotient f/g mod x^|f|. Algos: cs, inplace, smallspace, dense.
    Div(Opts),
    /// Euclidean division of f by g. Algos: cs, rwrw, dense.
    Divrem(Opts),
    /// Remainder of f by g, added to --h for the cumulative algo. Algos: smallspace, rwrw, cumulative, dense.
    Rem(Opts),
    /// h += f*g mod p with p monic. Algos: rwrw, dense.
    Modmul(Opts),
    /// Values of f at the points given by --g. Algos: cs, dense.
    Eval(Opts),
    /// Interpolant through the points --f with values --g. Algos: cs, dense.
    Interp(Opts),
    /// Z += X*Y for n x n matrices (row-major --f, --g, --h).
    Strassen(Opts),
    /// Prints an in-place program for a fixed bilinear algorithm.
    Emit(EmitOpts),
    /// CSV timings and metrics of selected operations.
    Bench(BenchOpts),
}

#[derive(Args, Debug, Clone, Default)]
struct Opts {
    /// Prime modulus (default 97).
    #[arg(long)]
    q: Option<u64>,
    /// Algorithm variant.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Accumulator or output initial value.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// Modulus polynomial for modmul.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Scratch registers for the small-space algorithms.
    #[arg(long)]
    scratch: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<i64>,
    /// Read operands from their last coefficient down.
    #[arg(long)]
    reversed: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Slice offset, or known-zero prefix length for semi-cumulative lower (default 1).
    #[arg(long)]
    start: Option<usize>,
    /// Output size or matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Schoolbook threshold of the Karatsuba kernels.
    #[arg(long)]
    leaf: Option<usize>,
}

#[derive(Args, Debug)]
struct EmitOpts {
    #[command(flatten)]
    which: EmitWhich,
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct EmitWhich {
    /// Karatsuba 2x2 with polynomial-product semantics.
    #[arg(long)]
    karatsuba2: bool,
    /// Karatsuba 2x2 as a recursive two-dimensional program.
    #[arg(long = "karatsuba2-2d")]
    karatsuba2_2d: bool,
    /// Strassen-Winograd 2x2 matrix product.
    #[arg(long)]
    strassen_winograd: bool,
}

#[derive(Args, Debug)]
struct BenchOpts {
    /// Operations: cumulative-karatsuba, karatsuba-ref, cumulative-fft, ntt-ref, strassen-cs.
    #[arg(required = true)]
    ops: Vec<String>,
    /// Comma-separated sizes; `2^k` is accepted.
    #[arg(long, default_value = "")]
    sizes: String,
    /// Prime modulus (default 469762049).
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timed repetitions; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    reps: usize,
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Fail {
    Usage(String),
    Math(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Parse(msg) => Fail::Usage(msg),
            e => Fail::Math(e),
        }
    }
}

type R<T> = std::result::Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> R<T> {
    Err(Fail::Usage(msg.into()))
}

/// Runs one command line (`args[0]` is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Fail::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("usage error: {msg}\n") },
        Err(Fail::Math(e)) => Outcome { code: 1, stdout: String::new(), stderr: format!("{}: {e}\n", e.name()) },
    }
}

fn dispatch(cmd: Cmd) -> R<String> {
    match cmd {
        Cmd::Emit(o) => emit(&o),
        Cmd::Bench(o) => bench(&o),
        Cmd::Mul(o) => Ctx::new(&o)?.mul(&o),
        Cmd::Lower(o) => Ctx::new(&o)?.lower(&o),
        Cmd::Middle(o) => Ctx::new(&o)?.middle(&o),
        Cmd::Slice(o) => Ctx::new(&o)?.slice(&o),
        Cmd::Conv(o) => Ctx::new(&o)?.conv(&o),
        Cmd::Inv(o) => Ctx::new(&o)?.inv(&o),
        Cmd::Div(o) => Ctx::new(&o)?.div(&o),
        Cmd::Divrem(o) => Ctx::new(&o)?.divrem(&o),
        Cmd::Rem(o) => Ctx::new(&o)?.rem(&o),
        Cmd::Modmul(o) => Ctx::new(&o)?.modmul(&o),
        Cmd::Eval(o) => Ctx::new(&o)?.eval(&o),
        Cmd::Interp(o) => Ctx::new(&o)?.interp(&o),
        Cmd::Strassen(o) => Ctx::new(&o)?.strassen(&o),
    }
}

// ---------------------------------------------------------------- reports

#[derive(Default)]
struct Report {
    text: String,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn poly(&mut self, label: Option<&str>, field: &Field, v: &[Fe]) {
        let p = Poly::new(v.to_vec()).format(field);
        match label {
            Some(l) => self.line(format!("{l}: {p}")),
            None => self.line(p),
        }
    }

    fn metrics(&mut self, m: Option<SpaceMetrics>) {
        match m {
            Some(m) => self.line(m.to_string()),
            None => self.line("extra_algebraic=na pointer_depth=na base_products=na"),
        }
    }

    /// Metrics line, plus the restoration verdict for writable inputs.
    fn arena(&mut self, a: &Arena, inputs: &[(V, &[Fe])]) {
        self.metrics(Some(a.metrics()));
        if a.model() == Model::RwRw {
            let ok = inputs.iter().all(|(v, orig)| a.read_view(*v) == *orig);
            self.line(format!("restored={ok}"));
        }
    }
}

// ---------------------------------------------------------------- operands

struct Ctx {
    field: Field,
    kit: MulKit,
    rng: ChaCha8Rng,
}

fn arena(field: Field, model: Model, regions: &[(&[Fe], Permission)]) -> (Arena, Vec<V>) {
    let mut b = ArenaBuilder::new(field, model);
    let views = regions.iter().map(|(vals, perm)| b.region(vals, *perm)).collect();
    (b.build(), views)
}

fn algo<'a>(o: &'a Opts, default: &'a str) -> &'a str {
    o.algo.as_deref().unwrap_or(default)
}

fn unknown_algo<T>(name: &str) -> R<T> {
    usage(format!("unknown --algo {name:?}"))
}

fn add_vec(field: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(x, y)| field.add(*x, *y)).collect()
}

fn reversed(v: &[Fe]) -> Vec<Fe> {
    v.iter().rev().copied().collect()
}

impl Ctx {
    fn new(o: &Opts) -> R<Ctx> {
        let field = Field::new(o.q.unwrap_or(Q_SMALL))?;
        let mut kit = MulKit::karatsuba();
        if let Some(l) = o.leaf {
            kit = kit.with_leaf(l);
        }
        Ok(Ctx { field, kit, rng: ChaCha8Rng::seed_from_u64(o.seed) })
    }

    fn parse_text(&self, text: &str) -> R<Vec<Fe>> {
        if text.contains(';') {
            let (fl, p) = Poly::parse(text)?;
            if fl != self.field {
                return usage(format!("operand modulus {} differs from --q {}", fl.q(), self.field.q()));
            }
            return Ok(p.coeffs);
        }
        Ok(dense::parse_coeffs(&self.field, text)?)
    }

    fn operand(&mut self, src: &Option<String>) -> R<Option<Vec<Fe>>> {
        let Some(src) = src else { return Ok(None) };
        if let Some(n) = src.strip_prefix("rand:") {
            let n: usize = n.trim().parse().map_err(|_| Fail::Usage(format!("bad size in {src:?}")))?;
            let q = self.field.q();
            return Ok(Some((0..n).map(|_| self.rng.gen_range(0..q)).collect()));
        }
        if let Some(path) = src.strip_prefix('@') {
            let text = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("cannot read {path}: {e}")))?;
            return self.parse_text(&text).map(Some);
        }
        self.parse_text(src).map(Some)
    }

    fn need(&mut self, src: &Option<String>, name: &str) -> R<Vec<Fe>> {
        self.operand(src)?.ok_or_else(|| Fail::Usage(format!("missing --{name}")))
    }

    fn acc(&mut self, src: &Option<String>, len: usize) -> R<Vec<Fe>> {
        Ok(self.operand(src)?.unwrap_or_else(|| vec![0; len]))
    }

    fn check_len(&self, v: &[Fe], len: usize) -> R<()> {
        if v.len() != len {
            return Err(Fail::Math(Error::SizeContract));
        }
        Ok(())
    }

    fn mul(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let h = self.acc(&o.h, (f.len() + g.len()).saturating_sub(1))?;
        let mut rep = Report::default();
        match algo(o, "cumulative-karatsuba") {
            a @ ("cumulative-karatsuba" | "cumulative-fft") => {
                let (mut ar, v) =
                    arena(fl, Model::RwRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                if a == "cumulative-fft" {
                    rwrw::cumulative_fft_mul(&mut ar, v[0], v[1], v[2])?;
                } else {
                    rwrw::cumulative_karatsuba(&mut ar, &self.kit, v[0], v[1], v[2])?;
                }
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g)]);
            }
            "semi-cumulative" => {
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                rorw::semi_cumulative_product(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "karatsuba-ref" => {
                self.check_len(&h, (f.len() + g.len()).saturating_sub(1))?;
                let (p, met) = dense::karatsuba_mul_metered(&fl, &f, &g, &self.kit);
                rep.poly(None, &fl, &add_vec(&fl, &h, &p));
                rep.metrics(Some(met));
            }
            "schoolbook" => {
                self.check_len(&h, (f.len() + g.len()).saturating_sub(1))?;
                rep.poly(None, &fl, &add_vec(&fl, &h, &dense::schoolbook_mul(&fl, &f, &g)));
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn lower(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let n = f.len();
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let h = vec![0; n];
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::OutputOnly)]);
                rorw::lower_product_cs(&mut ar, &self.kit, v[0], v[1], v[2], o.reversed)?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "semi-cumulative" => {
                let h = self.acc(&o.h, n)?;
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                rorw::semi_cumulative_lower(&mut ar, &self.kit, v[0], v[1], v[2], o.start.unwrap_or(1))?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "cumulative" => {
                let h = self.acc(&o.h, n)?;
                let (mut ar, v) =
                    arena(fl, Model::RwRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                rwrw::cumulative_lower(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g)]);
            }
            "inplace" => {
                let (mut ar, v) = arena(fl, Model::RwRw, &[(&f, Permission::InOut), (&g, Permission::InputOnly)]);
                rwrw::inplace_lower(&mut ar, &self.kit, v[0], v[1])?;
                rep.poly(None, &fl, &ar.read_view(v[0]));
                rep.arena(&ar, &[(v[1], &g)]);
            }
            "dense" => {
                self.check_len(&g, n)?;
                let full = dense::schoolbook_mul(&fl, &f, &g);
                let out = if n == 0 {
                    Vec::new()
                } else if o.reversed {
                    full[n - 1..].to_vec()
                } else {
                    full[..n].to_vec()
                };
                rep.poly(None, &fl, &out);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn middle(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        if g.is_empty() || f.len() + 1 < g.len() {
            return Err(Fail::Math(Error::SizeContract));
        }
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let h = vec![0; f.len() + 1 - g.len()];
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::OutputOnly)]);
                rorw::middle_product_cs(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "dense" => {
                rep.poly(None, &fl, &dense::partial_product(&fl, &f, &g, PartialMode::Mid)?);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn slice(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let s = o.start.unwrap_or(0);
        let len = o.n.unwrap_or_else(|| (f.len() + g.len()).saturating_sub(1).saturating_sub(s).max(1));
        let h = self.acc(&o.h, len)?;
        let mut rep = Report::default();
        match algo(o, "cumulative") {
            "cumulative" => {
                let (mut ar, v) =
                    arena(fl, Model::RwRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                rwrw::cumulative_slice(&mut ar, &self.kit, v[0], v[1], v[2], s)?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g)]);
            }
            "dense" => {
                let full = dense::schoolbook_mul(&fl, &f, &g);
                let out: Vec<Fe> =
                    h.iter().enumerate().map(|(i, &x)| fl.add(x, full.get(s + i).copied().unwrap_or(0))).collect();
                rep.poly(None, &fl, &out);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn conv(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let n = f.len();
        let h = self.acc(&o.h, n)?;
        let lambda = fl.from_i64(o.lambda.unwrap_or(1));
        let mut rep = Report::default();
        match algo(o, "cumulative") {
            "cumulative" => {
                let (mut ar, v) =
                    arena(fl, Model::RwRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::InOut)]);
                rwrw::cumulative_convolution(&mut ar, &self.kit, v[0], v[1], v[2], lambda)?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g)]);
            }
            "dense" => {
                self.check_len(&g, n)?;
                self.check_len(&h, n)?;
                let mut out = h.clone();
                let mut w = 1;
                for (i, c) in dense::schoolbook_mul(&fl, &f, &g).into_iter().enumerate() {
                    if i > 0 && i % n == 0 {
                        w = fl.mul(w, lambda);
                    }
                    out[i % n] = fl.mul_add(out[i % n], c, w);
                }
                rep.poly(None, &fl, &out);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn inv(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let mut f = self.need(&o.f, "f")?;
        let n = o.n.unwrap_or(f.len());
        f.resize(n, 0);
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let g = vec![0; n];
                let (mut ar, v) = arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::OutputOnly)]);
                rorw::series_inv_cs(&mut ar, &self.kit, v[0], v[1])?;
                rep.poly(None, &fl, &ar.read_view(v[1]));
                rep.arena(&ar, &[]);
            }
            "dense" => {
                rep.poly(None, &fl, &dense::series_inv(&fl, &f, n)?);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn div(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let n = f.len();
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let h = vec![0; n];
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&h, Permission::OutputOnly)]);
                rorw::series_div_cs(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "inplace" => {
                let (mut ar, v) = arena(fl, Model::RwRw, &[(&f, Permission::InOut), (&g, Permission::InputOnly)]);
                rwrw::inplace_series_div(&mut ar, &self.kit, v[0], v[1], o.reversed)?;
                rep.poly(None, &fl, &ar.read_view(v[0]));
                rep.arena(&ar, &[(v[1], &g)]);
            }
            "smallspace" => {
                let t = vec![0; o.scratch.unwrap_or(self.kit.c_mid + 3)];
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InOut), (&g, Permission::InputOnly), (&t, Permission::Scratch)]);
                rorw::inplace_div_smallspace(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[0]));
                rep.arena(&ar, &[]);
            }
            "dense" => {
                self.check_len(&g, n)?;
                let (f, g) = if o.reversed { (reversed(&f), reversed(&g)) } else { (f, g) };
                let mut q = dense::schoolbook_mul(&fl, &f, &dense::series_inv(&fl, &g, n)?);
                q.truncate(n);
                let q = if o.reversed { reversed(&q) } else { q };
                rep.poly(None, &fl, &q);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn divrem(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let n = g.len();
        if n == 0 || f.len() < n {
            return Err(Fail::Math(Error::SizeContract));
        }
        let mlen = f.len() + 1 - n;
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let (q0, r0) = (vec![0; mlen], vec![0; n - 1]);
                let (mut ar, v) = arena(
                    fl,
                    Model::RoRw,
                    &[
                        (&f, Permission::InputOnly),
                        (&g, Permission::InputOnly),
                        (&q0, Permission::OutputOnly),
                        (&r0, Permission::OutputOnly),
                    ],
                );
                rorw::divrem_cs(&mut ar, &self.kit, v[0], v[1], v[2], v[3])?;
                rep.poly(Some("q"), &fl, &ar.read_view(v[2]));
                rep.poly(Some("r"), &fl, &ar.read_view(v[3]));
                rep.arena(&ar, &[]);
            }
            "rwrw" => {
                let (mut ar, v) = arena(fl, Model::RwRw, &[(&f, Permission::InOut), (&g, Permission::InputOnly)]);
                rwrw::inplace_divrem(&mut ar, &self.kit, v[0], v[1], rwrw::DivremDirection::Apply)?;
                let out = ar.read_view(v[0]);
                rep.poly(Some("q"), &fl, &out[n - 1..]);
                rep.poly(Some("r"), &fl, &out[..n - 1]);
                rep.arena(&ar, &[(v[1], &g)]);
            }
            "dense" => {
                let (q, r) = dense::divrem(&fl, &f, &g)?;
                rep.poly(Some("q"), &fl, &q);
                rep.poly(Some("r"), &fl, &r);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn rem(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let rlen = g.len().saturating_sub(1);
        let mut rep = Report::default();
        match algo(o, "smallspace") {
            "smallspace" => {
                let (r0, t) = (vec![0; rlen], vec![0; o.scratch.unwrap_or(1)]);
                let (mut ar, v) = arena(
                    fl,
                    Model::RoRw,
                    &[
                        (&f, Permission::InputOnly),
                        (&g, Permission::InputOnly),
                        (&r0, Permission::OutputOnly),
                        (&t, Permission::Scratch),
                    ],
                );
                rorw::remainder_smallspace(&mut ar, &self.kit, v[0], v[1], v[2], v[3])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            a @ ("rwrw" | "cumulative") => {
                let r0 = if a == "cumulative" { self.acc(&o.h, rlen)? } else { vec![0; rlen] };
                let (mut ar, v) =
                    arena(fl, Model::RwRw, &[(&f, Permission::InputOnly), (&g, Permission::InputOnly), (&r0, Permission::InOut)]);
                if a == "cumulative" {
                    rwrw::cumulative_remainder(&mut ar, &self.kit, v[0], v[1], v[2])?;
                } else {
                    rwrw::remainder_rwrw(&mut ar, &self.kit, v[0], v[1], v[2])?;
                }
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g)]);
            }
            "dense" => {
                let r = dense::rem(&fl, &f, &g)?;
                let r = match self.operand(&o.h)? {
                    Some(h) => {
                        self.check_len(&h, r.len())?;
                        add_vec(&fl, &h, &r)
                    }
                    None => r,
                };
                rep.poly(None, &fl, &r);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn modmul(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let g = self.need(&o.g, "g")?;
        let p = self.need(&o.p, "p")?;
        let r = self.acc(&o.h, p.len().saturating_sub(1))?;
        let mut rep = Report::default();
        match algo(o, "rwrw") {
            "rwrw" => {
                let (mut ar, v) = arena(
                    fl,
                    Model::RwRw,
                    &[
                        (&f, Permission::InputOnly),
                        (&g, Permission::InputOnly),
                        (&r, Permission::InOut),
                        (&p, Permission::InputOnly),
                    ],
                );
                rwrw::modular_mul_any(&mut ar, &self.kit, v[0], v[1], v[2], v[3])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[(v[0], &f), (v[1], &g), (v[3], &p)]);
            }
            "dense" => {
                if p.last() != Some(&1) {
                    return Err(Fail::Math(Error::NonMonicModulus));
                }
                self.check_len(&r, p.len() - 1)?;
                let prod = dense::schoolbook_mul(&fl, &f, &g);
                let red = dense::rem(&fl, &prod, &p)?;
                rep.poly(None, &fl, &add_vec(&fl, &r, &red));
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn eval(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let f = self.need(&o.f, "f")?;
        let pts = self.need(&o.g, "g")?;
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let out = vec![0; pts.len()];
                let (mut ar, v) =
                    arena(fl, Model::RoRw, &[(&f, Permission::InputOnly), (&pts, Permission::InputOnly), (&out, Permission::OutputOnly)]);
                rorw::mp_eval_cs(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "dense" => {
                rep.poly(None, &fl, &dense::mp_eval_tree(&fl, &f, &pts));
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn interp(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let pts = self.need(&o.f, "f")?;
        let vals = self.need(&o.g, "g")?;
        let mut rep = Report::default();
        match algo(o, "cs") {
            "cs" => {
                let out = vec![0; pts.len()];
                let (mut ar, v) = arena(
                    fl,
                    Model::RoRw,
                    &[(&pts, Permission::InputOnly), (&vals, Permission::InputOnly), (&out, Permission::OutputOnly)],
                );
                rorw::interp_cs(&mut ar, &self.kit, v[0], v[1], v[2])?;
                rep.poly(None, &fl, &ar.read_view(v[2]));
                rep.arena(&ar, &[]);
            }
            "dense" => {
                rep.poly(None, &fl, &dense::interp_tree(&fl, &pts, &vals)?);
                rep.metrics(None);
            }
            other => return unknown_algo(other),
        }
        Ok(rep.text)
    }

    fn strassen(&mut self, o: &Opts) -> R<String> {
        let fl = self.field;
        let n = match (o.n, &o.f) {
            (Some(n), _) => n,
            (None, Some(_)) => {
                let len = self.operand(&o.f)?.map_or(0, |v| v.len());
                (len as f64).sqrt().round() as usize
            }
            (None, None) => return usage("give --n or --f"),
        };
        let mat = |src: &Option<String>, ctx: &mut Ctx| -> R<Vec<Fe>> {
            match src {
                Some(_) => Ok(ctx.operand(src)?.unwrap_or_default()),
                None => {
                    let q = fl.q();
                    Ok((0..n * n).map(|_| ctx.rng.gen_range(0..q)).collect())
                }
            }
        };
        let x = mat(&o.f, self)?;
        let y = mat(&o.g, self)?;
        let z = self.acc(&o.h, n * n)?;
        for v in [&x, &y, &z] {
            if v.len() != n * n {
                return Err(Fail::Math(Error::DimMismatch));
            }
        }
        let (mut ar, v) =
            arena(fl, Model::RwRw, &[(&x, Permission::InputOnly), (&y, Permission::InputOnly), (&z, Permission::InOut)]);
        let at = |v: V| MatView::dense(v.addr(0).unwrap_or(0), n);
        let ops = bilinear::strassen_cs(&mut ar, at(v[0]), at(v[1]), at(v[2]))?;
        let got = ar.read_view(v[2]);
        let want = MatrixDense::new(n, x.clone())?.naive_mul(&fl, &MatrixDense::new(n, y.clone())?);
        let mut rep = Report::default();
        rep.poly(Some("z"), &fl, &got);
        rep.line(format!("products={} additions={}", ops.products, ops.additions));
        rep.line(format!("matches_naive={}", got == add_vec(&fl, &z, &want.entries)));
        rep.arena(&ar, &[(v[0], &x), (v[1], &y)]);
        Ok(rep.text)
    }
}

// ---------------------------------------------------------------- emit

fn emit(o: &EmitOpts) -> R<String> {
    let fl = Field::new(o.q.unwrap_or(Q_SMALL))?;
    let w = &o.which;
    let prog = if w.karatsuba2 {
        bilinear::emit_inplace(&bilinear::karatsuba_program(fl, false))
    } else if w.karatsuba2_2d {
        bilinear::emit_inplace_2d(&bilinear::karatsuba_program(fl, true))?
    } else {
        bilinear::emit_inplace(&bilinear::strassen_winograd_program(fl))
    };
    let c = bilinear::count_instrs(&fl, &prog);
    let mut text = bilinear::format_program(&fl, &prog);
    text.push_str(&format!("# products={} additions={} scalings={}\n", c.products, c.additions(), c.scalar_muls));
    Ok(text)
}

// ---------------------------------------------------------------- bench

/// Operations known to [`bench_once`].
pub const BENCH_OPS: [&str; 5] = ["cumulative-karatsuba", "karatsuba-ref", "cumulative-fft", "ntt-ref", "strassen-cs"];

/// One benchmark measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub op: String,
    pub n: usize,
    pub wall_time_s: f64,
    pub metrics: SpaceMetrics,
}

fn bench_layout(b: &mut ArenaBuilder, op: &str, n: usize, kit: &MulKit, rng: &mut ChaCha8Rng, q: u64) -> Vec<V> {
    let mut rand = |k: usize| -> Vec<Fe> { (0..k).map(|_| rng.gen_range(0..q)).collect() };
    let (fin, acc) = match op {
        "cumulative-karatsuba" | "cumulative-fft" | "strassen-cs" => (Permission::InputOnly, Permission::InOut),
        _ => (Permission::InputOnly, Permission::OutputOnly),
    };
    let len = if op == "strassen-cs" { n * n } else { n };
    let f = b.region(&rand(len), fin);
    let g = b.region(&rand(len), fin);
    let hlen = if op == "strassen-cs" { n * n } else { 2 * n - 1 };
    let h = b.zeros(hlen, acc);
    let mut views = vec![f, g, h];
    match op {
        "karatsuba-ref" => views.push(b.zeros(kit.c * n, Permission::Scratch)),
        "ntt-ref" => views.push(b.zeros(2 * (2 * n - 1).next_power_of_two(), Permission::Scratch)),
        _ => {}
    }
    views
}

fn bench_op<M: Mem>(m: &mut M, op: &str, v: &[V], kit: &MulKit, n: usize) -> crate::Result<()> {
    match op {
        "cumulative-karatsuba" => rwrw::cumulative_karatsuba(m, kit, v[0], v[1], v[2]),
        "cumulative-fft" => rwrw::cumulative_fft_mul(m, v[0], v[1], v[2]),
        "karatsuba-ref" => {
            lin::mul_acc_any(m, kit, v[0], v[1], v[2], v[3], false);
            match m.fault() {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        "ntt-ref" => dense::ntt_mul_in(m, v[0], v[1], v[2], v[3]),
        _ => {
            let at = |v: V| MatView::dense(v.addr(0).unwrap_or(0), n);
            bilinear::strassen_cs(m, at(v[0]), at(v[1]), at(v[2])).map(|_| ())
        }
    }
}

/// Times `op` at size `n` on the unchecked backend (fastest of `reps` runs,
/// buffers allocated beforehand), then reruns it on the instrumented arena
/// for the metrics.
pub fn bench_once(field: Field, op: &str, n: usize, seed: u64, reps: usize) -> crate::Result<BenchRow> {
    if !BENCH_OPS.contains(&op) || n == 0 {
        return Err(Error::BadParams);
    }
    let kit = MulKit::karatsuba();
    let build = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = ArenaBuilder::new(field, if op.starts_with("cumulative") || op == "strassen-cs" { Model::RwRw } else { Model::RoRw });
        let v = bench_layout(&mut b, op, n, &kit, &mut rng, field.q());
        (b, v)
    };
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let (b, v) = build(seed);
        let mut raw = b.build_raw();
        let t = Instant::now();
        bench_op(&mut raw, op, &v, &kit, n)?;
        best = best.min(t.elapsed().as_secs_f64());
    }
    let (b, v) = build(seed);
    let mut a = b.build();
    bench_op(&mut a, op, &v, &kit, n)?;
    Ok(BenchRow { op: op.to_string(), n, wall_time_s: best, metrics: a.metrics() })
}

fn parse_sizes(text: &str) -> R<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parsed = match s.split_once('^') {
                Some((b, e)) => b.parse::<usize>().ok().zip(e.parse::<u32>().ok()).and_then(|(b, e)| b.checked_pow(e)),
                None => s.parse().ok(),
            };
            parsed.filter(|&n| n > 0).ok_or_else(|| Fail::Usage(format!("bad size {s:?}")))
        })
        .collect()
}

fn bench(o: &BenchOpts) -> R<String> {
    let field = Field::new(o.q.unwrap_or(Q_FFT))?;
    let sizes = parse_sizes(&o.sizes)?;
    for op in &o.ops {
        if !BENCH_OPS.contains(&op.as_str()) {
            return usage(format!("unknown bench op {op:?}; known: {}", BENCH_OPS.join(", ")));
        }
    }
    let mut rep = Report::default();
    rep.line("op,n,wall_time_s,extra_algebraic,pointer_depth,base_products");
    for op in &o.ops {
        for &n in &sizes {
            let r = bench_once(field, op, n, o.seed, o.reps)?;
            let m = r.metrics;
            rep.line(format!(
                "{},{},{:.6},{},{},{}",
                r.op, r.n, r.wall_time_s, m.extra_algebraic_highwater, m.pointer_depth_highwater, m.base_products
            ));
        }
    }
    Ok(rep.text)
}
