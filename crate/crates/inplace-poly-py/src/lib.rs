//! Python bindings for `inplace_poly`.
//!
//! Every operation runs on a metered arena and returns its outputs together
//! with a `Metrics` record. Coefficients are accepted as Python ints and
//! reduced modulo `q`.

use inplace_poly::arena::{Arena, ArenaBuilder, Model, Permission, PolyView};
use inplace_poly::bilinear;
use inplace_poly::{rorw, rwrw, Fe, MulKit, Poly as CorePoly};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

const DEFAULT_Q: u64 = inplace_poly::ring::Q_SMALL;

fn err(e: inplace_poly::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(q: u64) -> PyResult<inplace_poly::Field> {
    inplace_poly::Field::new(q).map_err(err)
}

fn kit(leaf: Option<usize>) -> MulKit {
    match leaf {
        Some(l) => MulKit::karatsuba().with_leaf(l),
        None => MulKit::karatsuba(),
    }
}

/// Space and pointer high-water marks of one call.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Metrics {
    extra_algebraic: usize,
    pointer_depth: usize,
    base_products: u64,
    /// `None` for read-only-input calls, otherwise whether every input came back intact.
    restored: Option<bool>,
}

#[pymethods]
impl Metrics {
    fn __repr__(&self) -> String {
        format!(
            "Metrics(extra_algebraic={}, pointer_depth={}, base_products={}, restored={:?})",
            self.extra_algebraic, self.pointer_depth, self.base_products, self.restored
        )
    }
}

/// A prime field Z/qZ.
#[pyclass(frozen)]
struct Field(inplace_poly::Field);

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (q = DEFAULT_Q))]
    fn new(q: u64) -> PyResult<Self> {
        field(q).map(Field)
    }

    #[getter]
    fn q(&self) -> u64 {
        self.0.q()
    }

    fn add(&self, a: i64, b: i64) -> Fe {
        self.0.add(self.0.from_i64(a), self.0.from_i64(b))
    }

    fn mul(&self, a: i64, b: i64) -> Fe {
        self.0.mul(self.0.from_i64(a), self.0.from_i64(b))
    }

    fn inv(&self, a: i64) -> PyResult<Fe> {
        self.0.inv(self.0.from_i64(a)).map_err(err)
    }

    fn two_adicity(&self) -> u32 {
        self.0.two_adicity()
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.0.q())
    }
}

/// A dense polynomial with its modulus, in the `q;c0,c1,...` text form.
#[pyclass(frozen)]
struct Poly {
    q: u64,
    inner: CorePoly,
}

#[pymethods]
impl Poly {
    #[new]
    #[pyo3(signature = (coeffs, q = DEFAULT_Q))]
    fn new(coeffs: Vec<i64>, q: u64) -> PyResult<Self> {
        let fl = field(q)?;
        Ok(Poly { q, inner: CorePoly::new(coeffs.into_iter().map(|c| fl.from_i64(c)).collect()) })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (fl, inner) = CorePoly::parse(text).map_err(err)?;
        Ok(Poly { q: fl.q(), inner })
    }

    #[getter]
    fn coeffs(&self) -> Vec<Fe> {
        self.inner.coeffs.clone()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.q
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __str__(&self) -> PyResult<String> {
        Ok(self.inner.format(&field(self.q)?))
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("Poly('{}')", self.__str__()?))
    }

    fn __eq__(&self, other: &Poly) -> bool {
        self.q == other.q && self.inner == other.inner
    }

    /// Product through the cumulative in-place Karatsuba routine.
    fn __mul__(&self, other: &Poly) -> PyResult<Poly> {
        if self.q != other.q {
            return Err(PyValueError::new_err("moduli differ"));
        }
        let (mut outs, _) = cumulative_karatsuba(to_i64(&self.inner.coeffs), to_i64(&other.inner.coeffs), None, self.q, None)?;
        Ok(Poly { q: self.q, inner: CorePoly::new(outs.remove(0)) })
    }
}

fn to_i64(v: &[Fe]) -> Vec<i64> {
    v.iter().map(|&c| c as i64).collect()
}

/// Builds an arena from `(coeffs, permission)` regions, runs `body` and
/// returns the regions listed in `outputs`.
fn run(
    q: u64,
    model: Model,
    regions: &[(Vec<i64>, Permission)],
    outputs: &[usize],
    body: impl FnOnce(&mut Arena, &[PolyView]) -> inplace_poly::Result<()>,
) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let fl = field(q)?;
    let vals: Vec<Vec<Fe>> = regions.iter().map(|(v, _)| v.iter().map(|&c| fl.from_i64(c)).collect()).collect();
    let mut b = ArenaBuilder::new(fl, model);
    let views: Vec<PolyView> = vals.iter().zip(regions).map(|(v, (_, p))| b.region(v, *p)).collect();
    let mut arena = b.build();
    body(&mut arena, &views).map_err(err)?;
    let restored = (model == Model::RwRw).then(|| {
        regions
            .iter()
            .zip(&views)
            .zip(&vals)
            .all(|(((_, p), v), orig)| *p != Permission::InputOnly || arena.read_view(*v) == *orig)
    });
    let m = arena.metrics();
    let metrics = Metrics {
        extra_algebraic: m.extra_algebraic_highwater,
        pointer_depth: m.pointer_depth_highwater,
        base_products: m.base_products,
        restored,
    };
    Ok((outputs.iter().map(|&i| arena.read_view(views[i])).collect(), metrics))
}

use Permission::{InOut as IO, InputOnly as IN, OutputOnly as OUT};

/// `h + f*g` with read-write inputs that are restored on exit. `h` defaults to zero.
#[pyfunction]
#[pyo3(signature = (f, g, h = None, q = DEFAULT_Q, leaf = None))]
fn cumulative_karatsuba(f: Vec<i64>, g: Vec<i64>, h: Option<Vec<i64>>, q: u64, leaf: Option<usize>) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    if f.is_empty() || g.is_empty() {
        return Err(PyValueError::new_err("operands must be nonempty"));
    }
    let h = h.unwrap_or_else(|| vec![0; f.len() + g.len() - 1]);
    let k = kit(leaf);
    run(q, Model::RwRw, &[(f, IN), (g, IN), (h, IO)], &[2], |m, v| rwrw::cumulative_karatsuba(m, &k, v[0], v[1], v[2]))
}

/// `h + f*g` through in-place truncated Fourier transforms.
#[pyfunction]
#[pyo3(signature = (f, g, h = None, q = inplace_poly::ring::Q_FFT))]
fn cumulative_fft_mul(f: Vec<i64>, g: Vec<i64>, h: Option<Vec<i64>>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    if f.is_empty() || g.is_empty() {
        return Err(PyValueError::new_err("operands must be nonempty"));
    }
    let h = h.unwrap_or_else(|| vec![0; f.len() + g.len() - 1]);
    run(q, Model::RwRw, &[(f, IN), (g, IN), (h, IO)], &[2], |m, v| rwrw::cumulative_fft_mul(m, v[0], v[1], v[2]))
}

/// `f*g mod x^n` (or the top `n` coefficients when `reversed`) with read-only inputs.
#[pyfunction]
#[pyo3(signature = (f, g, q = DEFAULT_Q, reversed = false))]
fn lower_product(f: Vec<i64>, g: Vec<i64>, q: u64, reversed: bool) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let n = f.len();
    let k = MulKit::karatsuba();
    run(q, Model::RoRw, &[(f, IN), (g, IN), (vec![0; n], OUT)], &[2], |m, v| {
        rorw::lower_product_cs(m, &k, v[0], v[1], v[2], reversed)
    })
}

/// Coefficients `n-1 .. m+n-1` of `f*g` where `|g| = n` and `|f| = m+n-1`.
#[pyfunction]
#[pyo3(signature = (f, g, q = DEFAULT_Q))]
fn middle_product(f: Vec<i64>, g: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let m_len = (f.len() + 1).saturating_sub(g.len());
    let k = MulKit::karatsuba();
    run(q, Model::RoRw, &[(f, IN), (g, IN), (vec![0; m_len], OUT)], &[2], |m, v| rorw::middle_product_cs(m, &k, v[0], v[1], v[2]))
}

/// `f^{-1} mod x^|f|`.
#[pyfunction]
#[pyo3(signature = (f, q = DEFAULT_Q))]
fn series_inv(f: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let n = f.len();
    let k = MulKit::karatsuba();
    run(q, Model::RoRw, &[(f, IN), (vec![0; n], OUT)], &[1], |m, v| rorw::series_inv_cs(m, &k, v[0], v[1]))
}

/// `f/g mod x^n` for equal sizes.
#[pyfunction]
#[pyo3(signature = (f, g, q = DEFAULT_Q))]
fn series_div(f: Vec<i64>, g: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let n = f.len();
    let k = MulKit::karatsuba();
    run(q, Model::RoRw, &[(f, IN), (g, IN), (vec![0; n], OUT)], &[2], |m, v| rorw::series_div_cs(m, &k, v[0], v[1], v[2]))
}

/// Quotient and remainder of `f` by `g`, returned as `[quo, rem]`.
#[pyfunction]
#[pyo3(signature = (f, g, q = DEFAULT_Q))]
fn divrem(f: Vec<i64>, g: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    if g.is_empty() || f.len() < g.len() {
        return Err(PyValueError::new_err("need |f| >= |g| >= 1"));
    }
    let (qn, rn) = (f.len() + 1 - g.len(), g.len() - 1);
    let k = MulKit::karatsuba();
    let regions = [(f, IN), (g, IN), (vec![0; qn], OUT), (vec![0; rn], OUT)];
    run(q, Model::RoRw, &regions, &[2, 3], |m, v| rorw::divrem_cs(m, &k, v[0], v[1], v[2], v[3]))
}

/// `f mod g` using `scratch` registers of work space.
#[pyfunction]
#[pyo3(signature = (f, g, q = DEFAULT_Q, scratch = 1))]
fn remainder(f: Vec<i64>, g: Vec<i64>, q: u64, scratch: usize) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let rn = g.len().saturating_sub(1);
    let k = MulKit::karatsuba();
    let regions = [(f, IN), (g, IN), (vec![0; rn], OUT), (vec![0; scratch], Permission::Scratch)];
    run(q, Model::RoRw, &regions, &[2], |m, v| rorw::remainder_smallspace(m, &k, v[0], v[1], v[2], v[3]))
}

/// `r + f*g mod p` for a monic `p` of size `|r| + 1`. `r` defaults to zero.
#[pyfunction]
#[pyo3(signature = (f, g, p, r = None, q = DEFAULT_Q))]
fn modular_mul(f: Vec<i64>, g: Vec<i64>, p: Vec<i64>, r: Option<Vec<i64>>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let r = r.unwrap_or_else(|| vec![0; p.len().saturating_sub(1)]);
    let k = MulKit::karatsuba();
    run(q, Model::RwRw, &[(f, IN), (g, IN), (r, IO), (p, IN)], &[2], |m, v| rwrw::modular_mul_any(m, &k, v[0], v[1], v[2], v[3]))
}

/// Values of `f` at each point.
#[pyfunction]
#[pyo3(signature = (f, points, q = DEFAULT_Q))]
fn mp_eval(f: Vec<i64>, points: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let k = points.len();
    let kt = MulKit::karatsuba();
    run(q, Model::RoRw, &[(f, IN), (points, IN), (vec![0; k], OUT)], &[2], |m, v| rorw::mp_eval_cs(m, &kt, v[0], v[1], v[2]))
}

/// The polynomial of size `|points|` through `(points[i], values[i])`. Points must be distinct and nonzero.
#[pyfunction]
#[pyo3(signature = (points, values, q = DEFAULT_Q))]
fn interp(points: Vec<i64>, values: Vec<i64>, q: u64) -> PyResult<(Vec<Vec<Fe>>, Metrics)> {
    let n = points.len();
    let k = MulKit::karatsuba();
    run(q, Model::RoRw, &[(points, IN), (values, IN), (vec![0; n], OUT)], &[2], |m, v| rorw::interp_cs(m, &k, v[0], v[1], v[2]))
}

/// Straight-line in-place program for a named bilinear algorithm:
/// `karatsuba2`, `karatsuba2-2d` or `strassen-winograd`.
#[pyfunction]
#[pyo3(signature = (name, q = DEFAULT_Q))]
fn emit(name: &str, q: u64) -> PyResult<String> {
    let fl = field(q)?;
    let prog = match name {
        "karatsuba2" => bilinear::emit_inplace(&bilinear::karatsuba_program(fl, false)),
        "karatsuba2-2d" => bilinear::emit_inplace_2d(&bilinear::karatsuba_program(fl, true)).map_err(err)?,
        "strassen-winograd" => bilinear::emit_inplace(&bilinear::strassen_winograd_program(fl)),
        _ => return Err(PyValueError::new_err(format!("unknown program {name:?}"))),
    };
    Ok(bilinear::format_program(&fl, &prog))
}

/// Runs the `ipoly` command line and returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    let out = inplace_poly::cli::run(std::iter::once("ipoly".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn inplace_poly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Poly>()?;
    m.add_class::<Metrics>()?;
    m.add_function(wrap_pyfunction!(cumulative_karatsuba, m)?)?;
    m.add_function(wrap_pyfunction!(cumulative_fft_mul, m)?)?;
    m.add_function(wrap_pyfunction!(lower_product, m)?)?;
    m.add_function(wrap_pyfunction!(middle_product, m)?)?;
    m.add_function(wrap_pyfunction!(series_inv, m)?)?;
    m.add_function(wrap_pyfunction!(series_div, m)?)?;
    m.add_function(wrap_pyfunction!(divrem, m)?)?;
    m.add_function(wrap_pyfunction!(remainder, m)?)?;
    m.add_function(wrap_pyfunction!(modular_mul, m)?)?;
    m.add_function(wrap_pyfunction!(mp_eval, m)?)?;
    m.add_function(wrap_pyfunction!(interp, m)?)?;
    m.add_function(wrap_pyfunction!(emit, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
