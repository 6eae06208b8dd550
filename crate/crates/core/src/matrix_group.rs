//! `GL_n(C)` numerics: Hermitian functional calculus, polar decomposition,
//! positive-definite coset points, the retraction `λ_t` and Maurer–Cartan
//! pullbacks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::AltForm;
use crate::lie_algebra::{gl_index, u_basis};
use crate::linalg::Scalar;

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance for Hermitian / unitary structure checks.
pub const STRUCT_TOL: f64 = 1e-10;
/// Relative tolerance for reconstruction checks.
pub const RECON_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { c(0.0, 0.0) })
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    diag(&values.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>())
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::InvalidDimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidDimension("non-finite matrix entry".into()));
    }
    Ok(m.nrows())
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm() / m.norm().max(1.0)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m * m.adjoint() - identity(m.nrows())).norm() <= tol
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let r = hermitian_residual(m);
    if r > STRUCT_TOL {
        return Err(Error::NotHermitian(r));
    }
    Ok(())
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
fn herm_apply(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let n = m.nrows();
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(f(eig.eigenvalues[i]), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let v = &eig.eigenvectors;
    v * d * v.adjoint()
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    let sym = (m + m.adjoint()).scale(0.5);
    sym.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Eigendecomposition of a positive-definite Hermitian matrix, reused for
/// real powers.
#[derive(Clone, Debug)]
pub struct PositiveEigen {
    vectors: CMatrix,
    values: Vec<f64>,
}

impl PositiveEigen {
    pub fn new(m: &CMatrix) -> Result<Self> {
        check_square(m)?;
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            vectors: eig.eigenvectors,
            values,
        })
    }

    /// `M^s`.
    pub fn power(&self, s: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let f = l.powf(s);
            scaled.column_mut(j).scale_mut(f);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn herm_exp(x: &CMatrix) -> Result<CMatrix> {
    check_hermitian(x)?;
    Ok(herm_apply(x, f64::exp))
}

pub fn herm_log(p: &CMatrix) -> Result<CMatrix> {
    check_hermitian(p)?;
    let min = min_eigenvalue(p);
    if min <= 0.0 {
        return Err(Error::NotPositive(min));
    }
    Ok(herm_apply(p, f64::ln))
}

pub fn herm_sqrt(p: &CMatrix) -> Result<CMatrix> {
    check_hermitian(p)?;
    let min = min_eigenvalue(p);
    if min <= 0.0 {
        return Err(Error::NotPositive(min));
    }
    Ok(herm_apply(p, f64::sqrt))
}

/// General matrix exponential.
pub fn expm(x: &CMatrix) -> CMatrix {
    x.clone().exp()
}

fn check_invertible(a: &CMatrix) -> Result<usize> {
    let n = check_square(a)?;
    let det = a.determinant().norm();
    let scale = a.norm().max(1.0).powi(n as i32);
    if !(det > 1e-12 * scale) {
        return Err(Error::Singular(det));
    }
    Ok(n)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    check_invertible(a)?;
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(a.determinant().norm()))
}

/// `A = e^X U` with `X` Hermitian and `U` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarParts {
    pub x: CMatrix,
    pub u: CMatrix,
}

impl PolarParts {
    pub fn reconstruct(&self) -> CMatrix {
        herm_apply(&self.x, f64::exp) * &self.u
    }
}

/// `X = log((AA*)^{1/2})`, `U = e^{-X} A`.
pub fn polar(a: &CMatrix) -> Result<PolarParts> {
    check_invertible(a)?;
    let aa = a * a.adjoint();
    let x = herm_log(&aa)?.scale(0.5);
    let u = herm_apply(&x, |v| (-v).exp()) * a;
    let parts = PolarParts { x, u };
    let n = a.nrows();
    let recon = (parts.reconstruct() - a).norm();
    if hermitian_residual(&parts.x) > STRUCT_TOL
        || !is_unitary(&parts.u, STRUCT_TOL * n as f64)
        || recon > RECON_TOL * a.norm()
    {
        return Err(Error::InvariantViolation(format!(
            "polar decomposition failed its checks (reconstruction error {recon:e})"
        )));
    }
    Ok(parts)
}

/// `tr X` of the polar decomposition; equals `log|det A|`.
pub fn polar_trace(a: &CMatrix) -> Result<f64> {
    Ok(polar(a)?.x.trace().re)
}

/// A point of `GL_n / U(n)`: a positive-definite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetPoint {
    p: CMatrix,
}

impl CosetPoint {
    pub fn new(p: CMatrix) -> Result<Self> {
        check_hermitian(&p)?;
        let min = min_eigenvalue(&p);
        if min <= 0.0 {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { p })
    }

    pub fn identity(n: usize) -> Self {
        Self { p: identity(n) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }
}

/// `coset(A) = (AA*)^{1/2}`.
pub fn coset(a: &CMatrix) -> Result<CosetPoint> {
    check_invertible(a)?;
    Ok(CosetPoint {
        p: herm_sqrt(&(a * a.adjoint()))?,
    })
}

/// `a · P = (a P² a*)^{1/2}`.
pub fn act(a: &CMatrix, pt: &CosetPoint) -> Result<CosetPoint> {
    check_invertible(a)?;
    if a.nrows() != pt.n() {
        return Err(Error::InvalidDimension("action of a matrix of the wrong size".into()));
    }
    let m = a * &pt.p * &pt.p * a.adjoint();
    Ok(CosetPoint { p: herm_sqrt(&m)? })
}

/// `λ_t(e^X) = e^{tX}`.
pub fn retract(t: f64, pt: &CosetPoint) -> Result<CosetPoint> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("retraction time {t} outside [0,1]")));
    }
    Ok(retract_unchecked(t, pt))
}

/// `λ_t` for any real `t` (used by finite-difference stencils).
pub fn retract_unchecked(t: f64, pt: &CosetPoint) -> CosetPoint {
    CosetPoint {
        p: herm_apply(&pt.p, |v| (t * v.ln()).exp()),
    }
}

/// Realified coordinates (see [`gl_index`]).
pub fn realify(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut v = vec![0.0; 2 * n * n];
    for a in 0..n {
        for b in 0..n {
            v[gl_index(n, a, b, false)] = m[(a, b)].re;
            v[gl_index(n, a, b, true)] = m[(a, b)].im;
        }
    }
    v
}

/// Inverse of [`realify`].
pub fn complexify(v: &[f64], n: usize) -> Result<CMatrix> {
    if v.len() != 2 * n * n {
        return Err(Error::Arity {
            expected: 2 * n * n,
            got: v.len(),
        });
    }
    Ok(CMatrix::from_fn(n, n, |a, b| {
        c(v[gl_index(n, a, b, false)], v[gl_index(n, a, b, true)])
    }))
}

/// Matrix size `n` of a realified space of dimension `2n²`.
pub fn gl_size(dim: usize) -> Result<usize> {
    let n = ((dim / 2) as f64).sqrt().round() as usize;
    if n == 0 || 2 * n * n != dim {
        return Err(Error::SpaceMismatch(format!(
            "dimension {dim} is not that of a realified gl_n"
        )));
    }
    Ok(n)
}

/// A `u(n)`-horizontal float form on realified `gl_n`, checked once.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalForm {
    form: AltForm<f64>,
    n: usize,
}

impl HorizontalForm {
    pub fn new(form: AltForm<f64>) -> Result<Self> {
        let n = gl_size(form.space().dim())?;
        if form.degree() > 0 {
            let tol = 1e-12 * form.max_abs().max(1.0);
            for eta in u_basis(n) {
                let eta: Vec<f64> = eta.iter().map(Scalar::to_f64).collect();
                if form.contract(&eta)?.max_abs() > tol {
                    return Err(Error::NotHorizontal);
                }
            }
        }
        Ok(Self { form, n })
    }

    pub fn form(&self) -> &AltForm<f64> {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    /// `α(P⁻¹V_1, …, P⁻¹V_q)`.
    pub fn pullback_at(&self, pt: &CosetPoint, tangents: &[CMatrix]) -> Result<f64> {
        if tangents.len() != self.degree() {
            return Err(Error::Arity {
                expected: self.degree(),
                got: tangents.len(),
            });
        }
        if pt.n() != self.n || tangents.iter().any(|v| v.nrows() != self.n || !v.is_square()) {
            return Err(Error::InvalidDimension("matrix size does not match the form".into()));
        }
        let p_inv = inverse(&pt.p)?;
        let args: Vec<Vec<f64>> = tangents.iter().map(|v| realify(&(&p_inv * v))).collect();
        self.form.eval(&args)
    }
}

/// Maurer–Cartan pullback of a horizontal form to `GL_n/U(n)` at `P`.
pub fn mc_pullback(alpha: &AltForm<f64>, pt: &CosetPoint, tangents: &[CMatrix]) -> Result<f64> {
    HorizontalForm::new(alpha.clone())?.pullback_at(pt, tangents)
}

/// Matrix file: rows of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<CMatrix> {
    let n = doc.len();
    if n == 0 || doc.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix must be square and nonempty".into()));
    }
    let m = CMatrix::from_fn(n, n, |r, col| c(doc[r][col][0], doc[r][col][1]));
    check_square(&m).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(m)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum TupleOrMatrix {
    Tuple(Vec<MatrixDoc>),
    Matrix(MatrixDoc),
}

/// Parses either one matrix or a list of matrices (a tuple file).
pub fn tuple_from_json(text: &str) -> Result<Vec<CMatrix>> {
    match serde_json::from_str::<TupleOrMatrix>(text)? {
        TupleOrMatrix::Tuple(v) => v.iter().map(matrix_from_doc).collect(),
        TupleOrMatrix::Matrix(m) => Ok(vec![matrix_from_doc(&m)?]),
    }
}

pub fn tuple_to_json(tuple: &[CMatrix]) -> String {
    let docs: Vec<MatrixDoc> = tuple.iter().map(matrix_to_doc).collect();
    serde_json::to_string(&docs).expect("matrices serialize")
}
