//! Real Lie algebras from rational structure constants, the
//! Chevalley–Eilenberg complex, and relative basic subcomplexes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, combinations, sort_with_sign, AltForm, BasedSpace};
use crate::linalg::{exact_rank, format_q, parse_q, Matrix, Scalar, Q};
use crate::par::Exec;

/// Largest fiber `Λ^p` the assembler will materialize by default.
pub const DEFAULT_MAX_FIBER: usize = 4000;

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    space: BasedSpace,
    /// `[e_i, e_j]` for `i < j`, nonzero entries only.
    structure: BTreeMap<(usize, usize), Vec<Q>>,
    /// Sparse `d e^k` as `(i, j, coefficient)` with `i < j`.
    d_covectors: Vec<Vec<(usize, usize, Q)>>,
}

impl LieAlgebra {
    /// Builds and verifies antisymmetry and the Jacobi identity.
    pub fn new(
        space: BasedSpace,
        brackets: impl IntoIterator<Item = ((usize, usize), Vec<Q>)>,
    ) -> Result<Self> {
        let n = space.dim();
        let mut structure: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
        for ((i, j), v) in brackets {
            if i >= n || j >= n {
                return Err(Error::Parse(format!("bracket index ({i}, {j}) out of range")));
            }
            if v.len() != n {
                return Err(Error::Arity {
                    expected: n,
                    got: v.len(),
                });
            }
            if i == j {
                if v.iter().any(|c| !Scalar::is_zero(c)) {
                    return Err(Error::Parse(format!("[e_{i}, e_{i}] must vanish")));
                }
                continue;
            }
            let (key, v) = if i < j {
                ((i, j), v)
            } else {
                ((j, i), v.into_iter().map(|c| -c).collect())
            };
            if structure.contains_key(&key) {
                return Err(Error::Parse(format!("bracket ({}, {}) given twice", key.0, key.1)));
            }
            if v.iter().any(|c| !Scalar::is_zero(c)) {
                structure.insert(key, v);
            }
        }
        let mut d_covectors = vec![Vec::new(); n];
        for (&(i, j), v) in &structure {
            for (k, c) in v.iter().enumerate() {
                if !Scalar::is_zero(c) {
                    d_covectors[k].push((i, j, -c.clone()));
                }
            }
        }
        let g = Self {
            space,
            structure,
            d_covectors,
        };
        g.check_jacobi()?;
        Ok(g)
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ei = unit(n, i);
                    let ej = unit(n, j);
                    let ek = unit(n, k);
                    let a = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let b = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let c = self.bracket(&ek, &self.bracket(&ei, &ej));
                    if a.iter()
                        .zip(&b)
                        .zip(&c)
                        .any(|((x, y), z)| !Scalar::is_zero(&(x.clone() + y.clone() + z.clone())))
                    {
                        return Err(Error::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.is_empty()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Q> {
        let n = self.dim();
        if i == j {
            return vec![Q::zero(); n];
        }
        let (key, sign) = if i < j { ((i, j), false) } else { ((j, i), true) };
        match self.structure.get(&key) {
            Some(v) if sign => v.iter().map(|c| -c.clone()).collect(),
            Some(v) => v.clone(),
            None => vec![Q::zero(); n],
        }
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (&(i, j), v) in &self.structure {
            let w = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
            if Scalar::is_zero(&w) {
                continue;
            }
            for (o, c) in out.iter_mut().zip(v) {
                if !Scalar::is_zero(c) {
                    *o = o.clone() + w.clone() * c.clone();
                }
            }
        }
        out
    }

    /// Float bracket, for numerical callers.
    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (&(i, j), v) in &self.structure {
            let w = x[i] * y[j] - x[j] * y[i];
            for (o, c) in out.iter_mut().zip(v) {
                *o += w * c.to_f64();
            }
        }
        out
    }

    /// Matrix of `ad_x` in the fixed basis.
    pub fn ad(&self, x: &[Q]) -> Matrix<Q> {
        let n = self.dim();
        let cols: Vec<Vec<Q>> = (0..n).map(|j| self.bracket(x, &unit(n, j))).collect();
        Matrix::from_columns(n, &cols)
    }

    pub fn to_doc(&self) -> LieAlgebraDoc {
        LieAlgebraDoc {
            dim: self.dim(),
            labels: self.space.labels().map(|l| l.to_vec()),
            brackets: self
                .structure
                .iter()
                .map(|(&(i, j), v)| BracketDoc {
                    i,
                    j,
                    coeffs: v.iter().map(format_q).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &LieAlgebraDoc) -> Result<Self> {
        let space = match &doc.labels {
            Some(l) => {
                if l.len() != doc.dim {
                    return Err(Error::Parse(format!(
                        "{} labels for dim {}",
                        l.len(),
                        doc.dim
                    )));
                }
                BasedSpace::with_labels(l.clone())?
            }
            None => BasedSpace::new(doc.dim)?,
        };
        let mut brackets = Vec::with_capacity(doc.brackets.len());
        for b in &doc.brackets {
            let coeffs = b.coeffs.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?;
            brackets.push(((b.i, b.j), coeffs));
        }
        Self::new(space, brackets)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LieAlgebraDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn abelian(n: usize) -> Result<Self> {
        Self::new(BasedSpace::new(n)?, [])
    }

    /// `[x, y] = z`.
    pub fn heisenberg() -> Self {
        Self::new(
            BasedSpace::with_labels(vec!["x".into(), "y".into(), "z".into()]).unwrap(),
            [((0, 1), qv(&[0, 0, 1]))],
        )
        .expect("Heisenberg algebra")
    }

    /// `[e_i, e_j] = ε_{ijk} e_k`.
    pub fn su2() -> Self {
        Self::new(
            BasedSpace::new(3).unwrap(),
            [
                ((0, 1), qv(&[0, 0, 1])),
                ((1, 2), qv(&[1, 0, 0])),
                ((2, 0), qv(&[0, 1, 0])),
            ],
        )
        .expect("su(2)")
    }

    /// `gl_n(C)` as a real Lie algebra of dimension `2n²`, in the basis of
    /// [`gl_index`].
    pub fn gl_complex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("gl_0".into()));
        }
        let dim = 2 * n * n;
        let mut labels = Vec::with_capacity(dim);
        for a in 0..n {
            for b in 0..n {
                labels.push(format!("E{}{}", a + 1, b + 1));
                labels.push(format!("iE{}{}", a + 1, b + 1));
            }
        }
        let mut brackets = Vec::new();
        for x in 0..dim {
            for y in x + 1..dim {
                let (a, b, rx) = gl_unindex(n, x);
                let (c, d, ry) = gl_unindex(n, y);
                // (i^rx E_ab)(i^ry E_cd) - (i^ry E_cd)(i^rx E_ab)
                let r = rx + ry;
                let (phase_imag, phase_sign) = (r % 2 == 1, if r == 2 { -1 } else { 1 });
                let mut v = vec![Q::zero(); dim];
                if b == c {
                    let k = gl_index(n, a, d, phase_imag);
                    v[k] = v[k].clone() + Q::from_i64(phase_sign);
                }
                if d == a {
                    let k = gl_index(n, c, b, phase_imag);
                    v[k] = v[k].clone() - Q::from_i64(phase_sign);
                }
                if v.iter().any(|c| !Scalar::is_zero(c)) {
                    brackets.push(((x, y), v));
                }
            }
        }
        Self::new(BasedSpace::with_labels(labels)?, brackets)
    }

    /// Looks up a built-in algebra: `abelian:N`, `heisenberg`, `su2`,
    /// `glNC` (e.g. `gl2C`).
    pub fn builtin(name: &str) -> Result<Self> {
        if let Some(n) = name.strip_prefix("abelian:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad abelian dimension in {name:?}")))?;
            return Self::abelian(n);
        }
        match name {
            "heisenberg" => Ok(Self::heisenberg()),
            "su2" => Ok(Self::su2()),
            _ => {
                if let Some(n) = name.strip_prefix("gl").and_then(|r| r.strip_suffix('C')) {
                    if let Ok(n) = n.parse::<usize>() {
                        return Self::gl_complex(n);
                    }
                }
                Err(Error::Parse(format!("unknown built-in algebra {name:?}")))
            }
        }
    }
}

/// Serialized Lie algebra: `{dim, labels?, brackets: [{i, j, coeffs}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraDoc {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub brackets: Vec<BracketDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketDoc {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<String>,
}

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_i64(x)).collect()
}

pub fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Realified coordinate of `E_ab` (or `i·E_ab` when `imag`), row-major.
pub fn gl_index(n: usize, a: usize, b: usize, imag: bool) -> usize {
    2 * (a * n + b) + usize::from(imag)
}

/// Inverse of [`gl_index`]: `(a, b, 0|1)`.
pub fn gl_unindex(n: usize, k: usize) -> (usize, usize, usize) {
    let e = k / 2;
    (e / n, e % n, k % 2)
}

/// Basis of `u(n)` inside realified `gl_n(C)`: `iE_aa`, then
/// `E_ab − E_ba` and `i(E_ab + E_ba)` for `a < b`.
pub fn u_basis(n: usize) -> Vec<Vec<Q>> {
    let dim = 2 * n * n;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        out.push(unit(dim, gl_index(n, a, a, true)));
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![Q::zero(); dim];
            v[gl_index(n, a, b, false)] = Q::one();
            v[gl_index(n, b, a, false)] = -Q::one();
            out.push(v);
            let mut w = vec![Q::zero(); dim];
            w[gl_index(n, a, b, true)] = Q::one();
            w[gl_index(n, b, a, true)] = Q::one();
            out.push(w);
        }
    }
    out
}

/// Basis of Hermitian matrices `p`: `E_aa`, then `E_ab + E_ba` and
/// `i(E_ab − E_ba)` for `a < b`.
pub fn p_basis(n: usize) -> Vec<Vec<Q>> {
    let dim = 2 * n * n;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        out.push(unit(dim, gl_index(n, a, a, false)));
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![Q::zero(); dim];
            v[gl_index(n, a, b, false)] = Q::one();
            v[gl_index(n, b, a, false)] = Q::one();
            out.push(v);
            let mut w = vec![Q::zero(); dim];
            w[gl_index(n, a, b, true)] = Q::one();
            w[gl_index(n, b, a, true)] = -Q::one();
            out.push(w);
        }
    }
    out
}

/// Realified matrix of `M ↦ (M + M*)/2`.
pub fn hermitian_projection(n: usize) -> Matrix<Q> {
    let dim = 2 * n * n;
    let half = Q::new(1.into(), 2.into());
    let mut m = Matrix::<Q>::zeros(dim, dim);
    for a in 0..n {
        for b in 0..n {
            // Re part symmetric, Im part antisymmetric.
            let re_ab = gl_index(n, a, b, false);
            let re_ba = gl_index(n, b, a, false);
            let im_ab = gl_index(n, a, b, true);
            let im_ba = gl_index(n, b, a, true);
            m.set(re_ab, re_ab, m.get(re_ab, re_ab).clone() + half.clone());
            m.set(re_ab, re_ba, m.get(re_ab, re_ba).clone() + half.clone());
            m.set(im_ab, im_ab, m.get(im_ab, im_ab).clone() + half.clone());
            m.set(im_ab, im_ba, m.get(im_ab, im_ba).clone() - half.clone());
        }
    }
    m
}

/// A subalgebra `k ⊂ g` given by a basis of coordinate vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Subalgebra {
    parent: LieAlgebra,
    basis: Vec<Vec<Q>>,
}

impl Subalgebra {
    /// Checks independence and closure under the bracket.
    pub fn new(parent: &LieAlgebra, basis: Vec<Vec<Q>>) -> Result<Self> {
        let n = parent.dim();
        if let Some(v) = basis.iter().find(|v| v.len() != n) {
            return Err(Error::Arity {
                expected: n,
                got: v.len(),
            });
        }
        if basis.is_empty() {
            return Ok(Self {
                parent: parent.clone(),
                basis,
            });
        }
        let span = Matrix::from_columns(n, &basis);
        if exact_rank(&span) != basis.len() {
            return Err(Error::NotSubalgebra("basis vectors are linearly dependent".into()));
        }
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                let br = parent.bracket(&basis[a], &basis[b]);
                let rhs = Matrix::from_columns(n, &[br]);
                if span.solve(&rhs).is_none() {
                    return Err(Error::NotSubalgebra(format!(
                        "bracket of basis vectors {a} and {b} leaves the span"
                    )));
                }
            }
        }
        Ok(Self {
            parent: parent.clone(),
            basis,
        })
    }

    pub fn zero(parent: &LieAlgebra) -> Self {
        Self {
            parent: parent.clone(),
            basis: Vec::new(),
        }
    }

    pub fn whole(parent: &LieAlgebra) -> Self {
        let n = parent.dim();
        Self {
            parent: parent.clone(),
            basis: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    /// `u(n) ⊂ gl_n(C)`; `parent` must be [`LieAlgebra::gl_complex`]`(n)`.
    pub fn unitary(parent: &LieAlgebra, n: usize) -> Result<Self> {
        if parent.dim() != 2 * n * n {
            return Err(Error::SpaceMismatch(format!(
                "u({n}) needs a parent of dimension {}",
                2 * n * n
            )));
        }
        Self::new(parent, u_basis(n))
    }

    /// `0`, `all`, or `uN`.
    pub fn builtin(parent: &LieAlgebra, name: &str) -> Result<Self> {
        match name {
            "0" | "zero" => Ok(Self::zero(parent)),
            "all" => Ok(Self::whole(parent)),
            _ => {
                let n = name
                    .strip_prefix('u')
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown built-in subalgebra {name:?}")))?;
                Self::unitary(parent, n)
            }
        }
    }

    /// Parses `{"basis": [["p/q", …], …]}`.
    pub fn from_json(parent: &LieAlgebra, text: &str) -> Result<Self> {
        let doc: SubalgebraDoc = serde_json::from_str(text)?;
        let basis = doc
            .basis
            .iter()
            .map(|v| v.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(parent, basis)
    }

    pub fn parent(&self) -> &LieAlgebra {
        &self.parent
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraDoc {
    pub basis: Vec<Vec<String>>,
}

fn check_space(g: &LieAlgebra, form: &AltForm<Q>) -> Result<()> {
    if g.space().compatible(form.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "form on dim {} vs algebra of dim {}",
            form.space().dim(),
            g.dim()
        )))
    }
}

/// `d_CE` with zero anchor: `d e^k = −Σ_{i<j} c^k_{ij} e^i ∧ e^j`,
/// extended as an antiderivation.
pub fn ce_differential(g: &LieAlgebra, form: &AltForm<Q>) -> Result<AltForm<Q>> {
    check_space(g, form)?;
    let p = form.degree();
    let mut terms: Vec<(Vec<usize>, Q)> = Vec::new();
    for (key, c) in form.terms() {
        for (m, &k) in key.iter().enumerate() {
            for (a, b, w) in &g.d_covectors[k] {
                if key.iter().enumerate().any(|(t, &x)| t != m && (x == *a || x == *b)) {
                    continue;
                }
                let mut idx = Vec::with_capacity(p + 1);
                idx.extend_from_slice(&key[..m]);
                idx.push(*a);
                idx.push(*b);
                idx.extend_from_slice(&key[m + 1..]);
                let Some(sign) = sort_with_sign(&mut idx) else {
                    continue;
                };
                let v = c.clone() * w.clone();
                let neg = (sign < 0) ^ (m % 2 == 1);
                terms.push((idx, if neg { -v } else { v }));
            }
        }
    }
    AltForm::from_terms(g.space(), p + 1, terms)
}

/// `𝓛_ξ = d ι_ξ + ι_ξ d`.
pub fn lie_derivative(g: &LieAlgebra, xi: &[Q], form: &AltForm<Q>) -> Result<AltForm<Q>> {
    check_space(g, form)?;
    if xi.len() != g.dim() {
        return Err(Error::Arity {
            expected: g.dim(),
            got: xi.len(),
        });
    }
    let second = ce_differential(g, form)?.contract(xi)?;
    if form.degree() == 0 {
        return Ok(second);
    }
    let first = ce_differential(g, &form.contract(xi)?)?;
    first.add(&second)
}

/// Matrix of a linear operator `Λ^p → Λ^{p_out}` assembled column by column.
pub fn operator_matrix<F>(
    space: &BasedSpace,
    p: usize,
    p_out: usize,
    exec: Exec,
    op: F,
) -> Result<Matrix<Q>>
where
    F: Fn(&AltForm<Q>) -> Result<AltForm<Q>> + Sync + Send,
{
    let basis = combinations(space.dim(), p);
    let rows = binomial(space.dim(), p_out);
    let cols = exec.map(&basis, |key| {
        let e = AltForm::basis(space, key)?;
        let out = op(&e)?;
        Ok(out.to_dense())
    });
    let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(rows, &cols))
}

/// Finite cochain complex with exact rational differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedComplex {
    dims: Vec<usize>,
    /// `differentials[p]` maps degree `p` to degree `p + 1`.
    differentials: Vec<Matrix<Q>>,
    /// When set, the top stored degree only supplies the outgoing
    /// differential of the degree below it and is not reported.
    truncated: bool,
}

impl GradedComplex {
    pub fn new(dims: Vec<usize>, differentials: Vec<Matrix<Q>>) -> Result<Self> {
        Self::with_truncation(dims, differentials, false)
    }

    fn with_truncation(
        dims: Vec<usize>,
        differentials: Vec<Matrix<Q>>,
        truncated: bool,
    ) -> Result<Self> {
        if dims.is_empty() || differentials.len() + 1 != dims.len() {
            return Err(Error::InvalidDimension(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (p, d) in differentials.iter().enumerate() {
            if d.rows() != dims[p + 1] || d.cols() != dims[p] {
                return Err(Error::InvalidDimension(format!(
                    "d_{p} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[p + 1],
                    dims[p]
                )));
            }
        }
        for p in 0..differentials.len().saturating_sub(1) {
            if !differentials[p + 1].mul(&differentials[p]).is_zero() {
                return Err(Error::NotAComplex(p));
            }
        }
        Ok(Self {
            dims,
            differentials,
            truncated,
        })
    }

    /// Dimensions of the reported degrees.
    pub fn dims(&self) -> &[usize] {
        if self.truncated {
            &self.dims[..self.dims.len() - 1]
        } else {
            &self.dims
        }
    }

    pub fn differential(&self, p: usize) -> Option<&Matrix<Q>> {
        self.differentials.get(p)
    }

    pub fn differentials(&self) -> &[Matrix<Q>] {
        &self.differentials
    }

    pub fn top_degree(&self) -> usize {
        self.dims().len() - 1
    }

    /// Exact ranks of the stored differentials.
    pub fn ranks(&self, exec: Exec) -> Vec<usize> {
        exec.map(&self.differentials, exact_rank)
    }

    /// `b_p = dim C^p − rank d_p − rank d_{p−1}`.
    pub fn betti(&self, exec: Exec) -> Vec<usize> {
        let ranks = self.ranks(exec);
        (0..self.dims().len())
            .map(|p| {
                let out = ranks.get(p).copied().unwrap_or(0);
                let inc = if p == 0 { 0 } else { ranks[p - 1] };
                self.dims[p] - out - inc
            })
            .collect()
    }

    /// Whether every differential is the zero matrix.
    pub fn has_zero_differential(&self) -> bool {
        self.differentials.iter().all(Matrix::is_zero)
    }
}

/// Size limits for complex assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Highest degree to report; `None` means all.
    pub max_degree: Option<usize>,
    /// Refuse to materialize any fiber larger than this.
    pub max_fiber: usize,
    pub exec: Exec,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            max_degree: None,
            max_fiber: DEFAULT_MAX_FIBER,
            exec: Exec::default(),
        }
    }
}

fn check_budget(n: usize, top: usize, max_fiber: usize) -> Result<()> {
    for p in 0..=top.min(n) {
        let size = binomial(n, p);
        if size > max_fiber {
            return Err(Error::Budget(format!(
                "Λ^{p} has dimension {size}, above the limit {max_fiber}"
            )));
        }
    }
    Ok(())
}

/// The Chevalley–Eilenberg complex `Λ^• g*`.
pub fn ce_complex(g: &LieAlgebra, opts: AssemblyOptions) -> Result<GradedComplex> {
    let n = g.dim();
    let report_top = opts.max_degree.map_or(n, |d| d.min(n));
    // One extra degree supplies the outgoing differential of the top one.
    let stored_top = (report_top + 1).min(n);
    let truncated = stored_top > report_top;
    check_budget(n, stored_top, opts.max_fiber)?;
    let dims: Vec<usize> = (0..=stored_top).map(|p| binomial(n, p)).collect();
    let diffs = (0..stored_top)
        .map(|p| operator_matrix(g.space(), p, p + 1, opts.exec, |f| ce_differential(g, f)))
        .collect::<Result<Vec<_>>>()?;
    GradedComplex::with_truncation(dims, diffs, truncated)
}

/// Betti numbers of `g` up to `opts.max_degree`.
pub fn betti(g: &LieAlgebra, opts: AssemblyOptions) -> Result<Vec<usize>> {
    Ok(ce_complex(g, opts)?.betti(opts.exec))
}

/// The `k`-basic subcomplex together with its embedding into `Λ^• g*`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicSubcomplex {
    pub complex: GradedComplex,
    /// `embeddings[p]` is `C(dim g, p) × dims[p]`; columns are basic forms.
    pub embeddings: Vec<Matrix<Q>>,
}

impl BasicSubcomplex {
    /// Basic forms of degree `p` as [`AltForm`]s.
    pub fn basis_forms(&self, space: &BasedSpace, p: usize) -> Result<Vec<AltForm<Q>>> {
        let e = &self.embeddings[p];
        (0..e.cols())
            .map(|c| AltForm::from_dense(space, p, &e.column(c)))
            .collect()
    }
}

/// Nullspace basis together with the free coordinates (where it is the identity).
fn nullspace_with_free(m: &Matrix<Q>) -> (Matrix<Q>, Vec<usize>) {
    let (_, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    (m.nullspace(), free)
}

/// Forms killed by `ι_η` and `𝓛_η` for every `η` in the subalgebra basis.
///
/// Horizontal forms vanish above degree `dim g − dim k`, so that is the
/// default top degree.
pub fn basic_subcomplex(
    g: &LieAlgebra,
    k: &Subalgebra,
    opts: AssemblyOptions,
) -> Result<BasicSubcomplex> {
    if !k.parent().space().compatible(g.space()) {
        return Err(Error::SpaceMismatch("subalgebra of a different algebra".into()));
    }
    let n = g.dim();
    let horizontal_top = n - k.dim();
    let top = opts.max_degree.map_or(horizontal_top, |d| d.min(horizontal_top));
    check_budget(n, top, opts.max_fiber)?;
    let exec = opts.exec;

    let per_degree = exec.map_range(top + 1, |p| -> Result<(Matrix<Q>, Vec<usize>)> {
        let size = binomial(n, p);
        let mut constraints = Matrix::zeros(0, size);
        for eta in k.basis() {
            if p > 0 {
                let iota =
                    operator_matrix(g.space(), p, p - 1, Exec::Sequential, |f| f.contract(eta))?;
                constraints = constraints.vstack(&iota);
            }
            let lie = operator_matrix(g.space(), p, p, Exec::Sequential, |f| {
                lie_derivative(g, eta, f)
            })?;
            constraints = constraints.vstack(&lie);
        }
        if constraints.rows() == 0 {
            return Ok((Matrix::identity(size), (0..size).collect()));
        }
        Ok(nullspace_with_free(&constraints))
    });
    let per_degree = per_degree.into_iter().collect::<Result<Vec<_>>>()?;

    let mut diffs = Vec::with_capacity(top);
    for p in 0..top {
        let (e_p, _) = &per_degree[p];
        let (e_next, free_next) = &per_degree[p + 1];
        let d = operator_matrix(g.space(), p, p + 1, exec, |f| ce_differential(g, f))?;
        let image = d.mul(e_p);
        let restricted = Matrix::from_fn(e_next.cols(), e_p.cols(), |r, c| {
            image.get(free_next[r], c).clone()
        });
        if e_next.mul(&restricted) != image {
            return Err(Error::InvariantViolation(format!(
                "basic subspace in degree {p} is not mapped into the basic subspace by d"
            )));
        }
        diffs.push(restricted);
    }
    let dims = per_degree.iter().map(|(e, _)| e.cols()).collect();
    let complex = GradedComplex::new(dims, diffs)?;
    Ok(BasicSubcomplex {
        complex,
        embeddings: per_degree.into_iter().map(|(e, _)| e).collect(),
    })
}

/// Betti numbers of the basic subcomplex.
pub fn relative_betti(g: &LieAlgebra, k: &Subalgebra, opts: AssemblyOptions) -> Result<Vec<usize>> {
    Ok(basic_subcomplex(g, k, opts)?.complex.betti(opts.exec))
}

/// Whether `form` is invariant under the coadjoint action of a group
/// element whose adjoint matrix is `ad` (`form ∘ Ad_g^{-1} = form`).
///
/// This is the finite check for disconnected subgroups; it certifies only
/// the elements supplied.
pub fn is_ad_invariant(form: &AltForm<Q>, ad: &Matrix<Q>) -> Result<bool> {
    Ok(&form.pullback(ad, form.space())? == form)
}

/// `ι_η α = 0` for every basis vector of `k`.
pub fn is_horizontal(k: &Subalgebra, form: &AltForm<Q>) -> Result<bool> {
    if form.degree() == 0 {
        return Ok(true);
    }
    for eta in k.basis() {
        if !form.contract(eta)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `𝓛_η α = 0` for every basis vector of `k`.
pub fn is_invariant(g: &LieAlgebra, k: &Subalgebra, form: &AltForm<Q>) -> Result<bool> {
    for eta in k.basis() {
        if !lie_derivative(g, eta, form)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `form` lies in the image of `d_CE` (exact rank test).
pub fn is_exact(g: &LieAlgebra, form: &AltForm<Q>, exec: Exec) -> Result<bool> {
    let p = form.degree();
    if p == 0 {
        return Ok(form.is_zero());
    }
    let d = operator_matrix(g.space(), p - 1, p, exec, |f| ce_differential(g, f))?;
    let rhs = Matrix::from_columns(d.rows(), &[form.to_dense()]);
    Ok(exact_rank(&d) == exact_rank(&d.hstack(&rhs)))
}
