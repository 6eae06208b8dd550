//! Characteristic classes of representations at a point base: pullbacks of
//! `v_{2q−1}` along group representations and of `u_{2q−1}` along Lie
//! algebra representations, with the sum, tensor, dual and reality laws.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::AltForm;
use crate::group_cochains::GroupCochain;
use crate::lie_algebra::{ce_differential, LieAlgebra};
use crate::linalg::{Matrix, Q};
use crate::matrix_group::{c, expm, identity, inverse, realify, CMatrix};
use crate::sampling::{random_direction, random_gl, random_gl_real, rng};
use crate::vanest::{u_generator, v_generator, ve_differentiate, QuadratureSpec};

/// Tolerance for the multiplicativity spot check.
pub const REP_TOL: f64 = 1e-8;

/// The group a representation is defined on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceGroup {
    /// All of `GL_m(C)`.
    #[default]
    All,
    /// `GL_m(R) ⊂ GL_m(C)`.
    Real,
}

impl SourceGroup {
    pub fn contains(&self, a: &CMatrix) -> bool {
        match self {
            SourceGroup::All => true,
            SourceGroup::Real => a.iter().all(|z| z.im == 0.0),
        }
    }

    pub fn sample<R: rand::Rng>(&self, r: &mut R, m: usize) -> CMatrix {
        match self {
            SourceGroup::All => random_gl(r, m),
            SourceGroup::Real => random_gl_real(r, m),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    Identity,
    /// Everything to `I_n`.
    Trivial,
    /// `A ↦ det(A)^k` as a 1×1 matrix (`z ↦ z^k` on `GL_1`).
    Power(i32),
    BlockDiag(Vec<GroupRep>),
    Kron(Box<GroupRep>, Box<GroupRep>),
    /// Inverse transpose.
    Dual(Box<GroupRep>),
    /// `X + iY ↦ [[X, −Y], [Y, X]]` applied to the inner output.
    Realify(Box<GroupRep>),
    /// `outer ∘ inner`.
    Compose(Box<GroupRep>, Box<GroupRep>),
}

/// A representation `G ⊆ GL_m → GL_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRep {
    kind: RepKind,
    source_size: usize,
    target_size: usize,
    source: SourceGroup,
}

fn same_source(a: &GroupRep, b: &GroupRep) -> Result<()> {
    if a.source_size != b.source_size || a.source != b.source {
        return Err(Error::SpaceMismatch(format!(
            "representations of different groups ({:?} GL_{} vs {:?} GL_{})",
            a.source, a.source_size, b.source, b.source_size
        )));
    }
    Ok(())
}

impl GroupRep {
    pub fn identity(m: usize, source: SourceGroup) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension("matrix size must be ≥ 1".into()));
        }
        Ok(Self {
            kind: RepKind::Identity,
            source_size: m,
            target_size: m,
            source,
        })
    }

    pub fn trivial(m: usize, n: usize, source: SourceGroup) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDimension("matrix size must be ≥ 1".into()));
        }
        Ok(Self {
            kind: RepKind::Trivial,
            source_size: m,
            target_size: n,
            source,
        })
    }

    pub fn power(m: usize, k: i32, source: SourceGroup) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension("matrix size must be ≥ 1".into()));
        }
        Ok(Self {
            kind: RepKind::Power(k),
            source_size: m,
            target_size: 1,
            source,
        })
    }

    pub fn direct_sum(parts: Vec<GroupRep>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidDimension("empty direct sum".into()));
        };
        for p in &parts[1..] {
            same_source(first, p)?;
        }
        Ok(Self {
            source_size: first.source_size,
            source: first.source,
            target_size: parts.iter().map(|p| p.target_size).sum(),
            kind: RepKind::BlockDiag(parts),
        })
    }

    pub fn tensor(v: GroupRep, w: GroupRep) -> Result<Self> {
        same_source(&v, &w)?;
        Ok(Self {
            source_size: v.source_size,
            source: v.source,
            target_size: v.target_size * w.target_size,
            kind: RepKind::Kron(Box::new(v), Box::new(w)),
        })
    }

    pub fn dual(v: GroupRep) -> Self {
        Self {
            source_size: v.source_size,
            source: v.source,
            target_size: v.target_size,
            kind: RepKind::Dual(Box::new(v)),
        }
    }

    pub fn realify(v: GroupRep) -> Self {
        Self {
            source_size: v.source_size,
            source: v.source,
            target_size: 2 * v.target_size,
            kind: RepKind::Realify(Box::new(v)),
        }
    }

    pub fn compose(outer: GroupRep, inner: GroupRep) -> Result<Self> {
        if outer.source_size != inner.target_size {
            return Err(Error::SpaceMismatch(format!(
                "cannot compose GL_{} → … with … → GL_{}",
                outer.source_size, inner.target_size
            )));
        }
        Ok(Self {
            source_size: inner.source_size,
            source: inner.source,
            target_size: outer.target_size,
            kind: RepKind::Compose(Box::new(outer), Box::new(inner)),
        })
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn source(&self) -> SourceGroup {
        self.source
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.source_size || a.ncols() != self.source_size {
            return Err(Error::InvalidDimension(format!(
                "representation of GL_{} applied to a {}x{} matrix",
                self.source_size,
                a.nrows(),
                a.ncols()
            )));
        }
        self.apply_unchecked(a)
    }

    fn apply_unchecked(&self, a: &CMatrix) -> Result<CMatrix> {
        Ok(match &self.kind {
            RepKind::Identity => a.clone(),
            RepKind::Trivial => identity(self.target_size),
            RepKind::Power(k) => {
                let d = a.determinant();
                let v = if *k >= 0 { d.powi(*k) } else { d.inv().powi(-*k) };
                CMatrix::from_element(1, 1, v)
            }
            RepKind::BlockDiag(parts) => {
                let mut out = CMatrix::zeros(self.target_size, self.target_size);
                let mut off = 0;
                for p in parts {
                    let b = p.apply_unchecked(a)?;
                    let k = b.nrows();
                    out.view_mut((off, off), (k, k)).copy_from(&b);
                    off += k;
                }
                out
            }
            RepKind::Kron(v, w) => v.apply_unchecked(a)?.kronecker(&w.apply_unchecked(a)?),
            RepKind::Dual(v) => inverse(&v.apply_unchecked(a)?)?.transpose(),
            RepKind::Realify(v) => {
                let m = v.apply_unchecked(a)?;
                let k = m.nrows();
                CMatrix::from_fn(2 * k, 2 * k, |r, col| {
                    let z = m[(r % k, col % k)];
                    let val = match (r < k, col < k) {
                        (true, true) | (false, false) => z.re,
                        (true, false) => -z.im,
                        (false, true) => z.im,
                    };
                    c(val, 0.0)
                })
            }
            RepKind::Compose(outer, inner) => outer.apply_unchecked(&inner.apply_unchecked(a)?)?,
        })
    }

    /// `Φ(I) = I` and `Φ(AB) = Φ(A)Φ(B)` on samples from the source group.
    pub fn check(&self, seed: u64, samples: usize) -> Result<()> {
        let one = self.apply(&identity(self.source_size))?;
        if (one - identity(self.target_size)).norm() > REP_TOL {
            return Err(Error::InvariantViolation("representation does not fix I".into()));
        }
        let mut r = rng(seed);
        for _ in 0..samples {
            let a = self.source.sample(&mut r, self.source_size);
            let b = self.source.sample(&mut r, self.source_size);
            let lhs = self.apply(&(&a * &b))?;
            let rhs = self.apply(&a)? * self.apply(&b)?;
            let err = (&lhs - &rhs).norm();
            if err > REP_TOL * lhs.norm().max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "representation is not multiplicative (error {err:e})"
                )));
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> RepDoc {
        let (kind, args) = match &self.kind {
            RepKind::Identity => ("identity".to_string(), vec![]),
            RepKind::Trivial => ("trivial".to_string(), vec![]),
            RepKind::Power(k) => (format!("power:{k}"), vec![]),
            RepKind::BlockDiag(parts) => ("blockdiag".to_string(), parts.iter().map(Self::to_doc).collect()),
            RepKind::Kron(v, w) => ("kron".to_string(), vec![v.to_doc(), w.to_doc()]),
            RepKind::Dual(v) => ("dual".to_string(), vec![v.to_doc()]),
            RepKind::Realify(v) => ("realify".to_string(), vec![v.to_doc()]),
            RepKind::Compose(o, i) => ("compose".to_string(), vec![o.to_doc(), i.to_doc()]),
        };
        RepDoc {
            source_size: self.source_size,
            target_size: self.target_size,
            kind,
            args,
            source: self.source,
        }
    }

    pub fn from_doc(doc: &RepDoc) -> Result<Self> {
        let m = doc.source_size;
        let args = || doc.args.iter().map(Self::from_doc).collect::<Result<Vec<_>>>();
        let want = |k: usize| -> Result<Vec<GroupRep>> {
            let a = args()?;
            if a.len() != k {
                return Err(Error::Parse(format!(
                    "{} takes {k} argument(s), got {}",
                    doc.kind,
                    a.len()
                )));
            }
            Ok(a)
        };
        let rep = match doc.kind.as_str() {
            "identity" => Self::identity(m, doc.source)?,
            "trivial" => Self::trivial(m, doc.target_size, doc.source)?,
            "blockdiag" => Self::direct_sum(args()?)?,
            "kron" => {
                let mut a = want(2)?;
                let w = a.pop().expect("two args");
                Self::tensor(a.pop().expect("two args"), w)?
            }
            "dual" => Self::dual(want(1)?.pop().expect("one arg")),
            "realify" => {
                if doc.args.is_empty() {
                    Self::realify(Self::identity(m, doc.source)?)
                } else {
                    Self::realify(want(1)?.pop().expect("one arg"))
                }
            }
            "compose" => {
                let mut a = want(2)?;
                let inner = a.pop().expect("two args");
                Self::compose(a.pop().expect("two args"), inner)?
            }
            other => match other.strip_prefix("power:") {
                Some(k) => {
                    let k: i32 = k
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {other:?}")))?;
                    Self::power(m, k, doc.source)?
                }
                None => return Err(Error::Parse(format!("unknown representation kind {other:?}"))),
            },
        };
        if rep.source_size != m || rep.target_size != doc.target_size || rep.source != doc.source {
            return Err(Error::Parse(format!(
                "{}: declared GL_{m} → GL_{} but built GL_{} → GL_{}",
                doc.kind, doc.target_size, rep.source_size, rep.target_size
            )));
        }
        Ok(rep)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for GroupRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RepKind::Identity => write!(f, "id{}", self.source_size),
            RepKind::Trivial => write!(f, "triv{}", self.target_size),
            RepKind::Power(k) => write!(f, "det^{k}"),
            RepKind::BlockDiag(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", names.join("⊕"))
            }
            RepKind::Kron(v, w) => write!(f, "({v}⊗{w})"),
            RepKind::Dual(v) => write!(f, "{v}*"),
            RepKind::Realify(v) => write!(f, "re({v})"),
            RepKind::Compose(o, i) => write!(f, "{o}∘{i}"),
        }
    }
}

/// Representation file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepDoc {
    pub source_size: usize,
    pub target_size: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<RepDoc>,
    #[serde(default)]
    pub source: SourceGroup,
}

/// `v_{2q−1} ∘ Φ` applied entrywise.
pub fn group_class(rep: &GroupRep, q: usize, spec: &QuadratureSpec) -> Result<GroupCochain> {
    let v = v_generator(rep.target_size, q, spec)?;
    let r = rep.clone();
    let name = format!("v{}({rep})", 2 * q - 1);
    let mut out = v.pullback(rep.source_size, name, move |a| r.apply(a));
    out.flags = v.flags;
    Ok(out)
}

/// A representation of a Lie algebra on `gl_n`, given by a rational
/// matrix from source coordinates to realified `gl_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraRep {
    source: LieAlgebra,
    target_size: usize,
    map: Matrix<Q>,
}

impl AlgebraRep {
    /// Checks shape and bracket preservation on basis pairs, exactly.
    pub fn new(source: LieAlgebra, target_size: usize, map: Matrix<Q>) -> Result<Self> {
        let gl = LieAlgebra::gl_complex(target_size)?;
        if map.rows() != gl.dim() || map.cols() != source.dim() {
            return Err(Error::Arity {
                expected: gl.dim() * source.dim(),
                got: map.rows() * map.cols(),
            });
        }
        for i in 0..source.dim() {
            for j in i + 1..source.dim() {
                let lhs = map.mul_vec(&source.bracket_basis(i, j));
                let rhs = gl.bracket(&map.column(i), &map.column(j));
                if lhs != rhs {
                    return Err(Error::InvariantViolation(format!(
                        "map does not preserve the bracket of basis vectors {i}, {j}"
                    )));
                }
            }
        }
        Ok(Self {
            source,
            target_size,
            map,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let g = LieAlgebra::gl_complex(n)?;
        let d = g.dim();
        Self::new(g, n, Matrix::identity(d))
    }

    pub fn zero(source: LieAlgebra, n: usize) -> Result<Self> {
        let rows = 2 * n * n;
        let cols = source.dim();
        Self::new(source, n, Matrix::zeros(rows, cols))
    }

    pub fn source(&self) -> &LieAlgebra {
        &self.source
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn map(&self) -> &Matrix<Q> {
        &self.map
    }
}

/// `u_{2q−1}` pulled back along the representation; checked closed.
pub fn algebra_class(rep: &AlgebraRep, q: usize) -> Result<AltForm<Q>> {
    let u = u_generator(rep.target_size, q)?;
    let class = u.form.pullback(&rep.map, rep.source.space())?;
    if !ce_differential(&rep.source, &class)?.is_zero() {
        return Err(Error::InvariantViolation("pulled-back class is not closed".into()));
    }
    Ok(class)
}

/// Realified Jacobian of `rep` at `I`: column `j` is `d/dt Φ(exp(t e_j))`
/// by fourth-order central differences.
pub fn derived_jacobian(rep: &GroupRep, spec: &QuadratureSpec) -> Result<Matrix<f64>> {
    let m = rep.source_size;
    let n = rep.target_size;
    let h = spec.fd_step;
    let dim = 2 * m * m;
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let xi = crate::matrix_group::complexify(&e, m)?;
        let at = |s: f64| rep.apply(&expm(&xi.scale(s * h)));
        // Paired differences, so a constant map gives exactly zero.
        let near = at(1.0)? - at(-1.0)?;
        let far = at(2.0)? - at(-2.0)?;
        let acc = (near.scale(8.0) - far).scale(1.0 / (12.0 * h));
        if acc.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::FiniteDifference(format!("non-finite derivative along e_{j}")));
        }
        cols.push(realify(&acc));
    }
    Ok(Matrix::from_columns(2 * n * n, &cols))
}

/// `max |VE(group_class)(ξ) − algebra_class(Lie Φ)(ξ)|` over random ξ-tuples.
pub fn ve_compatibility_check(
    rep: &GroupRep,
    q: usize,
    spec: &QuadratureSpec,
    seed: u64,
    samples: usize,
) -> Result<f64> {
    let class = group_class(rep, q, spec)?;
    let jac = derived_jacobian(rep, spec)?;
    let u = u_generator(rep.target_size, q)?.form.to_f64();
    let source = crate::exterior::BasedSpace::new(2 * rep.source_size * rep.source_size)?;
    let alg = u.pullback(&jac, &source)?;
    let mut r = rng(seed);
    let tuples: Vec<Vec<Vec<f64>>> = (0..samples)
        .map(|_| (0..2 * q - 1).map(|_| random_direction(&mut r, rep.source_size)).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for xis in &tuples {
        let ve = ve_differentiate(&class, xis, spec)?;
        let a = alg.eval(xis)?;
        worst = worst.max((ve - a).abs());
    }
    Ok(worst)
}

fn sample_tuples(rep: &GroupRep, arity: usize, seed: u64, samples: usize) -> Vec<Vec<CMatrix>> {
    let mut r = rng(seed);
    (0..samples)
        .map(|_| (0..arity).map(|_| rep.source.sample(&mut r, rep.source_size)).collect())
        .collect()
}

fn max_abs_over(tuples: &[Vec<CMatrix>], spec: &QuadratureSpec, f: impl Fn(&[CMatrix]) -> Result<f64> + Sync + Send) -> Result<f64> {
    crate::group_cochains::max_residual(spec.exec, tuples, f)
}

/// `v(V⊕W) − v(V) − v(W)` on samples.
pub fn sum_law_residual(v: &GroupRep, w: &GroupRep, q: usize, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<f64> {
    let sum = GroupRep::direct_sum(vec![v.clone(), w.clone()])?;
    let (cs, cv, cw) = (group_class(&sum, q, spec)?, group_class(v, q, spec)?, group_class(w, q, spec)?);
    let tuples = sample_tuples(v, 2 * q - 1, seed, samples);
    max_abs_over(&tuples, spec, |t| Ok(cs.eval(t)? - cv.eval(t)? - cw.eval(t)?))
}

/// `v(V⊗W) − rank(W)·v(V) − rank(V)·v(W)` on samples.
pub fn tensor_law_residual(v: &GroupRep, w: &GroupRep, q: usize, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<f64> {
    let t = GroupRep::tensor(v.clone(), w.clone())?;
    let (ct, cv, cw) = (group_class(&t, q, spec)?, group_class(v, q, spec)?, group_class(w, q, spec)?);
    let (rv, rw) = (v.target_size as f64, w.target_size as f64);
    let tuples = sample_tuples(v, 2 * q - 1, seed, samples);
    max_abs_over(&tuples, spec, |x| Ok(ct.eval(x)? - rw * cv.eval(x)? - rv * cw.eval(x)?))
}

/// The inverse map on tuples: `(g_1..g_p) ↦ (g_p⁻¹..g_1⁻¹)`.
pub fn inverse_pullback(tuple: &[CMatrix]) -> Result<Vec<CMatrix>> {
    tuple.iter().rev().map(inverse).collect()
}

/// `v(V*) − i*v(V)` on samples.
pub fn dual_law_residual(v: &GroupRep, q: usize, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<f64> {
    let d = GroupRep::dual(v.clone());
    let (cd, cv) = (group_class(&d, q, spec)?, group_class(v, q, spec)?);
    let tuples = sample_tuples(v, 2 * q - 1, seed, samples);
    max_abs_over(&tuples, spec, |x| Ok(cd.eval(x)? - cv.eval(&inverse_pullback(x)?)?))
}

/// `max |v(V)|` over samples of a real representation.
pub fn real_vanishing_check(rep: &GroupRep, q: usize, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<f64> {
    let tuples = sample_tuples(rep, 2 * q - 1, seed, samples);
    for t in &tuples {
        for a in t {
            let img = rep.apply(a)?;
            if img.iter().any(|z| z.im.abs() > 1e-12 * img.norm().max(1.0)) {
                return Err(Error::Precondition("representation has non-real entries".into()));
            }
        }
    }
    let class = group_class(rep, q, spec)?;
    max_abs_over(&tuples, spec, |t| class.eval(t))
}

/// Degree-1 class through the metric `h' = S*S`: frames orthonormal for
/// `h'` conjugate by `S`, so the class is `v_1(S Φ(g) S⁻¹)`. At a point
/// base a degree-1 coboundary vanishes, so the two evaluators must agree.
pub fn metric_change_residual(rep: &GroupRep, s: &CMatrix, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<f64> {
    if s.nrows() != rep.target_size {
        return Err(Error::InvalidDimension("metric change of the wrong size".into()));
    }
    let s_inv = inverse(s)?;
    let standard = group_class(rep, 1, spec)?;
    let v1 = v_generator(rep.target_size, 1, spec)?;
    let r = rep.clone();
    let s = s.clone();
    let changed = v1.pullback(rep.source_size, "v1[h']", move |a| Ok(&s * r.apply(a)? * &s_inv));
    let tuples = sample_tuples(rep, 1, seed, samples);
    max_abs_over(&tuples, spec, |t| Ok(changed.eval(t)? - standard.eval(t)?))
}
