//! Smooth group cochains on `GL_n(C)` as evaluators: the simplicial
//! differential, cup product, normalization, the homogeneous model and its
//! contracting homotopy, finite averaging, and the transitive groupoid model.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exterior::AltForm;
use crate::linalg::Scalar;
use crate::matrix_group::{identity, inverse, CMatrix};
use crate::par::Exec;
use crate::sampling::{random_gl, random_unitary, rng};

/// Absolute-plus-relative tolerance used by the spot checks.
pub const SPOT_TOL: f64 = 1e-9;
/// Group-closure tolerance for finite subgroups.
pub const CLOSURE_TOL: f64 = 1e-10;

type Eval = Arc<dyn Fn(&[CMatrix]) -> Result<f64> + Send + Sync>;

/// Metadata claims; not verified on construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CochainFlags {
    pub normalized: bool,
    pub k_invariant: bool,
}

/// A degree-`p` cochain `G^p → R` on `GL_n`.
#[derive(Clone)]
pub struct GroupCochain {
    degree: usize,
    n: usize,
    name: String,
    eval: Eval,
    pub flags: CochainFlags,
}

impl fmt::Debug for GroupCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupCochain({}, deg {}, n {})", self.name, self.degree, self.n)
    }
}

fn check_tuple(args: &[CMatrix], arity: usize, n: usize) -> Result<()> {
    if args.len() != arity {
        return Err(Error::Arity {
            expected: arity,
            got: args.len(),
        });
    }
    if let Some(m) = args.iter().find(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::InvalidDimension(format!(
            "expected {n}x{n} matrices, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl GroupCochain {
    pub fn new(
        degree: usize,
        n: usize,
        name: impl Into<String>,
        f: impl Fn(&[CMatrix]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            degree,
            n,
            name: name.into(),
            eval: Arc::new(f),
            flags: CochainFlags::default(),
        }
    }

    pub fn with_flags(mut self, flags: CochainFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, args: &[CMatrix]) -> Result<f64> {
        check_tuple(args, self.degree, self.n)?;
        (self.eval)(args)
    }

    /// The degree-0 cochain `c`.
    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(0, n, format!("const:{c}"), move |_| Ok(c))
    }

    /// `log|det g|`, computed directly from the determinant.
    pub fn logabsdet(n: usize) -> Self {
        Self::new(1, n, "logabsdet", |a| Ok(a[0].determinant().norm().ln()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let f = self.clone();
        Self::new(self.degree, self.n, format!("{s}*{}", self.name), move |a| {
            Ok(s * f.eval(a)?)
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_group(self, other)?;
        if self.degree != other.degree {
            return Err(Error::Degree("sum of cochains of different degree".into()));
        }
        let (f, g) = (self.clone(), other.clone());
        Ok(Self::new(
            self.degree,
            self.n,
            format!("({}+{})", self.name, other.name),
            move |a| Ok(f.eval(a)? + g.eval(a)?),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Precomposition with a map `GL_m → GL_n` applied entrywise.
    pub fn pullback(
        &self,
        source_n: usize,
        name: impl Into<String>,
        map: impl Fn(&CMatrix) -> Result<CMatrix> + Send + Sync + 'static,
    ) -> Self {
        let f = self.clone();
        Self::new(self.degree, source_n, name, move |a| {
            let mapped = a.iter().map(&map).collect::<Result<Vec<_>>>()?;
            f.eval(&mapped)
        })
    }
}

fn same_group(f: &GroupCochain, g: &GroupCochain) -> Result<()> {
    if f.n != g.n {
        return Err(Error::SpaceMismatch(format!(
            "cochains on GL_{} and GL_{}",
            f.n, g.n
        )));
    }
    Ok(())
}

/// Inhomogeneous coboundary.
pub fn coboundary(f: &GroupCochain) -> GroupCochain {
    let p = f.degree;
    let inner = f.clone();
    GroupCochain::new(p + 1, f.n, format!("δ{}", f.name), move |g| {
        let mut acc = inner.eval(&g[1..])?;
        for i in 0..p {
            let mut args: Vec<CMatrix> = Vec::with_capacity(p);
            args.extend_from_slice(&g[..i]);
            args.push(&g[i] * &g[i + 1]);
            args.extend_from_slice(&g[i + 2..]);
            let v = inner.eval(&args)?;
            if i % 2 == 0 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        let last = inner.eval(&g[..p])?;
        if (p + 1) % 2 == 0 {
            acc += last;
        } else {
            acc -= last;
        }
        Ok(acc)
    })
}

/// `(f ∪ g)(g_1..g_{p+q}) = f(g_1..g_p) · g(g_{p+1}..g_{p+q})`.
pub fn cup(f: &GroupCochain, g: &GroupCochain) -> Result<GroupCochain> {
    same_group(f, g)?;
    let p = f.degree;
    let (a, b) = (f.clone(), g.clone());
    Ok(GroupCochain::new(
        f.degree + g.degree,
        f.n,
        format!("({}∪{})", f.name, g.name),
        move |x| Ok(a.eval(&x[..p])? * b.eval(&x[p..])?),
    ))
}

/// A degree-`p` cochain on the homogeneous model `G^{p+1}`.
#[derive(Clone)]
pub struct HomogeneousCochain {
    degree: usize,
    n: usize,
    eval: Eval,
}

impl fmt::Debug for HomogeneousCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomogeneousCochain(deg {}, n {})", self.degree, self.n)
    }
}

impl HomogeneousCochain {
    pub fn new(
        degree: usize,
        n: usize,
        f: impl Fn(&[CMatrix]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            degree,
            n,
            eval: Arc::new(f),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, args: &[CMatrix]) -> Result<f64> {
        check_tuple(args, self.degree + 1, self.n)?;
        (self.eval)(args)
    }

    pub fn constant(degree: usize, n: usize, c: f64) -> Self {
        Self::new(degree, n, move |_| Ok(c))
    }
}

/// `(δF)(h_0..h_{p+1}) = Σ_i (−1)^i F(h_0..ĥ_i..h_{p+1})`.
pub fn coboundary_hom(f: &HomogeneousCochain) -> HomogeneousCochain {
    let p = f.degree;
    let inner = f.clone();
    HomogeneousCochain::new(p + 1, f.n, move |h| {
        let mut acc = 0.0;
        for i in 0..=p + 1 {
            let args: Vec<CMatrix> = h
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, m)| m.clone())
                .collect();
            let v = inner.eval(&args)?;
            if i % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        Ok(acc)
    })
}

/// Nested differences over slots `i..=p`: slot `i` takes `g_i` minus the
/// same expression with `g_{i-1}`. Identical neighbours give identical
/// subtrees and therefore an exact zero.
fn nested_difference(
    f: &HomogeneousCochain,
    g: &[CMatrix],
    args: &mut Vec<CMatrix>,
    i: usize,
) -> Result<f64> {
    if i == g.len() {
        return f.eval(args);
    }
    args[i] = g[i].clone();
    let keep = nested_difference(f, g, args, i + 1)?;
    args[i] = g[i - 1].clone();
    let shift = nested_difference(f, g, args, i + 1)?;
    Ok(keep - shift)
}

/// Normalization `N(f)(g_0..g_p) = Σ_ε (−1)^{|ε|} f(g_0, x_1..x_p)` with
/// `x_i = g_{i−1}` if `ε_i = 1` else `g_i`.
pub fn normalize_n(f: &HomogeneousCochain) -> HomogeneousCochain {
    if f.degree == 0 {
        return f.clone();
    }
    let inner = f.clone();
    HomogeneousCochain::new(f.degree, f.n, move |g| {
        let mut args = g.to_vec();
        nested_difference(&inner, g, &mut args, 1)
    })
}

/// `F(h_0 a, …, h_p a) = F(h_0, …, h_p)` on `samples` random inputs.
pub fn check_right_invariant(f: &HomogeneousCochain, seed: u64, samples: usize) -> Result<()> {
    let mut r = rng(seed);
    for _ in 0..samples {
        let h: Vec<CMatrix> = (0..=f.degree).map(|_| random_gl(&mut r, f.n)).collect();
        let a = random_gl(&mut r, f.n);
        let ha: Vec<CMatrix> = h.iter().map(|m| m * &a).collect();
        let (x, y) = (f.eval(&h)?, f.eval(&ha)?);
        if (x - y).abs() > SPOT_TOL * (1.0 + x.abs()) {
            return Err(Error::NotInvariant(format!(
                "homogeneous cochain is not right-invariant (|ΔF| = {:e})",
                (x - y).abs()
            )));
        }
    }
    Ok(())
}

/// `f(g_1..g_p) = F(g_1⋯g_p, g_2⋯g_p, …, g_p, I)`; `F` must be right-invariant.
pub fn hom_to_inhom(f: &HomogeneousCochain, seed: u64, samples: usize) -> Result<GroupCochain> {
    check_right_invariant(f, seed, samples)?;
    let inner = f.clone();
    let n = f.n;
    Ok(GroupCochain::new(f.degree, n, "inhom", move |g| {
        let p = g.len();
        let mut h = vec![identity(n); p + 1];
        for i in (0..p).rev() {
            h[i] = &g[i] * &h[i + 1];
        }
        inner.eval(&h)
    }))
}

/// `F(h_0..h_p) = f(h_0 h_1⁻¹, …, h_{p−1} h_p⁻¹)`.
pub fn inhom_to_hom(f: &GroupCochain) -> HomogeneousCochain {
    let inner = f.clone();
    HomogeneousCochain::new(f.degree, f.n, move |h| {
        let mut args = Vec::with_capacity(h.len() - 1);
        for w in h.windows(2) {
            args.push(&w[0] * inverse(&w[1])?);
        }
        inner.eval(&args)
    })
}

/// `(hF)(h_0..h_{p−1}) = (−1)^p F(h_0, …, h_{p−1}, I)`.
pub fn eg_homotopy(f: &HomogeneousCochain) -> Result<HomogeneousCochain> {
    if f.degree == 0 {
        return Err(Error::Degree("the homotopy lowers degree; p must be ≥ 1".into()));
    }
    let inner = f.clone();
    let p = f.degree;
    let n = f.n;
    Ok(HomogeneousCochain::new(p - 1, n, move |h| {
        let mut args = h.to_vec();
        args.push(identity(n));
        let v = inner.eval(&args)?;
        Ok(if p % 2 == 0 { v } else { -v })
    }))
}

/// `(i∘p)F` in degree 0: the constant `F(I)`; zero in higher degrees.
pub fn eg_ip(f: &HomogeneousCochain) -> HomogeneousCochain {
    let inner = f.clone();
    let n = f.n;
    if f.degree == 0 {
        HomogeneousCochain::new(0, n, move |_| inner.eval(&[identity(n)]))
    } else {
        HomogeneousCochain::constant(f.degree, n, 0.0)
    }
}

/// Checks that `K` is closed under products and inverses.
pub fn check_finite_subgroup(k: &[CMatrix]) -> Result<()> {
    let Some(first) = k.first() else {
        return Err(Error::NotSubgroup("empty set".into()));
    };
    let n = first.nrows();
    let contains = |m: &CMatrix| k.iter().any(|x| (x - m).norm() <= CLOSURE_TOL);
    if !contains(&identity(n)) {
        return Err(Error::NotSubgroup("identity missing".into()));
    }
    for a in k {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::NotSubgroup("elements of different sizes".into()));
        }
        if !contains(&inverse(a)?) {
            return Err(Error::NotSubgroup("not closed under inverses".into()));
        }
        for b in k {
            if !contains(&(a * b)) {
                return Err(Error::NotSubgroup("not closed under products".into()));
            }
        }
    }
    Ok(())
}

/// Average over `K^{p+1}` of `f(a_0⁻¹ g_1 a_1, …, a_{p−1}⁻¹ g_p a_p)`.
pub fn average_finite(f: &GroupCochain, k: &[CMatrix]) -> Result<GroupCochain> {
    check_finite_subgroup(k)?;
    if k[0].nrows() != f.n {
        return Err(Error::SpaceMismatch("subgroup of a different GL_n".into()));
    }
    let inverses = k.iter().map(inverse).collect::<Result<Vec<_>>>()?;
    let elems = k.to_vec();
    let inner = f.clone();
    let p = f.degree;
    let m = k.len();
    let total = m.pow((p + 1) as u32);
    Ok(GroupCochain::new(p, f.n, format!("Av{}", f.name), move |g| {
        let mut acc = 0.0;
        let mut idx = vec![0usize; p + 1];
        let mut args = g.to_vec();
        for mut code in 0..total {
            for slot in idx.iter_mut() {
                *slot = code % m;
                code /= m;
            }
            for i in 0..p {
                args[i] = &inverses[idx[i]] * &g[i] * &elems[idx[i + 1]];
            }
            acc += inner.eval(&args)?;
        }
        Ok(acc / total as f64)
    })
    .with_flags(CochainFlags {
        k_invariant: true,
        ..f.flags
    }))
}

/// `Q_8 = {±1, ±i, ±j, ±k}` as 2×2 complex matrices.
pub fn quaternion_group() -> Vec<CMatrix> {
    use crate::matrix_group::c;
    let one = identity(2);
    let qi = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
    let qj = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
    let qk = &qi * &qj;
    let mut out = Vec::with_capacity(8);
    for m in [one, qi, qj, qk] {
        out.push(-m.clone());
        out.push(m);
    }
    out
}

/// `{±I} ⊂ GL_n`.
pub fn sign_group(n: usize) -> Vec<CMatrix> {
    vec![identity(n), -identity(n)]
}

/// Max of `|residual|` over a batch of tuples.
pub fn max_residual<F>(exec: Exec, tuples: &[Vec<CMatrix>], f: F) -> Result<f64>
where
    F: Fn(&[CMatrix]) -> Result<f64> + Sync + Send,
{
    let vals = exec.map(tuples, |t| f(t));
    let mut worst: f64 = 0.0;
    for v in vals {
        let v = v?.abs();
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

/// The isotropy subgroup `K_z` used by the transitive model.
#[derive(Clone, Debug, PartialEq)]
pub enum IsoSubgroup {
    Trivial,
    Unitary,
    Finite(Vec<CMatrix>),
}

impl IsoSubgroup {
    pub fn contains(&self, m: &CMatrix) -> bool {
        match self {
            IsoSubgroup::Trivial => (m - identity(m.nrows())).norm() <= CLOSURE_TOL,
            IsoSubgroup::Unitary => crate::matrix_group::is_unitary(m, CLOSURE_TOL),
            IsoSubgroup::Finite(k) => k.iter().any(|x| (x - m).norm() <= CLOSURE_TOL),
        }
    }

    pub fn sample<R: Rng>(&self, r: &mut R, n: usize) -> CMatrix {
        match self {
            IsoSubgroup::Trivial => identity(n),
            IsoSubgroup::Unitary => random_unitary(r, n),
            IsoSubgroup::Finite(k) => k[r.random_range(0..k.len())].clone(),
        }
    }
}

/// An arrow `(target, A, source)` of the trivial-bundle transitive groupoid.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrow {
    pub target: usize,
    pub a: CMatrix,
    pub source: usize,
}

impl Arrow {
    pub fn new(target: usize, a: CMatrix, source: usize) -> Self {
        Self { target, a, source }
    }

    /// `(m', A, m)·(m, B, m'') = (m', AB, m'')`.
    pub fn compose(&self, other: &Arrow) -> Result<Arrow> {
        if self.source != other.target {
            return Err(Error::Precondition(format!(
                "arrows not composable: source {} vs target {}",
                self.source, other.target
            )));
        }
        Ok(Arrow::new(self.target, &self.a * &other.a, other.source))
    }

    pub fn inverse(&self) -> Result<Arrow> {
        Ok(Arrow::new(self.source, inverse(&self.a)?, self.target))
    }
}

type ModelEval = Arc<dyn Fn(&[Arrow]) -> Result<f64> + Send + Sync>;

/// A cochain on strings of composable arrows.
#[derive(Clone)]
pub struct ModelCochain {
    degree: usize,
    eval: ModelEval,
}

impl fmt::Debug for ModelCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModelCochain(deg {})", self.degree)
    }
}

fn check_composable(arrows: &[Arrow]) -> Result<()> {
    for w in arrows.windows(2) {
        if w[0].source != w[1].target {
            return Err(Error::Precondition("arrow string is not composable".into()));
        }
    }
    Ok(())
}

impl ModelCochain {
    pub fn new(degree: usize, f: impl Fn(&[Arrow]) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            degree,
            eval: Arc::new(f),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, arrows: &[Arrow]) -> Result<f64> {
        if arrows.len() != self.degree {
            return Err(Error::Arity {
                expected: self.degree,
                got: arrows.len(),
            });
        }
        check_composable(arrows)?;
        (self.eval)(arrows)
    }
}

/// Groupoid coboundary on composable strings.
pub fn coboundary_model(f: &ModelCochain) -> ModelCochain {
    let p = f.degree;
    let inner = f.clone();
    ModelCochain::new(p + 1, move |g| {
        let mut acc = inner.eval(&g[1..])?;
        for i in 0..p {
            let mut args = Vec::with_capacity(p);
            args.extend_from_slice(&g[..i]);
            args.push(g[i].compose(&g[i + 1])?);
            args.extend_from_slice(&g[i + 2..]);
            let v = inner.eval(&args)?;
            if i % 2 == 0 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        let last = inner.eval(&g[..p])?;
        if (p + 1) % 2 == 0 {
            acc += last;
        } else {
            acc -= last;
        }
        Ok(acc)
    })
}

pub fn cup_model(f: &ModelCochain, g: &ModelCochain) -> ModelCochain {
    let p = f.degree;
    let (a, b) = (f.clone(), g.clone());
    ModelCochain::new(f.degree + g.degree, move |x| {
        Ok(a.eval(&x[..p])? * b.eval(&x[p..])?)
    })
}

/// The trivial-bundle transitive groupoid `M × GL_n × M` with base point
/// `z = base_points[0]` and unit lifts `k_m = (m, I, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitiveModel {
    pub base_points: Vec<String>,
    pub n: usize,
    pub k: IsoSubgroup,
}

impl TransitiveModel {
    pub fn new(base_points: Vec<String>, n: usize, k: IsoSubgroup) -> Result<Self> {
        if base_points.is_empty() {
            return Err(Error::InvalidDimension("the model needs a base point".into()));
        }
        if let IsoSubgroup::Finite(els) = &k {
            check_finite_subgroup(els)?;
        }
        Ok(Self { base_points, n, k })
    }

    pub fn z(&self) -> usize {
        0
    }

    pub fn unit(&self, m: usize) -> Arrow {
        Arrow::new(m, identity(self.n), m)
    }

    /// A random composable string of `len` arrows.
    pub fn random_string<R: Rng>(&self, r: &mut R, len: usize) -> Vec<Arrow> {
        let m = self.base_points.len();
        let mut points: Vec<usize> = (0..=len).map(|_| r.random_range(0..m)).collect();
        if len == 0 {
            points.truncate(1);
        }
        (0..len)
            .map(|i| Arrow::new(points[i], random_gl(r, self.n), points[i + 1]))
            .collect()
    }

    /// `f` is `K_z`-invariant: `f(k_0⁻¹g_1k_1, …) = f(g_1, …)` on samples.
    pub fn check_isotropy_invariant(&self, f: &GroupCochain, seed: u64, samples: usize) -> Result<()> {
        if self.k == IsoSubgroup::Trivial {
            return Ok(());
        }
        let mut r = rng(seed);
        for _ in 0..samples {
            let g: Vec<CMatrix> = (0..f.degree).map(|_| random_gl(&mut r, self.n)).collect();
            let ks: Vec<CMatrix> = (0..=f.degree).map(|_| self.k.sample(&mut r, self.n)).collect();
            let moved = (0..f.degree)
                .map(|i| Ok(inverse(&ks[i])? * &g[i] * &ks[i + 1]))
                .collect::<Result<Vec<_>>>()?;
            let (x, y) = (f.eval(&g)?, f.eval(&moved)?);
            if (x - y).abs() > 1e-8 * (1.0 + x.abs()) {
                return Err(Error::NotInvariant(format!(
                    "cochain {} is not K_z-invariant (|Δ| = {:e})",
                    f.name(),
                    (x - y).abs()
                )));
            }
        }
        Ok(())
    }

    /// `ext(f)(g_1..g_p) = f(k_0⁻¹ g_1 k_1, …)`; with unit lifts this is
    /// `f(A_1, …, A_p)`.
    pub fn ext(&self, f: &GroupCochain, seed: u64, samples: usize) -> Result<ModelCochain> {
        if f.n() != self.n {
            return Err(Error::SpaceMismatch("cochain on a different GL_n".into()));
        }
        self.check_isotropy_invariant(f, seed, samples)?;
        let inner = f.clone();
        let z = self.z();
        let n = self.n;
        Ok(ModelCochain::new(f.degree(), move |arrows| {
            let mut args = Vec::with_capacity(arrows.len());
            for g in arrows {
                let k0_inv = Arrow::new(z, identity(n), g.target);
                let k1 = Arrow::new(g.source, identity(n), z);
                args.push(k0_inv.compose(g)?.compose(&k1)?.a);
            }
            inner.eval(&args)
        }))
    }

    /// `r(F)(A_1..A_p) = F((z,A_1,z), …, (z,A_p,z))`.
    pub fn restrict(&self, f: &ModelCochain) -> GroupCochain {
        let inner = f.clone();
        let z = self.z();
        GroupCochain::new(f.degree(), self.n, "r", move |a| {
            let arrows: Vec<Arrow> = a.iter().map(|m| Arrow::new(z, m.clone(), z)).collect();
            inner.eval(&arrows)
        })
    }

    /// Invariance of a model cochain under conjugation by `K`-arrows
    /// `(m, k, m')` with `k ∈ K_z`, which may move base points.
    pub fn check_model_invariant(&self, f: &ModelCochain, seed: u64, samples: usize) -> Result<()> {
        let mut r = rng(seed);
        let m = self.base_points.len();
        for _ in 0..samples {
            let g = self.random_string(&mut r, f.degree());
            let mut points: Vec<usize> = g.iter().map(|a| a.target).collect();
            points.push(g.last().map_or(self.z(), |a| a.source));
            let new_points: Vec<usize> = points.iter().map(|_| r.random_range(0..m)).collect();
            let lifts: Vec<Arrow> = points
                .iter()
                .zip(&new_points)
                .map(|(&old, &new)| Arrow::new(old, self.k.sample(&mut r, self.n), new))
                .collect();
            let moved = g
                .iter()
                .enumerate()
                .map(|(i, a)| lifts[i].inverse()?.compose(a)?.compose(&lifts[i + 1]))
                .collect::<Result<Vec<_>>>()?;
            let (x, y) = (f.eval(&g)?, f.eval(&moved)?);
            if (x - y).abs() > 1e-8 * (1.0 + x.abs()) {
                return Err(Error::NotInvariant(format!(
                    "model cochain is not K-invariant (|Δ| = {:e})",
                    (x - y).abs()
                )));
            }
        }
        Ok(())
    }

    /// Extends `α_z` by the same coefficients at every base point.
    pub fn ext_algebroid<S: Scalar>(&self, alpha: &AltForm<S>) -> Vec<AltForm<S>> {
        vec![alpha.clone(); self.base_points.len()]
    }

    /// The component at `z`.
    pub fn restrict_algebroid<S: Scalar>(&self, forms: &[AltForm<S>]) -> Result<AltForm<S>> {
        if forms.len() != self.base_points.len() {
            return Err(Error::Arity {
                expected: self.base_points.len(),
                got: forms.len(),
            });
        }
        Ok(forms[self.z()].clone())
    }
}
