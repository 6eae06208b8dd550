//! Van Est maps for `GL_n(C) ⊃ U(n)`: the trace forms `Φ_{2q−1}`, their
//! basic and full-complex real parts, differentiation of group cochains by
//! finite differences, and integration of basic forms over retraction cubes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exterior::{binomial, combinations, AltForm, BasedSpace, ComplexForm};
use crate::group_cochains::{CochainFlags, GroupCochain};
use crate::lie_algebra::{
    ce_differential, gl_unindex, hermitian_projection, is_horizontal, is_invariant, LieAlgebra,
    Subalgebra,
};
use crate::linalg::{Scalar, Q};
use crate::matrix_group::{complexify, expm, polar_trace, realify, CMatrix, HorizontalForm, PositiveEigen};
use crate::par::Exec;
use crate::quadrature::GaussLegendre;

/// Largest `C(2n², 2q−1)·(2q−1)!` materialized for `Φ`.
pub const PHI_BUDGET: usize = 50_000_000;

/// Quadrature and finite-difference settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre points per axis.
    pub order: usize,
    pub fd_step: f64,
    /// 2 or 4.
    pub fd_order: usize,
    /// Largest `q` for which `v_{2q−1}` is integrated.
    pub max_q: usize,
    pub exec: Exec,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 16,
            fd_step: 1e-4,
            fd_order: 4,
            max_q: 2,
            exec: Exec::default(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::Precondition(format!("quadrature order {} < 2", self.order)));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::Precondition(format!("bad fd step {}", self.fd_step)));
        }
        if self.fd_order != 2 && self.fd_order != 4 {
            return Err(Error::Precondition(format!("fd order {} not in {{2,4}}", self.fd_order)));
        }
        Ok(())
    }

    /// Central-difference stencil `(offset, weight)` for a first derivative,
    /// weights already divided by the step.
    fn stencil(&self) -> Vec<(f64, f64)> {
        let h = self.fd_step;
        match self.fd_order {
            2 => vec![(-h, -0.5 / h), (h, 0.5 / h)],
            _ => vec![
                (-2.0 * h, 1.0 / (12.0 * h)),
                (-h, -8.0 / (12.0 * h)),
                (h, 8.0 / (12.0 * h)),
                (2.0 * h, -1.0 / (12.0 * h)),
            ],
        }
    }
}

/// All permutations of `0..k` with their signs (Heap's algorithm).
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out = vec![(perm.clone(), 1)];
    let mut c = vec![0usize; k];
    let mut sign = 1;
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn check_q(q: usize) -> Result<usize> {
    if q == 0 {
        return Err(Error::InvalidDimension("generator index q must be ≥ 1".into()));
    }
    if q > 3 {
        return Err(Error::Budget(format!("q = {q} > 3 is not supported")));
    }
    Ok(2 * q - 1)
}

/// `Φ_{2q−1}(A_1..A_k) = Σ_{γ∈S_k} sgn(γ) tr(A_{γ(1)}⋯A_{γ(k)})` on the
/// realified basis; coefficients are Gaussian integers.
pub fn phi_form(n: usize, q: usize) -> Result<ComplexForm<Q>> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be ≥ 1".into()));
    }
    let k = check_q(q)?;
    let dim = 2 * n * n;
    let perms = signed_permutations(k);
    let cost = binomial(dim, k).saturating_mul(perms.len());
    if cost > PHI_BUDGET {
        return Err(Error::Budget(format!(
            "Φ_{k} on gl_{n}: {cost} trace terms exceed {PHI_BUDGET}"
        )));
    }
    let space = BasedSpace::new(dim)?;
    let mut re_terms = Vec::new();
    let mut im_terms = Vec::new();
    let units: Vec<(usize, usize, usize)> = (0..dim).map(|i| gl_unindex(n, i)).collect();
    for idx in combinations(dim, k) {
        // Gaussian integer accumulated as (re, im).
        let (mut acc_re, mut acc_im) = (0i64, 0i64);
        for (perm, sign) in &perms {
            let first = units[idx[perm[0]]];
            let row = first.0;
            let mut col = first.1;
            let mut imag = first.2;
            let mut closed = true;
            for &pi in &perm[1..] {
                let (a, b, im) = units[idx[pi]];
                if a != col {
                    closed = false;
                    break;
                }
                col = b;
                imag += im;
            }
            if !closed || col != row {
                continue;
            }
            // i^imag
            let (r, i) = match imag % 4 {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            acc_re += sign * r;
            acc_im += sign * i;
        }
        if acc_re != 0 {
            re_terms.push((idx.clone(), Q::from_i64(acc_re)));
        }
        if acc_im != 0 {
            im_terms.push((idx, Q::from_i64(acc_im)));
        }
    }
    ComplexForm::new(
        AltForm::from_terms(&space, k, re_terms)?,
        AltForm::from_terms(&space, k, im_terms)?,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Basic representative `Re(i^{q−1}Φ)∘pr_p` of the relative complex.
    U,
    /// `Re Φ` for odd `q`, `Im Φ` for even `q`.
    UPrime,
    /// The other part of `Φ`.
    B,
}

/// A trace-form generator on realified `gl_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub n: usize,
    pub q: usize,
    pub kind: GeneratorKind,
    pub phi: ComplexForm<Q>,
    /// The real form; for [`GeneratorKind::U`] this is the basic representative.
    pub form: AltForm<Q>,
}

impl Generator {
    pub fn degree(&self) -> usize {
        2 * self.q - 1
    }

    pub fn name(&self) -> String {
        let base = match self.kind {
            GeneratorKind::U => "u",
            GeneratorKind::UPrime => "uprime",
            GeneratorKind::B => "b",
        };
        format!("{base}{}@{}", self.degree(), self.n)
    }
}

/// Builds and verifies a generator: closedness always; for `U` also
/// horizontality and invariance along `u(n)`.
pub fn generator(n: usize, q: usize, kind: GeneratorKind) -> Result<Generator> {
    let phi = phi_form(n, q)?;
    let g = LieAlgebra::gl_complex(n)?;
    let q_odd = q % 2 == 1;
    let form = match kind {
        GeneratorKind::U => {
            let rotated = phi.mul_i_pow((q - 1) as u32);
            rotated.re.pullback(&hermitian_projection(n), g.space())?
        }
        GeneratorKind::UPrime if q_odd => phi.re.clone(),
        GeneratorKind::UPrime => phi.im.clone(),
        GeneratorKind::B if q_odd => phi.im.clone(),
        GeneratorKind::B => phi.re.clone(),
    };
    if kind == GeneratorKind::U {
        let k = Subalgebra::unitary(&g, n)?;
        if !is_horizontal(&k, &form)? {
            return Err(Error::NotBasic(format!("u{} on gl_{n} is not horizontal", 2 * q - 1)));
        }
        if !is_invariant(&g, &k, &form)? {
            return Err(Error::NotBasic(format!("u{} on gl_{n} is not invariant", 2 * q - 1)));
        }
    }
    if !ce_differential(&g, &form)?.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "generator {kind:?} of degree {} on gl_{n} is not closed",
            2 * q - 1
        )));
    }
    Ok(Generator {
        n,
        q,
        kind,
        phi,
        form,
    })
}

pub fn u_generator(n: usize, q: usize) -> Result<Generator> {
    generator(n, q, GeneratorKind::U)
}

/// A `u(n)`-basic float form ready for integration over `GL_n/U(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicForm {
    form: HorizontalForm,
}

impl BasicForm {
    /// Exact basic check on the rational form, then conversion.
    pub fn new(alpha: &AltForm<Q>) -> Result<Self> {
        let n = crate::matrix_group::gl_size(alpha.space().dim())?;
        let g = LieAlgebra::gl_complex(n)?;
        let k = Subalgebra::unitary(&g, n)?;
        if !is_horizontal(&k, alpha)? || !is_invariant(&g, &k, alpha)? {
            return Err(Error::NotBasic("form is not u(n)-basic".into()));
        }
        Ok(Self {
            form: HorizontalForm::new(alpha.to_f64())?,
        })
    }

    pub fn from_generator(gen: &Generator) -> Result<Self> {
        if gen.kind != GeneratorKind::U {
            return Err(Error::NotBasic(format!("{} is not a basic generator", gen.name())));
        }
        Ok(Self {
            form: HorizontalForm::new(gen.form.to_f64())?,
        })
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    /// `∫_{[0,1]^p} γ*α` along the retraction cube of the tuple.
    pub fn integrate(&self, matrices: &[CMatrix], spec: &QuadratureSpec) -> Result<f64> {
        spec.validate()?;
        let p = self.degree();
        let n = self.n();
        if matrices.len() != p {
            return Err(Error::Arity {
                expected: p,
                got: matrices.len(),
            });
        }
        if matrices.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::InvalidDimension(format!("expected {n}x{n} matrices")));
        }
        for m in matrices {
            crate::matrix_group::inverse(m)?;
        }
        if p == 0 {
            return self.form.form().eval(&[]);
        }
        let cube = RetractionCube::new(matrices);
        let stencil = spec.stencil();
        let gl = GaussLegendre::new(spec.order)?;
        gl.integrate_cube(p, spec.exec, |t| {
            let (q_inv, tangents) = cube.point_and_tangents(t, &stencil)?;
            let args: Vec<Vec<f64>> = tangents.iter().map(|v| realify(&(&q_inv * v))).collect();
            self.form.form().eval(&args)
        })
    }
}

/// `γ(t) = λ_{t_1}(A_1·λ_{t_2}(A_2·…λ_{t_p}(A_p·I)…))`, tracked through the
/// squared points `R_i = (A_i R_{i+1} A_i*)^{t_i}`, `R_{p+1} = I`, so that
/// `γ(t) = (A_1 R_2 A_1*)^{t_1/2}`.
struct RetractionCube<'a> {
    a: &'a [CMatrix],
    adj: Vec<CMatrix>,
}

impl<'a> RetractionCube<'a> {
    fn new(a: &'a [CMatrix]) -> Self {
        Self {
            a,
            adj: a.iter().map(|m| m.adjoint()).collect(),
        }
    }

    fn level(&self, i: usize, r_next: Option<&CMatrix>) -> Result<PositiveEigen> {
        let m = match r_next {
            Some(r) => &self.a[i] * r * &self.adj[i],
            None => &self.a[i] * &self.adj[i],
        };
        PositiveEigen::new(&m)
    }

    /// `γ(t)^{-1}` and the partials `∂γ/∂t_i` by central differences.
    fn point_and_tangents(&self, t: &[f64], stencil: &[(f64, f64)]) -> Result<(CMatrix, Vec<CMatrix>)> {
        let p = t.len();
        let mut eig: Vec<Option<PositiveEigen>> = vec![None; p];
        let mut r: Vec<Option<CMatrix>> = vec![None; p + 1];
        for i in (0..p).rev() {
            let e = self.level(i, r[i + 1].as_ref())?;
            if i > 0 {
                r[i] = Some(e.power(t[i]));
            }
            eig[i] = Some(e);
        }
        let top = eig[0].as_ref().expect("level 0");
        let q_inv = top.power(-t[0] / 2.0);
        let mut tangents = Vec::with_capacity(p);
        for j in 0..p {
            let mut v = CMatrix::zeros(q_inv.nrows(), q_inv.ncols());
            for &(s, w) in stencil {
                let point = if j == 0 {
                    top.power((t[0] + s) / 2.0)
                } else {
                    let mut rr = eig[j].as_ref().expect("level").power(t[j] + s);
                    for l in (1..j).rev() {
                        rr = self.level(l, Some(&rr))?.power(t[l]);
                    }
                    self.level(0, Some(&rr))?.power(t[0] / 2.0)
                };
                v += point.scale(w);
            }
            tangents.push(v);
        }
        Ok((q_inv, tangents))
    }
}

/// Van Est integration of a basic form (checked exactly).
pub fn ve_integrate(alpha: &AltForm<Q>, matrices: &[CMatrix], spec: &QuadratureSpec) -> Result<f64> {
    BasicForm::new(alpha)?.integrate(matrices, spec)
}

/// `Σ_σ sgn(σ) ∂^p/∂t_1…∂t_p|_0 f(g_1(t),…,g_p(t))` with
/// `g_1 = exp(t_1 ξ_{σ(1)})`, `g_j = exp(−t_{j−1} ξ_{σ(j−1)}) exp(t_j ξ_{σ(j)})`.
pub fn ve_differentiate(f: &GroupCochain, xis: &[Vec<f64>], spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let p = f.degree();
    if xis.len() != p {
        return Err(Error::Arity {
            expected: p,
            got: xis.len(),
        });
    }
    let n = f.n();
    let xs = xis
        .iter()
        .map(|v| complexify(v, n))
        .collect::<Result<Vec<_>>>()?;
    if p == 0 {
        return f.eval(&[]);
    }
    let stencil = spec.stencil();
    let m = stencil.len();
    let total = m.pow(p as u32);
    let mut acc = 0.0;
    for (perm, sign) in signed_permutations(p) {
        let mut partial = 0.0;
        for mut code in 0..total {
            let mut t = Vec::with_capacity(p);
            let mut w = 1.0;
            for _ in 0..p {
                let (s, wk) = stencil[code % m];
                code /= m;
                t.push(s);
                w *= wk;
            }
            let mut args = Vec::with_capacity(p);
            args.push(expm(&xs[perm[0]].scale(t[0])));
            for j in 1..p {
                args.push(expm(&xs[perm[j - 1]].scale(-t[j - 1])) * expm(&xs[perm[j]].scale(t[j])));
            }
            partial += w * f.eval(&args)?;
        }
        acc += sign as f64 * partial;
    }
    Ok(acc)
}

/// `v_{2q−1} = R(u_{2q−1})`; `q = 1` uses `v_1(A) = tr X` from the polar
/// decomposition.
pub fn v_generator(n: usize, q: usize, spec: &QuadratureSpec) -> Result<GroupCochain> {
    check_q(q)?;
    spec.validate()?;
    let flags = CochainFlags {
        normalized: true,
        k_invariant: true,
    };
    if q == 1 {
        return Ok(GroupCochain::new(1, n, format!("v1@{n}"), |a| polar_trace(&a[0])).with_flags(flags));
    }
    if q > spec.max_q {
        return Err(Error::Budget(format!(
            "v{} needs q = {q} > budget {}",
            2 * q - 1,
            spec.max_q
        )));
    }
    let basic = BasicForm::from_generator(&u_generator(n, q)?)?;
    let spec = *spec;
    Ok(GroupCochain::new(2 * q - 1, n, format!("v{}@{n}", 2 * q - 1), move |a| {
        basic.integrate(a, &spec)
    })
    .with_flags(flags))
}

/// A parsed generator name such as `u3@2`, `uprime1@1` or `v1@2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorName {
    Algebra { kind: GeneratorKind, q: usize, n: usize },
    Group { q: usize, n: usize },
}

impl GeneratorName {
    pub fn n(&self) -> usize {
        match *self {
            GeneratorName::Algebra { n, .. } | GeneratorName::Group { n, .. } => n,
        }
    }

    pub fn q(&self) -> usize {
        match *self {
            GeneratorName::Algebra { q, .. } | GeneratorName::Group { q, .. } => q,
        }
    }
}

impl fmt::Display for GeneratorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorName::Algebra { kind, q, n } => {
                let base = match kind {
                    GeneratorKind::U => "u",
                    GeneratorKind::UPrime => "uprime",
                    GeneratorKind::B => "b",
                };
                write!(f, "{base}{}@{n}", 2 * q - 1)
            }
            GeneratorName::Group { q, n } => write!(f, "v{}@{n}", 2 * q - 1),
        }
    }
}

/// Splits `name@n`; `n` defaults to 2.
pub fn split_size(name: &str) -> Result<(&str, usize)> {
    match name.rsplit_once('@') {
        Some((base, n)) => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad matrix size in {name:?}")))?;
            if n == 0 {
                return Err(Error::Parse(format!("matrix size 0 in {name:?}")));
            }
            Ok((base, n))
        }
        None => Ok((name, 2)),
    }
}

impl FromStr for GeneratorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, n) = split_size(s)?;
        let (prefix, digits) = base.split_at(base.find(|c: char| c.is_ascii_digit()).unwrap_or(base.len()));
        let degree: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("unknown generator {s:?}")))?;
        if degree % 2 == 0 {
            return Err(Error::Parse(format!("generator degree {degree} is not odd")));
        }
        let q = degree.div_ceil(2);
        let kind = match prefix {
            "u" => GeneratorKind::U,
            "uprime" => GeneratorKind::UPrime,
            "b" => GeneratorKind::B,
            "v" => return Ok(GeneratorName::Group { q, n }),
            _ => return Err(Error::Parse(format!("unknown generator {s:?}"))),
        };
        Ok(GeneratorName::Algebra { kind, q, n })
    }
}

/// Built-in cochains by name: `v1`, `v3`, `v5`, `logabsdet`, `const:c`,
/// each optionally suffixed with `@n`.
pub fn builtin_cochain(name: &str, spec: &QuadratureSpec) -> Result<GroupCochain> {
    let (base, n) = split_size(name)?;
    if let Some(c) = base.strip_prefix("const:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::Parse(format!("bad constant in {name:?}")))?;
        return Ok(GroupCochain::constant(n, c));
    }
    if base == "logabsdet" {
        return Ok(GroupCochain::logabsdet(n));
    }
    match name.parse::<GeneratorName>() {
        Ok(GeneratorName::Group { q, n }) => v_generator(n, q, spec),
        _ => Err(Error::Parse(format!("unknown cochain {name:?}"))),
    }
}

/// Coefficient vector of a form in [`combinations`] order, as rationals.
pub fn coefficient_vector(form: &AltForm<Q>) -> Vec<Q> {
    form.to_dense()
}

/// Whether a rational form has only integer coefficients.
pub fn is_integral(form: &AltForm<Q>) -> bool {
    form.terms().all(|(_, c)| c.is_integer())
}
