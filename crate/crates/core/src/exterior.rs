//! Alternating multilinear forms on a based real vector space.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{determinant_in_place, Matrix, Scalar, Q};

/// A real vector space with a fixed ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedSpace {
    dim: usize,
    labels: Option<Arc<[String]>>,
}

impl BasedSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("a based space needs dim ≥ 1".into()));
        }
        Ok(Self { dim, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::InvalidDimension("a based space needs dim ≥ 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidDimension(format!("duplicate basis label {l:?}")));
            }
        }
        Ok(Self {
            dim,
            labels: Some(labels.into()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Same basis size; labels are cosmetic and ignored.
    pub fn compatible(&self, other: &BasedSpace) -> bool {
        self.dim == other.dim
    }

    fn check(&self, other: &BasedSpace) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "dimension {} vs {}",
                self.dim, other.dim
            )))
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All strictly increasing `p`-tuples in `[0, n)`, lexicographically.
pub fn combinations(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, p));
    if p > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - p + i {
                cur[i] += 1;
                for j in i + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of an increasing tuple in [`combinations`] order.
pub fn combination_rank(n: usize, tuple: &[usize]) -> usize {
    let p = tuple.len();
    let mut rank = 0;
    let mut start = 0;
    for (i, &c) in tuple.iter().enumerate() {
        for v in start..c {
            rank += binomial(n - 1 - v, p - 1 - i);
        }
        start = c + 1;
    }
    rank
}

/// Lexicographic basis of `Λ^p V*`; negative `p` is rejected.
pub fn enumerate_basis(space: &BasedSpace, p: i64) -> Result<Vec<Vec<usize>>> {
    let p = usize::try_from(p).map_err(|_| Error::Degree(format!("negative degree {p}")))?;
    Ok(combinations(space.dim(), p))
}

/// Sorts `idx` in place, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// Sign of the shuffle placing disjoint increasing tuples `a` then `b` in order.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            if i < a.len() && a[i] == b[j] {
                return None;
            }
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    Some((out, inversions % 2 == 1))
}

/// A `p`-form stored sparsely over increasing index tuples.
#[derive(Clone, PartialEq)]
pub struct AltForm<S> {
    space: BasedSpace,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, S>,
}

impl<S: fmt::Debug> fmt::Debug for AltForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AltForm(deg {}, dim {}) {{", self.degree, self.space.dim())?;
        for (k, v) in &self.coeffs {
            write!(f, " {k:?}: {v:?};")?;
        }
        write!(f, " }}")
    }
}

impl<S: Scalar> AltForm<S> {
    pub fn zero(space: &BasedSpace, degree: usize) -> Self {
        Self {
            space: space.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant 0-form `c`.
    pub fn constant(space: &BasedSpace, c: S) -> Self {
        let mut f = Self::zero(space, 0);
        f.add_term(Vec::new(), c);
        f
    }

    /// `e^{i_1} ∧ … ∧ e^{i_p}` for an arbitrary index list (sign-normalized).
    pub fn basis(space: &BasedSpace, idx: &[usize]) -> Result<Self> {
        Self::from_terms(space, idx.len(), [(idx.to_vec(), S::one())])
    }

    /// Sums terms `c · e^{I}`; indices need not be sorted.
    pub fn from_terms(
        space: &BasedSpace,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, S)>,
    ) -> Result<Self> {
        let mut f = Self::zero(space, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::Arity {
                    expected: degree,
                    got: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= space.dim()) {
                return Err(Error::SpaceMismatch(format!(
                    "index {bad} out of range for dim {}",
                    space.dim()
                )));
            }
            let Some(sign) = sort_with_sign(&mut idx) else {
                continue;
            };
            let c = if sign < 0 { -c } else { c };
            f.add_term(idx, c);
        }
        Ok(f)
    }

    /// Builds from a dense vector in [`combinations`] order.
    pub fn from_dense(space: &BasedSpace, degree: usize, dense: &[S]) -> Result<Self> {
        let basis = combinations(space.dim(), degree);
        if basis.len() != dense.len() {
            return Err(Error::Arity {
                expected: basis.len(),
                got: dense.len(),
            });
        }
        let mut f = Self::zero(space, degree);
        for (k, v) in basis.into_iter().zip(dense) {
            f.add_term(k, v.clone());
        }
        Ok(f)
    }

    fn add_term(&mut self, key: Vec<usize>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        self.coeffs.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn to_dense(&self) -> Vec<S> {
        let n = binomial(self.space.dim(), self.degree);
        let mut v = vec![S::zero(); n];
        for (k, c) in &self.coeffs {
            v[combination_rank(self.space.dim(), k)] = c.clone();
        }
        v
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.space.check(&other.space)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(&self.space, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v.clone() * s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Alternating evaluation on `degree` coordinate vectors.
    pub fn eval(&self, vectors: &[Vec<S>]) -> Result<S> {
        if vectors.len() != self.degree {
            return Err(Error::Arity {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.space.dim()) {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} on a space of dim {}",
                v.len(),
                self.space.dim()
            )));
        }
        let p = self.degree;
        let mut acc = S::zero();
        let mut minor = Vec::with_capacity(p * p);
        for (key, c) in &self.coeffs {
            minor.clear();
            for v in vectors {
                for &i in key {
                    minor.push(v[i].clone());
                }
            }
            let det = determinant_in_place(std::mem::take(&mut minor), p);
            acc = acc + c.clone() * det;
        }
        Ok(acc)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.space.check(&other.space)?;
        let mut out = Self::zero(&self.space, self.degree + other.degree);
        if out.degree > self.space.dim() {
            return Ok(out);
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((key, odd)) = merge_sign(a, b) {
                    let v = ca.clone() * cb.clone();
                    out.add_term(key, if odd { -v } else { v });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_v`, inserting `v` in the first slot.
    pub fn contract(&self, v: &[S]) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::Degree("cannot contract a 0-form".into()));
        }
        if v.len() != self.space.dim() {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} on a space of dim {}",
                v.len(),
                self.space.dim()
            )));
        }
        let mut out = Self::zero(&self.space, self.degree - 1);
        for (key, c) in &self.coeffs {
            for (pos, &i) in key.iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let mut rest = key.clone();
                rest.remove(pos);
                let t = c.clone() * v[i].clone();
                out.add_term(rest, if pos % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// Pullback along a linear map `source → self.space` given as a
    /// `self.space.dim() × source.dim()` matrix.
    pub fn pullback(&self, map: &Matrix<S>, source: &BasedSpace) -> Result<Self> {
        if map.rows() != self.space.dim() || map.cols() != source.dim() {
            return Err(Error::SpaceMismatch(format!(
                "pullback map is {}x{}, expected {}x{}",
                map.rows(),
                map.cols(),
                self.space.dim(),
                source.dim()
            )));
        }
        // Pullbacks of the dual basis covectors, kept sparse.
        let covectors: Vec<Vec<(usize, S)>> = (0..map.rows())
            .map(|r| {
                map.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        let mut out = Self::zero(source, self.degree);
        let mut partial: Vec<(Vec<usize>, S)> = Vec::new();
        for (key, c) in &self.coeffs {
            partial.clear();
            partial.push((Vec::new(), c.clone()));
            for &i in key {
                let mut next = Vec::with_capacity(partial.len() * covectors[i].len());
                for (idx, acc) in &partial {
                    for (j, m) in &covectors[i] {
                        if idx.contains(j) {
                            continue;
                        }
                        let mut k = idx.clone();
                        k.push(*j);
                        next.push((k, acc.clone() * m.clone()));
                    }
                }
                partial = next;
            }
            for (mut idx, v) in partial.drain(..) {
                let sign = sort_with_sign(&mut idx).expect("distinct indices");
                out.add_term(idx, if sign < 0 { -v } else { v });
            }
        }
        Ok(out)
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AltForm<T> {
        let mut out = AltForm::zero(&self.space, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

impl AltForm<Q> {
    /// Explicit promotion to the float backend.
    pub fn to_f64(&self) -> AltForm<f64> {
        self.map_scalars(Scalar::to_f64)
    }
}

/// A complex-valued form stored as real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexForm<S> {
    pub re: AltForm<S>,
    pub im: AltForm<S>,
}

impl<S: Scalar> ComplexForm<S> {
    pub fn new(re: AltForm<S>, im: AltForm<S>) -> Result<Self> {
        re.same_shape(&im)?;
        Ok(Self { re, im })
    }

    pub fn zero(space: &BasedSpace, degree: usize) -> Self {
        Self {
            re: AltForm::zero(space, degree),
            im: AltForm::zero(space, degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiplication by `i^k`.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => Self {
                re: self.im.neg(),
                im: self.re.clone(),
            },
            2 => Self {
                re: self.re.neg(),
                im: self.im.neg(),
            },
            _ => Self {
                re: self.im.clone(),
                im: self.re.neg(),
            },
        }
    }

    /// `(re, im)` of the value on the given vectors.
    pub fn eval(&self, vectors: &[Vec<S>]) -> Result<(S, S)> {
        Ok((self.re.eval(vectors)?, self.im.eval(vectors)?))
    }

    pub fn pullback(&self, map: &Matrix<S>, source: &BasedSpace) -> Result<Self> {
        Ok(Self {
            re: self.re.pullback(map, source)?,
            im: self.im.pullback(map, source)?,
        })
    }
}

impl ComplexForm<Q> {
    pub fn to_f64(&self) -> ComplexForm<f64> {
        ComplexForm {
            re: self.re.to_f64(),
            im: self.im.to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn sp(n: usize) -> BasedSpace {
        BasedSpace::new(n).unwrap()
    }

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::from_i64(x)).collect()
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(
            enumerate_basis(&sp(3), 2).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(enumerate_basis(&sp(3), 0).unwrap(), vec![Vec::<usize>::new()]);
        assert!(enumerate_basis(&sp(4), 5).unwrap().is_empty());
        assert!(enumerate_basis(&sp(4), -1).is_err());
    }

    #[test]
    fn rank_inverts_enumeration() {
        for n in 1..7 {
            for p in 0..=n {
                for (i, t) in combinations(n, p).iter().enumerate() {
                    assert_eq!(combination_rank(n, t), i);
                }
            }
        }
    }

    #[test]
    fn space_validation() {
        assert!(BasedSpace::new(0).is_err());
        assert!(BasedSpace::with_labels(vec!["a".into(), "a".into()]).is_err());
        let s = BasedSpace::with_labels(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn eval_examples() {
        let f = AltForm::<Q>::basis(&sp(2), &[0, 1]).unwrap();
        assert_eq!(f.eval(&[qv(&[1, 0]), qv(&[0, 1])]).unwrap(), q(1, 1));
        assert_eq!(f.eval(&[qv(&[0, 1]), qv(&[1, 0])]).unwrap(), q(-1, 1));
        assert_eq!(f.eval(&[qv(&[1, 1]), qv(&[0, 1])]).unwrap(), q(1, 1));
        assert!(matches!(f.eval(&[qv(&[1, 0])]), Err(Error::Arity { .. })));
    }

    #[test]
    fn wedge_examples() {
        let s = sp(3);
        let e = |i| AltForm::<Q>::basis(&s, &[i]).unwrap();
        assert_eq!(e(0).wedge(&e(1)).unwrap(), AltForm::basis(&s, &[0, 1]).unwrap());
        let a = e(0).add(&e(2)).unwrap();
        assert!(a.wedge(&a).unwrap().is_zero());
        let lhs = e(0).add(&e(1)).unwrap().wedge(&e(2)).unwrap();
        let rhs = AltForm::basis(&s, &[0, 2])
            .unwrap()
            .add(&AltForm::basis(&s, &[1, 2]).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(e(0).wedge(&AltForm::basis(&sp(2), &[0]).unwrap()).is_err());
    }

    #[test]
    fn contract_examples() {
        let f = AltForm::<Q>::basis(&sp(2), &[0, 1]).unwrap();
        assert_eq!(
            f.contract(&qv(&[1, 0])).unwrap(),
            AltForm::basis(&sp(2), &[1]).unwrap()
        );
        assert_eq!(
            f.contract(&qv(&[0, 1])).unwrap(),
            AltForm::basis(&sp(2), &[0]).unwrap().neg()
        );
        assert!(AltForm::constant(&sp(2), q(1, 1)).contract(&qv(&[1, 0])).is_err());
    }

    #[test]
    fn from_terms_sorts_with_sign() {
        let s = sp(3);
        let f = AltForm::<Q>::from_terms(&s, 2, [(vec![2, 0], q(1, 1)), (vec![1, 1], q(5, 1))]).unwrap();
        assert_eq!(f.coeff(&[0, 2]), q(-1, 1));
        assert_eq!(f.nnz(), 1);
    }

    #[test]
    fn pullback_matches_evaluation() {
        let s3 = sp(3);
        let s2 = sp(2);
        let f = AltForm::<Q>::from_terms(&s3, 2, [(vec![0, 1], q(2, 1)), (vec![1, 2], q(-1, 3))]).unwrap();
        let m = Matrix::from_rows(3, 2, qv(&[1, 2, 0, 1, 3, -1]));
        let g = f.pullback(&m, &s2).unwrap();
        let v = f
            .eval(&[m.column(0), m.column(1)])
            .unwrap();
        assert_eq!(g.coeff(&[0, 1]), v);
    }

    #[test]
    fn dense_roundtrip() {
        let s = sp(4);
        let f = AltForm::<Q>::from_terms(&s, 2, [(vec![1, 3], q(3, 2)), (vec![0, 2], q(1, 1))]).unwrap();
        let d = f.to_dense();
        assert_eq!(AltForm::from_dense(&s, 2, &d).unwrap(), f);
    }

    #[test]
    fn complex_mul_i() {
        let s = sp(1);
        let re = AltForm::<Q>::basis(&s, &[0]).unwrap();
        let c = ComplexForm::new(re.clone(), AltForm::zero(&s, 1)).unwrap();
        let ic = c.mul_i_pow(1);
        assert!(ic.re.is_zero());
        assert_eq!(ic.im, re);
        assert_eq!(c.mul_i_pow(4), c);
    }
}
