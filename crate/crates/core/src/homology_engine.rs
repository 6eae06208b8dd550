//! Finite double complexes with augmentations and homotopies: the
//! perturbation lemma and the back-and-forth composite.
//!
//! Every operator is held as one matrix on the global space
//! `D ⊕ X ⊕ Y`, laid out slot by slot (see [`Layout`]). Bidegrees are enforced
//! when blocks are inserted. The two differentials anticommute.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::GradedComplex;
use crate::linalg::{Matrix, QMatrixDoc, Scalar, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum Slot {
    D { p: usize, q: usize },
    X { q: usize },
    Y { p: usize },
}

/// Fiber dimensions and global offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    cols: usize,
    rows: usize,
    d_dims: Vec<Vec<usize>>,
    x_dims: Vec<usize>,
    y_dims: Vec<usize>,
    offsets: BTreeMap<Slot, usize>,
    total: usize,
}

impl Layout {
    /// `d_dims[p][q]` for `p < cols`, `q < rows`; `x_dims` has `rows`
    /// entries and `y_dims` has `cols`.
    pub fn new(d_dims: Vec<Vec<usize>>, x_dims: Vec<usize>, y_dims: Vec<usize>) -> Result<Self> {
        let cols = d_dims.len();
        let rows = d_dims.first().map_or(0, Vec::len);
        if cols == 0 || rows == 0 || d_dims.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidDimension("ragged or empty grid".into()));
        }
        if x_dims.len() != rows || y_dims.len() != cols {
            return Err(Error::InvalidDimension(format!(
                "X needs {rows} degrees and Y needs {cols}"
            )));
        }
        let mut offsets = BTreeMap::new();
        let mut total = 0;
        for (p, col) in d_dims.iter().enumerate() {
            for (q, &n) in col.iter().enumerate() {
                offsets.insert(Slot::D { p, q }, total);
                total += n;
            }
        }
        for (q, &n) in x_dims.iter().enumerate() {
            offsets.insert(Slot::X { q }, total);
            total += n;
        }
        for (p, &n) in y_dims.iter().enumerate() {
            offsets.insert(Slot::Y { p }, total);
            total += n;
        }
        Ok(Self {
            cols,
            rows,
            d_dims,
            x_dims,
            y_dims,
            offsets,
            total,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self, s: Slot) -> usize {
        match s {
            Slot::D { p, q } => self.d_dims.get(p).and_then(|c| c.get(q)).copied().unwrap_or(0),
            Slot::X { q } => self.x_dims.get(q).copied().unwrap_or(0),
            Slot::Y { p } => self.y_dims.get(p).copied().unwrap_or(0),
        }
    }

    pub fn offset(&self, s: Slot) -> Option<usize> {
        self.offsets.get(&s).copied()
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        self.offsets.keys().copied()
    }

    pub fn x_dims(&self) -> &[usize] {
        &self.x_dims
    }

    pub fn y_dims(&self) -> &[usize] {
        &self.y_dims
    }

    pub fn d_dims(&self) -> &[Vec<usize>] {
        &self.d_dims
    }

    fn range(&self, s: Slot) -> std::ops::Range<usize> {
        let o = self.offset(s).unwrap_or(0);
        o..o + self.dim(s)
    }

    /// Diagonal projector onto the slots selected by `pick`.
    pub fn projector(&self, pick: impl Fn(Slot) -> bool) -> Matrix<Q> {
        let mut m = Matrix::zeros(self.total, self.total);
        for s in self.slots() {
            if pick(s) {
                for i in self.range(s) {
                    m.set(i, i, Q::one());
                }
            }
        }
        m
    }

    pub fn id_d(&self) -> Matrix<Q> {
        self.projector(|s| matches!(s, Slot::D { .. }))
    }

    pub fn id_x(&self) -> Matrix<Q> {
        self.projector(|s| matches!(s, Slot::X { .. }))
    }

    pub fn id_y(&self) -> Matrix<Q> {
        self.projector(|s| matches!(s, Slot::Y { .. }))
    }

    pub fn block(&self, m: &Matrix<Q>, target: Slot, source: Slot) -> Matrix<Q> {
        let (rt, rs) = (self.range(target), self.range(source));
        Matrix::from_fn(rt.len(), rs.len(), |r, c| m.get(rt.start + r, rs.start + c).clone())
    }

    fn set_block(&self, m: &mut Matrix<Q>, target: Slot, source: Slot, b: &Matrix<Q>) {
        let (rt, rs) = (self.range(target), self.range(source));
        for r in 0..rt.len() {
            for c in 0..rs.len() {
                m.set(rt.start + r, rs.start + c, b.get(r, c).clone());
            }
        }
    }
}

/// The named operators and the bidegree each is allowed to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    D,
    Delta,
    DX,
    DY,
    I,
    J,
    H,
    P,
    K,
    Qm,
}

impl Op {
    pub const ALL: [Op; 10] = [
        Op::D,
        Op::Delta,
        Op::DX,
        Op::DY,
        Op::I,
        Op::J,
        Op::H,
        Op::P,
        Op::K,
        Op::Qm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::D => "d",
            Op::Delta => "delta",
            Op::DX => "d_x",
            Op::DY => "delta_y",
            Op::I => "i",
            Op::J => "j",
            Op::H => "h",
            Op::P => "p",
            Op::K => "k",
            Op::Qm => "q",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.name() == s)
    }

    /// Whether a block `source → target` is legal for this operator.
    pub fn allows(self, target: Slot, source: Slot) -> bool {
        use Slot::*;
        match (self, target, source) {
            (Op::D, D { p: a, q: b }, D { p, q }) => a == p && b == q + 1,
            (Op::Delta, D { p: a, q: b }, D { p, q }) => a == p + 1 && b == q,
            (Op::H, D { p: a, q: b }, D { p, q }) => a + 1 == p && b == q,
            (Op::K, D { p: a, q: b }, D { p, q }) => a == p && b + 1 == q,
            (Op::DX, X { q: b }, X { q }) => b == q + 1,
            (Op::DY, Y { p: a }, Y { p }) => a == p + 1,
            (Op::I, D { p: 0, q: b }, X { q }) => b == q,
            (Op::P, X { q: b }, D { p: 0, q }) => b == q,
            (Op::J, D { p: a, q: 0 }, Y { p }) => a == p,
            (Op::Qm, Y { p: a }, D { p, q: 0 }) => a == p,
            _ => false,
        }
    }
}

/// A double complex with augmentation data and homotopies.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedData {
    layout: Layout,
    ops: BTreeMap<Op, Matrix<Q>>,
}

impl AugmentedData {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// The operator, or the zero matrix when absent.
    pub fn op(&self, o: Op) -> Matrix<Q> {
        self.ops
            .get(&o)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.layout.total, self.layout.total))
    }

    pub fn has(&self, o: Op) -> bool {
        self.ops.contains_key(&o)
    }

    pub fn has_vertical_homotopy(&self) -> bool {
        self.has(Op::K) && self.has(Op::Qm)
    }

    /// Builds from blocks, rejecting illegal bidegrees, then validates.
    pub fn from_blocks(
        layout: Layout,
        blocks: impl IntoIterator<Item = (Op, Slot, Slot, Matrix<Q>)>,
    ) -> Result<Self> {
        let data = Self::assemble(layout, blocks, false)?;
        data.validate()?;
        Ok(data)
    }

    fn assemble(
        layout: Layout,
        blocks: impl IntoIterator<Item = (Op, Slot, Slot, Matrix<Q>)>,
        vertical: bool,
    ) -> Result<Self> {
        let mut ops: BTreeMap<Op, Matrix<Q>> = BTreeMap::new();
        for (o, t, s, b) in blocks {
            if !o.allows(t, s) {
                return Err(Error::Precondition(format!(
                    "block {:?} -> {:?} has the wrong bidegree for {}",
                    s,
                    t,
                    o.name()
                )));
            }
            if b.rows() != layout.dim(t) || b.cols() != layout.dim(s) {
                return Err(Error::InvalidDimension(format!(
                    "block {} {:?} -> {:?} is {}x{}",
                    o.name(),
                    s,
                    t,
                    b.rows(),
                    b.cols()
                )));
            }
            let m = ops
                .entry(o)
                .or_insert_with(|| Matrix::zeros(layout.total, layout.total));
            layout.set_block(m, t, s, &b);
        }
        let mut required = vec![Op::D, Op::Delta, Op::DX, Op::DY, Op::I, Op::J, Op::H, Op::P];
        if vertical {
            required.extend([Op::K, Op::Qm]);
        }
        for o in required {
            ops.entry(o)
                .or_insert_with(|| Matrix::zeros(layout.total, layout.total));
        }
        if ops.contains_key(&Op::K) != ops.contains_key(&Op::Qm) {
            return Err(Error::Precondition("k and q must be given together".into()));
        }
        Ok(Self { layout, ops })
    }

    /// Nonzero blocks of every operator.
    pub fn blocks(&self) -> Vec<(Op, Slot, Slot, Matrix<Q>)> {
        let mut out = Vec::new();
        let slots: Vec<Slot> = self.layout.slots().collect();
        for (&o, m) in &self.ops {
            for &t in &slots {
                for &s in &slots {
                    if !o.allows(t, s) || self.layout.dim(t) == 0 || self.layout.dim(s) == 0 {
                        continue;
                    }
                    let b = self.layout.block(m, t, s);
                    if !b.is_zero() {
                        out.push((o, t, s, b));
                    }
                }
            }
        }
        out
    }

    /// Checks every structural identity exactly, reporting the first failure.
    pub fn validate(&self) -> Result<()> {
        for (name, ok) in self.invariant_checks() {
            if !ok {
                return Err(Error::InvariantViolation(name.to_string()));
            }
        }
        Ok(())
    }

    /// Named exact identity checks.
    pub fn invariant_checks(&self) -> Vec<(&'static str, bool)> {
        let l = &self.layout;
        let d = self.op(Op::D);
        let delta = self.op(Op::Delta);
        let dx = self.op(Op::DX);
        let dy = self.op(Op::DY);
        let i = self.op(Op::I);
        let j = self.op(Op::J);
        let h = self.op(Op::H);
        let p = self.op(Op::P);
        let id_d = l.id_d();
        let mut out = vec![
            ("d∘d = 0", d.mul(&d).is_zero()),
            ("δ∘δ = 0", delta.mul(&delta).is_zero()),
            ("dδ + δd = 0", d.mul(&delta).add(&delta.mul(&d)).is_zero()),
            ("d_X∘d_X = 0", dx.mul(&dx).is_zero()),
            ("δ_Y∘δ_Y = 0", dy.mul(&dy).is_zero()),
            ("d∘i = i∘d_X", d.mul(&i) == i.mul(&dx)),
            ("δ∘i = 0", delta.mul(&i).is_zero()),
            ("δ∘j = j∘δ_Y", delta.mul(&j) == j.mul(&dy)),
            ("d∘j = 0", d.mul(&j).is_zero()),
            ("p∘i = 1", p.mul(&i) == l.id_x()),
            (
                "[h,δ] = 1 − i∘p",
                h.mul(&delta).add(&delta.mul(&h)) == id_d.sub(&i.mul(&p)),
            ),
        ];
        if self.has_vertical_homotopy() {
            let k = self.op(Op::K);
            let qm = self.op(Op::Qm);
            out.push(("q∘j = 1", qm.mul(&j) == l.id_y()));
            out.push((
                "[d,k] = 1 − j∘q",
                d.mul(&k).add(&k.mul(&d)) == id_d.sub(&j.mul(&qm)),
            ));
        }
        out
    }

    /// `X` as a graded complex.
    pub fn x_complex(&self) -> Result<GradedComplex> {
        let l = &self.layout;
        let dx = self.op(Op::DX);
        let diffs = (0..l.rows.saturating_sub(1))
            .map(|q| l.block(&dx, Slot::X { q: q + 1 }, Slot::X { q }))
            .collect();
        GradedComplex::new(l.x_dims.clone(), diffs)
    }

    /// `Y` as a graded complex.
    pub fn y_complex(&self) -> Result<GradedComplex> {
        let l = &self.layout;
        let dy = self.op(Op::DY);
        let diffs = (0..l.cols.saturating_sub(1))
            .map(|p| l.block(&dy, Slot::Y { p: p + 1 }, Slot::Y { p }))
            .collect();
        GradedComplex::new(l.y_dims.clone(), diffs)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            d_dims: self.layout.d_dims.clone(),
            x_dims: self.layout.x_dims.clone(),
            y_dims: self.layout.y_dims.clone(),
            has_vertical_homotopy: self.has_vertical_homotopy(),
            blocks: self
                .blocks()
                .into_iter()
                .map(|(o, t, s, m)| BlockDoc {
                    op: o.name().to_string(),
                    target: t,
                    source: s,
                    matrix: QMatrixDoc::from(&m),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let layout = Layout::new(doc.d_dims.clone(), doc.x_dims.clone(), doc.y_dims.clone())?;
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for b in &doc.blocks {
            let o = Op::from_name(&b.op)
                .ok_or_else(|| Error::Parse(format!("unknown operator {:?}", b.op)))?;
            blocks.push((o, b.target, b.source, Matrix::try_from(&b.matrix)?));
        }
        let data = Self::assemble(layout, blocks, doc.has_vertical_homotopy)?;
        data.validate()?;
        Ok(data)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

/// Serialized instance: grid dims plus nonzero operator blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub d_dims: Vec<Vec<usize>>,
    pub x_dims: Vec<usize>,
    pub y_dims: Vec<usize>,
    #[serde(default)]
    pub has_vertical_homotopy: bool,
    pub blocks: Vec<BlockDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub op: String,
    pub target: Slot,
    pub source: Slot,
    pub matrix: QMatrixDoc,
}

/// Result of [`perturb_horizontal`].
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbed {
    pub h_prime: Matrix<Q>,
    pub p_prime: Matrix<Q>,
    /// Number of nonzero terms in the Neumann series for `(1 + dh)^{-1}`.
    pub series_len: usize,
}

/// `h′ = h(1 + dh)^{-1}`, `p′ = p(1 + dh)^{-1}`, with the series summed
/// until it vanishes; verifies `[h′, d+δ] = 1 − i∘p′` and `p′∘i = 1`.
pub fn perturb_horizontal(data: &AugmentedData) -> Result<Perturbed> {
    data.validate()?;
    let l = data.layout();
    let d = data.op(Op::D);
    let h = data.op(Op::H);
    let minus_dh = d.mul(&h).neg();
    let mut term = l.id_d().add(&l.id_x()).add(&l.id_y());
    let mut inverse = Matrix::zeros(l.total, l.total);
    let mut series_len = 0;
    while !term.is_zero() {
        if series_len > l.cols + 1 {
            return Err(Error::InvariantViolation("perturbation series does not terminate".into()));
        }
        inverse = inverse.add(&term);
        term = term.mul(&minus_dh);
        series_len += 1;
    }
    let out = Perturbed {
        h_prime: h.mul(&inverse),
        p_prime: data.op(Op::P).mul(&inverse),
        series_len,
    };
    if !perturbed_identity_holds(data, &out) {
        return Err(Error::InvariantViolation("[h′, d+δ] ≠ 1 − i∘p′".into()));
    }
    if out.p_prime.mul(&data.op(Op::I)) != l.id_x() {
        return Err(Error::InvariantViolation("p′∘i ≠ 1".into()));
    }
    Ok(out)
}

/// `[h′, d+δ] = 1 − i∘p′` on `D`.
pub fn perturbed_identity_holds(data: &AugmentedData, pert: &Perturbed) -> bool {
    let total = data.op(Op::D).add(&data.op(Op::Delta));
    let lhs = pert.h_prime.mul(&total).add(&total.mul(&pert.h_prime));
    let rhs = data.layout.id_d().sub(&data.op(Op::I).mul(&pert.p_prime));
    lhs == rhs
}

fn power(m: &Matrix<Q>, k: usize, id: &Matrix<Q>) -> Matrix<Q> {
    (0..k).fold(id.clone(), |acc, _| acc.mul(m))
}

/// Global map `Y → X` equal to `(−1)^p p∘(dh)^p∘j` on `Y^p`.
pub fn xy_global(data: &AugmentedData) -> Matrix<Q> {
    let l = data.layout();
    let id = Matrix::identity(l.total);
    let dh = data.op(Op::D).mul(&data.op(Op::H));
    let p_map = data.op(Op::P);
    let j = data.op(Op::J);
    let mut out = Matrix::zeros(l.total, l.total);
    for p in 0..l.cols {
        let proj = l.projector(|s| s == Slot::Y { p });
        let m = p_map.mul(&power(&dh, p, &id)).mul(&j).mul(&proj);
        out = if p % 2 == 0 { out.add(&m) } else { out.sub(&m) };
    }
    out
}

/// Global map `X → Y` equal to `(−1)^p q∘(δk)^p∘i` on `X^p`.
pub fn yx_global(data: &AugmentedData) -> Result<Matrix<Q>> {
    if !data.has_vertical_homotopy() {
        return Err(Error::Precondition("vertical homotopy k, q not present".into()));
    }
    let l = data.layout();
    let id = Matrix::identity(l.total);
    let dk = data.op(Op::Delta).mul(&data.op(Op::K));
    let q_map = data.op(Op::Qm);
    let i = data.op(Op::I);
    let mut out = Matrix::zeros(l.total, l.total);
    for q in 0..l.rows {
        let proj = l.projector(|s| s == Slot::X { q });
        let m = q_map.mul(&power(&dk, q, &id)).mul(&i).mul(&proj);
        out = if q % 2 == 0 { out.add(&m) } else { out.sub(&m) };
    }
    Ok(out)
}

/// Degree-`p` component of a global `Y → X` or `X → Y` map.
fn split_degrees(l: &Layout, m: &Matrix<Q>, to_x: bool) -> Vec<Matrix<Q>> {
    let n = l.cols.max(l.rows);
    (0..n)
        .map(|p| {
            let (t, s) = if to_x {
                (Slot::X { q: p }, Slot::Y { p })
            } else {
                (Slot::Y { p }, Slot::X { q: p })
            };
            Matrix::from_fn(l.dim(t), l.dim(s), |r, c| {
                let (ro, co) = (l.offset(t).unwrap_or(0), l.offset(s).unwrap_or(0));
                m.get(ro + r, co + c).clone()
            })
        })
        .collect()
}

/// Cochain map `Y → X`, one matrix per degree; verified to commute with
/// the differentials.
pub fn xy_map(data: &AugmentedData) -> Result<Vec<Matrix<Q>>> {
    let xy = xy_global(data);
    if xy.mul(&data.op(Op::DY)) != data.op(Op::DX).mul(&xy) {
        return Err(Error::InvariantViolation("xy does not commute with differentials".into()));
    }
    Ok(split_degrees(data.layout(), &xy, true))
}

/// Cochain map `X → Y`, one matrix per degree.
pub fn yx_map(data: &AugmentedData) -> Result<Vec<Matrix<Q>>> {
    let yx = yx_global(data)?;
    if yx.mul(&data.op(Op::DX)) != data.op(Op::DY).mul(&yx) {
        return Err(Error::InvariantViolation("yx does not commute with differentials".into()));
    }
    Ok(split_degrees(data.layout(), &yx, false))
}

/// Whether `xy∘yx` is the identity on `X`. Requires `h∘k = 0` and
/// `p∘k = 0`; otherwise returns [`Error::Precondition`].
pub fn back_and_forth_check(data: &AugmentedData) -> Result<bool> {
    if !data.has_vertical_homotopy() {
        return Err(Error::Precondition("vertical homotopy k, q not present".into()));
    }
    let k = data.op(Op::K);
    if !data.op(Op::H).mul(&k).is_zero() {
        return Err(Error::Precondition("h∘k ≠ 0".into()));
    }
    if !data.op(Op::P).mul(&k).is_zero() {
        return Err(Error::Precondition("p∘k ≠ 0".into()));
    }
    let composite = xy_global(data).mul(&yx_global(data)?);
    Ok(composite == data.layout().id_x())
}

/// Indecomposable building blocks for synthetic instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// One element at `(0,0)` seen by both `X^0` and `Y^0`.
    Dot,
    /// `s → d s, δ s, δ d s` spanning `(p,q)…(p+1,q+1)`; acyclic both ways.
    Square { p: usize, q: usize },
    /// `a → d a` at `(0,q), (0,q+1)`, mirrored in `X`.
    VerticalPair { q: usize },
    /// `a → δ a` at `(p,0), (p+1,0)`, mirrored in `Y`.
    HorizontalPair { p: usize },
    /// Zigzag linking `X^q` and `Y^q` through the antidiagonal `p+q = const`.
    Staircase { q: usize },
    /// A vertical pair and a horizontal pair at `(0,0)` glued by the
    /// homotopies, compatible with `h∘k = 0` and `p∘k = 0`.
    Linked,
}

impl Piece {
    fn cells(self) -> Vec<(usize, usize)> {
        match self {
            Piece::Dot => vec![(0, 0)],
            Piece::Square { p, q } => vec![(p, q), (p, q + 1), (p + 1, q), (p + 1, q + 1)],
            Piece::VerticalPair { q } => vec![(0, q), (0, q + 1)],
            Piece::HorizontalPair { p } => vec![(p, 0), (p + 1, 0)],
            Piece::Staircase { q } => {
                let mut v: Vec<_> = (0..=q).map(|i| (i, q - i)).collect();
                v.extend((0..q).map(|i| (i, q - 1 - i)));
                v
            }
            Piece::Linked => vec![(0, 0), (0, 1), (0, 0), (1, 0)],
        }
    }

    /// Whether the piece is compatible with `h∘k = 0` and `p∘k = 0`.
    pub fn respects_hk0(self) -> bool {
        matches!(
            self,
            Piece::Dot | Piece::HorizontalPair { .. } | Piece::Staircase { .. } | Piece::Linked
        )
    }
}

#[derive(Default)]
struct Builder {
    elems: Vec<Slot>,
    entries: BTreeMap<Op, Vec<(usize, usize, i64)>>,
}

impl Builder {
    fn add(&mut self, s: Slot) -> usize {
        self.elems.push(s);
        self.elems.len() - 1
    }

    fn set(&mut self, o: Op, target: usize, source: usize, c: i64) {
        self.entries.entry(o).or_default().push((target, source, c));
    }

    fn piece(&mut self, piece: Piece) {
        use Op::*;
        let dd = |p, q| Slot::D { p, q };
        match piece {
            Piece::Dot => {
                let e = self.add(dd(0, 0));
                let x = self.add(Slot::X { q: 0 });
                let y = self.add(Slot::Y { p: 0 });
                self.set(I, e, x, 1);
                self.set(P, x, e, 1);
                self.set(J, e, y, 1);
                self.set(Qm, y, e, 1);
            }
            Piece::Square { p, q } => {
                let s = self.add(dd(p, q));
                let a = self.add(dd(p, q + 1));
                let b = self.add(dd(p + 1, q));
                let c = self.add(dd(p + 1, q + 1));
                self.set(D, a, s, 1);
                self.set(Delta, b, s, 1);
                self.set(Delta, c, a, 1);
                self.set(D, c, b, -1);
                self.set(H, s, b, 1);
                self.set(H, a, c, 1);
                self.set(K, s, a, 1);
                self.set(K, b, c, -1);
            }
            Piece::VerticalPair { q } => {
                let a = self.add(dd(0, q));
                let b = self.add(dd(0, q + 1));
                let xa = self.add(Slot::X { q });
                let xb = self.add(Slot::X { q: q + 1 });
                self.set(D, b, a, 1);
                self.set(DX, xb, xa, 1);
                self.set(I, a, xa, 1);
                self.set(I, b, xb, 1);
                self.set(P, xa, a, 1);
                self.set(P, xb, b, 1);
                self.set(K, a, b, 1);
            }
            Piece::HorizontalPair { p } => {
                let a = self.add(dd(p, 0));
                let b = self.add(dd(p + 1, 0));
                let ya = self.add(Slot::Y { p });
                let yb = self.add(Slot::Y { p: p + 1 });
                self.set(Delta, b, a, 1);
                self.set(DY, yb, ya, 1);
                self.set(J, a, ya, 1);
                self.set(J, b, yb, 1);
                self.set(Qm, ya, a, 1);
                self.set(Qm, yb, b, 1);
                self.set(H, a, b, 1);
            }
            Piece::Staircase { q } => {
                let sinks: Vec<usize> = (0..=q).map(|i| self.add(dd(i, q - i))).collect();
                let sources: Vec<usize> = (0..q).map(|i| self.add(dd(i, q - 1 - i))).collect();
                let x = self.add(Slot::X { q });
                let y = self.add(Slot::Y { p: q });
                for i in 0..q {
                    self.set(D, sinks[i], sources[i], 1);
                    self.set(Delta, sinks[i + 1], sources[i], 1);
                    self.set(H, sources[i], sinks[i + 1], 1);
                    self.set(K, sources[i], sinks[i], 1);
                }
                self.set(I, sinks[0], x, 1);
                self.set(P, x, sinks[0], 1);
                self.set(J, sinks[q], y, 1);
                self.set(Qm, y, sinks[q], 1);
            }
            Piece::Linked => {
                let a1 = self.add(dd(0, 0));
                let a2 = self.add(dd(0, 1));
                let e = self.add(dd(0, 0));
                let b = self.add(dd(1, 0));
                let x1 = self.add(Slot::X { q: 0 });
                let x2 = self.add(Slot::X { q: 1 });
                let y1 = self.add(Slot::Y { p: 0 });
                let y2 = self.add(Slot::Y { p: 1 });
                self.set(D, a2, a1, 1);
                self.set(Delta, b, e, 1);
                self.set(DX, x2, x1, 1);
                self.set(DY, y2, y1, 1);
                self.set(I, a1, x1, 1);
                self.set(I, a2, x2, 1);
                self.set(P, x1, a1, 1);
                self.set(P, x2, a2, 1);
                self.set(P, x1, e, -1);
                self.set(J, e, y1, 1);
                self.set(J, b, y2, 1);
                self.set(Qm, y1, e, 1);
                self.set(Qm, y2, b, 1);
                self.set(Qm, y1, a1, -1);
                self.set(H, e, b, 1);
                self.set(H, a1, b, 1);
                self.set(K, a1, a2, 1);
                self.set(K, e, a2, 1);
            }
        }
    }

    fn finish(self, cols: usize, rows: usize) -> Result<(Layout, BTreeMap<Op, Matrix<Q>>)> {
        let mut d_dims = vec![vec![0; rows]; cols];
        let mut x_dims = vec![0; rows];
        let mut y_dims = vec![0; cols];
        let mut local = Vec::with_capacity(self.elems.len());
        for s in &self.elems {
            let slot = match *s {
                Slot::D { p, q } => &mut d_dims[p][q],
                Slot::X { q } => &mut x_dims[q],
                Slot::Y { p } => &mut y_dims[p],
            };
            local.push(*slot);
            *slot += 1;
        }
        let layout = Layout::new(d_dims, x_dims, y_dims)?;
        let global: Vec<usize> = self
            .elems
            .iter()
            .zip(&local)
            .map(|(s, l)| layout.offset(*s).expect("slot") + l)
            .collect();
        let mut ops = BTreeMap::new();
        for o in Op::ALL {
            let mut m = Matrix::<Q>::zeros(layout.total, layout.total);
            for &(t, s, c) in self.entries.get(&o).map(Vec::as_slice).unwrap_or(&[]) {
                let v = m.get(global[t], global[s]).clone() + Q::from_i64(c);
                m.set(global[t], global[s], v);
            }
            ops.insert(o, m);
        }
        Ok((layout, ops))
    }
}

/// Assembles an instance from pieces in canonical bases (no scrambling).
pub fn build_from_pieces(cols: usize, rows: usize, pieces: &[Piece]) -> Result<AugmentedData> {
    let mut b = Builder::default();
    for &piece in pieces {
        if piece.cells().iter().any(|&(p, q)| p >= cols || q >= rows) {
            return Err(Error::InvalidDimension(format!(
                "{piece:?} does not fit a {cols}x{rows} grid"
            )));
        }
        b.piece(piece);
    }
    let (layout, ops) = b.finish(cols, rows)?;
    let data = AugmentedData { layout, ops };
    data.validate()?;
    Ok(data)
}

/// `D = X = Y = Q^m` concentrated in bidegree `(0,0)`, everything the identity.
pub fn trivial_instance(m: usize) -> Result<AugmentedData> {
    build_from_pieces(1, 1, &vec![Piece::Dot; m])
}

/// Knobs for [`synthesize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthOptions {
    pub cols: usize,
    pub rows: usize,
    pub max_dim: usize,
    /// Only pieces compatible with `h∘k = 0`, `p∘k = 0`, and no gauge moves.
    pub hk0: bool,
    /// Keep `k∘k = 0` (skip the vertical gauge move).
    pub kk_zero: bool,
    /// Scramble bases by random invertible matrices per slot.
    pub scramble: bool,
}

impl SynthOptions {
    pub fn new(cols: usize, rows: usize, max_dim: usize) -> Self {
        Self {
            cols,
            rows,
            max_dim,
            hk0: false,
            kk_zero: true,
            scramble: true,
        }
    }
}

/// Random valid instance on a `grid_size × grid_size` grid with fibers of
/// dimension at most `max_dim`.
pub fn synthesize_instance(seed: u64, grid_size: usize, max_dim: usize) -> Result<AugmentedData> {
    synthesize(seed, SynthOptions::new(grid_size, grid_size, max_dim))
}

/// Random valid instance: a direct sum of [`Piece`]s, optionally gauged
/// (`h ↦ h + δs − sδ`, `k ↦ k + dt − td`) and scrambled.
pub fn synthesize(seed: u64, opts: SynthOptions) -> Result<AugmentedData> {
    let SynthOptions {
        cols,
        rows,
        max_dim,
        ..
    } = opts;
    if cols == 0 || rows == 0 || max_dim == 0 {
        return Err(Error::InvalidDimension("grid and max_dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fill = vec![vec![0usize; rows]; cols];
    let mut pieces = Vec::new();
    let attempts = 6 * cols * rows;
    for _ in 0..attempts {
        let piece = random_piece(&mut rng, cols, rows, opts.hk0);
        let Some(piece) = piece else { continue };
        let cells = piece.cells();
        let mut need = vec![vec![0usize; rows]; cols];
        for &(p, q) in &cells {
            need[p][q] += 1;
        }
        let fits = (0..cols).all(|p| (0..rows).all(|q| fill[p][q] + need[p][q] <= max_dim));
        if fits {
            for p in 0..cols {
                for q in 0..rows {
                    fill[p][q] += need[p][q];
                }
            }
            pieces.push(piece);
        }
    }
    let mut data = build_from_pieces(cols, rows, &pieces)?;
    if !opts.hk0 {
        gauge(&mut data, &mut rng, Op::H);
        if !opts.kk_zero {
            gauge(&mut data, &mut rng, Op::K);
        }
    }
    if opts.scramble {
        scramble(&mut data, &mut rng);
    }
    data.validate()?;
    Ok(data)
}

fn random_piece(rng: &mut ChaCha8Rng, cols: usize, rows: usize, hk0: bool) -> Option<Piece> {
    let kind = rng.random_range(0..6);
    let piece = match kind {
        0 => Piece::Dot,
        1 if cols >= 2 && rows >= 2 => Piece::Square {
            p: rng.random_range(0..cols - 1),
            q: rng.random_range(0..rows - 1),
        },
        2 if rows >= 2 => Piece::VerticalPair {
            q: rng.random_range(0..rows - 1),
        },
        3 if cols >= 2 => Piece::HorizontalPair {
            p: rng.random_range(0..cols - 1),
        },
        4 => Piece::Staircase {
            q: rng.random_range(0..cols.min(rows)),
        },
        5 if cols >= 2 && rows >= 2 => Piece::Linked,
        _ => return None,
    };
    if hk0 && !piece.respects_hk0() {
        return None;
    }
    Some(piece)
}

fn small_int(rng: &mut ChaCha8Rng) -> Q {
    Q::from_i64(rng.random_range(-2..=2))
}

/// Adds `δs − sδ` to `h` (`s` of bidegree (−2,0)) or `dt − td` to `k`
/// (`t` of bidegree (0,−2)); both preserve the homotopy identities.
fn gauge(data: &mut AugmentedData, rng: &mut ChaCha8Rng, o: Op) {
    let l = data.layout.clone();
    let mut s = Matrix::<Q>::zeros(l.total, l.total);
    for p in 0..l.cols {
        for q in 0..l.rows {
            let (tp, tq) = match o {
                Op::H if p >= 2 => (p - 2, q),
                Op::K if q >= 2 => (p, q - 2),
                _ => continue,
            };
            let (t, src) = (Slot::D { p: tp, q: tq }, Slot::D { p, q });
            let b = Matrix::from_fn(l.dim(t), l.dim(src), |_, _| small_int(rng));
            l.set_block(&mut s, t, src, &b);
        }
    }
    let diff = if o == Op::H { data.op(Op::Delta) } else { data.op(Op::D) };
    let shift = diff.mul(&s).sub(&s.mul(&diff));
    let cur = data.op(o);
    data.ops.insert(o, cur.add(&shift));
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> (Matrix<Q>, Matrix<Q>) {
    loop {
        let m = Matrix::from_fn(n, n, |r, c| {
            let v = small_int(rng);
            if r == c {
                v + Q::one()
            } else {
                v
            }
        });
        if let Some(inv) = m.inverse() {
            return (m, inv);
        }
    }
}

/// Conjugates every operator by a random block-diagonal change of basis.
fn scramble(data: &mut AugmentedData, rng: &mut ChaCha8Rng) {
    let l = data.layout.clone();
    let mut s = Matrix::zeros(l.total, l.total);
    let mut s_inv = Matrix::zeros(l.total, l.total);
    for slot in l.slots().collect::<Vec<_>>() {
        let n = l.dim(slot);
        if n == 0 {
            continue;
        }
        let (m, inv) = random_invertible(rng, n);
        l.set_block(&mut s, slot, slot, &m);
        l.set_block(&mut s_inv, slot, slot, &inv);
    }
    for m in data.ops.values_mut() {
        *m = s.mul(m).mul(&s_inv);
    }
}
