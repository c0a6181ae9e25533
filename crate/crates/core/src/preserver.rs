//! Linear maps on `I(X, K)` and the invertibility-preserver predicates.
//!
//! A [`LinearMap`] is a `d x d` matrix in the canonical basis order, column
//! `j` holding the image of the `j`-th basis element. A [`PreserverSpec`] is
//! the normal form `(λ, ψ)`: over `|K| > 2`, `λ` is a Boolean endomorphism of
//! `P(X)` given by a partition and `φ(α)_{yy} = α_{xx}` for `y ∈ A_x`; over
//! `Z_2`, `λ` is an additive endomorphism of `(P(X), △)` fixing `X` and
//! `φ(α)_D = e_{λ(L_1(α))}`. In both cases the diagonal block of `φ` is the
//! 0/1 matrix with `M[y][x] = [y ∈ λ({x})]` and the radical rows are `ψ`.
//!
//! # Deciding invertibility preservation over a finite field
//!
//! Write `φ(α)_D = A α_D + B α_J` where `A` is the diagonal-to-diagonal block
//! and `B` the radical-to-diagonal block. If some `B[x][j] ≠ 0`, then for any
//! unit `u` the element `u + k e_j` is again a unit for every `k`, while
//! `φ(u + k e_j)_{xx} = φ(u)_{xx} + k B[x][j]` vanishes for
//! `k = -φ(u)_{xx} / B[x][j]`. So `B = 0` is necessary, and this needs only
//! that `K` has an inverse for `B[x][j]`, which holds in any field. Once
//! `B = 0`, `φ(α)_D` depends on `α_D` alone and it suffices to test every
//! diagonal vector in `(K \ {0})^{|X|}`. The same reduction makes strongness
//! decidable from the `q^{|X|}` diagonal patterns.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FIElement};
use crate::boolean_endo::{
    EndoError, PartitionEndo, Subset, SubsetMap, SubsetMapTable, XorEndo,
};
use crate::field::{Cardinality, FieldDesc, FieldError, Scalar};
use crate::gates::{self, GateError};
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreserverError {
    #[error("map and element live over different posets or fields")]
    Mismatch,
    #[error("matrix has {rows} rows of lengths {cols:?}; expected {expected} x {expected}")]
    WrongDimension { rows: usize, cols: Vec<usize>, expected: usize },
    #[error("{0} requires a finite prime field")]
    InfiniteField(&'static str),
    #[error("psi image must lie in the radical: row for `{0}` is nonzero")]
    PsiNotRadical(String),
    #[error("psi must annihilate delta")]
    PsiDoesNotAnnihilateDelta,
    #[error("lambda regime does not match the field: {0}")]
    RegimeMismatch(String),
    #[error(
        "phi(e_A) has diagonal value {value} at `{element}` for A = {set}; an invertibility \
         preserver only has values in {{0,1}} [from-vf-to-lb]"
    )]
    DiagonalValue { set: String, element: String, value: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// All `len`-tuples over `values`, last position fastest.
pub(crate) fn tuples(values: &[Scalar], len: usize) -> impl Iterator<Item = Vec<Scalar>> + '_ {
    let total = if values.is_empty() && len > 0 { 0 } else { values.len().pow(len as u32) };
    (0..total).map(move |mut i| {
        let mut t = vec![values[0].clone(); len];
        for slot in t.iter_mut().rev() {
            *slot = values[i % values.len()].clone();
            i /= values.len();
        }
        t
    })
}

#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    poset: Arc<Poset>,
    field: FieldDesc,
    dim: usize,
    entries: Vec<Scalar>,
}

impl Hash for LinearMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.entries.hash(state);
    }
}

impl LinearMap {
    pub fn zero(poset: &Arc<Poset>, field: FieldDesc) -> Self {
        let dim = poset.basis_len();
        LinearMap { poset: poset.clone(), field, dim, entries: vec![field.zero(); dim * dim] }
    }

    pub fn identity(poset: &Arc<Poset>, field: FieldDesc) -> Self {
        let mut m = Self::zero(poset, field);
        for i in 0..m.dim {
            m.entries[i * m.dim + i] = field.one();
        }
        m
    }

    pub fn from_rows(
        poset: &Arc<Poset>,
        field: FieldDesc,
        rows: Vec<Vec<Scalar>>,
    ) -> Result<Self, PreserverError> {
        let dim = poset.basis_len();
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(PreserverError::WrongDimension {
                rows: rows.len(),
                cols: rows.iter().map(Vec::len).collect(),
                expected: dim,
            });
        }
        let entries: Vec<Scalar> = rows.into_iter().flatten().collect();
        if let Some(bad) = entries.iter().find(|s| s.field() != field) {
            return Err(FieldError::Mismatch(field, bad.field()).into());
        }
        Ok(LinearMap { poset: poset.clone(), field, dim, entries })
    }

    /// Row-major entries given as canonical residues of a prime field.
    pub fn from_residues(poset: &Arc<Poset>, field: FieldDesc, residues: &[u32]) -> Self {
        let dim = poset.basis_len();
        assert_eq!(residues.len(), dim * dim);
        LinearMap {
            poset: poset.clone(),
            field,
            dim,
            entries: residues.iter().map(|&v| field.element(v)).collect(),
        }
    }

    /// The map sending the `j`-th basis element to `image(j)`.
    pub fn from_basis_images(
        poset: &Arc<Poset>,
        field: FieldDesc,
        image: impl Fn(usize) -> FIElement,
    ) -> Result<Self, PreserverError> {
        let mut m = Self::zero(poset, field);
        for j in 0..m.dim {
            let img = image(j);
            if img.field() != field || **img.poset() != **poset {
                return Err(PreserverError::Mismatch);
            }
            for (i, c) in img.coeffs().iter().enumerate() {
                m.entries[i * m.dim + j] = c.clone();
            }
        }
        Ok(m)
    }

    /// `e_{xy} ↦ e_{σ(y)σ(x)}` for an order-reversing bijection `σ` of `X`.
    pub fn anti_automorphism(
        poset: &Arc<Poset>,
        field: FieldDesc,
        sigma: &[usize],
    ) -> Result<Self, PreserverError> {
        let n = poset.len();
        let mut seen = vec![false; n];
        let bijective = sigma.len() == n
            && sigma.iter().all(|&s| s < n && !std::mem::replace(&mut seen[s], true));
        if !bijective
            || (0..n).any(|x| (0..n).any(|y| poset.leq(x, y) != poset.leq(sigma[y], sigma[x])))
        {
            return Err(PreserverError::Precondition(
                "sigma must be an order-reversing bijection".into(),
            ));
        }
        Self::from_basis_images(poset, field, |j| {
            let (x, y) = poset.basis_pair(j);
            FIElement::basis(poset, field, sigma[y], sigma[x]).expect("sigma reverses order")
        })
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: Scalar) {
        assert_eq!(value.field(), self.field);
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Scalar] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.dim)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Image of the `j`-th basis element.
    pub fn column(&self, j: usize) -> FIElement {
        let coeffs = (0..self.dim).map(|i| self.entry(i, j).clone()).collect();
        FIElement::from_coeffs(&self.poset, self.field, coeffs).expect("dimensions agree")
    }

    fn compatible(&self, a: &FIElement) -> Result<(), PreserverError> {
        if a.field() != self.field || **a.poset() != *self.poset {
            Err(PreserverError::Mismatch)
        } else {
            Ok(())
        }
    }

    pub fn apply(&self, a: &FIElement) -> Result<FIElement, PreserverError> {
        self.compatible(a)?;
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &FIElement) -> FIElement {
        let coeffs = self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(a.coeffs())
                    .filter(|(m, c)| !m.is_zero() && !c.is_zero())
                    .fold(self.field.zero(), |acc, (m, c)| &acc + &(m * c))
            })
            .collect();
        FIElement::from_coeffs(&self.poset, self.field, coeffs).expect("dimensions agree")
    }

    /// Diagonal output coordinates of `φ(v)` for a diagonal input `v`.
    fn diagonal_image(&self, diag: &[Scalar]) -> Vec<Scalar> {
        let n = self.poset.len();
        (0..n)
            .map(|y| {
                (0..n).fold(self.field.zero(), |acc, x| &acc + &(self.entry(y, x) * &diag[x]))
            })
            .collect()
    }

    pub fn scale(&self, k: &Scalar) -> LinearMap {
        LinearMap { entries: self.entries.iter().map(|e| e * k).collect(), ..self.clone() }
    }

    /// `φ(δ) = δ`.
    pub fn is_unital(&self) -> bool {
        let d = FIElement::delta(&self.poset, self.field);
        self.apply_unchecked(&d) == d
    }

    /// Rank over `K` by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let d = self.dim;
        let mut m: Vec<Vec<Scalar>> = self.rows().map(<[Scalar]>::to_vec).collect();
        let mut rank = 0;
        for col in 0..d {
            let Some(p) = (rank..d).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].inv().expect("pivot is nonzero");
            let pivot: Vec<Scalar> = m[rank].iter().map(|v| v * &inv).collect();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, p) in row.iter_mut().zip(&pivot) {
                        *v = &*v - &(&f * p);
                    }
                }
            }
            m[rank] = pivot;
            rank += 1;
        }
        rank
    }

    pub fn is_bijective(&self) -> bool {
        self.rank() == self.dim
    }

    /// The radical-to-radical block as its own map restricted to `J`; its
    /// invertibility is the bijectivity of `ψ|_J : J → J`.
    pub fn radical_block_rank(&self) -> usize {
        let n = self.poset.len();
        let m = self.dim - n;
        let mut sub = LinearMap::zero(&self.poset, self.field);
        for i in 0..m {
            for j in 0..m {
                sub.entries[i * self.dim + j] = self.entry(n + i, n + j).clone();
            }
        }
        sub.rank()
    }

    /// First diagonal output row with a nonzero radical input column.
    pub fn radical_to_diagonal_entry(&self) -> Option<(usize, usize)> {
        let n = self.poset.len();
        (0..n).find_map(|x| (n..self.dim).find(|&j| !self.entry(x, j).is_zero()).map(|j| (x, j)))
    }

    fn require_finite(&self, op: &'static str) -> Result<Vec<Scalar>, PreserverError> {
        self.field.enumerate().map_err(|_| PreserverError::InfiniteField(op))
    }

    /// A unit whose image is not a unit, if any.
    pub fn invertibility_witness(&self) -> Result<Option<FIElement>, PreserverError> {
        let values = self.require_finite("preserves_invertibility")?;
        let n = self.poset.len() as u64;
        gates::check("preserves_invertibility", n as u128, gates::PRESERVER_ELEMENTS)?;
        let delta = FIElement::delta(&self.poset, self.field);
        if let Some((x, j)) = self.radical_to_diagonal_entry() {
            let c = self.apply_unchecked(&delta).diag(x).clone();
            let k = -&c.div(self.entry(x, j))?;
            let e_j = FIElement::basis_vector(&self.poset, self.field, j);
            let beta = delta.add(&e_j.scale(&k)?)?;
            debug_assert!(self.apply_unchecked(&beta).diag(x).is_zero());
            return Ok(Some(beta));
        }
        for v in tuples(&values[1..], self.poset.len()) {
            if self.diagonal_image(&v).iter().any(Scalar::is_zero) {
                return Ok(Some(FIElement::diagonal(&self.poset, &v)?));
            }
        }
        Ok(None)
    }

    /// Exact decision of `φ(U) ⊆ U` over a prime field.
    pub fn preserves_invertibility(&self) -> Result<bool, PreserverError> {
        Ok(self.invertibility_witness()?.is_none())
    }

    fn require_preserver(&self, op: &str) -> Result<Vec<Scalar>, PreserverError> {
        if let Some(w) = self.invertibility_witness()? {
            return Err(PreserverError::Precondition(format!(
                "{op} needs an invertibility preserver; {w} is a unit mapped to a non-unit"
            )));
        }
        self.field.enumerate().map_err(Into::into)
    }

    /// A non-unit whose image is a unit, if any.
    pub fn strongness_witness(&self) -> Result<Option<FIElement>, PreserverError> {
        let values = self.require_preserver("is_strong")?;
        for v in tuples(&values, self.poset.len()) {
            if v.iter().any(Scalar::is_zero)
                && self.diagonal_image(&v).iter().all(|c| !c.is_zero())
            {
                return Ok(Some(FIElement::diagonal(&self.poset, &v)?));
            }
        }
        Ok(None)
    }

    /// `φ(U) = U`, i.e. `φ(α) ∈ U ⇒ α ∈ U`.
    pub fn is_strong(&self) -> Result<bool, PreserverError> {
        Ok(self.strongness_witness()?.is_none())
    }

    /// A unit `u` with `φ(u⁻¹) ≠ φ(u)⁻¹`, if any.
    pub fn inverse_witness(&self) -> Result<Option<FIElement>, PreserverError> {
        let values = self.require_preserver("preserves_inverses")?;
        let n = self.poset.len();
        let m = self.dim - n;
        let q = values.len() as u64;
        gates::check("preserves_inverses", n as u128, gates::INVERSE_ELEMENTS)?;
        gates::check(
            "preserves_inverses",
            gates::pow(q - 1, n as u64) * gates::pow(q, m as u64),
            gates::ENUMERATION,
        )?;
        for diag in tuples(&values[1..], n) {
            for rad in tuples(&values, m) {
                let mut coeffs = diag.clone();
                coeffs.extend(rad);
                let u = FIElement::from_coeffs(&self.poset, self.field, coeffs)?;
                let lhs = self.apply_unchecked(&u.invert()?);
                let rhs = self.apply_unchecked(&u).invert()?;
                if lhs != rhs {
                    return Ok(Some(u));
                }
            }
        }
        Ok(None)
    }

    pub fn preserves_inverses(&self) -> Result<bool, PreserverError> {
        Ok(self.inverse_witness()?.is_none())
    }

    /// A basis pair `(i, j)`, `i <= j`, with `φ(b_i ∘ b_j) ≠ φ(b_i) ∘ φ(b_j)`.
    pub fn jordan_witness(&self) -> Option<(usize, usize)> {
        let cols: Vec<FIElement> = (0..self.dim).map(|j| self.column(j)).collect();
        let basis: Vec<FIElement> = (0..self.dim)
            .map(|j| FIElement::basis_vector(&self.poset, self.field, j))
            .collect();
        for i in 0..self.dim {
            for j in i..self.dim {
                let lhs = self.apply_unchecked(&basis[i].jordan_product(&basis[j]).unwrap());
                let rhs = cols[i].jordan_product(&cols[j]).unwrap();
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `φ(a ∘ b) = φ(a) ∘ φ(b)`; checking basis pairs suffices by bilinearity.
    pub fn is_jordan_endo(&self) -> bool {
        self.jordan_witness().is_none()
    }

    /// An idempotent whose image is not idempotent, scanning either every
    /// idempotent (when the candidate count is within the gate) or the
    /// spanning family `{e_A} ∪ {e_x + e_{xy}} ∪ {e_y + e_{xy}}`.
    pub fn idempotent_witness(&self) -> Result<Option<FIElement>, PreserverError> {
        let family = match idempotents(&self.poset, self.field) {
            Ok(all) => all,
            Err(PreserverError::Gate(_)) => spanning_idempotents(&self.poset, self.field),
            Err(e) => return Err(e),
        };
        Ok(family.into_iter().find(|e| !self.apply_unchecked(e).is_idempotent()))
    }

    pub fn preserves_idempotents(&self) -> Result<bool, PreserverError> {
        Ok(self.idempotent_witness()?.is_none())
    }

    /// `λ(A) = {x : φ(e_A)_{xx} = 1}`; fails if a diagonal value leaves `{0, 1}`.
    pub fn extract_lambda(&self) -> Result<SubsetMapTable, PreserverError> {
        let n = self.poset.len();
        for a in Subset::all(n) {
            let img = self.diagonal_image(
                FIElement::indicator(&self.poset, self.field, a).diagonal_values(),
            );
            if let Some(x) = (0..n).find(|&x| !img[x].is_zero() && !img[x].is_one()) {
                return Err(PreserverError::DiagonalValue {
                    set: a.display(&self.poset).to_string(),
                    element: self.poset.label(x).to_string(),
                    value: img[x].to_string(),
                });
            }
        }
        Ok(SubsetMapTable::from_fn(n, |a| {
            let img = self.diagonal_image(
                FIElement::indicator(&self.poset, self.field, a).diagonal_values(),
            );
            Subset::from_indices(n, (0..n).filter(|&x| img[x].is_one()))
        })?)
    }

    /// `ψ(α) = φ(α)_J`: the diagonal output rows zeroed.
    pub fn extract_psi(&self) -> LinearMap {
        let mut psi = self.clone();
        let n = self.poset.len();
        for x in 0..n {
            for j in 0..self.dim {
                psi.entries[x * self.dim + j] = self.field.zero();
            }
        }
        psi
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LinearMap over {} ({}x{})", self.field, self.dim, self.dim)?;
        for row in self.rows() {
            let r: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "  {}", r.join(" "))?;
        }
        Ok(())
    }
}

/// Every idempotent of `I(X, K)` over a prime field. An idempotent has a 0/1
/// diagonal, so only the `2^{|X|} q^m` such elements are scanned.
pub fn idempotents(poset: &Arc<Poset>, field: FieldDesc) -> Result<Vec<FIElement>, PreserverError> {
    let values = field
        .enumerate()
        .map_err(|_| PreserverError::InfiniteField("idempotent enumeration"))?;
    let n = poset.len();
    let m = poset.strict_pairs().len();
    gates::check(
        "idempotent enumeration",
        gates::pow(2, n as u64) * gates::pow(values.len() as u64, m as u64),
        gates::ENUMERATION,
    )?;
    let mut out = Vec::new();
    for a in Subset::all(n) {
        let diag = FIElement::indicator(poset, field, a);
        for rad in tuples(&values, m) {
            let mut coeffs = diag.diagonal_values().to_vec();
            coeffs.extend(rad);
            let e = FIElement::from_coeffs(poset, field, coeffs)?;
            if e.is_idempotent() {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// The idempotents `e_A`, `e_x + e_{xy}`, `e_y + e_{xy}`; they span `I(X, K)`.
pub fn spanning_idempotents(poset: &Arc<Poset>, field: FieldDesc) -> Vec<FIElement> {
    let n = poset.len();
    let mut out: Vec<FIElement> =
        Subset::all(n).map(|a| FIElement::indicator(poset, field, a)).collect();
    for &(x, y) in poset.strict_pairs() {
        let exy = FIElement::basis(poset, field, x, y).unwrap();
        for z in [x, y] {
            let ez = FIElement::basis(poset, field, z, z).unwrap();
            out.push(ez.add(&exy).unwrap());
        }
    }
    out
}

/// The `λ` half of a normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Lambda {
    Partition(PartitionEndo),
    Xor(XorEndo),
}

impl Lambda {
    pub fn ambient(&self) -> usize {
        match self {
            Lambda::Partition(p) => p.ambient(),
            Lambda::Xor(x) => x.ambient(),
        }
    }

    /// Whether `y ∈ λ({x})`.
    pub fn contains(&self, y: usize, x: usize) -> bool {
        match self {
            Lambda::Partition(p) => p.blocks()[x].contains(y),
            Lambda::Xor(m) => m.entry(y, x),
        }
    }

    pub fn image(&self, a: Subset) -> Subset {
        match self {
            Lambda::Partition(p) => p.image(a),
            Lambda::Xor(x) => x.image(a),
        }
    }

    pub fn is_injective(&self) -> bool {
        match self {
            Lambda::Partition(p) => p.is_injective(),
            Lambda::Xor(x) => x.is_injective(),
        }
    }

    pub fn is_automorphism(&self) -> bool {
        match self {
            Lambda::Partition(p) => p.automorphism().is_some(),
            Lambda::Xor(x) => x.automorphism().is_some(),
        }
    }

    /// `lambda: ...` or `xor-lambda: ...` line.
    pub fn display(&self, poset: &Poset) -> String {
        match self {
            Lambda::Partition(p) => format!("lambda: {}", p.display(poset)),
            Lambda::Xor(x) => format!("xor-lambda: {}", x.display(poset)),
        }
    }
}

/// The pair `(λ, ψ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreserverSpec {
    lambda: Lambda,
    psi: LinearMap,
}

impl PreserverSpec {
    pub fn new(lambda: Lambda, psi: LinearMap) -> Result<Self, PreserverError> {
        let poset = psi.poset().clone();
        let n = poset.len();
        if lambda.ambient() != n {
            return Err(EndoError::SizeMismatch { expected: n, found: lambda.ambient() }.into());
        }
        match (&lambda, psi.field().cardinality()) {
            (Lambda::Xor(_), Cardinality::Two) | (Lambda::Partition(_), Cardinality::Finite(_))
            | (Lambda::Partition(_), Cardinality::Infinite) => {}
            (Lambda::Xor(_), _) => {
                return Err(PreserverError::RegimeMismatch(
                    "xor-lambda is only valid over Fp 2".into(),
                ))
            }
            (Lambda::Partition(_), Cardinality::Two) => {
                return Err(PreserverError::RegimeMismatch(
                    "over Fp 2 lambda must be given as xor-lambda".into(),
                ))
            }
        }
        if let Some(x) = (0..n).find(|&x| psi.row(x).iter().any(|c| !c.is_zero())) {
            return Err(PreserverError::PsiNotRadical(poset.label(x).to_string()));
        }
        if !psi.apply_unchecked(&FIElement::delta(&poset, psi.field())).is_zero() {
            return Err(PreserverError::PsiDoesNotAnnihilateDelta);
        }
        Ok(PreserverSpec { lambda, psi })
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn psi(&self) -> &LinearMap {
        &self.psi
    }

    pub fn poset(&self) -> &Arc<Poset> {
        self.psi.poset()
    }

    pub fn field(&self) -> FieldDesc {
        self.psi.field()
    }

    /// The map `φ` of the normal form.
    pub fn build(&self) -> LinearMap {
        let n = self.poset().len();
        let field = self.field();
        let mut phi = self.psi.clone();
        for y in 0..n {
            for x in 0..n {
                let v = if self.lambda.contains(y, x) { field.one() } else { field.zero() };
                phi.set_entry(y, x, v);
            }
        }
        phi
    }
}
