//! The incidence algebra `I(X, K)` of a finite poset.
//!
//! Elements are coefficient vectors in the poset's canonical basis order
//! (diagonal `e_x` first, then strict `e_{xy}`). For finite `X` every such
//! vector is finitary, so `FI(X, K) = I(X, K)`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::boolean_endo::Subset;
use crate::field::{FieldDesc, FieldError, Scalar};
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements live in different algebras (poset or field mismatch)")]
    Mismatch,
    #[error("no basis element e[{0},{1}]: {0} is not below {1}")]
    NotComparable(String, String),
    #[error("element is not a unit: diagonal coefficient at `{0}` is zero")]
    NotUnit(String),
    #[error("expected {expected} coefficients, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FIElement {
    poset: Arc<Poset>,
    field: FieldDesc,
    coeffs: Vec<Scalar>,
}

impl FIElement {
    pub fn zero(poset: &Arc<Poset>, field: FieldDesc) -> Self {
        FIElement {
            poset: poset.clone(),
            field,
            coeffs: vec![field.zero(); poset.basis_len()],
        }
    }

    /// `δ = Σ e_x`, the identity.
    pub fn delta(poset: &Arc<Poset>, field: FieldDesc) -> Self {
        Self::indicator(poset, field, Subset::full(poset.len()))
    }

    /// The idempotent `e_A = Σ_{x∈A} e_x`.
    pub fn indicator(poset: &Arc<Poset>, field: FieldDesc, a: Subset) -> Self {
        assert_eq!(a.ambient(), poset.len());
        let mut e = Self::zero(poset, field);
        for x in a.iter() {
            e.coeffs[x] = field.one();
        }
        e
    }

    /// `e_{xy}` (with `e_{xx} = e_x`).
    pub fn basis(
        poset: &Arc<Poset>,
        field: FieldDesc,
        x: usize,
        y: usize,
    ) -> Result<Self, AlgebraError> {
        let i = poset.basis_index(x, y).ok_or_else(|| {
            AlgebraError::NotComparable(poset.label(x).into(), poset.label(y).into())
        })?;
        Ok(Self::basis_vector(poset, field, i))
    }

    /// The `i`-th canonical basis element.
    pub fn basis_vector(poset: &Arc<Poset>, field: FieldDesc, i: usize) -> Self {
        let mut e = Self::zero(poset, field);
        e.coeffs[i] = field.one();
        e
    }

    /// Diagonal element with the given coefficients `α_{xx}`.
    pub fn diagonal(poset: &Arc<Poset>, diag: &[Scalar]) -> Result<Self, AlgebraError> {
        let field = diag.first().map(Scalar::field).ok_or(AlgebraError::WrongLength {
            expected: poset.len(),
            found: 0,
        })?;
        let mut coeffs = vec![field.zero(); poset.basis_len()];
        if diag.len() != poset.len() {
            return Err(AlgebraError::WrongLength { expected: poset.len(), found: diag.len() });
        }
        coeffs[..diag.len()].clone_from_slice(diag);
        Self::from_coeffs(poset, field, coeffs)
    }

    pub fn from_coeffs(
        poset: &Arc<Poset>,
        field: FieldDesc,
        coeffs: Vec<Scalar>,
    ) -> Result<Self, AlgebraError> {
        if coeffs.len() != poset.basis_len() {
            return Err(AlgebraError::WrongLength {
                expected: poset.basis_len(),
                found: coeffs.len(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|c| c.field() != field) {
            return Err(FieldError::Mismatch(field, bad.field()).into());
        }
        Ok(FIElement { poset: poset.clone(), field, coeffs })
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// `α_{xy}`, or `None` if `x ≰ y`.
    pub fn get(&self, x: usize, y: usize) -> Option<&Scalar> {
        self.poset.basis_index(x, y).map(|i| &self.coeffs[i])
    }

    pub fn diag(&self, x: usize) -> &Scalar {
        &self.coeffs[x]
    }

    pub fn diagonal_values(&self) -> &[Scalar] {
        &self.coeffs[..self.poset.len()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// True iff every diagonal coefficient vanishes, i.e. `α ∈ J`.
    pub fn is_radical(&self) -> bool {
        self.diagonal_values().iter().all(Scalar::is_zero)
    }

    pub fn same_algebra(&self, other: &FIElement) -> Result<(), AlgebraError> {
        if self.field == other.field
            && (Arc::ptr_eq(&self.poset, &other.poset) || self.poset == other.poset)
        {
            Ok(())
        } else {
            Err(AlgebraError::Mismatch)
        }
    }

    fn zip(&self, other: &FIElement, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> FIElement {
        FIElement {
            poset: self.poset.clone(),
            field: self.field,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &FIElement) -> Result<FIElement, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &FIElement) -> Result<FIElement, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn neg(&self) -> FIElement {
        self.map(|c| -c)
    }

    pub fn scale(&self, k: &Scalar) -> Result<FIElement, AlgebraError> {
        if k.field() != self.field {
            return Err(FieldError::Mismatch(self.field, k.field()).into());
        }
        Ok(self.map(|c| c * k))
    }

    fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> FIElement {
        FIElement {
            poset: self.poset.clone(),
            field: self.field,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Convolution `(αβ)_{xy} = Σ_{x≤z≤y} α_{xz} β_{zy}`.
    pub fn convolve(&self, other: &FIElement) -> Result<FIElement, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.convolve_unchecked(other))
    }

    fn convolve_unchecked(&self, other: &FIElement) -> FIElement {
        let p = &*self.poset;
        let n = p.len();
        let coeffs = (0..p.basis_len())
            .map(|i| {
                let (x, y) = p.basis_pair(i);
                let mut acc = self.field.zero();
                for z in 0..n {
                    if let (Some(a), Some(b)) = (p.basis_index(x, z), p.basis_index(z, y)) {
                        let (a, b) = (&self.coeffs[a], &other.coeffs[b]);
                        if !a.is_zero() && !b.is_zero() {
                            acc = &acc + &(a * b);
                        }
                    }
                }
                acc
            })
            .collect();
        FIElement { poset: self.poset.clone(), field: self.field, coeffs }
    }

    /// `α = α_D + α_J`.
    pub fn decompose(&self) -> (FIElement, FIElement) {
        let n = self.poset.len();
        let zero = self.field.zero();
        let split = |keep_diag: bool| FIElement {
            poset: self.poset.clone(),
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if (i < n) == keep_diag { c.clone() } else { zero.clone() })
                .collect(),
        };
        (split(true), split(false))
    }

    pub fn diagonal_part(&self) -> FIElement {
        self.decompose().0
    }

    pub fn radical_part(&self) -> FIElement {
        self.decompose().1
    }

    /// Units are exactly the elements with nonzero diagonal.
    pub fn is_unit(&self) -> bool {
        self.diagonal_values().iter().all(|c| !c.is_zero())
    }

    /// Inverse via `α = d(δ + ν)`, `ν = d⁻¹α_J` nilpotent:
    /// `α⁻¹ = (Σ_{k<c} (-ν)^k) d⁻¹` where `c` is the longest chain length.
    pub fn invert(&self) -> Result<FIElement, AlgebraError> {
        let n = self.poset.len();
        if let Some(x) = (0..n).find(|&x| self.coeffs[x].is_zero()) {
            return Err(AlgebraError::NotUnit(self.poset.label(x).to_string()));
        }
        let (d, rad) = self.decompose();
        let d_inv = d.map_diag_inverse()?;
        let neg_nu = d_inv.convolve_unchecked(&rad).neg();
        let mut term = FIElement::delta(&self.poset, self.field);
        let mut sum = term.clone();
        for _ in 1..self.poset.longest_chain() {
            term = term.convolve_unchecked(&neg_nu);
            sum = sum.zip(&term, |a, b| a + b);
        }
        Ok(sum.convolve_unchecked(&d_inv))
    }

    fn map_diag_inverse(&self) -> Result<FIElement, AlgebraError> {
        let n = self.poset.len();
        let mut out = self.clone();
        for c in &mut out.coeffs[..n] {
            *c = c.inv()?;
        }
        Ok(out)
    }

    /// `L_k(α) = {x : α_{xx} = k}`.
    pub fn level_set(&self, k: &Scalar) -> Subset {
        Subset::from_indices(
            self.poset.len(),
            (0..self.poset.len()).filter(|&x| self.coeffs[x] == *k),
        )
    }

    /// `a ∘ b = ab + ba`.
    pub fn jordan_product(&self, other: &FIElement) -> Result<FIElement, AlgebraError> {
        self.same_algebra(other)?;
        let ab = self.convolve_unchecked(other);
        let ba = other.convolve_unchecked(self);
        Ok(ab.zip(&ba, |a, b| a + b))
    }

    pub fn square(&self) -> FIElement {
        self.convolve_unchecked(self)
    }

    pub fn is_idempotent(&self) -> bool {
        self.square() == *self
    }

    /// Commutes with every canonical basis element.
    pub fn is_central(&self) -> bool {
        (0..self.poset.basis_len()).all(|i| {
            let b = FIElement::basis_vector(&self.poset, self.field, i);
            self.convolve_unchecked(&b) == b.convolve_unchecked(self)
        })
    }

    /// Writes `1*e[a] + 2*e[a,b]`; zero is `0`.
    fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let (x, y) = self.poset.basis_pair(i);
            if x == y {
                write!(f, "{c}*e[{}]", self.poset.label(x))?;
            } else {
                write!(f, "{c}*e[{},{}]", self.poset.label(x), self.poset.label(y))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Hash for FIElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.coeffs.hash(state);
    }
}

impl fmt::Display for FIElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)
    }
}

impl fmt::Debug for FIElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FIElement(")?;
        self.write_terms(f)?;
        write!(f, " over {})", self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<Poset> {
        Arc::new(Poset::builtin(&format!("chain:{n}")).unwrap())
    }

    fn el(p: &Arc<Poset>, f: FieldDesc, c: &[i64]) -> FIElement {
        FIElement::from_coeffs(p, f, c.iter().map(|&v| f.from_i64(v)).collect()).unwrap()
    }

    const Z3: FieldDesc = FieldDesc::Prime(3);

    #[test]
    fn basis_products() {
        let p = chain(3);
        let e = |x, y| FIElement::basis(&p, Z3, x, y).unwrap();
        assert_eq!(e(0, 1).convolve(&e(1, 2)).unwrap(), e(0, 2));
        assert!(e(1, 2).convolve(&e(0, 1)).unwrap().is_zero());
        assert!(matches!(
            FIElement::basis(&p, Z3, 2, 0),
            Err(AlgebraError::NotComparable(..))
        ));
    }

    #[test]
    fn hand_convolution_on_two_chain() {
        // coefficient order: e_1, e_2, e_12
        let p = chain(2);
        let a = el(&p, Z3, &[1, 2, 1]);
        let b = el(&p, Z3, &[2, 1, 0]);
        // (ab)_12 = a_11 b_12 + a_12 b_22 = 0 + 1
        assert_eq!(a.convolve(&b).unwrap(), el(&p, Z3, &[2, 2, 1]));
    }

    #[test]
    fn decomposition() {
        let p = chain(2);
        let d = FIElement::delta(&p, Z3);
        assert_eq!(d.decompose(), (d.clone(), FIElement::zero(&p, Z3)));
        let e12 = FIElement::basis(&p, Z3, 0, 1).unwrap();
        assert_eq!(e12.decompose(), (FIElement::zero(&p, Z3), e12.clone()));
        let a = el(&p, Z3, &[1, 2, 1]);
        assert_eq!(a.decompose(), (el(&p, Z3, &[1, 2, 0]), el(&p, Z3, &[0, 0, 1])));
    }

    #[test]
    fn unit_criterion() {
        let p = chain(2);
        assert!(FIElement::delta(&p, Z3).is_unit());
        assert!(el(&p, Z3, &[1, 1, 1]).is_unit());
        assert!(!FIElement::basis(&p, Z3, 0, 0).unwrap().is_unit());
    }

    #[test]
    fn inversion_examples() {
        let p = chain(2);
        let u = el(&p, Z3, &[1, 1, 1]);
        assert_eq!(u.invert().unwrap(), el(&p, Z3, &[1, 1, 2]));
        let a = el(&p, Z3, &[2, 1, 1]);
        assert_eq!(a.invert().unwrap(), a);
        let d = FIElement::delta(&p, Z3);
        assert_eq!(d.invert().unwrap(), d);
        assert_eq!(
            FIElement::basis(&p, Z3, 0, 0).unwrap().invert(),
            Err(AlgebraError::NotUnit("2".into()))
        );
    }

    #[test]
    fn inverse_by_exhaustive_search() {
        // independent oracle: search all q^3 candidates for the two-sided inverse
        let p = chain(2);
        let a = el(&p, Z3, &[2, 1, 1]);
        let d = FIElement::delta(&p, Z3);
        let mut found = Vec::new();
        for i in 0..27 {
            let b = el(&p, Z3, &[i % 3, i / 3 % 3, i / 9]);
            if a.convolve(&b).unwrap() == d && b.convolve(&a).unwrap() == d {
                found.push(b);
            }
        }
        assert_eq!(found, vec![el(&p, Z3, &[2, 1, 1])]);
    }

    #[test]
    fn level_sets() {
        let p = Arc::new(Poset::builtin("antichain:3").unwrap());
        let d = FIElement::delta(&p, Z3);
        assert!(d.level_set(&Z3.one()).is_full());
        let a = Subset::from_indices(3, [0, 2]);
        let ea = FIElement::indicator(&p, Z3, a);
        assert_eq!(ea.level_set(&Z3.zero()), a.complement());
        let x = el(&p, Z3, &[1, 2, 0]);
        assert_eq!(x.level_set(&Z3.from_i64(2)), Subset::singleton(3, 1));
    }

    #[test]
    fn indicators() {
        let p = chain(3);
        assert_eq!(
            FIElement::indicator(&p, Z3, Subset::full(3)),
            FIElement::delta(&p, Z3)
        );
        assert!(FIElement::indicator(&p, Z3, Subset::empty(3)).is_zero());
    }

    #[test]
    fn jordan_products() {
        let p = chain(2);
        for f in [FieldDesc::Prime(2), Z3] {
            let e1 = FIElement::basis(&p, f, 0, 0).unwrap();
            let e12 = FIElement::basis(&p, f, 0, 1).unwrap();
            assert_eq!(e1.jordan_product(&e12).unwrap(), e12);
            let a = el(&p, f, &[1, 2, 1]);
            let two = f.from_i64(2);
            assert_eq!(a.jordan_product(&a).unwrap(), a.square().scale(&two).unwrap());
            let d = FIElement::delta(&p, f);
            assert_eq!(d.jordan_product(&a).unwrap(), a.scale(&two).unwrap());
        }
        let z2 = FieldDesc::Prime(2);
        let a = el(&p, z2, &[1, 1, 1]);
        assert!(a.jordan_product(&a).unwrap().is_zero());
    }

    #[test]
    fn idempotents() {
        let p = chain(3);
        for a in Subset::all(3) {
            assert!(FIElement::indicator(&p, Z3, a).is_idempotent());
        }
        let e = el(&p, Z3, &[1, 0, 0, 1, 0, 0]);
        assert!(e.is_idempotent());
        let q = chain(2);
        let u = el(&q, Z3, &[1, 1, 1]);
        assert_eq!(u.square(), el(&q, Z3, &[1, 1, 2]));
        assert!(!u.is_idempotent());
    }

    #[test]
    fn center() {
        let p = chain(2);
        assert!(FIElement::delta(&p, Z3).scale(&Z3.from_i64(2)).unwrap().is_central());
        assert!(!FIElement::basis(&p, Z3, 0, 0).unwrap().is_central());
        // connected poset: central elements are exactly the scalar multiples of δ
        for i in 0..27 {
            let a = el(&p, Z3, &[i % 3, i / 3 % 3, i / 9]);
            let scalar = a.coeffs()[2].is_zero() && a.coeffs()[0] == a.coeffs()[1];
            assert_eq!(a.is_central(), scalar, "{a}");
        }
    }

    #[test]
    fn mismatch_rejected() {
        let a = FIElement::delta(&chain(2), Z3);
        let b = FIElement::delta(&chain(3), Z3);
        let c = FIElement::delta(&chain(2), FieldDesc::Prime(5));
        assert_eq!(a.convolve(&b), Err(AlgebraError::Mismatch));
        assert_eq!(a.add(&c), Err(AlgebraError::Mismatch));
    }

    #[test]
    fn display() {
        let p = chain(2);
        assert_eq!(el(&p, Z3, &[1, 2, 1]).to_string(), "1*e[1] + 2*e[2] + 1*e[1,2]");
        assert_eq!(FIElement::zero(&p, Z3).to_string(), "0");
    }
}
