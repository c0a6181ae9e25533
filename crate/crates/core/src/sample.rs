//! Seeded random scalars, elements and preserver specs.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::FIElement;
use crate::boolean_endo::{
    count_partition_endos, count_xor_endos, partition_endo_at, xor_endo_at,
};
use crate::field::{FieldDesc, Scalar};
use crate::poset::Poset;
use crate::preserver::{Lambda, LinearMap, PreserverSpec};

/// Uniform over a prime field; over `Q`, `a/b` with `|a| <= 9`, `1 <= b <= 5`.
pub fn scalar<R: Rng>(field: FieldDesc, rng: &mut R) -> Scalar {
    match field {
        FieldDesc::Prime(p) => field.element(rng.gen_range(0..p)),
        FieldDesc::Rationals => field
            .fraction(rng.gen_range(-9..=9), rng.gen_range(1..=5))
            .expect("nonzero denominator"),
    }
}

pub fn nonzero_scalar<R: Rng>(field: FieldDesc, rng: &mut R) -> Scalar {
    loop {
        let s = scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn element<R: Rng>(poset: &Arc<Poset>, field: FieldDesc, rng: &mut R) -> FIElement {
    let coeffs = (0..poset.basis_len()).map(|_| scalar(field, rng)).collect();
    FIElement::from_coeffs(poset, field, coeffs).expect("length matches")
}

pub fn unit<R: Rng>(poset: &Arc<Poset>, field: FieldDesc, rng: &mut R) -> FIElement {
    let n = poset.len();
    let coeffs = (0..poset.basis_len())
        .map(|i| if i < n { nonzero_scalar(field, rng) } else { scalar(field, rng) })
        .collect();
    FIElement::from_coeffs(poset, field, coeffs).expect("length matches")
}

/// A random `(λ, ψ)`: `λ` uniform among endomorphisms of the field's regime,
/// `ψ` with random radical rows whose diagonal entries sum to zero.
pub fn spec<R: Rng>(poset: &Arc<Poset>, field: FieldDesc, rng: &mut R) -> PreserverSpec {
    let n = poset.len();
    let lambda = if field.is_binary() {
        Lambda::Xor(xor_endo_at(n, rng.gen_range(0..count_xor_endos(n))))
    } else {
        Lambda::Partition(partition_endo_at(n, rng.gen_range(0..count_partition_endos(n))))
    };
    let mut psi = LinearMap::zero(poset, field);
    for row in n..poset.basis_len() {
        let mut diag_sum = field.zero();
        for col in 0..poset.basis_len() {
            if col == n - 1 {
                continue;
            }
            let v = scalar(field, rng);
            if col < n {
                diag_sum = &diag_sum + &v;
            }
            psi.set_entry(row, col, v);
        }
        psi.set_entry(row, n - 1, -&diag_sum);
    }
    PreserverSpec::new(lambda, psi).expect("sampled spec is valid")
}
