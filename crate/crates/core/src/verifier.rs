//! Theorem harness: normal-form classification, exhaustive censuses, the
//! lemma suite, the strong/bijective criteria, inverse-preserver results and
//! the worked examples.
//!
//! Every check produces [`LemmaVerdict`]s keyed by the label of the result it
//! tests, so a failing run points at the statement it contradicts.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FIElement};
use crate::boolean_endo::{
    check_partition_preservation, partition_endos, set_partitions, xor_endos, EndoError,
    Subset, SubsetMap, SubsetMapTable, XorEndo,
};
use crate::field::{Cardinality, FieldDesc, FieldError, Scalar};
use crate::gates::{self, GateError};
use crate::poset::Poset;
use crate::preserver::{idempotents, tuples, Lambda, LinearMap, PreserverError, PreserverSpec};
use crate::sample;

pub const J_TO_J: &str = "vf-maps-J-to-J";
pub const DIAGONAL_OF_DIAGONAL: &str = "vf(f)_D-is-vf(f_D)_D";
pub const LAMBDA_EXISTS: &str = "from-vf-to-lb";
pub const SEPARATING: &str = "lb-separating";
pub const BOOLEAN: &str = "lb-preserves-diff-and-cap";
pub const UNION_OF_LEVELS: &str = "union-lb(L_k(f))=X";
pub const DIAGONAL_FORMULA: &str = "vf(f)_D=sum-k-e_lb(L_k)";
pub const SYMMETRIC_DIFFERENCE: &str = "lb-prese-symm-diff";
pub const STRONG_IFF_NONEMPTY: &str = "vf-strong<=>lb(A)-nonempty";
pub const STRONG_IFF_INJECTIVE: &str = "vf-strong<=>lb-injective";
pub const BIJECTIVE_STRONG: &str = "bij-strong-|K|>2";
pub const BIJECTIVE_STRONG_Z2: &str = "bij-strong-over-Z_2";
pub const BIJECTIVE_IS_STRONG: &str = "bijective-is-strong";
pub const INVERSES_JORDAN: &str = "vf-pres-inverses=>vf-Jordan-homo";
pub const INVERSES_IDEMPOTENTS: &str = "vf-pres-inverses=>vf(1)vf-pres-idemp";
pub const UNIT_SQUARE: &str = "vf(1_A)^2=1_B";
pub const IDEMPOTENT_IDENTITIES: &str = "vf(e)vf(1)=vf(1)vf(e)=vf(e)^2";
pub const PLUS_MINUS: &str = "vf-pres-inverses=>vf-pm-auto-or-anti-auto";

pub const EXAMPLES: [&str; 3] = ["z2-nonseparating", "diagonal-truncation", "z2-not-jordan"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("map is not unital: phi(delta) = {0}")]
    NotUnital(String),
    #[error("not an invertibility preserver [{lemma}]: {detail}")]
    Refuted { lemma: &'static str, detail: String },
    #[error("{0} requires a finite prime field")]
    InfiniteField(&'static str),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unknown example `{0}` (known: z2-nonseparating, diagonal-truncation, z2-not-jordan)")]
    UnknownExample(String),
    #[error("census range {start}..{end} is outside 0..{total}")]
    BadRange { start: u64, end: u64, total: u64 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Preserver(#[from] PreserverError),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One checked statement on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub lemma: String,
    pub instance: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl LemmaVerdict {
    fn new(lemma: &str, instance: impl Into<String>, failure: Option<String>) -> Self {
        LemmaVerdict { lemma: lemma.into(), instance: instance.into(), pass: failure.is_none(), witness: failure }
    }

    fn with_note(lemma: &str, instance: impl Into<String>, pass: bool, note: String) -> Self {
        LemmaVerdict { lemma: lemma.into(), instance: instance.into(), pass, witness: Some(note) }
    }
}

pub fn all_pass(verdicts: &[LemmaVerdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

/// `elements: a b c; relations: a<b ...` on one line.
pub fn poset_summary(poset: &Poset) -> String {
    poset.to_string().lines().skip(1).map(str::trim_end).collect::<Vec<_>>().join("; ")
}

fn refuted(lemma: &'static str, detail: String) -> VerifyError {
    VerifyError::Refuted { lemma, detail }
}

fn finite_order(field: FieldDesc, op: &'static str) -> Result<u64, VerifyError> {
    field.order().map(u64::from).ok_or(VerifyError::InfiniteField(op))
}

/// Recovers `(λ, ψ)` from a unital map, refuting with the violated lemma when
/// the map has no normal form. Over any field the normal form exists exactly
/// for the unital invertibility preservers, so this is also a decision
/// procedure over `Q`.
pub fn classify(phi: &LinearMap) -> Result<PreserverSpec, VerifyError> {
    let poset = phi.poset().clone();
    let field = phi.field();
    let delta = FIElement::delta(&poset, field);
    if !phi.is_unital() {
        return Err(VerifyError::NotUnital(phi.apply(&delta)?.to_string()));
    }
    if let Some((x, j)) = phi.radical_to_diagonal_entry() {
        let (a, b) = poset.basis_pair(j);
        return Err(refuted(
            J_TO_J,
            format!(
                "phi(e[{},{}]) has coefficient {} at e[{}]",
                poset.label(a),
                poset.label(b),
                phi.entry(x, j),
                poset.label(x)
            ),
        ));
    }
    let table = phi.extract_lambda().map_err(|e| match e {
        PreserverError::DiagonalValue { .. } => refuted(LAMBDA_EXISTS, e.to_string()),
        other => other.into(),
    })?;
    let n = poset.len();
    let lambda = if field.is_binary() {
        if let Some((a, b)) = table.additivity_violation() {
            return Err(refuted(
                SYMMETRIC_DIFFERENCE,
                format!("A = {}, B = {}", a.display(&poset), b.display(&poset)),
            ));
        }
        Lambda::Xor(table.to_xor_endo()?)
    } else {
        if let Some((a, b)) = table.separation_violation()? {
            return Err(refuted(
                SEPARATING,
                format!(
                    "A = {}, B = {} are disjoint but lambda(A) = {}, lambda(B) = {} meet",
                    a.display(&poset),
                    b.display(&poset),
                    table.image(a).display(&poset),
                    table.image(b).display(&poset)
                ),
            ));
        }
        if let Some(v) = table.boolean_violation()? {
            return Err(refuted(BOOLEAN, format!("{v:?}")));
        }
        Lambda::Partition(table.to_partition()?)
    };
    let spec = PreserverSpec::new(lambda, phi.extract_psi())?;
    let rebuilt = spec.build();
    if &rebuilt != phi {
        let (i, j) = (0..n)
            .flat_map(|i| (0..phi.dim()).map(move |j| (i, j)))
            .find(|&(i, j)| rebuilt.entry(i, j) != phi.entry(i, j))
            .expect("maps differ on the diagonal block");
        return Err(refuted(
            DIAGONAL_FORMULA,
            format!("entry ({i}, {j}) is {} but the normal form gives {}", phi.entry(i, j), rebuilt.entry(i, j)),
        ));
    }
    Ok(spec)
}

/// `n^n q^{m(d-1)}` for `|K| > 2`, `2^{n(n-1)} 2^{m(d-1)}` over `Z_2`.
pub fn count_from_theorem(poset: &Poset, field: FieldDesc) -> Result<u128, VerifyError> {
    let q = finite_order(field, "count_from_theorem")?;
    let n = poset.len() as u64;
    let m = poset.strict_pairs().len() as u64;
    let d = n + m;
    let endos = if field.is_binary() { gates::pow(2, n * (n - 1)) } else { gates::pow(n, n) };
    Ok(endos.saturating_mul(gates::pow(q, m * (d - 1))))
}

/// Every `(λ, ψ)` for the instance, `λ` outermost.
pub fn enumerate_specs(poset: &Arc<Poset>, field: FieldDesc) -> Result<Vec<PreserverSpec>, VerifyError> {
    let count = count_from_theorem(poset, field)?;
    gates::check("spec enumeration", count, gates::ENUMERATION)?;
    let values = field.enumerate()?;
    let n = poset.len();
    let d = poset.basis_len();
    let lambdas: Vec<Lambda> = if field.is_binary() {
        xor_endos(n)?.map(Lambda::Xor).collect()
    } else {
        partition_endos(n)?.map(Lambda::Partition).collect()
    };
    // a radical row is free off column n-1, which then cancels the diagonal sum
    let rows: Vec<Vec<Scalar>> = tuples(&values, d - 1)
        .map(|mut free| {
            let sum = free[..n - 1].iter().fold(field.zero(), |acc, v| &acc + v);
            free.insert(n - 1, -&sum);
            free
        })
        .collect();
    let m = d - n;
    let mut out = Vec::with_capacity(count as usize);
    for lambda in lambdas {
        for choice in 0..rows.len().pow(m as u32) {
            let mut psi = LinearMap::zero(poset, field);
            let mut c = choice;
            for r in (0..m).rev() {
                for (col, v) in rows[c % rows.len()].iter().enumerate() {
                    psi.set_entry(n + r, col, v.clone());
                }
                c /= rows.len();
            }
            out.push(PreserverSpec::new(lambda.clone(), psi)?);
        }
    }
    Ok(out)
}

/// One surviving matrix of a census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    /// Row-major index of the matrix, entry `(0, 0)` most significant.
    pub index: u64,
    pub lambda: String,
    pub injective_lambda: bool,
    pub strong: bool,
    pub bijective: bool,
}

/// Census state over a prefix of the matrix space; mergeable and resumable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialCensus {
    pub poset: String,
    pub field: FieldDesc,
    pub total: u64,
    pub next: u64,
    pub records: Vec<CensusRecord>,
}

impl PartialCensus {
    pub fn new(poset: &Poset, field: FieldDesc) -> Result<Self, VerifyError> {
        Ok(PartialCensus {
            poset: poset_summary(poset),
            field,
            total: census_size(poset, field)?,
            next: 0,
            records: Vec::new(),
        })
    }

    /// Whether `other` is progress on the same instance.
    pub fn same_instance(&self, other: &PartialCensus) -> bool {
        self.poset == other.poset && self.field == other.field && self.total == other.total
    }

    pub fn is_complete(&self) -> bool {
        self.next >= self.total
    }

    /// Appends the survivors of `next..end`.
    pub fn advance(&mut self, poset: &Arc<Poset>, end: u64) -> Result<(), VerifyError> {
        let end = end.min(self.total);
        let mut part = census_range(poset, self.field, self.next..end)?;
        self.records.append(&mut part);
        self.next = end;
        Ok(())
    }
}

/// Brute-force census of all `d x d` matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub poset: String,
    pub field: String,
    pub matrices: u64,
    pub oracle_count: u64,
    pub theorem_count: u128,
    /// Built specs equal the oracle's survivors as sets of matrices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_equal: Option<bool>,
    pub strong_count: u64,
    pub injective_lambda_count: u64,
    pub bijective_count: u64,
    pub bijective_not_strong: u64,
    pub records: Vec<CensusRecord>,
    pub elapsed_ms: u64,
}

impl CensusReport {
    pub fn passed(&self) -> bool {
        self.oracle_count as u128 == self.theorem_count
            && self.set_equal != Some(false)
            && self.strong_count == self.injective_lambda_count
            && self.records.iter().all(|r| r.strong == r.injective_lambda)
            && self.bijective_not_strong == 0
    }
}

fn census_size(poset: &Poset, field: FieldDesc) -> Result<u64, VerifyError> {
    let q = finite_order(field, "census")?;
    let d = poset.basis_len() as u64;
    let size = gates::pow(q, d * d);
    gates::check("census", size, gates::CENSUS)?;
    u64::try_from(size).map_err(|_| GateError { op: "census", size, limit: u64::MAX }.into())
}

/// Residues of the `index`-th matrix.
pub fn matrix_residues(index: u64, q: u64, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    let mut i = index;
    for slot in out.iter_mut().rev() {
        *slot = (i % q) as u32;
        i /= q;
    }
    out
}

pub fn matrix_index(phi: &LinearMap) -> Option<u64> {
    let q = u64::from(phi.field().order()?);
    phi.entries().iter().try_fold(0u64, |acc, s| {
        acc.checked_mul(q)?.checked_add(u64::from(s.residue()?))
    })
}

pub fn matrix_at(poset: &Arc<Poset>, field: FieldDesc, index: u64) -> Result<LinearMap, VerifyError> {
    let q = finite_order(field, "matrix_at")?;
    let d = poset.basis_len();
    Ok(LinearMap::from_residues(poset, field, &matrix_residues(index, q, d * d)))
}

/// `φ(δ) = δ` read off the residues.
fn unital_residues(res: &[u32], n: usize, d: usize, q: u32) -> bool {
    (0..d).all(|i| {
        let s: u64 = res[i * d..i * d + n].iter().map(|&v| u64::from(v)).sum();
        s % u64::from(q) == u64::from(i < n)
    })
}

/// The census over `range`, split across worker threads.
pub fn census_range(
    poset: &Arc<Poset>,
    field: FieldDesc,
    range: Range<u64>,
) -> Result<Vec<CensusRecord>, VerifyError> {
    let total = census_size(poset, field)?;
    if range.start > range.end || range.end > total {
        return Err(VerifyError::BadRange { start: range.start, end: range.end, total });
    }
    let q = field.order().expect("finite");
    let n = poset.len();
    let d = poset.basis_len();
    let found: Vec<Result<Option<CensusRecord>, VerifyError>> = range
        .into_par_iter()
        .map(|index| {
            let res = matrix_residues(index, u64::from(q), d * d);
            if !unital_residues(&res, n, d, q) {
                return Ok(None);
            }
            let phi = LinearMap::from_residues(poset, field, &res);
            if !phi.preserves_invertibility()? {
                return Ok(None);
            }
            let spec = classify(&phi).map_err(|e| {
                VerifyError::Inconsistent(format!("preserver #{index} has no normal form: {e}"))
            })?;
            Ok(Some(CensusRecord {
                index,
                lambda: spec.lambda().display(poset),
                injective_lambda: spec.lambda().is_injective(),
                strong: phi.is_strong()?,
                bijective: phi.is_bijective(),
            }))
        })
        .collect();
    found.into_iter().filter_map(Result::transpose).collect()
}

/// Finishes a complete partial census into a report, cross-checking against
/// the theorem's count and, when enumerable, the built spec set.
pub fn finish_census(
    poset: &Arc<Poset>,
    partial: PartialCensus,
    elapsed_ms: u64,
) -> Result<CensusReport, VerifyError> {
    if !partial.is_complete() {
        return Err(VerifyError::BadRange { start: partial.next, end: partial.total, total: partial.total });
    }
    let field = partial.field;
    let theorem_count = count_from_theorem(poset, field)?;
    let set_equal = if theorem_count <= gates::ENUMERATION as u128 {
        let built: BTreeSet<u64> = enumerate_specs(poset, field)?
            .iter()
            .map(|s| matrix_index(&s.build()).expect("finite field"))
            .collect();
        let oracle: BTreeSet<u64> = partial.records.iter().map(|r| r.index).collect();
        Some(built == oracle)
    } else {
        None
    };
    let count = |f: fn(&CensusRecord) -> bool| partial.records.iter().filter(|r| f(r)).count() as u64;
    Ok(CensusReport {
        poset: poset_summary(poset),
        field: field.to_string(),
        matrices: partial.total,
        oracle_count: partial.records.len() as u64,
        theorem_count,
        set_equal,
        strong_count: count(|r| r.strong),
        injective_lambda_count: count(|r| r.injective_lambda),
        bijective_count: count(|r| r.bijective),
        bijective_not_strong: count(|r| r.bijective && !r.strong),
        records: partial.records,
        elapsed_ms,
    })
}

/// Full census: every unital invertibility preserver of the instance.
pub fn enumerate_preservers(poset: &Arc<Poset>, field: FieldDesc) -> Result<CensusReport, VerifyError> {
    let start = Instant::now();
    let mut partial = PartialCensus::new(poset, field)?;
    partial.advance(poset, partial.total)?;
    finish_census(poset, partial, start.elapsed().as_millis() as u64)
}

/// How the lemma suite picks maps and elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    /// Every preserver of the census against every element of `I(X, K)`.
    Exhaustive,
    /// `trials` random normal forms, each against `trials` random elements.
    Randomized { seed: u64, trials: usize },
}

pub fn verify_lemma_suite(
    poset: &Arc<Poset>,
    field: FieldDesc,
    sample: Sample,
) -> Result<Vec<LemmaVerdict>, VerifyError> {
    match sample {
        Sample::Exhaustive => {
            let report = enumerate_preservers(poset, field)?;
            let elements = all_elements(poset, field)?;
            let per_map: Vec<Vec<LemmaVerdict>> = report
                .records
                .par_iter()
                .map(|r| {
                    let phi = matrix_at(poset, field, r.index)?;
                    lemma_verdicts(&phi, &elements, &format!("census #{} ({})", r.index, r.lambda))
                })
                .collect::<Result<_, _>>()?;
            Ok(per_map.into_iter().flatten().collect())
        }
        Sample::Randomized { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            for t in 0..trials {
                let spec = sample::spec(poset, field, &mut rng);
                let elements: Vec<FIElement> =
                    (0..trials.max(1)).map(|_| sample::element(poset, field, &mut rng)).collect();
                let instance = format!("sample {t} ({})", spec.lambda().display(poset));
                out.extend(lemma_verdicts(&spec.build(), &elements, &instance)?);
            }
            Ok(out)
        }
    }
}

/// The suite on one map: exhaustive elements over a prime field, random
/// ones (seed 0) over `Q`.
pub fn verify_lemmas_for_map(phi: &LinearMap) -> Result<Vec<LemmaVerdict>, VerifyError> {
    let elements = match all_elements(phi.poset(), phi.field()) {
        Ok(all) => all,
        Err(VerifyError::InfiniteField(_)) | Err(VerifyError::Gate(_)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..256).map(|_| sample::element(phi.poset(), phi.field(), &mut rng)).collect()
        }
        Err(e) => return Err(e),
    };
    lemma_verdicts(phi, &elements, "given map")
}

fn all_elements(poset: &Arc<Poset>, field: FieldDesc) -> Result<Vec<FIElement>, VerifyError> {
    let q = finite_order(field, "exhaustive lemma suite")?;
    gates::check("exhaustive lemma suite", gates::pow(q, poset.basis_len() as u64), gates::LEMMA_ELEMENTS)?;
    let values = field.enumerate()?;
    tuples(&values, poset.basis_len())
        .map(|c| FIElement::from_coeffs(poset, field, c).map_err(Into::into))
        .collect()
}

fn distinct_diagonal_values(a: &FIElement) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::new();
    for v in a.diagonal_values() {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// `Σ_k k e_{λ(L_k(α))}`.
fn level_set_formula(lambda: &SubsetMapTable, a: &FIElement) -> FIElement {
    let poset = a.poset();
    let field = a.field();
    distinct_diagonal_values(a)
        .iter()
        .map(|k| FIElement::indicator(poset, field, lambda.image(a.level_set(k))).scale(k).unwrap())
        .fold(FIElement::zero(poset, field), |acc, t| acc.add(&t).unwrap())
}

fn lemma_verdicts(
    phi: &LinearMap,
    elements: &[FIElement],
    instance: &str,
) -> Result<Vec<LemmaVerdict>, VerifyError> {
    let poset = phi.poset().clone();
    let field = phi.field();
    let n = poset.len();
    let binary = field.is_binary();
    let mut out = Vec::new();

    let radical_basis = (n..poset.basis_len()).map(|j| FIElement::basis_vector(&poset, field, j));
    let radical_fail = elements
        .iter()
        .filter(|a| a.is_radical())
        .cloned()
        .chain(radical_basis)
        .find(|a| !phi.apply_unchecked(a).is_radical())
        .map(|a| format!("phi({a}) = {}", phi.apply_unchecked(&a)));
    out.push(LemmaVerdict::new(J_TO_J, instance, radical_fail));

    let diag_fail = elements
        .iter()
        .find(|a| phi.apply_unchecked(a).diagonal_part() != phi.apply_unchecked(&a.diagonal_part()).diagonal_part())
        .map(|a| format!("alpha = {a}"));
    out.push(LemmaVerdict::new(DIAGONAL_OF_DIAGONAL, instance, diag_fail));

    let table = match phi.extract_lambda() {
        Ok(t) => t,
        Err(e) => {
            out.push(LemmaVerdict::new(LAMBDA_EXISTS, instance, Some(e.to_string())));
            return Ok(out);
        }
    };
    let lambda_fail = Subset::all(n)
        .find(|&a| {
            let img = phi.apply_unchecked(&FIElement::indicator(&poset, field, a)).diagonal_part();
            img != FIElement::indicator(&poset, field, table.image(a))
        })
        .map(|a| format!("A = {}", a.display(&poset)));
    out.push(LemmaVerdict::new(LAMBDA_EXISTS, instance, lambda_fail));

    if !binary {
        let sep = table
            .separation_violation()?
            .map(|(a, b)| format!("A = {}, B = {}", a.display(&poset), b.display(&poset)));
        out.push(LemmaVerdict::new(SEPARATING, instance, sep));
        let boolean = table.boolean_violation()?.map(|v| format!("{v:?}"));
        out.push(LemmaVerdict::new(BOOLEAN, instance, boolean));
    }

    // level-set partitions of the sample, then every partition into <= |K| blocks
    let max_blocks = match field.cardinality() {
        Cardinality::Finite(q) => (q as usize).min(n),
        Cardinality::Two => 2.min(n),
        Cardinality::Infinite => n,
    };
    let level_parts = elements.iter().map(|a| {
        distinct_diagonal_values(a).iter().map(|k| a.level_set(k)).collect::<Vec<_>>()
    });
    let mut union_fail = None;
    for parts in level_parts.chain(set_partitions(n, max_blocks)) {
        if !check_partition_preservation(&table, &parts)? {
            let shown: Vec<String> = parts.iter().map(|p| p.display(&poset).to_string()).collect();
            union_fail = Some(format!("partition {}", shown.join(" ")));
            break;
        }
    }
    out.push(LemmaVerdict::new(UNION_OF_LEVELS, instance, union_fail));

    if !binary {
        let formula_fail = elements
            .iter()
            .find(|a| phi.apply_unchecked(a).diagonal_part() != level_set_formula(&table, a))
            .map(|a| format!("alpha = {a}"));
        out.push(LemmaVerdict::new(DIAGONAL_FORMULA, instance, formula_fail));
    }

    let additive = table
        .additivity_violation()
        .map(|(a, b)| format!("A = {}, B = {}", a.display(&poset), b.display(&poset)));
    out.push(LemmaVerdict::new(SYMMETRIC_DIFFERENCE, instance, additive));
    Ok(out)
}

/// Strong and bijective criteria for the map built from `spec`, each side
/// computed independently.
pub fn verify_criteria(spec: &PreserverSpec) -> Result<Vec<LemmaVerdict>, VerifyError> {
    let phi = spec.build();
    let poset = spec.poset();
    let m = poset.basis_len() - poset.len();
    let instance = spec.lambda().display(poset);
    let strong = phi.is_strong()?;
    let bijective = phi.is_bijective();
    let injective = spec.lambda().is_injective();
    let automorphism = spec.lambda().is_automorphism();
    let psi_invertible = spec.psi().radical_block_rank() == m;
    let binary = spec.field().is_binary();

    let strong_key = if binary { STRONG_IFF_INJECTIVE } else { STRONG_IFF_NONEMPTY };
    let bij_key = if binary { BIJECTIVE_STRONG_Z2 } else { BIJECTIVE_STRONG };
    Ok(vec![
        LemmaVerdict::with_note(
            strong_key,
            instance.clone(),
            strong == injective,
            format!("strong = {strong}, lambda injective = {injective}"),
        ),
        LemmaVerdict::with_note(
            bij_key,
            instance.clone(),
            (bijective && strong) == (automorphism && psi_invertible),
            format!(
                "bijective = {bijective}, strong = {strong}, lambda automorphism = {automorphism}, \
                 psi on J invertible = {psi_invertible}"
            ),
        ),
        LemmaVerdict::with_note(
            BIJECTIVE_IS_STRONG,
            instance,
            !bijective || strong,
            format!("bijective = {bijective}, strong = {strong}"),
        ),
    ])
}

/// `x ↦ c·φ(x)` for a fixed element `c`.
fn left_multiple(c: &FIElement, phi: &LinearMap) -> LinearMap {
    LinearMap::from_basis_images(phi.poset(), phi.field(), |j| c.convolve(&phi.column(j)).unwrap())
        .expect("same algebra")
}

struct MapFacts {
    index: u64,
    unital: bool,
    inverse_preserver: bool,
    jordan: bool,
}

/// Inverse-preserver results over a field of characteristic not 2, checked
/// against every linear map of the instance.
pub fn verify_inverse_preserver_results(
    poset: &Arc<Poset>,
    field: FieldDesc,
) -> Result<Vec<LemmaVerdict>, VerifyError> {
    if field.characteristic() == 2 {
        return Err(VerifyError::NotApplicable(
            "char 2: the inverse-preserver results need char(K) != 2; see `examples z2-not-jordan` \
             for a unital inverse preserver over Z_2 that is not Jordan"
                .into(),
        ));
    }
    let total = census_size(poset, field)?;
    let facts: Vec<MapFacts> = (0..total)
        .into_par_iter()
        .map(|index| {
            let phi = matrix_at(poset, field, index)?;
            let inverse_preserver = phi.preserves_invertibility()? && phi.preserves_inverses()?;
            Ok(MapFacts { index, unital: phi.is_unital(), inverse_preserver, jordan: phi.is_jordan_endo() })
        })
        .collect::<Result<_, VerifyError>>()?;

    let instance = format!("{} over {}", poset_summary(poset), field);
    let mut out = Vec::new();

    let inv: BTreeSet<u64> = facts.iter().filter(|f| f.unital && f.inverse_preserver).map(|f| f.index).collect();
    let jor: BTreeSet<u64> = facts.iter().filter(|f| f.unital && f.jordan).map(|f| f.index).collect();
    let note = format!("{} unital inverse preservers, {} unital Jordan endomorphisms", inv.len(), jor.len());
    let verdict = match inv.symmetric_difference(&jor).next() {
        None => LemmaVerdict::with_note(INVERSES_JORDAN, instance.clone(), true, note),
        Some(i) => LemmaVerdict::with_note(
            INVERSES_JORDAN,
            instance.clone(),
            false,
            format!("{note}; map #{i} is in one set only"),
        ),
    };
    out.push(verdict);

    let idems = idempotents(poset, field)?;
    let delta = FIElement::delta(poset, field);
    let unital: Vec<u64> = facts.iter().filter(|f| f.unital && f.inverse_preserver).map(|f| f.index).collect();
    out.extend(idempotent_verdicts(poset, field, &unital, &idems, &format!("{instance}, {} unital inverse preservers", unital.len()))?);
    // Solving for φ(e)φ(δ) and φ(δ)φ(e) divides by 3/2, so the non-unital
    // statements are only checked in characteristic > 3.
    let all: Vec<u64> = facts.iter().filter(|f| f.inverse_preserver).map(|f| f.index).collect();
    if field.characteristic() > 3 {
        out.extend(idempotent_verdicts(poset, field, &all, &idems, &format!("{instance}, {} inverse preservers", all.len()))?);
    }

    if poset.is_connected() {
        let neg_delta = delta.neg();
        let mut bijective = 0usize;
        let mut pm_fail = None;
        for &index in &all {
            let phi = matrix_at(poset, field, index)?;
            if !phi.is_bijective() {
                continue;
            }
            bijective += 1;
            let one = phi.apply_unchecked(&delta);
            if pm_fail.is_none() && ((one != delta && one != neg_delta) || !left_multiple(&one, &phi).is_jordan_endo()) {
                pm_fail = Some(format!("map #{index}: phi(delta) = {one}"));
            }
        }
        out.push(LemmaVerdict::new(
            PLUS_MINUS,
            format!("{instance}, {bijective} bijective inverse preservers"),
            pm_fail,
        ));
    }
    Ok(out)
}

/// `φ(δ)φ` preserves idempotents, `φ(δ)² = δ`, and
/// `φ(e)φ(δ) = φ(δ)φ(e) = φ(e)²` on every idempotent, for each listed map.
fn idempotent_verdicts(
    poset: &Arc<Poset>,
    field: FieldDesc,
    maps: &[u64],
    idems: &[FIElement],
    instance: &str,
) -> Result<Vec<LemmaVerdict>, VerifyError> {
    let delta = FIElement::delta(poset, field);
    let (mut idem_fail, mut square_fail, mut ident_fail) = (None, None, None);
    for &index in maps {
        let phi = matrix_at(poset, field, index)?;
        let one = phi.apply_unchecked(&delta);
        if square_fail.is_none() && one.square() != delta {
            square_fail = Some(format!("map #{index}: phi(delta) = {one}"));
        }
        let normalized = left_multiple(&one, &phi);
        if idem_fail.is_none() {
            if let Some(e) = idems.iter().find(|e| !normalized.apply_unchecked(e).is_idempotent()) {
                idem_fail = Some(format!("map #{index}: e = {e}"));
            }
        }
        if ident_fail.is_none() {
            let bad = idems.iter().find(|e| {
                let pe = phi.apply_unchecked(e);
                let sq = pe.square();
                pe.convolve(&one).unwrap() != sq || one.convolve(&pe).unwrap() != sq
            });
            if let Some(e) = bad {
                ident_fail = Some(format!("map #{index}: e = {e}"));
            }
        }
    }
    Ok(vec![
        LemmaVerdict::new(INVERSES_IDEMPOTENTS, instance, idem_fail),
        LemmaVerdict::new(UNIT_SQUARE, instance, square_fail),
        LemmaVerdict::new(IDEMPOTENT_IDENTITIES, instance, ident_fail),
    ])
}

/// A worked example and the checks it passed or failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub example: String,
    pub poset: String,
    pub field: String,
    pub pass: bool,
    pub checks: Vec<LemmaVerdict>,
}

fn check(id: &str, name: &str, pass: bool, note: impl Into<String>) -> LemmaVerdict {
    LemmaVerdict::with_note(&format!("example:{id}/{name}"), id, pass, note.into())
}

pub fn reproduce_example(id: &str) -> Result<ExampleReport, VerifyError> {
    let (poset, field, checks) = match id {
        "z2-nonseparating" => z2_nonseparating()?,
        "diagonal-truncation" => diagonal_truncation()?,
        "z2-not-jordan" => z2_not_jordan()?,
        other => return Err(VerifyError::UnknownExample(other.into())),
    };
    Ok(ExampleReport {
        example: id.into(),
        poset: poset_summary(&poset),
        field: field.to_string(),
        pass: all_pass(&checks),
        checks,
    })
}

type ExampleParts = (Arc<Poset>, FieldDesc, Vec<LemmaVerdict>);

fn z2_nonseparating() -> Result<ExampleParts, VerifyError> {
    const ID: &str = "z2-nonseparating";
    let field = FieldDesc::Prime(2);
    let poset = Arc::new(Poset::from_labels(&["x", "y", "z"], &[] as &[(&str, &str)]).expect("valid"));
    let s = |xs: &[usize]| Subset::from_indices(3, xs.iter().copied());
    let lambda = XorEndo::new(vec![s(&[0]), s(&[0, 1]), s(&[0, 2])])?;
    let spec = PreserverSpec::new(Lambda::Xor(lambda), LinearMap::zero(&poset, field))?;
    let phi = spec.build();
    let mut checks = Vec::new();

    let sum_ok = tuples(&field.enumerate()?, 3).all(|v| {
        let a = FIElement::diagonal(&poset, &v).unwrap();
        let img = phi.apply_unchecked(&a);
        img.diagonal_values() == [&(&v[0] + &v[1]) + &v[2], v[1].clone(), v[2].clone()]
    });
    checks.push(check(ID, "diagonal-action", sum_ok, "phi(alpha) = (a_xx+a_yy+a_zz)e_x + a_yy e_y + a_zz e_z"));
    checks.push(check(ID, "unital", phi.is_unital(), format!("phi(delta) = {}", phi.apply_unchecked(&FIElement::delta(&poset, field)))));
    let preserver = phi.preserves_invertibility()?;
    checks.push(check(ID, "preserver", preserver, "every unit maps to a unit"));
    let strong = preserver && phi.is_strong()?;
    checks.push(check(ID, "strong", strong, "phi(alpha) a unit implies alpha a unit"));
    let table = phi.extract_lambda()?;
    let lx = table.image(s(&[0]));
    let ly = table.image(s(&[1]));
    checks.push(check(ID, "lambda({x})", lx == s(&[0]), format!("lambda({{x}}) = {}", lx.display(&poset))));
    checks.push(check(ID, "lambda({y})", ly == s(&[0, 1]), format!("lambda({{y}}) = {}", ly.display(&poset))));
    let sep = table.separation_violation()?;
    let note = match sep {
        Some((a, b)) => format!(
            "A = {}, B = {} are disjoint; lambda(A) = {}, lambda(B) = {}",
            a.display(&poset),
            b.display(&poset),
            table.image(a).display(&poset),
            table.image(b).display(&poset)
        ),
        None => "lambda is separating".into(),
    };
    checks.push(check(ID, "not-separating", sep.is_some(), note));
    let round_trip = classify(&phi).map(|c| c == spec).unwrap_or(false);
    checks.push(check(ID, "classify", round_trip, spec.lambda().display(&poset)));
    Ok((poset, field, checks))
}

fn diagonal_truncation() -> Result<ExampleParts, VerifyError> {
    const ID: &str = "diagonal-truncation";
    let field = FieldDesc::Prime(3);
    let poset = Arc::new(Poset::builtin("chain:2").expect("builtin"));
    let phi = LinearMap::from_basis_images(&poset, field, |j| {
        let e = FIElement::basis_vector(&poset, field, j);
        e.diagonal_part()
    })?;
    let mut checks = Vec::new();
    let a = FIElement::from_coeffs(&poset, field, vec![field.from_i64(2), field.one(), field.one()])?;
    checks.push(check(ID, "alpha->alpha_D", phi.apply_unchecked(&a) == a.diagonal_part(), format!("phi({a}) = {}", phi.apply_unchecked(&a))));
    checks.push(check(ID, "unital", phi.is_unital(), "phi(delta) = delta"));
    let preserver = phi.preserves_invertibility()?;
    checks.push(check(ID, "preserver", preserver, "every unit maps to a unit"));
    checks.push(check(ID, "strong", preserver && phi.is_strong()?, "alpha_D a unit implies alpha a unit"));
    let rank = phi.rank();
    checks.push(check(ID, "not-injective", rank < phi.dim(), format!("rank {rank} < {}; phi(e[1,2]) = 0", phi.dim())));
    checks.push(check(ID, "not-surjective", rank < phi.dim(), "e[1,2] is not in the image"));
    let spec = classify(&phi)?;
    let identity = match spec.lambda() {
        Lambda::Partition(p) => p.automorphism() == Some((0..poset.len()).collect()),
        Lambda::Xor(x) => *x == XorEndo::identity(poset.len()),
    };
    checks.push(check(ID, "lambda=identity", identity, spec.lambda().display(&poset)));
    checks.push(check(ID, "psi=0", *spec.psi() == LinearMap::zero(&poset, field), "psi = 0"));
    Ok((poset, field, checks))
}

fn z2_not_jordan() -> Result<ExampleParts, VerifyError> {
    const ID: &str = "z2-not-jordan";
    let field = FieldDesc::Prime(2);
    let poset = Arc::new(Poset::builtin("chain:3").expect("builtin"));
    let e = |x: usize, y: usize| FIElement::basis(&poset, field, x, y).unwrap();
    let images = [
        e(0, 0),
        e(0, 0).add(&e(1, 1)).unwrap(),
        e(0, 0).add(&e(2, 2)).unwrap(),
        e(0, 1),
        FIElement::zero(&poset, field),
        FIElement::zero(&poset, field),
    ];
    let phi = LinearMap::from_basis_images(&poset, field, |j| images[j].clone())?;
    let mut checks = Vec::new();
    checks.push(check(ID, "unital", phi.is_unital(), format!("phi(delta) = {}", phi.apply_unchecked(&FIElement::delta(&poset, field)))));
    let preserver = phi.preserves_invertibility()?;
    checks.push(check(ID, "preserver", preserver, "every unit maps to a unit"));
    let inverses = preserver && phi.preserves_inverses()?;
    checks.push(check(ID, "inverse-preserving", inverses, "phi(u^-1) = phi(u)^-1 for all 32 units"));

    let jordan_note = |a: &FIElement, b: &FIElement| {
        let lhs = phi.apply_unchecked(&a.jordan_product(b).unwrap());
        let rhs = phi.apply_unchecked(a).jordan_product(&phi.apply_unchecked(b)).unwrap();
        (lhs == rhs, format!("phi({a} o {b}) = {lhs}, phi({a}) o phi({b}) = {rhs}"))
    };
    let witness = phi.jordan_witness();
    let note = match witness {
        Some((i, j)) => {
            let b = |k| FIElement::basis_vector(&poset, field, k);
            jordan_note(&b(i), &b(j)).1
        }
        None => "phi is a Jordan endomorphism".into(),
    };
    checks.push(check(ID, "not-jordan", witness.is_some(), note));
    // the first failing basis pair is (e_2, e_12); (e_1, e_12) satisfies the identity
    checks.push(check(ID, "witness", witness == Some((1, 3)), "first failing basis pair (e[2], e[1,2])"));
    let (holds, note) = jordan_note(&e(0, 0), &e(0, 1));
    checks.push(check(ID, "pair(e1,e12)", holds, note));
    Ok((poset, field, checks))
}

/// Classification with every predicate and its witnesses, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub poset: String,
    pub field: String,
    pub verdicts: Verdicts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Refutation>,
    pub witnesses: Witnesses,
    /// Checks that were not run, with the reason.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub unital: bool,
    pub preserver: Option<bool>,
    pub strong: Option<bool>,
    pub inverse_preserving: Option<bool>,
    pub jordan: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub lemma: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_to_non_unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_unit_to_unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jordan: Option<String>,
}

impl ClassificationReport {
    /// Unital invertibility preserver with a normal form.
    pub fn passed(&self) -> bool {
        self.verdicts.unital && self.verdicts.preserver == Some(true) && self.refutation.is_none()
    }
}

pub fn classification_report(phi: &LinearMap) -> Result<ClassificationReport, VerifyError> {
    let poset = phi.poset();
    let mut skipped = Vec::new();
    let mut witnesses = Witnesses::default();
    let unital = phi.is_unital();
    let finite = phi.field().order().is_some();

    let (spec, refutation) = match classify(phi) {
        Ok(spec) => (Some(spec), None),
        Err(VerifyError::Refuted { lemma, detail }) => {
            (None, Some(Refutation { lemma: lemma.into(), detail }))
        }
        Err(VerifyError::NotUnital(img)) => (
            None,
            Some(Refutation { lemma: "unital".into(), detail: format!("phi(delta) = {img}") }),
        ),
        Err(e) => return Err(e),
    };

    let gated = |skipped: &mut Vec<String>, what: &str, r: Result<Option<FIElement>, PreserverError>| match r {
        Ok(w) => Ok(Some(w)),
        Err(PreserverError::Gate(g)) => {
            skipped.push(format!("{what}: {g}"));
            Ok(None)
        }
        Err(e) => Err(e),
    };

    let preserver = if finite {
        match gated(&mut skipped, "preserver", phi.invertibility_witness())? {
            Some(w) => {
                witnesses.unit_to_non_unit = w.as_ref().map(ToString::to_string);
                Some(w.is_none())
            }
            None => None,
        }
    } else if unital {
        skipped.push("preserver: decided through the normal form over Q".into());
        Some(spec.is_some())
    } else {
        skipped.push("preserver: not unital; no decision over Q".into());
        None
    };

    let strong = match (preserver, finite) {
        (Some(true), true) => match gated(&mut skipped, "strong", phi.strongness_witness())? {
            Some(w) => {
                witnesses.non_unit_to_unit = w.as_ref().map(ToString::to_string);
                Some(w.is_none())
            }
            None => None,
        },
        (Some(true), false) => spec.as_ref().map(|s| s.lambda().is_injective()),
        _ => None,
    };

    let inverse_preserving = match (preserver, finite) {
        (Some(true), true) => match gated(&mut skipped, "inverse_preserving", phi.inverse_witness())? {
            Some(w) => {
                witnesses.inverse = w.as_ref().map(ToString::to_string);
                Some(w.is_none())
            }
            None => None,
        },
        (Some(false), _) => Some(false),
        _ => {
            skipped.push("inverse_preserving: needs a finite field".into());
            None
        }
    };

    let jordan = match phi.jordan_witness() {
        None => true,
        Some((i, j)) => {
            let b = |k| FIElement::basis_vector(poset, phi.field(), k);
            witnesses.jordan = Some(format!("basis pair ({}, {})", b(i), b(j)));
            false
        }
    };

    Ok(ClassificationReport {
        poset: poset_summary(poset),
        field: phi.field().to_string(),
        verdicts: Verdicts { unital, preserver, strong, inverse_preserving, jordan },
        lambda: spec.as_ref().map(|s| s.lambda().display(poset)),
        psi: spec.as_ref().map(|s| {
            s.psi().rows().map(|r| r.iter().map(ToString::to_string).collect()).collect()
        }),
        refutation,
        witnesses,
        skipped,
    })
}
