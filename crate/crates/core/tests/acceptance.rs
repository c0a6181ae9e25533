//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use incidence_core::algebra::FIElement;
use incidence_core::field::FieldDesc;
use incidence_core::poset::Poset;
use incidence_core::preserver::LinearMap;
use incidence_core::sample;
use incidence_core::verifier::{self, CensusReport, LemmaVerdict, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn poset(name: &str) -> Arc<Poset> {
    Arc::new(Poset::builtin(name).unwrap())
}

fn fp(p: u64) -> FieldDesc {
    FieldDesc::prime(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn census(name: &str, field: FieldDesc) -> Result<(Arc<Poset>, CensusReport, Duration), String> {
    let p = poset(name);
    let start = Instant::now();
    let report = verifier::enumerate_preservers(&p, field).map_err(|e| e.to_string())?;
    Ok((p, report, start.elapsed()))
}

fn census_criterion(name: &str, field: FieldDesc, expected: u64, limit: Duration, single: bool) -> Outcome {
    let (_, report, elapsed) = if single {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| census(name, field))?
    } else {
        census(name, field)?
    };
    ensure(report.oracle_count == expected, || format!("oracle found {}", report.oracle_count))?;
    ensure(report.theorem_count == expected as u128, || format!("theorem gives {}", report.theorem_count))?;
    ensure(report.set_equal == Some(true), || "built specs differ from oracle survivors".into())?;
    within(elapsed, limit)?;
    Ok(format!("{} maps, {} preservers, set-equal, {elapsed:?}", report.matrices, report.oracle_count))
}

fn failures(verdicts: &[LemmaVerdict]) -> Vec<String> {
    verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| format!("{} on {}: {}", v.lemma, v.instance, v.witness.clone().unwrap_or_default()))
        .collect()
}

fn criterion_4() -> Outcome {
    let cases = [("chain:2", fp(3), 36usize), ("chain:2", fp(2), 16), ("antichain:2", fp(3), 4)];
    let mut total = 0;
    for (name, field, maps) in cases {
        let verdicts = verifier::verify_lemma_suite(&poset(name), field, Sample::Exhaustive)
            .map_err(|e| e.to_string())?;
        let keys: HashSet<&str> = verdicts.iter().map(|v| v.lemma.as_str()).collect();
        let mut expected = vec![
            verifier::J_TO_J,
            verifier::DIAGONAL_OF_DIAGONAL,
            verifier::LAMBDA_EXISTS,
            verifier::UNION_OF_LEVELS,
            verifier::SYMMETRIC_DIFFERENCE,
        ];
        if !field.is_binary() {
            expected.extend([verifier::SEPARATING, verifier::BOOLEAN, verifier::DIAGONAL_FORMULA]);
        }
        for key in &expected {
            ensure(keys.contains(key), || format!("{name}/{field}: no verdict for {key}"))?;
        }
        ensure(verdicts.len() == maps * expected.len(), || {
            format!("{name}/{field}: {} verdicts for {maps} maps", verdicts.len())
        })?;
        let bad = failures(&verdicts);
        ensure(bad.is_empty(), || bad.join("; "))?;
        total += verdicts.len();
    }
    Ok(format!("{total} verdicts over 56 preservers, 0 failed"))
}

fn strong_matches_injective(name: &str, field: FieldDesc, strong: u64) -> Result<(), String> {
    let (p, report, _) = census(name, field)?;
    ensure(report.strong_count == strong, || format!("{name}/{field}: {} strong", report.strong_count))?;
    for r in &report.records {
        let phi = verifier::matrix_at(&p, field, r.index).map_err(|e| e.to_string())?;
        let is_strong = phi.is_strong().map_err(|e| e.to_string())?;
        let spec = verifier::classify(&phi).map_err(|e| e.to_string())?;
        let injective = spec.lambda().is_injective();
        let invertible = spec.lambda().is_automorphism();
        ensure(is_strong == injective && injective == invertible, || {
            format!("#{}: strong {is_strong}, injective {injective}, invertible {invertible}", r.index)
        })?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    strong_matches_injective("chain:2", fp(3), 18)?;
    strong_matches_injective("chain:2", fp(2), 8)?;
    Ok("Z3: 18 strong = injective-lambda; Z2: 8 strong = invertible xor-lambda".into())
}

fn criterion_6() -> Outcome {
    let mut bijective = 0;
    for (name, field) in [
        ("chain:2", fp(3)),
        ("chain:2", fp(2)),
        ("antichain:2", fp(3)),
        ("antichain:3", fp(2)),
        ("chain:2", fp(5)),
    ] {
        let (p, report, _) = census(name, field)?;
        ensure(report.bijective_not_strong == 0, || format!("{name}/{field}: bijective non-strong found"))?;
        for r in report.records.iter().filter(|r| r.bijective) {
            let phi = verifier::matrix_at(&p, field, r.index).map_err(|e| e.to_string())?;
            ensure(phi.is_bijective() && phi.is_strong().map_err(|e| e.to_string())?, || {
                format!("{name}/{field} #{}", r.index)
            })?;
        }
        bijective += report.bijective_count;
    }
    Ok(format!("{bijective} bijective preservers over 5 instances, all strong"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let verdicts = verifier::verify_inverse_preserver_results(&poset("chain:2"), fp(3))
        .map_err(|e| e.to_string())?;
    let bad = failures(&verdicts);
    ensure(bad.is_empty(), || bad.join("; "))?;
    for key in [
        verifier::INVERSES_JORDAN,
        verifier::INVERSES_IDEMPOTENTS,
        verifier::UNIT_SQUARE,
        verifier::IDEMPOTENT_IDENTITIES,
        verifier::PLUS_MINUS,
    ] {
        ensure(verdicts.iter().any(|v| v.lemma == key), || format!("no verdict for {key}"))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{} verdicts, {:?}", verdicts.len(), start.elapsed()))
}

fn criterion_8() -> Outcome {
    let mut checks = 0;
    for id in verifier::EXAMPLES {
        let report = verifier::reproduce_example(id).map_err(|e| e.to_string())?;
        let bad = failures(&report.checks);
        ensure(report.pass && bad.is_empty(), || format!("{id}: {}", bad.join("; ")))?;
        checks += report.checks.len();
    }
    Ok(format!("{} examples, {checks} checks", verifier::EXAMPLES.len()))
}

fn all_elements(p: &Arc<Poset>, field: FieldDesc) -> Vec<FIElement> {
    let q = field.order().unwrap() as u64;
    let d = p.basis_len();
    (0..q.pow(d as u32))
        .map(|i| {
            let coeffs = verifier::matrix_residues(i, q, d).into_iter().map(|r| field.element(r)).collect();
            FIElement::from_coeffs(p, field, coeffs).unwrap()
        })
        .collect()
}

fn random_poset(n: usize, rng: &mut ChaCha8Rng) -> Arc<Poset> {
    let rel: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(0.35))
        .collect();
    let labels = (1..=n).map(|i| i.to_string()).collect();
    Arc::new(Poset::new(labels, &rel).unwrap())
}

fn ring_axioms(a: &FIElement, b: &FIElement, c: &FIElement) -> Result<(), String> {
    let m = |x: &FIElement, y: &FIElement| x.convolve(y).unwrap();
    let s = |x: &FIElement, y: &FIElement| x.add(y).unwrap();
    let one = FIElement::delta(a.poset(), a.field());
    let ok = m(&m(a, b), c) == m(a, &m(b, c))
        && m(a, &s(b, c)) == s(&m(a, b), &m(a, c))
        && m(&s(a, b), c) == s(&m(a, c), &m(b, c))
        && m(a, &one) == *a
        && m(&one, a) == *a
        && s(a, b) == s(b, a)
        && s(a, &a.neg()).is_zero();
    ensure(ok, || format!("ring axioms fail on {a}, {b}, {c}"))
}

fn inverse_checks(a: &FIElement) -> Result<(), String> {
    ensure(a.is_unit() == a.diagonal_part().is_unit(), || format!("unit criterion on {a}"))?;
    if a.is_unit() {
        let inv = a.invert().map_err(|e| e.to_string())?;
        let one = FIElement::delta(a.poset(), a.field());
        ensure(a.convolve(&inv).unwrap() == one && inv.convolve(a).unwrap() == one, || {
            format!("bad inverse of {a}")
        })?;
    } else {
        ensure(a.invert().is_err(), || format!("non-unit {a} inverted"))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut units = 0;
    let chain = poset("chain:2");
    for p in [2, 3, 5] {
        let all = all_elements(&chain, fp(p));
        for a in &all {
            inverse_checks(a)?;
            units += usize::from(a.is_unit());
        }
        let step = if p == 5 { 7 } else { 1 };
        for a in all.iter().step_by(step) {
            for b in all.iter().step_by(step) {
                for c in all.iter().step_by(step * 3) {
                    ring_axioms(a, b, c)?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q = FieldDesc::Rationals;
    for i in 0..1000 {
        let p = random_poset(1 + i % 6, &mut rng);
        let a = sample::unit(&p, q, &mut rng);
        inverse_checks(&a)?;
        let b = sample::element(&p, q, &mut rng);
        let c = sample::element(&p, q, &mut rng);
        ring_axioms(&a, &b, &c)?;
        inverse_checks(&b)?;
    }
    Ok(format!("{units} units over Z2/Z3/Z5 inverted exactly; 1000 random Q units on posets n <= 6"))
}

fn criterion_10() -> Outcome {
    criterion_6()?;
    let diag = verifier::reproduce_example("diagonal-truncation").map_err(|e| e.to_string())?;
    ensure(diag.pass, || "strong non-bijective example failed".into())?;
    let id = LinearMap::identity(&poset("chain:3"), FieldDesc::Rationals);
    ensure(id.is_bijective(), || "identity not bijective".into())?;
    Ok("infinite-dimensional examples excluded; finite bijective preservers are all strong (criterion 6)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("census 2-chain Z3 = 36, single-threaded < 10 s", || {
            census_criterion("chain:2", fp(3), 36, Duration::from_secs(10), true)
        }),
        ("census 2-chain Z2 = 16, < 1 s", || census_criterion("chain:2", fp(2), 16, Duration::from_secs(1), false)),
        ("census 2-antichain Z3 = 4, < 1 s", || {
            census_criterion("antichain:2", fp(3), 4, Duration::from_secs(1), false)
        }),
        ("lemma suite on every census preserver", criterion_4),
        ("strong iff injective lambda", criterion_5),
        ("bijective implies strong", criterion_6),
        ("inverse preservers over Z3, < 30 s", criterion_7),
        ("worked examples", criterion_8),
        ("algebra kernel", criterion_9),
        ("infinite-dimensional exclusion", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
