//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mirror_core::fan::{self, Fan, ToricDivisor};
use mirror_core::klyachko::{self, EquivariantBundle, Subspace};
use mirror_core::mutation::{self, K0Class};
use mirror_core::polytope;
use mirror_core::tropical::{self, AffineLift, LiftBase};
use mirror_core::{pair, Lattice, LatticeVector};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dual(n: usize, j: usize) -> LatticeVector {
    LatticeVector::basis(Lattice::M, n, j - 1)
}

fn closed_form_summand(n: usize, i: usize, k: usize) -> LatticeVector {
    if i == k {
        LatticeVector::zero(Lattice::M, n)
    } else if i == 0 {
        dual(n, k)
    } else if k == 0 {
        -&dual(n, i)
    } else {
        &dual(n, k) - &dual(n, i)
    }
}

fn closed_form_cotangent(n: usize, k: usize) -> BTreeMap<LatticeVector, usize> {
    let mut w = BTreeMap::new();
    if k == 0 {
        for i in 1..=n {
            *w.entry(-&dual(n, i)).or_default() += 1;
        }
    } else {
        *w.entry(dual(n, k)).or_default() += 1;
        for i in (1..=n).filter(|&i| i != k) {
            *w.entry(&dual(n, k) - &dual(n, i)).or_default() += 1;
        }
    }
    w
}

fn lemma_tables() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        for i in 0..=n {
            let d = ToricDivisor::prime(space.fan().clone(), i).negate();
            let psi = fan::support_function_of_divisor(&d).map_err(|e| e.to_string())?;
            for k in 0..=n {
                let expected = closed_form_summand(n, i, k);
                ensure(psi.functional(k) == &expected, || {
                    format!("n={n} i={i} k={k}: solved {} expected {expected}", psi.functional(k))
                })?;
            }
        }
    }
    Ok(())
}

fn cotangent_weights() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let omega = klyachko::cotangent_bundle(space.fan()).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let expected = closed_form_cotangent(n, k);
            ensure(omega.weight_multiset(k) == expected, || {
                format!("n={n} cone {k}: {:?} vs {expected:?}", omega.weight_multiset(k))
            })?;
        }
    }
    Ok(())
}

fn main_theorem() -> Outcome {
    for n in 1..=5 {
        let r = tropical::verify_main_theorem(n).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("n={n}: report fails"))?;
        ensure(r.cones.len() == n + 1, || format!("n={n}: {} cones", r.cones.len()))?;
        for (k, c) in r.cones.iter().enumerate() {
            ensure(c.surgered.len() == n, || {
                format!("n={n} cone {k}: fibre of size {}", c.surgered.len())
            })?;
        }
    }
    Ok(())
}

fn rotation_class_n1() -> Outcome {
    let space = fan::projective_space(1).map_err(|e| e.to_string())?;
    let l1 = tropical::euler_multisection(&space).map_err(|e| e.to_string())?;
    let l2 = AffineLift::zero_section(LiftBase::of(&space).map_err(|e| e.to_string())?);
    let s = tropical::surgery(&l1, &l2).map_err(|e| e.to_string())?;
    let section = s.as_section().map_err(|e| e.to_string())?;
    let k = tropical::rotation_class(&section).map_err(|e| e.to_string())?;
    ensure(k == BigInt::from(-2), || format!("rotation class {k}"))
}

fn anticanonical_sum() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let omega = klyachko::cotangent_bundle(space.fan()).map_err(|e| e.to_string())?;
        let anti = fan::anticanonical_support(n).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let sum = omega
                .weight_multiset(k)
                .iter()
                .fold(LatticeVector::zero(Lattice::M, n), |acc, (m, &d)| {
                    &acc + &m.scale(&BigInt::from(d))
                });
            ensure(&sum == anti.functional(k), || {
                format!("n={n} cone {k}: {sum} vs {}", anti.functional(k))
            })?;
        }
    }
    Ok(())
}

fn euler_multiset() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let omega = klyachko::cotangent_bundle(space.fan()).map_err(|e| e.to_string())?;
        let psis = (0..=n)
            .map(|i| fan::support_function_of_divisor(&ToricDivisor::prime(space.fan().clone(), i).negate()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for k in 0..=n {
            let mut lhs = omega.weight_multiset(k);
            *lhs.entry(LatticeVector::zero(Lattice::M, n)).or_default() += 1;
            let mut rhs: BTreeMap<LatticeVector, usize> = BTreeMap::new();
            for psi in &psis {
                *rhs.entry(psi.functional(k).clone()).or_default() += 1;
            }
            ensure(lhs == rhs, || format!("n={n} cone {k}: {lhs:?} vs {rhs:?}"))?;
        }
    }
    Ok(())
}

fn polar_duality() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let delta = space.polytope();
        let fano = space.fano_polytope();
        let dd = polytope::polar_dual(delta).map_err(|e| e.to_string())?.integral();
        let df = polytope::polar_dual(fano).map_err(|e| e.to_string())?.integral();
        ensure(dd.as_ref() == Some(fano), || format!("n={n}: polar of the polytope"))?;
        ensure(df.as_ref() == Some(delta), || format!("n={n}: polar of the Fano polytope"))?;
        ensure(polytope::is_reflexive(delta) && polytope::is_reflexive(fano), || {
            format!("n={n}: reflexivity")
        })?;
        ensure(polytope::is_fano_polytope(fano), || format!("n={n}: Fano polytope not Fano"))?;
        ensure(polytope::is_fano_polytope(delta) == (n == 1), || {
            format!("n={n}: Fano verdict on the anticanonical polytope")
        })?;
    }
    Ok(())
}

fn picard() -> Outcome {
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let p = fan::picard_quotient(space.fan());
        ensure(p.rank() == 1 && p.torsion().is_empty(), || {
            format!("n={n}: rank {} torsion {:?}", p.rank(), p.torsion())
        })?;
    }
    Ok(())
}

fn mutation_checks() -> Outcome {
    let hom = mutation::hom_dimension(0, 1, 2).map_err(|e| e.to_string())?;
    ensure(hom == BigInt::from(3), || format!("hom(O, O(1)) = {hom}"))?;
    let l = mutation::left_mutation(&K0Class::line_bundle(2, 0), &K0Class::line_bundle(2, 1))
        .map_err(|e| e.to_string())?
        .twist(-1);
    // Bott: h^0 = 0, h^1 = 1, h^2 = 0 for the cotangent bundle of the plane
    let got = (l.rank(), l.degree(), l.euler_characteristic());
    let bott = (BigInt::from(2), BigInt::from(-3), BigInt::from(-1));
    ensure(got == bott, || format!("mutation invariants {got:?}"))?;
    for n in 1..=5usize {
        let omega = mutation::cotangent_invariants(n).map_err(|e| e.to_string())?;
        let lhs = omega.add(&K0Class::line_bundle(n, 0).invariants());
        let rhs = K0Class::line_bundle(n, -1).invariants().scale(&BigInt::from(n + 1));
        ensure(lhs == rhs, || format!("n={n}: Euler identity {lhs:?} vs {rhs:?}"))?;
        let report = mutation::verify_beilinson_mutation(n).map_err(|e| e.to_string())?;
        ensure(report.pass, || format!("n={n}: mutation report fails"))?;
    }
    Ok(())
}

fn random_line_sum(rng: &mut ChaCha8Rng, fan: &Arc<Fan>) -> Result<EquivariantBundle, String> {
    let rank = rng.gen_range(1..=4);
    let lines = (0..rank)
        .map(|_| {
            let c: Vec<i64> = (0..fan.rays().len()).map(|_| rng.gen_range(-3..=3)).collect();
            let d = ToricDivisor::from_i64s(fan.clone(), &c).map_err(|e| e.to_string())?;
            klyachko::line_bundle(&d).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    klyachko::direct_sum(&lines).map_err(|e| e.to_string())
}

/// `E_ρ(i) = Σ_{<m, n_ρ> >= i} E^σ(m)` for every cone, ray of the cone and
/// level from the first to the last jump.
fn reconstructs(bundle: &EquivariantBundle) -> Outcome {
    let fan = bundle.fan();
    for k in 0..fan.maximal_cones().len() {
        let pieces = bundle.decomposition(k);
        for &r in fan.cone(k) {
            let f = bundle.filtration(r);
            let jumps = f.jump_indices();
            let (lo, hi) = (jumps[0] - 1, jumps[jumps.len() - 1] + 1);
            for i in lo..=hi {
                let sum = pieces
                    .iter()
                    .filter(|(m, _)| pair(m, fan.ray(r)).unwrap() >= BigInt::from(i))
                    .fold(Subspace::zero(bundle.rank()), |acc, (_, s)| acc.sum(s));
                ensure(&sum == f.at(i), || format!("cone {k} ray {r} level {i}"))?;
            }
        }
    }
    Ok(())
}

fn reconstruction_corpus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let p2 = fan::projective_space(2).map_err(|e| e.to_string())?;
    let p3 = fan::projective_space(3).map_err(|e| e.to_string())?;
    let mut cases = 0;
    for j in 0..120 {
        let fan = if j % 2 == 0 { p2.fan() } else { p3.fan() };
        let b = random_line_sum(&mut rng, fan)?;
        reconstructs(&b).map_err(|e| format!("random case {j}: {e}"))?;
        cases += 1;
    }
    for n in 1..=5 {
        let space = fan::projective_space(n).map_err(|e| e.to_string())?;
        let omega = klyachko::cotangent_bundle(space.fan()).map_err(|e| e.to_string())?;
        reconstructs(&omega).map_err(|e| format!("cotangent n={n}: {e}"))?;
        let twist: Vec<i64> = (0..=n as i64).map(|i| i - 1).collect();
        let d = ToricDivisor::from_i64s(space.fan().clone(), &twist).map_err(|e| e.to_string())?;
        let twisted = omega.twist(&d).map_err(|e| e.to_string())?;
        reconstructs(&twisted).map_err(|e| format!("twisted cotangent n={n}: {e}"))?;
        cases += 2;
    }
    ensure(cases >= 100, || format!("only {cases} cases"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_euler-mirror");
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases: &[(&str, &[&str])] = &[
        ("info_n2.json", &["info", "--n", "2"]),
        ("divisors_n1.json", &["divisors", "--n", "1"]),
        ("cotangent_n2.json", &["cotangent", "--n", "2"]),
        ("euler_cobordism_n2.json", &["euler-cobordism", "--n", "2"]),
        ("mutate_n2.json", &["mutate", "--n", "2"]),
        ("annulus_curves_n1.svg", &["figure", "--n", "1", "--kind", "annulus-curves"]),
        ("cover_lifts_n1.svg", &["figure", "--n", "1", "--kind", "cover-lifts"]),
        ("cover_surgery_n1.svg", &["figure", "--n", "1", "--kind", "cover-surgery"]),
        ("polytope_weights_n2.svg", &["figure", "--n", "2", "--kind", "polytope-weights"]),
    ];
    for (name, args) in cases {
        let runs = (0..3)
            .map(|_| Command::new(bin).args(*args).output().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        for r in &runs {
            ensure(r.status.code() == Some(0), || format!("{name}: exit {:?}", r.status.code()))?;
        }
        ensure(runs.iter().all(|r| r.stdout == runs[0].stdout), || {
            format!("{name}: runs differ")
        })?;
        let expected = std::fs::read(golden.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(runs[0].stdout == expected, || format!("{name}: differs from golden file"))?;
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "support functions of -V(rho_i) match the closed forms, n = 1..5", limit: secs(1), check: lemma_tables },
        Criterion { id: 2, name: "cotangent weights match the closed forms, n = 1..5", limit: secs(1), check: cotangent_weights },
        Criterion { id: 3, name: "surgered weights equal cotangent weights with fibres of size n, n = 1..5", limit: secs(5), check: main_theorem },
        Criterion { id: 4, name: "rotation class of the surgered section on P^1 is -2", limit: None, check: rotation_class_n1 },
        Criterion { id: 5, name: "weight sums equal the anticanonical functionals, n = 1..5", limit: None, check: anticanonical_sum },
        Criterion { id: 6, name: "W(Omega^1) + {0} equals the Euler summand weights, n = 1..5", limit: None, check: euler_multiset },
        Criterion { id: 7, name: "polar duality and reflexive/Fano verdicts, n = 1..5", limit: None, check: polar_duality },
        Criterion { id: 8, name: "Picard group of P^n is Z, n = 1..5", limit: None, check: picard },
        Criterion { id: 9, name: "mutation of the Beilinson collection and the Euler class identity", limit: None, check: mutation_checks },
        Criterion { id: 10, name: "Klyachko reconstruction on a seeded corpus plus cotangent fixtures", limit: secs(30), check: reconstruction_corpus },
        Criterion { id: 11, name: "CLI output is deterministic and matches golden files", limit: None, check: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(()), Some(limit)) if elapsed > limit => {
                Err(format!("took {:.3} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()))
            }
            (r, _) => r,
        };
        let t = elapsed.as_secs_f64();
        match result {
            Ok(()) => println!("PASS {:>2} {} ({t:.3} s)", c.id, c.name),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {} ({t:.3} s): {e}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
