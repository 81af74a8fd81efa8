//! Acceptance battery. Each criterion is one test that prints a single
//! verdict line and asserts it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgerbe::*;

fn verdict(n: usize, title: &str, pass: bool) {
    println!("criterion {n} ({title}): {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({title}) failed");
}

fn rq(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    )
}

fn rq_nonzero(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = rq(rng);
        if q.norm() > 0.2 {
            return q;
        }
    }
}

#[test]
fn criterion_01_norm_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ok = true;
    for _ in 0..10_000 {
        let (p, q, x) = (rq(&mut rng), rq(&mut rng), rq(&mut rng));
        let lhs = phi_matrix(p, q).apply(x).norm();
        let rhs = p.norm() * q.norm() * x.norm();
        if (lhs - rhs).abs() > 1e-12 * rhs.max(f64::MIN_POSITIVE) {
            ok = false;
        }
    }
    let in_time = start.elapsed().as_secs_f64() < 1.0;
    verdict(1, "norm identity", ok && in_time);
}

#[test]
fn criterion_02_schur_rigidity() {
    let start = Instant::now();
    let b = standard_bimodule();
    let nullity_ok = commutant_nullity(&b) == 1;
    let sv = commutant_singular_values(&b);
    // 16 unknowns: last kept is index 14, first (only) dropped is 15
    let gap_ok = sv[14] / sv[15].max(f64::MIN_POSITIVE) >= 1e6;
    let in_time = start.elapsed().as_secs_f64() < 1.0;
    verdict(2, "Schur rigidity", nullity_ok && gap_ok && in_time);
}

#[test]
fn criterion_03_exact_sequence() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = true;

    // kernel direction: (r, r^-1) with r real acts as the identity
    for _ in 0..1_000 {
        let mut r = rng.gen_range(-10.0..10.0f64);
        if r.abs() < 0.05 {
            r = 0.5;
        }
        let m = phi_matrix(Quat::real(r), Quat::real(1.0 / r));
        if m.sub(&Matrix4::identity()).frobenius_norm() > 1e-12 {
            ok = false;
        }
    }

    // converse direction: whenever phi is the identity the pair must be
    // a real (r, r^-1); random pairs are sampled and the implication is
    // checked case by case (generic pairs land in the non-identity side)
    let mut kernel_hits = 0usize;
    for case in 0..1_000 {
        let (p, q) = if case % 100 == 0 {
            // seed a few true kernel pairs so the branch is exercised
            let r = rng.gen_range(0.2..5.0f64);
            (Quat::real(r), Quat::real(1.0 / r))
        } else {
            (rq_nonzero(&mut rng), rq_nonzero(&mut rng))
        };
        let is_id = phi_matrix(p, q)
            .sub(&Matrix4::identity())
            .frobenius_norm()
            <= 1e-12;
        let imag_p = (p - Quat::real(p.w)).norm();
        let is_kernel_pair = imag_p <= 1e-12 * p.norm() && (p * q - ONE).norm() <= 1e-10;
        if is_id != is_kernel_pair {
            ok = false;
        }
        if is_id {
            kernel_hits += 1;
        }
    }
    verdict(3, "exact sequence", ok && kernel_hits == 10);
}

#[test]
fn criterion_04_factorization_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    for _ in 0..10_000 {
        let (p, q) = (rq_nonzero(&mut rng), rq_nonzero(&mut rng));
        let m = phi_matrix(p, q);
        match conformal_factorize(&m, 1e-9) {
            Ok(e) => {
                let rel = e.matrix().sub(&m).frobenius_norm() / m.frobenius_norm();
                if rel > 1e-9 {
                    ok = false;
                }
            }
            Err(_) => ok = false,
        }
    }
    let mut rejected = 0usize;
    for _ in 0..1_000 {
        let mut m = Matrix4::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = rng.gen_range(-1.0..1.0);
            }
        }
        if conformal_factorize(&m, 1e-9).is_err() {
            rejected += 1;
        }
    }
    verdict(4, "factorization roundtrip", ok && rejected == 1_000);
}

#[test]
fn criterion_05_groupoid_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    let runit = |rng: &mut ChaCha8Rng| delta(rq_nonzero(rng)).unwrap();

    for _ in 0..1_000 {
        // composable chain f, g, h for composition laws
        let f = GroupoidMorphism::new(rq_nonzero(&mut rng), runit(&mut rng)).unwrap();
        let g = GroupoidMorphism::new(rq_nonzero(&mut rng), f.target()).unwrap();
        let h = GroupoidMorphism::new(rq_nonzero(&mut rng), g.target()).unwrap();

        let assoc = {
            let a = compose(&h, &compose(&g, &f).unwrap()).unwrap();
            let b = compose(&compose(&h, &g).unwrap(), &f).unwrap();
            (a.value() - b.value()).norm() <= 1e-10 && a.source().approx_eq(&b.source(), 1e-10)
        };
        let units = {
            let l = compose(&GroupoidMorphism::identity(f.target()), &f).unwrap();
            let r = compose(&f, &GroupoidMorphism::identity(f.source())).unwrap();
            (l.value() - f.value()).norm() <= 1e-10 && (r.value() - f.value()).norm() <= 1e-10
        };
        let inverse = {
            let li = compose(&f.inverse().unwrap(), &f).unwrap();
            (li.value() - ONE).norm() <= 1e-10
        };

        // monoidal laws on arbitrary morphisms
        let m1 = GroupoidMorphism::new(rq_nonzero(&mut rng), runit(&mut rng)).unwrap();
        let m2 = GroupoidMorphism::new(rq_nonzero(&mut rng), runit(&mut rng)).unwrap();
        let m3 = GroupoidMorphism::new(rq_nonzero(&mut rng), runit(&mut rng)).unwrap();
        let tensor_assoc = {
            let a = tensor(&tensor(&m1, &m2), &m3);
            let b = tensor(&m1, &tensor(&m2, &m3));
            (a.value() - b.value()).norm() <= 1e-10 && a.source().approx_eq(&b.source(), 1e-10)
        };
        let tensor_unit = {
            let u = GroupoidMorphism::identity(Rotation3::identity());
            let l = tensor(&u, &m1);
            let r = tensor(&m1, &u);
            (l.value() - m1.value()).norm() <= 1e-10 && (r.value() - m1.value()).norm() <= 1e-10
        };
        let homo = {
            let lhs = to_conformal(&tensor(&m1, &m2)).matrix();
            let rhs = to_conformal(&m1).matrix().matmul(&to_conformal(&m2).matrix());
            lhs.sub(&rhs).frobenius_norm() <= 1e-10 * rhs.frobenius_norm()
        };
        ok &= assoc && units && inverse && tensor_assoc && tensor_unit && homo;
    }

    // fixed non-commutativity witness
    let a = GroupoidMorphism::new(I, Rotation3::identity()).unwrap();
    let b = GroupoidMorphism::new(J, delta(I).unwrap()).unwrap();
    let witness = (tensor(&a, &b).value() - tensor(&b, &a).value()).norm() > 1.0;
    verdict(5, "groupoid and monoid laws", ok && witness);
}

#[test]
fn criterion_06_epsilon_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    for _ in 0..1_000 {
        let u = rq_nonzero(&mut rng).normalized().unwrap();
        let b = twist_bimodule(&delta(u).unwrap());
        match identity_frame(&b) {
            Ok(f) => {
                // angle between the frame and the line spanned by u,
                // via the perpendicular component (stable near zero)
                let c = f.e.dot(u);
                let perp = (f.e - u.scale(c)).norm();
                if perp.atan2(c.abs()) > 1e-8 {
                    ok = false;
                }
            }
            // nullity != 1 surfaces as DegenerateBimodule
            Err(_) => ok = false,
        }
    }
    verdict(6, "epsilon frame", ok);
}

#[test]
fn criterion_07_cocycle_suite() {
    let start = Instant::now();
    let mut ok = true;
    let nerve = synthetic_nerve(4, 20, 7);
    assert_eq!(nerve.quads().len(), 1);

    for seed in 0..100u64 {
        let (c, _) = synth_coboundary_cocycle(&nerve, seed);
        let direct = check_cocycle(&c, 1e-10).unwrap();
        let oracle = groupoid_oracle_check(&c, 1e-10).unwrap();
        ok &= direct.pass && oracle.pass == direct.pass;

        // defect injection: a non-real factor on one p sample breaks the
        // triple identity and must be flagged by both evaluation paths
        let mut bad = c.clone();
        let key = *bad.p.keys().nth((seed as usize) % bad.p.len()).unwrap();
        let vals = bad.p.get_mut(&key).unwrap();
        let idx = (seed as usize) % vals.len();
        vals[idx] = vals[idx] * Quat::new(1.0, 0.2, 0.0, 0.0);
        let direct = check_cocycle(&bad, 1e-10).unwrap();
        let oracle = groupoid_oracle_check(&bad, 1e-10).unwrap();
        ok &= !direct.pass && oracle.pass == direct.pass;
    }
    let in_time = start.elapsed().as_secs_f64() < 10.0;
    verdict(7, "cocycle suite", ok && in_time);
}

#[test]
fn criterion_08_coboundary_suite() {
    let mut ok = true;
    let nerve = synthetic_nerve(4, 3, 8);
    for seed in 0..100u64 {
        let (a, _) = synth_coboundary_cocycle(&nerve, seed);
        let cob = CoboundaryData::random(&nerve, seed.wrapping_mul(31).wrapping_add(5));
        let b = apply_coboundary(&a, &cob).unwrap();
        ok &= check_coboundary(&a, &b, &cob, 1e-10).unwrap().pass;

        // reflexivity
        let id = CoboundaryData::identity(&nerve);
        ok &= check_coboundary(&a, &a, &id, 1e-10).unwrap().pass;

        // symmetry via the constructed inverse data
        let inv = cob.inverse(&nerve).unwrap();
        ok &= check_coboundary(&b, &a, &inv, 1e-10).unwrap().pass;

        // transitivity via the constructed composite data
        let cob2 = CoboundaryData::random(&nerve, seed.wrapping_mul(97).wrapping_add(11));
        let c = apply_coboundary(&b, &cob2).unwrap();
        let composite = cob.then(&cob2, &nerve).unwrap();
        ok &= check_coboundary(&a, &c, &composite, 1e-10).unwrap().pass;
    }
    verdict(8, "coboundary suite", ok);
}

#[test]
fn criterion_09_tangent_gerbe() {
    let start = Instant::now();
    let mut ok = true;

    // affine atlas: analytic and finite-difference paths
    let affine = builtin_atlas("affine", 6, 9).unwrap();
    assert_eq!(affine.charts, 3);
    let analytic = build_tangent_cocycle(&affine, 1e-9, JacobianMode::Analytic).unwrap();
    ok &= check_cocycle(&analytic, 1e-8).unwrap().pass;
    let fd = build_tangent_cocycle(
        &affine,
        1e-4,
        JacobianMode::FiniteDifference { h: 1e-5 },
    )
    .unwrap();
    ok &= check_cocycle(&fd, 1e-5).unwrap().pass;

    // stereographic atlas: conformal Jacobians at 200 sample points and a
    // vacuously coherent (two-chart) object field defined everywhere
    let stereo = builtin_atlas("s4_stereo", 200, 9).unwrap();
    let map = stereo.pair_map(0, 1).unwrap();
    let inv = map.inverse().unwrap();
    let mut conformal_count = 0usize;
    for x in &stereo.pairs[0].points {
        let arg = inv.eval(*x).unwrap();
        let j = map.jacobian_fd(arg, 1e-5 * arg.norm().max(1.0)).unwrap();
        if is_conformal(&j, 1e-6).is_some() {
            conformal_count += 1;
        }
    }
    ok &= conformal_count == 200;
    let stereo_cocycle = build_tangent_cocycle(&stereo, 1e-9, JacobianMode::Analytic).unwrap();
    let rep = check_cocycle(&stereo_cocycle, 1e-9).unwrap();
    ok &= rep.pass && rep.vacuous;

    // a shear-perturbed transition must be rejected as not conformal
    let mut sheared = affine.clone();
    let mut shear = Matrix4::identity();
    shear.0[0][1] = 0.3;
    sheared.pairs[0].map.chain.push(Step::LinearMap(shear));
    let rejected = matches!(
        build_tangent_cocycle(&sheared, 1e-9, JacobianMode::Analytic),
        Err(Error::NotConformal { .. })
    );
    ok &= rejected;

    let in_time = start.elapsed().as_secs_f64() < 30.0;
    verdict(9, "tangent gerbe", ok && in_time);
}
