//! Built-in diagnostic suites, runnable from the CLI. Each check is a
//! named pass/fail with a numeric detail, seeded for reproducibility and
//! filterable by substring on `suite/name`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atlas::{builtin_atlas, build_tangent_cocycle, JacobianMode, TransitionMap, BUILTIN_ATLASES};
use crate::bimodule::{classifier, standard_bimodule, twist_bimodule};
use crate::conformal::{conformal_factorize, ConformalElement};
use crate::gerbe::{check_cocycle, groupoid_oracle_check, synth_coboundary_cocycle, synthetic_nerve};
use crate::groupoid::{compose, tensor, GroupoidMorphism};
use crate::quat::{phi_matrix, qmul, Quat, I, J, K, ONE};
use crate::rotation::{delta, Rotation3};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfTestResult {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    /// worst numeric residual of the check, or an explanatory note
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfTestSummary {
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<SelfTestResult>,
}

struct Recorder {
    filter: Option<String>,
    results: Vec<SelfTestResult>,
}

impl Recorder {
    fn check(&mut self, suite: &str, name: &str, residual: f64, tol: f64) {
        let full = format!("{suite}/{name}");
        if let Some(f) = &self.filter {
            if !full.contains(f.as_str()) {
                return;
            }
        }
        self.results.push(SelfTestResult {
            suite: suite.to_string(),
            name: name.to_string(),
            pass: residual.is_finite() && residual <= tol,
            detail: format!("residual {residual:.3e} (tol {tol:.1e})"),
        });
    }
}

fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

fn random_unit(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = random_quat(rng);
        if q.norm() > 0.3 {
            return q.normalized().unwrap();
        }
    }
}

fn random_nonzero(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = random_quat(rng);
        if q.norm() > 0.3 {
            return q;
        }
    }
}

/// Runs every suite (or the subset whose `suite/name` contains `filter`)
/// and returns the summary. With `inject_failure`, one extra check with a
/// deliberately wrong expectation is added to prove failures surface.
pub fn run_selftests(filter: Option<&str>, seed: u64, inject_failure: bool) -> SelfTestSummary {
    let mut rec = Recorder {
        filter: filter.map(str::to_string),
        results: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // suite: algebra
    {
        let r = (qmul(I, J) - K).norm() + (qmul(J, K) - I).norm() + (qmul(K, I) - J).norm();
        rec.check("algebra", "hamilton_relations", r, 1e-15);

        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let (p, q, v) = (random_quat(&mut rng), random_quat(&mut rng), random_quat(&mut rng));
            let direct = p * v * q;
            let through = phi_matrix(p, q).apply(v);
            worst = worst.max((direct - through).norm());
        }
        rec.check("algebra", "phi_realizes_two_sided_mul", worst, 1e-12);

        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let (p, q) = (random_nonzero(&mut rng), random_nonzero(&mut rng));
            let lhs = phi_matrix(p, ONE).matmul(&phi_matrix(q, ONE));
            let rhs = phi_matrix(p * q, ONE);
            worst = worst.max(lhs.sub(&rhs).frobenius_norm() / rhs.frobenius_norm());
        }
        rec.check("algebra", "left_mul_homomorphism", worst, 1e-13);

        let r = phi_matrix(Quat::real(3.0), Quat::real(1.0 / 3.0))
            .sub(&crate::quat::Matrix4::identity())
            .frobenius_norm();
        rec.check("algebra", "real_kernel_acts_trivially", r, 1e-13);
    }

    // suite: conformal
    {
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let (p, q) = (random_nonzero(&mut rng), random_nonzero(&mut rng));
            let m = phi_matrix(p, q);
            match conformal_factorize(&m, 1e-9) {
                Ok(e) => {
                    let back = e.matrix().sub(&m).frobenius_norm() / m.frobenius_norm();
                    let class = e.distance(&ConformalElement::from_pair(p, q).unwrap());
                    worst = worst.max(back).max(class);
                }
                Err(_) => worst = f64::INFINITY,
            }
        }
        rec.check("conformal", "factorize_roundtrip", worst, 1e-9);

        let mut m = crate::quat::Matrix4::identity();
        m.0[1][2] = 0.4;
        let rejected = conformal_factorize(&m, 1e-9).is_err();
        rec.check(
            "conformal",
            "shear_rejected",
            if rejected { 0.0 } else { 1.0 },
            0.5,
        );
    }

    // suite: groupoid
    {
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let a0 = delta(random_unit(&mut rng)).unwrap();
            let f = GroupoidMorphism::new(random_nonzero(&mut rng), a0).unwrap();
            let g = GroupoidMorphism::new(random_nonzero(&mut rng), f.target()).unwrap();
            let h = GroupoidMorphism::new(random_nonzero(&mut rng), g.target()).unwrap();
            let lhs = compose(&h, &compose(&g, &f).unwrap()).unwrap();
            let rhs = compose(&compose(&h, &g).unwrap(), &f).unwrap();
            worst = worst.max((lhs.value() - rhs.value()).norm());
        }
        rec.check("groupoid", "composition_associative", worst, 1e-12);

        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let m1 = GroupoidMorphism::new(
                random_nonzero(&mut rng),
                delta(random_unit(&mut rng)).unwrap(),
            )
            .unwrap();
            let m2 = GroupoidMorphism::new(
                random_nonzero(&mut rng),
                delta(random_unit(&mut rng)).unwrap(),
            )
            .unwrap();
            let t = tensor(&m1, &m2);
            let r = t.target().distance(&m1.target().compose(&m2.target()));
            worst = worst.max(r);
        }
        rec.check("groupoid", "tensor_target_compatible", worst, 1e-12);
    }

    // suite: bimodule
    {
        let std_b = standard_bimodule();
        let r = classifier(&std_b)
            .map(|c| c.distance(&Rotation3::identity()))
            .unwrap_or(f64::INFINITY);
        rec.check("bimodule", "standard_classifier_trivial", r, 1e-10);

        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let alpha = delta(random_unit(&mut rng)).unwrap();
            let b = twist_bimodule(&alpha);
            let r = classifier(&b)
                .map(|c| c.distance(&alpha))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(r);
        }
        rec.check("bimodule", "twist_classifier_roundtrip", worst, 1e-9);
    }

    // suite: gerbe
    {
        let nerve = synthetic_nerve(4, 3, seed);
        let (cocycle, _) = synth_coboundary_cocycle(&nerve, seed.wrapping_add(1));
        let direct = check_cocycle(&cocycle, 1e-10);
        let oracle = groupoid_oracle_check(&cocycle, 1e-10);
        let r = match (&direct, &oracle) {
            (Ok(d), Ok(o)) => {
                let wd = d.worst.as_ref().map_or(0.0, |w| w.residual);
                let wo = o.worst.as_ref().map_or(0.0, |w| w.residual);
                wd.max(wo)
            }
            _ => f64::INFINITY,
        };
        rec.check("gerbe", "synthetic_cocycle_coherent", r, 1e-10);

        let agree = match (&direct, &oracle) {
            (Ok(d), Ok(o)) => d
                .per_simplex
                .iter()
                .zip(&o.per_simplex)
                .map(|(a, b)| (a.max_residual - b.max_residual).abs())
                .fold(0.0f64, f64::max),
            _ => f64::INFINITY,
        };
        rec.check("gerbe", "oracle_agrees_with_direct", agree, 1e-11);
    }

    // suite: atlas
    {
        let map = TransitionMap::new(vec![
            crate::atlas::Step::Translate(Quat::new(0.3, -0.1, 0.2, 0.4)),
            crate::atlas::Step::Invert,
            crate::atlas::Step::LeftMul(Quat::new(1.1, 0.2, -0.3, 0.5)),
        ]);
        let x = Quat::new(1.7, 0.4, -0.2, 0.3);
        let r = match (map.jacobian(x), map.jacobian_fd(x, 2e-5)) {
            (Ok(a), Ok(f)) => a.sub(&f).frobenius_norm() / a.frobenius_norm(),
            _ => f64::INFINITY,
        };
        rec.check("atlas", "jacobian_matches_fd", r, 1e-7);

        let mut worst: f64 = 0.0;
        for name in BUILTIN_ATLASES {
            let r = builtin_atlas(name, 3, seed)
                .and_then(|a| build_tangent_cocycle(&a, 1e-9, JacobianMode::Analytic))
                .and_then(|c| check_cocycle(&c, 1e-8))
                .map(|rep| rep.worst.map_or(0.0, |w| w.residual))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(r);
        }
        rec.check("atlas", "tangent_cocycles_coherent", worst, 1e-8);
    }

    if inject_failure {
        // deliberately impossible bound, to prove failures are reported
        rec.check("harness", "injected_failure", 1.0, 1e-12);
    }

    let passed = rec.results.iter().filter(|r| r.pass).count();
    let failed = rec.results.len() - passed;
    SelfTestSummary {
        seed,
        total: rec.results.len(),
        passed,
        failed,
        results: rec.results,
    }
}
