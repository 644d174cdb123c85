//! Self-check suites: each one reruns an independent oracle against the
//! primary pipeline and reports measured deviations against its tolerance.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qfimeter_core::{
    build_hamiltonian, build_kprime, derivative_state_fd, derivative_state_pt, eigen_system,
    evaluate_point, fisher_limit_no_interaction, local_generator, quadrature_local_generator,
    random_state_fisher_sample, HamiltonianParams, StateVector,
};

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value <= self.tolerance
    }
}

pub const SUITES: [&str; 6] = ["fd", "quadrature", "bounds", "sampling", "limits", "all"];

fn random_params(
    rng: &mut ChaCha8Rng,
    n_override: Option<usize>,
    max_n: usize,
) -> HamiltonianParams {
    let n = n_override.unwrap_or_else(|| rng.gen_range(1..=max_n));
    HamiltonianParams::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-5.0..5.0),
        n,
    )
    .expect("finite random params")
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let raw = DVector::from_iterator(
        dim,
        (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    );
    StateVector::normalized(raw).expect("random state is nonzero")
}

fn fd_suite(seed: u64, n_override: Option<usize>) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let params = random_params(&mut rng, n_override, 8);
        let k = build_hamiltonian(&params).unwrap();
        let kprime = build_kprime(&params.basis());
        let eig = eigen_system(&k, &kprime).unwrap();
        let psi0 = random_state(params.n_atoms + 1, &mut rng);
        let pt = derivative_state_pt(&eig, &kprime, &psi0).unwrap();
        let fd = derivative_state_fd(&params, &psi0, 1e-5).unwrap();
        worst = worst.max((&fd - &pt).norm() / pt.norm().max(1e-300));
    }
    vec![Check {
        name: "state_derivative_fd_vs_pt_rel_l2",
        value: worst,
        tolerance: 1e-6,
    }]
}

fn quadrature_suite(seed: u64, n_override: Option<usize>) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..6 {
        let params = random_params(&mut rng, n_override, 8);
        let k = build_hamiltonian(&params).unwrap();
        let kprime = build_kprime(&params.basis());
        let eig = eigen_system(&k, &kprime).unwrap();
        let gen = local_generator(&eig, &kprime).unwrap();
        let quad = quadrature_local_generator(&eig, &kprime, 2001).unwrap();
        let diff = (gen.matrix().as_matrix() - quad.as_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    vec![Check {
        name: "generator_quadrature_max_entry_diff",
        value: worst,
        tolerance: 1e-8,
    }]
}

fn bounds_suite(seed: u64, n_override: Option<usize>) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_overhang = 0.0f64;
    let mut max_scaled = f64::NEG_INFINITY;
    for _ in 0..200 {
        let n = n_override.unwrap_or_else(|| rng.gen_range(1..=16));
        let params = HamiltonianParams::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-20.0..20.0),
            n,
        )
        .unwrap();
        let point = evaluate_point(&params).unwrap();
        let half = n as f64 / 2.0;
        worst_overhang = worst_overhang
            .max(point.ell_max - half)
            .max(-half - point.ell_min);
        max_scaled = max_scaled.max(point.fisher_scaled);
    }
    vec![
        Check {
            name: "generator_spectrum_overhang",
            value: worst_overhang,
            tolerance: 1e-8,
        },
        Check {
            name: "scaled_fisher_above_one",
            value: max_scaled - 1.0,
            tolerance: 1e-8,
        },
    ]
}

fn sampling_suite(seed: u64, n_override: Option<usize>) -> Vec<Check> {
    let n = n_override.unwrap_or(4);
    let params = HamiltonianParams::new(1.0, 1.0, 1.0, n).unwrap();
    let point = evaluate_point(&params).unwrap();
    let best = random_state_fisher_sample(&params, 2000, seed).unwrap();
    let repeat = random_state_fisher_sample(&params, 2000, seed).unwrap();
    vec![
        Check {
            name: "sampled_fisher_excess_over_optimum",
            value: best - point.fisher_max,
            tolerance: 1e-8,
        },
        Check {
            name: "sampler_rerun_difference",
            value: (best - repeat).abs(),
            tolerance: 0.0,
        },
    ]
}

fn limits_suite(_seed: u64, n_override: Option<usize>) -> Vec<Check> {
    let n = n_override.unwrap_or(4);
    let mut checks = Vec::new();

    // Large drive at fixed direction: the squared spectral fraction law.
    let x = 1e4;
    let params = HamiltonianParams::new(2.0 * x, x, 0.0, n).unwrap();
    let law = fisher_limit_no_interaction(&params).unwrap();
    let point = evaluate_point(&params).unwrap();
    checks.push(Check {
        name: "tilt_law_large_drive_rel_err",
        value: (point.fisher_max - law).abs() / law,
        tolerance: 1e-2,
    });

    // Dominant interaction pins the Heisenberg limit.
    let params = HamiltonianParams::new(1.0, 1.0, 1e4, n).unwrap();
    let point = evaluate_point(&params).unwrap();
    checks.push(Check {
        name: "strong_interaction_heisenberg_err",
        value: (point.fisher_scaled - 1.0).abs(),
        tolerance: 1e-2,
    });

    // All couplings vanishing together: pure drive rotation.
    let x = 1e-4;
    let params = HamiltonianParams::new(x, x, x, n).unwrap();
    let point = evaluate_point(&params).unwrap();
    checks.push(Check {
        name: "small_coupling_heisenberg_err",
        value: (point.fisher_scaled - 1.0).abs(),
        tolerance: 1e-6,
    });

    // Dominant drive: same limit from the other side.
    let params = HamiltonianParams::new(1.0, 1e4, 1.0, n).unwrap();
    let point = evaluate_point(&params).unwrap();
    checks.push(Check {
        name: "dominant_drive_heisenberg_err",
        value: (point.fisher_scaled - 1.0).abs(),
        tolerance: 1e-3,
    });

    checks
}

pub fn run_suite(suite: &str, seed: u64, n_override: Option<usize>) -> Result<Vec<Check>, String> {
    match suite {
        "fd" => Ok(fd_suite(seed, n_override)),
        "quadrature" => Ok(quadrature_suite(seed, n_override)),
        "bounds" => Ok(bounds_suite(seed, n_override)),
        "sampling" => Ok(sampling_suite(seed, n_override)),
        "limits" => Ok(limits_suite(seed, n_override)),
        "all" => {
            let mut checks = fd_suite(seed, n_override);
            checks.extend(quadrature_suite(seed, n_override));
            checks.extend(bounds_suite(seed, n_override));
            checks.extend(sampling_suite(seed, n_override));
            checks.extend(limits_suite(seed, n_override));
            Ok(checks)
        }
        other => Err(format!(
            "unknown suite '{other}', expected one of: {}",
            SUITES.join(", ")
        )),
    }
}

pub fn report_json(suite: &str, seed: u64, checks: &[Check]) -> Value {
    json!({
        "suite": suite,
        "seed": seed,
        "all_pass": checks.iter().all(Check::pass),
        "checks": checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": c.value,
                    "tolerance": c.tolerance,
                    "pass": c.pass(),
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn report_csv(checks: &[Check]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["check", "value", "tolerance", "pass"])
        .expect("in-memory csv");
    for c in checks {
        writer
            .write_record([
                c.name.to_string(),
                crate::emit::fmt_f64(c.value),
                crate::emit::fmt_f64(c.tolerance),
                c.pass().to_string(),
            ])
            .expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}
