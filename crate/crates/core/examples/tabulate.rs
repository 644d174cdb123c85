//! Regenerates the frozen reference numbers asserted in regression tests.
//!
//! Run with `cargo run -p qfimeter-core --release --example tabulate`.
//! Every value printed here was produced by an oracle or a convergence study,
//! then copied into a test as a literal; rerunning this binary is how those
//! literals are audited.

use nalgebra::DVector;
use num_complex::Complex64;
use qfimeter_core::eig::{eigen_system, matrix_exponential};
use qfimeter_core::qfi::{
    derivative_state_pt, evaluate_point, fisher_for_state, local_generator, StateVector,
};
use qfimeter_core::sweep::{richardson_extrapolate, sweep, u_sign_symmetry_report};
use qfimeter_core::{
    build_hamiltonian, build_kprime, eigh, fisher_eps_zero, noon_ground_state_overlap,
    quadrature_local_generator, random_state_fisher_sample, HamiltonianParams,
};

fn main() {
    let f17 = |x: f64| format!("{x:.16e}");

    println!("== generator spectrum at (tau, eps, u, N) = (1, 1, 1, 2) ==");
    {
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let k = build_hamiltonian(&params).unwrap();
        let kprime = build_kprime(&params.basis());
        let eig = eigen_system(&k, &kprime).unwrap();

        let quad = quadrature_local_generator(&eig, &kprime, 10_001).unwrap();
        let quad_eig = eigh(&quad).unwrap();
        println!(
            "quadrature(10001 nodes): ell_min = {}, ell_max = {}",
            f17(quad_eig.eigenvalues[0]),
            f17(quad_eig.eigenvalues[2])
        );

        let gen = local_generator(&eig, &kprime).unwrap();
        println!(
            "closed form:             ell_min = {}, ell_max = {}",
            f17(gen.ell_min()),
            f17(gen.ell_max())
        );
        let point = evaluate_point(&params).unwrap();
        println!(
            "F_M = {}, f_M = {}",
            f17(point.fisher_max),
            f17(point.fisher_scaled)
        );
        let max_diff = (gen.matrix().as_matrix() - quad.as_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        println!("max entry |closed - quadrature| = {max_diff:.3e}");
    }

    println!("\n== tilt-law decade study: u = 0, (tau, eps) = x (1, 1) ==");
    for n in [2usize, 8] {
        let mut devs = Vec::new();
        for exp in [2, 3, 4] {
            let x = 10f64.powi(exp);
            let params = HamiltonianParams::new(x, x, 0.0, n).unwrap();
            let point = evaluate_point(&params).unwrap();
            let dev = (point.fisher_scaled - 0.5).abs();
            println!(
                "N = {n}, x = 1e{exp}: f_M = {}, |f - 1/2| = {dev:.6e}",
                f17(point.fisher_scaled)
            );
            devs.push(dev);
        }
        println!(
            "N = {n}: decade ratios = {:.4}, {:.4}",
            devs[0] / devs[1],
            devs[1] / devs[2]
        );
    }

    println!("\n== strong interaction: tau = eps = 1, N = 8 ==");
    for u in [1e4, -1e4] {
        let params = HamiltonianParams::new(1.0, 1.0, u, 8).unwrap();
        let point = evaluate_point(&params).unwrap();
        println!("u = {u:+.0e}: f_M = {}", f17(point.fisher_scaled));
    }

    println!("\n== Richardson series at (tau, u, eps) = (1, 2, 1) ==");
    {
        let mut series = Vec::new();
        for n in [8usize, 16, 32, 64] {
            let params = HamiltonianParams::new(1.0, 1.0, 2.0, n).unwrap();
            let point = evaluate_point(&params).unwrap();
            println!("N = {n:>2}: f_M = {}", f17(point.fisher_scaled));
            series.push((n, point.fisher_scaled));
        }
        let r = richardson_extrapolate(&series).unwrap();
        println!(
            "f_infinity = {}, error_estimate = {:.6e}",
            f17(r.f_infinity),
            r.error_estimate
        );
        for w in series.windows(2) {
            let d0 = (w[0].1 - r.f_infinity).abs();
            let d1 = (w[1].1 - r.f_infinity).abs();
            println!(
                "deviation ratio N={} -> N={}: {:.4}",
                w[0].0,
                w[1].0,
                d0 / d1
            );
        }
        // Informational: next doubling, not part of the frozen series.
        let params = HamiltonianParams::new(1.0, 1.0, 2.0, 128).unwrap();
        let point = evaluate_point(&params).unwrap();
        println!(
            "N = 128 (check only): f_M = {}, |f - f_inf| = {:.3e}",
            f17(point.fisher_scaled),
            (point.fisher_scaled - r.f_infinity).abs()
        );
    }

    println!("\n== random-state sampling at (1, 1, 1, N = 4) ==");
    {
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 4).unwrap();
        let point = evaluate_point(&params).unwrap();
        let best = random_state_fisher_sample(&params, 10_000, 20240817).unwrap();
        println!("max over 1e4 samples (seed 20240817) = {}", f17(best));
        println!(
            "F_M = {}, ratio = {}",
            f17(point.fisher_max),
            f17(best / point.fisher_max)
        );
    }

    println!("\n== u-sign symmetry, N = 2, eps = 1, default 41x41 grids ==");
    {
        let tau_axis: Vec<f64> = (0..41).map(|i| i as f64 * 0.1).collect();
        let u_pos: Vec<f64> = (0..41).map(|i| i as f64 * 0.25).collect();
        let u_neg: Vec<f64> = (0..41).map(|i| -10.0 + i as f64 * 0.25).collect();
        let pos = sweep(&tau_axis, &u_pos, 1.0, 2, None).unwrap();
        let neg = sweep(&tau_axis, &u_neg, 1.0, 2, None).unwrap();
        let diff = u_sign_symmetry_report(&pos, &neg).unwrap();
        println!("max |f(u) - f(-u)| = {}", f17(diff));
    }

    println!("\n== NOON ground-state overlap, eps = 0, tau = 1 ==");
    for n in [4usize, 8] {
        for u in [-1e3, -1e4] {
            let params = HamiltonianParams::new(1.0, 0.0, u, n).unwrap();
            let overlap = noon_ground_state_overlap(&params).unwrap();
            println!("N = {n}, u = {u:+.0e}: overlap = {}", f17(overlap));
        }
    }

    println!("\n== eps -> 0 continuity at (tau, u, N) = (1, 2, 8) ==");
    {
        let at_zero = fisher_eps_zero(1.0, 2.0, 8).unwrap();
        let near = evaluate_point(&HamiltonianParams::new(1.0, 1e-6, 2.0, 8).unwrap()).unwrap();
        println!(
            "f_M(eps=0) = {}, f_M(eps=1e-6) = {}, |diff| = {:.3e}",
            f17(at_zero.fisher_scaled),
            f17(near.fisher_scaled),
            (at_zero.fisher_scaled - near.fisher_scaled).abs()
        );
    }

    println!("\n== end-to-end optimal-state Fisher at (1, 1, 1, N = 2) ==");
    {
        let params = HamiltonianParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let k = build_hamiltonian(&params).unwrap();
        let kprime = build_kprime(&params.basis());
        let eig = eigen_system(&k, &kprime).unwrap();
        let point = evaluate_point(&params).unwrap();
        let dpsi = derivative_state_pt(&eig, &kprime, &point.optimal_state).unwrap();
        let forward = matrix_exponential(&eig, Complex64::new(0.0, -1.0));
        let psi = StateVector::normalized(forward * point.optimal_state.amplitudes()).unwrap();
        let fisher = fisher_for_state(&psi, &dpsi).unwrap();
        println!("fisher_for_state = {}", f17(fisher));
        let amps: Vec<String> = point
            .optimal_state
            .amplitudes()
            .iter()
            .map(|z| format!("({:+.6e}, {:+.6e})", z.re, z.im))
            .collect();
        println!("optimal input amplitudes = [{}]", amps.join(", "));
        let _ = DVector::<f64>::zeros(1);
    }
}
