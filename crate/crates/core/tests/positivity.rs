//! The integrated density matrix must stay a physical state: unit trace,
//! Hermitian, and positive semidefinite.

mod common;

use micromaser::master::{integrate_full, Frame};
use micromaser::{MaserConfig, NumberStateMatrix};
use num_complex::Complex64;

const DECAY: f64 = 21.5;

#[test]
fn jacobi_oracle_reproduces_a_known_spectrum() {
    let eigs = common::symmetric_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
    assert!((eigs[0] - 1.0).abs() < 1e-12);
    assert!((eigs[1] - 3.0).abs() < 1e-12);

    // R diag(1,2,5) R^T for a rotation by 0.7 in the (0,1) plane.
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let a = vec![
        c * c + 2.0 * s * s,
        c * s - 2.0 * s * c,
        0.0,
        c * s - 2.0 * s * c,
        s * s + 2.0 * c * c,
        0.0,
        0.0,
        0.0,
        5.0,
    ];
    let eigs = common::symmetric_eigenvalues(a, 3);
    for (got, want) in eigs.iter().zip(&[1.0, 2.0, 5.0]) {
        assert!((got - want).abs() < 1e-12, "{eigs:?}");
    }
}

#[test]
fn pumped_evolution_keeps_the_state_positive() {
    // Coherent-like amplitudes populate every coherence at the start.
    let dim = 24;
    let alpha = 1.5f64;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for n in 1..dim {
        let prev = amps[n - 1];
        amps.push(prev * (alpha / (n as f64).sqrt()));
    }
    let rho = NumberStateMatrix::pure_state(&amps).unwrap();

    let cfg = MaserConfig::new(0.0, 5.0 * DECAY, DECAY, 0.2, 0.9, dim - 1).unwrap();
    let run = integrate_full(&rho, &cfg, 0.2, 1e-9, Frame::Rotating).unwrap();
    let state = run.final_state;

    assert!(
        run.trace_drift < 1e-8,
        "trace drift {:.3e}",
        run.trace_drift
    );
    assert!((state.trace() - 1.0).abs() < 1e-12);
    assert!(state.hermiticity_defect() < 1e-12);

    // A Hermitian X + iY embeds in the symmetric [[X, -Y], [Y, X]] with
    // every eigenvalue doubled, so a real eigensolver settles the sign.
    let big = 2 * dim;
    let mut real = vec![0.0f64; big * big];
    for n in 0..dim {
        for m in 0..dim {
            let z = state.entry(n, m);
            real[n * big + m] = z.re;
            real[(n + dim) * big + (m + dim)] = z.re;
            real[n * big + (m + dim)] = -z.im;
            real[(n + dim) * big + m] = z.im;
        }
    }
    let eigs = common::symmetric_eigenvalues(real, big);
    let lowest = eigs[0];
    let total: f64 = eigs.iter().sum();
    assert!(lowest > -1e-10, "most negative eigenvalue {lowest:.3e}");
    assert!(
        (total - 2.0).abs() < 1e-10,
        "doubled trace came out {total}"
    );
    println!("positivity PASS: lowest eigenvalue {lowest:.3e}");
}
