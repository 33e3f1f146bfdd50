//! End-to-end advection properties: the exact-shift identity at unit
//! Courant number, and the superconsistency of the gradient update.

use std::f64::consts::PI;

use gals::advect::{step, StepOptions};
use gals::grid::{Grid, LevelSetState};
use gals::util::SplitMix64;
use gals::velocity::{ConstantField, FieldSpec};

/// A smooth random periodic profile built from a few Fourier modes.
fn random_periodic(seed: u64) -> impl Fn(f64) -> (f64, f64) {
    let mut rng = SplitMix64::new(seed);
    let modes: Vec<(f64, f64, f64)> = (1..=5)
        .map(|k| (k as f64, rng.in_range(-1.0, 1.0), rng.in_range(0.0, 2.0 * PI)))
        .collect();
    move |x: f64| {
        let mut v = 0.0;
        let mut d = 0.0;
        for &(k, a, b) in &modes {
            v += a * (2.0 * PI * k * x + b).sin();
            d += a * 2.0 * PI * k * (2.0 * PI * k * x + b).cos();
        }
        (v, d)
    }
}

/// At Courant number exactly 1 the periodic scheme is an index shift:
/// after 100 steps the state equals the initial data shifted by
/// 100 nodes, to 1e-13 relative.
#[test]
fn unit_courant_is_exact_shift_over_100_steps() {
    let m = 64usize;
    let grid: Grid<1> = Grid::unit(m + 1).unwrap();
    let h = grid.h();
    let profile = random_periodic(2024);
    let mut state = LevelSetState::from_fn(grid.clone(), 0.0, |x| {
        let (v, d) = profile(x[0]);
        (v, [d])
    });
    let phi0 = state.phi.clone();
    let psi0 = state.psi.clone();
    let opts = StepOptions::new(h).with_periodic();
    let field = ConstantField([1.0]);
    let n_steps = 100;
    for _ in 0..n_steps {
        state = step(&state, &field, &opts).unwrap();
    }
    let scale_phi = phi0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale_psi = psi0.iter().fold(0.0f64, |m, v| m.max(v[0].abs()));
    for j in 0..m {
        // Values move downstream: node j now carries what node
        // (j - n_steps) carried initially.
        let src = (j + m - n_steps % m) % m;
        assert!(
            (state.phi[j] - phi0[src]).abs() <= 1e-13 * scale_phi,
            "phi at node {j}: {} vs {}",
            state.phi[j],
            phi0[src]
        );
        assert!(
            (state.psi[j][0] - psi0[src][0]).abs() <= 1e-13 * scale_psi,
            "psi at node {j}"
        );
    }
}

/// One superconsistent step on a quadratic initial condition: the stepped
/// gradient field agrees with central differences of the stepped value
/// field to the differencing's own O(h^2), with a small constant.
#[test]
fn gradient_update_is_superconsistent_with_differenced_values() {
    let n = 64usize;
    let grid: Grid<2> = Grid::unit(n + 1).unwrap();
    let h = grid.h();
    let state0 = LevelSetState::from_fn(grid.clone(), 0.0, |x| {
        (
            x[0] * x[0] + x[0] * x[1] + x[1] * x[1],
            [2.0 * x[0] + x[1], x[0] + 2.0 * x[1]],
        )
    });
    let field = FieldSpec::VortexBox { period: 2.0 };
    let opts = StepOptions::new(0.5 * h).with_neumann();
    let state = step(&state0, &field, &opts).unwrap();

    let mut worst = 0.0f64;
    for i in 2..n - 1 {
        for j in 2..n - 1 {
            let at = |di: isize, dj: isize| {
                state.phi[grid.node_index([
                    (i as isize + di) as usize,
                    (j as isize + dj) as usize,
                ])]
            };
            let fd = [
                (at(1, 0) - at(-1, 0)) / (2.0 * h),
                (at(0, 1) - at(0, -1)) / (2.0 * h),
            ];
            let psi = state.psi[grid.node_index([i, j])];
            worst = worst.max((fd[0] - psi[0]).abs()).max((fd[1] - psi[1]).abs());
        }
    }
    assert!(
        worst <= 10.0 * h * h,
        "max |diff(phi) - psi| = {worst:.3e} exceeds 10 h^2 = {:.3e}",
        10.0 * h * h
    );
}

/// The same comparison under the trapezoidal gradient update stays at the
/// O(h^2) level (the two updates agree to higher order than the
/// differencing noise floor).
#[test]
fn heun_gradient_update_tracks_differenced_values() {
    let n = 64usize;
    let grid: Grid<2> = Grid::unit(n + 1).unwrap();
    let h = grid.h();
    let state0 = LevelSetState::from_fn(grid.clone(), 0.0, |x| {
        (
            x[0] * x[0] + x[0] * x[1] + x[1] * x[1],
            [2.0 * x[0] + x[1], x[0] + 2.0 * x[1]],
        )
    });
    let field = FieldSpec::VortexBox { period: 2.0 };
    let mut opts = StepOptions::new(0.5 * h).with_neumann();
    opts.gradient = gals::advect::GradientUpdate::HeunRK2;
    let state = step(&state0, &field, &opts).unwrap();

    let mut worst = 0.0f64;
    for i in 2..n - 1 {
        for j in 2..n - 1 {
            let at = |di: isize, dj: isize| {
                state.phi[grid.node_index([
                    (i as isize + di) as usize,
                    (j as isize + dj) as usize,
                ])]
            };
            let fd = [
                (at(1, 0) - at(-1, 0)) / (2.0 * h),
                (at(0, 1) - at(0, -1)) / (2.0 * h),
            ];
            let psi = state.psi[grid.node_index([i, j])];
            worst = worst.max((fd[0] - psi[0]).abs()).max((fd[1] - psi[1]).abs());
        }
    }
    assert!(worst <= 20.0 * h * h, "max deviation {worst:.3e}");
}

/// Euler tracing is first order, the Shu-Osher trace third order: on a
/// fixed smooth problem the Euler error is orders of magnitude larger.
#[test]
fn rk3_beats_euler_on_smooth_transport() {
    let n = 64usize;
    let grid: Grid<2> = Grid::unit(n + 1).unwrap();
    let h = grid.h();
    let init = |x: [f64; 2]| {
        let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.75).powi(2);
        let e = (-d2 / 0.05).exp();
        (
            e,
            [
                -2.0 * (x[0] - 0.5) / 0.05 * e,
                -2.0 * (x[1] - 0.75) / 0.05 * e,
            ],
        )
    };
    let field = FieldSpec::VortexBox { period: 2.0 };
    let n_steps = (2.0 / h).round() as usize;
    let dt = 2.0 / n_steps as f64;
    let mut errs = Vec::new();
    for integ in [
        gals::advect::Integrator::ShuOsherRK3,
        gals::advect::Integrator::Euler,
    ] {
        let mut opts = StepOptions::new(dt).with_neumann();
        opts.integrator = integ;
        let mut state = LevelSetState::from_fn(grid.clone(), 0.0, init);
        for _ in 0..n_steps {
            state = step(&state, &field, &opts).unwrap();
        }
        let mut e = 0.0f64;
        for idx in 0..grid.num_nodes() {
            let x = grid.node_position(grid.node_multi_index(idx));
            e = e.max((state.phi[idx] - init(x).0).abs());
        }
        errs.push(e);
    }
    assert!(
        errs[0] * 20.0 < errs[1],
        "RK3 error {:.3e} not well below Euler error {:.3e}",
        errs[0],
        errs[1]
    );
}
