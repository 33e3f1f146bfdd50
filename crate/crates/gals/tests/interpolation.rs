//! Accuracy and structural properties of the cell-wise Hermite
//! interpolant, measured against analytic fields and closed-form
//! polynomial references.

use gals::grid::{Grid, LevelSetState};
use gals::hermite::{
    axis_mask, interp_error_orders, reconstruct_cross, CellData, CrossScheme, SmoothField,
};
use gals::util::SplitMix64;

/// sin(3x) e^y + cos(2y), with all derivatives closed-form.
struct TrigExp;

impl SmoothField<2> for TrigExp {
    fn derivative(&self, x: [f64; 2], a: [usize; 2]) -> f64 {
        let s = match a[0] {
            0 => (3.0 * x[0]).sin(),
            1 => 3.0 * (3.0 * x[0]).cos(),
            2 => -9.0 * (3.0 * x[0]).sin(),
            _ => unreachable!(),
        };
        let first = s * x[1].exp();
        let second = if a[0] == 0 {
            match a[1] {
                0 => (2.0 * x[1]).cos(),
                1 => -2.0 * (2.0 * x[1]).sin(),
                2 => -4.0 * (2.0 * x[1]).cos(),
                _ => unreachable!(),
            }
        } else {
            0.0
        };
        first + second
    }
}

fn unit_grids(ns: &[usize]) -> Vec<Grid<2>> {
    ns.iter().map(|&n| Grid::unit(n + 1).unwrap()).collect()
}

#[test]
fn interpolation_orders_meet_thresholds() {
    let grids = unit_grids(&[16, 32, 64, 128]);
    let orders = interp_error_orders(&TrigExp, &grids, CrossScheme::CellBased, 7).unwrap();
    assert!(orders[0] >= 3.7, "value order {:.2}", orders[0]);
    assert!(orders[1] >= 2.7, "gradient order {:.2}", orders[1]);
    assert!(orders[2] >= 1.7, "second-derivative order {:.2}", orders[2]);
}

#[test]
fn interpolation_orders_with_central_cross() {
    let grids = unit_grids(&[16, 32, 64, 128]);
    let orders = interp_error_orders(&TrigExp, &grids, CrossScheme::CentralDifference, 7).unwrap();
    assert!(orders[0] >= 3.7, "value order {:.2}", orders[0]);
    assert!(orders[1] >= 2.7, "gradient order {:.2}", orders[1]);
    assert!(orders[2] >= 1.7, "second-derivative order {:.2}", orders[2]);
}

/// A random bicubic, its partial derivatives computed from the
/// coefficient table.
struct Bicubic {
    c: [[f64; 4]; 4],
}

impl Bicubic {
    fn random(rng: &mut SplitMix64) -> Self {
        let mut c = [[0.0; 4]; 4];
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.in_range(-2.0, 2.0);
            }
        }
        Self { c }
    }

    fn derivative(&self, x: [f64; 2], a: [usize; 2]) -> f64 {
        let mut sum = 0.0;
        for i in a[0]..4 {
            for j in a[1]..4 {
                let mut t = self.c[i][j];
                for k in 0..a[0] {
                    t *= (i - k) as f64;
                }
                for k in 0..a[1] {
                    t *= (j - k) as f64;
                }
                sum += t * x[0].powi((i - a[0]) as i32) * x[1].powi((j - a[1]) as i32);
            }
        }
        sum
    }
}

/// With exact vertex data (values, gradients, cross derivatives) injected,
/// the interpolant reproduces any bicubic exactly: value, gradient, and
/// all second derivatives to 1e-12 relative.
#[test]
fn bicubic_reproduced_exactly_from_exact_data() {
    let mut rng = SplitMix64::new(42);
    for _ in 0..20 {
        let poly = Bicubic::random(&mut rng);
        let dx = [rng.in_range(0.2, 1.5), rng.in_range(0.2, 1.5)];
        let origin = [rng.in_range(-1.0, 1.0), rng.in_range(-1.0, 1.0)];
        let corner = |v: usize| {
            [
                origin[0] + dx[0] * ((v >> 1) & 1) as f64,
                origin[1] + dx[1] * (v & 1) as f64,
            ]
        };
        let values: Vec<f64> = (0..4).map(|v| poly.derivative(corner(v), [0, 0])).collect();
        let grads: Vec<[f64; 2]> = (0..4)
            .map(|v| {
                let p = corner(v);
                [poly.derivative(p, [1, 0]), poly.derivative(p, [0, 1])]
            })
            .collect();
        let cd = CellData::<2>::from_data(dx, &values, &grads, |v, _a| {
            poly.derivative(corner(v), [1, 1])
        });
        let scale: f64 = poly
            .c
            .iter()
            .flatten()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        for _ in 0..50 {
            let xi = [rng.next_f64(), rng.next_f64()];
            let x = [origin[0] + dx[0] * xi[0], origin[1] + dx[1] * xi[1]];
            for &a in &[[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
                let exact = poly.derivative(x, a);
                let got = cd.eval(xi, a);
                assert!(
                    (got - exact).abs() <= 1e-12 * scale.max(exact.abs()) * 50.0,
                    "alpha {a:?}: got {got}, exact {exact}"
                );
            }
        }
    }
}

/// Energy minimality in 1D: among all interpolants matching the endpoint
/// values and slopes, the cubic minimizes the bending energy
/// int (q'')^2 dx. Competitors add perturbations vanishing to first
/// order at both endpoints; Gauss quadrature (5 points, exact through
/// degree 9) integrates the polynomial energies exactly.
#[test]
fn hermite_cubic_minimizes_bending_energy() {
    // 5-point Gauss-Legendre on [-1, 1].
    const GX: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ];
    const GW: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let energy = |q2: &dyn Fn(f64) -> f64| -> f64 {
        // int_0^1 q''(x)^2 dx
        GX.iter()
            .zip(GW)
            .map(|(&t, w)| {
                let x = 0.5 * (t + 1.0);
                let v = q2(x);
                0.5 * w * v * v
            })
            .sum()
    };

    let mut rng = SplitMix64::new(5);
    for _ in 0..20 {
        let (p0, m0, p1, m1) = (
            rng.in_range(-1.0, 1.0),
            rng.in_range(-2.0, 2.0),
            rng.in_range(-1.0, 1.0),
            rng.in_range(-2.0, 2.0),
        );
        // Cubic Hermite second derivative: H(x) = p0 f(x) + p1 f(1-x)
        //                                       + m0 g(x) - m1 g(1-x).
        let h2 = move |x: f64| {
            let f2 = |x: f64| -6.0 + 12.0 * x; // f'' with f = 1-3x^2+2x^3
            let g2 = |x: f64| 6.0 * x - 4.0; // g'' with g = x(1-x)^2
            p0 * f2(x) + p1 * f2(1.0 - x) + m0 * g2(x) - m1 * g2(1.0 - x)
        };
        // Perturbation b(x) = x^2 (1-x)^2 (a + b x + c x^2): vanishes with
        // its derivative at both endpoints.
        let (a, b, c) = (
            rng.in_range(-1.0, 1.0),
            rng.in_range(-1.0, 1.0),
            rng.in_range(-1.0, 1.0),
        );
        if a.abs() + b.abs() + c.abs() < 1e-3 {
            continue;
        }
        let bump2 = move |x: f64| {
            // Second derivative of x^2(1-x)^2 (a + bx + cx^2), expanded:
            // q(x) = a x^2 - (2a - b) x^3 + (a - 2b + c) x^4
            //        + (b - 2c) x^5 + c x^6
            let coeffs = [
                0.0,
                0.0,
                a,
                -(2.0 * a - b),
                a - 2.0 * b + c,
                b - 2.0 * c,
                c,
            ];
            coeffs
                .iter()
                .enumerate()
                .skip(2)
                .map(|(k, &ck)| ck * (k * (k - 1)) as f64 * x.powi(k as i32 - 2))
                .sum::<f64>()
        };
        let e_h = energy(&h2);
        let e_pert = energy(&|x| h2(x) + bump2(x));
        assert!(
            e_h < e_pert,
            "cubic energy {e_h} not below perturbed energy {e_pert}"
        );
    }
}

/// The cell-based cross-derivative reconstruction recovers the analytic
/// mixed derivative of sin(x) cos(y) at second order.
#[test]
fn cross_derivative_schemes_are_second_order() {
    for scheme in [CrossScheme::CellBased, CrossScheme::CentralDifference] {
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for &n in &[16usize, 32, 64, 128] {
            let grid: Grid<2> = Grid::unit(n + 1).unwrap();
            let state = LevelSetState::from_fn(grid.clone(), 0.0, |x| {
                (
                    x[0].sin() * x[1].cos(),
                    [x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin()],
                )
            });
            let mut emax = 0.0f64;
            for ci in 1..n - 1 {
                for cj in 1..n - 1 {
                    let cd = reconstruct_cross(&state, [ci, cj], scheme);
                    for v in 0..4 {
                        let x = [
                            (ci + ((v >> 1) & 1)) as f64 * grid.dx[0],
                            (cj + (v & 1)) as f64 * grid.dx[1],
                        ];
                        let exact = -x[0].cos() * x[1].sin();
                        let mask = axis_mask::<2>(0) | axis_mask::<2>(1);
                        emax = emax.max((cd.coeff(v, mask) - exact).abs());
                    }
                }
            }
            hs.push(grid.h());
            errs.push(emax);
        }
        let order = gals::util::fit_order(&hs, &errs);
        assert!(order >= 1.8, "{scheme:?} cross-derivative order {order:.2}");
    }
}

mod random_properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Injected vertex data is reproduced exactly at the vertices
        /// regardless of spacings or cross-derivative values
        /// (cardinality of the basis).
        #[test]
        fn vertex_data_reproduced(
            vals in proptest::array::uniform4(-10.0f64..10.0),
            gx in proptest::array::uniform4(-10.0f64..10.0),
            gy in proptest::array::uniform4(-10.0f64..10.0),
            cross in proptest::array::uniform4(-10.0f64..10.0),
            dx in 0.05f64..3.0,
            dy in 0.05f64..3.0,
        ) {
            let grads: Vec<[f64; 2]> = (0..4).map(|v| [gx[v], gy[v]]).collect();
            let cd = CellData::<2>::from_data([dx, dy], &vals, &grads, |v, _| cross[v]);
            for v in 0..4usize {
                let xi = [((v >> 1) & 1) as f64, (v & 1) as f64];
                let (value, grad) = cd.eval_value_grad(xi);
                prop_assert!((value - vals[v]).abs() < 1e-9 * (1.0 + vals[v].abs()));
                prop_assert!((grad[0] - gx[v]).abs() < 1e-9 * (1.0 + gx[v].abs()) * (1.0 + 1.0 / dx));
                prop_assert!((grad[1] - gy[v]).abs() < 1e-9 * (1.0 + gy[v].abs()) * (1.0 + 1.0 / dy));
                let exact_cross = cd.eval(xi, [1, 1]);
                prop_assert!((exact_cross - cross[v]).abs() < 1e-8 * (1.0 + cross[v].abs()) * (1.0 + 1.0 / (dx * dy)));
            }
        }

        /// The interpolant is linear in its data: scaling every
        /// coefficient scales every evaluated derivative.
        #[test]
        fn interpolant_is_linear_in_data(
            vals in proptest::array::uniform4(-5.0f64..5.0),
            gx in proptest::array::uniform4(-5.0f64..5.0),
            gy in proptest::array::uniform4(-5.0f64..5.0),
            s in 0.1f64..4.0,
            x in 0.0f64..1.0,
            y in 0.0f64..1.0,
        ) {
            let grads: Vec<[f64; 2]> = (0..4).map(|v| [gx[v], gy[v]]).collect();
            let cd = CellData::<2>::from_data([1.0, 1.0], &vals, &grads, |_, _| 0.0);
            let scaled_vals: Vec<f64> = vals.iter().map(|v| s * v).collect();
            let scaled_grads: Vec<[f64; 2]> =
                grads.iter().map(|g| [s * g[0], s * g[1]]).collect();
            let cds = CellData::<2>::from_data([1.0, 1.0], &scaled_vals, &scaled_grads, |_, _| 0.0);
            let (v0, g0) = cd.eval_value_grad([x, y]);
            let (v1, g1) = cds.eval_value_grad([x, y]);
            prop_assert!((v1 - s * v0).abs() < 1e-9 * (1.0 + v0.abs() * s));
            prop_assert!((g1[0] - s * g0[0]).abs() < 1e-9 * (1.0 + g0[0].abs() * s));
            prop_assert!((g1[1] - s * g0[1]).abs() < 1e-9 * (1.0 + g0[1].abs() * s));
        }
    }
}
