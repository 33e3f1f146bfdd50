//! Analytic benchmark velocity fields. Every field supplies both the
//! velocity and the deformation matrix in closed form; the advection
//! scheme's accuracy analysis assumes the deformation is exact, so it is
//! never obtained by differencing.

use std::f64::consts::PI;

/// Velocity and deformation at a space-time point.
/// `grad[i][j] = d v_j / d x_i`.
#[derive(Debug, Clone, Copy)]
pub struct VelocitySample<const P: usize> {
    pub v: [f64; P],
    pub grad: [[f64; P]; P],
}

/// A velocity field with analytically accessible deformation matrix.
/// User-defined fields plug in by implementing this trait.
pub trait VelocityField<const P: usize>: Sync {
    fn sample(&self, x: [f64; P], t: f64) -> VelocitySample<P>;

    fn velocity(&self, x: [f64; P], t: f64) -> [f64; P] {
        self.sample(x, t).v
    }
}

/// Spatially constant velocity.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField<const P: usize>(pub [f64; P]);

impl<const P: usize> VelocityField<P> for ConstantField<P> {
    fn sample(&self, _x: [f64; P], _t: f64) -> VelocitySample<P> {
        VelocitySample {
            v: self.0,
            grad: [[0.0; P]; P],
        }
    }
}

/// The benchmark fields, selected by name in run configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    /// 1D exponential flow in the fixed direction `(sqrt 2, sqrt pi)`,
    /// not aligned with the 2D grid.
    Pseudo1D,
    /// Time-modulated single-vortex deformation field on the unit square.
    VortexBox { period: f64 },
    /// Constant-vorticity rotation about (50, 50) on the 100x100 domain.
    RigidRotation2D,
    /// Same rotation in the x-y plane with zero vertical velocity.
    RigidRotation3D,
    /// Time-modulated 3D deformation field combining x-y and x-z swirls.
    Leveque3D { period: f64 },
}

impl FieldSpec {
    pub fn dim(&self) -> usize {
        match self {
            FieldSpec::Pseudo1D | FieldSpec::VortexBox { .. } | FieldSpec::RigidRotation2D => 2,
            FieldSpec::RigidRotation3D | FieldSpec::Leveque3D { .. } => 3,
        }
    }
}

const ROT_RATE: f64 = PI / 314.0;

impl VelocityField<2> for FieldSpec {
    fn sample(&self, x: [f64; 2], t: f64) -> VelocitySample<2> {
        match *self {
            FieldSpec::Pseudo1D => {
                let s = (2.0 + PI).sqrt();
                let c = [2.0f64.sqrt(), PI.sqrt()];
                let e = ((c[0] * x[0] + c[1] * x[1]) / s).exp();
                let v = [c[0] * e / s, c[1] * e / s];
                let mut grad = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        grad[i][j] = v[j] * c[i] / s;
                    }
                }
                VelocitySample { v, grad }
            }
            FieldSpec::VortexBox { period } => {
                let m = (PI * t / period).cos();
                let (sx, s2x) = (((PI * x[0]).sin()).powi(2), (2.0 * PI * x[0]).sin());
                let (sy, s2y) = (((PI * x[1]).sin()).powi(2), (2.0 * PI * x[1]).sin());
                let c2x = (2.0 * PI * x[0]).cos();
                let c2y = (2.0 * PI * x[1]).cos();
                let v = [-m * sx * s2y, m * s2x * sy];
                let grad = [
                    [-m * PI * s2x * s2y, 2.0 * PI * m * c2x * sy],
                    [-2.0 * PI * m * sx * c2y, m * PI * s2x * s2y],
                ];
                VelocitySample { v, grad }
            }
            FieldSpec::RigidRotation2D => VelocitySample {
                v: [ROT_RATE * (50.0 - x[1]), ROT_RATE * (x[0] - 50.0)],
                grad: [[0.0, ROT_RATE], [-ROT_RATE, 0.0]],
            },
            _ => panic!("{self:?} is not a 2D field"),
        }
    }
}

impl VelocityField<3> for FieldSpec {
    fn sample(&self, x: [f64; 3], t: f64) -> VelocitySample<3> {
        match *self {
            FieldSpec::RigidRotation3D => {
                let mut grad = [[0.0; 3]; 3];
                grad[0][1] = ROT_RATE;
                grad[1][0] = -ROT_RATE;
                VelocitySample {
                    v: [ROT_RATE * (50.0 - x[1]), ROT_RATE * (x[0] - 50.0), 0.0],
                    grad,
                }
            }
            FieldSpec::Leveque3D { period } => {
                let m = (PI * t / period).cos();
                let sq = |a: f64| ((PI * a).sin()).powi(2);
                let s2 = |a: f64| (2.0 * PI * a).sin();
                let c2 = |a: f64| (2.0 * PI * a).cos();
                let (x0, x1, x2) = (x[0], x[1], x[2]);
                let v = [
                    2.0 * m * sq(x0) * s2(x1) * s2(x2),
                    -m * s2(x0) * sq(x1) * s2(x2),
                    -m * s2(x0) * s2(x1) * sq(x2),
                ];
                let grad = [
                    [
                        2.0 * m * PI * s2(x0) * s2(x1) * s2(x2),
                        -2.0 * PI * m * c2(x0) * sq(x1) * s2(x2),
                        -2.0 * PI * m * c2(x0) * s2(x1) * sq(x2),
                    ],
                    [
                        4.0 * PI * m * sq(x0) * c2(x1) * s2(x2),
                        -PI * m * s2(x0) * s2(x1) * s2(x2),
                        -2.0 * PI * m * s2(x0) * c2(x1) * sq(x2),
                    ],
                    [
                        4.0 * PI * m * sq(x0) * s2(x1) * c2(x2),
                        -2.0 * PI * m * s2(x0) * sq(x1) * c2(x2),
                        -PI * m * s2(x0) * s2(x1) * s2(x2),
                    ],
                ];
                VelocitySample { v, grad }
            }
            _ => panic!("{self:?} is not a 3D field"),
        }
    }
}
