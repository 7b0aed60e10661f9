//! Replicator dynamics for one shared locus and for the two coupled
//! role-separated loci, with fixed-step RK4 integration and fixed-point
//! classification from the Jacobian.
//!
//! In the two-locus flow each locus's allele fitnesses depend only on the
//! other locus's frequency:
//!
//! ```text
//! f1' = f1 (1 - f1) (i_c1 - i_d1)(f2)
//! f2' = f2 (1 - f2) (i_c2 - i_d2)(f1)
//! ```
//!
//! The system has the first integral `H(f1) - H(f2)` (see
//! [`first_integral`]), whose zero level set holds both separatrices of the
//! interior saddle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{equilibrium_roles, equilibrium_single, fitness_single, inclusive_fitness_roles, KinContext};
use crate::error::{check_probability, Error, Result};
use crate::game::{synergy, PayoffMatrix};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 200.0;
pub const DEFAULT_GRID_N: usize = 21;
/// Speed below which a trajectory counts as converged.
pub const CONVERGENCE_SPEED: f64 = 1e-8;
/// Overshoot past the unit square that is clamped rather than reported.
pub const CLAMP_TOLERANCE: f64 = 1e-9;
/// Step of the central differences used for Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Real parts smaller than this make a fixed point non-hyperbolic.
pub const HYPERBOLIC_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLocusState {
    /// Cooperation frequency at the forgiving/vengeful locus.
    pub f1: f64,
    /// Cooperation frequency at the merciful/exploitative locus.
    pub f2: f64,
}

impl TwoLocusState {
    pub fn new(f1: f64, f2: f64) -> Result<Self> {
        Ok(TwoLocusState { f1: check_probability("f1", f1)?, f2: check_probability("f2", f2)? })
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.f1, self.f2]
    }
}

/// An autonomous flow on the unit cube `[0, 1]^N`.
pub trait Flow<const N: usize>: Sync {
    fn velocity(&self, x: &[f64; N]) -> [f64; N];
    fn matrix(&self) -> PayoffMatrix;
    fn relatedness(&self) -> f64;
}

/// Single-locus replicator dynamics `f' = f (1 - f) (w_c - w_d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleLocus {
    pub matrix: PayoffMatrix,
    pub r: f64,
}

/// Coupled replicator dynamics of the forgiving/vengeful and
/// merciful/exploitative loci.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLocus {
    pub matrix: PayoffMatrix,
    pub r: f64,
}

impl SingleLocus {
    pub fn new(matrix: PayoffMatrix, r: f64) -> Result<Self> {
        Ok(SingleLocus { matrix, r: check_probability("r", r)? })
    }
}

impl TwoLocus {
    pub fn new(matrix: PayoffMatrix, r: f64) -> Result<Self> {
        Ok(TwoLocus { matrix, r: check_probability("r", r)? })
    }
}

pub fn velocity_single(m: &PayoffMatrix, r: f64, f: f64) -> f64 {
    let (w_c, w_d) = fitness_single(m, &KinContext { r, f_c: f });
    f * (1.0 - f) * (w_c - w_d)
}

pub fn velocity_two_locus(m: &PayoffMatrix, r: f64, s: TwoLocusState) -> (f64, f64) {
    let TwoLocusState { f1, f2 } = s;
    let (i_c1, i_d1) = inclusive_fitness_roles(m, r, f2);
    let (i_c2, i_d2) = inclusive_fitness_roles(m, r, f1);
    let df1 = f1 * (i_c1 - (f1 * i_c1 + (1.0 - f1) * i_d1));
    let df2 = f2 * (i_c2 - (f2 * i_c2 + (1.0 - f2) * i_d2));
    (df1, df2)
}

impl Flow<1> for SingleLocus {
    fn velocity(&self, x: &[f64; 1]) -> [f64; 1] {
        [velocity_single(&self.matrix, self.r, x[0])]
    }

    fn matrix(&self) -> PayoffMatrix {
        self.matrix
    }

    fn relatedness(&self) -> f64 {
        self.r
    }
}

impl Flow<2> for TwoLocus {
    fn velocity(&self, x: &[f64; 2]) -> [f64; 2] {
        let (a, b) = velocity_two_locus(&self.matrix, self.r, TwoLocusState { f1: x[0], f2: x[1] });
        [a, b]
    }

    fn matrix(&self) -> PayoffMatrix {
        self.matrix
    }

    fn relatedness(&self) -> f64 {
        self.r
    }
}

/// Coefficients `(alpha, beta)` of the linear fitness gap
/// `i_c - i_d = alpha f + beta` of the roles game.
fn roles_gap(m: &PayoffMatrix, r: f64) -> (f64, f64) {
    ((1.0 + r) * synergy(m), m.s() - m.p() + r * (m.t() - m.p()))
}

/// Coefficients of `w_c - w_d = alpha f + beta` at a shared locus.
fn single_gap(m: &PayoffMatrix, r: f64) -> (f64, f64) {
    ((1.0 - r) * synergy(m), r * (m.r() - m.p()) + (1.0 - r) * (m.s() - m.p()))
}

/// Jacobian of the single-locus flow from its factored polynomial form.
pub fn analytic_jacobian_single(m: &PayoffMatrix, r: f64, f: f64) -> f64 {
    let (alpha, beta) = single_gap(m, r);
    (1.0 - 2.0 * f) * (alpha * f + beta) + f * (1.0 - f) * alpha
}

/// Jacobian of the two-locus flow from its factored polynomial form.
pub fn analytic_jacobian_two_locus(m: &PayoffMatrix, r: f64, s: TwoLocusState) -> [[f64; 2]; 2] {
    let (alpha, beta) = roles_gap(m, r);
    let TwoLocusState { f1, f2 } = s;
    [
        [(1.0 - 2.0 * f1) * (alpha * f2 + beta), f1 * (1.0 - f1) * alpha],
        [f2 * (1.0 - f2) * alpha, (1.0 - 2.0 * f2) * (alpha * f1 + beta)],
    ]
}

/// Central-difference Jacobian of any flow.
pub fn numerical_jacobian<const N: usize>(system: &impl Flow<N>, x: &[f64; N]) -> [[f64; N]; N] {
    let h = JACOBIAN_STEP;
    let mut jac = [[0.0; N]; N];
    for j in 0..N {
        let mut plus = *x;
        let mut minus = *x;
        plus[j] += h;
        minus[j] -= h;
        let (vp, vm) = (system.velocity(&plus), system.velocity(&minus));
        for i in 0..N {
            jac[i][j] = (vp[i] - vm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Conserved quantity `H(f1) - H(f2)` of the two-locus flow, where
/// `H(f) = beta ln f - (alpha + beta) ln(1 - f)` and `alpha f + beta` is
/// the fitness gap. Defined on the open square only.
pub fn first_integral(m: &PayoffMatrix, r: f64, s: TwoLocusState) -> f64 {
    let (alpha, beta) = roles_gap(m, r);
    let h = |f: f64| beta * f.ln() - (alpha + beta) * (1.0 - f).ln();
    h(s.f1) - h(s.f2)
}

/// First-order distance from `s` to the zero level set of
/// [`first_integral`], which contains both separatrices of the saddle.
pub fn separatrix_distance(m: &PayoffMatrix, r: f64, s: TwoLocusState) -> f64 {
    let (alpha, beta) = roles_gap(m, r);
    let dh = |f: f64| (alpha * f + beta) / (f * (1.0 - f));
    let grad = dh(s.f1).hypot(dh(s.f2));
    let value = first_integral(m, r, s).abs();
    if grad == 0.0 {
        if value == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        value / grad
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub dt: f64,
    pub matrix: PayoffMatrix,
    pub r: f64,
    /// First sample time at which the speed fell below [`CONVERGENCE_SPEED`].
    pub converged_at: Option<f64>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> [f64; N] {
        *self.states.last().expect("trajectory always holds the initial state")
    }
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn axpy<const N: usize>(x: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| x[i] + a * k[i])
}

fn rk4_step<const N: usize>(system: &impl Flow<N>, x: &[f64; N], h: f64) -> [f64; N] {
    let k1 = system.velocity(x);
    let k2 = system.velocity(&axpy(x, h / 2.0, &k1));
    let k3 = system.velocity(&axpy(x, h / 2.0, &k2));
    let k4 = system.velocity(&axpy(x, h, &k3));
    std::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Classical fixed-step RK4 from `s0` up to `t_end`.
///
/// Overshoots of less than [`CLAMP_TOLERANCE`] past the unit cube are
/// clamped back; larger excursions abort with [`Error::StepInstability`].
pub fn integrate<const N: usize>(
    system: &impl Flow<N>,
    s0: [f64; N],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory<N>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::NonPositive { name: "dt", value: dt });
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Negative { name: "t_end", value: t_end });
    }
    for &x in &s0 {
        check_probability("initial state", x)?;
    }

    let ratio = t_end / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 { ratio.round() } else { ratio.ceil() } as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = s0;
    let mut t = 0.0;
    let mut converged_at = (norm(&system.velocity(&x)) < CONVERGENCE_SPEED).then_some(0.0);
    times.push(t);
    states.push(x);

    for step in 1..=steps {
        let t_next = if step == steps { t_end } else { step as f64 * dt };
        let mut next = rk4_step(system, &x, t_next - t);
        for v in next.iter_mut() {
            let excursion = if v.is_nan() { f64::INFINITY } else { (-*v).max(*v - 1.0) };
            if excursion > 0.0 {
                if excursion >= CLAMP_TOLERANCE {
                    return Err(Error::StepInstability { t: t_next, excursion });
                }
                *v = v.clamp(0.0, 1.0);
            }
        }
        x = next;
        t = t_next;
        times.push(t);
        states.push(x);
        if converged_at.is_none() && norm(&system.velocity(&x)) < CONVERGENCE_SPEED {
            converged_at = Some(t);
        }
    }

    Ok(Trajectory { times, states, dt, matrix: system.matrix(), r: system.relatedness(), converged_at })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample<const N: usize> {
    #[serde(with = "arrays")]
    pub state: [f64; N],
    #[serde(with = "arrays")]
    pub velocity: [f64; N],
}

/// Velocities on the uniform grid of `grid_n` points per axis, boundaries
/// included. Points are ordered with the first coordinate outermost.
pub fn vector_field<const N: usize>(system: &impl Flow<N>, grid_n: usize) -> Result<Vec<FieldSample<N>>> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let total = grid_n.pow(N as u32);
    let last = (grid_n - 1) as f64;
    Ok((0..total)
        .into_par_iter()
        .map(|index| {
            let mut rest = index;
            let mut state = [0.0; N];
            for axis in (0..N).rev() {
                state[axis] = (rest % grid_n) as f64 / last;
                rest /= grid_n;
            }
            FieldSample { state, velocity: system.velocity(&state) }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    StableNode,
    UnstableNode,
    Saddle,
    StableSpiral,
    UnstableSpiral,
    NonHyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Corner,
    Edge,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub location: Vec<f64>,
    pub kind: FixedPointKind,
    pub eigenvalues: Vec<Eigenvalue>,
    #[serde(rename = "class")]
    pub classification: Stability,
    /// Central-difference Jacobian, row-major.
    pub jacobian: Vec<Vec<f64>>,
}

/// Eigenvalues of a 1x1 or 2x2 matrix.
pub fn eigenvalues<const N: usize>(jac: &[[f64; N]; N]) -> Vec<Eigenvalue> {
    match N {
        1 => vec![Eigenvalue { re: jac[0][0], im: 0.0 }],
        2 => {
            let trace = jac[0][0] + jac[1][1];
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let disc = trace * trace - 4.0 * det;
            let scale = trace.abs().max(det.abs().sqrt()).max(1.0);
            if disc >= 0.0 || (-disc).sqrt() / 2.0 < 1e-6 * scale {
                let root = disc.max(0.0).sqrt();
                vec![
                    Eigenvalue { re: (trace - root) / 2.0, im: 0.0 },
                    Eigenvalue { re: (trace + root) / 2.0, im: 0.0 },
                ]
            } else {
                let im = (-disc).sqrt() / 2.0;
                vec![Eigenvalue { re: trace / 2.0, im: -im }, Eigenvalue { re: trace / 2.0, im }]
            }
        }
        _ => unimplemented!("eigenvalues are only needed for one- and two-dimensional flows"),
    }
}

pub fn classify(eigs: &[Eigenvalue]) -> Stability {
    if eigs.iter().any(|e| e.re.abs() < HYPERBOLIC_TOLERANCE) {
        return Stability::NonHyperbolic;
    }
    let negative = eigs.iter().filter(|e| e.re < 0.0).count();
    let complex = eigs.iter().any(|e| e.im != 0.0);
    match (complex, negative) {
        (true, n) if n == eigs.len() => Stability::StableSpiral,
        (true, _) => Stability::UnstableSpiral,
        (false, n) if n == eigs.len() => Stability::StableNode,
        (false, 0) => Stability::UnstableNode,
        (false, _) => Stability::Saddle,
    }
}

fn report<const N: usize>(system: &impl Flow<N>, x: [f64; N], kind: FixedPointKind) -> FixedPointReport {
    let jac = numerical_jacobian(system, &x);
    let eigs = eigenvalues(&jac);
    FixedPointReport {
        location: x.to_vec(),
        kind,
        classification: classify(&eigs),
        eigenvalues: eigs,
        jacobian: jac.iter().map(|row| row.to_vec()).collect(),
    }
}

/// Fixed points of the single-locus flow: both boundaries and, when it
/// exists, the mixed equilibrium.
pub fn fixed_points_single(m: &PayoffMatrix, r: f64) -> Result<Vec<FixedPointReport>> {
    let system = SingleLocus::new(*m, r)?;
    let mut out = vec![
        report(&system, [0.0], FixedPointKind::Corner),
        report(&system, [1.0], FixedPointKind::Corner),
    ];
    match equilibrium_single(m, r) {
        Ok(eq) => {
            if let Some(f) = eq.f_star {
                out.push(report(&system, [f], FixedPointKind::Interior));
            }
        }
        Err(Error::AdditiveMatrix | Error::FullRelatedness) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Fixed points of the two-locus flow: the four corners, the symmetric
/// interior point when `equilibrium_roles` yields one, and isolated edge
/// points where one locus is fixed and the other mixed.
pub fn fixed_points(m: &PayoffMatrix, r: f64) -> Result<Vec<FixedPointReport>> {
    let system = TwoLocus::new(*m, r)?;
    let mut out: Vec<FixedPointReport> = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
        .into_iter()
        .map(|x| report(&system, x, FixedPointKind::Corner))
        .collect();

    for fixed_axis in 0..2 {
        for fixed_value in [0.0, 1.0] {
            for root in edge_roots(&system, fixed_axis, fixed_value) {
                let mut x = [fixed_value; 2];
                x[1 - fixed_axis] = root;
                out.push(report(&system, x, FixedPointKind::Edge));
            }
        }
    }

    match equilibrium_roles(m, r) {
        Ok(eq) => {
            if let Some(f) = eq.f_star {
                out.push(report(&system, [f, f], FixedPointKind::Interior));
            }
        }
        Err(Error::AdditiveMatrix) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Roots in (0, 1) of the free coordinate's velocity along one edge of the
/// square, by sign-change scan and bisection. An edge on which the velocity
/// vanishes identically has no isolated roots and yields none.
fn edge_roots(system: &TwoLocus, fixed_axis: usize, fixed_value: f64) -> Vec<f64> {
    const SCAN: usize = 256;
    let free = 1 - fixed_axis;
    let speed = |u: f64| {
        let mut x = [fixed_value; 2];
        x[free] = u;
        system.velocity(&x)[free]
    };
    let grid: Vec<f64> = (1..SCAN).map(|i| i as f64 / SCAN as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&u| speed(u)).collect();
    if values.iter().all(|v| v.abs() < 1e-14) {
        return Vec::new();
    }
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let (mut fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            let fm = speed(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

mod arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[f64; N], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        let len = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::invalid_length(len, &"an array of the flow's dimension"))
    }
}
