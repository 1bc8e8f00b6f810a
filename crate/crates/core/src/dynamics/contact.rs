//! Net wrench for a prescribed COM motion and its minimum-norm distribution
//! over stance contacts under unilateral and friction-cone constraints.

use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::BodyParams;
use crate::GRAVITY;

/// Tolerance on inequality constraints of an accepted solution.
const INEQ_TOL: f64 = 1e-12;
/// Tolerance on equality residuals of an accepted solution.
const EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub force: Vector2<f64>,
    /// Moment about the COM, positive nose-up (x toward z).
    pub moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactForce {
    pub foot: usize,
    /// Ground reaction on the foot, N.
    pub force: Vector2<f64>,
    pub point: Vector2<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("no stance contacts")]
    NoContacts,
    #[error("required normal force {0:.6} N is negative")]
    NegativeNormalForce(f64),
    #[error("required moment {0:.6} N m is unreachable from the stance contacts")]
    MomentUnreachable(f64),
    #[error("contact {foot}: unilateral constraint violated (Fz = {fz:.6} N)")]
    Unilateral { foot: usize, fz: f64 },
    #[error("contact {foot}: friction cone violated (|Fx| = {fx:.6} N > mu Fz = {limit:.6} N)")]
    FrictionCone { foot: usize, fx: f64, limit: f64 },
}

/// 2D cross product `a x b` (y-component convention of the sagittal plane).
pub fn cross(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Newton-Euler balance: total contact wrench needed for COM acceleration
/// `acc` and pitch acceleration `pitch_acc`.
pub fn required_net_wrench(body: &BodyParams, acc: Vector2<f64>, pitch_acc: f64) -> Wrench {
    Wrench {
        force: body.mass * (acc + Vector2::new(0.0, GRAVITY)),
        moment: body.inertia_sagittal * pitch_acc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Free,
    Lifted,
    ConePlus,
    ConeMinus,
}

const MODES: [Mode; 4] = [Mode::Free, Mode::Lifted, Mode::ConePlus, Mode::ConeMinus];

/// Rows of the equality system: net force (2) and moment (1).
fn balance_matrix(points: &[Vector2<f64>], com: Vector2<f64>) -> DMatrix<f64> {
    let n = points.len();
    let mut a = DMatrix::zeros(3, 2 * n);
    for (i, p) in points.iter().enumerate() {
        let r = p - com;
        a[(0, 2 * i)] = 1.0;
        a[(1, 2 * i + 1)] = 1.0;
        a[(2, 2 * i)] = -r.y;
        a[(2, 2 * i + 1)] = r.x;
    }
    a
}

fn rhs(w: &Wrench) -> Vector3<f64> {
    Vector3::new(w.force.x, w.force.y, w.moment)
}

/// Unconstrained minimum-norm solution `A^T (A A^T)^-1 b`, if the system is
/// consistent.
fn min_norm_free(a: &DMatrix<f64>, b: &Vector3<f64>) -> Option<DVector<f64>> {
    let aat: Matrix3<f64> = (a * a.transpose()).fixed_view::<3, 3>(0, 0).into_owned();
    let chol = aat.cholesky()?;
    let y = chol.solve(b);
    let mut f = a.transpose() * DVector::from_column_slice(y.as_slice());
    refine(a, b, &mut f);
    // a near-singular A A^T can still factor; reject inconsistent systems
    let res = (DVector::from_column_slice(b.as_slice()) - a * &f).amax();
    (res <= EQ_TOL).then_some(f)
}

/// One step of residual correction along the row space.
fn refine(a: &DMatrix<f64>, b: &Vector3<f64>, f: &mut DVector<f64>) {
    let r = DVector::from_column_slice(b.as_slice()) - a * &*f;
    let aat = a * a.transpose();
    if let Some(lu) = aat.lu().solve(&r) {
        *f += a.transpose() * lu;
    }
}

/// Minimum-norm solution of the equality system with per-contact modes
/// imposed, or `None` if inconsistent.
fn min_norm_with_modes(
    a: &DMatrix<f64>,
    b: &Vector3<f64>,
    modes: &[Mode],
    mu: f64,
) -> Option<DVector<f64>> {
    let n = modes.len();
    // Parametrize each contact by its free coordinates.
    let mut basis_cols: Vec<DVector<f64>> = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        let mut push = |fx: f64, fz: f64| {
            let mut v = DVector::zeros(2 * n);
            v[2 * i] = fx;
            v[2 * i + 1] = fz;
            basis_cols.push(v);
        };
        match m {
            Mode::Free => {
                push(1.0, 0.0);
                push(0.0, 1.0);
            }
            Mode::Lifted => {}
            Mode::ConePlus => push(mu, 1.0),
            Mode::ConeMinus => push(-mu, 1.0),
        }
    }
    if basis_cols.is_empty() {
        return None;
    }
    let basis = DMatrix::from_columns(&basis_cols);
    // min |N z|^2  s.t.  (A N) z = b
    let an = a * &basis;
    let gram = basis.transpose() * &basis;
    let gram_chol = gram.clone().cholesky()?;
    let ginv = gram_chol.inverse();
    let m = &an * &ginv * an.transpose();
    let bb = DVector::from_column_slice(b.as_slice());
    let svd = m.svd(true, true);
    let y = svd.solve(&bb, 1e-12).ok()?;
    let z = &ginv * an.transpose() * y;
    let f = &basis * z;
    let res = (&bb - a * &f).amax();
    (res <= EQ_TOL).then_some(f)
}

fn feasible(f: &DVector<f64>, mu: f64) -> bool {
    (0..f.len() / 2).all(|i| {
        let (fx, fz) = (f[2 * i], f[2 * i + 1]);
        fz >= -INEQ_TOL && fx.abs() <= mu * fz + INEQ_TOL
    })
}

/// First violated inequality of the unconstrained solution, for reporting.
fn diagnose(f: &DVector<f64>, mu: f64) -> ContactError {
    for i in 0..f.len() / 2 {
        let (fx, fz) = (f[2 * i], f[2 * i + 1]);
        if fz < -INEQ_TOL {
            return ContactError::Unilateral { foot: i, fz };
        }
        if fx.abs() > mu * fz + INEQ_TOL {
            return ContactError::FrictionCone { foot: i, fx: fx.abs(), limit: mu * fz };
        }
    }
    ContactError::Unilateral { foot: 0, fz: f[1] }
}

/// Minimum-norm ground reactions realizing `wrench` at `points`.
///
/// Minimizes `sum |F_i|^2` subject to `sum F_i = force`,
/// `sum (p_i - com) x F_i = moment`, `Fz >= 0` and `|Fx| <= mu Fz`. The
/// convex QP is solved exactly by enumerating per-contact active sets after
/// trying the unconstrained minimum-norm point.
pub fn distribute_contact_forces(
    wrench: &Wrench,
    points: &[Vector2<f64>],
    com: Vector2<f64>,
    mu: f64,
) -> Result<Vec<ContactForce>, ContactError> {
    if points.is_empty() {
        return Err(ContactError::NoContacts);
    }
    if wrench.force.y < 0.0 {
        return Err(ContactError::NegativeNormalForce(wrench.force.y));
    }
    let a = balance_matrix(points, com);
    let b = rhs(wrench);
    let pack = |f: DVector<f64>| {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| ContactForce {
                foot: i,
                force: Vector2::new(f[2 * i], f[2 * i + 1]),
                point: *p,
            })
            .collect()
    };

    let free = min_norm_free(&a, &b);
    let first_error = match &free {
        Some(f) if feasible(f, mu) => return Ok(pack(free.unwrap())),
        Some(f) => diagnose(f, mu),
        None => ContactError::MomentUnreachable(wrench.moment),
    };

    let n = points.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut modes = vec![Mode::Free; n];
    for code in 0..MODES.len().pow(n as u32) {
        let mut c = code;
        for m in modes.iter_mut() {
            *m = MODES[c % MODES.len()];
            c /= MODES.len();
        }
        if free.is_some() && modes.iter().all(|m| *m == Mode::Free) {
            continue;
        }
        if let Some(f) = min_norm_with_modes(&a, &b, &modes, mu) {
            if feasible(&f, mu) {
                let cost = f.norm_squared();
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, f));
                }
            }
        }
    }
    match best {
        Some((_, mut f)) => {
            // Clip round-off below the cone before handing out.
            for i in 0..n {
                f[2 * i + 1] = f[2 * i + 1].max(0.0);
                let lim = mu * f[2 * i + 1];
                f[2 * i] = f[2 * i].clamp(-lim, lim);
            }
            Ok(pack(f))
        }
        None => Err(first_error),
    }
}

/// Max abs residual of the force and moment balance.
pub fn balance_residual(wrench: &Wrench, forces: &[ContactForce], com: Vector2<f64>) -> f64 {
    let net: Vector2<f64> = forces.iter().map(|c| c.force).sum();
    let moment: f64 = forces.iter().map(|c| cross(c.point - com, c.force)).sum();
    (net - wrench.force).amax().max((moment - wrench.moment).abs())
}
