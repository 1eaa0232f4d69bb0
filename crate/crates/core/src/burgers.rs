//! Complex Burgers equation `dM/dt = -c M dM/dz`: closed-form semicircle
//! solutions, finite-difference residuals, the conservation law of the
//! inverse of `1/M`, and the parabolic rescaling.

use crate::drivers::DriverPath;
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::output::CsvTable;
use crate::C64;

/// Default finite-difference step, relative to `max(1, |z|)` in space.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// A time-dependent transform `(z, t) -> M_t(z)` together with the Burgers
/// coefficient it is supposed to satisfy.
pub trait BurgersSolution: Sync {
    fn coefficient(&self) -> f64;
    fn eval(&self, z: C64, t: f64) -> C64;
    /// `dM_t/dz`; centered differences unless overridden.
    fn dz(&self, z: C64, t: f64) -> C64 {
        let h = DEFAULT_FD_STEP * z.norm().max(1.0);
        (self.eval(z + h, t) - self.eval(z - h, t)) / (2.0 * h)
    }
}

/// `4 / (z + sqrt(z^2 - 8 c t))`: the solution started from `2/z`.
///
/// With `c = 2` this is twice the Cauchy transform of the centred semicircle
/// law of variance `4t` (support `[-4 sqrt t, 4 sqrt t]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semicircle {
    pub coefficient: f64,
}

impl Semicircle {
    pub const SIMULTANEOUS: Semicircle = Semicircle { coefficient: 2.0 };
    pub const QUAD_DIFF: Semicircle = Semicircle { coefficient: 1.0 };

    /// `sqrt(z^2 - a)` taken as `z sqrt(1 - a/z^2)` with the principal root,
    /// which behaves like `z` at infinity and is continuous on the upper half-plane.
    fn root(&self, z: C64, t: f64) -> C64 {
        let a = 8.0 * self.coefficient * t;
        z * (1.0 - a / (z * z)).sqrt()
    }

    /// Radius of the support of the underlying density at time `t`.
    pub fn support_radius(&self, t: f64) -> f64 {
        (8.0 * self.coefficient * t).sqrt()
    }
}

impl BurgersSolution for Semicircle {
    fn coefficient(&self) -> f64 {
        self.coefficient
    }
    fn eval(&self, z: C64, t: f64) -> C64 {
        4.0 / (z + self.root(z, t))
    }
    fn dz(&self, z: C64, t: f64) -> C64 {
        let s = self.root(z, t);
        -self.eval(z, t) / s
    }
}

/// [`Semicircle::SIMULTANEOUS`] at `(z, t)`.
pub fn semicircle_transform(z: C64, t: f64) -> Result<C64> {
    if !(z.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(z));
    }
    Ok(Semicircle::SIMULTANEOUS.eval(z, t))
}

/// Transform of a sampled driver measure; drivers are interpolated linearly in time.
#[derive(Debug, Clone)]
pub struct PathTransform<'a> {
    pub path: &'a DriverPath,
    pub coefficient: f64,
}

impl BurgersSolution for PathTransform<'_> {
    fn coefficient(&self) -> f64 {
        self.coefficient
    }
    fn eval(&self, z: C64, t: f64) -> C64 {
        let v = self.path.positions_at(t);
        v.iter()
            .zip(&self.path.weights)
            .map(|(&x, &l)| 2.0 * l / (z - x))
            .sum()
    }
    fn dz(&self, z: C64, t: f64) -> C64 {
        let v = self.path.positions_at(t);
        v.iter()
            .zip(&self.path.weights)
            .map(|(&x, &l)| {
                let d = z - x;
                -2.0 * l / (d * d)
            })
            .sum()
    }
}

/// Transform of a measure that does not move in time.
#[derive(Debug, Clone)]
pub struct FrozenMeasure {
    pub measure: AtomicMeasure,
    pub coefficient: f64,
}

impl BurgersSolution for FrozenMeasure {
    fn coefficient(&self) -> f64 {
        self.coefficient
    }
    fn eval(&self, z: C64, _t: f64) -> C64 {
        self.measure.cauchy_unchecked(z)
    }
    fn dz(&self, z: C64, _t: f64) -> C64 {
        self.measure.cauchy_dz_unchecked(z)
    }
}

/// `G_t(z) = c M_{c^2 t}(c z)`.
pub struct Rescaled<'a> {
    pub inner: &'a dyn BurgersSolution,
    pub c: f64,
}

impl BurgersSolution for Rescaled<'_> {
    fn coefficient(&self) -> f64 {
        self.inner.coefficient()
    }
    fn eval(&self, z: C64, t: f64) -> C64 {
        self.c * self.inner.eval(self.c * z, self.c * self.c * t)
    }
    fn dz(&self, z: C64, t: f64) -> C64 {
        self.c * self.c * self.inner.dz(self.c * z, self.c * self.c * t)
    }
}

/// `|dM/dt + c M dM/dz|` by centered differences in `t` (step `h`) and `z`
/// (step `h max(1, |z|)`). Falls back to a forward difference in `t` when `t < h`.
pub fn burgers_residual(m: &dyn BurgersSolution, z: C64, t: f64, h: f64) -> f64 {
    let dt = if t >= h {
        (m.eval(z, t + h) - m.eval(z, t - h)) / (2.0 * h)
    } else {
        (m.eval(z, t + h) - m.eval(z, t)) / h
    };
    let hz = h * z.norm().max(1.0);
    let dz = (m.eval(z + hz, t) - m.eval(z - hz, t)) / (2.0 * hz);
    (dt + m.coefficient() * m.eval(z, t) * dz).norm()
}

/// `re_z,im_z,t,residual` rows.
pub fn residual_csv(rows: &[(C64, f64, f64)]) -> String {
    let mut t = CsvTable::new(&["re_z", "im_z", "t", "residual"]);
    for &(z, time, r) in rows {
        t.nums(&[z.re, z.im, time, r]);
    }
    t.finish()
}

/// Truncated cone `{Im z > beta, Im z > alpha |Re z|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub alpha: f64,
    pub beta: f64,
}

impl Cone {
    /// `alpha = 1`, `beta = 10 * support_radius`.
    pub fn for_support(radius: f64) -> Self {
        Self {
            alpha: 1.0,
            beta: 10.0 * radius,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.im > self.beta && z.im > self.alpha * z.re.abs()
    }
}

/// Solves `1/M_t(w) = z` for `w` by Newton's method from `w = 2z`.
pub fn inverse_reciprocal(m: &dyn BurgersSolution, z: C64, t: f64) -> Result<C64> {
    let mut w = 2.0 * z;
    for _ in 0..100 {
        let mv = m.eval(w, t);
        let f = 1.0 / mv - z;
        let df = -m.dz(w, t) / (mv * mv);
        let step = f / df;
        w -= step;
        if !w.is_finite() || w.im <= 0.0 {
            break;
        }
        if step.norm() <= 1e-15 * w.norm().max(1.0) {
            return Ok(w);
        }
    }
    Err(Error::NewtonDiverged { z })
}

/// `|V_{t2}(z) - V_{t1}(z) - 2 (t2 - t1) / z|` with `V_t = (1/M_t)^{-1}`.
///
/// The `2` is the simultaneous-case coefficient; for a general coefficient
/// `c` the increment is `c (t2 - t1) / z`.
pub fn voiculescu_conservation(m: &dyn BurgersSolution, z: C64, t1: f64, t2: f64, cone: Cone) -> Result<f64> {
    if !cone.contains(z) {
        return Err(Error::InvalidConfig(format!(
            "z = {z} outside the cone Im z > {}, Im z > {} |Re z|",
            cone.beta, cone.alpha
        )));
    }
    let v1 = inverse_reciprocal(m, z, t1)?;
    let v2 = inverse_reciprocal(m, z, t2)?;
    Ok((v2 - v1 - m.coefficient() * (t2 - t1) / z).norm())
}

/// Burgers residual of the rescaled family `c M_{c^2 t}(c z)`.
pub fn scaling_check(m: &dyn BurgersSolution, c: f64, z: C64, t: f64) -> f64 {
    burgers_residual(&Rescaled { inner: m, c }, z, t, DEFAULT_FD_STEP)
}

/// `|M_t(z + c t M_0(z)) - M_0(z)|`: constancy along straight characteristics.
pub fn characteristics_defect(m: &dyn BurgersSolution, z: C64, t: f64) -> f64 {
    let m0 = m.eval(z, 0.0);
    (m.eval(z + m.coefficient() * t * m0, t) - m0).norm()
}
