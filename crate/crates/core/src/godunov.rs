//! First-order Godunov finite-volume scheme with the (A, B) interface flux,
//! used as an independent reference for the explicit formulas.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux::{Connection, ConvexFlux};
use crate::paths::InitialProfile;

pub const DEFAULT_CFL: f64 = 0.45;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GodunovError {
    #[error("cell average {value} at x = {x} left the bound {bound}")]
    UnstableBlowup { x: f64, value: f64, bound: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cfl must lie in (0, 0.5], got {0}")]
    InvalidCfl(f64),
    #[error("target time {target} is before the current time {now}")]
    TimeReversed { target: f64, now: f64 },
}

/// `max(h(max(a, θ)), h(min(b, θ)))`.
pub fn godunov_flux(h: &ConvexFlux, a: f64, b: f64) -> f64 {
    let theta = h.theta();
    h.eval(a.max(theta)).max(h.eval(b.min(theta)))
}

/// `max(g(max(a, A)), f(min(b, B)))` across `x = 0`.
pub fn interface_flux(f: &ConvexFlux, g: &ConvexFlux, conn: &Connection, a: f64, b: f64) -> f64 {
    g.eval(a.max(conn.a)).max(f.eval(b.min(conn.b)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FVMState {
    pub centers: Vec<f64>,
    pub averages: Vec<f64>,
    pub t_now: f64,
    pub dx: f64,
    /// Index of the first cell right of `x = 0`.
    pub interface_face: usize,
    /// Averages may not leave `[-2 bound, 2 bound]`.
    pub bound: f64,
}

/// One step's bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub mass_before: f64,
    pub mass_after: f64,
    /// `F_left - F_right` at the domain ends.
    pub boundary_flux: f64,
}

impl StepReport {
    /// Mass change not accounted for by the boundary fluxes.
    pub fn conservation_defect(&self) -> f64 {
        (self.mass_after - self.mass_before - self.dt * self.boundary_flux).abs()
    }
}

pub struct Godunov<'a> {
    pub f: &'a ConvexFlux,
    pub g: &'a ConvexFlux,
    pub conn: Connection,
}

impl FVMState {
    /// `n` cells on `[lo, hi]` with `lo < 0 < hi`; the domain is shifted so
    /// that a face sits at 0. Averages of piecewise-constant data are exact.
    pub fn new(lo: f64, hi: f64, n: usize, data: &InitialProfile, conn: &Connection, thetas: (f64, f64)) -> Result<Self, GodunovError> {
        if !(lo < 0.0 && hi > 0.0) || n < 2 {
            return Err(GodunovError::InvalidGrid(format!("[{lo}, {hi}] with {n} cells must straddle 0")));
        }
        let dx = (hi - lo) / n as f64;
        let left_cells = ((-lo / dx).round() as usize).clamp(1, n - 1);
        let start = -(left_cells as f64) * dx;
        let centers: Vec<f64> = (0..n).map(|i| start + (i as f64 + 0.5) * dx).collect();
        let averages = centers
            .iter()
            .map(|&c| (data.v0(c + 0.5 * dx) - data.v0(c - 0.5 * dx)) / dx)
            .collect();
        let bound = data
            .sup_norm()
            .max(conn.a.abs())
            .max(conn.b.abs())
            .max(thetas.0.abs())
            .max(thetas.1.abs())
            .max(1e-12);
        Ok(FVMState {
            centers,
            averages,
            t_now: 0.0,
            dx,
            interface_face: left_cells,
            bound,
        })
    }

    pub fn mass(&self) -> f64 {
        self.averages.iter().sum::<f64>() * self.dx
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u,foot_type,foot_value\n");
        for (x, u) in self.centers.iter().zip(&self.averages) {
            out.push_str(&format!("{x:.16e},{u:.16e},cell,{:.16e}\n", 0.0));
        }
        out
    }
}

impl<'a> Godunov<'a> {
    pub fn new(f: &'a ConvexFlux, g: &'a ConvexFlux, conn: Connection) -> Self {
        Godunov { f, g, conn }
    }

    pub fn initial_state(&self, lo: f64, hi: f64, n: usize, data: &InitialProfile) -> Result<FVMState, GodunovError> {
        FVMState::new(lo, hi, n, data, &self.conn, (self.f.theta(), self.g.theta()))
    }

    fn max_speed(&self, st: &FVMState) -> f64 {
        let k = st.interface_face;
        let left = st.averages[..k]
            .iter()
            .chain(std::iter::once(&self.conn.a))
            .fold(0.0f64, |m, &u| m.max(self.g.deriv(u).abs()));
        st.averages[k..]
            .iter()
            .chain(std::iter::once(&self.conn.b))
            .fold(left, |m, &u| m.max(self.f.deriv(u).abs()))
    }

    /// Face fluxes `F_{1/2 - 1}, ..., F_{n - 1/2}` with outflow ends.
    pub fn face_fluxes(&self, st: &FVMState) -> Vec<f64> {
        let u = &st.averages;
        let n = u.len();
        let k = st.interface_face;
        let mut faces = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let a = u[i.saturating_sub(1)];
            let b = u[i.min(n - 1)];
            let flux = if i == k {
                interface_flux(self.f, self.g, &self.conn, a, b)
            } else if i < k {
                godunov_flux(self.g, a, b)
            } else {
                godunov_flux(self.f, a, b)
            };
            faces.push(flux);
        }
        faces
    }

    pub fn step(&self, st: &mut FVMState, dt: f64) -> Result<StepReport, GodunovError> {
        let faces = self.face_fluxes(st);
        let mass_before = st.mass();
        let r = dt / st.dx;
        for (i, u) in st.averages.iter_mut().enumerate() {
            *u -= r * (faces[i + 1] - faces[i]);
        }
        st.t_now += dt;
        let limit = 2.0 * st.bound;
        if let Some((i, &v)) = st
            .averages
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= limit))
        {
            return Err(GodunovError::UnstableBlowup {
                x: st.centers[i],
                value: v,
                bound: limit,
            });
        }
        Ok(StepReport {
            dt,
            mass_before,
            mass_after: st.mass(),
            boundary_flux: faces[0] - faces[faces.len() - 1],
        })
    }

    /// Advances to `target` with `dt = cfl dx / max|h'|`, calling `monitor`
    /// after every step.
    pub fn evolve_with<M: FnMut(&FVMState, &StepReport)>(
        &self,
        st: &mut FVMState,
        target: f64,
        cfl: f64,
        mut monitor: M,
    ) -> Result<(), GodunovError> {
        if !(cfl > 0.0 && cfl <= 0.5) {
            return Err(GodunovError::InvalidCfl(cfl));
        }
        if target < st.t_now {
            return Err(GodunovError::TimeReversed {
                target,
                now: st.t_now,
            });
        }
        while st.t_now < target {
            let speed = self.max_speed(st).max(1e-12);
            let mut dt = cfl * st.dx / speed;
            let last = st.t_now + dt >= target * (1.0 - 1e-14);
            if last {
                dt = target - st.t_now;
            }
            let rep = self.step(st, dt)?;
            monitor(st, &rep);
            if last {
                st.t_now = target;
            }
        }
        Ok(())
    }

    pub fn evolve(&self, st: &mut FVMState, target: f64, cfl: f64) -> Result<(), GodunovError> {
        self.evolve_with(st, target, cfl, |_, _| {})
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flux(key: &str) -> ConvexFlux {
        ConvexFlux::builtin(key, (-4.0, 4.0)).unwrap()
    }

    #[test]
    fn godunov_flux_examples() {
        let b = flux("burgers");
        assert_eq!(godunov_flux(&b, 1.0, 0.0), 0.5);
        assert_eq!(godunov_flux(&b, -1.0, 1.0), 0.0);
        let s = flux("square");
        assert_eq!(godunov_flux(&s, 0.7, 0.7), s.eval(0.7));
    }

    #[test]
    fn interface_flux_examples() {
        let f = flux("shifted");
        let g = flux("square");
        let conn = Connection::new(0.0, 2.0);
        assert_eq!(interface_flux(&f, &g, &conn, 0.0, 0.0), 0.0);
        assert_eq!(interface_flux(&f, &g, &conn, conn.a, conn.b), g.eval(conn.a));
        let b = flux("burgers");
        let c = Connection::new(0.0, 0.0);
        for &(a, bb) in &[(1.0, -0.5), (-1.0, 2.0), (0.3, 0.3)] {
            assert_eq!(interface_flux(&b, &b, &c, a, bb), godunov_flux(&b, a, bb));
        }
    }

    #[test]
    fn constant_data_is_stationary() {
        let b = flux("burgers");
        let solver = Godunov::new(&b, &b, Connection::new(0.0, 0.0));
        let mut st = solver.initial_state(-1.0, 1.0, 64, &InitialProfile::constant(0.6)).unwrap();
        solver.evolve(&mut st, 1.0, DEFAULT_CFL).unwrap();
        assert!(st.averages.iter().all(|&u| (u - 0.6).abs() < 1e-14));
        assert_eq!(st.t_now, 1.0);
    }

    #[test]
    fn face_sits_at_zero() {
        let st = FVMState::new(-1.3, 2.0, 100, &InitialProfile::constant(0.0), &Connection::new(0.0, 0.0), (0.0, 0.0)).unwrap();
        let k = st.interface_face;
        assert!((st.centers[k] - 0.5 * st.dx).abs() < 1e-12);
        assert!((st.centers[k - 1] + 0.5 * st.dx).abs() < 1e-12);
    }

    #[test]
    fn burgers_shock_position() {
        let b = flux("burgers");
        let data = InitialProfile::piecewise_constant(vec![0.0], vec![1.0, 0.0]).unwrap();
        let solver = Godunov::new(&b, &b, Connection::new(0.0, 0.0));
        let mut st = solver.initial_state(-1.0, 2.0, 600, &data).unwrap();
        solver.evolve(&mut st, 1.0, DEFAULT_CFL).unwrap();
        let i = st.averages.iter().position(|&u| u < 0.5).unwrap();
        assert!((st.centers[i] - 0.5).abs() <= 2.0 * st.dx);
    }

    #[test]
    fn rejects_bad_cfl() {
        let b = flux("burgers");
        let solver = Godunov::new(&b, &b, Connection::new(0.0, 0.0));
        let mut st = solver.initial_state(-1.0, 1.0, 16, &InitialProfile::constant(0.0)).unwrap();
        assert_eq!(solver.evolve(&mut st, 1.0, 0.7), Err(GodunovError::InvalidCfl(0.7)));
    }
}
