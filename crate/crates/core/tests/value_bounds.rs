//! The computed value never exceeds the cost of an admissible curve.

use discflux::driver::FormulaRun;
use discflux::flux::ConvexFlux;
use discflux::hj::value_at;
use discflux::paths::{InitialProfile, Sign};
use discflux::scenarios::{builtin, Loaded};
use proptest::prelude::*;

const T: f64 = 1.0;
const N: usize = 256;
const TOL: f64 = 1e-6;

struct Fixture {
    s: Loaded,
    run: FormulaRun,
}

fn fixture(name: &str) -> Fixture {
    let s = builtin(name).unwrap();
    let run = FormulaRun::new(&s, N, T).unwrap();
    Fixture { s, run }
}

fn leg(h: &ConvexFlux, p: f64) -> Option<f64> {
    h.legendre(p).ok()
}

/// Cost of `(y, 0) -> (0, t2) -> (0, t1) -> (x, t)` with `y` on the side
/// opposite to or the same as `x`; resting on the interface costs `-f(B)`.
fn three_piece(fx: &Fixture, x: f64, y: f64, t2: f64, t1: f64) -> Option<f64> {
    let (f, g) = (&fx.s.f, &fx.s.g);
    let side = |z: f64| if z > 0.0 { f } else { g };
    let data: &InitialProfile = &fx.run.data;
    let first = if t2 > 0.0 { t2 * leg(side(y), -y / t2)? } else if y == 0.0 { 0.0 } else { return None };
    let rest = -(t1 - t2) * f.eval(fx.s.connection.b);
    let last = (T - t1) * leg(side(x), x / (T - t1))?;
    Some(data.v0(y) + first + rest + last)
}

fn direct(fx: &Fixture, x: f64, y: f64) -> Option<f64> {
    let h = if x > 0.0 { &fx.s.f } else { &fx.s.g };
    Some(fx.run.data.v0(y) + T * leg(h, (x - y) / T)?)
}

fn scenarios() -> Vec<Fixture> {
    ["thm32_shifted", "counterexample_ghoshal", "noncritical_ghoshal"]
        .into_iter()
        .map(fixture)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_curves_never_beat_the_value(
        which in 0usize..3,
        xr in 0.01f64..1.0,
        side in prop::bool::ANY,
        yr in -1.0f64..1.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        thread_local! { static FX: Vec<Fixture> = scenarios(); }
        FX.with(|all| {
            let fx = &all[which];
            let x = if side { xr } else { -xr };
            let pb = fx.run.problem(&fx.s);
            let v = value_at(x, T, &pb).unwrap().v;
            let (t2, t1) = (a.min(b) * 0.98, a.max(b) * 0.98);
            let y = 2.0 * yr;
            for cost in [three_piece(fx, x, y, t2, t1), direct(fx, x, y).filter(|_| Sign::of(x) == Sign::of(y))] {
                if let Some(c) = cost {
                    prop_assert!(v <= c + TOL, "v({x}) = {v} > {c} via y = {y}, t2 = {t2}, t1 = {t1}");
                }
            }
            Ok(())
        })?;
    }
}

#[test]
fn interface_value_is_capped_by_both_sides() {
    for fx in scenarios() {
        let p = &fx.run.profile;
        for k in 0..p.times.len() {
            assert!(p.interface_value[k] <= p.b_plus[k].min(p.b_minus[k]) + 1e-12);
        }
    }
}

#[test]
fn resting_on_the_interface_bounds_the_next_value() {
    for fx in scenarios() {
        let p = &fx.run.profile;
        let rest = -fx.s.f.eval(fx.s.connection.b);
        for k in 1..p.times.len() {
            let dt = p.times[k] - p.times[k - 1];
            assert!(p.interface_value[k] <= p.interface_value[k - 1] + dt * rest + 1e-9, "node {k}");
        }
    }
}
