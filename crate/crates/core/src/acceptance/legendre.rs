use crate::flux::{ConvexFlux, FluxError};
use crate::numeric::golden_min;

use super::{Check, Thresholds};

const FLUX_KEYS: [&str; 5] = ["burgers", "square", "shifted", "quartic", "sextic_plus1"];
const BRACKET: (f64, f64) = (-1.5, 1.5);
const SAMPLES: usize = 100;
const TABLE: usize = 20_001;

/// `h**(u) = sup_p {p u - h*(p)}`: the discrete maximum over `h*` tabulated
/// on a uniform slope grid, refined by golden section between its neighbours.
pub fn tabulated_biconjugate(h: &ConvexFlux, points: usize) -> Result<impl Fn(f64) -> f64 + '_, FluxError> {
    let (p_lo, p_hi) = h.slope_range();
    let step = (p_hi - p_lo) / (points - 1) as f64;
    let slopes: Vec<f64> = (0..points).map(|j| p_lo + j as f64 * step).collect();
    let table = slopes.iter().map(|&p| h.legendre(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(move |u: f64| {
        let phi = |j: usize| slopes[j] * u - table[j];
        let best = (0..slopes.len())
            .max_by(|&a, &b| phi(a).partial_cmp(&phi(b)).unwrap())
            .unwrap();
        let lo = slopes[best.saturating_sub(1)];
        let hi = slopes[(best + 1).min(slopes.len() - 1)];
        let negated = |p: f64| h.legendre(p).map_or(f64::INFINITY, |c| c - p * u);
        let (_, value) = golden_min(negated, lo, hi, 1e-14);
        (-value).max(phi(best))
    })
}

fn samples(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let (a, b) = (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    (0..SAMPLES).map(move |i| a + (b - a) * i as f64 / (SAMPLES - 1) as f64)
}

struct Errors {
    involution: f64,
    envelope: f64,
    chain: f64,
}

fn measure(h: &ConvexFlux) -> Result<Errors, FluxError> {
    let (lo, hi) = h.bracket();
    let biconj = tabulated_biconjugate(h, TABLE)?;
    let (p_lo, p_hi) = h.slope_range();
    let mut e = Errors {
        involution: 0.0,
        envelope: 0.0,
        chain: 0.0,
    };
    for u in samples(lo, hi) {
        e.involution = e.involution.max((biconj(u) - h.eval(u)).abs());
        let p = h.deriv(u);
        let at_state = h.legendre(p)? - (u * p - h.eval(u));
        e.envelope = e.envelope.max(at_state.abs());
        e.chain = e.chain.max((h.deriv_inverse(p)? - u).abs());
    }
    for p in samples(p_lo, p_hi) {
        let q = h.deriv_inverse(p)?;
        let dual = h.eval(q) - (p * q - h.legendre(p)?);
        e.envelope = e.envelope.max(dual.abs());
    }
    Ok(e)
}

pub(crate) fn criterion(th: &Thresholds) -> Check {
    let mut worst = Errors {
        involution: 0.0,
        envelope: 0.0,
        chain: 0.0,
    };
    for key in FLUX_KEYS {
        let e = match ConvexFlux::builtin(key, BRACKET).and_then(|h| measure(&h)) {
            Ok(e) => e,
            Err(err) => return Check::error(format!("{key}: {err}")),
        };
        worst.involution = worst.involution.max(e.involution);
        worst.envelope = worst.envelope.max(e.envelope);
        worst.chain = worst.chain.max(e.chain);
    }
    let passed = worst.involution <= th.involution && worst.envelope <= th.envelope && worst.chain <= th.inverse_chain;
    Check::new(
        passed,
        format!(
            "max |h**-h| {:.2e} (<= {:.0e}), envelope {:.2e} (<= {:.0e}), inverse chain {:.2e} (<= {:.0e})",
            worst.involution, th.involution, worst.envelope, th.envelope, worst.chain, th.inverse_chain
        ),
    )
}
