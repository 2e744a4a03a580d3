//! Closed-form tail bounds, the helper functions `psi`, `f_eps`, `g(eps)`,
//! and the zigzag exponent of the cop number of `G(n, n^{x-1})`.
//!
//! Everything is plain `f64`; the values are compared against simulation,
//! not used as certificates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("{name} = {value} outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

fn domain(name: &'static str, value: f64, domain: &'static str) -> BoundError {
    BoundError::Domain { name, value, domain }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundForm {
    /// `P(|X - EX| >= eps EX) <= 2 exp(-eps^2 EX / 3)`
    RelativeChernoff,
    /// `P(|X - np| > a) < 2 exp(-2 a^2 / n)`
    AdditiveChernoff,
    /// `P(X <= EX - t) <= exp(-EX psi(-t / EX))`
    LowerChernoff,
    /// `P(X >= EX + t) <= exp(-t^2 / (2 (EX + t/3)))`
    Bernstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub value: f64,
    pub form: BoundForm,
}

/// Two-sided relative Chernoff bound, valid for `0 < eps < 3/2`.
pub fn chernoff_relative(mean: f64, eps: f64) -> Result<TailBound, BoundError> {
    if !(mean > 0.0) {
        return Err(domain("mean", mean, "(0, inf)"));
    }
    if !(eps > 0.0 && eps < 1.5) {
        return Err(domain("eps", eps, "(0, 3/2)"));
    }
    Ok(TailBound {
        value: 2.0 * (-eps * eps * mean / 3.0).exp(),
        form: BoundForm::RelativeChernoff,
    })
}

/// Additive (Hoeffding-type) bound for `Bin(n, p)`; independent of `p`.
pub fn chernoff_additive(n: u64, _p: f64, a: f64) -> Result<TailBound, BoundError> {
    if n == 0 {
        return Err(domain("n", 0.0, "[1, inf)"));
    }
    if !(a > 0.0) {
        return Err(domain("a", a, "(0, inf)"));
    }
    Ok(TailBound {
        value: 2.0 * (-2.0 * a * a / n as f64).exp(),
        form: BoundForm::AdditiveChernoff,
    })
}

/// Lower-tail bound `P(X <= EX - t) <= exp(-EX psi(-t/EX))`, `0 < t < EX`
/// allowed up to `t = EX` (where `psi(-1) = 1`).
pub fn chernoff_lower(mean: f64, t: f64) -> Result<TailBound, BoundError> {
    if !(mean > 0.0) {
        return Err(domain("mean", mean, "(0, inf)"));
    }
    if !(t > 0.0 && t <= mean) {
        return Err(domain("t", t, "(0, mean]"));
    }
    let x = -t / mean;
    let psi_x = if x <= -1.0 { 1.0 } else { psi(x)? };
    Ok(TailBound {
        value: (-mean * psi_x).exp(),
        form: BoundForm::LowerChernoff,
    })
}

/// Bernstein upper tail for a sum of independent indicators with mean
/// `mean`: `P(X >= mean + t) <= exp(-t^2 / (2 (mean + t/3)))`.
pub fn bernstein_upper(mean: f64, t: f64) -> Result<TailBound, BoundError> {
    if !(mean > 0.0) {
        return Err(domain("mean", mean, "(0, inf)"));
    }
    if !(t > 0.0) {
        return Err(domain("t", t, "(0, inf)"));
    }
    Ok(TailBound {
        value: (-t * t / (2.0 * (mean + t / 3.0))).exp(),
        form: BoundForm::Bernstein,
    })
}

/// `psi(x) = (1+x) log(1+x) - x` for `x > -1`.
pub fn psi(x: f64) -> Result<f64, BoundError> {
    if !(x > -1.0) {
        return Err(domain("x", x, "(-1, inf)"));
    }
    // ln_1p keeps precision near zero.
    Ok((1.0 + x) * x.ln_1p() - x)
}

/// `f_eps(x) = x (log(eps x) - 1)`.
///
/// `eps` is the density slack (`d >= (1/2 + eps) log n`), not a deviation.
/// The closed endpoint `eps = 1` is accepted as a limiting case.
pub fn f_eps(eps: f64, x: f64) -> Result<f64, BoundError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(domain("eps", eps, "(0, 1]"));
    }
    if !(x > 0.0) {
        return Err(domain("x", x, "(0, inf)"));
    }
    Ok(x * ((eps * x).ln() - 1.0))
}

/// Number of bisection halvings used by [`g_eps`].
pub const BISECTION_STEPS: usize = 200;

/// The unique `x` in `(0, 1/eps]` with `f_eps(x) = -1/2`, by bisection.
///
/// `f_eps` is decreasing on the bracket, tends to `0` at `0+` and equals
/// `-1/eps < -1` at `1/eps`. Runs until the bracket stops shrinking in
/// `f64`, which leaves `|f + 1/2|` far below any sensible `tol`.
pub fn g_eps(eps: f64, tol: f64) -> Result<f64, BoundError> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "(0, inf)"));
    }
    let f = |x: f64| f_eps(eps, x);
    let mut lo = f64::MIN_POSITIVE;
    let mut hi = 1.0 / eps;
    f(hi)?;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm > -0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!((f(root)? + 0.5).abs() <= tol.max(1e-12));
    Ok(root)
}

/// `f_eps` and its root bundled for a fixed `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsFunctions {
    pub eps: f64,
    pub g_eps: f64,
    pub tolerance: f64,
}

impl EpsFunctions {
    pub fn new(eps: f64, tolerance: f64) -> Result<Self, BoundError> {
        Ok(EpsFunctions {
            eps,
            g_eps: g_eps(eps, tolerance)?,
            tolerance,
        })
    }

    /// Degree threshold `eps g(eps) d` below which vertices join `D`.
    pub fn degree_threshold(&self, d: f64) -> f64 {
        self.eps * self.g_eps * d
    }

    /// `(eps g(eps) / 4)`, the lower expansion constant for set spheres.
    pub fn set_sphere_lower(&self) -> f64 {
        self.eps * self.g_eps / 4.0
    }

    /// `(eps / e)^2`, the lower constant for single-vertex spheres.
    pub fn sphere_lower(&self) -> f64 {
        (self.eps / std::f64::consts::E).powi(2)
    }
}

/// Zigzag exponent: for `x` between consecutive breakpoints `1/(k+1)` and
/// `1/k`, returns `(k/2) x` when `k` is even and `1 - ((k+1)/2) x` when
/// `k` is odd. Peaks at `1/(2j)` with value `1/2`, dips at `1/(2j+1)` with
/// value `j/(2j+1)`, and falls to `0` at `x = 1`.
pub fn zigzag(x: f64) -> Result<f64, BoundError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain("x", x, "(0, 1]"));
    }
    let inv = 1.0 / x;
    let nearest = inv.round();
    // Exact values on breakpoints, where float rounding would otherwise
    // leave the two adjacent pieces a few ulps apart.
    if nearest >= 1.0 && (inv - nearest).abs() <= 4.0 * f64::EPSILON * nearest {
        let k = nearest as u64;
        return Ok(if k % 2 == 0 {
            0.5
        } else {
            let j = (k - 1) / 2;
            j as f64 / k as f64
        });
    }
    let k = inv.floor() as u64;
    Ok(if k % 2 == 0 {
        (k / 2) as f64 * x
    } else {
        1.0 - ((k + 1) / 2) as f64 * x
    })
}

/// The two piece formulas meeting at breakpoint `1/k`, evaluated there:
/// `(left piece, right piece)`. Used to check continuity.
pub fn zigzag_pieces_at(k: u64) -> (f64, f64) {
    let x = 1.0 / k as f64;
    let piece = |kk: u64| {
        if kk % 2 == 0 {
            (kk / 2) as f64 * x
        } else {
            1.0 - ((kk + 1) / 2) as f64 * x
        }
    };
    // Left of 1/k lies in [1/(k+1), 1/k], right in [1/k, 1/(k-1)].
    (piece(k), piece(k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn chernoff_relative_values() {
        let b = chernoff_relative(3.0, 1.0).unwrap();
        assert!((b.value - 2.0 / E).abs() < 1e-12);
        assert!((chernoff_relative(3.0, 1e-9).unwrap().value - 2.0).abs() < 1e-12);
        assert!(chernoff_relative(3.0, 1.5).is_err());
        assert!(chernoff_relative(0.0, 0.5).is_err());
    }

    #[test]
    fn chernoff_additive_values() {
        let b = chernoff_additive(100, 0.5, 10.0).unwrap();
        assert!((b.value - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
        assert!((b.value - 0.27067).abs() < 1e-5);
        assert!((chernoff_additive(100, 0.5, 1e-9).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert!((psi(E - 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(psi(-1.0).is_err());
        assert!(psi(-0.5).unwrap() > 0.0);
    }

    #[test]
    fn f_eps_values() {
        for eps in [0.1, 0.5, 0.9] {
            assert!((f_eps(eps, 1.0 / eps).unwrap() + 1.0 / eps).abs() < 1e-12);
            assert!(f_eps(eps, E / eps).unwrap().abs() < 1e-12);
            let x = eps / (E * E);
            let expect = x * (2.0 * eps.ln() - 3.0);
            assert!((f_eps(eps, x).unwrap() - expect).abs() < 1e-12);
            assert!(expect >= -3.0 / (E * E));
        }
        assert!(f_eps(0.0, 1.0).is_err());
        assert!(f_eps(0.5, 0.0).is_err());
    }

    #[test]
    fn g_eps_defining_equation() {
        for i in 1..10 {
            let eps = i as f64 / 10.0;
            let g = g_eps(eps, 1e-10).unwrap();
            assert!((f_eps(eps, g).unwrap() + 0.5).abs() <= 1e-10);
            assert!(g > eps / (E * E));
            assert!(g <= 1.0 / eps);
        }
        assert!(g_eps(1.0 - 1e-9, 1e-10).unwrap() > (1.0 - 1e-9) / (E * E));
    }

    #[test]
    fn psi_identity_at_root() {
        for eps in [0.1, 0.5, 0.9] {
            let g = g_eps(eps, 1e-12).unwrap();
            let v = psi(-1.0 + eps * g).unwrap();
            assert!((v - (1.0 - eps / 2.0)).abs() < 1e-9, "eps={eps}: {v}");
        }
    }

    #[test]
    fn zigzag_values() {
        assert_eq!(zigzag(0.5).unwrap(), 0.5);
        assert!((zigzag(1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((zigzag(0.2).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(zigzag(1.0).unwrap(), 0.0);
        assert!((zigzag(0.75).unwrap() - 0.25).abs() < 1e-15);
        assert!(zigzag(0.0).is_err());
        assert!(zigzag(1.01).is_err());
    }

    #[test]
    fn zigzag_pieces_agree_at_breakpoints() {
        for k in 2..=12 {
            let (l, r) = zigzag_pieces_at(k);
            assert!((l - r).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn lower_and_bernstein_domain() {
        assert!(chernoff_lower(10.0, 0.0).is_err());
        assert!(chernoff_lower(10.0, 11.0).is_err());
        assert!((chernoff_lower(10.0, 10.0).unwrap().value - (-10.0f64).exp()).abs() < 1e-15);
        assert!(bernstein_upper(10.0, -1.0).is_err());
    }
}
