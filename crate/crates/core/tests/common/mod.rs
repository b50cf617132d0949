#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|u|^e sign(u)`, written out here so the oracle does not share code with
/// the library's nonlinearity.
pub fn odd_pow(u: f64, e: f64) -> f64 {
    u.signum() * u.abs().powf(e)
}

pub fn power_sum(p: f64, q: f64) -> impl Fn(f64) -> f64 {
    move |u| odd_pow(u, p) + odd_pow(u, q)
}

#[derive(Debug, Clone, Copy)]
pub struct OraclePoint {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

/// Classical fixed-step RK4 for `u'' + (n-1)/r u' + f(u) = 0` from the
/// origin, where the friction term is replaced by its limit `-(n-1) f/n`.
///
/// Records every `every`-th step and stops at `r_end` or at the first sign
/// change of `u`, returning the linearly interpolated root in the latter case.
pub fn rk4_radial(
    n: u32,
    f: &dyn Fn(f64) -> f64,
    u0: f64,
    h: f64,
    r_end: f64,
    every: usize,
) -> (Vec<OraclePoint>, Option<f64>) {
    let nm1 = f64::from(n) - 1.0;
    let nf = f64::from(n);
    let rhs = |r: f64, u: f64, v: f64| -> (f64, f64) {
        if r == 0.0 {
            (v, -f(u) / nf)
        } else {
            (v, -nm1 * v / r - f(u))
        }
    };
    let steps = (r_end / h).round() as usize;
    let (mut u, mut v) = (u0, 0.0);
    let mut out = vec![OraclePoint { r: 0.0, u, du: v }];
    for i in 0..steps {
        let r = i as f64 * h;
        let (k1u, k1v) = rhs(r, u, v);
        let (k2u, k2v) = rhs(r + h / 2.0, u + h / 2.0 * k1u, v + h / 2.0 * k1v);
        let (k3u, k3v) = rhs(r + h / 2.0, u + h / 2.0 * k2u, v + h / 2.0 * k2v);
        let (k4u, k4v) = rhs(r + h, u + h * k3u, v + h * k3v);
        let un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if un <= 0.0 {
            return (out, Some(r + h * u / (u - un)));
        }
        u = un;
        v = vn;
        if (i + 1) % every == 0 {
            out.push(OraclePoint { r: (i + 1) as f64 * h, u, du: v });
        }
    }
    (out, None)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub const MP_BITS: u32 = 256;

pub fn mp(x: f64) -> supercrit::Mp {
    supercrit::Mp::new(x, MP_BITS)
}

/// The Lin-Ni profile `(2p k / (k^2 + p (p-1)^2 r^2))^(1/(p-1))`,
/// `k = np - n - 2p`, evaluated in 256-bit arithmetic.
pub fn lin_ni_profile_mp(n: u32, p: f64, r: &supercrit::Mp) -> supercrit::Mp {
    use supercrit::Real;
    let nf = f64::from(n);
    let k = mp(nf * p - nf - 2.0 * p);
    let num = mp(2.0 * p) * &k;
    let den = k.clone() * &k + mp(p * (p - 1.0) * (p - 1.0)) * &(r.clone() * r);
    (num / den).powf(1.0 / (p - 1.0))
}

/// `(u, u', u'')` at `r` from fourth-order central differences of `u` in
/// 256-bit arithmetic with step `1e-12 r`.
pub fn mp_derivatives(u: impl Fn(&supercrit::Mp) -> supercrit::Mp, r: f64) -> (f64, f64, f64) {
    use supercrit::Real;
    let h = mp(1e-12 * r);
    let at = |k: f64| u(&(mp(r) + mp(k) * &h));
    let (m2, m1, z, p1, p2) = (at(-2.0), at(-1.0), at(0.0), at(1.0), at(2.0));
    let du = (-(p2.clone()) + mp(8.0) * &p1 - mp(8.0) * &m1 + m2.clone()) / (mp(12.0) * &h);
    let upp = (-p2 + mp(16.0) * &p1 - mp(30.0) * &z + mp(16.0) * &m1 - m2) / (mp(12.0) * &(h.clone() * &h));
    (z.to_f64(), du.to_f64(), upp.to_f64())
}

/// Relative residuals of the second-order equation and of `u' = -A r u^p`
/// for the Lin-Ni profile at `r`.
pub fn lin_ni_residuals(n: u32, p: f64, a: f64, r: f64) -> (f64, f64) {
    let (u, du, upp) = mp_derivatives(|x| lin_ni_profile_mp(n, p, x), r);
    let f = u.powf(p) + u.powf(2.0 * p - 1.0);
    let friction = (f64::from(n) - 1.0) / r * du;
    let scale = upp.abs().max(friction.abs()).max(f);
    let second = ((upp + friction + f) / scale).abs();
    let first = ((du + a * r * u.powf(p)) / du).abs();
    (second, first)
}
