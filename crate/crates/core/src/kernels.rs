//! Pointwise evaluators: the kernel of `R^k`, heat and Riesz-potential
//! kernels and their truncations, the extremizer families, and the radial
//! profile integrals of the odd-power operator applied to a truncated power.

use crate::error::{domain, Error, Result};
use crate::quadrature::{
    adaptive_quad, adaptive_quad_singular, cos_zero_points, oscillatory_quad_sink, split_quad, QuadSpec,
};
use crate::special_functions::{dawson, ln_gamma_pos, reg_gamma_window, reg_inc_beta, reg_lower_inc_gamma, reg_upper_inc_gamma};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

/// A power of `i`, stored as an exponent modulo 4 so phase identities stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QuarterTurns(u8);

impl QuarterTurns {
    pub const ONE: Self = Self(0);
    pub const I: Self = Self(1);

    /// `i^n` for any integer `n`.
    pub fn pow_i(n: i64) -> Self {
        Self(n.rem_euclid(4) as u8)
    }

    /// `(-1)^n`.
    pub fn sign(n: i64) -> Self {
        Self::pow_i(2 * n.rem_euclid(2))
    }

    pub fn count(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Self((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Multiply a complex number by this phase without rounding.
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self.0 {
            0 => z,
            1 => Complex64::new(-z.im, z.re),
            2 => -z,
            _ => Complex64::new(z.im, -z.re),
        }
    }
}

impl std::ops::Mul for QuarterTurns {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self((self.0 + o.0) % 4)
    }
}

impl fmt::Display for QuarterTurns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function of the form `prefactor * (z/|z|)^k * profile(|z|)`.
#[derive(Clone)]
pub struct WindingRadial {
    pub k: i64,
    pub prefactor: QuarterTurns,
    profile: Profile,
}

impl fmt::Debug for WindingRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindingRadial").field("k", &self.k).field("prefactor", &self.prefactor).finish_non_exhaustive()
    }
}

impl WindingRadial {
    pub fn new(k: i64, prefactor: QuarterTurns, profile: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { k, prefactor, profile: Arc::new(profile) }
    }

    pub fn profile(&self, r: f64) -> Complex64 {
        (self.profile)(r)
    }

    /// Value at `z`; zero at the origin.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.prefactor.apply(unit_power(z / r, self.k) * self.profile(r))
    }
}

/// Truncation parameters shared by the power-type extremizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    pub eps: f64,
    pub r: f64,
    p: f64,
}

impl TruncationParams {
    pub fn new(p: f64, eps: f64, r: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(domain("TruncationParams", format!("p = {p} must exceed 1")));
        }
        if !(eps > 0.0 && eps < 1.0 / p) {
            return Err(domain("TruncationParams", format!("eps = {eps} outside (0, 1/p)")));
        }
        if !(r > 0.0) {
            return Err(domain("TruncationParams", format!("r = {r} must be positive")));
        }
        Ok(Self { eps, r, p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// 1/p - eps.
    pub fn sigma(&self) -> f64 {
        1.0 / self.p - self.eps
    }

    /// 1/p + eps.
    pub fn alpha(&self) -> f64 {
        1.0 / self.p + self.eps
    }
}

fn unit_power(u: Complex64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let v = u.powi(k.unsigned_abs() as i32);
    if k > 0 {
        v
    } else {
        v.conj()
    }
}

fn nonzero(func: &'static str, z: Complex64) -> Result<f64> {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(domain(func, "z must be nonzero and finite"));
    }
    Ok(r)
}

/// Kernel of `R^k`: `(i^{|k|} |k| / 2 pi) (z/|z|)^{-k} / |z|^2`.
pub fn omega_kernel(k: i64, z: Complex64) -> Result<Complex64> {
    if k == 0 {
        return Err(domain("omega_kernel", "k must be nonzero"));
    }
    let r = nonzero("omega_kernel", z)?;
    let mag = k.unsigned_abs() as f64 / (2.0 * PI * r * r);
    Ok(QuarterTurns::pow_i(k.abs()).apply(unit_power(z / r, -k) * mag))
}

/// `|z|^{-2/p + 2 eps}` on the open unit disc, 0 elsewhere and at the origin.
pub fn phi_eps(p: f64, eps: f64, z: Complex64) -> f64 {
    let r = z.norm();
    if r > 0.0 && r < 1.0 {
        r.powf(-2.0 / p + 2.0 * eps)
    } else {
        0.0
    }
}

/// `(z/|z|)^k phi_eps(p, eps, z)`.
pub fn f_cap_eps(k: i64, p: f64, eps: f64, z: Complex64) -> Complex64 {
    let v = phi_eps(p, eps, z);
    if v == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    unit_power(z / z.norm(), k) * v
}

fn check_gauss(func: &'static str, p: f64, eps: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(func, format!("p = {p} must lie in (1, inf)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(func, format!("eps = {eps} outside (0, 1)")));
    }
    Ok(())
}

/// Superposition of dilated Gaussians with radial profile
/// `(1/2) pi^{-1/p} |z|^{-2/p} int_{pi eps^2 |z|^2}^{pi |z|^2 / eps^2} x^{1/p - 1} e^{-x} dx`.
pub fn g_gauss(p: f64, eps: f64, z: Complex64) -> Result<f64> {
    check_gauss("g_gauss", p, eps)?;
    let r = nonzero("g_gauss", z)?;
    Ok(g_gauss_radial(p, eps, r))
}

pub(crate) fn g_gauss_radial(p: f64, eps: f64, r: f64) -> f64 {
    let s = 1.0 / p;
    let x = PI * r * r;
    let w = reg_gamma_window(s, x * eps * eps, x / (eps * eps)).unwrap_or(0.0);
    0.5 * (ln_gamma_pos(s) - s * PI.ln()).exp() * r.powf(-2.0 / p) * w
}

/// Preimage of `g_gauss` under `R^k` for odd `k`, from the double-integral
/// representation (incomplete gamma in the inner variable).
pub fn f_gauss(k: u64, p: f64, eps: f64, z: Complex64) -> Result<Complex64> {
    if k.is_multiple_of(2) {
        return Err(domain("f_gauss", format!("k = {k} must be odd")));
    }
    check_gauss("f_gauss", p, eps)?;
    if !(p > 2.0) {
        return Err(domain("f_gauss", format!("p = {p} must exceed 2")));
    }
    let r = nonzero("f_gauss", z)?;
    let s = 1.0 / p + 0.5;
    let gs = ln_gamma_pos(s).exp();
    let x = PI * r * r;
    let rel = if r > 10.0 / eps { 1e-8 } else { 1e-12 };
    let spec = QuadSpec { abs_tol: 1e-300, rel_tol: rel, max_depth: 50, base_rule_order: 21 };
    let outer = oscillatory_quad_sink(
        |t: f64| {
            let st = t.sin();
            let a = x * st * st;
            gs * reg_gamma_window(s, a * eps * eps, a / (eps * eps)).unwrap_or(0.0) * st.powf(-2.0 / p)
        },
        k,
        0.0,
        &spec,
    )?;
    let mag = (-(1.0 / p + 0.5) * PI.ln()).exp() * r.powf(-2.0 / p) * outer.value;
    Ok(QuarterTurns::pow_i(k as i64).apply(unit_power(z / r, k as i64) * mag))
}

/// Heat kernel `(4 pi t)^{-1} exp(-|z|^2 / 4t)`.
pub fn heat_kernel(t: f64, z: Complex64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("heat_kernel", format!("t = {t} must be positive")));
    }
    Ok((-z.norm_sqr() / (4.0 * t)).exp() / (4.0 * PI * t))
}

fn check_alpha(func: &'static str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(func, format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(())
}

fn riesz_modulus(alpha: f64, r: f64) -> f64 {
    let ln = ln_gamma_pos(1.0 - alpha) - ln_gamma_pos(alpha) - alpha * 4f64.ln();
    ln.exp() / PI * r.powf(2.0 * (alpha - 1.0))
}

/// Kernel of the Riesz potential `L^{-alpha}` on the plane.
pub fn riesz_potential_kernel(alpha: f64, z: Complex64) -> Result<f64> {
    check_alpha("riesz_potential_kernel", alpha)?;
    let r = nonzero("riesz_potential_kernel", z)?;
    Ok(riesz_modulus(alpha, r))
}

/// Closed form of `R^k` applied to the Riesz potential kernel:
/// `i^k 4^{-alpha} pi^{-1} Gamma(k/2 + 1 - alpha) / Gamma(k/2 + alpha) (conj z/|z|)^k |z|^{2 alpha - 2}`.
pub fn rk_riesz_potential(k: u64, alpha: f64, z: Complex64) -> Result<Complex64> {
    check_alpha("rk_riesz_potential", alpha)?;
    let r = nonzero("rk_riesz_potential", z)?;
    let hk = k as f64 / 2.0;
    let ln = ln_gamma_pos(hk + 1.0 - alpha) - ln_gamma_pos(hk + alpha) - alpha * 4f64.ln();
    let mag = ln.exp() / PI * r.powf(2.0 * (alpha - 1.0));
    Ok(QuarterTurns::pow_i(k as i64).apply(unit_power(z.conj() / r, k as i64) * mag))
}

fn check_trunc(func: &'static str, alpha: f64, r: f64) -> Result<()> {
    check_alpha(func, alpha)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain(func, format!("r = {r} must be positive")));
    }
    Ok(())
}

/// Heat-time integral of `t^{alpha-1} K_t / Gamma(alpha)` over `t < r^2`.
pub fn truncated_riesz_lower(alpha: f64, r: f64, z: Complex64) -> Result<f64> {
    check_trunc("truncated_riesz_lower", alpha, r)?;
    let rho = nonzero("truncated_riesz_lower", z)?;
    let x = rho * rho / (4.0 * r * r);
    Ok(riesz_modulus(alpha, rho) * reg_upper_inc_gamma(1.0 - alpha, x)?)
}

/// Heat-time integral over `t > r^2`; bounded at the origin.
pub fn truncated_riesz_upper(alpha: f64, r: f64, z: Complex64) -> Result<f64> {
    check_trunc("truncated_riesz_upper", alpha, r)?;
    let rho = z.norm();
    if rho == 0.0 {
        // limit of rho^{2 alpha - 2} P(1 - alpha, rho^2 / 4 r^2)
        let s = 1.0 - alpha;
        let ln = -ln_gamma_pos(alpha) - alpha * 4f64.ln() - s * (4.0 * r * r).ln() - s.ln();
        return Ok(ln.exp() / PI);
    }
    let x = rho * rho / (4.0 * r * r);
    Ok(riesz_modulus(alpha, rho) * reg_lower_inc_gamma(1.0 - alpha, x)?)
}

/// `R^k` applied to the upper-time truncation, exact up to one quadrature.
///
/// With `X = |z|^2 / 4 r^2`, the modulus is
/// `(|z|/2)^{2 alpha - 2} / (4 pi Gamma(alpha + k/2)) int_0^X v^{k/2 - alpha} e^{-v} (1 - I_{v/X}(alpha, k/2)) dv`
/// and the phase is that of [`rk_riesz_potential`].
pub fn rk_truncated_riesz_upper(k: u64, alpha: f64, r: f64, z: Complex64) -> Result<Complex64> {
    check_trunc("rk_truncated_riesz_upper", alpha, r)?;
    if k == 0 {
        return Ok(Complex64::new(truncated_riesz_upper(alpha, r, z)?, 0.0));
    }
    let rho = nonzero("rk_truncated_riesz_upper", z)?;
    let hk = k as f64 / 2.0;
    let x = rho * rho / (4.0 * r * r);
    let spec = QuadSpec { abs_tol: 1e-300, rel_tol: 1e-13, max_depth: 50, base_rule_order: 21 };
    let e = hk - alpha;
    // e^{-v} kills the integrand well before v = 2e + 80
    let top = x.min(2.0 * e + 80.0);
    let mut pts = vec![0.0];
    for b in [1.0, 4.0, e.max(1.0), 16.0, 64.0] {
        if b < top {
            pts.push(b);
        }
    }
    pts.push(top);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let j = split_quad(
        |v: f64| v.powf(e) * (-v).exp() * (1.0 - reg_inc_beta(alpha, hk, (v / x).min(1.0)).unwrap_or(1.0)),
        &pts,
        (-e).max(0.0),
        &spec,
    )?;
    let mag = (0.5 * rho).powf(2.0 * alpha - 2.0) / (4.0 * PI) * (-ln_gamma_pos(alpha + hk)).exp() * j.value;
    Ok(QuarterTurns::pow_i(k as i64).apply(unit_power(z.conj() / rho, k as i64) * mag))
}

fn asymptotic_coeff(mu: f64, j: usize) -> f64 {
    let mut a = 1.0;
    for i in 1..=j {
        let odd = (2 * i - 1) as f64;
        a *= (4.0 * mu * mu - odd * odd) / (i as f64 * 8.0);
    }
    a
}

/// Coefficients `c_j` of the large-argument expansion
/// `profile(y) ~ sum_{j >= 1} c_j y^{-2j}`.
fn asymptotic_series(k: u64) -> Vec<f64> {
    let nu = (k as f64 - 1.0) / 2.0;
    let mut out = Vec::new();
    for j in 1..=24 {
        let d = asymptotic_coeff(nu, j) - asymptotic_coeff(nu + 1.0, j);
        let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(0.5 * sgn * d * (2.0 / PI).powi(j as i32));
    }
    out
}

fn asymptotic_profile(k: u64, y: f64) -> f64 {
    let c = asymptotic_series(k);
    let inv = 1.0 / (y * y);
    let mut pow = inv;
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for cj in c {
        let t = cj * pow;
        if t.abs() > last {
            break;
        }
        sum += t;
        last = t.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
        pow *= inv;
    }
    sum
}

fn profile_cutoff(k: u64) -> f64 {
    (3.0 * k as f64).max(30.0)
}

fn profile_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-300, rel_tol: 1e-13, max_depth: 50, base_rule_order: 21 }
}

// Power series of the Hankel transform; alternating, used for y <= 1 where the
// integral forms lose relative accuracy to cancellation.
fn preimage_series(k: u64, y: f64) -> f64 {
    let kf = k as f64;
    let y2 = y * y;
    let ln0 = 0.5 * kf * PI.ln() + kf * y.ln() + ln_gamma_pos(0.5 * kf + 1.0) - ln_gamma_pos(kf + 1.0);
    let mut term = ln0.exp();
    let mut sum = term;
    for m in 0..400 {
        let mf = m as f64;
        term *= -PI * y2 * (0.5 * kf + mf + 1.0) / ((mf + 1.0) * (mf + kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Radial profile `m_k(y) = 2 pi int_0^inf e^{-pi s^2} J_k(2 pi y s) s ds` of the
/// `R^{-k}` preimage of the Gaussian `e^{-pi |z|^2}` (phase `i^k (z/|z|)^k`).
pub fn gauss_preimage_profile(k: u64, y: f64) -> Result<f64> {
    if !(y >= 0.0 && y.is_finite()) {
        return Err(domain("gauss_preimage_profile", format!("y = {y} must be finite and >= 0")));
    }
    if k == 0 {
        return Ok((-PI * y * y).exp());
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y > profile_cutoff(k) {
        return Ok(asymptotic_profile(k, y));
    }
    if y <= 1.0 {
        return Ok(preimage_series(k, y));
    }
    let spec = profile_spec();
    let pi_y2 = PI * y * y;
    if k % 2 == 1 {
        let r = oscillatory_quad_sink(|t: f64| { let s = t.sin(); (-pi_y2 * s * s).exp() * s }, k, 0.0, &spec)?;
        Ok(2.0 * y * r.value)
    } else {
        let c = PI.sqrt() * y;
        let mut pts = cos_zero_points(k, 0.0, FRAC_PI_2);
        let peak = (1.0 / c).min(1.0);
        if peak < FRAC_PI_2 {
            pts.push(peak.asin().min(FRAC_PI_2));
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        let kf = k as f64;
        let r = split_quad(|t: f64| (kf * t).cos() * t.sin() * dawson(c * t.sin()), &pts, 0.0, &spec)?;
        Ok(-4.0 * y / PI.sqrt() * r.value)
    }
}

/// Extremal function for the `L^inf -> BMO` bound of odd powers:
/// `R^k f_k` is the Gaussian `e^{-pi |z|^2}`.
pub fn bmo_extremizer(k: u64, z: Complex64) -> Result<Complex64> {
    if k.is_multiple_of(2) {
        return Err(domain("bmo_extremizer", format!("k = {k} must be odd")));
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let pi_y2 = PI * r * r;
    let spec = profile_spec();
    let v = oscillatory_quad_sink(|t: f64| { let s = t.sin(); (-pi_y2 * s * s).exp() * s }, k, 0.0, &spec)?;
    Ok(QuarterTurns::pow_i(k as i64).apply(unit_power(z / r, k as i64) * (2.0 * r * v.value)))
}

/// Tabulated antiderivative `F(x) = int_0^x t^{2/p - 1} m_k(t) dt` of the
/// Gaussian preimage profile, used to evaluate the Gaussian extremizers of
/// every order `k >= 0` as `i^k (z/|z|)^k r^{-2/p} (F(r/eps) - F(eps r))`.
#[derive(Debug, Clone)]
pub struct GaussProfile {
    pub k: u64,
    p: f64,
    u0: f64,
    h: f64,
    vals: Vec<f64>,
    ders: Vec<f64>,
    y_max: f64,
    f_inf: f64,
    tail: Vec<f64>,
    positive: bool,
}

const PROFILE_X_MIN: f64 = 1e-4;
const PROFILE_STEP: f64 = 0.01;

impl GaussProfile {
    pub fn new(k: u64, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(domain("GaussProfile", format!("p = {p} must lie in (1, inf)")));
        }
        let a = 2.0 / p;
        let y_max = profile_cutoff(k);
        let u0 = PROFILE_X_MIN.ln();
        let u1 = y_max.ln();
        let n = ((u1 - u0) / PROFILE_STEP).ceil() as usize;
        let h = (u1 - u0) / n as f64;
        let spec = QuadSpec { abs_tol: 1e-300, rel_tol: 1e-13, max_depth: 40, base_rule_order: 15 };
        let dens = |u: f64| -> f64 {
            let x = u.exp();
            x.powf(a) * gauss_preimage_profile(k, x).unwrap_or(f64::NAN)
        };
        let start = adaptive_quad_singular(
            |t: f64| t.powf(a - 1.0) * gauss_preimage_profile(k, t).unwrap_or(f64::NAN),
            0.0,
            PROFILE_X_MIN,
            (1.0 - a - k as f64).max(0.0),
            0.0,
            &QuadSpec { abs_tol: 1e-300, ..spec },
        )?
        .value;
        let mut vals = vec![start];
        let mut ders = vec![dens(u0)];
        let mut acc = start;
        for i in 0..n {
            let ua = u0 + i as f64 * h;
            let ub = ua + h;
            let piece = adaptive_quad(dens, ua, ub, &QuadSpec { abs_tol: 1e-15 * acc.abs().max(1e-300), ..spec })?;
            acc += piece.value;
            vals.push(acc);
            ders.push(dens(ub));
        }
        let series = asymptotic_series(k);
        let tail: Vec<f64> = series.iter().enumerate().map(|(j, c)| c / (2.0 * (j + 1) as f64 - a)).collect();
        let positive = vals.iter().all(|&v| v > 0.0);
        let mut prof = Self { k, p, u0, h, vals, ders, y_max, f_inf: 0.0, tail, positive };
        prof.f_inf = acc + prof.tail_from(y_max);
        Ok(prof)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn tail_from(&self, x: f64) -> f64 {
        // int_x^inf t^{2/p - 1} m_k(t) dt from the asymptotic series
        let a = 2.0 / self.p;
        let inv = 1.0 / (x * x);
        let mut pow = x.powf(a) * inv;
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        for c in &self.tail {
            let t = c * pow;
            if t.abs() > last {
                break;
            }
            sum += t;
            last = t.abs();
            if last < 1e-18 * sum.abs() {
                break;
            }
            pow *= inv;
        }
        sum
    }

    /// `F(infinity)`.
    pub fn limit(&self) -> f64 {
        self.f_inf
    }

    /// `F(x)` for `x >= 0`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.y_max {
            return self.f_inf - self.tail_from(x);
        }
        let u = x.ln();
        if u <= self.u0 {
            let e = self.k as f64 + 2.0 / self.p;
            return self.vals[0] * (x / PROFILE_X_MIN).powf(e);
        }
        let pos = (u - self.u0) / self.h;
        let i = (pos.floor() as usize).min(self.vals.len() - 2);
        let t = pos - i as f64;
        let (y0, y1) = (self.vals[i], self.vals[i + 1]);
        let (d0, d1) = (self.ders[i] * self.h, self.ders[i + 1] * self.h);
        if self.positive {
            // ln F is nearly affine in u where F is a steep power; interpolate it instead
            let (l0, l1) = (y0.ln(), y1.ln());
            return hermite(t, l0, d0 / y0, l1, d1 / y1).exp();
        }
        hermite(t, y0, d0, y1, d1)
    }

    /// `r^{-2/p} (F(r/eps) - F(eps r))`, the signed radial profile.
    pub fn radial(&self, eps: f64, r: f64) -> f64 {
        r.powf(-2.0 / self.p) * (self.antiderivative(r / eps) - self.antiderivative(eps * r))
    }

    /// Full complex value of the extremizer at `z`.
    pub fn eval(&self, eps: f64, z: Complex64) -> Result<Complex64> {
        let r = nonzero("GaussProfile::eval", z)?;
        let k = self.k as i64;
        Ok(QuarterTurns::pow_i(k).apply(unit_power(z / r, k) * self.radial(eps, r)))
    }

    /// Radii where the tabulation switches representation, for quadrature splitting.
    pub fn breaks(&self, eps: f64) -> Vec<f64> {
        let mut b = vec![eps * PROFILE_X_MIN, eps * self.y_max, PROFILE_X_MIN / eps, self.y_max / eps, eps, 1.0 / eps];
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

fn hermite(t: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
}

// (1 + x)^{-sigma} - (1 + y)^{-sigma} with x = -2bs + s^2, y = 2bs + s^2, divided by s.
fn h0_integrand(sigma: f64, b: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 4.0 * b * sigma;
    }
    let a_ln = if s < 0.5 { (s * (s - 2.0 * b)).ln_1p() } else { ((s - b) * (s - b) + (1.0 - b) * (1.0 + b)).ln() };
    let b_ln = (s * (s + 2.0 * b)).ln_1p();
    (-sigma * b_ln).exp() * (sigma * (b_ln - a_ln)).exp_m1() / s
}

fn h1_integrand(sigma: f64, b: f64, s: f64) -> f64 {
    ((s - b) * (s - b) + (1.0 - b) * (1.0 + b)).powf(-sigma) / s
}

fn check_sigma(func: &'static str, sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(domain(func, format!("sigma = {sigma} outside (0, 1/2)")));
    }
    Ok(())
}

fn breakpoints(lo: f64, hi: f64, cands: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    for &c in cands {
        if c > lo && c < hi {
            pts.push(c);
        }
    }
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Sum of the two one-dimensional integrals defining the radial kernel `H(a, b)`.
pub fn radial_profile_h(sigma: f64, a: f64, b: f64) -> Result<f64> {
    radial_profile_h_with(sigma, a, b, &QuadSpec::with_tol(1e-13, 1e-12))
}

pub fn radial_profile_h_with(sigma: f64, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    check_sigma("radial_profile_h", sigma)?;
    if !(a > 0.0) || !(b > 0.0 && b < 1.0) {
        return Err(domain("radial_profile_h", format!("need a > 0 and 0 < b < 1 (a = {a}, b = {b})")));
    }
    let c = a.hypot(b);
    let width = ((1.0 - b) * (1.0 + b)).sqrt();
    let cands = [b - width, b, b + width];
    let p0 = breakpoints(0.0, c - b, &cands);
    let p1 = breakpoints(c - b, c + b, &cands);
    let h0 = split_quad(|s| h0_integrand(sigma, b, s), &p0, 0.0, spec)?;
    let h1 = split_quad(|s| h1_integrand(sigma, b, s), &p1, 0.0, spec)?;
    Ok(h0.value + h1.value)
}

/// Radial profile `G` with `2 u^{-2 sigma} G(u)` equal to the un-normalized
/// principal-value convolution of `|w|^{-2} (w/|w|)^k` with the truncated power
/// `|z|^{-2 sigma} 1_{|z| < 1}` at the point `u` on the positive axis.
pub fn radial_profile_g(k: u64, sigma: f64, u: f64) -> Result<f64> {
    if k.is_multiple_of(2) || k < 1 {
        return Err(domain("radial_profile_g", format!("k = {k} must be odd")));
    }
    check_sigma("radial_profile_g", sigma)?;
    if !(u > 0.0) || u == 1.0 || !u.is_finite() {
        return Err(domain("radial_profile_g", format!("u = {u} must be positive and != 1")));
    }
    let kf = k as f64;
    if u < 1.0 {
        let a = (1.0 / (u * u) - 1.0).sqrt();
        let inner = QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 50, base_rule_order: 15 };
        let outer = QuadSpec { abs_tol: 1e-11, rel_tol: 1e-10, max_depth: 50, base_rule_order: 15 };
        let pts = cos_zero_points(k, 0.0, FRAC_PI_2);
        let mut err: Option<Error> = None;
        let r = split_quad(
            |phi: f64| {
                let b = phi.cos();
                if b >= 1.0 || b <= 0.0 {
                    return 0.0;
                }
                match radial_profile_h_with(sigma, a, b, &inner) {
                    Ok(h) => h * (kf * phi).cos(),
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &pts,
            0.0,
            &outer,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(r?.value)
    } else {
        let top = 1.0 / (u * u);
        let inner = QuadSpec { abs_tol: 1e-14, rel_tol: 1e-12, max_depth: 50, base_rule_order: 15 };
        let outer = QuadSpec { abs_tol: 1e-12, rel_tol: 1e-10, max_depth: 50, base_rule_order: 15 };
        let mut err: Option<Error> = None;
        let r = adaptive_quad(
            |psi: f64| {
                let cp = psi.cos();
                match adaptive_quad_singular(
                    |s: f64| (kf * (s.sqrt() * cp).asin()).cos() / ((1.0 - s) * s.powf(sigma)),
                    0.0,
                    top,
                    sigma,
                    0.0,
                    &inner,
                ) {
                    Ok(v) => v.value,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            0.0,
            FRAC_PI_2,
            &outer,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(r?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::{gamma_kp, osc_integral_closed};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quarter_turns_are_exact() {
        for n in -9i64..9 {
            let q = QuarterTurns::pow_i(n);
            let direct = Complex64::new(0.0, 1.0).powi(n as i32);
            assert!((q.to_complex() - direct).norm() < 1e-15);
            assert_eq!(q * q.conj(), QuarterTurns::ONE);
        }
        assert_eq!(QuarterTurns::sign(3), QuarterTurns::pow_i(2));
        assert_eq!(QuarterTurns::I.apply(c(2.0, 3.0)), c(-3.0, 2.0));
    }

    #[test]
    fn omega_examples() {
        let w = omega_kernel(1, c(1.0, 0.0)).unwrap();
        assert!((w - c(0.0, 1.0 / (2.0 * PI))).norm() < 1e-17);
        let w = omega_kernel(2, c(0.0, 1.0)).unwrap();
        assert!((w - c(1.0 / PI, 0.0)).norm() < 1e-16);
        assert!(omega_kernel(0, c(1.0, 0.0)).is_err());
        assert!(omega_kernel(1, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn omega_reflection_and_conjugation() {
        for k in 1i64..8 {
            for z in [c(0.3, 0.7), c(-1.2, 0.4), c(2.0, -3.0)] {
                let a = omega_kernel(-k, z).unwrap();
                let b = omega_kernel(k, z.conj()).unwrap();
                assert!((a - b).norm() < 1e-15 * a.norm());
                let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
                let conj = omega_kernel(k, z).unwrap().conj() * sgn;
                assert!((a - conj).norm() < 1e-15 * a.norm());
            }
        }
    }

    #[test]
    fn phi_and_cap_examples() {
        assert_relative_eq!(phi_eps(2.0, 0.1, c(0.5, 0.0)), 0.5f64.powf(-0.8), max_relative = 1e-15);
        assert_eq!(phi_eps(3.0, 0.1, c(1.0, 0.0)), 0.0);
        assert_eq!(phi_eps(3.0, 0.1, c(0.0, 0.0)), 0.0);
        let v = f_cap_eps(3, 3.0, 0.1, c(0.0, 0.5));
        let want = c(0.0, -1.0) * 0.5f64.powf(-2.0 / 3.0 + 0.2);
        assert!((v - want).norm() < 1e-14);
        assert_eq!(f_cap_eps(0, 3.0, 0.1, c(0.2, 0.3)).re, phi_eps(3.0, 0.1, c(0.2, 0.3)));
    }

    #[test]
    fn phi_norm_matches_direct_integration() {
        // 2 pi int_0^1 r^{(-2/p + 2 eps) p} r dr = 2 pi / (2 p eps)
        let (p, eps) = (3.0, 0.05);
        let spec = QuadSpec::default();
        let n = crate::quadrature::radial_lp_norm(|r| phi_eps(p, eps, c(r, 0.0)), p, 1.0, &spec).unwrap();
        assert_relative_eq!(n.powf(p), 2.0 * PI / (2.0 * p * eps), max_relative = 1e-9);
    }

    #[test]
    fn g_gauss_against_time_integral() {
        // g = int_eps^{1/eps} e^{-pi |z|^2 / t^2} t^{-1-2/p} dt
        let spec = QuadSpec::with_tol(1e-14, 1e-13);
        for (p, eps, r) in [(2.0, 0.5, 1.0), (3.0, 0.1, 0.7), (4.0, 0.01, 2.5)] {
            let direct = adaptive_quad(|t: f64| (-PI * r * r / (t * t)).exp() * t.powf(-1.0 - 2.0 / p), eps, 1.0 / eps, &spec).unwrap().value;
            assert_relative_eq!(g_gauss(p, eps, c(r, 0.0)).unwrap(), direct, max_relative = 1e-11);
        }
        let lim = g_gauss(3.0, 1e-30, c(0.8, 0.0)).unwrap();
        let want = (ln_gamma_pos(1.0 / 3.0).exp() / (2.0 * PI.powf(1.0 / 3.0))) * 0.8f64.powf(-2.0 / 3.0);
        assert_relative_eq!(lim, want, max_relative = 1e-9);
        assert!(g_gauss(3.0, 0.1, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn f_gauss_small_eps_limit() {
        for (k, p) in [(1u64, 3.0), (3, 4.0), (5, 2.5)] {
            let r = 0.9;
            let v = f_gauss(k, p, 1e-8, c(r, 0.0)).unwrap().norm();
            let s = 1.0 / p + 0.5;
            let want = (-(s) * PI.ln()).exp() * ln_gamma_pos(s).exp() * osc_integral_closed(k, 1.0 / p).unwrap() * r.powf(-2.0 / p);
            assert_relative_eq!(v, want, max_relative = 1e-8);
        }
        assert!(f_gauss(2, 3.0, 0.1, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn f_gauss_small_radius_is_linear() {
        let (k, p, eps) = (3u64, 4.0, 0.1);
        let a = f_gauss(k, p, eps, c(1e-3, 0.0)).unwrap().norm();
        let b = f_gauss(k, p, eps, c(2e-3, 0.0)).unwrap().norm();
        assert!(a / 1e-3 <= eps.powf(-2.0 / p - 1.0));
        assert!(b / 2e-3 <= eps.powf(-2.0 / p - 1.0));
        // winding k forces |f| ~ |z|^k at the origin
        assert_relative_eq!(b / a, 8.0, max_relative = 1e-3);
    }

    #[test]
    fn heat_kernel_values() {
        assert_relative_eq!(heat_kernel(1.0, c(0.0, 0.0)).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-16);
        let spec = QuadSpec::default();
        for t in [0.3f64, 1.0, 2.0] {
            let mass = adaptive_quad(|r: f64| 2.0 * PI * r * heat_kernel(t, c(r, 0.0)).unwrap(), 0.0, 40.0 * t.sqrt(), &spec).unwrap().value;
            assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
            // ||K_t||_l = t^{1/l - 1} ||K_1||_l
            let l = 3.0;
            let nt = crate::quadrature::radial_lp_norm(|r| heat_kernel(t, c(r, 0.0)).unwrap(), l, 40.0 * t.sqrt(), &spec).unwrap();
            let n1 = crate::quadrature::radial_lp_norm(|r| heat_kernel(1.0, c(r, 0.0)).unwrap(), l, 40.0, &spec).unwrap();
            assert_relative_eq!(nt, t.powf(1.0 / l - 1.0) * n1, max_relative = 1e-10);
        }
        assert!(heat_kernel(0.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn riesz_kernel_subordination() {
        assert_relative_eq!(riesz_potential_kernel(0.5, c(1.0, 0.0)).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-15);
        let spec = QuadSpec::with_tol(1e-15, 1e-13);
        for (alpha, r) in [(0.3, 0.5), (0.5, 1.0), (0.8, 2.0)] {
            let f = |t: f64| t.powf(alpha - 1.0) * heat_kernel(t, c(r, 0.0)).unwrap();
            let lo = adaptive_quad(f, 0.0, r * r, &spec).unwrap().value;
            // upper range in s = 1/t
            let hi = adaptive_quad_singular(|s: f64| s.powf(-alpha - 1.0) * heat_kernel(1.0 / s, c(r, 0.0)).unwrap(), 0.0, 1.0 / (r * r), alpha, 0.0, &spec).unwrap().value;
            let want = (lo + hi) / ln_gamma_pos(alpha).exp();
            assert_relative_eq!(riesz_potential_kernel(alpha, c(r, 0.0)).unwrap(), want, max_relative = 1e-11);
        }
    }

    #[test]
    fn rk_potential_reduces_at_k0_and_has_constant_ratio() {
        let z = c(0.4, -1.1);
        let a = rk_riesz_potential(0, 0.35, z).unwrap();
        assert_relative_eq!(a.re, riesz_potential_kernel(0.35, z).unwrap(), max_relative = 1e-15);
        assert_eq!(a.im, 0.0);
        let (k, p, eps) = (3u64, 4.0, 1e-3);
        let alpha = 1.0 / p + eps;
        let q = p / (p - 1.0);
        let want = (ln_gamma_pos(1.0 / p + eps) + ln_gamma_pos(k as f64 / 2.0 + 1.0 / q - eps)
            - ln_gamma_pos(1.0 / q - eps)
            - ln_gamma_pos(k as f64 / 2.0 + 1.0 / p + eps))
        .exp();
        for z in [c(0.1, 0.2), c(3.0, -1.0)] {
            let ratio = rk_riesz_potential(k, alpha, z).unwrap().norm() / riesz_potential_kernel(alpha, z).unwrap();
            assert_relative_eq!(ratio, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn truncated_lower_reduction_matches_time_integral() {
        let spec = QuadSpec::with_tol(1e-16, 1e-13);
        for (alpha, r, rho) in [(0.5, 1.0, 2.0), (0.4, 2.0, 0.5), (0.8, 0.5, 1.3)] {
            let direct = adaptive_quad(|t: f64| t.powf(alpha - 1.0) * heat_kernel(t, c(rho, 0.0)).unwrap(), 0.0, r * r, &spec).unwrap().value
                / ln_gamma_pos(alpha).exp();
            assert_relative_eq!(truncated_riesz_lower(alpha, r, c(rho, 0.0)).unwrap(), direct, max_relative = 1e-11);
        }
    }

    #[test]
    fn truncated_pieces() {
        for (alpha, r) in [(0.3, 0.5), (0.4, 2.0), (0.9, 1.0)] {
            for rho in [1e-3, 0.1, 1.0, 5.0] {
                let z = c(rho * 0.6, rho * 0.8);
                let lo = truncated_riesz_lower(alpha, r, z).unwrap();
                let hi = truncated_riesz_upper(alpha, r, z).unwrap();
                let full = riesz_potential_kernel(alpha, z).unwrap();
                assert!(((lo + hi) - full).abs() <= 1e-13 * full);
                assert!(lo <= full);
                let bound = 2f64.powf(1.0 - alpha) * (-rho * rho / (8.0 * r * r)).exp() * full;
                assert!(lo <= bound * (1.0 + 1e-14));
            }
            let at0 = truncated_riesz_upper(alpha, r, c(0.0, 0.0)).unwrap();
            let near = truncated_riesz_upper(alpha, r, c(1e-6, 0.0)).unwrap();
            assert_relative_eq!(at0, near, max_relative = 1e-9);
        }
        let t = truncated_riesz_lower(0.5, 1e8, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(t, riesz_potential_kernel(0.5, c(1.0, 0.0)).unwrap(), max_relative = 1e-7);
        let t = truncated_riesz_upper(0.5, 1e-8, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(t, riesz_potential_kernel(0.5, c(1.0, 0.0)).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn rk_upper_truncation_limits() {
        let z = c(0.8, 0.6);
        for k in 1u64..6 {
            // the upper-time part vanishes like r^{2 alpha}
            let tiny = rk_truncated_riesz_upper(k, 0.4, 1e-15, z).unwrap();
            let full = rk_riesz_potential(k, 0.4, z).unwrap();
            assert!((tiny - full).norm() < 1e-8 * full.norm(), "k = {k}");
        }
        let a = rk_truncated_riesz_upper(0, 0.4, 2.0, z).unwrap();
        assert_relative_eq!(a.re, truncated_riesz_upper(0.4, 2.0, z).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn rk_upper_truncation_against_time_integral() {
        // R^k K_t has modulus (rho/2)^k / Gamma(k/2) int_t^inf (tau - t)^{k/2-1} tau^{-k} K_tau(rho) dtau
        // for k >= 1; R^k g_{r^2} integrates t^{alpha-1}/Gamma(alpha) over t > r^2.
        let (k, alpha, r, rho) = (2u64, 0.4, 1.0, 1.5);
        let spec = QuadSpec::with_tol(1e-14, 1e-10);
        let heat = |t: f64| -> f64 {
            // k = 2 closed form of the inner time integral
            let x = rho * rho / (4.0 * t);
            (1.0 - (1.0 + x) * (-x).exp()) / (PI * rho * rho)
        };
        let direct = adaptive_quad_singular(
            |s: f64| {
                let t = r * r / s;
                t.powf(alpha - 1.0) * heat(t) * r * r / (s * s)
            },
            0.0,
            1.0,
            0.0,
            0.0,
            &spec,
        )
        .unwrap()
        .value
            / ln_gamma_pos(alpha).exp();
        let got = rk_truncated_riesz_upper(k, alpha, r, c(rho, 0.0)).unwrap().norm();
        assert_relative_eq!(got, direct, max_relative = 1e-8);
    }

    #[test]
    fn preimage_profile_routes_agree() {
        // compare every evaluation route with brute-force quadrature of the Bessel form
        for k in [1u64, 2, 3, 4, 6] {
            for y in [0.05, 0.7, 2.0, 6.0] {
                let got = gauss_preimage_profile(k, y).unwrap();
                // 2 pi int e^{-pi s^2} J_k(2 pi y s) s ds with J_k by its integral
                let bessel = |x: f64| adaptive_quad(|t: f64| (k as f64 * t - x * t.sin()).cos(), 0.0, PI, &QuadSpec::with_tol(1e-14, 1e-12)).unwrap().value / PI;
                let want = adaptive_quad(|s: f64| 2.0 * PI * (-PI * s * s).exp() * bessel(2.0 * PI * y * s) * s, 0.0, 7.0, &QuadSpec::with_tol(1e-13, 1e-11)).unwrap().value;
                assert!((got - want).abs() < 1e-11, "k = {k}, y = {y}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn preimage_profile_asymptotics_join() {
        for k in [1u64, 2, 5, 8, 12] {
            let y = profile_cutoff(k);
            let a = gauss_preimage_profile(k, y * (1.0 - 1e-12)).unwrap();
            let b = asymptotic_profile(k, y);
            assert_relative_eq!(a, b, max_relative = 1e-10);
            assert_relative_eq!(b, k as f64 / (2.0 * PI * y * y), max_relative = 0.05);
        }
    }

    #[test]
    fn gauss_profile_limits_follow_gamma_quotient() {
        let p = 4.0;
        let base = GaussProfile::new(0, p).unwrap();
        let g_inf = 0.5 * (ln_gamma_pos(1.0 / p) - PI.ln() / p).exp();
        assert_relative_eq!(base.limit(), g_inf, max_relative = 1e-11);
        for k in [1u64, 2, 3, 5] {
            let prof = GaussProfile::new(k, p).unwrap();
            assert_relative_eq!(prof.limit(), g_inf / gamma_kp(k, p).unwrap(), max_relative = 1e-10);
        }
        // k = 0 reproduces g_gauss
        for r in [0.01, 0.5, 3.0, 40.0] {
            assert_relative_eq!(base.radial(0.01, r), g_gauss_radial(p, 0.01, r), max_relative = 1e-10);
        }
    }

    #[test]
    fn gauss_profile_matches_double_integral_for_odd_k() {
        for (k, p) in [(1u64, 3.0), (3, 4.0), (5, 3.0)] {
            let prof = GaussProfile::new(k, p).unwrap();
            for eps in [0.3, 0.05] {
                for r in [0.02, 0.3, 1.0, 4.0, 25.0] {
                    let z = Complex64::from_polar(r, 0.7);
                    let a = prof.eval(eps, z).unwrap();
                    let b = f_gauss(k, p, eps, z).unwrap();
                    assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-3), "k = {k} eps = {eps} r = {r}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn bmo_extremizer_bound_and_origin() {
        assert_eq!(bmo_extremizer(3, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let spec = QuadSpec::default();
        for k in [1u64, 3, 9] {
            for y in [0.2, 1.0, 3.0] {
                let v = bmo_extremizer(k, c(y, 0.0)).unwrap().norm();
                let bound = 2.0 / k as f64 * adaptive_quad(|s: f64| (-PI * s * s).exp() * (1.0 + 2.0 * PI * s * s), 0.0, y, &spec).unwrap().value;
                assert!(v <= bound * (1.0 + 1e-12), "k = {k}, y = {y}");
                assert_relative_eq!(v, gauss_preimage_profile(k, y).unwrap().abs(), max_relative = 1e-13);
            }
        }
        assert!(bmo_extremizer(2, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn h_profile_limits() {
        // sigma -> 0: H -> ln((c + b)/(c - b))
        let (a, b) = (0.8, 0.6);
        let cc = f64::hypot(a, b);
        let s = 1e-7;
        let h = radial_profile_h(s, a, b).unwrap();
        let lim = ((cc + b) / (cc - b)).ln();
        assert!((h - lim).abs() < 1e-5);
        let small_b = radial_profile_h(0.25, 1.0, 1e-6).unwrap();
        assert!(small_b.abs() < 1e-5);
        let x = radial_profile_h(0.25, 3f64.sqrt(), 0.5).unwrap();
        let y = radial_profile_h(0.25, 3f64.sqrt(), 0.5).unwrap();
        assert_eq!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn g_profile_decays_and_rejects_u1() {
        // the s-window 1/u^2 gives decay like u^{2 sigma - 2}
        let mid = radial_profile_g(3, 0.25, 10.0).unwrap();
        let far = radial_profile_g(3, 0.25, 1e3).unwrap();
        assert!(far.abs() < 1e-4);
        assert_relative_eq!(far / mid, 100f64.powf(-1.5), max_relative = 0.01);
        assert!(radial_profile_g(3, 0.25, 1.0).is_err());
        assert!(radial_profile_g(4, 0.25, 0.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn omega_is_homogeneous(k in -12i64..12, x in -5.0f64..5.0, y in -5.0f64..5.0, lam in 0.1f64..10.0) {
            prop_assume!(k != 0 && x.hypot(y) > 1e-3);
            let z = c(x, y);
            let a = omega_kernel(k, z * lam).unwrap();
            let b = omega_kernel(k, z).unwrap() / (lam * lam);
            prop_assert!((a - b).norm() <= 1e-13 * b.norm());
        }

        #[test]
        fn winding_index_matches(k in 1u64..8, r in 0.05f64..4.0, psi in 0.0f64..std::f64::consts::TAU, phi in 0.0f64..std::f64::consts::TAU) {
            let rot = Complex64::from_polar(1.0, psi);
            let z = Complex64::from_polar(r, phi);
            let ki = k as i64;
            let checks = [
                (f_cap_eps(ki, 3.0, 0.1, z * rot), f_cap_eps(ki, 3.0, 0.1, z)),
                (rk_riesz_potential(k, 0.4, z * rot).unwrap(), rk_riesz_potential(k, 0.4, z).unwrap()),
                (omega_kernel(ki, z * rot).unwrap(), omega_kernel(ki, z).unwrap()),
            ];
            let winds = [ki, -ki, -ki];
            for ((a, b), w) in checks.iter().zip(winds) {
                let undo = unit_power(rot, -w);
                prop_assert!((a * undo - b).norm() <= 1e-12 * b.norm().max(1e-300));
            }
            if k % 2 == 1 {
                let a = bmo_extremizer(k, z * rot).unwrap() * unit_power(rot, -ki);
                let b = bmo_extremizer(k, z).unwrap();
                prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-12));
            }
        }

        #[test]
        fn gaussian_families_positive(p in 2.1f64..8.0, eps in 0.01f64..0.5, r in 0.01f64..20.0) {
            prop_assert!(g_gauss(p, eps, c(r, 0.0)).unwrap() > 0.0);
            prop_assert!(f_gauss(3, p, eps, c(0.0, r)).unwrap().norm() > 0.0);
        }

        #[test]
        fn truncation_dominated(alpha in 0.05f64..0.95, r in 0.1f64..5.0, rho in 0.01f64..10.0) {
            let z = c(rho, 0.0);
            prop_assert!(truncated_riesz_lower(alpha, r, z).unwrap() <= riesz_potential_kernel(alpha, z).unwrap());
        }
    }
}
