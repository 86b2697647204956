//! Numeric certificates for the lower bounds `||R^k||_p >= gamma_k(p)`,
//! the sharpness band, and the weak-(1,1), BMO and Hormander trends.

use crate::error::{domain, Error, Result};
use crate::fields::{apply_multiplier, dyadic_bmo_norm, lp_norm, weak_l1_quasinorm, Field, SpectralPlan};
use crate::kernels::{bmo_extremizer, g_gauss_radial, omega_kernel, rk_riesz_potential, riesz_potential_kernel, GaussProfile};
use crate::quadrature::{adaptive_quad, adaptive_quad_singular, radial_lp_norm_with_breaks, split_quad, QuadSpec};
use crate::special_functions::{gamma_kp, ln_gamma_pos, sharpness_ratio};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn check_kp(func: &'static str, k: u64, p: f64) -> Result<()> {
    if k == 0 {
        return Err(domain(func, "k must be positive"));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(func, format!("p = {p} must lie in (1, inf)")));
    }
    Ok(())
}

/// `Gamma(1/p+e) Gamma(k/2+1/q-e) / (Gamma(1/q-e) Gamma(k/2+1/p+e))`, the exact
/// ratio of `|R^k L^{-a} delta_0|` to `L^{-a} delta_0` at `a = 1/p + e`.
pub fn ratio_riesz_potential(k: u64, p: f64, eps: f64) -> Result<f64> {
    check_kp("ratio_riesz_potential", k, p)?;
    let s = 1.0 / p;
    let t = 1.0 - s;
    if !(eps > 0.0 && eps < t) {
        return Err(domain("ratio_riesz_potential", format!("eps = {eps} outside (0, 1/q)")));
    }
    let h = k as f64 / 2.0;
    Ok((ln_gamma_pos(s + eps) + ln_gamma_pos(h + t - eps) - ln_gamma_pos(t - eps) - ln_gamma_pos(h + s + eps)).exp())
}

/// The same ratio as a quotient of `L^q(B_r)` norms computed by quadrature
/// of the two kernels; independent of `r`.
pub fn riesz_potential_ball_ratio(k: u64, p: f64, eps: f64, r: f64) -> Result<f64> {
    check_kp("riesz_potential_ball_ratio", k, p)?;
    if !(r > 0.0) {
        return Err(domain("riesz_potential_ball_ratio", format!("r = {r} must be positive")));
    }
    let q = p / (p - 1.0);
    let alpha = 1.0 / p + eps;
    let beta = 1.0 - 2.0 * q * eps;
    let spec = QuadSpec { abs_tol: 1e-300, rel_tol: 1e-13, max_depth: 50, base_rule_order: 21 };
    let norm = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let mut err = None;
        let v = adaptive_quad_singular(
            |rho: f64| {
                if rho == 0.0 {
                    return 0.0;
                }
                match g(rho) {
                    Ok(v) => v.powf(q) * rho,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            0.0,
            r,
            beta.max(0.0),
            0.0,
            &spec,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok((2.0 * PI * v?.value).powf(1.0 / q))
    };
    let num = norm(&|rho| Ok(rk_riesz_potential(k, alpha, Complex64::new(rho, 0.0))?.norm()))?;
    let den = norm(&|rho| riesz_potential_kernel(alpha, Complex64::new(rho, 0.0)))?;
    Ok(num / den)
}

/// `L^p` norms of the Gaussian pair `g`, `f` at one truncation parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussNorms {
    pub eps: f64,
    pub norm_g: f64,
    pub norm_f: f64,
}

impl GaussNorms {
    pub fn ratio(&self) -> f64 {
        self.norm_g / self.norm_f
    }
}

fn norm_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-300, rel_tol: 1e-11, max_depth: 50, base_rule_order: 15 }
}

fn check_eps(func: &'static str, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(func, format!("eps = {eps} outside (0, 1/2)")));
    }
    Ok(())
}

/// Norms of `g_{p,eps}` and of its `R^{-k}` preimage from a tabulated profile.
pub fn gauss_norms(profile: &GaussProfile, eps: f64) -> Result<GaussNorms> {
    check_eps("gauss_norms", eps)?;
    let p = profile.p();
    let spec = norm_spec();
    // e^{-pi eps^2 r^2} has underflowed well before 12/eps
    let g_breaks = [eps, 1.0, 1.0 / eps, 4.0 / eps, 12.0 / eps];
    let norm_g = radial_lp_norm_with_breaks(|r| g_gauss_radial(p, eps, r), p, &g_breaks, &spec)?;
    let mut f_breaks = profile.breaks(eps);
    f_breaks.push(1.0);
    let r_max = 1e4 * f_breaks.iter().cloned().fold(0.0, f64::max);
    f_breaks.push(r_max);
    f_breaks.sort_by(f64::total_cmp);
    f_breaks.dedup();
    let norm_f = radial_lp_norm_with_breaks(|r| profile.radial(eps, r), p, &f_breaks, &spec)?;
    Ok(GaussNorms { eps, norm_g, norm_f })
}

/// `||g_{p,eps}||_p / ||f_{k,p,eps}||_p`.
pub fn gauss_ratio_at(k: u64, p: f64, eps: f64) -> Result<f64> {
    check_kp("gauss_ratio_at", k, p)?;
    Ok(gauss_norms(&GaussProfile::new(k, p)?, eps)?.ratio())
}

/// Least-squares fits of the Gaussian-pair norms over an `eps` schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub norms: Vec<GaussNorms>,
    /// Abscissae of the fit.
    pub x: Vec<f64>,
    pub slope_g: f64,
    pub slope_f: f64,
    pub intercept_g: f64,
    pub intercept_f: f64,
    /// 2-norm condition number of the design matrix `[1 x]`.
    pub condition: f64,
    pub ratio: f64,
}

/// Default condition-number ceiling for the regression design.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e6;

pub fn default_eps_schedule() -> Vec<f64> {
    vec![1e-4, 1e-6, 1e-8, 1e-10, 1e-12]
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 4 {
        return Err(domain("gauss_ratio_regression", "schedule needs at least 4 points"));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("gauss_ratio_regression", "schedule must be strictly decreasing"));
    }
    if let Some(&e) = schedule.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
        return Err(domain("gauss_ratio_regression", format!("eps = {e} outside (0, 1/2)")));
    }
    if (schedule[0] / schedule[schedule.len() - 1]).log10() < 3.0 - 1e-12 {
        return Err(domain("gauss_ratio_regression", "schedule must span at least 3 decades"));
    }
    Ok(())
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn design_condition(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s1: f64 = x.iter().sum();
    let s2: f64 = x.iter().map(|v| v * v).sum();
    // eigenvalues of [[n, s1], [s1, s2]]
    let tr = n + s2;
    let det = n * s2 - s1 * s1;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (hi, lo) = (tr / 2.0 + disc, det / (tr / 2.0 + disc));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).sqrt()
    }
}

fn schedule_norms(k: u64, p: f64, schedule: &[f64]) -> Result<Vec<GaussNorms>> {
    check_kp("gauss_ratio_regression", k, p)?;
    check_schedule(schedule)?;
    let profile = GaussProfile::new(k, p)?;
    schedule.par_iter().map(|&e| gauss_norms(&profile, e)).collect()
}

fn fit(norms: Vec<GaussNorms>, x: Vec<f64>, yg: Vec<f64>, yf: Vec<f64>, limit: f64, power: f64) -> Result<RegressionFit> {
    let condition = design_condition(&x);
    if !(condition <= limit) {
        return Err(Error::IllConditioned(condition));
    }
    let (slope_g, intercept_g) = line_fit(&x, &yg);
    let (slope_f, intercept_f) = line_fit(&x, &yf);
    let ratio = (slope_g / slope_f).powf(power);
    Ok(RegressionFit { norms, x, slope_g, slope_f, intercept_g, intercept_f, condition, ratio })
}

/// Slopes of `||g||_p^p` and `||f||_p^p` against `ln 1/eps`, where both are
/// affine up to a bounded intercept; the ratio is `(s_g / s_f)^{1/p}`.
pub fn gauss_regression_fit(k: u64, p: f64, schedule: &[f64], condition_limit: f64) -> Result<RegressionFit> {
    let norms = schedule_norms(k, p, schedule)?;
    fit_log_axis(norms, p, condition_limit)
}

fn fit_log_axis(norms: Vec<GaussNorms>, p: f64, condition_limit: f64) -> Result<RegressionFit> {
    let x = norms.iter().map(|n| (1.0 / n.eps).ln()).collect();
    let yg = norms.iter().map(|n| n.norm_g.powf(p)).collect();
    let yf = norms.iter().map(|n| n.norm_f.powf(p)).collect();
    fit(norms, x, yg, yf, condition_limit, 1.0 / p)
}

fn fit_t_axis(norms: Vec<GaussNorms>, p: f64, condition_limit: f64) -> Result<RegressionFit> {
    let x = norms.iter().map(|n| (1.0 / n.eps).ln().powf(1.0 / p)).collect();
    let yg = norms.iter().map(|n| n.norm_g).collect();
    let yf = norms.iter().map(|n| n.norm_f).collect();
    fit(norms, x, yg, yf, condition_limit, 1.0)
}

/// Regression estimate of `gamma_k(p)` from the Gaussian pair.
pub fn gauss_ratio_regression(k: u64, p: f64, schedule: &[f64]) -> Result<f64> {
    Ok(gauss_regression_fit(k, p, schedule, DEFAULT_CONDITION_LIMIT)?.ratio)
}

/// Variant fitting the norms themselves against `t = (ln 1/eps)^{1/p}`;
/// returns `s_g / s_f`. Its slope carries an `O(t^{-p})` bias on finite schedules.
pub fn gauss_t_regression_fit(k: u64, p: f64, schedule: &[f64], condition_limit: f64) -> Result<RegressionFit> {
    let norms = schedule_norms(k, p, schedule)?;
    fit_t_axis(norms, p, condition_limit)
}

/// Both fits from a single set of norm evaluations: `(log axis, t axis)`.
pub fn gauss_regression_pair(k: u64, p: f64, schedule: &[f64], condition_limit: f64) -> Result<(RegressionFit, RegressionFit)> {
    let norms = schedule_norms(k, p, schedule)?;
    Ok((fit_log_axis(norms.clone(), p, condition_limit)?, fit_t_axis(norms, p, f64::INFINITY)?))
}

/// One row of the weak-(1,1) trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weak11Row {
    pub k: i64,
    pub w: f64,
}

impl Weak11Row {
    pub fn per_k(&self) -> f64 {
        self.w / self.k.unsigned_abs() as f64
    }
}

/// `W(k) = ||R^k 1_D||_{1,inf} / ||1_D||_1` for the unit disc on an `n x n` grid.
pub fn weak11_trend(k_list: &[i64], n: usize, side: f64) -> Result<Vec<Weak11Row>> {
    if k_list.is_empty() {
        return Err(domain("weak11_trend", "empty k list"));
    }
    let plan = SpectralPlan::new(n)?;
    let disc = Field::from_fn(n, side, |z| Complex64::new(if z.norm() < 1.0 { 1.0 } else { 0.0 }, 0.0))?;
    let mass = lp_norm(&disc, 1.0)?;
    k_list
        .iter()
        .map(|&k| {
            if k == 0 {
                return Err(domain("weak11_trend", "k must be nonzero"));
            }
            let out = apply_multiplier(&disc, k, &plan)?;
            Ok(Weak11Row { k, w: weak_l1_quasinorm(&out) / mass })
        })
        .collect()
}

/// `sup_z |f_k(z)|` for the BMO extremizer, from a log-spaced radial mesh on
/// `[0.01, 10 sqrt k]` followed by golden-section refinement.
pub fn bmo_extremizer_sup(k: u64) -> Result<f64> {
    let m = |r: f64| -> Result<f64> { Ok(bmo_extremizer(k, Complex64::new(r, 0.0))?.norm()) };
    let (lo, hi) = (0.01f64, 10.0 * (k as f64).sqrt());
    let npts = 400;
    let radii: Vec<f64> = (0..npts).map(|i| lo * (hi / lo).powf(i as f64 / (npts - 1) as f64)).collect();
    let vals: Result<Vec<f64>> = radii.par_iter().map(|&r| m(r)).collect();
    let vals = vals?;
    let (imax, _) = vals.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut a = radii[imax.saturating_sub(1)];
    let mut b = radii[(imax + 1).min(npts - 1)];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (m(c)?, m(d)?);
    for _ in 0..80 {
        if (b - a) < 1e-12 * b {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = m(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = m(d)?;
        }
    }
    Ok(fc.max(fd).max(vals[imax]))
}

/// One row of the BMO trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmoRow {
    pub k: u64,
    pub sup_f: f64,
    pub bmo_g: f64,
}

impl BmoRow {
    pub fn ratio(&self) -> f64 {
        self.bmo_g / self.sup_f
    }
}

/// `dyadic_bmo_norm(e^{-pi|z|^2}) / sup |f_k|` for odd `k`.
pub fn bmo_trend(k_list: &[u64], n: usize, side: f64) -> Result<Vec<BmoRow>> {
    if k_list.is_empty() {
        return Err(domain("bmo_trend", "empty k list"));
    }
    if let Some(k) = k_list.iter().find(|&&k| k % 2 == 0) {
        return Err(domain("bmo_trend", format!("k = {k} must be odd")));
    }
    let g = Field::from_fn(n, side, |z| Complex64::new((-PI * z.norm_sqr()).exp(), 0.0))?;
    let bmo_g = dyadic_bmo_norm(&g);
    k_list.par_iter().map(|&k| Ok(BmoRow { k, sup_f: bmo_extremizer_sup(k)?, bmo_g })).collect()
}

/// Value of the Hormander integral, split into quadrature and tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HormanderValue {
    pub k: u64,
    pub quadrature: f64,
    pub tail: f64,
}

impl HormanderValue {
    pub fn value(&self) -> f64 {
        self.quadrature + self.tail
    }

    /// `value / (k ln(k+1))`.
    pub fn normalized(&self) -> f64 {
        let k = self.k as f64;
        self.value() / (k * (k + 1.0).ln())
    }
}

/// Default outer radius for `hormander_constant`.
pub fn hormander_default_r_out(k: u64, y: Complex64) -> f64 {
    200.0 * k as f64 * y.norm()
}

/// `int_{|x| >= 2|y|} |Omega_k(x - y) - Omega_k(x)| dx`, by polar quadrature up
/// to `r_out` plus the leading-order tail beyond it.
pub fn hormander_constant(k: u64, y: Complex64, r_out: f64) -> Result<HormanderValue> {
    if k == 0 {
        return Err(domain("hormander_constant", "k must be positive"));
    }
    let ay = y.norm();
    if !(ay > 0.0 && ay.is_finite()) {
        return Err(domain("hormander_constant", "y must be nonzero"));
    }
    if !(r_out > 2.0 * ay) {
        return Err(domain("hormander_constant", "r_out must exceed 2|y|"));
    }
    let kk = k as i64;
    let kf = k as f64;
    let th0 = y.arg();
    let mut angles = Vec::new();
    let panels = 2 * k as usize;
    for j in 0..=panels {
        angles.push(th0 - PI + j as f64 * PI / kf);
    }
    let ang_spec = QuadSpec { abs_tol: 1e-300, rel_tol: 1e-11, max_depth: 40, base_rule_order: 15 };
    let rad_spec = QuadSpec { abs_tol: 1e-300, rel_tol: 1e-10, max_depth: 40, base_rule_order: 15 };
    let mut err = None;
    let mut radial = |u: f64| -> f64 {
        let rho = u.exp();
        let r = split_quad(
            |t: f64| {
                let x = Complex64::from_polar(rho, t);
                match (omega_kernel(kk, x - y), omega_kernel(kk, x)) {
                    (Ok(a), Ok(b)) => (a - b).norm(),
                    (Err(e), _) | (_, Err(e)) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &angles,
            0.0,
            &ang_spec,
        );
        match r {
            Ok(v) => v.value * rho * rho,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut pts = vec![(2.0 * ay).ln()];
    let mut b = 4.0 * ay;
    while b < r_out {
        pts.push(b.ln());
        b *= 4.0;
    }
    pts.push(r_out.ln());
    let quad = split_quad(&mut radial, &pts, 0.0, &rad_spec);
    if let Some(e) = err {
        return Err(e);
    }
    let quad = quad?.value;
    let shape = adaptive_quad(|psi: f64| (4.0 * psi.cos().powi(2) + kf * kf * psi.sin().powi(2)).sqrt(), 0.0, 2.0 * PI, &QuadSpec::with_tol(1e-14, 1e-13))?;
    let tail = kf / (2.0 * PI) * ay / r_out * shape.value;
    Ok(HormanderValue { k, quadrature: quad, tail })
}

/// Knobs for `certify`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub eps_schedule: Vec<f64>,
    /// `eps` of the headline Riesz-potential ratio.
    pub riesz_eps: f64,
    /// Allowed relative deviation of the regression ratio from gamma.
    pub regression_tol: f64,
    /// Slack on the `[1/2, 1]` sharpness band.
    pub band_tol: f64,
    pub condition_limit: f64,
    /// Grid `(n, side)` for the weak-(1,1) ratio; skipped when `None`.
    pub weak11_grid: Option<(usize, f64)>,
    /// Grid `(n, side)` for the BMO ratio (odd `k` only); skipped when `None`.
    pub bmo_grid: Option<(usize, f64)>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            eps_schedule: default_eps_schedule(),
            riesz_eps: 1e-8,
            regression_tol: 0.02,
            band_tol: 1e-9,
            condition_limit: DEFAULT_CONDITION_LIMIT,
            weak11_grid: None,
            bmo_grid: None,
        }
    }
}

/// Per-`(k, p)` certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub k: u64,
    pub p: f64,
    /// `gamma_k(p)`: certified lower bound, conjectured exact norm.
    pub gamma: f64,
    pub ratio_riesz_potential: f64,
    pub ratio_gauss_regression: f64,
    pub band_value: f64,
    pub weak11_ratio: Option<f64>,
    pub bmo_ratio: Option<f64>,
    pub eps_schedule: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
    pub failures: Vec<String>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every route for one `(k, p)`. For `p < 2` the Gaussian route and the
/// band are evaluated at the dual exponent, where `gamma` is the same.
pub fn certify(k: u64, p: f64, opts: &CertifyOptions) -> Result<CertificationReport> {
    check_kp("certify", k, p)?;
    check_schedule(&opts.eps_schedule)?;
    let mut diagnostics = BTreeMap::new();
    let mut failures = Vec::new();
    let pd = if p < 2.0 { p / (p - 1.0) } else { p };
    if pd != p {
        diagnostics.insert("dual_p".to_string(), pd);
    }
    let gamma = gamma_kp(k, pd)?;
    let band_value = sharpness_ratio(k, pd)?;
    if !(band_value >= 0.5 - opts.band_tol && band_value <= 1.0 + opts.band_tol) {
        failures.push(format!("band value {band_value} outside [1/2, 1]"));
    }
    let rpot = ratio_riesz_potential(k, pd, opts.riesz_eps)?;
    diagnostics.insert("riesz_potential_rel_dev".into(), (rpot / gamma - 1.0).abs());

    let ratio_gauss_regression = match gauss_regression_pair(k, pd, &opts.eps_schedule, opts.condition_limit) {
        Ok((fit, t_fit)) => {
            diagnostics.insert("regression_slope_g".into(), fit.slope_g);
            diagnostics.insert("regression_slope_f".into(), fit.slope_f);
            diagnostics.insert("regression_condition".into(), fit.condition);
            diagnostics.insert("t_axis_regression_ratio".into(), t_fit.ratio);
            if let Some(last) = fit.norms.last() {
                diagnostics.insert("gauss_ratio_smallest_eps".into(), last.ratio());
            }
            if !(fit.slope_g > 0.0 && fit.slope_f > 0.0) {
                failures.push("non-positive regression slope".into());
            }
            fit.ratio
        }
        Err(Error::NonConvergence { estimate, .. }) => {
            diagnostics.insert("regression_nonconvergence_estimate".into(), estimate);
            failures.push("Gaussian-route quadrature did not converge".into());
            f64::NAN
        }
        Err(Error::IllConditioned(c)) => {
            diagnostics.insert("regression_condition".into(), c);
            failures.push("regression design ill-conditioned".into());
            f64::NAN
        }
        Err(e) => return Err(e),
    };
    let dev = (ratio_gauss_regression / gamma - 1.0).abs();
    diagnostics.insert("regression_rel_dev".into(), dev);
    if !(dev <= opts.regression_tol) {
        failures.push(format!("regression ratio {ratio_gauss_regression} deviates from gamma by {dev:.3e}"));
    }

    let weak11_ratio = match opts.weak11_grid {
        Some((n, side)) => Some(weak11_trend(&[k as i64], n, side)?[0].per_k()),
        None => None,
    };
    let bmo_ratio = match opts.bmo_grid {
        Some((n, side)) if k % 2 == 1 => Some(bmo_trend(&[k], n, side)?[0].ratio()),
        _ => None,
    };
    Ok(CertificationReport {
        k,
        p,
        gamma,
        ratio_riesz_potential: rpot,
        ratio_gauss_regression,
        band_value,
        weak11_ratio,
        bmo_ratio,
        eps_schedule: opts.eps_schedule.clone(),
        diagnostics,
        failures,
    })
}
