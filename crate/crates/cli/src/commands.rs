use crate::config::{ApplyArgs, CertifyArgs, Method, RadialArgs, Settings, VerifyArgs};
use crate::output::{Cell, Table};
use crate::{CliError, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rieszlab_core::certification::{
    bmo_trend, certify, default_eps_schedule, weak11_trend, CertificationReport, CertifyOptions,
};
use rieszlab_core::fields::{
    apply_multiplier, conjugation_symmetry_check, load_field, lp_norm, pv_convolve_at, pv_convolve_unnormalized,
    save_field, Field, PvOptions, SpectralPlan,
};
use rieszlab_core::kernels::{
    heat_kernel, phi_eps, radial_profile_g, rk_riesz_potential, riesz_potential_kernel, truncated_riesz_lower,
    truncated_riesz_upper,
};
use rieszlab_core::quadrature::{adaptive_quad, oscillatory_quad_sink, radial_lp_norm_with_breaks};
use rieszlab_core::special_functions::{
    digamma, gamma, gamma_kp, log_gamma, osc_integral_closed, osc_integral_recurrence, sharpness_ratio, EULER_GAMMA,
};
use rieszlab_core::{Complex64, QuadSpec};
use std::f64::consts::PI;

fn check_tols(s: &Settings, known: &[&str]) -> Result<(), CliError> {
    if let Some(bad) = s.tol_keys().find(|k| !known.contains(k)) {
        return Err(CliError::Config(format!("unknown tolerance `tol.{bad}` (known: {})", known.join(", "))));
    }
    Ok(())
}

fn positive_ks(ks: &[i64]) -> Result<Vec<u64>, CliError> {
    ks.iter()
        .map(|&k| if k >= 1 { Ok(k as u64) } else { Err(CliError::Config(format!("k = {k} must be positive"))) })
        .collect()
}

fn dual(p: f64) -> f64 {
    if p < 2.0 { p / (p - 1.0) } else { p }
}

pub fn gamma_table(s: &Settings) -> Result<Outcome, CliError> {
    check_tols(s, &["band"])?;
    let ks = positive_ks(&s.k_list("1:10")?)?;
    let ps = s.real_list("p", "2,3,4")?;
    if let Some(p) = ps.iter().find(|&&p| !(p > 1.0)) {
        return Err(CliError::Config(format!("p = {p} must exceed 1")));
    }
    let tol = s.tol("band", 1e-12)?;
    let mut t = Table::new("gamma-table", &["k", "p", "gamma", "reference", "band_value"]);
    let mut ok = true;
    for &k in &ks {
        for &p in &ps {
            let pd = dual(p);
            let g = gamma_kp(k, pd)?;
            let band = sharpness_ratio(k, pd)?;
            ok &= band >= 0.5 - tol && band <= 1.0 + tol;
            let reference = (k as f64).powf(1.0 - 2.0 / pd) * (pd - 1.0);
            t.push(vec![k.into(), p.into(), g.into(), reference.into(), band.into()]);
        }
    }
    Ok(Outcome { table: t, pass: ok })
}

struct Check {
    family: &'static str,
    name: String,
    error: f64,
    threshold: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn family_log_gamma() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut fact = 1.0f64;
    for n in 1..=30u32 {
        if n > 1 {
            fact *= (n - 1) as f64;
        }
        worst = worst.max((log_gamma(n as f64)? - fact.ln()).abs() / fact.ln().abs().max(1.0));
    }
    out.push(Check { family: "log-gamma", name: "ln Gamma(n) = ln (n-1)!, n <= 30".into(), error: worst, threshold: 1e-14 });
    out.push(Check { family: "log-gamma", name: "Gamma(1/2) = sqrt(pi)".into(), error: rel(gamma(0.5)?, PI.sqrt()), threshold: 1e-14 });
    out.push(Check {
        family: "log-gamma",
        name: "Gamma(1/3)".into(),
        error: rel(gamma(1.0 / 3.0)?, 2.678_938_534_707_747_6),
        threshold: 1e-14,
    });
    out.push(Check { family: "log-gamma", name: "Gamma(x+1) = x Gamma(x), x = 0.3..40".into(), error: {
        let mut w = 0.0f64;
        for i in 0..200 {
            let x = 0.3 + i as f64 * 0.2;
            w = w.max((log_gamma(x + 1.0)? - log_gamma(x)? - x.ln()).abs());
        }
        w
    }, threshold: 1e-13 });
    out.push(Check { family: "log-gamma", name: "digamma(1) = -Euler gamma".into(), error: rel(digamma(1.0)?, -EULER_GAMMA), threshold: 1e-13 });
    Ok(out)
}

fn family_oscileq() -> Result<Vec<Check>, CliError> {
    let spec = QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 50, base_rule_order: 21 };
    let alphas = [0.1, 0.25, 0.5, 0.75, 0.9];
    let mut quad = 0.0f64;
    for k in (1..=99u64).step_by(2) {
        for &a in &alphas {
            let q = oscillatory_quad_sink(|t: f64| t.sin().powf(-2.0 * a), k, 2.0 * a, &spec)?.value;
            quad = quad.max((q - osc_integral_closed(k, a)?).abs());
        }
    }
    let mut recur = 0.0f64;
    for &a in &alphas {
        let mut v = osc_integral_closed(1, a)?;
        for k in (3..=999u64).step_by(2) {
            v = osc_integral_recurrence(k, a, v)?;
            recur = recur.max(rel(v, osc_integral_closed(k, a)?));
        }
    }
    Ok(vec![
        Check { family: "oscileq", name: "closed form vs quadrature, odd k <= 99".into(), error: quad, threshold: 1e-8 },
        Check { family: "oscileq", name: "recurrence vs closed form, odd k <= 999".into(), error: recur, threshold: 1e-11 },
    ])
}

fn family_powers() -> Result<Vec<Check>, CliError> {
    let spec = QuadSpec::with_tol(1e-300, 1e-13);
    let mut worst = 0.0f64;
    for p in [2.0, 3.0, 4.0] {
        for eps in [1e-2, 1e-4] {
            let v = radial_lp_norm_with_breaks(
                |r| if (eps..=1.0 / eps).contains(&r) { r.powf(-2.0 / p) } else { 0.0 },
                p,
                &[eps, 1.0 / eps],
                &spec,
            )?;
            worst = worst.max(rel(v, (4.0 * PI * (1.0 / eps).ln()).powf(1.0 / p)));
        }
    }
    Ok(vec![Check { family: "powers-lp", name: "annulus norm of r^{-2/p}".into(), error: worst, threshold: 1e-10 }])
}

fn family_subordination() -> Result<Vec<Check>, CliError> {
    let spec = QuadSpec::with_tol(1e-300, 1e-12);
    let mut worst = 0.0f64;
    for alpha in [0.25, 0.5, 0.8] {
        for rho in [0.3, 1.0, 2.5] {
            let z = Complex64::new(rho, 0.0);
            let mut err = None;
            // t = e^s; the integrand decays like e^{-rho^2 e^{-s}/4} below and e^{(alpha-1)s} above
            let v = adaptive_quad(
                |s: f64| {
                    let t = s.exp();
                    match heat_kernel(t, z) {
                        Ok(h) => t.powf(alpha) * h,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                -40.0,
                (2.0 * rho.ln() + 40.0 / (1.0 - alpha)).max(60.0),
                &spec,
            )?;
            if let Some(e) = err {
                return Err(e.into());
            }
            let want = riesz_potential_kernel(alpha, z)?;
            worst = worst.max(rel(v.value / gamma(alpha)?, want));
        }
    }
    Ok(vec![Check { family: "subordination", name: "Riesz potential as heat-kernel time integral".into(), error: worst, threshold: 1e-9 }])
}

fn family_truncation() -> Result<Vec<Check>, CliError> {
    let mut worst = 0.0f64;
    for alpha in [0.2, 0.4, 0.7] {
        for r in [0.5, 2.0] {
            for rho in [0.1, 1.0, 3.0, 10.0] {
                let z = Complex64::new(rho, 0.3 * rho);
                let sum = truncated_riesz_lower(alpha, r, z)? + truncated_riesz_upper(alpha, r, z)?;
                worst = worst.max(rel(sum, riesz_potential_kernel(alpha, z)?));
            }
        }
    }
    Ok(vec![Check { family: "truncation", name: "lower + upper time pieces = full kernel".into(), error: worst, threshold: 1e-12 }])
}

fn family_k0() -> Result<Vec<Check>, CliError> {
    let mut worst = 0.0f64;
    for alpha in [0.2, 0.5, 0.9] {
        for rho in [0.2, 1.0, 4.0] {
            let z = Complex64::from_polar(rho, 0.7);
            let a = rk_riesz_potential(0, alpha, z)?;
            let b = riesz_potential_kernel(alpha, z)?;
            worst = worst.max((a - b).norm() / b);
        }
    }
    Ok(vec![Check { family: "k0-reduction", name: "k = 0 closed form is the Riesz potential".into(), error: worst, threshold: 1e-14 }])
}

fn family_conjugation() -> Result<Vec<Check>, CliError> {
    let n = 64;
    let plan = SpectralPlan::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut spec = vec![Complex64::new(0.0, 0.0); n * n];
    for (idx, v) in spec.iter_mut().enumerate() {
        let (a, b) = (idx / n, idx % n);
        let fa = if a < n / 2 { a as i64 } else { a as i64 - n as i64 };
        let fb = if b < n / 2 { b as i64 } else { b as i64 - n as i64 };
        if fa.abs() < 16 && fb.abs() < 16 && idx != 0 {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let f = plan.inverse(spec, 4.0)?;
    let scale = f.sup_norm();
    let mut out = Vec::new();
    for k in 1..=4i64 {
        out.push(Check {
            family: "conjugation",
            name: format!("R^-k f = (-1)^k conj(R^k conj f), k = {k}"),
            error: conjugation_symmetry_check(&f, k, &plan)? / scale,
            threshold: 1e-12,
        });
    }
    Ok(out)
}

type Family = (&'static str, fn() -> Result<Vec<Check>, CliError>);

const FAMILIES: &[Family] = &[
    ("log-gamma", family_log_gamma),
    ("oscileq", family_oscileq),
    ("powers-lp", family_powers),
    ("subordination", family_subordination),
    ("truncation", family_truncation),
    ("k0-reduction", family_k0),
    ("conjugation", family_conjugation),
];

pub fn verify_identities(s: &Settings, _args: &VerifyArgs) -> Result<Outcome, CliError> {
    check_tols(s, &["scale"])?;
    let scale = s.tol("scale", 1.0)?;
    let filter = s.raw("filter").map(str::to_string);
    let chosen: Vec<&Family> = FAMILIES.iter().filter(|(name, _)| filter.as_deref().is_none_or(|f| name.contains(f))).collect();
    if chosen.is_empty() {
        return Err(CliError::Config(format!("filter `{}` matches no family", filter.unwrap_or_default())));
    }
    let results: Vec<Result<Vec<Check>, CliError>> = chosen.par_iter().map(|(_, run)| run()).collect();
    let mut t = Table::new("verify-identities", &["family", "check", "error", "threshold", "status"]);
    let mut ok = true;
    for r in results {
        for c in r? {
            let thr = c.threshold * scale;
            let pass = c.error <= thr;
            ok &= pass;
            t.push(vec![c.family.into(), c.name.into(), c.error.into(), thr.into(), if pass { "PASS" } else { "FAIL" }.into()]);
        }
    }
    Ok(Outcome { table: t, pass: ok })
}

pub fn certify_cmd(s: &Settings, _args: &CertifyArgs) -> Result<Outcome, CliError> {
    check_tols(s, &["regression", "band"])?;
    let ks = positive_ks(&s.k_list("3")?)?;
    let ps = s.real_list("p", "4")?;
    if let Some(p) = ps.iter().find(|&&p| !(p > 1.0)) {
        return Err(CliError::Config(format!("p = {p} must exceed 1")));
    }
    let (n, side) = s.grid(256, 16.0)?;
    let opts = CertifyOptions {
        eps_schedule: s.eps_schedule(&default_eps_schedule())?,
        regression_tol: s.tol("regression", 0.02)?,
        band_tol: s.tol("band", 1e-9)?,
        weak11_grid: s.flag("weak11")?.then_some((n, side)),
        bmo_grid: s.flag("bmo")?.then_some((n, side)),
        ..CertifyOptions::default()
    };
    let mut cells: Vec<(u64, f64)> = ks.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    cells.dedup();
    let reports: Vec<Result<CertificationReport, rieszlab_core::Error>> = cells.par_iter().map(|&(k, p)| certify(k, p, &opts)).collect();
    let mut t = Table::new(
        "certify",
        &[
            "k", "p", "gamma", "ratio_riesz_potential", "ratio_gauss_regression", "t_axis_regression_ratio", "band_value",
            "weak11_ratio", "bmo_ratio", "regression_rel_dev", "status", "failures",
        ],
    );
    let mut ok = true;
    for r in reports {
        let r = r?;
        ok &= r.passed();
        let d = |key: &str| r.diagnostics.get(key).copied();
        t.push(vec![
            r.k.into(),
            r.p.into(),
            r.gamma.into(),
            r.ratio_riesz_potential.into(),
            r.ratio_gauss_regression.into(),
            d("t_axis_regression_ratio").into(),
            r.band_value.into(),
            r.weak11_ratio.into(),
            r.bmo_ratio.into(),
            d("regression_rel_dev").into(),
            if r.passed() { "PASS" } else { "FAIL" }.into(),
            r.failures.join("; ").into(),
        ]);
    }
    Ok(Outcome { table: t, pass: ok })
}

/// Catmull-Rom weights for the four nodes around fractional offset `t`.
fn cubic_weights(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// C^1 piecewise-cubic interpolant of the cell-center samples with zero ghost
/// nodes, cut off at the outer cell edges.
fn interpolant(field: &Field) -> impl Fn(Complex64) -> Complex64 + '_ {
    let n = field.n();
    let h = field.spacing();
    let x0 = field.coord(0);
    let zero = Complex64::new(0.0, 0.0);
    let at = move |i: isize, j: isize| {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize { zero } else { field.get(i as usize, j as usize) }
    };
    move |z: Complex64| {
        let u = (z.re - x0) / h;
        let v = (z.im - x0) / h;
        let edge = n as f64 - 0.5;
        if !(u >= -0.5 && v >= -0.5 && u < edge && v < edge) {
            return zero;
        }
        let (i, j) = (u.floor() as isize, v.floor() as isize);
        let (wu, wv) = (cubic_weights(u - i as f64), cubic_weights(v - j as f64));
        let mut acc = zero;
        for (di, a) in wu.iter().enumerate() {
            for (dj, b) in wv.iter().enumerate() {
                acc += at(i + di as isize - 1, j + dj as isize - 1) * (a * b);
            }
        }
        acc
    }
}

fn kernel_at(field: &Field, k: i64, z: Complex64) -> Result<Complex64, CliError> {
    let f = interpolant(field);
    let scale = field.sup_norm().max(f64::MIN_POSITIVE);
    let h = field.spacing();
    let (lo, hi) = (-0.5 * field.side(), 0.5 * field.side());
    // angles where the circle |w| = rho about z crosses the edges of the support
    let crossings = move |rho: f64| -> Vec<f64> {
        let mut out = Vec::new();
        for c in [lo, hi] {
            let cx = (z.re - c) / rho;
            if cx.abs() < 1.0 {
                out.extend([cx.acos(), -cx.acos()]);
            }
            let sy = (z.im - c) / rho;
            if sy.abs() < 1.0 {
                let a = sy.asin();
                out.extend([a, if a > 0.0 { PI - a } else { -PI - a }]);
            }
        }
        out
    };
    let mut opts = PvOptions::new((hi - lo) * std::f64::consts::SQRT_2);
    let edges = [z.re - lo, hi - z.re, z.im - lo, hi - z.im];
    opts.inner_radius = Some((4.0 * h).min(edges.iter().cloned().fold(f64::MAX, f64::min)));
    opts.radial_breaks = edges.to_vec();
    for cx in [lo, hi] {
        for cy in [lo, hi] {
            opts.radial_breaks.push((z - Complex64::new(cx, cy)).norm());
        }
    }
    opts.radial_breaks.retain(|&r| r > 0.0);
    opts.radial_breaks.sort_by(f64::total_cmp);
    opts.radial_breaks.dedup();
    opts.angular_breaks = Some(&crossings);
    // the interpolant is only O(h^3) accurate; tighter tolerances buy nothing
    opts.radial_spec = QuadSpec { abs_tol: 1e-6 * scale, rel_tol: 1e-5, max_depth: 30, base_rule_order: 15 };
    opts.angular_spec = QuadSpec { abs_tol: 1e-7 * scale, rel_tol: 1e-6, max_depth: 30, base_rule_order: 15 };
    Ok(pv_convolve_at(f, k, z, &opts)?)
}

fn probes(field: &Field) -> Vec<(usize, usize)> {
    let n = field.n();
    let (lo, hi) = (3 * n / 8, 5 * n / 8);
    let step = ((hi - lo) / 4).max(1);
    let mut out = Vec::new();
    let mut i = lo;
    while i < hi {
        let mut j = lo;
        while j < hi {
            out.push((i, j));
            j += step;
        }
        i += step;
    }
    out
}

pub fn apply(s: &Settings, args: &ApplyArgs) -> Result<Outcome, CliError> {
    check_tols(s, &["compare"])?;
    let input = s.path("input").ok_or_else(|| CliError::Config("apply needs --input".into()))?;
    let out_path = s.path("field-output");
    let ks = s.k_list("1")?;
    let [k] = ks[..] else {
        return Err(CliError::Config("apply takes a single k".into()));
    };
    let method = match s.raw("method") {
        None | Some("fft") => Method::Fft,
        Some("kernel") => Method::Kernel,
        Some(m) => return Err(CliError::Config(format!("method must be fft or kernel, got `{m}`"))),
    };
    let compare = args.compare || s.flag("compare")?;
    let tol = s.tol("compare", 1e-2)?;
    let field = load_field(&input).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    if k == 0 && (method == Method::Kernel || compare) {
        return Err(CliError::Config("the kernel method needs k != 0".into()));
    }
    let plan = SpectralPlan::new(field.n())?;
    let out = match method {
        Method::Fft => apply_multiplier(&field, k, &plan)?,
        Method::Kernel => {
            let n = field.n();
            let vals: Result<Vec<Complex64>, CliError> =
                (0..n * n).into_par_iter().map(|idx| kernel_at(&field, k, field.point(idx / n, idx % n))).collect();
            Field::new(n, field.side(), vals?)?
        }
    };
    if let Some(p) = &out_path {
        save_field(&out, p)?;
    }
    let (mut discrepancy, mut nprobes, mut pass) = (Cell::Missing, Cell::Missing, true);
    if compare {
        let fft = if method == Method::Fft { out.clone() } else { apply_multiplier(&field, k, &plan)? };
        let pts = probes(&field);
        let vals: Result<Vec<(Complex64, Complex64)>, CliError> = pts
            .par_iter()
            .map(|&(i, j)| {
                let kv = if method == Method::Kernel { out.get(i, j) } else { kernel_at(&field, k, field.point(i, j))? };
                Ok((kv, fft.get(i, j)))
            })
            .collect();
        let vals = vals?;
        let diff = vals.iter().fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        let scale = vals.iter().fold(0.0f64, |m, (_, b)| m.max(b.norm()));
        let d = if scale > 0.0 { diff / scale } else { diff };
        pass = d <= tol;
        discrepancy = d.into();
        nprobes = pts.len().into();
    }
    let mut t = Table::new("apply", &["method", "k", "n", "side", "l2_in", "l2_out", "discrepancy", "probes"]);
    t.push(vec![
        if method == Method::Fft { "fft" } else { "kernel" }.into(),
        k.into(),
        field.n().into(),
        field.side().into(),
        lp_norm(&field, 2.0)?.into(),
        lp_norm(&out, 2.0)?.into(),
        discrepancy,
        nprobes,
    ]);
    Ok(Outcome { table: t, pass })
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}

pub fn weak11(s: &Settings) -> Result<Outcome, CliError> {
    check_tols(s, &["spread"])?;
    let ks = s.k_list("1:9:2")?;
    if ks.contains(&0) {
        return Err(CliError::Config("k = 0 is not allowed".into()));
    }
    let (n, side) = s.grid(256, 32.0)?;
    let rows = weak11_trend(&ks, n, side)?;
    let mut t = Table::new("weak11", &["k", "w", "w_over_k"]);
    for r in &rows {
        t.push(vec![r.k.into(), r.w.into(), r.per_k().into()]);
    }
    let per: Vec<f64> = rows.iter().map(|r| r.per_k()).collect();
    Ok(Outcome { table: t, pass: spread(&per) <= s.tol("spread", 4.0)? })
}

pub fn bmo(s: &Settings) -> Result<Outcome, CliError> {
    check_tols(s, &["spread"])?;
    let ks = positive_ks(&s.k_list("1:15:2")?)?;
    if let Some(k) = ks.iter().find(|&&k| k % 2 == 0) {
        return Err(CliError::Config(format!("k = {k} must be odd")));
    }
    let (n, side) = s.grid(256, 16.0)?;
    let rows = bmo_trend(&ks, n, side)?;
    let mut t = Table::new("bmo", &["k", "sup_f", "bmo_g", "ratio", "ratio_over_k"]);
    for r in &rows {
        t.push(vec![r.k.into(), r.sup_f.into(), r.bmo_g.into(), r.ratio().into(), (r.ratio() / r.k as f64).into()]);
    }
    let per: Vec<f64> = rows.iter().map(|r| r.ratio() / r.k as f64).collect();
    Ok(Outcome { table: t, pass: spread(&per) <= s.tol("spread", 4.0)? })
}

/// `2 u^{-2 sigma} G(u)` and the un-normalized principal-value convolution of
/// the truncated power at `u`.
pub fn radial_pair(k: u64, sigma: f64, u: f64) -> Result<(f64, Complex64), CliError> {
    let formula = 2.0 * u.powf(-2.0 * sigma) * radial_profile_g(k, sigma, u)?;
    // the truncated power |z|^{-2 sigma} 1_{|z|<1} is phi_eps at p = 2, eps = 1/2 - sigma
    let (p, eps) = (2.0, 0.5 - sigma);
    let breaks = move |rho: f64| -> Vec<f64> {
        let c = (u * u + rho * rho - 1.0) / (2.0 * u * rho);
        if c.abs() < 1.0 {
            vec![c.acos(), -c.acos()]
        } else {
            Vec::new()
        }
    };
    let mut opts = PvOptions::new(1.0 + u);
    opts.inner_radius = Some(0.5 * u.min((1.0 - u).abs()));
    opts.radial_breaks = vec![u, (1.0 - u).abs(), 1.0 + u];
    opts.angular_breaks = Some(&breaks);
    opts.radial_spec = QuadSpec { abs_tol: 1e-8, rel_tol: 1e-8, max_depth: 60, base_rule_order: 15 };
    opts.angular_spec = QuadSpec { abs_tol: 1e-9, rel_tol: 1e-9, max_depth: 60, base_rule_order: 15 };
    let pv = pv_convolve_unnormalized(|w| Complex64::new(phi_eps(p, eps, w), 0.0), -(k as i64), Complex64::new(u, 0.0), &opts)?;
    Ok((formula, pv))
}

pub fn radial_profile(s: &Settings, _args: &RadialArgs) -> Result<Outcome, CliError> {
    check_tols(s, &["radial"])?;
    let ks = positive_ks(&s.k_list("3")?)?;
    let [k] = ks[..] else {
        return Err(CliError::Config("radial-profile takes a single k".into()));
    };
    let sigma = s.real("sigma", 0.25)?;
    let us = s.real_list("u", "0.5,2")?;
    let tol = s.tol("radial", 1e-4)?;
    let rows: Result<Vec<(f64, f64, Complex64)>, CliError> =
        us.par_iter().map(|&u| radial_pair(k, sigma, u).map(|(a, b)| (u, a, b))).collect();
    let mut t = Table::new("radial-profile", &["u", "profile_formula", "profile_pv", "abs_diff"]);
    let mut ok = true;
    for (u, a, b) in rows? {
        let d = (b - a).norm();
        ok &= d <= tol;
        t.push(vec![u.into(), a.into(), b.re.into(), d.into()]);
    }
    Ok(Outcome { table: t, pass: ok })
}
