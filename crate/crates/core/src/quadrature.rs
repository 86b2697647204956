//! Deterministic one-dimensional adaptive Gauss-Legendre quadrature.
//!
//! Refinement is global: the panel with the largest error estimate is split
//! next, and the final sum runs over panels in left-to-right order so that
//! results do not depend on refinement history or thread count.

use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, AddAssign, Mul, Sub};
use std::sync::OnceLock;

/// Values that can be integrated: real or complex.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign + Send + Sync
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and rule selection for [`adaptive_quad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any single panel.
    pub max_depth: u32,
    /// Gauss-Legendre nodes per panel; odd, 7..=61.
    pub base_rule_order: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 40, base_rule_order: 15 }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32, base_rule_order: usize) -> Result<Self> {
        let s = Self { abs_tol, rel_tol, max_depth, base_rule_order };
        s.validate()?;
        Ok(s)
    }

    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(domain("QuadSpec", "tolerances must be positive"));
        }
        if self.max_depth < 1 {
            return Err(domain("QuadSpec", "max_depth must be at least 1"));
        }
        if !(7..=61).contains(&self.base_rule_order) || self.base_rule_order.is_multiple_of(2) {
            return Err(domain("QuadSpec", format!("rule order {} not odd in 7..=61", self.base_rule_order)));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral value with its error estimate and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub n_evals: usize,
}

impl<T: Scalar> QuadResult<T> {
    fn merge(self, other: QuadResult<T>) -> QuadResult<T> {
        QuadResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            n_evals: self.n_evals + other.n_evals,
        }
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if i == m - 1 && n % 2 == 1 {
            x = 0.0;
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn rule(n: usize) -> &'static Rule {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=61).map(|n| if n >= 7 && n % 2 == 1 { legendre_rule(n) } else { Rule { nodes: vec![], weights: vec![] } }).collect());
    &rules[n]
}

/// Gauss-Legendre nodes and weights on [-1, 1] (odd n in 7..=61).
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(7..=61).contains(&n) || n.is_multiple_of(2) {
        return Err(domain("gauss_legendre", format!("n = {n} not odd in 7..=61")));
    }
    let r = rule(n);
    Ok((r.nodes.clone(), r.weights.clone()))
}

fn apply_rule<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, r: &Rule, a: f64, b: f64) -> T {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = T::zero();
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        s += f(c + h * x) * (w * h);
    }
    s
}

struct Panel<T> {
    a: f64,
    b: f64,
    depth: u32,
    left: T,
    right: T,
    err: f64,
}

impl<T> Panel<T> {
    fn key(&self) -> f64 {
        self.err
    }
}

struct ByErr<T>(Panel<T>);

impl<T> PartialEq for ByErr<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T> Eq for ByErr<T> {}
impl<T> PartialOrd for ByErr<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for ByErr<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0
            .key()
            .total_cmp(&o.0.key())
            .then_with(|| o.0.a.total_cmp(&self.0.a))
    }
}

fn make_panel<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, r: &Rule, a: f64, b: f64, depth: u32, whole: T) -> Panel<T> {
    let m = 0.5 * (a + b);
    let left = apply_rule(f, r, a, m);
    let right = apply_rule(f, r, m, b);
    let err = (whole - (left + right)).modulus();
    Panel { a, b, depth, left, right, err: if err.is_nan() { f64::INFINITY } else { err } }
}

const MAX_PANELS: usize = 200_000;

/// Adaptive integral of `f` over [a, b].
///
/// Each panel is scored by |G(panel) - G(left half) - G(right half)| with G the
/// base Gauss rule; the reported value sums the half-panel estimates.
pub fn adaptive_quad<T: Scalar, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult<T>> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("adaptive_quad", "limits must be finite"));
    }
    if a == b {
        return Ok(QuadResult { value: T::zero(), abs_error_estimate: 0.0, n_evals: 0 });
    }
    if a > b {
        let r = adaptive_quad(f, b, a, spec)?;
        return Ok(QuadResult { value: r.value * -1.0, ..r });
    }
    let r = rule(spec.base_rule_order);
    let n = spec.base_rule_order;
    let whole = apply_rule(&mut f, r, a, b);
    let mut evals = n;
    let first = make_panel(&mut f, r, a, b, 0, whole);
    evals += 2 * n;

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let mut total_err = first.err;
    let mut total_val = first.left + first.right;
    heap.push(ByErr(first));

    loop {
        if !total_val.is_finite_value() {
            return Err(Error::NonConvergence { value: f64::NAN, estimate: f64::INFINITY, n_evals: evals });
        }
        if total_err <= spec.tolerance(total_val.modulus()) {
            break;
        }
        let Some(ByErr(worst)) = heap.pop() else { break };
        if worst.depth >= spec.max_depth || heap.len() + frozen.len() >= MAX_PANELS {
            frozen.push(worst);
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let lp = make_panel(&mut f, r, worst.a, m, worst.depth + 1, worst.left);
        let rp = make_panel(&mut f, r, m, worst.b, worst.depth + 1, worst.right);
        evals += 4 * n;
        total_err += lp.err + rp.err - worst.err;
        total_val = total_val + (lp.left + lp.right + rp.left + rp.right) - (worst.left + worst.right);
        heap.push(ByErr(lp));
        heap.push(ByErr(rp));
    }

    let mut panels: Vec<Panel<T>> = heap.into_iter().map(|p| p.0).chain(frozen).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = T::zero();
    let mut err = 0.0;
    for p in &panels {
        value += p.left + p.right;
        err += p.err;
    }
    if !value.is_finite_value() {
        return Err(Error::NonConvergence { value: f64::NAN, estimate: f64::INFINITY, n_evals: evals });
    }
    if err > spec.tolerance(value.modulus()) {
        return Err(Error::NonConvergence { value: value.modulus(), estimate: err, n_evals: evals });
    }
    Ok(QuadResult { value, abs_error_estimate: err, n_evals: evals })
}

/// Integral over [a, b] where `f` may behave like (x-a)^{-beta_a} and (b-x)^{-beta_b}.
///
/// A positive exponent triggers the substitution x = a + (b-a) t^m with
/// m = 1/(1-beta) on the corresponding half; non-positive exponents leave that
/// half untouched. Nodes that round onto a singular endpoint contribute zero.
pub fn adaptive_quad_singular<T: Scalar, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    beta_a: f64,
    beta_b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if beta_a >= 1.0 || beta_b >= 1.0 {
        return Err(domain("adaptive_quad_singular", "endpoint exponents must be < 1"));
    }
    let sing_a = beta_a > 0.0;
    let sing_b = beta_b > 0.0;
    if !sing_a && !sing_b {
        return adaptive_quad(f, a, b, spec);
    }
    let mid = if sing_a && sing_b { 0.5 * (a + b) } else if sing_a { b } else { a };
    let sub = if sing_a && sing_b { QuadSpec { abs_tol: 0.5 * spec.abs_tol, ..*spec } } else { *spec };
    let mut total = QuadResult { value: T::zero(), abs_error_estimate: 0.0, n_evals: 0 };
    if sing_a {
        let m = 1.0 / (1.0 - beta_a);
        let w = mid - a;
        let r = adaptive_quad(
            |t: f64| {
                let x = a + w * t.powf(m);
                if x == a { T::zero() } else { f(x) * (w * m * t.powf(m - 1.0)) }
            },
            0.0,
            1.0,
            &sub,
        )?;
        total = total.merge(r);
    }
    if sing_b {
        let m = 1.0 / (1.0 - beta_b);
        let w = b - mid;
        let r = adaptive_quad(
            |t: f64| {
                let x = b - w * t.powf(m);
                if x == b { T::zero() } else { f(x) * (w * m * t.powf(m - 1.0)) }
            },
            0.0,
            1.0,
            &sub,
        )?;
        total = total.merge(r);
    }
    Ok(total)
}

/// Integrates over consecutive intervals given by sorted `points`, summing the
/// panel values in ascending order of magnitude. An endpoint exponent may be
/// declared for the left end of the first interval.
pub fn split_quad<T: Scalar, F: FnMut(f64) -> T>(
    mut f: F,
    points: &[f64],
    beta_first: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if points.len() < 2 {
        return Err(domain("split_quad", "need at least two points"));
    }
    let npan = (points.len() - 1) as f64;
    let sub = QuadSpec { abs_tol: spec.abs_tol / npan, ..*spec };
    let mut parts = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            if w[1] == w[0] {
                continue;
            }
            return Err(domain("split_quad", "points must be increasing"));
        }
        let r = if i == 0 { adaptive_quad_singular(&mut f, w[0], w[1], beta_first, 0.0, &sub)? } else { adaptive_quad(&mut f, w[0], w[1], &sub)? };
        parts.push(r);
    }
    parts.sort_by(|x, y| x.value.modulus().total_cmp(&y.value.modulus()));
    let mut total = QuadResult { value: T::zero(), abs_error_estimate: 0.0, n_evals: 0 };
    for p in parts {
        total = total.merge(p);
    }
    Ok(total)
}

/// int_0^{pi/2} h(t) sin(k t) dt, split at the zeros j pi / k of sin(k t).
///
/// `beta` declares h(t) ~ t^{-beta} at 0; the product h sin(kt) then behaves
/// like t^{1-beta}, substituted only when that is singular.
pub fn oscillatory_quad_sink<T: Scalar, H: FnMut(f64) -> T>(
    mut h: H,
    k: u64,
    beta: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if k == 0 {
        return Err(domain("oscillatory_quad_sink", "k must be positive"));
    }
    if beta >= 2.0 {
        return Err(domain("oscillatory_quad_sink", "product singularity not integrable"));
    }
    let kf = k as f64;
    let mut pts = vec![0.0];
    let mut j = 1;
    while (j as f64) * PI / kf < FRAC_PI_2 * (1.0 - 1e-14) {
        pts.push(j as f64 * PI / kf);
        j += 1;
    }
    pts.push(FRAC_PI_2);
    split_quad(move |t| h(t) * (kf * t).sin(), &pts, beta - 1.0, spec)
}

/// Points in [a, b] where cos(k t) vanishes, together with a and b.
pub fn cos_zero_points(k: u64, a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a];
    if k > 0 {
        let kf = k as f64;
        let mut j = ((a * kf / PI) - 0.5).ceil().max(0.0) as i64;
        loop {
            let t = (j as f64 + 0.5) * PI / kf;
            if t >= b * (1.0 - 1e-14) {
                break;
            }
            if t > a {
                pts.push(t);
            }
            j += 1;
        }
    }
    pts.push(b);
    pts
}

/// (2 pi int_0^{r_max} rho(r)^p r dr)^{1/p}.
pub fn radial_lp_norm<R: FnMut(f64) -> f64>(rho: R, p: f64, r_max: f64, spec: &QuadSpec) -> Result<f64> {
    radial_lp_norm_with_breaks(rho, p, &[r_max], spec)
}

/// Radial L^p norm with declared jump or kink radii. `breaks` must be positive
/// and increasing; the last entry is the outer radius. Each segment [a, b] with
/// a > 0 is integrated in u = ln r; the innermost piece is integrated decade by
/// decade toward 0 until its contribution is negligible.
pub fn radial_lp_norm_with_breaks<R: FnMut(f64) -> f64>(mut rho: R, p: f64, breaks: &[f64], spec: &QuadSpec) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain("radial_lp_norm", format!("p = {p} must be >= 1")));
    }
    if breaks.is_empty() || !(breaks[0] > 0.0) || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("radial_lp_norm", "breaks must be positive and increasing"));
    }
    let mut g = |u: f64| {
        let r = u.exp();
        let v = rho(r).abs();
        if v == 0.0 {
            0.0
        } else {
            (p * v.ln() + 2.0 * u).exp()
        }
    };
    let mut parts: Vec<f64> = Vec::new();
    for w in breaks.windows(2) {
        parts.push(adaptive_quad(&mut g, w[0].ln(), w[1].ln(), spec)?.value);
    }
    let mut hi = breaks[0].ln();
    let step = std::f64::consts::LN_10;
    let mut quiet = 0;
    for _ in 0..300 {
        let v = adaptive_quad(&mut g, hi - step, hi, spec)?.value;
        parts.push(v);
        hi -= step;
        let running: f64 = parts.iter().sum();
        if v <= 1e-3 * spec.tolerance(running) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    parts.sort_by(f64::total_cmp);
    let total: f64 = parts.iter().sum();
    Ok((2.0 * PI * total).powf(1.0 / p))
}
