//! Complex fields on a cell-centered periodic grid, the discrete multiplier
//! `R^k`, polar principal-value convolution, and grid norm functionals.
//!
//! A field with `n` samples per axis on `[-L/2, L/2)^2` stores sample
//! `(i, j)` at `samples[i * n + j]`, located at `x_i + i y_j` with
//! `x_i = -L/2 + (i + 1/2) L / n`. The first index runs along the real axis.
//! Frequencies follow the same layout: mode `(a, b)` has
//! `zeta = (fa + i fb) / L` where `fa` is the signed integer frequency.

use crate::error::{domain, Error, Result};
use crate::quadrature::{split_quad, QuadSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

/// Samples of a complex function on the centered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    n: usize,
    side: f64,
    samples: Vec<Complex64>,
}

fn check_grid(n: usize, side: f64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::SizeMismatch(format!("n = {n} must be a power of two >= 8")));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(domain("Field", format!("side = {side} must be positive")));
    }
    Ok(())
}

impl Field {
    pub fn new(n: usize, side: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_grid(n, side)?;
        if samples.len() != n * n {
            return Err(Error::SizeMismatch(format!("{} samples for n = {n}", samples.len())));
        }
        Ok(Self { n, side, samples })
    }

    pub fn zeros(n: usize, side: f64) -> Result<Self> {
        Self::new(n, side, vec![Complex64::new(0.0, 0.0); n * n])
    }

    /// Samples a total function at every cell center.
    pub fn from_fn<F>(n: usize, side: f64, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        sample_field(|z| Ok(f(z)), n, side)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Coordinate of cell center `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.side + (i as f64 + 0.5) * self.spacing()
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.coord(i), self.coord(j))
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.samples[i * self.n + j]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Field {
        Field { n: self.n, side: self.side, samples: self.samples.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    fn same_grid(&self, other: &Field) -> Result<()> {
        if self.n != other.n || self.side != other.side {
            return Err(Error::SizeMismatch(format!("grids n = {} / {} differ", self.n, other.n)));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Field { n: self.n, side: self.side, samples })
    }

    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / (self.n * self.n) as f64
    }

    /// Integral approximated by the midpoint rule.
    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.cell_area()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Copy of the field rotated by a quarter turn: `g(z) = f(-i z)`.
    pub fn rotate90(&self) -> Field {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.samples[j * n + (n - 1 - i)];
            }
        }
        Field { n, side: self.side, samples: out }
    }

    /// Replaces samples within `radius_cells` cells of the origin by averages of
    /// `f` over `sub x sub` points of the cell, for singular inputs.
    pub fn cell_average_near_origin<F>(&mut self, f: F, radius_cells: f64, sub: usize) -> Result<()>
    where
        F: Fn(Complex64) -> Result<Complex64> + Sync,
    {
        let h = self.spacing();
        let n = self.n;
        let lim = radius_cells * h;
        let offsets: Vec<f64> = (0..sub).map(|a| ((a as f64 + 0.5) / sub as f64 - 0.5) * h).collect();
        let targets: Vec<usize> = (0..n * n)
            .filter(|&idx| self.point(idx / n, idx % n).norm() < lim)
            .collect();
        let vals: Vec<Result<Complex64>> = targets
            .par_iter()
            .map(|&idx| {
                let c = self.point(idx / n, idx % n);
                let mut acc = Complex64::new(0.0, 0.0);
                for &dx in &offsets {
                    for &dy in &offsets {
                        acc += f(c + Complex64::new(dx, dy))?;
                    }
                }
                Ok(acc / (sub * sub) as f64)
            })
            .collect();
        for (idx, v) in targets.into_iter().zip(vals) {
            self.samples[idx] = v?;
        }
        Ok(())
    }
}

/// Samples `f` at every cell center; the origin is never a sample point.
pub fn sample_field<F>(f: F, n: usize, side: f64) -> Result<Field>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    check_grid(n, side)?;
    let h = side / n as f64;
    let samples: Result<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            f(Complex64::new(-0.5 * side + (i as f64 + 0.5) * h, -0.5 * side + (j as f64 + 0.5) * h))
        })
        .collect();
    Field::new(n, side, samples?)
}

/// Forward and inverse transforms for `n x n` fields.
#[derive(Clone)]
pub struct SpectralPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.n).finish()
    }
}

const ROW_BLOCK: usize = 16;

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    out[j * n + i] = data[i * n + j];
                }
            }
        }
    }
    out
}

impl SpectralPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_grid(n, 1.0)?;
        let mut planner = FftPlanner::new();
        Ok(Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn rows(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n * ROW_BLOCK).for_each(|chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    }

    fn transform_2d(&self, data: &mut Vec<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        self.rows(data, fft);
        let mut t = transpose(data, self.n);
        self.rows(&mut t, fft);
        *data = transpose(&t, self.n);
    }

    fn check(&self, f: &Field) -> Result<()> {
        if f.n != self.n {
            return Err(Error::SizeMismatch(format!("plan n = {}, field n = {}", self.n, f.n)));
        }
        Ok(())
    }

    /// Unnormalized forward DFT of the samples.
    pub fn forward(&self, field: &Field) -> Result<Vec<Complex64>> {
        self.check(field)?;
        let mut data = field.samples.clone();
        self.transform_2d(&mut data, &self.forward);
        Ok(data)
    }

    /// Inverse DFT, normalized so that `inverse(forward(f)) = f`.
    pub fn inverse(&self, spectrum: Vec<Complex64>, side: f64) -> Result<Field> {
        if spectrum.len() != self.n * self.n {
            return Err(Error::SizeMismatch(format!("spectrum length {}", spectrum.len())));
        }
        let mut data = spectrum;
        self.transform_2d(&mut data, &self.inverse);
        let s = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
        Field::new(self.n, side, data)
    }

    /// Multiplies every mode by `symbol(a, b)` (signed integer frequencies).
    pub fn apply_symbol<S>(&self, field: &Field, symbol: S) -> Result<Field>
    where
        S: Fn(i64, i64) -> Complex64 + Sync,
    {
        let n = self.n;
        let mut spec = self.forward(field)?;
        spec.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
            let fa = signed_freq(a, n);
            for (b, v) in row.iter_mut().enumerate() {
                *v *= symbol(fa, signed_freq(b, n));
            }
        });
        self.inverse(spec, field.side)
    }
}

fn signed_freq(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Discrete symbol of `R^k` at integer frequency `(a, b)`: `(conj(zeta)/|zeta|)^k`,
/// with the zero mode and the Nyquist row and column mapped to 0.
pub fn riesz_symbol(k: i64, a: i64, b: i64, n: usize) -> Complex64 {
    let nyq = (n / 2) as i64;
    if (a == 0 && b == 0) || a == -nyq || b == -nyq {
        return Complex64::new(0.0, 0.0);
    }
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (x, y) = (a as f64, b as f64);
    let u = Complex64::new(x, -y) / x.hypot(y);
    let v = u.powi(k.unsigned_abs() as i32);
    if k > 0 {
        v
    } else {
        v.conj()
    }
}

/// `R^k` as a Fourier multiplier on the periodic grid.
pub fn apply_multiplier(field: &Field, k: i64, plan: &SpectralPlan) -> Result<Field> {
    let n = field.n;
    plan.apply_symbol(field, |a, b| riesz_symbol(k, a, b, n))
}

/// Separable raised-cosine low-pass: factor 1 for `|f| <= lo * K`, 0 at the
/// Nyquist frequency `K = n/2`, cosine roll-off between.
pub fn lowpass_taper(field: &Field, lo: f64, plan: &SpectralPlan) -> Result<Field> {
    if !(0.0..1.0).contains(&lo) {
        return Err(domain("lowpass_taper", format!("lo = {lo} outside [0, 1)")));
    }
    let kmax = (field.n / 2) as f64;
    let t = move |f: i64| -> f64 {
        let x = (f as f64).abs() / kmax;
        if x <= lo {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            0.5 * (1.0 + (PI * (x - lo) / (1.0 - lo)).cos())
        }
    };
    plan.apply_symbol(field, |a, b| Complex64::new(t(a) * t(b), 0.0))
}

/// `sup |R^{-k} f - (-1)^k conj(R^k conj f)|` on the grid.
pub fn conjugation_symmetry_check(field: &Field, k: i64, plan: &SpectralPlan) -> Result<f64> {
    let lhs = apply_multiplier(field, -k, plan)?;
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let rhs = apply_multiplier(&field.conj(), k, plan)?.conj();
    Ok(lhs.samples.iter().zip(&rhs.samples).fold(0.0, |m, (a, b)| m.max((a - b * sign).norm())))
}

/// `(sum |f|^p * cell area)^{1/p}`.
pub fn lp_norm(field: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain("lp_norm", format!("p = {p} must be >= 1")));
    }
    let s: f64 = if p == 2.0 {
        field.samples.iter().map(|v| v.norm_sqr()).sum()
    } else {
        field.samples.iter().map(|v| v.norm().powf(p)).sum()
    };
    Ok((s * field.cell_area()).powf(1.0 / p))
}

/// Exact `sup_a a * |{ |f| > a }|` of the sampled step function.
pub fn weak_l1_quasinorm(field: &Field) -> f64 {
    let mut m: Vec<f64> = field.samples.iter().map(|v| v.norm()).collect();
    m.par_sort_unstable_by(|a, b| b.total_cmp(a));
    let area = field.cell_area();
    m.iter().enumerate().fold(0.0, |best, (i, &v)| best.max(v * (i + 1) as f64 * area))
}

/// Maximum over dyadic subsquares (side >= 2 cells) of the mean oscillation
/// `mean_Q |f - mean_Q f|`.
pub fn dyadic_bmo_norm(field: &Field) -> f64 {
    dyadic_bmo_levels(field).into_iter().map(|(_, v)| v).fold(0.0, f64::max)
}

/// Per-level maxima `(side in cells, max mean oscillation)` from the full grid down.
pub fn dyadic_bmo_levels(field: &Field) -> Vec<(usize, f64)> {
    let n = field.n;
    let mut out = Vec::new();
    let mut s = n;
    while s >= 2 {
        let per = n / s;
        let best = (0..per * per)
            .into_par_iter()
            .map(|q| {
                let (qi, qj) = (q / per, q % per);
                let mut mean = Complex64::new(0.0, 0.0);
                for i in qi * s..(qi + 1) * s {
                    for v in &field.samples[i * n + qj * s..i * n + (qj + 1) * s] {
                        mean += v;
                    }
                }
                mean /= (s * s) as f64;
                let mut dev = 0.0;
                for i in qi * s..(qi + 1) * s {
                    for v in &field.samples[i * n + qj * s..i * n + (qj + 1) * s] {
                        dev += (v - mean).norm();
                    }
                }
                dev / (s * s) as f64
            })
            .reduce(|| 0.0, f64::max);
        out.push((s, best));
        s /= 2;
    }
    out
}

/// Discretization choices for the polar principal-value integral.
pub struct PvOptions<'a> {
    /// Inner truncation radius; 0 gives the principal value.
    pub delta: f64,
    /// Outer radius; the integrand must vanish (or be negligible) beyond it.
    pub r_out: f64,
    /// Radius of the disc on which `f(z)` is subtracted; defaults to `r_out / 4`.
    pub inner_radius: Option<f64>,
    /// Radii where the angular integral is non-smooth.
    pub radial_breaks: Vec<f64>,
    /// Angles in `(-pi, pi)` where the integrand is non-smooth, per radius.
    pub angular_breaks: Option<&'a (dyn Fn(f64) -> Vec<f64> + Sync)>,
    pub radial_spec: QuadSpec,
    pub angular_spec: QuadSpec,
}

impl<'a> PvOptions<'a> {
    pub fn new(r_out: f64) -> Self {
        Self {
            delta: 0.0,
            r_out,
            inner_radius: None,
            radial_breaks: Vec::new(),
            angular_breaks: None,
            radial_spec: QuadSpec::with_tol(1e-10, 1e-9),
            angular_spec: QuadSpec::with_tol(1e-11, 1e-10),
        }
    }
}

/// `PV int (w/|w|)^{-k} |w|^{-2} f(z - w) dA(w)` in polar coordinates.
///
/// On the inner disc `f(z)` is subtracted from the integrand; its angular
/// integral against `e^{-ik phi}` vanishes, so the radial integrand stays
/// bounded and the limit `delta -> 0` is taken exactly.
pub fn pv_convolve_unnormalized<F>(f: F, k: i64, z: Complex64, opts: &PvOptions<'_>) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if k == 0 {
        return Err(domain("pv_convolve", "k must be nonzero"));
    }
    if !(opts.r_out > opts.delta && opts.delta >= 0.0) {
        return Err(domain("pv_convolve", "need 0 <= delta < r_out"));
    }
    let rho0 = opts.inner_radius.unwrap_or(0.25 * opts.r_out).min(opts.r_out);
    let fz = f(z);
    let kf = k as f64;
    let kabs = k.unsigned_abs() as f64;
    let mut failure: Option<Error> = None;

    let mut base_angles = vec![-PI];
    let mut j = 1.0;
    while j * PI / kabs < PI * (1.0 - 1e-14) {
        base_angles.push(j * PI / kabs);
        base_angles.push(-j * PI / kabs);
        j += 1.0;
    }
    base_angles.push(0.0);
    base_angles.push(PI);

    let mut angular = |rho: f64| -> Complex64 {
        let mut pts = base_angles.clone();
        if let Some(ab) = opts.angular_breaks {
            pts.extend(ab(rho).into_iter().filter(|a| a.is_finite() && a.abs() < PI));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let sub = if rho < rho0 { fz } else { Complex64::new(0.0, 0.0) };
        let r = split_quad(
            |phi: f64| {
                let w = Complex64::from_polar(rho, phi);
                (f(z - w) - sub) * Complex64::from_polar(1.0, -kf * phi)
            },
            &pts,
            0.0,
            &opts.angular_spec,
        );
        match r {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };

    let lo = opts.delta;
    let mut inner_pts = vec![lo];
    let mut outer_pts = Vec::new();
    let split = rho0.max(lo);
    for &b in &opts.radial_breaks {
        if b > lo && b < split {
            inner_pts.push(b);
        } else if b > split && b < opts.r_out {
            outer_pts.push(b.ln());
        }
    }
    inner_pts.push(split);
    inner_pts.sort_by(f64::total_cmp);
    inner_pts.dedup();
    outer_pts.insert(0, split.ln());
    outer_pts.push(opts.r_out.ln());
    outer_pts.sort_by(f64::total_cmp);
    outer_pts.dedup();

    let mut total = Complex64::new(0.0, 0.0);
    if split > lo {
        let r = split_quad(|rho: f64| if rho == 0.0 { Complex64::new(0.0, 0.0) } else { angular(rho) / rho }, &inner_pts, 0.0, &opts.radial_spec)?;
        total += r.value;
    }
    if opts.r_out > split {
        let r = split_quad(|u: f64| angular(u.exp()), &outer_pts, 0.0, &opts.radial_spec)?;
        total += r.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// `(R^k f)(z)` as the normalized principal-value convolution with the kernel of `R^k`.
pub fn pv_convolve_at<F>(f: F, k: i64, z: Complex64, opts: &PvOptions<'_>) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let v = pv_convolve_unnormalized(f, k, z, opts)?;
    let c = k.unsigned_abs() as f64 / (2.0 * PI);
    Ok(crate::kernels::QuarterTurns::pow_i(k.abs()).apply(v * c))
}

const MAGIC: &str = "RZFLD1";
const LAYOUT: &str = "layout=row-major-cell-centered";

/// Serializes a field in the `RZFLD1` format.
pub fn write_field<W: Write>(field: &Field, mut w: W) -> Result<()> {
    write!(w, "{MAGIC}\nn={}\nL={}\n{LAYOUT}\n\n", field.n, field.side)?;
    let mut buf = Vec::with_capacity(16 * field.samples.len());
    for v in &field.samples {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn header_line<R: BufRead>(r: &mut R) -> Result<String> {
    let mut s = String::new();
    if r.read_line(&mut s)? == 0 {
        return Err(Error::Format("truncated header".into()));
    }
    Ok(s.trim_end_matches('\n').trim_end_matches('\r').to_string())
}

/// Parses an `RZFLD1` stream.
pub fn read_field<R: Read>(r: R) -> Result<Field> {
    let mut r = BufReader::new(r);
    if header_line(&mut r)? != MAGIC {
        return Err(Error::Format("missing RZFLD1 magic".into()));
    }
    let n: usize = header_line(&mut r)?
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("bad n= line".into()))?;
    let side: f64 = header_line(&mut r)?
        .strip_prefix("L=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("bad L= line".into()))?;
    if header_line(&mut r)? != LAYOUT {
        return Err(Error::Format("unsupported layout".into()));
    }
    if !header_line(&mut r)?.is_empty() {
        return Err(Error::Format("expected blank line after header".into()));
    }
    check_grid(n, side).map_err(|e| Error::Format(e.to_string()))?;
    let mut bytes = vec![0u8; 16 * n * n];
    r.read_exact(&mut bytes).map_err(|_| Error::Format("truncated sample data".into()))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after samples".into()));
    }
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Field::new(n, side, samples)
}

pub fn save_field(field: &Field, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_field(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<Field> {
    read_field(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Random field with modes |a|, |b| < n/4 and no zero mode.
    pub(crate) fn band_limited(n: usize, side: f64, seed: u64, plan: &SpectralPlan) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = vec![c(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                let (fa, fb) = (signed_freq(a, n), signed_freq(b, n));
                if fa.abs() < (n / 4) as i64 && fb.abs() < (n / 4) as i64 && (fa, fb) != (0, 0) {
                    spec[a * n + b] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        plan.inverse(spec, side).unwrap()
    }

    #[test]
    fn grid_examples() {
        let f = Field::from_fn(16, 2.0, |_| c(1.0, 0.0)).unwrap();
        assert!(f.samples().iter().all(|&v| v == c(1.0, 0.0)));
        let g = Field::from_fn(256, 16.0, |z| c((-PI * z.norm_sqr()).exp(), 0.0)).unwrap();
        assert!((g.integral().re - 1.0).abs() < 1e-10);
        let at_origin = std::sync::atomic::AtomicBool::new(false);
        sample_field(
            |z| {
                if z.norm() == 0.0 {
                    at_origin.store(true, std::sync::atomic::Ordering::Relaxed);
                }
                Ok(c(crate::kernels::phi_eps(3.0, 0.1, z), 0.0))
            },
            64,
            4.0,
        )
        .unwrap();
        assert!(!at_origin.into_inner());
        assert!(Field::zeros(12, 1.0).is_err());
        assert!(Field::zeros(4, 1.0).is_err());
        assert!(Field::new(8, 1.0, vec![c(0.0, 0.0); 10]).is_err());
    }

    #[test]
    fn plan_round_trip() {
        let n = 64;
        let plan = SpectralPlan::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = Field::new(n, 3.0, (0..n * n).map(|_| c(rng.gen(), rng.gen())).collect()).unwrap();
        let back = plan.inverse(plan.forward(&f).unwrap(), 3.0).unwrap();
        let err = f.sub(&back).unwrap().sup_norm();
        assert!(err < 1e-13 * f.sup_norm());
        assert!(apply_multiplier(&Field::zeros(32, 1.0).unwrap(), 1, &plan).is_err());
    }

    #[test]
    fn symbol_matches_direct_dft_convention() {
        // a single plane wave e^{2 pi i (a x + b y)/L} must be multiplied by (conj(zeta)/|zeta|)^k
        let (n, side) = (32usize, 5.0);
        let plan = SpectralPlan::new(n).unwrap();
        let (a, b) = (3.0, -2.0);
        let f = Field::from_fn(n, side, |z| Complex64::from_polar(1.0, 2.0 * PI * (a * z.re + b * z.im) / side)).unwrap();
        for k in [1i64, 2, -3] {
            let out = apply_multiplier(&f, k, &plan).unwrap();
            let m = Complex64::new(a, -b) / f64::hypot(a, b);
            let m = if k > 0 { m.powi(k as i32) } else { m.conj().powi(-k as i32) };
            let want = f.scale(m);
            assert!(out.sub(&want).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn k0_removes_the_mean() {
        let n = 32;
        let plan = SpectralPlan::new(n).unwrap();
        let f = Field::from_fn(n, 4.0, |z| c((-z.norm_sqr()).exp(), 0.0)).unwrap();
        let out = apply_multiplier(&f, 0, &plan).unwrap();
        // no Nyquist content to speak of for a resolved Gaussian
        let mean = f.mean();
        let want = f.map(|v| v - mean);
        assert!(out.sub(&want).unwrap().sup_norm() < 1e-9);
    }

    #[test]
    fn isometry_on_band_limited_fields() {
        let n = 128;
        let plan = SpectralPlan::new(n).unwrap();
        let f = band_limited(n, 8.0, 1, &plan);
        let n0 = lp_norm(&f, 2.0).unwrap();
        for k in [1i64, 2, 5, -4] {
            let out = apply_multiplier(&f, k, &plan).unwrap();
            assert_relative_eq!(lp_norm(&out, 2.0).unwrap(), n0, max_relative = 1e-12);
        }
    }

    #[test]
    fn semigroup_and_conjugation() {
        let n = 64;
        let plan = SpectralPlan::new(n).unwrap();
        let f = band_limited(n, 4.0, 2, &plan);
        let a = apply_multiplier(&apply_multiplier(&f, 2, &plan).unwrap(), 3, &plan).unwrap();
        let b = apply_multiplier(&f, 5, &plan).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-11 * f.sup_norm());
        let inv = apply_multiplier(&apply_multiplier(&f, 3, &plan).unwrap(), -3, &plan).unwrap();
        assert!(inv.sub(&f).unwrap().sup_norm() < 1e-11 * f.sup_norm());
        for k in [1i64, 2, 3] {
            assert!(conjugation_symmetry_check(&f, k, &plan).unwrap() <= 1e-11 * f.sup_norm());
        }
        assert!(conjugation_symmetry_check(&f, 0, &plan).unwrap() <= 1e-14 * f.sup_norm());
        let real = f.map(|v| c(v.re, 0.0));
        let l = apply_multiplier(&real, -2, &plan).unwrap();
        let r = apply_multiplier(&real, 2, &plan).unwrap();
        for (x, y) in l.samples().iter().zip(r.samples()) {
            assert!((x.im + y.im).abs() < 1e-12 && (x.re - y.re).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_equivariance() {
        let n = 64;
        let plan = SpectralPlan::new(n).unwrap();
        let f = band_limited(n, 4.0, 3, &plan);
        for k in [1i64, 2, 3, 6] {
            let lhs = apply_multiplier(&f.rotate90(), k, &plan).unwrap();
            let rhs = apply_multiplier(&f, k, &plan).unwrap().rotate90().scale(crate::kernels::QuarterTurns::pow_i(-k).to_complex());
            assert!(lhs.sub(&rhs).unwrap().sup_norm() < 1e-12 * f.sup_norm());
        }
        let g = Field::from_fn(8, 2.0, |z| z).unwrap().rotate90();
        let want = Field::from_fn(8, 2.0, |z| -z * c(0.0, 1.0)).unwrap();
        assert!(g.sub(&want).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn norms_examples() {
        let one = Field::from_fn(64, 3.0, |_| c(1.0, 0.0)).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert_relative_eq!(lp_norm(&one, p).unwrap(), 3f64.powf(2.0 / p), max_relative = 1e-13);
        }
        let disc = Field::from_fn(1024, 4.0, |z| c(if z.norm() < 0.5 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let v = lp_norm(&disc, p).unwrap();
            assert!((v / (PI / 4.0).powf(1.0 / p) - 1.0).abs() < 0.02);
        }
        let g = Field::from_fn(256, 16.0, |z| c((-PI * z.norm_sqr()).exp(), 0.0)).unwrap();
        assert!((lp_norm(&g, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(lp_norm(&g, 0.5).is_err());
    }

    #[test]
    fn weak_norm_examples() {
        let disc = Field::from_fn(256, 4.0, |z| c(if z.norm() < 1.0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let area = disc.samples().iter().filter(|v| v.re > 0.0).count() as f64 * disc.cell_area();
        assert_relative_eq!(weak_l1_quasinorm(&disc), area, max_relative = 1e-14);
        // 2 on an area-1 block, 1 on area 3
        let n = 8;
        let side = 8.0 * 0.5;
        let mut s = vec![c(0.0, 0.0); n * n];
        for (idx, v) in s.iter_mut().enumerate() {
            if idx < 4 {
                *v = c(2.0, 0.0);
            } else if idx < 16 {
                *v = c(1.0, 0.0);
            }
        }
        let f = Field::new(n, side, s).unwrap();
        assert_relative_eq!(weak_l1_quasinorm(&f), 4.0, max_relative = 1e-15);
        assert_relative_eq!(weak_l1_quasinorm(&f.scale(c(0.0, 3.0))), 12.0, max_relative = 1e-15);
    }

    #[test]
    fn bmo_examples() {
        let one = Field::from_fn(32, 1.0, |_| c(5.0, -1.0)).unwrap();
        assert_eq!(dyadic_bmo_norm(&one), 0.0);
        let n = 8;
        let s: Vec<Complex64> = (0..n * n).map(|idx| c(if (idx / n + idx % n) % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let f = Field::new(n, 1.0, s).unwrap();
        assert_relative_eq!(dyadic_bmo_norm(&f), 1.0, max_relative = 1e-15);
        let levels = dyadic_bmo_levels(&f);
        assert_eq!(levels.first().unwrap().0, n);
        assert_eq!(levels.last().unwrap().0, 2);
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let f = Field::from_fn(8, 1.25, |z| z * z + c(1e-300, -3.5)).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert!(buf.starts_with(b"RZFLD1\nn=8\nL=1.25\nlayout=row-major-cell-centered\n\n"));
        assert_eq!(buf.len(), "RZFLD1\nn=8\nL=1.25\nlayout=row-major-cell-centered\n\n".len() + 16 * 64);
        let g = read_field(buf.as_slice()).unwrap();
        assert_eq!(f, g);
        let mut bad = buf.clone();
        bad.pop();
        assert!(matches!(read_field(bad.as_slice()), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_field(bad.as_slice()), Err(Error::Format(_))));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.rzf");
        save_field(&f, &path).unwrap();
        assert_eq!(load_field(&path).unwrap(), f);
    }

    #[test]
    fn pv_cancels_constants() {
        let opts = PvOptions::new(2.0);
        for k in [1i64, 2, 5] {
            let v = pv_convolve_unnormalized(|_| c(1.0, 0.0), k, c(0.3, 0.1), &opts).unwrap();
            assert!(v.norm() < 1e-12);
        }
        assert!(pv_convolve_at(|_| c(1.0, 0.0), 0, c(0.0, 0.0), &opts).is_err());
    }

    #[test]
    fn pv_of_radial_gaussian_matches_closed_form() {
        // R^k of the Gaussian heat kernel has a one-dimensional closed form for k = 2:
        // (R^2 K_t)(z) = -(conj z/|z|)^2 [1 - (1 + x) e^{-x}] / (pi |z|^2), x = |z|^2/4t
        let t = 0.05;
        let f = |w: Complex64| c(crate::kernels::heat_kernel(t, w).unwrap(), 0.0);
        let z = c(0.3, 0.2);
        let mut opts = PvOptions::new(3.0);
        opts.inner_radius = Some(0.1);
        let got = pv_convolve_at(f, 2, z, &opts).unwrap();
        let rho = z.norm();
        let x = rho * rho / (4.0 * t);
        let u = (z.conj() / rho).powi(2);
        let want = -u * (1.0 - (1.0 + x) * (-x).exp()) / (PI * rho * rho);
        assert!((got - want).norm() < 1e-8 * want.norm(), "{got} vs {want}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn parseval_for_every_power(k in -20i64..20, seed in 0u64..1000) {
            let n = 32;
            let plan = SpectralPlan::new(n).unwrap();
            let f = band_limited(n, 2.0, seed, &plan);
            let out = apply_multiplier(&f, k, &plan).unwrap();
            let a = lp_norm(&out, 2.0).unwrap();
            let b = lp_norm(&f, 2.0).unwrap();
            prop_assert!((a / b - 1.0).abs() < 1e-12);
        }

        #[test]
        fn weak_norm_is_homogeneous(seed in 0u64..1000, s in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Field::new(8, 1.0, (0..64).map(|_| c(rng.gen(), rng.gen())).collect()).unwrap();
            let a = weak_l1_quasinorm(&f.scale(c(s, 0.0)));
            prop_assert!((a / weak_l1_quasinorm(&f) - s).abs() < 1e-12 * s);
        }

        #[test]
        fn bmo_levels_nested(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Field::new(16, 1.0, (0..256).map(|_| c(rng.gen(), 0.0)).collect()).unwrap();
            let levels = dyadic_bmo_levels(&f);
            let mut run = 0.0f64;
            for (_, v) in levels {
                let next = run.max(v);
                prop_assert!(next >= run);
                run = next;
            }
            prop_assert_eq!(run, dyadic_bmo_norm(&f));
        }
    }
}
