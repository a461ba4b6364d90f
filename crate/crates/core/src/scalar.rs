//! Scalar backends.
//!
//! Two fields are supported: exact Gaussian rationals and IEEE double
//! complex numbers. Every matrix is generic over one of them, so mixing
//! backends is a type error rather than a runtime check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, Tolerance};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// Field operations plus the few backend-specific linear algebra kernels
/// (rank and full-rank factorization) that cannot be written generically.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(re: i64, im: i64) -> Self;
    /// `re_num/den + i·im_num/den`
    fn from_ratio(re_num: i64, im_num: i64, den: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Panics on division by an exact zero.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn abs_f64(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    fn from_c64(z: Complex64) -> Self;

    /// Parse a human complex literal such as `3`, `-1/2`, `2i`, `1/2-3/4i`, `0.25+1e-3i`.
    fn parse(s: &str) -> Result<Self>;

    /// Pivot-selection test used by elimination: exact zero on the exact
    /// backend, relative smallness on the float backend.
    fn negligible(&self, scale: f64, tol: &Tolerance) -> bool;

    /// Rank with singular values at or below `rel·max(σ_max, floor)` treated
    /// as zero. The exact backend ignores both thresholds.
    fn rank_rel(a: &Matrix<Self>, rel: f64, floor: f64) -> usize;

    /// `A = F·G` with `F` of full column rank and `G` of full row rank.
    fn full_rank_factors(a: &Matrix<Self>, tol: &Tolerance) -> (Matrix<Self>, Matrix<Self>);

    fn mul_acc(&mut self, a: &Self, b: &Self) {
        *self = self.add(&a.mul(b));
    }

    fn matmul(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        a.matmul_generic(b)
    }
}

/// Exact complex number `re + i·im` with arbitrary-precision rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

pub type Q = GaussianRational;

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn format_part(r: &BigRational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    /// Canonical `p/q` strings for the real and imaginary parts.
    pub fn to_pair_strings(&self) -> (String, String) {
        (Self::format_part(&self.re), Self::format_part(&self.im))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = Self::format_part(&self.re);
        if self.im.is_zero() {
            return f.write_str(&re);
        }
        let im_abs = Self::format_part(&self.im.abs());
        let unit = if im_abs == "1" { String::new() } else { im_abs };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{sign}{unit}i")
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{re}{sign}{unit}i")
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Split a complex literal into real and imaginary coefficient text.
fn split_complex(s: &str) -> Result<(Option<String>, Option<String>)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok((Some(t), None));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&p| {
        (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E')
    });
    let (re, im) = match split {
        Some(p) => (Some(body[..p].to_string()), &body[p..]),
        None => (None, body),
    };
    let im = match im {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').to_string(),
    };
    let re = re.map(|r| r.trim_start_matches('+').to_string());
    Ok((re, Some(im)))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp) = match digits.find(['e', 'E']) {
        Some(p) => (&digits[..p], digits[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (digits, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(numer);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

fn parse_f64(s: &str) -> Result<f64> {
    if let Some((n, d)) = s.split_once('/') {
        return Ok(parse_f64(n)? / parse_f64(d)?);
    }
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid number `{s}`")))
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for GaussianRational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        GaussianRational::real(BigRational::zero())
    }

    fn one() -> Self {
        GaussianRational::real(BigRational::one())
    }

    fn from_i64(re: i64, im: i64) -> Self {
        GaussianRational::new(rat(re, 1), rat(im, 1))
    }

    fn from_ratio(re_num: i64, im_num: i64, den: i64) -> Self {
        GaussianRational::new(rat(re_num, den), rat(im_num, den))
    }

    fn add(&self, rhs: &Self) -> Self {
        GaussianRational::new(radd(&self.re, &rhs.re), radd(&self.im, &rhs.im))
    }

    fn sub(&self, rhs: &Self) -> Self {
        GaussianRational::new(rsub(&self.re, &rhs.re), rsub(&self.im, &rhs.im))
    }

    fn mul(&self, rhs: &Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::real(rmul(&self.re, &rhs.re));
        }
        GaussianRational::new(
            rsub(&rmul(&self.re, &rhs.re), &rmul(&self.im, &rhs.im)),
            radd(&rmul(&self.re, &rhs.im), &rmul(&self.im, &rhs.re)),
        )
    }

    fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "exact division by zero");
        if rhs.im.is_zero() {
            return GaussianRational::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let d = rhs.norm_sqr();
        let num = self.mul(&rhs.conj());
        GaussianRational::new(num.re / &d, num.im / d)
    }

    fn neg(&self) -> Self {
        GaussianRational::new(-&self.re, -&self.im)
    }

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn from_c64(z: Complex64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        GaussianRational::new(conv(z.re), conv(z.im))
    }

    fn parse(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re = re.map(|r| parse_rational(&r)).transpose()?.unwrap_or_else(BigRational::zero);
        let im = im.map(|r| parse_rational(&r)).transpose()?.unwrap_or_else(BigRational::zero);
        Ok(GaussianRational::new(re, im))
    }

    fn negligible(&self, _scale: f64, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn rank_rel(a: &Matrix<Self>, _rel: f64, _floor: f64) -> usize {
        exact_rank(a)
    }

    fn full_rank_factors(a: &Matrix<Self>, tol: &Tolerance) -> (Matrix<Self>, Matrix<Self>) {
        let (r, pivots) = matcore::rref(a, tol);
        let f = a.select_cols(&pivots);
        let g = r.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
        (f, g)
    }

    fn mul_acc(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let p = a.mul(b);
        self.re = radd(&self.re, &p.re);
        self.im = radd(&self.im, &p.im);
    }

    fn matmul(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        exact_matmul(a, b)
    }
}

// Integer and zero shortcuts around `BigRational`'s normalizing operators.

fn radd(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_zero() {
        b.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn rsub(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        BigRational::zero()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

fn lcm_of<'a>(xs: impl Iterator<Item = &'a Q>) -> BigInt {
    xs.fold(BigInt::one(), |mut l, x| {
        for d in [x.re.denom(), x.im.denom()] {
            if !d.is_one() {
                l = l.lcm(d);
            }
        }
        l
    })
}

/// Gaussian integer parts of `x·d`, where `d` is a multiple of both denominators.
fn scaled(x: &Q, d: &BigInt) -> (BigInt, BigInt) {
    let part = |r: &BigRational| {
        if r.is_zero() {
            BigInt::zero()
        } else if d.is_one() {
            r.numer().clone()
        } else {
            r.numer() * (d / r.denom())
        }
    };
    (part(&x.re), part(&x.im))
}

fn ratio(num: BigInt, den: &BigInt) -> BigRational {
    if den.is_one() {
        BigRational::from_integer(num)
    } else {
        BigRational::new(num, den.clone())
    }
}

type GaussInt = (BigInt, BigInt);

fn gmul(x: &GaussInt, y: &GaussInt) -> GaussInt {
    (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

/// `x / y` for a divisor known to divide exactly.
fn gdiv_exact(x: &GaussInt, y: &GaussInt) -> GaussInt {
    if y.1.is_zero() {
        return (&x.0 / &y.0, &x.1 / &y.0);
    }
    let n = &y.0 * &y.0 + &y.1 * &y.1;
    let p = gmul(x, &(y.0.clone(), -&y.1));
    (p.0 / &n, p.1 / n)
}

/// Rank by fraction-free (Bareiss) elimination on rows scaled to Gaussian
/// integers; every division is exact, so no gcds are taken.
fn exact_rank(a: &Matrix<Q>) -> usize {
    let (m, n) = a.shape();
    let mut rows: Vec<Vec<GaussInt>> = (0..m)
        .map(|i| {
            let d = lcm_of(a.row(i).iter());
            a.row(i).iter().map(|x| scaled(x, &d)).collect()
        })
        .collect();
    let zero = |x: &GaussInt| x.0.is_zero() && x.1.is_zero();
    let mut prev: GaussInt = (BigInt::one(), BigInt::zero());
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot = &top[r];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..n {
                let t = gmul(&pivot[c], &row[j]);
                let u = if zero(&f) || zero(&pivot[j]) {
                    t
                } else {
                    let v = gmul(&f, &pivot[j]);
                    (t.0 - v.0, t.1 - v.1)
                };
                row[j] = gdiv_exact(&u, &prev);
            }
            row[c] = (BigInt::zero(), BigInt::zero());
        }
        prev = top[r][c].clone();
        r += 1;
    }
    r
}

/// `A·B` over Gaussian integers: row `i` of `A` and column `j` of `B` are
/// scaled by the lcm of their denominators, so each entry is reduced once.
/// Dot products run in `i128` when the scaled entries are small enough.
fn exact_matmul(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let row_den: Vec<BigInt> = (0..m).map(|i| lcm_of(a.row(i).iter())).collect();
    let col_den: Vec<BigInt> = (0..n).map(|j| lcm_of((0..k).map(|p| &b[(p, j)]))).collect();
    let ai: Vec<(BigInt, BigInt)> = a.data().iter().enumerate().map(|(t, x)| scaled(x, &row_den[t / k.max(1)])).collect();
    let bi: Vec<(BigInt, BigInt)> = b.data().iter().enumerate().map(|(t, x)| scaled(x, &col_den[t % n.max(1)])).collect();
    let bits = |v: &[(BigInt, BigInt)]| v.iter().map(|(r, i)| r.bits().max(i.bits())).max().unwrap_or(0);
    let headroom = u64::from(usize::BITS - k.leading_zeros()) + 2;
    let sums: Vec<(BigInt, BigInt)> = if bits(&ai) + bits(&bi) + headroom <= 126 {
        let small = |v: &[(BigInt, BigInt)]| -> Vec<(i128, i128)> {
            v.iter().map(|(r, i)| (r.to_i128().unwrap_or(0), i.to_i128().unwrap_or(0))).collect()
        };
        let (ai, bi) = (small(&ai), small(&bi));
        let mut out = vec![(0i128, 0i128); m * n];
        for i in 0..m {
            for p in 0..k {
                let (ar, aim) = ai[i * k + p];
                if ar == 0 && aim == 0 {
                    continue;
                }
                for j in 0..n {
                    let (br, bim) = bi[p * n + j];
                    let o = &mut out[i * n + j];
                    o.0 += ar * br - aim * bim;
                    o.1 += ar * bim + aim * br;
                }
            }
        }
        out.into_iter().map(|(r, i)| (BigInt::from(r), BigInt::from(i))).collect()
    } else {
        let mut out = vec![(BigInt::zero(), BigInt::zero()); m * n];
        for i in 0..m {
            for p in 0..k {
                let (ar, aim) = &ai[i * k + p];
                if ar.is_zero() && aim.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (br, bim) = &bi[p * n + j];
                    let o = &mut out[i * n + j];
                    o.0 += ar * br - aim * bim;
                    o.1 += ar * bim + aim * br;
                }
            }
        }
        out
    };
    let data = sums
        .into_iter()
        .enumerate()
        .map(|(t, (re, im))| {
            let den = &row_den[t / n] * &col_den[t % n];
            GaussianRational::new(ratio(re, &den), ratio(im, &den))
        })
        .collect();
    Matrix::new(m, n, data).expect("product has consistent shape")
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_i64(re: i64, im: i64) -> Self {
        Complex64::new(re as f64, im as f64)
    }

    fn from_ratio(re_num: i64, im_num: i64, den: i64) -> Self {
        Complex64::new(re_num as f64 / den as f64, im_num as f64 / den as f64)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn parse(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re = re.map(|r| parse_f64(&r)).transpose()?.unwrap_or(0.0);
        let im = im.map(|r| parse_f64(&r)).transpose()?.unwrap_or(0.0);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Complex64::new(re, im))
    }

    fn negligible(&self, scale: f64, tol: &Tolerance) -> bool {
        self.norm() <= tol.structural * scale
    }

    fn rank_rel(a: &Matrix<Self>, rel: f64, floor: f64) -> usize {
        crate::float_la::rank_rel(a, rel, floor)
    }

    fn full_rank_factors(a: &Matrix<Self>, tol: &Tolerance) -> (Matrix<Self>, Matrix<Self>) {
        crate::float_la::full_rank_factors(a, tol)
    }

    fn mul_acc(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}
