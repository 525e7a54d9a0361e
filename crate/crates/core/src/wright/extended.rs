//! Extended-precision summation of `sum n!/Gamma(delta n + 1) z^n`.
//!
//! Used when the terms of the Wright series cancel by more than double precision
//! can resolve. Coefficients come from an extended-precision Stirling series
//! for `ln Gamma`, with Bernoulli numbers generated exactly from tangent numbers.

use std::sync::OnceLock;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_BERNOULLI_INDEX: usize = 160;

/// Exact `B_{2k}` as `(numerator, denominator)` for `k = 1..=MAX_BERNOULLI_INDEX`.
fn bernoulli_table() -> &'static [(BigInt, BigInt)] {
    static TABLE: OnceLock<Vec<(BigInt, BigInt)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = MAX_BERNOULLI_INDEX;
        // tangent numbers T_1..T_n (Brent-Harvey in-place recurrence)
        let mut t = vec![BigInt::zero(); n + 1];
        t[1] = BigInt::one();
        for k in 2..=n {
            t[k] = &t[k - 1] * BigInt::from(k - 1);
        }
        for k in 2..=n {
            for j in k..=n {
                t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
            }
        }
        (1..=n)
            .map(|k| {
                // B_{2k} = (-1)^{k-1} 2k T_k / (2^{2k} (2^{2k} - 1))
                let mut num = &t[k] * BigInt::from(2 * k);
                if k % 2 == 0 {
                    num = -num;
                }
                let four_k = BigInt::one() << (2 * k);
                let den = &four_k * (&four_k - BigInt::one());
                let g = gcd(&num, &den);
                (num / &g, den / &g)
            })
            .collect()
    })
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.abs(), b.abs());
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

/// `B_{2k}` as exact numerator and denominator.
pub fn bernoulli_even(k: usize) -> Option<(BigInt, BigInt)> {
    if k == 0 || k > MAX_BERNOULLI_INDEX {
        return None;
    }
    Some(bernoulli_table()[k - 1].clone())
}

// ln|B_{2k}| ~ ln 2 + ln((2k)!) - 2k ln(2 pi)
fn ln_abs_bernoulli_even(k: usize) -> f64 {
    let m = 2 * k;
    let ln_fact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
    std::f64::consts::LN_2 + ln_fact - m as f64 * (2.0 * std::f64::consts::PI).ln()
}

/// Working state for one precision.
pub struct Extended {
    p: usize,
    cc: Consts,
    stirling: Vec<BigFloat>,
    shift_to: f64,
    half_ln_two_pi: BigFloat,
}

impl Extended {
    /// Context with `bits` of working precision (rounded up to whole words).
    pub fn new(bits: usize) -> Self {
        let p = bits.max(128).div_ceil(64) * 64;
        let mut cc = Consts::new().expect("constant cache");
        // choose the Stirling length K and shift point minimising K + shift
        let target = (p as f64 + 16.0) * std::f64::consts::LN_2;
        let (mut best_k, mut best_x, mut best_cost) = (10, f64::INFINITY, f64::INFINITY);
        for k in (10..MAX_BERNOULLI_INDEX).step_by(5) {
            let j = k + 1;
            let ln_x = (ln_abs_bernoulli_even(j) - ((2 * j) as f64 * (2 * j - 1) as f64).ln() + target)
                / (2 * j - 1) as f64;
            let x = ln_x.exp().max(8.0);
            if (k as f64 + x) < best_cost {
                best_cost = k as f64 + x;
                best_k = k;
                best_x = x;
            }
        }
        let table = bernoulli_table();
        let stirling = (1..=best_k)
            .map(|k| {
                let (num, den) = &table[k - 1];
                let num = parse_int(num, p, &mut cc);
                let den = parse_int(den, p, &mut cc);
                let scale = BigFloat::from_f64(((2 * k) * (2 * k - 1)) as f64, p);
                num.div(&den.mul(&scale, p, RM), p, RM)
            })
            .collect();
        let two_pi = cc.pi(p, RM).mul(&BigFloat::from_f64(2.0, p), p, RM);
        let half_ln_two_pi = two_pi.ln(p, RM, &mut cc).div(&BigFloat::from_f64(2.0, p), p, RM);
        Extended { p, cc, stirling, shift_to: best_x.ceil(), half_ln_two_pi }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    /// `ln Gamma(x)` for `x > 0` given exactly as a double.
    pub fn ln_gamma(&mut self, x: f64) -> BigFloat {
        let x = self.num(x);
        self.ln_gamma_big(&x)
    }

    /// Sum of the terms `n < terms` of `sum n!/Gamma(delta n + 1) z^n`; with
    /// `harmonic` the `n = 0` term is dropped and term `n` is divided by `n`.
    pub fn wright_sum(&mut self, delta: f64, z: Complex64, terms: usize, harmonic: bool) -> Complex64 {
        let p = self.p;
        let (zr, zi) = (self.num(z.re), self.num(z.im));
        let big_delta = self.num(delta);
        let one = self.num(1.0);
        let (mut pr, mut pi) = (self.num(1.0), self.num(0.0));
        let (mut sr, mut si) = if harmonic { (self.num(0.0), self.num(0.0)) } else { (self.num(1.0), self.num(0.0)) };
        let mut ln_fact = self.num(0.0);
        for n in 1..terms {
            let big_n = self.num(n as f64);
            ln_fact = ln_fact.add(&big_n.ln(p, RM, &mut self.cc), p, RM);
            let arg = big_delta.mul(&big_n, p, RM).add(&one, p, RM);
            let lg = self.ln_gamma_big(&arg);
            let mut coeff = ln_fact.sub(&lg, p, RM).exp(p, RM, &mut self.cc);
            if harmonic {
                coeff = coeff.div(&big_n, p, RM);
            }
            let nr = pr.mul(&zr, p, RM).sub(&pi.mul(&zi, p, RM), p, RM);
            let ni = pr.mul(&zi, p, RM).add(&pi.mul(&zr, p, RM), p, RM);
            pr = nr;
            pi = ni;
            sr = sr.add(&coeff.mul(&pr, p, RM), p, RM);
            si = si.add(&coeff.mul(&pi, p, RM), p, RM);
        }
        Complex64::new(to_f64(&sr), to_f64(&si))
    }

    /// `ln Gamma(x)` for an extended `x > 0`: upward shift, then the Stirling series.
    pub fn ln_gamma_big(&mut self, x: &BigFloat) -> BigFloat {
        let p = self.p;
        let approx = to_f64(x);
        let shift = if approx < self.shift_to { (self.shift_to - approx).ceil() as usize } else { 0 };
        let mut product = self.num(1.0);
        for i in 0..shift {
            product = product.mul(&x.add(&self.num(i as f64), p, RM), p, RM);
        }
        let y = x.add(&self.num(shift as f64), p, RM);
        let ln_y = y.ln(p, RM, &mut self.cc);
        let mut acc = y
            .sub(&self.num(0.5), p, RM)
            .mul(&ln_y, p, RM)
            .sub(&y, p, RM)
            .add(&self.half_ln_two_pi, p, RM);
        let inv = self.num(1.0).div(&y, p, RM);
        let inv2 = inv.mul(&inv, p, RM);
        let mut power = inv;
        for c in &self.stirling {
            acc = acc.add(&c.mul(&power, p, RM), p, RM);
            power = power.mul(&inv2, p, RM);
        }
        if shift > 0 {
            acc = acc.sub(&product.ln(p, RM, &mut self.cc), p, RM);
        }
        acc
    }
}

fn parse_int(v: &BigInt, p: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::parse(&v.to_string(), Radix::Dec, p, RM, cc)
}

/// Nearest double to an extended value.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    format!("{x}").parse().unwrap_or(f64::NAN)
}
