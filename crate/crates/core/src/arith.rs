//! Small number-theoretic helpers shared by the Farey and statistics modules.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Smallest-prime-factor sieve over `0..=limit`.
#[derive(Clone, Debug)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let p = i as u32;
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = p;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    pub fn is_prime(&self, n: u32) -> bool {
        n >= 2 && self.spf[n as usize] == n
    }

    /// Distinct prime divisors of `n` in increasing order.
    pub fn prime_divisors(&self, mut n: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize];
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    pub fn totient(&self, n: u32) -> u64 {
        if n == 0 {
            return 0;
        }
        self.prime_divisors(n)
            .into_iter()
            .fold(n as u64, |acc, p| acc / p as u64 * (p as u64 - 1))
    }

    /// `phi(0..=limit)` in one pass.
    pub fn totients(&self) -> Vec<u64> {
        (0..self.spf.len() as u32).map(|n| self.totient(n)).collect()
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of `a` modulo `m` (`m >= 2`, `gcd(a, m) = 1`), in `1..m`.
pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn mod_inverse_big(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m).to_biguint()
}

/// Exact `sum_i 1/d_i` for small positive denominators, accumulated over a
/// single common denominator so the cost stays linear in the number of terms.
pub fn reciprocal_sum<I: IntoIterator<Item = u64>>(denominators: I) -> BigRational {
    weighted_reciprocal_sum(denominators.into_iter().map(|d| (d, 1)))
}

/// Exact `sum_i w_i / d_i` over pairs `(d_i, w_i)`.
pub fn weighted_reciprocal_sum<I: IntoIterator<Item = (u64, u64)>>(terms: I) -> BigRational {
    let mut terms: Vec<(u64, u64)> = terms.into_iter().filter(|&(_, w)| w != 0).collect();
    if terms.is_empty() {
        return BigRational::zero();
    }
    terms.sort_unstable();
    let mut merged: Vec<(u64, BigUint)> = Vec::new();
    for (d, w) in terms {
        assert!(d > 0, "zero denominator");
        match merged.last_mut() {
            Some((last, acc)) if *last == d => *acc += w,
            _ => merged.push((d, BigUint::from(w))),
        }
    }
    // lcm from maximal prime powers; avoids big gcds on long inputs
    let mut powers: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for &(d, _) in &merged {
        let mut n = d;
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                let mut pk = 1u64;
                while n % p == 0 {
                    n /= p;
                    pk *= p;
                }
                let e = powers.entry(p).or_insert(1);
                *e = (*e).max(pk);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if n > 1 {
            powers.entry(n).or_insert(n);
        }
    }
    let mut factors: Vec<u64> = powers.into_values().collect();
    factors.sort_unstable();
    let common = product_tree(&factors);
    let mut numer = BigUint::zero();
    for (d, w) in merged {
        numer += (&common / d) * w;
    }
    BigRational::new(BigInt::from(numer), BigInt::from(common))
}

fn product_tree(xs: &[u64]) -> BigUint {
    match xs.len() {
        0 => BigUint::one(),
        1 => BigUint::from(xs[0]),
        n => product_tree(&xs[..n / 2]) * product_tree(&xs[n / 2..]),
    }
}

/// Natural log of a positive big integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Euler's constant as a fixed-point integer scaled by `10^digits`, via the
/// Brent–McMillan series with `n = digits` (error below `10^-digits`).
pub fn euler_gamma_scaled(digits: u32) -> BigInt {
    let guard = 10;
    let scale = BigInt::from(10u32).pow(digits + guard);
    let n = u64::from(digits.max(10));
    let ln_n = ln_scaled(n, &scale);
    let n2 = BigInt::from(n * n);
    let mut b = scale.clone();
    let mut a = -ln_n;
    let mut sum_a = a.clone();
    let mut sum_b = b.clone();
    let mut k = 1u64;
    loop {
        let kk = BigInt::from(k);
        b = &b * &n2 / (&kk * &kk);
        a = (&a * &n2 / &kk + &b) / &kk;
        sum_a += &a;
        sum_b += &b;
        if b.is_zero() && a.is_zero() {
            break;
        }
        k += 1;
    }
    let gamma = &sum_a * &scale / &sum_b;
    gamma / BigInt::from(10u32).pow(guard)
}

/// `ln(n) * scale` for `n >= 1` using `atanh` series at small rational
/// arguments.
fn ln_scaled(n: u64, scale: &BigInt) -> BigInt {
    // ln n = 2 atanh((n-1)/(n+1)) converges slowly for large n, so peel off
    // powers of two first: n = 2^e * r with r in [1, 2).
    let e = 63 - n.leading_zeros() as u64;
    let ln2 = atanh_scaled(1, 3, scale) * 2;
    // r = n / 2^e; ln r = 2 atanh((n - 2^e) / (n + 2^e))
    let pow = 1u64 << e;
    let ln_r = atanh_scaled(n - pow, n + pow, scale) * 2;
    ln2 * BigInt::from(e) + ln_r
}

/// `atanh(p/q) * scale` for `0 <= p < q`.
fn atanh_scaled(p: u64, q: u64, scale: &BigInt) -> BigInt {
    if p == 0 {
        return BigInt::zero();
    }
    let p = BigInt::from(p);
    let q = BigInt::from(q);
    let p2 = &p * &p;
    let q2 = &q * &q;
    let mut power = scale * &p / &q;
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * j + 1);
        power = power * &p2 / &q2;
        j += 1;
    }
    sum
}

/// Euler's constant rounded to `f64`, derived from the 40-digit series value.
pub fn euler_gamma() -> f64 {
    let scaled = euler_gamma_scaled(40);
    let r = BigRational::new(scaled, BigInt::from(10u32).pow(40));
    r.to_f64().unwrap_or(f64::NAN)
}
