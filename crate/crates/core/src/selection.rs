//! Choosing two of `{2, 3, 5}` that never carry a rational into `Z/N`.
//!
//! Write `r = p/q` in lowest terms. Some integer `K` has `K r` in `Z/N`
//! exactly when `lcm(q, N)/N` divides `K`. Factor that quotient as
//! `2^k2 3^k3 5^k5 Q` with `gcd(Q, 30) = 1`. Any prime that actually occurs
//! can be avoided by multiplying only with the other two generators:
//!
//! | witness          | pair    |
//! |------------------|---------|
//! | `k2 > 0`         | `(3,5)` |
//! | `k3 > 0`         | `(2,5)` |
//! | `k5 > 0`         | `(2,3)` |
//! | only `Q > 1`     | `(2,3)` |
//!
//! The last row is a free choice; `(2,3)` keeps the output deterministic.
//! When every exponent is zero and `Q = 1`, `q` divides `N` and `r` was in
//! `Z/N` to begin with.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};

/// Factorization `lcm(q, N)/N = 2^k2 3^k3 5^k5 Q` with `gcd(Q, 30) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub k2: u32,
    pub k3: u32,
    pub k5: u32,
    pub cofactor: BigUint,
}

impl Witness {
    pub fn value(&self) -> BigUint {
        BigUint::from(2u32).pow(self.k2)
            * BigUint::from(3u32).pow(self.k3)
            * BigUint::from(5u32).pow(self.k5)
            * &self.cofactor
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "2^{}·3^{}·5^{}·{}",
            self.k2, self.k3, self.k5, self.cofactor
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionResult {
    pub a: u64,
    pub b: u64,
    pub witness: Witness,
}

impl fmt::Display for SelectionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair={},{} witness={}", self.a, self.b, self.witness)
    }
}

fn strip(n: &mut BigUint, p: u32) -> u32 {
    let mut k = 0;
    loop {
        let (quot, rem) = n.div_rem(&BigUint::from(p));
        if !rem.is_zero() {
            return k;
        }
        *n = quot;
        k += 1;
    }
}

/// Picks `(a, b)` from `{2, 3, 5}` with `a^m b^n r` outside `Z/N` for all `m, n >= 0`.
pub fn select_pair(r: &Rat, n: &BigUint) -> Result<SelectionResult> {
    if n.is_zero() {
        return Err(Error::precondition("N must be positive"));
    }
    let q = r.denom();
    let mut rest = q.lcm(n) / n;
    let k2 = strip(&mut rest, 2);
    let k3 = strip(&mut rest, 3);
    let k5 = strip(&mut rest, 5);
    let witness = Witness {
        k2,
        k3,
        k5,
        cofactor: rest,
    };
    let (a, b) = if k2 > 0 {
        (3, 5)
    } else if k3 > 0 {
        (2, 5)
    } else if k5 > 0 || !witness.cofactor.is_one() {
        (2, 3)
    } else {
        return Err(Error::precondition(format!("r ∈ ℤ/N (r = {r}, N = {n})")));
    };
    Ok(SelectionResult { a, b, witness })
}

/// [`select_pair`] with `N = 1`: `a^m b^n r` is never an integer.
pub fn select_pair_nonvanishing(r: &Rat) -> Result<SelectionResult> {
    if r.is_zero() {
        return Err(Error::precondition("r must be nonzero"));
    }
    select_pair(r, &BigUint::one())
}

/// Checks in exact arithmetic that `a^m b^n r` is outside `Z/N` for all
/// `0 <= m, n <= bound`. Independent of [`select_pair`].
pub fn verify_pair(r: &Rat, n: &BigUint, a: u64, b: u64, bound: u32) -> bool {
    let a = BigUint::from(a);
    let b = BigUint::from(b);
    let mut row = r.clone();
    for _ in 0..=bound {
        let mut v = row.clone();
        for _ in 0..=bound {
            if v.mul_int(n).is_zero() {
                return false;
            }
            v = v.mul_int(&b);
        }
        row = row.mul_int(&a);
    }
    true
}
