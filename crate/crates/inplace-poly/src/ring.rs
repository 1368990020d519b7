//! Arithmetic in Z/qZ for a prime q < 2^32.
//!
//! Elements are plain `u64` values in `[0, q)`; the [`Field`] context does the
//! arithmetic. Keeping q below 2^32 lets every product fit in a `u64`.

use crate::error::{Error, Result};

/// Default small prime used by hand-checkable examples.
pub const Q_SMALL: u64 = 97;
/// Default FFT-friendly prime, 7 * 2^26 + 1.
pub const Q_FFT: u64 = 469_762_049;

pub type Fe = u64;

/// Immutable field context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    q: u64,
}

/// A principal root of unity of a given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    pub omega: Fe,
    pub order: u64,
}

impl Field {
    /// Builds a context after checking that `q` is an odd prime below 2^32.
    pub fn new(q: u64) -> Result<Field> {
        if q < 3 || q >= 1 << 32 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    #[inline(always)]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Reduces an arbitrary signed integer.
    pub fn from_i64(&self, v: i64) -> Fe {
        v.rem_euclid(self.q as i64) as u64
    }

    /// Maps `v` to the symmetric range (-q/2, q/2].
    pub fn to_signed(&self, v: Fe) -> i64 {
        if v > self.q / 2 {
            v as i64 - self.q as i64
        } else {
            v as i64
        }
    }

    #[inline(always)]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: Fe) -> Fe {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        a * b % self.q
    }

    /// `a + b * c`
    #[inline(always)]
    pub fn mul_add(&self, a: Fe, b: Fe, c: Fe) -> Fe {
        (a + b * c) % self.q
    }

    pub fn pow(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a % self.q == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.q as i64, (a % self.q) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        Ok(self.from_i64(t0))
    }

    /// Largest e with 2^e dividing q - 1.
    pub fn two_adicity(&self) -> u32 {
        (self.q - 1).trailing_zeros()
    }

    /// Smallest generator of the multiplicative group.
    pub fn generator(&self) -> Fe {
        let factors = prime_factors(self.q - 1);
        (2..self.q)
            .find(|&g| factors.iter().all(|&p| self.pow(g, (self.q - 1) / p) != 1))
            .expect("a prime field has a generator")
    }

    /// Returns a principal root of unity of the given order.
    ///
    /// In a field, a primitive `order`-th root is principal, so the root is
    /// taken as `gen^((q-1)/order)`.
    pub fn find_principal_root(&self, order: u64) -> Result<RootOfUnity> {
        if order == 0 || (self.q - 1) % order != 0 {
            return Err(Error::NoSuchRoot(order));
        }
        let omega = self.pow(self.generator(), (self.q - 1) / order);
        Ok(RootOfUnity { omega, order })
    }

    /// Checks `omega^order = 1` and `omega^i - 1` invertible for `0 < i < order`.
    pub fn is_principal_root(&self, r: RootOfUnity) -> bool {
        if self.pow(r.omega, r.order) != 1 {
            return false;
        }
        // omega^i = 1 for some 0 < i < order iff it holds for some order/p.
        prime_factors(r.order)
            .iter()
            .all(|&p| self.pow(r.omega, r.order / p) != 1)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic Miller-Rabin, exact for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn egcd_inv(a: i64, q: i64) -> i64 {
        // brute-force oracle
        (1..q).find(|x| a * x % q == 1).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let f = Field::new(Q_SMALL).unwrap();
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(3).unwrap(), 65);
        assert_eq!(f.inv(96).unwrap(), 96);
        assert_eq!(f.inv(0), Err(Error::ZeroInverse));
        for a in 1..97 {
            assert_eq!(f.inv(a).unwrap() as i64, egcd_inv(a as i64, 97));
        }
    }

    #[test]
    fn rejects_composites() {
        assert!(Field::new(91).is_err());
        assert!(Field::new(2).is_err());
        assert!(Field::new((1 << 32) + 15).is_err());
        assert!(Field::new(Q_FFT).is_ok());
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn roots_small_prime() {
        let f = Field::new(Q_SMALL).unwrap();
        assert_eq!(f.find_principal_root(1).unwrap().omega, 1);
        let r = f.find_principal_root(4).unwrap();
        assert_eq!(r.omega, 22);
        assert_eq!(f.mul(22, 22), 96);
        assert!(f.is_principal_root(r));
        assert_eq!(f.find_principal_root(5), Err(Error::NoSuchRoot(5)));
    }

    #[test]
    fn roots_fft_prime() {
        let f = Field::new(Q_FFT).unwrap();
        assert_eq!(f.two_adicity(), 26);
        let r = f.find_principal_root(1 << 26).unwrap();
        assert!(f.is_principal_root(r));
        assert_eq!(f.pow(r.omega, 1 << 25), Q_FFT - 1);
        assert!(!f.is_principal_root(RootOfUnity { omega: f.mul(r.omega, r.omega), order: 1 << 26 }));
    }

    proptest! {
        #[test]
        fn inverse_is_multiplicative(a in 1u64..Q_FFT, b in 1u64..Q_FFT) {
            let f = Field::new(Q_FFT).unwrap();
            let ab = f.mul(a, b);
            prop_assert_eq!(f.inv(ab).unwrap(), f.mul(f.inv(a).unwrap(), f.inv(b).unwrap()));
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }

        #[test]
        fn half_power_is_minus_one(e in 1u32..=26) {
            let f = Field::new(Q_FFT).unwrap();
            let r = f.find_principal_root(1 << e).unwrap();
            prop_assert_eq!(f.pow(r.omega, 1 << (e - 1)), Q_FFT - 1);
        }
    }
}
