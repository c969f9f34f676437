//! Prime-field groundwork: primality, factorization, primitive roots and the
//! discrete-log table over `F_p^×`.

use thiserror::Error;

/// Exclusive upper bound on supported moduli. Log-table entries are 32 bits
/// wide and products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be an odd prime, got {0}")]
    EvenModulus(u64),
    #[error("cannot factor {0}: input must be at least 2")]
    FactorInput(u64),
    #[error("modulus {0} is too large (must be below 2^31)")]
    TooLarge(u64),
    #[error("cannot allocate a discrete-log table for p = {0}")]
    Allocation(u64),
}

/// Modular exponentiation with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

// Witness set that is deterministic for every n < 3.3 * 10^24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin test, exact for every 64-bit input.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if x == q {
            return true;
        }
        if x.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = x - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    let n = x as u128;
    'witness: for &a in &MR_BASES {
        let mut y = pow_mod(a, d, x) as u128;
        if y == 1 || y == n - 1 {
            continue;
        }
        for _ in 1..r {
            y = y * y % n;
            if y == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors of `x` with multiplicity, ascending.
pub fn factorize(mut x: u64) -> Result<Vec<u64>, FieldError> {
    if x < 2 {
        return Err(FieldError::FactorInput(x));
    }
    let mut out = Vec::new();
    while x.is_multiple_of(2) {
        out.push(2);
        x /= 2;
    }
    let mut q = 3u64;
    while q <= x / q {
        while x.is_multiple_of(q) {
            out.push(q);
            x /= q;
        }
        q += 2;
    }
    if x > 1 {
        out.push(x);
    }
    Ok(out)
}

fn distinct_factors(x: u64) -> Result<Vec<u64>, FieldError> {
    let mut f = factorize(x)?;
    f.dedup();
    Ok(f)
}

/// Smallest generator of `F_p^×`.
pub fn find_primitive_root(p: u64) -> Result<u64, FieldError> {
    if p == 2 {
        return Err(FieldError::EvenModulus(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let primes = distinct_factors(p - 1)?;
    let g = (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime field has a primitive root");
    Ok(g)
}

/// A prime modulus, its smallest primitive root and the discrete-log table.
///
/// Immutable after construction; share it behind an `Arc` when several coset
/// systems are built over the same prime.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    g: u64,
    // log[x] for x in 1..p; log[0] is unused.
    log: Vec<u32>,
}

impl FieldContext {
    /// Builds the log table by walking successive powers of `g`: O(p) time,
    /// about 4p bytes.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        let g = find_primitive_root(p)?;
        let len = p as usize;
        let mut log = Vec::new();
        log.try_reserve_exact(len)
            .map_err(|_| FieldError::Allocation(p))?;
        log.resize(len, u32::MAX);
        let mut x = 1u64;
        for t in 0..(p - 1) as u32 {
            log[x as usize] = t;
            x = x * g % p;
        }
        debug_assert_eq!(x, 1);
        Ok(FieldContext { p, g, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The primitive root in use.
    pub fn g(&self) -> u64 {
        self.g
    }

    /// Discrete log of `x` to base `g`; `x` must lie in `1..p`.
    #[inline]
    pub fn log(&self, x: u64) -> u32 {
        debug_assert!(x >= 1 && x < self.p);
        self.log[x as usize]
    }

    /// `g^t mod p`.
    pub fn exp(&self, t: u64) -> u64 {
        pow_mod(self.g, t, self.p)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
}
