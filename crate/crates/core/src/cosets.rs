//! Cosets of the index-`n` multiplicative subgroup of `F_p^×` and their
//! cycle structure.
//!
//! `X_i = g^i X_0`, so the class of a nonzero `x` is `log_g(x) mod n`. Because
//! `X_i + X_j = g^i (X_0 + X_{j-i})` and `X_0 + X_s = X_0 (1 + X_s)`, every
//! sumset is a union of whole cosets and the whole cycle structure is fixed by
//! the `n` sets `classes(1 + X_s)`. [`SumClassTable`] holds exactly those,
//! computed in one pass over the log table.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::classes::ClassSet;
use crate::field::{pow_mod, FieldContext, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("index must be positive")]
    ZeroIndex,
    #[error("index {n} does not divide p - 1 = {}", .p - 1)]
    NotDivisor { p: u64, n: usize },
    #[error("index {0} must be even")]
    OddIndex(usize),
    #[error("cofactor (p-1)/n = {k} is even for p = {p}, n = {n} (need p ≡ n+1 mod 2n)")]
    EvenCofactor { p: u64, n: usize, k: u64 },
    #[error("cofactor (p-1)/n = {k} is odd for p = {p}, n = {n} (need p ≡ 1 mod 2n)")]
    OddCofactor { p: u64, n: usize, k: u64 },
}

/// Parity requirement placed on the cofactor `k = (p-1)/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetMode {
    Any,
    /// Directed variants: `n` even and `k` odd, so `-1 ∈ X_{n/2}`.
    OddCofactor,
    /// Symmetric variant: `k` even, so `-1 ∈ X_0`.
    EvenCofactor,
}

#[derive(Debug, Clone)]
pub struct CosetSystem {
    ctx: Arc<FieldContext>,
    n: usize,
    k: u64,
}

impl CosetSystem {
    pub fn new(ctx: Arc<FieldContext>, n: usize, mode: CosetMode) -> Result<Self, CosetError> {
        let p = ctx.p();
        if n == 0 {
            return Err(CosetError::ZeroIndex);
        }
        if !(p - 1).is_multiple_of(n as u64) {
            return Err(CosetError::NotDivisor { p, n });
        }
        let k = (p - 1) / n as u64;
        match mode {
            CosetMode::Any => {}
            CosetMode::OddCofactor => {
                if n % 2 == 1 {
                    return Err(CosetError::OddIndex(n));
                }
                if k.is_multiple_of(2) {
                    return Err(CosetError::EvenCofactor { p, n, k });
                }
            }
            CosetMode::EvenCofactor => {
                if k % 2 == 1 {
                    return Err(CosetError::OddCofactor { p, n, k });
                }
            }
        }
        Ok(CosetSystem { ctx, n, k })
    }

    /// Builds the field context as well.
    pub fn for_prime(p: u64, n: usize, mode: CosetMode) -> Result<Self, CosetError> {
        CosetSystem::new(Arc::new(FieldContext::new(p)?), n, mode)
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn context(&self) -> Arc<FieldContext> {
        Arc::clone(&self.ctx)
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coset size `(p-1)/n`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// `n / 2`: number of colors for the directed variants.
    pub fn m(&self) -> usize {
        self.n / 2
    }

    /// Class of `-1`, i.e. `(p-1)/2 mod n`. Equals `m` when `k` is odd.
    pub fn neg_one_class(&self) -> usize {
        (((self.p() - 1) / 2) % self.n as u64) as usize
    }

    /// Class of a nonzero field element.
    #[inline]
    pub fn class(&self, x: u64) -> usize {
        self.ctx.log(x) as usize % self.n
    }

    /// Elements of `X_i`, ascending.
    pub fn coset(&self, i: usize) -> Vec<u64> {
        let p = self.p();
        let step = self.ctx.exp(self.n as u64);
        let mut x = self.ctx.exp((i % self.n) as u64);
        let mut out = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            out.push(x);
            x = x * step % p;
        }
        out.sort_unstable();
        out
    }

    /// One sweep over `t ∈ [0, p-2]`: with `x = g^t` and `s = t mod n`,
    /// record `class(1 + x)` in `classes[s]`, or set `zero[s]` when
    /// `1 + x ≡ 0`.
    pub fn sum_class_table(&self) -> SumClassTable {
        let p = self.p();
        let g = self.ctx.g();
        let n = self.n;
        let mut classes = vec![ClassSet::empty(n); n];
        let mut zero = vec![false; n];
        let mut x = 1u64;
        let mut s = 0usize;
        for _ in 0..p - 1 {
            let y = x + 1;
            if y == p {
                zero[s] = true;
            } else {
                classes[s].insert(self.ctx.log(y) as usize % n);
            }
            x = x * g % p;
            s += 1;
            if s == n {
                s = 0;
            }
        }
        SumClassTable {
            n,
            neg_one: self.neg_one_class(),
            classes,
            zero,
        }
    }

    /// Lexicographically least `(x, y)` in `X_0 × X_0` whose sum `z` (for
    /// [`WitnessKind::Sum`]) or negated sum (for [`WitnessKind::AntiSum`])
    /// lies in `X_0`.
    pub fn find_witness(&self, kind: WitnessKind) -> Option<(u64, u64, u64)> {
        let p = self.p();
        let x0 = self.coset(0);
        for &x in &x0 {
            for &y in &x0 {
                let s = (x + y) % p;
                if s == 0 {
                    continue;
                }
                let z = match kind {
                    WitnessKind::Sum => s,
                    WitnessKind::AntiSum => p - s,
                };
                if self.class(z) == 0 {
                    return Some((x, y, z));
                }
            }
        }
        None
    }
}

/// Which Schur-type equation a witness solves inside `X_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `x + y = z`
    Sum,
    /// `x + y = -z`
    AntiSum,
}

/// Cycle structure of a coset system, stored per shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumClassTable {
    n: usize,
    neg_one: usize,
    classes: Vec<ClassSet>,
    zero: Vec<bool>,
}

impl SumClassTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neg_one_class(&self) -> usize {
        self.neg_one
    }

    /// Classes hit by `1 + X_s`, equivalently by `X_0 + X_s`.
    pub fn shift_classes(&self, s: usize) -> &ClassSet {
        &self.classes[s % self.n]
    }

    /// Whether `0 ∈ X_0 + X_s`.
    pub fn zero(&self, s: usize) -> bool {
        self.zero[s % self.n]
    }

    /// Class set of `X_i + X_j` and whether it contains 0.
    pub fn pair_classes(&self, i: usize, j: usize) -> (ClassSet, bool) {
        let mut out = ClassSet::empty(self.n);
        let zero = self.pair_classes_into(i, j, &mut out);
        (out, zero)
    }

    /// As [`Self::pair_classes`], writing the classes into `out`; returns the zero flag.
    pub fn pair_classes_into(&self, i: usize, j: usize, out: &mut ClassSet) -> bool {
        let s = (j + self.n - i % self.n) % self.n;
        self.classes[s].rotate_into(i, out);
        self.zero[s]
    }

    /// Every `(i, j, l)` with `X_l ⊆ X_i + X_j`, in lexicographic order.
    pub fn cycle_list(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let s = (j + n - i) % n;
                let mut ls: Vec<usize> = self.classes[s].iter().map(|c| (c + i) % n).collect();
                ls.sort_unstable();
                out.extend(ls.into_iter().map(|l| (i, j, l)));
            }
        }
        out
    }
}

/// `z ↦ z^k`, which sends `X_c` to the single value `(g^k)^c`. Classifies
/// elements without the log table.
#[derive(Debug, Clone)]
pub struct ResidueCharacter {
    p: u64,
    k: u64,
    values: HashMap<u64, usize>,
}

impl ResidueCharacter {
    pub fn new(p: u64, g: u64, n: usize) -> Self {
        assert!(n > 0 && (p - 1).is_multiple_of(n as u64));
        let k = (p - 1) / n as u64;
        let h = pow_mod(g, k, p);
        let mut values = HashMap::with_capacity(n);
        let mut v = 1u64;
        for c in 0..n {
            values.insert(v, c);
            v = (v as u128 * h as u128 % p as u128) as u64;
        }
        ResidueCharacter { p, k, values }
    }

    pub fn class_of(&self, z: u64) -> usize {
        self.values[&pow_mod(z, self.k, self.p)]
    }

    /// Classes of `1 + X_0` and whether `-1 ∈ X_0`, in O(k log p).
    pub fn shift_zero_classes(&self, g: u64) -> (ClassSet, bool) {
        let n = self.values.len();
        let step = pow_mod(g, n as u64, self.p);
        let mut out = ClassSet::empty(n);
        let mut zero = false;
        let mut x = 1u64;
        for _ in 0..self.k {
            let y = x + 1;
            if y == self.p {
                zero = true;
            } else {
                out.insert(self.class_of(y));
            }
            x = x * step % self.p;
        }
        (out, zero)
    }
}

/// Full O(k²) enumeration of coset sums, independent of the log table and of
/// the single-sweep construction.
#[derive(Debug, Clone)]
pub struct BruteForceOracle {
    p: u64,
    n: usize,
    class: Vec<u32>,
    members: Vec<Vec<u64>>,
}

impl BruteForceOracle {
    pub fn new(cs: &CosetSystem) -> Self {
        let p = cs.p();
        let n = cs.n();
        let chi = ResidueCharacter::new(p, cs.ctx().g(), n);
        let mut class = vec![u32::MAX; p as usize];
        let mut members = vec![Vec::new(); n];
        for z in 1..p {
            let c = chi.class_of(z);
            class[z as usize] = c as u32;
            members[c].push(z);
        }
        BruteForceOracle {
            p,
            n,
            class,
            members,
        }
    }

    pub fn coset(&self, i: usize) -> &[u64] {
        &self.members[i % self.n]
    }

    /// `{ class(x+y) : x ∈ X_i, y ∈ X_j, x+y ≠ 0 }` and whether 0 is attained.
    pub fn sum_classes(&self, i: usize, j: usize) -> (ClassSet, bool) {
        let mut out = ClassSet::empty(self.n);
        let zero = self.sum_classes_into(i, j, &mut out);
        (out, zero)
    }

    /// As [`Self::sum_classes`], writing the classes into `out`; returns the zero flag.
    pub fn sum_classes_into(&self, i: usize, j: usize, out: &mut ClassSet) -> bool {
        out.clear();
        let mut zero = false;
        for &x in self.coset(i) {
            for &y in self.coset(j) {
                let mut s = x + y;
                if s >= self.p {
                    s -= self.p;
                }
                if s == 0 {
                    zero = true;
                } else {
                    out.insert(self.class[s as usize] as usize);
                }
            }
        }
        zero
    }
}

/// Single-pair convenience wrapper around [`BruteForceOracle`].
pub fn brute_force_sum_classes(cs: &CosetSystem, i: usize, j: usize) -> (ClassSet, bool) {
    BruteForceOracle::new(cs).sum_classes(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(p: u64, n: usize) -> CosetSystem {
        CosetSystem::for_prime(p, n, CosetMode::OddCofactor).unwrap()
    }

    fn set(n: usize, cs: &[usize]) -> ClassSet {
        ClassSet::from_classes(n, cs.iter().copied())
    }

    #[test]
    fn coset_examples() {
        let cs = sys(29, 4);
        assert_eq!(cs.coset(0), vec![1, 7, 16, 20, 23, 24, 25]);
        assert_eq!((cs.k(), cs.m(), cs.neg_one_class()), (7, 2, 2));
        let cs = sys(3, 2);
        assert_eq!(cs.coset(0), vec![1]);
        assert_eq!(cs.coset(1), vec![2]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            CosetSystem::for_prime(29, 3, CosetMode::OddCofactor).unwrap_err(),
            CosetError::NotDivisor { p: 29, n: 3 }
        );
        assert_eq!(
            CosetSystem::for_prime(31, 3, CosetMode::OddCofactor).unwrap_err(),
            CosetError::OddIndex(3)
        );
        assert_eq!(
            CosetSystem::for_prime(29, 2, CosetMode::OddCofactor).unwrap_err(),
            CosetError::EvenCofactor { p: 29, n: 2, k: 14 }
        );
        assert_eq!(
            CosetSystem::for_prime(29, 4, CosetMode::EvenCofactor).unwrap_err(),
            CosetError::OddCofactor { p: 29, n: 4, k: 7 }
        );
        assert!(CosetSystem::for_prime(29, 2, CosetMode::EvenCofactor).is_ok());
        assert_eq!(
            CosetSystem::for_prime(29, 0, CosetMode::Any).unwrap_err(),
            CosetError::ZeroIndex
        );
    }

    #[test]
    fn class_map_is_a_homomorphism() {
        let cs = sys(29, 4);
        assert_eq!(cs.class(cs.ctx().g()), 1);
        assert_eq!(cs.class(28), 2);
        for x in 1..29 {
            for y in 1..29 {
                assert_eq!(cs.class(x * y % 29), (cs.class(x) + cs.class(y)) % 4);
            }
        }
    }

    #[test]
    fn table_examples() {
        let t = sys(29, 4).sum_class_table();
        assert_eq!(t.shift_classes(0), &set(4, &[0, 1, 3]));
        assert_eq!((0..4).filter(|&s| t.zero(s)).collect::<Vec<_>>(), vec![2]);

        let t = sys(3, 2).sum_class_table();
        assert_eq!(t.shift_classes(0), &set(2, &[1]));
        assert!(t.shift_classes(1).is_empty());
        assert!(t.zero(1) && !t.zero(0));

        let t = sys(7, 2).sum_class_table();
        assert_eq!(t.shift_classes(0), &set(2, &[0, 1]));
    }

    #[test]
    fn brute_force_examples() {
        let cs = sys(29, 4);
        assert_eq!(
            brute_force_sum_classes(&cs, 0, 0),
            (set(4, &[0, 1, 3]), false)
        );
        assert_eq!(
            brute_force_sum_classes(&cs, 0, 2),
            (ClassSet::full(4), true)
        );
        let cs = sys(3, 2);
        assert_eq!(
            brute_force_sum_classes(&cs, 0, 1),
            (ClassSet::empty(2), true)
        );
    }

    #[test]
    fn cycle_list_example() {
        let t = sys(3, 2).sum_class_table();
        assert_eq!(t.cycle_list(), vec![(0, 0, 1), (1, 1, 0)]);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(sys(3, 2).find_witness(WitnessKind::Sum), None);
        assert_eq!(sys(7, 2).find_witness(WitnessKind::Sum), Some((1, 1, 2)));
        assert_eq!(sys(29, 4).find_witness(WitnessKind::AntiSum), None);
        // 1 + 23 = 24 inside X_0 = {1, 7, 16, 20, 23, 24, 25}
        assert_eq!(sys(29, 4).find_witness(WitnessKind::Sum), Some((1, 23, 24)));
    }

    #[test]
    fn table_matches_oracle_on_general_index() {
        // also covers even cofactors and odd n
        for (p, n) in [(31, 3), (31, 5), (37, 6), (41, 4), (13, 12), (13, 1)] {
            let cs = CosetSystem::for_prime(p, n, CosetMode::Any).unwrap();
            let t = cs.sum_class_table();
            let oracle = BruteForceOracle::new(&cs);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(
                        t.pair_classes(i, j),
                        oracle.sum_classes(i, j),
                        "p={p} n={n} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn character_prefilter_matches_table() {
        for (p, n) in [(29, 4), (3221, 20), (3221, 70), (67, 6)] {
            let Ok(cs) = CosetSystem::for_prime(p, n, CosetMode::Any) else {
                continue;
            };
            let chi = ResidueCharacter::new(p, cs.ctx().g(), n);
            let t = cs.sum_class_table();
            assert_eq!(
                chi.shift_zero_classes(cs.ctx().g()),
                (t.shift_classes(0).clone(), t.zero(0))
            );
        }
    }
}
