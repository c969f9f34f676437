//! Decides whether a prime gives a symmetric Ramsey, Directed Ramsey or
//! Directed Anti-Ramsey algebra through the coset construction, and searches
//! for the smallest such prime.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::classes::ClassSet;
use crate::cosets::{
    BruteForceOracle, CosetError, CosetMode, CosetSystem, ResidueCharacter, SumClassTable,
};
use crate::field::{find_primitive_root, is_prime, pow_mod, MAX_MODULUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    SymmetricRamsey,
    DirectedRamsey,
    DirectedAntiRamsey,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::SymmetricRamsey,
        Variant::DirectedRamsey,
        Variant::DirectedAntiRamsey,
    ];

    /// Number of cosets used for `m` colors.
    pub fn index(self, m: usize) -> usize {
        match self {
            Variant::SymmetricRamsey => m,
            _ => 2 * m,
        }
    }

    pub fn mode(self) -> CosetMode {
        match self {
            Variant::SymmetricRamsey => CosetMode::EvenCofactor,
            _ => CosetMode::OddCofactor,
        }
    }

    /// `(modulus, residue)` that every candidate prime must satisfy.
    pub fn congruence(self, m: usize) -> (u64, u64) {
        let n = self.index(m) as u64;
        match self {
            Variant::SymmetricRamsey => (2 * n, 1),
            _ => (2 * n, n + 1),
        }
    }

    /// Bound beyond which the construction provably fails: `n^4 + 5`, with
    /// `n = 2m` for the directed variants and `n = m` for the symmetric one.
    pub fn default_bound(self, m: usize) -> u64 {
        (self.index(m) as u64).saturating_pow(4).saturating_add(5)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::SymmetricRamsey => "symmetric",
            Variant::DirectedRamsey => "ramsey",
            Variant::DirectedAntiRamsey => "anti",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Variant::SymmetricRamsey),
            "ramsey" => Ok(Variant::DirectedRamsey),
            "anti" => Ok(Variant::DirectedAntiRamsey),
            _ => Err(format!(
                "unknown variant `{s}` (expected ramsey, anti or symmetric)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("color count must be at least 1")]
    NoColors,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{variant} with m = {m} needs p ≡ {residue} (mod {modulus}), got p = {p}")]
    Congruence {
        p: u64,
        m: usize,
        variant: Variant,
        modulus: u64,
        residue: u64,
    },
    #[error(transparent)]
    Coset(#[from] CosetError),
}

/// Which defining condition failed. For the directed variants C1 is the
/// `X_i + X_i` condition, C2 the `X_i + X_{i+m}` condition and C3 the rest.
/// For the symmetric variant C1 is `-X_i = X_i`, C2 is `X_i + X_i` and C3 is
/// `X_i + X_j`, `i ≠ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    C1,
    C2,
    C3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mismatch {
    /// Required class absent from the sumset.
    Missing(usize),
    /// Forbidden class present in the sumset.
    Extra(usize),
    /// Zero membership differs from the requirement.
    Zero { expected: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// `j - i mod n` of the offending sumset.
    pub shift: usize,
    /// The explicit `(i, j)` pair, when the check ran over all pairs.
    pub pair: Option<(usize, usize)>,
    pub mismatch: Mismatch,
    pub expected: ClassSet,
    pub found: ClassSet,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} shift {}", self.condition, self.shift)?;
        if let Some((i, j)) = self.pair {
            write!(f, " pair ({i},{j})")?;
        }
        match self.mismatch {
            Mismatch::Missing(c) => write!(f, ": class {c} missing")?,
            Mismatch::Extra(c) => write!(f, ": class {c} present")?,
            Mismatch::Zero { expected: true } => write!(f, ": 0 missing")?,
            Mismatch::Zero { expected: false } => write!(f, ": 0 present")?,
        }
        write!(f, " (expected {}, found {})", self.expected, self.found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => f.write_str("pass"),
            Some(v) => write!(f, "fail {v}"),
        }
    }
}

/// A requirement on `X_0 + X_s`: its class set and zero membership.
struct Requirement {
    condition: Condition,
    classes: ClassSet,
    zero: bool,
}

fn requirement(v: Variant, n: usize, s: usize) -> Requirement {
    let m = n / 2;
    let without = |cs: &[usize]| {
        let mut set = ClassSet::full(n);
        for &c in cs {
            set.remove(c);
        }
        set
    };
    match v {
        Variant::DirectedRamsey if s == 0 => Requirement {
            condition: Condition::C1,
            classes: without(&[0]),
            zero: false,
        },
        // for m = 1 this is empty: only the zero flag is required
        Variant::DirectedRamsey if s == m => Requirement {
            condition: Condition::C2,
            classes: without(&[0, m]),
            zero: true,
        },
        Variant::DirectedAntiRamsey if s == 0 => Requirement {
            condition: Condition::C1,
            classes: without(&[m]),
            zero: false,
        },
        Variant::DirectedAntiRamsey if s == m => Requirement {
            condition: Condition::C2,
            classes: ClassSet::full(n),
            zero: true,
        },
        Variant::SymmetricRamsey if s == 0 => Requirement {
            condition: Condition::C2,
            classes: without(&[0]),
            zero: true,
        },
        _ => Requirement {
            condition: Condition::C3,
            classes: ClassSet::full(n),
            zero: false,
        },
    }
}

fn compare(
    req: &Requirement,
    found: &ClassSet,
    found_zero: bool,
    shift: usize,
    pair: Option<(usize, usize)>,
) -> Option<Violation> {
    let mismatch = match req.classes.first_difference(found) {
        Some((c, true)) => Mismatch::Missing(c),
        Some((c, false)) => Mismatch::Extra(c),
        None if req.zero != found_zero => Mismatch::Zero { expected: req.zero },
        None => return None,
    };
    Some(Violation {
        condition: req.condition,
        shift,
        pair,
        mismatch,
        expected: req.classes.clone(),
        found: found.clone(),
    })
}

/// Shifts in reporting order: 0, then m, then the rest ascending.
fn shift_order(v: Variant, n: usize) -> Vec<usize> {
    let m = n / 2;
    let mut order = vec![0];
    if v != Variant::SymmetricRamsey && m != 0 {
        order.push(m);
    }
    order.extend((1..n).filter(|&s| v == Variant::SymmetricRamsey || s != m));
    order
}

/// Checks a prebuilt table; the caller guarantees it was built with `n =
/// v.index(m)`.
pub fn check_table(t: &SumClassTable, v: Variant) -> CheckReport {
    let n = t.n();
    if v == Variant::SymmetricRamsey && t.neg_one_class() != 0 {
        let found = t.shift_classes(0).clone();
        return CheckReport {
            violation: Some(Violation {
                condition: Condition::C1,
                shift: 0,
                pair: None,
                mismatch: Mismatch::Zero { expected: true },
                expected: found.clone(),
                found,
            }),
        };
    }
    let violation = shift_order(v, n).into_iter().find_map(|s| {
        let req = requirement(v, n, s);
        compare(&req, t.shift_classes(s), t.zero(s), s, None)
    });
    CheckReport { violation }
}

fn validate(p: u64, m: usize, v: Variant) -> Result<(), CheckError> {
    if m == 0 {
        return Err(CheckError::NoColors);
    }
    if !is_prime(p) {
        return Err(CheckError::NotPrime(p));
    }
    let (modulus, residue) = v.congruence(m);
    if p % modulus != residue {
        return Err(CheckError::Congruence {
            p,
            m,
            variant: v,
            modulus,
            residue,
        });
    }
    Ok(())
}

pub fn coset_system(p: u64, m: usize, v: Variant) -> Result<CosetSystem, CheckError> {
    validate(p, m, v)?;
    Ok(CosetSystem::for_prime(p, v.index(m), v.mode())?)
}

/// Evaluates the defining conditions of `v` on the cosets of index
/// `v.index(m)` in `F_p^×`, stopping at the first violation.
pub fn check(p: u64, m: usize, v: Variant) -> Result<CheckReport, CheckError> {
    let cs = coset_system(p, m, v)?;
    Ok(check_table(&cs.sum_class_table(), v))
}

/// Same conditions, checked for every one of the `n²` pairs `(i, j)` by full
/// enumeration instead of through the per-shift table. O(p²).
pub fn check_paranoid(p: u64, m: usize, v: Variant) -> Result<CheckReport, CheckError> {
    let cs = coset_system(p, m, v)?;
    let n = cs.n();
    let oracle = BruteForceOracle::new(&cs);
    if v == Variant::SymmetricRamsey {
        let x0 = oracle.coset(0);
        if x0.iter().any(|&x| x0.binary_search(&(p - x)).is_err()) {
            let found = oracle.sum_classes(0, 0).0;
            return Ok(CheckReport {
                violation: Some(Violation {
                    condition: Condition::C1,
                    shift: 0,
                    pair: Some((0, 0)),
                    mismatch: Mismatch::Zero { expected: true },
                    expected: found.clone(),
                    found,
                }),
            });
        }
    }
    let mut first: Option<Violation> = None;
    for i in 0..n {
        for j in 0..n {
            let s = (j + n - i) % n;
            let base = requirement(v, n, s);
            let req = Requirement {
                condition: base.condition,
                classes: base.classes.rotated(i),
                zero: base.zero,
            };
            let (found, zero) = oracle.sum_classes(i, j);
            if let Some(viol) = compare(&req, &found, zero, s, Some((i, j))) {
                let better = match &first {
                    None => true,
                    Some(f) => {
                        (viol.condition, i, j) < (f.condition, f.pair.unwrap().0, f.pair.unwrap().1)
                    }
                };
                if better {
                    first = Some(viol);
                }
            }
        }
    }
    Ok(CheckReport { violation: first })
}

/// Primes `≤ p_max` in the residue class required by `(m, v)`, ascending.
pub fn candidate_primes(m: usize, v: Variant, p_max: u64) -> impl Iterator<Item = u64> {
    let (modulus, residue) = v.congruence(m.max(1));
    let start = if m == 0 {
        u64::MAX
    } else if residue == 1 {
        modulus + 1
    } else {
        residue
    };
    let step = modulus;
    std::iter::successors(Some(start), move |&p| p.checked_add(step))
        .take_while(move |&p| p <= p_max)
        .filter(|&p| is_prime(p))
}

/// Cheap necessary test: `X_0 + X_0` only, classified through the power
/// residue character in O(k log p) without building a log table. Stops at
/// the first forbidden class, which is where most candidates fail.
fn passes_shift_zero(p: u64, m: usize, v: Variant) -> Result<bool, CheckError> {
    let n = v.index(m);
    let g = find_primitive_root(p).map_err(CosetError::from)?;
    let chi = ResidueCharacter::new(p, g, n);
    let req = requirement(v, n, 0);
    let step = pow_mod(g, n as u64, p);
    let mut found = ClassSet::empty(n);
    let mut zero = false;
    let mut x = 1u64;
    for _ in 0..(p - 1) / n as u64 {
        if x + 1 == p {
            zero = true;
        } else {
            let c = chi.class_of(x + 1);
            if !req.classes.contains(c) {
                return Ok(false);
            }
            found.insert(c);
        }
        x = x * step % p;
    }
    Ok(found == req.classes && zero == req.zero)
}

fn passes(p: u64, m: usize, v: Variant) -> Result<bool, CheckError> {
    if !passes_shift_zero(p, m, v)? {
        return Ok(false);
    }
    Ok(check(p, m, v)?.pass())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub variant: Variant,
    pub m: usize,
    pub n: usize,
    /// Largest modulus considered.
    pub bound: u64,
    /// Smallest passing prime, if any.
    pub p: Option<u64>,
    /// Primitive root of `p`.
    pub g: Option<u64>,
    /// Candidates examined, including the hit.
    pub checked: usize,
}

impl SearchOutcome {
    /// Coset size `(p-1)/n` of the hit.
    pub fn k(&self) -> Option<u64> {
        self.p.map(|p| (p - 1) / self.n as u64)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("search interrupted")]
    Interrupted,
}

/// Smallest prime `≤ p_max` (default [`Variant::default_bound`], capped below
/// 2^31) giving a `v` algebra in `m` colors.
///
/// Candidates are checked in ascending batches on the current rayon pool and
/// the least passing one wins, so the answer does not depend on scheduling.
pub fn search_smallest(
    m: usize,
    v: Variant,
    p_max: Option<u64>,
) -> Result<SearchOutcome, CheckError> {
    match search_smallest_until(m, v, p_max, &AtomicBool::new(false)) {
        Ok(out) => Ok(out),
        Err(SearchError::Check(e)) => Err(e),
        Err(SearchError::Interrupted) => unreachable!("stop flag never set"),
    }
}

/// [`search_smallest`], polling `stop` between batches.
pub fn search_smallest_until(
    m: usize,
    v: Variant,
    p_max: Option<u64>,
    stop: &AtomicBool,
) -> Result<SearchOutcome, SearchError> {
    if m == 0 {
        return Err(CheckError::NoColors.into());
    }
    let bound = p_max
        .unwrap_or_else(|| v.default_bound(m))
        .min(MAX_MODULUS - 1);
    let n = v.index(m);
    let batch = (rayon::current_num_threads() * 4).max(4);
    let mut candidates = candidate_primes(m, v, bound);
    let mut checked = 0usize;
    loop {
        if stop.load(Ordering::Relaxed) {
            return Err(SearchError::Interrupted);
        }
        let chunk: Vec<u64> = candidates.by_ref().take(batch).collect();
        if chunk.is_empty() {
            return Ok(SearchOutcome {
                variant: v,
                m,
                n,
                bound,
                p: None,
                g: None,
                checked,
            });
        }
        let results: Vec<Result<bool, CheckError>> =
            chunk.par_iter().map(|&p| passes(p, m, v)).collect();
        for (idx, (&p, r)) in chunk.iter().zip(results).enumerate() {
            if r? {
                return Ok(SearchOutcome {
                    variant: v,
                    m,
                    n,
                    bound,
                    p: Some(p),
                    g: Some(
                        find_primitive_root(p)
                            .map_err(CosetError::from)
                            .map_err(CheckError::from)?,
                    ),
                    checked: checked + idx + 1,
                });
            }
        }
        checked += chunk.len();
    }
}
