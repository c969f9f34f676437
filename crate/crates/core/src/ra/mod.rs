//! Finite integral relation algebras given by their diversity atoms, converse
//! and forbidden cycles, and representations of them by unions of cosets.
//!
//! A cycle `(x, y, z)` is allowed when `z ≤ x;y`. An image `ρ(x)` is a set of
//! coset classes and stands for the relation `{(u, v) : u - v ∈ ∪ X_c}`, so
//! `ρ(x);ρ(y)` is the difference relation of the sumset `ρ(x) + ρ(y)`.

mod embed;
mod parse;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::classes::ClassSet;
use crate::cosets::{CosetSystem, SumClassTable};

pub use embed::embed;
pub use parse::{parse_rep_file, parse_rep_text, render_rep_file, AtomLine, RepFile};

/// Atom indices `(x, y, z)`.
pub type Triple = (usize, usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("atom index {0} out of range")]
    AtomIndex(usize),
    #[error("atom {0} declared twice")]
    DuplicateAtom(String),
    #[error("atom {0} has no converse declaration")]
    MissingConverse(String),
    #[error("atom {0} has more than one converse declaration")]
    ConflictingConverse(String),
    #[error("converse is not an involution at atom {0}")]
    NotInvolution(usize),
    #[error("missing `{0}` line")]
    MissingDirective(&'static str),
    #[error("line {line}: class {class} out of range for index {n}")]
    ClassRange { line: usize, class: usize, n: usize },
    #[error("representation has {rep} atoms but the structure has {structure}")]
    AtomCount { rep: usize, structure: usize },
    #[error("representation uses index {rep} but the table has index {table}")]
    IndexMismatch { rep: usize, table: usize },
    #[error("{0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomStructure {
    names: Vec<String>,
    converse: Vec<usize>,
    forbidden: BTreeSet<Triple>,
}

/// Least set containing `triples` and closed under the Peircean transforms
/// `(x,y,z) → (y̆,x̆,z̆)`, `(x̆,z,y)` and `(z,y̆,x)`.
pub fn peircean_closure(
    triples: impl IntoIterator<Item = Triple>,
    converse: &[usize],
) -> Result<BTreeSet<Triple>, RaError> {
    let n = converse.len();
    for (i, &c) in converse.iter().enumerate() {
        if c >= n || converse[c] != i {
            return Err(RaError::NotInvolution(i));
        }
    }
    let mut closed = BTreeSet::new();
    let mut stack: Vec<Triple> = Vec::new();
    for t in triples {
        let (x, y, z) = t;
        if let Some(&bad) = [x, y, z].iter().find(|&&a| a >= n) {
            return Err(RaError::AtomIndex(bad));
        }
        stack.push(t);
    }
    let conv = |a: usize| converse[a];
    while let Some(t @ (x, y, z)) = stack.pop() {
        if !closed.insert(t) {
            continue;
        }
        for next in [
            (conv(y), conv(x), conv(z)),
            (conv(x), z, y),
            (z, conv(y), x),
        ] {
            if !closed.contains(&next) {
                stack.push(next);
            }
        }
    }
    Ok(closed)
}

impl AtomStructure {
    /// `forbidden` need not be closed; it is replaced by its closure.
    pub fn new(
        names: Vec<String>,
        converse: Vec<usize>,
        forbidden: impl IntoIterator<Item = Triple>,
    ) -> Result<Self, RaError> {
        if converse.len() != names.len() {
            return Err(RaError::AtomCount {
                rep: converse.len(),
                structure: names.len(),
            });
        }
        let forbidden = peircean_closure(forbidden, &converse)?;
        Ok(AtomStructure {
            names,
            converse,
            forbidden,
        })
    }

    /// Builds from names, converse pairs and forbidden triples given by name.
    pub fn from_names(
        atoms: &[&str],
        converse: &[(&str, &str)],
        forbid: &[(&str, &str, &str)],
    ) -> Result<Self, RaError> {
        let names: Vec<String> = atoms.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| RaError::UnknownAtom(s.to_string()))
        };
        let mut conv = vec![usize::MAX; names.len()];
        for &(a, b) in converse {
            let (a, b) = (idx(a)?, idx(b)?);
            conv[a] = b;
            conv[b] = a;
        }
        if let Some(i) = conv.iter().position(|&c| c == usize::MAX) {
            return Err(RaError::MissingConverse(names[i].clone()));
        }
        let triples = forbid
            .iter()
            .map(|&(x, y, z)| Ok((idx(x)?, idx(y)?, idx(z)?)))
            .collect::<Result<Vec<_>, RaError>>()?;
        AtomStructure::new(names, conv, triples)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|a| a == name)
    }

    pub fn converse(&self, x: usize) -> usize {
        self.converse[x]
    }

    pub fn is_symmetric(&self, x: usize) -> bool {
        self.converse[x] == x
    }

    /// The closed set of forbidden cycles.
    pub fn forbidden(&self) -> &BTreeSet<Triple> {
        &self.forbidden
    }

    pub fn is_forbidden(&self, x: usize, y: usize, z: usize) -> bool {
        self.forbidden.contains(&(x, y, z))
    }

    /// Diversity atoms below `x;y`, and whether the identity is.
    pub fn expected_comp(&self, x: usize, y: usize) -> (Vec<usize>, bool) {
        let atoms = (0..self.len())
            .filter(|&z| !self.is_forbidden(x, y, z))
            .collect();
        (atoms, y == self.converse[x])
    }

    /// Atoms occurring in no forbidden cycle.
    pub fn flexible_atoms(&self) -> Vec<usize> {
        let mut used = vec![false; self.len()];
        for &(x, y, z) in &self.forbidden {
            used[x] = true;
            used[y] = true;
            used[z] = true;
        }
        (0..self.len()).filter(|&a| !used[a]).collect()
    }

    /// Atom indices ordered by name.
    fn by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        order
    }
}

/// Images of the diversity atoms as sets of coset classes over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub p: u64,
    pub n: usize,
    /// Indexed like the atoms of the structure it represents.
    pub assign: Vec<ClassSet>,
}

impl Representation {
    pub fn new(p: u64, n: usize, assign: Vec<ClassSet>) -> Self {
        assert!(
            assign.iter().all(|s| s.width() == n),
            "class sets must have width n"
        );
        Representation { p, n, assign }
    }

    /// Class of `-1`; converse images differ by this rotation.
    pub fn converse_shift(&self) -> usize {
        (((self.p - 1) / 2) % self.n as u64) as usize
    }

    /// Partition, nonemptiness and converse violations.
    pub fn invariant_failures(&self, a: &AtomStructure) -> Vec<Failure> {
        let mut out = Vec::new();
        let mut owner: Vec<Option<usize>> = vec![None; self.n];
        for (x, set) in self.assign.iter().enumerate() {
            if set.is_empty() {
                out.push(Failure::EmptyAtom { atom: x });
            }
            for c in set.iter() {
                match owner[c] {
                    None => owner[c] = Some(x),
                    Some(first) => out.push(Failure::AssignedTwice {
                        class: c,
                        atoms: (first, x),
                    }),
                }
            }
        }
        for (c, o) in owner.iter().enumerate() {
            if o.is_none() {
                out.push(Failure::Unassigned { class: c });
            }
        }
        let shift = self.converse_shift();
        for (x, set) in self.assign.iter().enumerate() {
            let expected = set.rotated(shift);
            let y = a.converse(x);
            if expected != self.assign[y] {
                out.push(Failure::Converse {
                    atom: x,
                    expected,
                    found: self.assign[y].clone(),
                });
            }
        }
        out
    }

    /// Errors with the first invariant violation.
    pub fn validate(&self, a: &AtomStructure) -> Result<(), RaError> {
        if self.assign.len() != a.len() {
            return Err(RaError::AtomCount {
                rep: self.assign.len(),
                structure: a.len(),
            });
        }
        match self.invariant_failures(a).first() {
            None => Ok(()),
            Some(f) => Err(RaError::Invariant(f.describe(a))),
        }
    }
}

/// Class set of `ρ(x) + ρ(y)` and whether it contains 0.
pub fn image_comp_classes(
    rep: &Representation,
    t: &SumClassTable,
    x: usize,
    y: usize,
) -> Result<(ClassSet, bool), RaError> {
    if rep.n != t.n() {
        return Err(RaError::IndexMismatch {
            rep: rep.n,
            table: t.n(),
        });
    }
    for a in [x, y] {
        if a >= rep.assign.len() {
            return Err(RaError::AtomIndex(a));
        }
    }
    Ok(sets_comp(&rep.assign[x], &rep.assign[y], t))
}

pub(crate) fn sets_comp(xs: &ClassSet, ys: &ClassSet, t: &SumClassTable) -> (ClassSet, bool) {
    let n = t.n();
    let neg = t.neg_one_class();
    let mut out = ClassSet::empty(n);
    let mut zero = false;
    for i in xs.iter() {
        if ys.contains((i + neg) % n) {
            zero = true;
        }
        for j in ys.iter() {
            out.union_with(&t.pair_classes(i, j).0);
        }
    }
    (out, zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    EmptyAtom {
        atom: usize,
    },
    Unassigned {
        class: usize,
    },
    AssignedTwice {
        class: usize,
        atoms: (usize, usize),
    },
    Converse {
        atom: usize,
        expected: ClassSet,
        found: ClassSet,
    },
    /// `ρ(x);ρ(y)` differs from the union of the expected images.
    Composition {
        x: usize,
        y: usize,
        missing: ClassSet,
        extra: ClassSet,
    },
    /// Identity membership of `ρ(x);ρ(y)` is wrong.
    Identity {
        x: usize,
        y: usize,
        expected: bool,
    },
    /// An explicit triangle search disagreed with the class-level answer.
    Explicit {
        x: usize,
        y: usize,
        z: usize,
        class: usize,
        expected: bool,
    },
}

impl Failure {
    pub fn describe(&self, a: &AtomStructure) -> String {
        let nm = |i: usize| a.names.get(i).map(String::as_str).unwrap_or("?");
        match self {
            Failure::EmptyAtom { atom } => format!("atom {} has no classes", nm(*atom)),
            Failure::Unassigned { class } => {
                format!("class {class} unassigned: classes do not partition")
            }
            Failure::AssignedTwice { class, atoms } => {
                format!(
                    "class {class} assigned twice ({} and {})",
                    nm(atoms.0),
                    nm(atoms.1)
                )
            }
            Failure::Converse {
                atom,
                expected,
                found,
            } => format!(
                "converse of {} should be {expected} but {} is {found}",
                nm(*atom),
                nm(a.converse[*atom])
            ),
            Failure::Composition {
                x,
                y,
                missing,
                extra,
            } => {
                let mut s = format!("{};{}:", nm(*x), nm(*y));
                if !missing.is_empty() {
                    let _ = write!(s, " missing classes {missing}");
                }
                if !extra.is_empty() {
                    let _ = write!(s, " extra classes {extra}");
                }
                s
            }
            Failure::Identity { x, y, expected } => format!(
                "{};{}: identity {} but the image {}",
                nm(*x),
                nm(*y),
                if *expected {
                    "expected"
                } else {
                    "not expected"
                },
                if *expected { "misses 0" } else { "contains 0" }
            ),
            Failure::Explicit {
                x,
                y,
                z,
                class,
                expected,
            } => format!(
                "{};{}: explicit triangle into class {class} of {} {}",
                nm(*x),
                nm(*y),
                nm(*z),
                if *expected { "not found" } else { "found" }
            ),
        }
    }

    fn pair(&self) -> Option<(usize, usize)> {
        match *self {
            Failure::Composition { x, y, .. }
            | Failure::Identity { x, y, .. }
            | Failure::Explicit { x, y, .. } => Some((x, y)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Ordered atom pairs in report order (lexicographic by name).
    pub pairs: Vec<(usize, usize)>,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn pair_failures(&self, x: usize, y: usize) -> impl Iterator<Item = &Failure> {
        self.failures
            .iter()
            .filter(move |f| f.pair() == Some((x, y)))
    }

    /// One line per invariant failure, one per pair, then `pass` or `fail`.
    pub fn render(&self, a: &AtomStructure) -> String {
        let mut out = String::new();
        for f in self.failures.iter().filter(|f| f.pair().is_none()) {
            let _ = writeln!(out, "invariant: {}", f.describe(a));
        }
        for &(x, y) in &self.pairs {
            let fs: Vec<String> = self.pair_failures(x, y).map(|f| f.describe(a)).collect();
            if fs.is_empty() {
                let _ = writeln!(out, "{} {}: ok", a.name(x), a.name(y));
            } else {
                for f in fs {
                    let _ = writeln!(out, "{} {}: FAIL {f}", a.name(x), a.name(y));
                }
            }
        }
        out.push_str(if self.pass() { "pass\n" } else { "fail\n" });
        out
    }
}

fn check_shapes(a: &AtomStructure, rep: &Representation, t: &SumClassTable) -> Result<(), RaError> {
    if rep.assign.len() != a.len() {
        return Err(RaError::AtomCount {
            rep: rep.assign.len(),
            structure: a.len(),
        });
    }
    if rep.n != t.n() {
        return Err(RaError::IndexMismatch {
            rep: rep.n,
            table: t.n(),
        });
    }
    Ok(())
}

/// Checks the partition and converse invariants, then for every ordered pair
/// `(x, y)` that `ρ(x);ρ(y)` is exactly the union of `ρ(z)` over the allowed
/// `z`, with 0 present iff `y = x̆`.
pub fn verify(
    a: &AtomStructure,
    rep: &Representation,
    t: &SumClassTable,
) -> Result<VerifyReport, RaError> {
    check_shapes(a, rep, t)?;
    let mut failures = rep.invariant_failures(a);
    let order = a.by_name();
    let mut pairs = Vec::with_capacity(a.len() * a.len());
    for &x in &order {
        for &y in &order {
            pairs.push((x, y));
            let (got, zero) = sets_comp(&rep.assign[x], &rep.assign[y], t);
            let (atoms, identity) = a.expected_comp(x, y);
            let mut want = ClassSet::empty(rep.n);
            for z in atoms {
                want.union_with(&rep.assign[z]);
            }
            if got != want {
                let missing =
                    ClassSet::from_classes(rep.n, want.iter().filter(|&c| !got.contains(c)));
                let extra =
                    ClassSet::from_classes(rep.n, got.iter().filter(|&c| !want.contains(c)));
                failures.push(Failure::Composition {
                    x,
                    y,
                    missing,
                    extra,
                });
            }
            if zero != identity {
                failures.push(Failure::Identity {
                    x,
                    y,
                    expected: identity,
                });
            }
        }
    }
    Ok(VerifyReport { pairs, failures })
}

/// [`verify`] plus an explicit check on field elements: for each pair
/// `(x, y)` and each class `c` of each atom `z`, take the least `w ∈ X_c` and
/// look for `u ∈ ρ(x)` with `w - u ∈ ρ(y)`, i.e. a triangle `(w, w-u, 0)`.
/// Such a `u` must exist exactly when `z ≤ x;y`.
pub fn verify_paranoid(
    a: &AtomStructure,
    rep: &Representation,
    cs: &CosetSystem,
) -> Result<VerifyReport, RaError> {
    let t = cs.sum_class_table();
    let mut report = verify(a, rep, &t)?;
    let p = cs.p();
    let members: Vec<Vec<u64>> = rep
        .assign
        .iter()
        .map(|set| set.iter().flat_map(|c| cs.coset(c)).collect())
        .collect();
    for &(x, y) in &report.pairs.clone() {
        for z in 0..a.len() {
            let expected = !a.is_forbidden(x, y, z);
            for c in rep.assign[z].iter() {
                let w = cs.coset(c)[0];
                let found = members[x].iter().any(|&u| {
                    let d = (w + p - u) % p;
                    d != 0 && rep.assign[y].contains(cs.class(d))
                });
                if found != expected {
                    report.failures.push(Failure::Explicit {
                        x,
                        y,
                        z,
                        class: c,
                        expected,
                    });
                }
            }
        }
        let identity = y == a.converse(x);
        let found = members[x]
            .iter()
            .any(|&u| rep.assign[y].contains(cs.class(p - u)));
        if found != identity {
            report.failures.push(Failure::Identity {
                x,
                y,
                expected: identity,
            });
        }
    }
    Ok(report)
}
