use super::{sets_comp, verify, AtomStructure, Representation};
use crate::classes::ClassSet;
use crate::cosets::SumClassTable;

/// First assignment of the atoms of `a` to unions of the cosets behind `t`
/// that verifies, or `None`.
///
/// Widths (the largest number of classes any atom receives) are tried in
/// ascending order up to `max_width`. Within a width the lowest free class is
/// given to each atom in declaration order, its converse taking the class
/// shifted by the class of `-1`. Branches that already realize a forbidden
/// cycle are cut.
pub fn embed(
    a: &AtomStructure,
    t: &SumClassTable,
    p: u64,
    max_width: usize,
) -> Option<Representation> {
    let n = t.n();
    if a.is_empty() {
        return None;
    }
    for width in 1..=max_width.min(n) {
        if width * a.len() < n {
            continue;
        }
        let mut search = Search {
            a,
            t,
            p,
            n,
            shift: t.neg_one_class(),
            width,
            assign: vec![ClassSet::empty(n); a.len()],
            counts: vec![0; a.len()],
            owner: vec![None; n],
        };
        if let Some(rep) = search.run() {
            return Some(rep);
        }
    }
    None
}

struct Search<'a> {
    a: &'a AtomStructure,
    t: &'a SumClassTable,
    p: u64,
    n: usize,
    shift: usize,
    width: usize,
    assign: Vec<ClassSet>,
    counts: Vec<usize>,
    owner: Vec<Option<usize>>,
}

impl Search<'_> {
    fn run(&mut self) -> Option<Representation> {
        let Some(c) = self.owner.iter().position(Option::is_none) else {
            return self.finish();
        };
        let partner_class = (c + self.shift) % self.n;
        for x in 0..self.a.len() {
            let y = self.a.converse(x);
            let mut moves = vec![(c, x)];
            if partner_class != c {
                if self.owner[partner_class].is_some() {
                    continue;
                }
                moves.push((partner_class, y));
            } else if x != y {
                continue;
            }
            if moves.iter().any(|&(_, atom)| {
                self.counts[atom] + moves.iter().filter(|&&(_, b)| b == atom).count() > self.width
            }) {
                continue;
            }
            for &(cl, atom) in &moves {
                self.owner[cl] = Some(atom);
                self.assign[atom].insert(cl);
                self.counts[atom] += 1;
            }
            if self.feasible() {
                if let Some(rep) = self.run() {
                    return Some(rep);
                }
            }
            for &(cl, atom) in &moves {
                self.owner[cl] = None;
                self.assign[atom].remove(cl);
                self.counts[atom] -= 1;
            }
        }
        None
    }

    fn feasible(&self) -> bool {
        let free = self.owner.iter().filter(|o| o.is_none()).count();
        let empty = self.counts.iter().filter(|&&k| k == 0).count();
        if empty > free {
            return false;
        }
        // images only grow, so a realized forbidden cycle stays realized
        self.a.forbidden().iter().all(|&(x, y, z)| {
            if self.counts[x] == 0 || self.counts[y] == 0 || self.counts[z] == 0 {
                return true;
            }
            !sets_comp(&self.assign[x], &self.assign[y], self.t)
                .0
                .intersects(&self.assign[z])
        })
    }

    fn finish(&self) -> Option<Representation> {
        if self.counts.contains(&0) {
            return None;
        }
        let rep = Representation::new(self.p, self.n, self.assign.clone());
        match verify(self.a, &rep, self.t) {
            Ok(report) if report.pass() => Some(rep),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::{CosetMode, CosetSystem};

    fn table(p: u64, n: usize) -> SumClassTable {
        CosetSystem::for_prime(p, n, CosetMode::Any)
            .unwrap()
            .sum_class_table()
    }

    #[test]
    fn finds_a_33_37_assignment() {
        let a = AtomStructure::from_names(
            &["a", "r", "rc"],
            &[("a", "a"), ("r", "rc")],
            &[("r", "r", "rc")],
        )
        .unwrap();
        let t = table(29, 4);
        let rep = embed(&a, &t, 29, 4).unwrap();
        // class 0 goes to `a` first; the result is the hand-written one rotated by g
        assert_eq!(rep.assign[0], ClassSet::from_classes(4, [0, 2]));
        assert_eq!(rep.assign[1], ClassSet::from_classes(4, [1]));
        assert_eq!(rep.assign[2], ClassSet::from_classes(4, [3]));
        assert!(verify(&a, &rep, &t).unwrap().pass());
    }

    #[test]
    fn width_limit_is_respected() {
        let a =
            AtomStructure::from_names(&["r", "rc", "s", "sc"], &[("r", "rc"), ("s", "sc")], &[])
                .unwrap();
        // four atoms cannot cover eight classes one class each
        assert!(embed(&a, &table(233, 8), 233, 1).is_none());
    }

    #[test]
    fn no_asymmetric_atoms_without_a_shift() {
        // symmetric system: -1 ∈ X_0, so converse pairs cannot be separated
        let a = AtomStructure::from_names(&["r", "rc"], &[("r", "rc")], &[]).unwrap();
        assert!(embed(&a, &table(13, 2), 13, 2).is_none());
    }
}
