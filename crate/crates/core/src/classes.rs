//! Fixed-width sets of coset classes `{0, .., n-1}`.

use std::fmt;

/// A subset of `Z_n`, stored as a bit mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ClassSet {
    n: usize,
    words: Vec<u64>,
}

impl ClassSet {
    pub fn empty(n: usize) -> Self {
        ClassSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// All of `Z_n`.
    pub fn full(n: usize) -> Self {
        let mut s = ClassSet {
            n,
            words: vec![u64::MAX; n.div_ceil(64)],
        };
        s.trim();
        s
    }

    pub fn from_classes<I: IntoIterator<Item = usize>>(n: usize, classes: I) -> Self {
        let mut s = ClassSet::empty(n);
        for c in classes {
            s.insert(c);
        }
        s
    }

    fn trim(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// The modulus `n`.
    pub fn width(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, c: usize) {
        assert!(c < self.n, "class {c} out of range for n = {}", self.n);
        self.words[c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn remove(&mut self, c: usize) {
        if c < self.n {
            self.words[c / 64] &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn contains(&self, c: usize) -> bool {
        c < self.n && self.words[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn union_with(&mut self, other: &ClassSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &ClassSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// `{ (c + by) mod n : c in self }`.
    pub fn rotated(&self, by: usize) -> ClassSet {
        let mut out = ClassSet::empty(self.n);
        self.rotate_into(by, &mut out);
        out
    }

    /// Overwrites `out` (of the same width) with `self` rotated by `by`.
    pub fn rotate_into(&self, by: usize, out: &mut ClassSet) {
        assert_eq!(self.n, out.n, "width mismatch");
        let by = by % self.n.max(1);
        if by == 0 {
            out.words.copy_from_slice(&self.words);
            return;
        }
        // c -> c + by for c < n - by, c -> c + by - n otherwise
        out.clear();
        let len = self.words.len();
        let (ws, bs) = (by / 64, by % 64);
        for i in ws..len {
            out.words[i] |= self.words[i - ws] << bs;
            if bs > 0 && i > ws {
                out.words[i] |= self.words[i - ws - 1] >> (64 - bs);
            }
        }
        let back = self.n - by;
        let (ws, bs) = (back / 64, back % 64);
        for i in 0..len - ws {
            out.words[i] |= self.words[i + ws] >> bs;
            if bs > 0 && i + ws + 1 < len {
                out.words[i] |= self.words[i + ws + 1] << (64 - bs);
            }
        }
        out.trim();
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    /// Smallest class on which the two sets differ, with the side holding it.
    pub fn first_difference(&self, other: &ClassSet) -> Option<(usize, bool)> {
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let x = a ^ b;
            if x != 0 {
                let c = i * 64 + x.trailing_zeros() as usize;
                return Some((c, self.contains(c)));
            }
        }
        None
    }

    /// Mask rendered as hexadecimal, most significant class first.
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for (i, w) in self.words.iter().rev().enumerate() {
            if i == 0 {
                s.push_str(&format!("{w:x}"));
            } else {
                s.push_str(&format!("{w:016x}"));
            }
        }
        format!("0x{s}")
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassSet(n={}, {})", self.n, self)
    }
}
