// Line-oriented representation files:
//
//   modulus <p>
//   index <n>
//   atom <name> <class>...
//   converse <name> <name>
//   forbid <name> <name> <name>
//
// Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::{AtomStructure, RaError, Representation};
use crate::classes::ClassSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomLine {
    pub name: String,
    pub classes: Vec<usize>,
    pub line: usize,
}

/// A syntactically valid file whose semantics have not been checked yet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepFile {
    pub modulus: Option<u64>,
    pub index: Option<usize>,
    pub atoms: Vec<AtomLine>,
    pub converses: Vec<(String, String, usize)>,
    pub forbids: Vec<([String; 3], usize)>,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, msg: impl Into<String>) -> RaError {
    RaError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Tokenizes and checks arities; does not resolve names.
pub fn parse_rep_text(text: &str) -> Result<RepFile, RaError> {
    let mut file = RepFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let name = |s: &str| {
            if is_ident(s) {
                Ok(s.to_string())
            } else {
                Err(syntax(line, format!("`{s}` is not a valid atom name")))
            }
        };
        let number = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| syntax(line, format!("`{s}` is not a nonnegative integer")))
        };
        let arity = |want: usize| {
            if toks.len() == want + 1 {
                Ok(())
            } else {
                Err(syntax(
                    line,
                    format!(
                        "`{}` takes {want} argument(s), got {}",
                        toks[0],
                        toks.len() - 1
                    ),
                ))
            }
        };
        match toks[0] {
            "modulus" => {
                arity(1)?;
                if file.modulus.replace(number(toks[1])?).is_some() {
                    return Err(syntax(line, "duplicate `modulus` line"));
                }
            }
            "index" => {
                arity(1)?;
                if file.index.replace(number(toks[1])? as usize).is_some() {
                    return Err(syntax(line, "duplicate `index` line"));
                }
            }
            "atom" => {
                if toks.len() < 2 {
                    return Err(syntax(line, "`atom` needs a name"));
                }
                let classes = toks[2..]
                    .iter()
                    .map(|t| number(t).map(|c| c as usize))
                    .collect::<Result<Vec<_>, _>>()?;
                file.atoms.push(AtomLine {
                    name: name(toks[1])?,
                    classes,
                    line,
                });
            }
            "converse" => {
                arity(2)?;
                file.converses.push((name(toks[1])?, name(toks[2])?, line));
            }
            "forbid" => {
                arity(3)?;
                file.forbids
                    .push(([name(toks[1])?, name(toks[2])?, name(toks[3])?], line));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(file)
}

impl RepFile {
    /// Resolves atoms, converses and forbidden cycles.
    pub fn structure(&self) -> Result<AtomStructure, RaError> {
        let mut names: Vec<String> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            if names.contains(&a.name) {
                return Err(RaError::DuplicateAtom(a.name.clone()));
            }
            names.push(a.name.clone());
        }
        let idx = |s: &str, line: usize| {
            names
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| syntax(line, format!("unknown atom `{s}`")))
        };
        let mut conv = vec![usize::MAX; names.len()];
        for (a, b, line) in &self.converses {
            let (x, y) = (idx(a, *line)?, idx(b, *line)?);
            for z in [x, y] {
                if conv[z] != usize::MAX {
                    return Err(RaError::ConflictingConverse(names[z].clone()));
                }
            }
            conv[x] = y;
            conv[y] = x;
        }
        if let Some(i) = conv.iter().position(|&c| c == usize::MAX) {
            return Err(RaError::MissingConverse(names[i].clone()));
        }
        let triples = self
            .forbids
            .iter()
            .map(|([x, y, z], line)| Ok((idx(x, *line)?, idx(y, *line)?, idx(z, *line)?)))
            .collect::<Result<Vec<_>, RaError>>()?;
        AtomStructure::new(names, conv, triples)
    }

    /// Class assignment in atom order. Partition and converse invariants are
    /// left for [`super::verify`] or [`Representation::validate`].
    pub fn representation(&self) -> Result<Representation, RaError> {
        let p = self.modulus.ok_or(RaError::MissingDirective("modulus"))?;
        let n = self.index.ok_or(RaError::MissingDirective("index"))?;
        if n == 0 {
            return Err(RaError::Invariant("index must be positive".into()));
        }
        if p < 3 {
            return Err(RaError::Invariant(format!("modulus {p} is too small")));
        }
        let mut assign = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let mut set = ClassSet::empty(n);
            for &c in &a.classes {
                if c >= n {
                    return Err(RaError::ClassRange {
                        line: a.line,
                        class: c,
                        n,
                    });
                }
                if set.contains(c) {
                    return Err(RaError::Invariant(format!("class {c} assigned twice")));
                }
                set.insert(c);
            }
            assign.push(set);
        }
        Ok(Representation::new(p, n, assign))
    }
}

/// Parses and validates every invariant: names resolve, converse is
/// declared for every atom, the class lists partition `0..n` and converse
/// images are rotations by the class of `-1`.
pub fn parse_rep_file(text: &str) -> Result<(AtomStructure, Representation), RaError> {
    let file = parse_rep_text(text)?;
    let structure = file.structure()?;
    let rep = file.representation()?;
    rep.validate(&structure)?;
    Ok((structure, rep))
}

/// Writes `a` and `rep` back in the file format. Forbidden cycles are written
/// closed.
pub fn render_rep_file(a: &AtomStructure, rep: &Representation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modulus {}", rep.p);
    let _ = writeln!(out, "index {}", rep.n);
    for (x, set) in rep.assign.iter().enumerate() {
        let _ = write!(out, "atom {}", a.name(x));
        for c in set.iter() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    for x in 0..a.len() {
        let y = a.converse(x);
        if x <= y {
            let _ = writeln!(out, "converse {} {}", a.name(x), a.name(y));
        }
    }
    for &(x, y, z) in a.forbidden() {
        let _ = writeln!(out, "forbid {} {} {}", a.name(x), a.name(y), a.name(z));
    }
    out
}
