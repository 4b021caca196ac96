//! Binder-name-independent encoding of λ-terms.
//!
//! Bound variables become binding depths (0 = innermost enclosing binder);
//! free variables keep their names. Two terms are α-equivalent exactly when
//! their encodings are equal, so this is the state identity used by the
//! chain solver and by distributions.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Name, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalTerm {
    Bound(u32),
    Free(Name),
    Abs(Box<CanonicalTerm>),
    App(Box<CanonicalTerm>, Box<CanonicalTerm>),
}

impl Term {
    pub fn canonicalize(&self) -> CanonicalTerm {
        let mut scope = Vec::new();
        encode(self, &mut scope)
    }
}

fn encode(t: &Term, scope: &mut Vec<Name>) -> CanonicalTerm {
    match t {
        Term::Var(x) => match scope.iter().rev().position(|b| b == x) {
            Some(depth) => CanonicalTerm::Bound(depth as u32),
            None => CanonicalTerm::Free(x.clone()),
        },
        Term::Abs(x, b) => {
            scope.push(x.clone());
            let body = encode(b, scope);
            scope.pop();
            CanonicalTerm::Abs(Box::new(body))
        }
        Term::App(f, a) => CanonicalTerm::App(Box::new(encode(f, scope)), Box::new(encode(a, scope))),
    }
}

const BINDER_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

impl CanonicalTerm {
    /// A representative named term. The binder at nesting depth `d` gets the
    /// `d`-th name of `x, y, z, u, v, w, x6, x7, ...` that is not a free
    /// variable of the term, so distinct nesting levels never clash.
    pub fn to_term(&self) -> Term {
        let free = self.free_names();
        let mut names = Vec::new();
        decode(self, &free, &mut names)
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            CanonicalTerm::Bound(_) => {}
            CanonicalTerm::Free(x) => {
                out.insert(x.clone());
            }
            CanonicalTerm::Abs(b) => b.collect_free(out),
            CanonicalTerm::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    pub fn is_normal_form(&self) -> bool {
        match self {
            CanonicalTerm::Bound(_) | CanonicalTerm::Free(_) => true,
            CanonicalTerm::Abs(b) => b.is_normal_form(),
            CanonicalTerm::App(f, a) => {
                !matches!(**f, CanonicalTerm::Abs(_)) && f.is_normal_form() && a.is_normal_form()
            }
        }
    }
}

fn binder_name(depth: usize, free: &BTreeSet<Name>) -> Name {
    BINDER_NAMES
        .iter()
        .map(|s| Name::new(s))
        .chain((BINDER_NAMES.len()..).map(|k| Name::new(&format!("x{k}"))))
        .filter(|n| !free.contains(n))
        .nth(depth)
        .expect("infinite name supply")
}

fn decode(c: &CanonicalTerm, free: &BTreeSet<Name>, names: &mut Vec<Name>) -> Term {
    match c {
        CanonicalTerm::Bound(i) => Term::Var(names[names.len() - 1 - *i as usize].clone()),
        CanonicalTerm::Free(x) => Term::Var(x.clone()),
        CanonicalTerm::Abs(b) => {
            let x = binder_name(names.len(), free);
            names.push(x.clone());
            let body = decode(b, free, names);
            names.pop();
            Term::Abs(x, Box::new(body))
        }
        CanonicalTerm::App(f, a) => Term::app(decode(f, free, names), decode(a, free, names)),
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

impl fmt::Debug for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_term())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn c(s: &str) -> CanonicalTerm {
        parse(s).unwrap().canonicalize()
    }

    #[test]
    fn alpha_variants_coincide() {
        assert_eq!(c(r"\x.x"), c(r"\y.y"));
        assert_ne!(c(r"\x.x y"), c(r"\x.x z"));
        assert_ne!(c(r"\x.\y.x"), c(r"\y.\x.x"));
    }

    #[test]
    fn encoding_is_deterministic() {
        let a = c(r"(\x.x x)(\x.x x)");
        let b = c(r"(\x.x x)(\x.x x)");
        assert_eq!(a, b);
        assert_eq!(format!("{a}"), r"(\x.x x) (\x.x x)");
    }

    #[test]
    fn decoding_avoids_free_names() {
        let t = parse(r"\a.x a (\b.y b a)").unwrap();
        let back = t.canonicalize().to_term();
        assert!(back.alpha_eq(&t));
        assert_eq!(back.to_string(), r"\z.x z (\u.y u z)");
    }
}
