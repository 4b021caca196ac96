//! Named λ-terms, redex addressing and capture-avoiding substitution.

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::TermError;

/// A variable identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// An untyped λ-term with named binders.
///
/// Structural equality (`==`) is sensitive to binder names; use
/// [`Term::alpha_eq`] or [`Term::canonicalize`] for α-equivalence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Abs(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
}

/// One step of a root-to-node address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    IntoBody,
    IntoFunction,
    IntoArgument,
}

/// Address of a redex inside a term. The empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RedexPath(pub Vec<Step>);

impl RedexPath {
    pub fn root() -> Self {
        RedexPath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }
}

impl fmt::Display for RedexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(match s {
                Step::IntoBody => "body",
                Step::IntoFunction => "fun",
                Step::IntoArgument => "arg",
            })?;
        }
        Ok(())
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Name::new(name))
    }

    pub fn abs(binder: &str, body: Term) -> Term {
        Term::Abs(Name::new(binder), Box::new(body))
    }

    pub fn app(function: Term, argument: Term) -> Term {
        Term::App(Box::new(function), Box::new(argument))
    }

    /// Left-nested application `head a1 a2 ...`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Number of nodes: variables, abstractions and applications each count one.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn is_redex(&self) -> bool {
        matches!(self, Term::App(f, _) if matches!(**f, Term::Abs(..)))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free_in(&self, x: &str) -> bool {
        self.free_occurrences(x) > 0
    }

    /// Number of free occurrences of `x`.
    pub fn free_occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(y.as_str() == x),
            Term::Abs(y, _) if y.as_str() == x => 0,
            Term::Abs(_, b) => b.free_occurrences(x),
            Term::App(f, a) => f.free_occurrences(x) + a.free_occurrences(x),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Capture-avoiding substitution `self{arg/x}`.
    pub fn substitute(&self, x: &str, arg: &Term) -> Term {
        let arg_fv = arg.free_vars();
        subst(self, x, arg, &arg_fv)
    }

    pub fn subterm(&self, path: &RedexPath) -> Option<&Term> {
        let mut cur = self;
        for step in path.steps() {
            cur = match (step, cur) {
                (Step::IntoBody, Term::Abs(_, b)) => b,
                (Step::IntoFunction, Term::App(f, _)) => f,
                (Step::IntoArgument, Term::App(_, a)) => a,
                _ => return None,
            };
        }
        Some(cur)
    }

    fn redex_at(&self, path: &RedexPath) -> Result<(&Name, &Term, &Term), TermError> {
        match self.subterm(path) {
            Some(Term::App(f, a)) => match &**f {
                Term::Abs(x, body) => Ok((x, body, a)),
                _ => Err(TermError::InvalidPath(path.clone())),
            },
            _ => Err(TermError::InvalidPath(path.clone())),
        }
    }

    /// All β-redexes in pre-order: node, then function subtree, then argument
    /// subtree. This is left-to-right order of redex beginnings in the
    /// rendered term, so the first entry is the leftmost-outermost redex and
    /// the last the rightmost-innermost.
    pub fn redexes(&self) -> Vec<RedexPath> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_redexes(self, &mut path, &mut out);
        out
    }

    pub fn leftmost_redex(&self) -> Option<RedexPath> {
        let mut path = Vec::new();
        find_leftmost(self, &mut path).then(|| RedexPath(path))
    }

    pub fn rightmost_redex(&self) -> Option<RedexPath> {
        let mut path = Vec::new();
        find_rightmost(self, &mut path).then(|| RedexPath(path))
    }

    pub fn is_normal_form(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, b) => b.is_normal_form(),
            Term::App(f, a) => {
                !matches!(**f, Term::Abs(..)) && f.is_normal_form() && a.is_normal_form()
            }
        }
    }

    /// Contracts the redex at `path`.
    pub fn reduce_at(&self, path: &RedexPath) -> Result<Term, TermError> {
        // validate first so the rebuild below cannot fail half-way
        self.redex_at(path)?;
        Ok(rebuild(self, path.steps()))
    }

    /// Whether the redex at `path` has a normal-form argument (a β-ANF step).
    pub fn is_anf_redex(&self, path: &RedexPath) -> Result<bool, TermError> {
        let (_, _, arg) = self.redex_at(path)?;
        Ok(arg.is_normal_form())
    }

    /// Free occurrences of the redex binder in the redex body.
    pub fn multiplicity(&self, path: &RedexPath) -> Result<usize, TermError> {
        let (x, body, _) = self.redex_at(path)?;
        Ok(body.free_occurrences(x.as_str()))
    }

    /// Every binder occurs free in its body (no erasure).
    pub fn is_lambda_i(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(x, b) => b.is_free_in(x.as_str()) && b.is_lambda_i(),
            Term::App(f, a) => f.is_lambda_i() && a.is_lambda_i(),
        }
    }

    /// Every binder occurs free at most once in its body (no duplication).
    pub fn is_lambda_a(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(x, b) => b.free_occurrences(x.as_str()) <= 1 && b.is_lambda_a(),
            Term::App(f, a) => f.is_lambda_a() && a.is_lambda_a(),
        }
    }

    pub fn sub_calculus(&self) -> SubCalculusTag {
        match (self.is_lambda_i(), self.is_lambda_a()) {
            (true, true) => SubCalculusTag::Both,
            (true, false) => SubCalculusTag::LambdaI,
            (false, true) => SubCalculusTag::LambdaA,
            (false, false) => SubCalculusTag::FullLambda,
        }
    }

    /// All one-step β-reducts, one per redex, in redex order (not deduplicated).
    pub fn beta_reducts(&self) -> Vec<Term> {
        self.redexes()
            .iter()
            .map(|p| rebuild(self, p.steps()))
            .collect()
    }
}

/// Sub-calculus membership of a term, or a generation filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubCalculusTag {
    FullLambda,
    LambdaI,
    LambdaA,
    Both,
}

impl SubCalculusTag {
    /// Whether a term with tag `self` satisfies the filter `filter`.
    pub fn satisfies(self, filter: SubCalculusTag) -> bool {
        match filter {
            SubCalculusTag::FullLambda => true,
            SubCalculusTag::LambdaI => matches!(self, SubCalculusTag::LambdaI | SubCalculusTag::Both),
            SubCalculusTag::LambdaA => matches!(self, SubCalculusTag::LambdaA | SubCalculusTag::Both),
            SubCalculusTag::Both => self == SubCalculusTag::Both,
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Abs(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
    }
}

fn subst(t: &Term, x: &str, arg: &Term, arg_fv: &BTreeSet<Name>) -> Term {
    match t {
        Term::Var(y) if y.as_str() == x => arg.clone(),
        Term::Var(_) => t.clone(),
        Term::App(f, a) => Term::app(subst(f, x, arg, arg_fv), subst(a, x, arg, arg_fv)),
        Term::Abs(y, _) if y.as_str() == x => t.clone(),
        Term::Abs(_, body) if !body.is_free_in(x) => t.clone(),
        Term::Abs(y, body) if arg_fv.contains(y.as_str()) => {
            let mut avoid = body.free_vars();
            avoid.extend(arg_fv.iter().cloned());
            avoid.insert(Name::new(x));
            let z = fresh_name(y, &avoid);
            let renamed = body.substitute(y.as_str(), &Term::Var(z.clone()));
            Term::Abs(z, Box::new(subst(&renamed, x, arg, arg_fv)))
        }
        Term::Abs(y, body) => Term::Abs(y.clone(), Box::new(subst(body, x, arg, arg_fv))),
    }
}

/// First name of the form `<stem><k>`, k = 1, 2, ..., not in `avoid`.
fn fresh_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    let stem = base
        .as_str()
        .trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1u64..)
        .map(|k| Name::new(&format!("{stem}{k}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded counter")
}

fn collect_redexes(t: &Term, path: &mut Vec<Step>, out: &mut Vec<RedexPath>) {
    if t.is_redex() {
        out.push(RedexPath(path.clone()));
    }
    match t {
        Term::Var(_) => {}
        Term::Abs(_, b) => {
            path.push(Step::IntoBody);
            collect_redexes(b, path, out);
            path.pop();
        }
        Term::App(f, a) => {
            path.push(Step::IntoFunction);
            collect_redexes(f, path, out);
            path.pop();
            path.push(Step::IntoArgument);
            collect_redexes(a, path, out);
            path.pop();
        }
    }
}

fn find_leftmost(t: &Term, path: &mut Vec<Step>) -> bool {
    if t.is_redex() {
        return true;
    }
    match t {
        Term::Var(_) => false,
        Term::Abs(_, b) => descend(b, Step::IntoBody, path, find_leftmost),
        Term::App(f, a) => {
            descend(f, Step::IntoFunction, path, find_leftmost)
                || descend(a, Step::IntoArgument, path, find_leftmost)
        }
    }
}

// reverse pre-order: argument, function, then the node itself
fn find_rightmost(t: &Term, path: &mut Vec<Step>) -> bool {
    match t {
        Term::Var(_) => false,
        Term::Abs(_, b) => descend(b, Step::IntoBody, path, find_rightmost),
        Term::App(f, a) => {
            descend(a, Step::IntoArgument, path, find_rightmost)
                || descend(f, Step::IntoFunction, path, find_rightmost)
                || t.is_redex()
        }
    }
}

fn descend(
    t: &Term,
    step: Step,
    path: &mut Vec<Step>,
    search: fn(&Term, &mut Vec<Step>) -> bool,
) -> bool {
    path.push(step);
    if search(t, path) {
        return true;
    }
    path.pop();
    false
}

// Caller guarantees `steps` addresses a redex.
fn rebuild(t: &Term, steps: &[Step]) -> Term {
    match (steps.split_first(), t) {
        (None, Term::App(f, a)) => match &**f {
            Term::Abs(x, body) => body.substitute(x.as_str(), a),
            _ => unreachable!("path validated as a redex"),
        },
        (Some((Step::IntoBody, rest)), Term::Abs(x, b)) => {
            Term::Abs(x.clone(), Box::new(rebuild(b, rest)))
        }
        (Some((Step::IntoFunction, rest)), Term::App(f, a)) => {
            Term::App(Box::new(rebuild(f, rest)), a.clone())
        }
        (Some((Step::IntoArgument, rest)), Term::App(f, a)) => {
            Term::App(f.clone(), Box::new(rebuild(a, rest)))
        }
        _ => unreachable!("path validated as a redex"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Abs(x, b) => write!(f, "\\{x}.{b}"),
            Term::App(fun, arg) => {
                match **fun {
                    Term::Abs(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    Term::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}
