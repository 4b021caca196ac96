//! Named example terms and seeded random term generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TermError;
use crate::term::{Name, SubCalculusTag, Term};

/// `I = λx.x`
pub fn mk_i() -> Term {
    Term::abs("x", Term::var("x"))
}

/// `ω = λx.x x`
pub fn mk_omega() -> Term {
    Term::abs("x", Term::app(Term::var("x"), Term::var("x")))
}

/// `Ω = ω ω`
pub fn mk_big_omega() -> Term {
    Term::app(mk_omega(), mk_omega())
}

/// `C_n = λx.x x ... x` with `n` occurrences of `x`.
pub fn mk_cn(n: usize) -> Result<Term, TermError> {
    if n == 0 {
        return Err(TermError::InvalidArity(n));
    }
    let body = Term::apps(Term::var("x"), (1..n).map(|_| Term::var("x")));
    Ok(Term::abs("x", body))
}

/// `M_n = B T_n` with `B = λx.((λy.z) Ω) x` and `T_n = C_n ((λx.x) y)`.
pub fn mk_mn(n: usize) -> Result<Term, TermError> {
    let cn = mk_cn(n)?;
    let b = Term::abs(
        "x",
        Term::app(
            Term::app(Term::abs("y", Term::var("z")), mk_big_omega()),
            Term::var("x"),
        ),
    );
    let tn = Term::app(cn, Term::app(mk_i(), Term::var("y")));
    Ok(Term::app(b, tn))
}

/// `(λx.y) Ω`
pub fn mk_example1() -> Term {
    Term::app(Term::abs("x", Term::var("y")), mk_big_omega())
}

/// `(λx.x x) (I I)`
pub fn mk_example2() -> Term {
    Term::app(mk_omega(), Term::app(mk_i(), mk_i()))
}

/// Resolves the corpus names `I`, `omega`, `Omega`, `example1`, `example2`,
/// `Cn:<n>` and `Mn:<n>`. Returns `Ok(None)` for anything else.
pub fn named_term(name: &str) -> Result<Option<Term>, TermError> {
    let fixed = match name {
        "I" => Some(mk_i()),
        "omega" => Some(mk_omega()),
        "Omega" => Some(mk_big_omega()),
        "example1" => Some(mk_example1()),
        "example2" => Some(mk_example2()),
        _ => None,
    };
    if fixed.is_some() {
        return Ok(fixed);
    }
    let indexed = |prefix: &str| {
        name.strip_prefix(prefix)
            .and_then(|n| n.parse::<usize>().ok())
    };
    if let Some(n) = indexed("Cn:") {
        return mk_cn(n).map(Some);
    }
    if let Some(n) = indexed("Mn:") {
        return mk_mn(n).map(Some);
    }
    Ok(None)
}

const GENERATION_ATTEMPTS: usize = 64;
const FREE_NAMES: [&str; 3] = ["a", "b", "c"];
const BINDER_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// A random term with at most `max_size` nodes, deterministic in `seed`.
///
/// Membership in λI / λA is enforced while building: every abstraction in
/// λI mode carries an obligation to use its binder, which is threaded down
/// the tree together with a leaf-count feasibility check, and λA mode only
/// offers binders that have not been used yet.
pub fn random_term(seed: u64, max_size: usize, filter: SubCalculusTag) -> Result<Term, TermError> {
    if max_size == 0 {
        return Err(TermError::InvalidSize);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_ATTEMPTS {
        let lo = (max_size / 2).max(1);
        let size = rng.random_range(lo..=max_size);
        let mut g = Generator {
            rng: &mut rng,
            mode: filter,
            scope: Vec::new(),
        };
        let t = g.term(size, Vec::new(), false);
        if t.sub_calculus().satisfies(filter) && t.size() <= max_size {
            return Ok(t);
        }
    }
    Err(TermError::GenerationExhausted(GENERATION_ATTEMPTS))
}

struct Binder {
    name: Name,
    uses: usize,
}

struct Generator<'a> {
    rng: &'a mut ChaCha8Rng,
    mode: SubCalculusTag,
    scope: Vec<Binder>,
}

impl Generator<'_> {
    fn relevant(&self) -> bool {
        matches!(self.mode, SubCalculusTag::LambdaI | SubCalculusTag::Both)
    }

    /// Can a term of `size` nodes discharge `obligations` binder uses?
    ///
    /// A term with `a` abstractions has `(size - a + 1) / 2` leaves, `a` has
    /// the parity of `size + 1`, and in λI mode each abstraction needs a leaf
    /// of its own.
    fn feasible(&self, size: usize, obligations: usize) -> bool {
        if !self.relevant() {
            return size >= 1 && obligations == 0;
        }
        let min_abs = (size + 1) % 2;
        size + 1 >= 2 * obligations + 3 * min_abs
    }

    fn abs_feasible(&self, size: usize, obligations: usize) -> bool {
        size >= 2 && (!self.relevant() || self.feasible(size - 1, obligations + 1))
    }

    fn term(&mut self, size: usize, must: Vec<Name>, want_abs: bool) -> Term {
        if size == 1 {
            return self.leaf(must);
        }
        let k = must.len();
        let abs_ok = self.abs_feasible(size, k);
        let mut splits = Vec::new();
        if size >= 3 {
            for fun_size in 1..=size - 2 {
                let arg_size = size - 1 - fun_size;
                for k1 in 0..=k {
                    if self.feasible(fun_size, k1) && self.feasible(arg_size, k - k1) {
                        splits.push((fun_size, k1));
                    }
                }
            }
        }
        let choose_abs = abs_ok && (splits.is_empty() || want_abs || self.rng.random_bool(1.0 / 3.0));
        if choose_abs {
            let depth = self.scope.len();
            let name = Name::new(
                &BINDER_NAMES
                    .get(depth)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("x{depth}")),
            );
            let mut body_must = must;
            if self.relevant() {
                body_must.push(name.clone());
            }
            self.scope.push(Binder {
                name: name.clone(),
                uses: 0,
            });
            let body = self.term(size - 1, body_must, false);
            self.scope.pop();
            return Term::Abs(name, Box::new(body));
        }
        // prefer splits whose function side can be an abstraction so that
        // redexes are common
        let head_abs: Vec<_> = splits
            .iter()
            .copied()
            .filter(|&(fs, k1)| self.abs_feasible(fs, k1))
            .collect();
        let want_head = !head_abs.is_empty() && self.rng.random_bool(0.6);
        let pool = if want_head { &head_abs } else { &splits };
        let (fun_size, k1) = pool[self.rng.random_range(0..pool.len())];
        let mut must = must;
        must.shuffle(self.rng);
        let arg_must = must.split_off(k1);
        let f = self.term(fun_size, must, want_head);
        let a = self.term(size - 1 - fun_size, arg_must, false);
        Term::app(f, a)
    }

    fn leaf(&mut self, must: Vec<Name>) -> Term {
        debug_assert!(must.len() <= 1);
        let name = match must.into_iter().next() {
            Some(name) => name,
            None => {
                let candidates: Vec<usize> = match self.mode {
                    // every binder's single use is owed to some obligation
                    SubCalculusTag::Both => Vec::new(),
                    SubCalculusTag::LambdaA => (0..self.scope.len())
                        .filter(|&i| self.scope[i].uses == 0)
                        .collect(),
                    _ => (0..self.scope.len()).collect(),
                };
                if !candidates.is_empty() && self.rng.random_bool(0.75) {
                    let i = candidates[self.rng.random_range(0..candidates.len())];
                    self.scope[i].name.clone()
                } else {
                    Name::new(FREE_NAMES[self.rng.random_range(0..FREE_NAMES.len())])
                }
            }
        };
        if let Some(b) = self.scope.iter_mut().rev().find(|b| b.name == name) {
            b.uses += 1;
        }
        Term::Var(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn named_terms() {
        assert_eq!(mk_cn(2).unwrap(), parse(r"\x.x x").unwrap());
        assert_eq!(mk_cn(1).unwrap(), mk_i());
        assert_eq!(mk_example1(), parse(r"(\x.y) ((\x.x x) (\x.x x))").unwrap());
        assert_eq!(
            mk_mn(2).unwrap(),
            parse(r"(\x.((\y.z) ((\x.x x) (\x.x x))) x) ((\x.x x) ((\x.x) y))").unwrap()
        );
        assert_eq!(mk_example2().to_string(), r"(\x.x x) ((\x.x) (\x.x))");
    }

    #[test]
    fn zero_arity_is_rejected() {
        assert_eq!(mk_cn(0), Err(TermError::InvalidArity(0)));
        assert_eq!(mk_mn(0), Err(TermError::InvalidArity(0)));
    }

    #[test]
    fn names_resolve() {
        assert_eq!(named_term("Mn:3").unwrap(), Some(mk_mn(3).unwrap()));
        assert_eq!(named_term("Omega").unwrap(), Some(mk_big_omega()));
        assert_eq!(named_term("x y").unwrap(), None);
        assert!(named_term("Cn:0").is_err());
    }

    #[test]
    fn random_terms_are_deterministic() {
        for seed in 0..20 {
            assert_eq!(
                random_term(seed, 12, SubCalculusTag::FullLambda).unwrap(),
                random_term(seed, 12, SubCalculusTag::FullLambda).unwrap()
            );
        }
    }

    #[test]
    fn random_terms_meet_filters_and_size() {
        for seed in 0..500 {
            for max in [1, 2, 3, 5, 8, 12, 20] {
                let i = random_term(seed, max, SubCalculusTag::LambdaI).unwrap();
                assert!(i.is_lambda_i(), "{i}");
                assert!(i.size() <= max);
                let a = random_term(seed, max, SubCalculusTag::LambdaA).unwrap();
                assert!(a.is_lambda_a(), "{a}");
                assert!(a.size() <= max);
                let b = random_term(seed, max, SubCalculusTag::Both).unwrap();
                assert!(b.is_lambda_a() && b.is_lambda_i(), "{b}");
                assert!(random_term(seed, max, SubCalculusTag::FullLambda).unwrap().size() <= max);
            }
        }
        assert_eq!(random_term(0, 0, SubCalculusTag::FullLambda), Err(TermError::InvalidSize));
    }

    #[test]
    fn random_corpus_contains_redexes() {
        let reducible = (0..200)
            .filter(|&s| !random_term(s, 12, SubCalculusTag::LambdaI).unwrap().is_normal_form())
            .count();
        assert!(reducible > 100, "only {reducible} reducible terms");
    }
}
