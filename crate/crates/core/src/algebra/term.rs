use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::cyl::CylAtomStructure;
use super::element::Element;
use crate::{AtomSet, Error, Result};

/// Terms over the cylindric/polyadic signature.
///
/// Text syntax: `0`, `1`, variables, `-t`, `t*u` (meet), `t+u` (join),
/// `d(i,j)`, `c(i,t)`, `s(i,j,t)` for `c_j(t · d_ij)` and `p(i,j,t)`.
/// Meet binds tighter than join.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Not(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Diag(usize, usize),
    Cyl(usize, Box<Term>),
    Sub(usize, usize, Box<Term>),
    Swap(usize, usize, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn negate(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn cyl(i: usize, t: Term) -> Term {
        Term::Cyl(i, Box::new(t))
    }

    pub fn sub(i: usize, j: usize, t: Term) -> Term {
        Term::Sub(i, j, Box::new(t))
    }

    pub fn swap(i: usize, j: usize, t: Term) -> Term {
        Term::Swap(i, j, Box::new(t))
    }

    /// `s(1,0,c(1,x)) * s(0,1,c(0,x))`, the three-dimensional term whose
    /// value on a singleton atom of a set algebra is the transposed atom.
    pub fn tau() -> Term {
        let x = Term::var("x");
        Term::meet(Term::sub(1, 0, Term::cyl(1, x.clone())), Term::sub(0, 1, Term::cyl(0, x)))
    }

    /// Transposition of coordinates 0 and 1 routed through the spare
    /// coordinate 3; needs dimension at least 4.
    pub fn tau4() -> Term {
        Term::sub(1, 3, Term::sub(0, 1, Term::sub(3, 0, Term::cyl(3, Term::var("x")))))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One | Term::Diag(..) => {}
            Term::Not(t) | Term::Cyl(_, t) | Term::Sub(_, _, t) | Term::Swap(_, _, t) => t.collect_vars(out),
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Bottom-up evaluation over explicit atom sets.
    pub fn eval(&self, s: &CylAtomStructure, env: &dyn Fn(&str) -> Option<AtomSet>) -> Result<AtomSet> {
        Ok(match self {
            Term::Zero => s.empty(),
            Term::One => s.unit(),
            Term::Var(v) => env(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
            Term::Not(t) => t.eval(s, env)?.complement(),
            Term::Meet(a, b) => a.eval(s, env)?.intersection(&b.eval(s, env)?),
            Term::Join(a, b) => a.eval(s, env)?.union(&b.eval(s, env)?),
            Term::Diag(i, j) => s.diagonal(*i, *j)?,
            Term::Cyl(i, t) => s.cylindrify(*i, &t.eval(s, env)?)?,
            Term::Sub(i, j, t) => s.substitute(*i, *j, &t.eval(s, env)?)?,
            Term::Swap(i, j, t) => s.swap(*i, *j, &t.eval(s, env)?)?,
        })
    }
}

/// Evaluates `t` in the complex algebra of `s` under `env`.
pub fn eval_term(s: &CylAtomStructure, t: &Term, env: &HashMap<String, Element>) -> Result<Element> {
    let mut sets = HashMap::with_capacity(env.len());
    for (k, v) in env {
        let x = v
            .as_explicit()
            .ok_or_else(|| Error::UnsupportedSymbolic("cylindric structures only take explicit elements".into()))?;
        sets.insert(k.as_str(), x.clone());
    }
    Ok(Element::Explicit(t.eval(s, &|v| sets.get(v).cloned())?))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Not(t) => write!(f, "-{t}"),
            Term::Meet(a, b) => write!(f, "({a}*{b})"),
            Term::Join(a, b) => write!(f, "({a}+{b})"),
            Term::Diag(i, j) => write!(f, "d({i},{j})"),
            Term::Cyl(i, t) => write!(f, "c({i},{t})"),
            Term::Sub(i, j, t) => write!(f, "s({i},{j},{t})"),
            Term::Swap(i, j, t) => write!(f, "p({i},{j},{t})"),
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(src: &str) -> Result<Term> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let t = p.join()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { line: 1, msg: format!("{msg} at column {}", self.pos + 1) }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn join(&mut self) -> Result<Term> {
        let mut t = self.meet()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            t = Term::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            t = Term::meet(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Term::negate(self.unary()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.join()?;
                self.expect(b')')?;
                Ok(t)
            }
            Some(c) if c.is_ascii_digit() => match self.number()? {
                0 => Ok(Term::Zero),
                1 => Ok(Term::One),
                _ => Err(self.error("only 0 and 1 are constants")),
            },
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.word(),
            _ => Err(self.error("expected a term")),
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected an index"))
    }

    fn word(&mut self) -> Result<Term> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let op = matches!(word, "c" | "s" | "p" | "d");
        if !op || self.peek() != Some(b'(') {
            return Ok(Term::var(word));
        }
        self.pos += 1;
        let i = self.number()?;
        self.expect(b',')?;
        let t = match word {
            "c" => Term::cyl(i, self.join()?),
            "d" => Term::Diag(i, self.number()?),
            _ => {
                let j = self.number()?;
                self.expect(b',')?;
                let body = self.join()?;
                if word == "s" {
                    Term::sub(i, j, body)
                } else {
                    Term::swap(i, j, body)
                }
            }
        };
        self.expect(b')')?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn env_x(x: AtomSet) -> HashMap<String, Element> {
        HashMap::from([("x".to_string(), Element::Explicit(x))])
    }

    #[test]
    fn parse_and_print() {
        let t: Term = "s(1,0,c(1,x)) * s(0,1,c(0,x))".parse().unwrap();
        assert_eq!(t, Term::tau());
        assert_eq!(t.to_string().parse::<Term>().unwrap(), t);
        let u: Term = "-x + y * d(0,1)".parse().unwrap();
        assert_eq!(u, Term::join(Term::negate(Term::var("x")), Term::meet(Term::var("y"), Term::Diag(0, 1))));
        assert_eq!("c".parse::<Term>().unwrap(), Term::var("c"));
    }

    #[test]
    fn parse_errors_have_columns() {
        let e = "c(0 x)".parse::<Term>().unwrap_err();
        assert!(e.to_string().contains("column"), "{e}");
        assert!("x +".parse::<Term>().is_err());
        assert!("2".parse::<Term>().is_err());
    }

    #[test]
    fn tau_fixes_unit_and_zero() {
        let s = CylAtomStructure::cartesian(3, 2).unwrap();
        let one = eval_term(&s, &Term::tau(), &env_x(s.unit())).unwrap();
        assert!(one.as_explicit().unwrap().is_full());
        let zero = eval_term(&s, &Term::tau(), &env_x(s.empty())).unwrap();
        assert!(zero.as_explicit().unwrap().is_empty());
    }

    #[test]
    fn tau_transposes_atoms_of_a_set_algebra() {
        let s = CylAtomStructure::cartesian(3, 3).unwrap();
        for a in 0..s.atom_count() {
            let got = Term::tau().eval(&s, &|_| Some(s.set(&[a]))).unwrap();
            assert_eq!(got, s.swap(0, 1, &s.set(&[a])).unwrap(), "atom {}", s.atom_name(a));
        }
    }

    #[test]
    fn tau4_is_the_swap_of_the_freed_atom() {
        let s = CylAtomStructure::cartesian(4, 2).unwrap();
        for a in 0..s.atom_count() {
            let x = s.set(&[a]);
            let got = Term::tau4().eval(&s, &|_| Some(x.clone())).unwrap();
            let want = s.swap(0, 1, &s.cylindrify(3, &x).unwrap()).unwrap();
            assert_eq!(got, want, "atom {}", s.atom_name(a));
            // below tau on elements that do not depend on coordinate 3
            let free = s.cylindrify(3, &x).unwrap();
            let tau = Term::tau().eval(&s, &|_| Some(free.clone())).unwrap();
            let tau4 = Term::tau4().eval(&s, &|_| Some(free.clone())).unwrap();
            assert!(tau4.is_subset(&tau));
        }
    }

    #[test]
    fn unbound_and_overflow() {
        let s = CylAtomStructure::cartesian(3, 2).unwrap();
        let e = eval_term(&s, &Term::tau(), &HashMap::new()).unwrap_err();
        assert!(matches!(e, Error::UnboundVariable(v) if v == "x"));
        let e = eval_term(&s, &Term::tau4(), &env_x(s.unit())).unwrap_err();
        assert!(matches!(e, Error::Index { index: 3, dim: 3 }));
    }

    fn term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Zero),
            Just(Term::One),
            Just(Term::var("x")),
            Just(Term::var("y")),
            (0..3usize, 0..3usize).prop_map(|(i, j)| Term::Diag(i, j)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::negate),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::join(a, b)),
                (0..3usize, inner.clone()).prop_map(|(i, t)| Term::cyl(i, t)),
                (0..3usize, 0..3usize, inner.clone()).prop_map(|(i, j, t)| Term::sub(i, j, t)),
                (0..3usize, 0..3usize, inner).prop_map(|(i, j, t)| Term::swap(i, j, t)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(t in term()) {
            prop_assert_eq!(t.to_string().parse::<Term>().unwrap(), t);
        }

        #[test]
        fn evaluation_is_compositional(t in term(), xm in 0u64..256, ym in 0u64..256) {
            let s = CylAtomStructure::cartesian(3, 2).unwrap();
            let (x, y) = (AtomSet::from_mask(8, xm), AtomSet::from_mask(8, ym));
            let env = |v: &str| match v { "x" => Some(x.clone()), "y" => Some(y.clone()), _ => None };
            let whole = t.eval(&s, &env).unwrap();
            // replace each immediate subterm by a variable bound to its value
            let folded = match &t {
                Term::Not(a) => {
                    let va = a.eval(&s, &env).unwrap();
                    Term::negate(Term::var("a")).eval(&s, &|v| (v == "a").then(|| va.clone())).unwrap()
                }
                Term::Meet(a, b) | Term::Join(a, b) => {
                    let (va, vb) = (a.eval(&s, &env).unwrap(), b.eval(&s, &env).unwrap());
                    let shell = if matches!(t, Term::Meet(..)) {
                        Term::meet(Term::var("a"), Term::var("b"))
                    } else {
                        Term::join(Term::var("a"), Term::var("b"))
                    };
                    shell.eval(&s, &|v| match v { "a" => Some(va.clone()), "b" => Some(vb.clone()), _ => None }).unwrap()
                }
                Term::Cyl(i, a) => s.cylindrify(*i, &a.eval(&s, &env).unwrap()).unwrap(),
                Term::Sub(i, j, a) => s.substitute(*i, *j, &a.eval(&s, &env).unwrap()).unwrap(),
                Term::Swap(i, j, a) => s.swap(*i, *j, &a.eval(&s, &env).unwrap()).unwrap(),
                _ => whole.clone(),
            };
            prop_assert_eq!(whole, folded);
        }
    }
}
