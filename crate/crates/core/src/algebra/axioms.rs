use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cyl::CylAtomStructure;
use crate::{AtomSet, Parallelism, ValidationReport};

/// Controls how [`check_ca_axioms`] picks elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomBudget {
    /// Up to this many atoms every subset (and every pair of subsets) is checked.
    pub exhaustive_cap: usize,
    /// Random subsets checked on larger structures, in addition to the
    /// atom-level pass.
    pub samples: usize,
    pub seed: u64,
    pub parallelism: Parallelism,
}

impl Default for AxiomBudget {
    fn default() -> Self {
        AxiomBudget { exhaustive_cap: 12, samples: 64, seed: 0, parallelism: Parallelism::default() }
    }
}

const NORMAL: &str = "cyl-normal";
const EXTENSIVE: &str = "cyl-extensive";
const QUASI_ADDITIVE: &str = "cyl-quasi-additive";
const COMMUTE: &str = "cyl-commute";
const IDEMPOTENT: &str = "cyl-idempotent";
const DIAG_UNIT: &str = "diag-unit";
const DIAG_THROUGH: &str = "diag-through";
const DIAG_SEPARATE: &str = "diag-separation";
const SWAP_ENDO: &str = "swap-endomorphism";
const SWAP_INVOLUTION: &str = "swap-involution";
const SWAP_CYCLE: &str = "swap-cycle";
const SWAP_SUBST: &str = "swap-substitution";

/// Complex-algebra operations on some representation of elements.
trait Ops: Sync {
    type V: Clone + PartialEq + Send + Sync;
    fn dim(&self) -> usize;
    fn has_swap(&self) -> bool;
    fn zero(&self) -> Self::V;
    fn unit(&self) -> Self::V;
    fn d(&self, i: usize, j: usize) -> Self::V;
    fn c(&self, i: usize, x: &Self::V) -> Self::V;
    fn p(&self, i: usize, j: usize, x: &Self::V) -> Self::V;
    fn meet(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn not(&self, x: &Self::V) -> Self::V;
    fn le(&self, x: &Self::V, y: &Self::V) -> bool;
    fn show(&self, x: &Self::V) -> String;

    fn s(&self, i: usize, j: usize, x: &Self::V) -> Self::V {
        if i == j {
            return x.clone();
        }
        self.c(j, &self.meet(x, &self.d(i, j)))
    }
}

struct SetOps<'a>(&'a CylAtomStructure);

impl Ops for SetOps<'_> {
    type V = AtomSet;
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn has_swap(&self) -> bool {
        self.0.has_swap()
    }
    fn zero(&self) -> AtomSet {
        self.0.empty()
    }
    fn unit(&self) -> AtomSet {
        self.0.unit()
    }
    fn d(&self, i: usize, j: usize) -> AtomSet {
        self.0.diag_set(i, j).clone()
    }
    fn c(&self, i: usize, x: &AtomSet) -> AtomSet {
        self.0.cylindrify(i, x).expect("index in range")
    }
    fn p(&self, i: usize, j: usize, x: &AtomSet) -> AtomSet {
        self.0.swap(i, j, x).expect("swap present")
    }
    fn meet(&self, x: &AtomSet, y: &AtomSet) -> AtomSet {
        x.intersection(y)
    }
    fn not(&self, x: &AtomSet) -> AtomSet {
        x.complement()
    }
    fn le(&self, x: &AtomSet, y: &AtomSet) -> bool {
        x.is_subset(y)
    }
    fn show(&self, x: &AtomSet) -> String {
        let names: Vec<_> = x.iter().map(|a| self.0.atom_name(a)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Unary operators compiled to lookup tables over bitmasks.
struct MaskOps<'a> {
    s: &'a CylAtomStructure,
    n: usize,
    cyl: Vec<Vec<u64>>,
    swap: Vec<Vec<u64>>,
}

impl<'a> MaskOps<'a> {
    fn new(s: &'a CylAtomStructure) -> Self {
        let n = s.atom_count();
        let dim = s.dim();
        let table = |row: &dyn Fn(usize) -> u64| {
            let mut t = vec![0u64; 1 << n];
            for m in 1..1usize << n {
                let low = m.trailing_zeros() as usize;
                t[m] = t[m & (m - 1)] | row(low);
            }
            t
        };
        let cyl = (0..dim).map(|i| table(&|a| s.equiv_row(i, a).to_mask())).collect();
        let swap = if s.has_swap() {
            (0..dim * dim)
                .map(|ij| {
                    let (i, j) = (ij / dim, ij % dim);
                    if i == j {
                        (0..1u64 << n).collect()
                    } else {
                        table(&|a| s.swap_row(i, j, a).expect("swap present").to_mask())
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        MaskOps { s, n, cyl, swap }
    }
}

impl Ops for MaskOps<'_> {
    type V = u64;
    fn dim(&self) -> usize {
        self.s.dim()
    }
    fn has_swap(&self) -> bool {
        self.s.has_swap()
    }
    fn zero(&self) -> u64 {
        0
    }
    fn unit(&self) -> u64 {
        (1u64 << self.n) - 1
    }
    fn d(&self, i: usize, j: usize) -> u64 {
        self.s.diag_set(i, j).to_mask()
    }
    fn c(&self, i: usize, x: &u64) -> u64 {
        self.cyl[i][*x as usize]
    }
    fn p(&self, i: usize, j: usize, x: &u64) -> u64 {
        self.swap[i * self.s.dim() + j][*x as usize]
    }
    fn meet(&self, x: &u64, y: &u64) -> u64 {
        x & y
    }
    fn not(&self, x: &u64) -> u64 {
        !x & self.unit()
    }
    fn le(&self, x: &u64, y: &u64) -> bool {
        x & !y == 0
    }
    fn show(&self, x: &u64) -> String {
        SetOps(self.s).show(&AtomSet::from_mask(self.n, *x))
    }
}

type Found = Vec<(&'static str, String)>;

fn constant_axioms<O: Ops>(o: &O, out: &mut Found) {
    let dim = o.dim();
    for i in 0..dim {
        if o.c(i, &o.zero()) != o.zero() {
            out.push((NORMAL, format!("c{i}(0) = {}", o.show(&o.c(i, &o.zero())))));
        }
        if o.d(i, i) != o.unit() {
            out.push((DIAG_UNIT, format!("d{i}{i} = {}", o.show(&o.d(i, i)))));
        }
        for j in 0..dim {
            for k in (0..dim).filter(|&k| k != i && k != j) {
                let through = o.c(k, &o.meet(&o.d(i, k), &o.d(k, j)));
                if through != o.d(i, j) {
                    out.push((DIAG_THROUGH, format!("d{i}{j} != c{k}(d{i}{k}*d{k}{j}) = {}", o.show(&through))));
                }
            }
        }
    }
}

/// Every one-variable axiom at `x`.
fn unary_axioms<O: Ops>(o: &O, x: &O::V, out: &mut Found) {
    let dim = o.dim();
    for i in 0..dim {
        let cx = o.c(i, x);
        if !o.le(x, &cx) {
            out.push((EXTENSIVE, format!("x={} not below c{i}x", o.show(x))));
        }
        if o.c(i, &cx) != cx {
            out.push((IDEMPOTENT, format!("c{i}c{i}x != c{i}x at x={}", o.show(x))));
        }
        for j in 0..dim {
            if i != j && o.c(i, &o.c(j, x)) != o.c(j, &cx) {
                out.push((COMMUTE, format!("c{i}c{j}x != c{j}c{i}x at x={}", o.show(x))));
            }
            if i != j {
                let d = o.d(i, j);
                let both = o.meet(&o.c(i, &o.meet(&d, x)), &o.c(i, &o.meet(&d, &o.not(x))));
                if both != o.zero() {
                    out.push((
                        DIAG_SEPARATE,
                        format!("c{i}(d{i}{j}*x)*c{i}(d{i}{j}*-x) = {} at x={}", o.show(&both), o.show(x)),
                    ));
                }
            }
        }
    }
    if !o.has_swap() {
        return;
    }
    for i in 0..dim {
        for j in (0..dim).filter(|&j| j != i) {
            let px = o.p(i, j, x);
            if o.p(i, j, &o.not(x)) != o.not(&px) {
                out.push((SWAP_ENDO, format!("p{i}{j}(-x) != -p{i}{j}x at x={}", o.show(x))));
            }
            if o.p(i, j, &px) != *x {
                out.push((
                    SWAP_INVOLUTION,
                    format!("p{i}{j}p{i}{j}x = {} at x={}", o.show(&o.p(i, j, &px)), o.show(x)),
                ));
            }
            for k in (0..dim).filter(|&k| k != i && k != j) {
                if o.p(i, j, &o.p(i, k, x)) != o.p(j, k, &px) {
                    out.push((SWAP_CYCLE, format!("p{i}{j}p{i}{k}x != p{j}{k}p{i}{j}x at x={}", o.show(x))));
                }
            }
            if o.p(i, j, &o.s(i, j, x)) != o.s(j, i, x) {
                out.push((SWAP_SUBST, format!("p{i}{j}s({i},{j})x != s({j},{i})x at x={}", o.show(x))));
            }
        }
    }
}

fn binary_axioms<O: Ops>(o: &O, x: &O::V, y: &O::V, out: &mut Found) {
    for i in 0..o.dim() {
        let cx = o.c(i, x);
        let cy = o.c(i, y);
        if o.c(i, &o.meet(x, &cy)) != o.meet(&cx, &cy) {
            out.push((QUASI_ADDITIVE, format!("c{i}(x*c{i}y) != c{i}x*c{i}y at x={} y={}", o.show(x), o.show(y))));
        }
    }
}

fn clauses(s: &CylAtomStructure) -> Vec<&'static str> {
    let mut c = vec![NORMAL, EXTENSIVE, QUASI_ADDITIVE, COMMUTE, IDEMPOTENT, DIAG_UNIT, DIAG_THROUGH, DIAG_SEPARATE];
    if s.has_swap() {
        c.extend([SWAP_ENDO, SWAP_INVOLUTION, SWAP_CYCLE, SWAP_SUBST]);
    }
    c
}

/// Checks the cylindric axioms, idempotence of the cylindrifiers and, when
/// swap relations are present, the four polyadic clauses (`p_ij` is a
/// Boolean endomorphism, an involution, `p_ij p_ik = p_jk p_ij` for
/// distinct indices, `p_ij s(i,j) = s(j,i)`).
///
/// Up to `budget.exhaustive_cap` atoms every element and every pair is
/// checked. Larger structures get an atom-level pass, which decides every
/// clause: the clauses are completely additive in each variable except
/// `diag-separation` and `swap-endomorphism`, and those fail somewhere iff
/// they fail at a singleton. A seeded random sample of subsets is checked on
/// top.
pub fn check_ca_axioms(s: &CylAtomStructure, budget: AxiomBudget) -> ValidationReport {
    let n = s.atom_count();
    let par = budget.parallelism;
    let mut found = Found::new();
    let exhaustive = n <= budget.exhaustive_cap && n <= 20;
    let mode;
    let instances;
    if exhaustive {
        let o = MaskOps::new(s);
        constant_axioms(&o, &mut found);
        let all = 1u64 << n;
        let per: Vec<Found> = par.map_range(all as usize, |x| {
            let mut f = Found::new();
            let x = x as u64;
            unary_axioms(&o, &x, &mut f);
            for y in 0..all {
                binary_axioms(&o, &x, &y, &mut f);
                if f.iter().any(|(c, _)| *c == QUASI_ADDITIVE) {
                    break;
                }
            }
            f
        });
        found.extend(per.into_iter().flatten());
        mode = format!("exhaustive over all {all} elements");
        instances = all * all;
    } else {
        let o = SetOps(s);
        constant_axioms(&o, &mut found);
        let per: Vec<Found> = par.map_range(n, |a| {
            let mut f = Found::new();
            let x = s.set(&[a]);
            unary_axioms(&o, &x, &mut f);
            for b in 0..n {
                binary_axioms(&o, &x, &s.set(&[b]), &mut f);
            }
            f
        });
        found.extend(per.into_iter().flatten());
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let samples: Vec<(AtomSet, AtomSet)> = (0..budget.samples)
            .map(|_| {
                let mut pick = || AtomSet::from_atoms(n, (0..n).filter(|_| rng.gen_bool(0.5)));
                (pick(), pick())
            })
            .collect();
        let per: Vec<Found> = par.map(&samples, |(x, y)| {
            let mut f = Found::new();
            unary_axioms(&o, x, &mut f);
            binary_axioms(&o, x, y, &mut f);
            f
        });
        found.extend(per.into_iter().flatten());
        mode = format!("atom-level over {n} atoms plus {} sampled subsets (seed {})", budget.samples, budget.seed);
        instances = (n * n + budget.samples) as u64;
    }
    let mut report = ValidationReport::new(s.name(), mode);
    for c in clauses(s) {
        report.clause(c);
    }
    // one witness per clause keeps reports readable
    for (clause, witness) in found {
        if !report.violated(clause) {
            report.violate(clause, witness);
        }
    }
    report.instances = instances;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> CylAtomStructure {
        // ≡_0 relates a-b and b-c but not a-c
        CylAtomStructure::from_fns(
            "chain",
            2,
            vec!["a".into(), "b".into(), "c".into()],
            |_, _, _| true,
            |i, a, b| i == 1 || a.abs_diff(b) <= 1,
            None::<fn(usize, usize, usize, usize) -> bool>,
        )
        .unwrap()
    }

    #[test]
    fn set_algebras_pass() {
        for (dim, base) in [(2, 2), (2, 3), (3, 2)] {
            let s = CylAtomStructure::cartesian(dim, base).unwrap();
            let r = check_ca_axioms(&s, AxiomBudget::default());
            assert!(r.is_valid(), "{r}");
            assert!(r.mode.starts_with("exhaustive"));
        }
    }

    #[test]
    fn atom_level_mode_agrees_on_set_algebra() {
        let s = CylAtomStructure::cartesian(3, 3).unwrap();
        let r = check_ca_axioms(&s, AxiomBudget { samples: 16, ..AxiomBudget::default() });
        assert!(r.is_valid(), "{r}");
        assert!(r.mode.starts_with("atom-level"));
    }

    #[test]
    fn one_atom_passes() {
        let r = check_ca_axioms(&CylAtomStructure::one_atom(3), AxiomBudget::default());
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn non_transitive_relation_breaks_idempotence() {
        let r = check_ca_axioms(&chain(), AxiomBudget::default());
        assert!(r.violated(IDEMPOTENT), "{r}");
        // c0 c0 {a} = {a,b,c} but c0 {a} = {a,b}
        let w = &r.violations.iter().find(|v| v.clause == IDEMPOTENT).unwrap().witness;
        assert_eq!(w, "c0c0x != c0x at x={a}");
    }

    #[test]
    fn atom_level_and_exhaustive_agree_on_violations() {
        let s = chain();
        let full = check_ca_axioms(&s, AxiomBudget::default());
        let atoms = check_ca_axioms(&s, AxiomBudget { exhaustive_cap: 0, samples: 0, ..AxiomBudget::default() });
        let names = |r: &ValidationReport| {
            let mut v: Vec<_> = r.violations.iter().map(|v| v.clause.clone()).collect();
            v.sort();
            v
        };
        assert_eq!(names(&full), names(&atoms));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = chain();
        let a = check_ca_axioms(&s, AxiomBudget { parallelism: Parallelism::Sequential, ..AxiomBudget::default() });
        let b = check_ca_axioms(&s, AxiomBudget { parallelism: Parallelism::Parallel, ..AxiomBudget::default() });
        assert_eq!(a, b);
    }
}
