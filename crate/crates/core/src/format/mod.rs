//! Line-oriented text formats for structures and graphs. `#` starts a
//! comment; blank lines are ignored.
//!
//! A structure file opens with `rel <name>` or `cyl <name> dim=<n>` and
//! then either lists explicit tables or carries a single `rule:` line:
//!
//! ```text
//! rel one-atom
//! atom e
//! identity e
//! converse e e
//! triple e e e
//! ```
//!
//! Rules: `monk I=<k> l=<k> mu=<k> bound=<t>`, `alpha graph=<g> n=<colours>`,
//! `eta graph=<g> n=<dim>` and `finco n=<dim>`. A graph is a builtin name
//! (`K3`, `2K2`, `C5`, `grotzsch`, …) or a path to a graph file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::algebra::{validate_cyl_structure, validate_rel_structure, CylAtomStructure, RelAtomStructure};
use crate::graphalg::{alpha_of_graph, eta_of_graph, Graph};
use crate::monk::{build_monk, MonkParams};
use crate::repr::FinCoAlgebra;
use crate::{AtomSet, Error, Result, ValidationReport};

#[derive(Debug, Clone)]
pub enum Structure {
    Rel(RelAtomStructure),
    Cyl(CylAtomStructure),
    FinCo(FinCoAlgebra),
}

impl Structure {
    pub fn name(&self) -> String {
        match self {
            Structure::Rel(s) => s.name().to_string(),
            Structure::Cyl(s) => s.name().to_string(),
            Structure::FinCo(a) => format!("finco-{}", a.dim()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Monk(MonkParams),
    Alpha { graph: String, colours: usize },
    Eta { graph: String, dim: usize },
    FinCo { dim: usize },
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rule::Monk(p) => write!(f, "{p}"),
            Rule::Alpha { graph, colours } => write!(f, "alpha graph={graph} n={colours}"),
            Rule::Eta { graph, dim } => write!(f, "eta graph={graph} n={dim}"),
            Rule::FinCo { dim } => write!(f, "finco n={dim}"),
        }
    }
}

/// A parsed structure file: the structure, and the rule it came from if
/// it was given by one.
#[derive(Debug, Clone)]
pub struct StructureFile {
    pub name: String,
    pub structure: Structure,
    pub rule: Option<Rule>,
    /// Validation run on load; absent for the finite/cofinite algebra.
    pub validation: Option<ValidationReport>,
}

impl StructureFile {
    pub fn to_text(&self) -> Result<String> {
        structure_to_text(self)
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn fingerprint(&self) -> Result<String> {
        Ok(fingerprint(&self.to_text()?))
    }
}

pub fn fingerprint(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((k + 1, words))
    })
}

fn key_values<'a>(line: usize, words: &[&'a str]) -> Result<BTreeMap<&'a str, &'a str>> {
    words
        .iter()
        .map(|w| w.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, got `{w}`"))))
        .collect()
}

fn number<T: std::str::FromStr>(line: usize, kv: &BTreeMap<&str, &str>, key: &str) -> Result<T> {
    let v = kv.get(key).ok_or_else(|| parse_err(line, format!("missing `{key}=`")))?;
    v.parse().map_err(|_| parse_err(line, format!("`{key}={v}` is not a number")))
}

/// Parses a graph file: `graph <v>` then `edge i j` lines.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g: Option<Graph> = None;
    for (line, w) in lines(text) {
        match (w.as_slice(), &mut g) {
            (["graph", v], None) => {
                let v = v.parse().map_err(|_| parse_err(line, format!("bad vertex count `{v}`")))?;
                g = Some(Graph::new(v));
            }
            (["edge", a, b], Some(g)) => {
                let p = |x: &str| x.parse::<usize>().map_err(|_| parse_err(line, format!("bad vertex `{x}`")));
                g.add_edge(p(a)?, p(b)?).map_err(|e| parse_err(line, e.to_string()))?;
            }
            (_, None) => return Err(parse_err(line, "expected `graph <vertices>` header")),
            _ => return Err(parse_err(line, format!("unexpected `{}`", w.join(" ")))),
        }
    }
    g.ok_or_else(|| parse_err(0, "empty graph file"))
}

pub fn graph_to_text(g: &Graph) -> String {
    let mut out = format!("graph {}\n", g.vertex_count());
    for (a, b) in g.edges() {
        let _ = writeln!(out, "edge {a} {b}");
    }
    out
}

/// A builtin graph name, or a graph file relative to `base`.
pub fn resolve_graph(source: &str, base: Option<&Path>) -> Result<Graph> {
    if let Some(g) = Graph::builtin(source) {
        return Ok(g);
    }
    let path: PathBuf = match base {
        Some(b) if Path::new(source).is_relative() => b.join(source),
        _ => PathBuf::from(source),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        Error::Io(format!("graph `{source}` is not a builtin and {} cannot be read: {e}", path.display()))
    })?;
    parse_graph(&text)
}

fn parse_rule(line: usize, words: &[&str]) -> Result<Rule> {
    let (kind, rest) = words.split_first().ok_or_else(|| parse_err(line, "empty rule"))?;
    let kv = key_values(line, rest)?;
    let graph = || kv.get("graph").map(|g| g.to_string()).ok_or_else(|| parse_err(line, "missing `graph=`"));
    let rule = match *kind {
        "monk" => {
            let mut p = MonkParams::new(
                number(line, &kv, "I")?,
                number(line, &kv, "l")?,
                number(line, &kv, "mu")?,
                number(line, &kv, "bound")?,
            );
            if kv.contains_key("n") {
                p = p.with_witness_arity(number(line, &kv, "n")?);
            }
            Rule::Monk(p)
        }
        "alpha" => Rule::Alpha { graph: graph()?, colours: number(line, &kv, "n")? },
        "eta" => Rule::Eta { graph: graph()?, dim: number(line, &kv, "n")? },
        "finco" => Rule::FinCo { dim: number(line, &kv, "n")? },
        other => return Err(parse_err(line, format!("unknown rule `{other}`"))),
    };
    let known: &[&str] = match rule {
        Rule::Monk(_) => &["I", "l", "mu", "bound", "n"],
        Rule::Alpha { .. } | Rule::Eta { .. } => &["graph", "n"],
        Rule::FinCo { .. } => &["n"],
    };
    if let Some(k) = kv.keys().find(|k| !known.contains(k)) {
        return Err(parse_err(line, format!("unknown key `{k}` for rule {kind}")));
    }
    Ok(rule)
}

fn build_rule(rule: &Rule, base: Option<&Path>) -> Result<Structure> {
    Ok(match rule {
        Rule::Monk(p) => Structure::Rel(build_monk(p)?),
        Rule::Alpha { graph, colours } => Structure::Rel(alpha_of_graph(&resolve_graph(graph, base)?, *colours)?),
        Rule::Eta { graph, dim } => Structure::Cyl(eta_of_graph(&resolve_graph(graph, base)?, *dim)?),
        Rule::FinCo { dim } => Structure::FinCo(FinCoAlgebra::new(*dim)?),
    })
}

enum Header {
    Rel,
    Cyl(usize),
}

#[derive(Default)]
struct Tables {
    atoms: Vec<String>,
    index: BTreeMap<String, usize>,
    identity: Vec<usize>,
    converse: BTreeMap<usize, usize>,
    triples: Vec<(usize, usize, usize)>,
    diag: Vec<(usize, usize, usize)>,
    equiv: Vec<(usize, usize, usize)>,
    swap: Vec<(usize, usize, usize, usize)>,
}

impl Tables {
    fn atom(&self, line: usize, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| parse_err(line, format!("unknown atom `{name}`")))
    }
}

fn coordinate(line: usize, w: &str, dim: usize) -> Result<usize> {
    match w.parse::<usize>() {
        Ok(i) if i < dim => Ok(i),
        _ => Err(parse_err(line, format!("`{w}` is not a coordinate below {dim}"))),
    }
}

/// Parses and validates a structure file. `base` resolves relative graph
/// paths in rule headers. A structure failing validation is an
/// [`Error::Validation`] naming the first witness.
pub fn parse_structure(text: &str, base: Option<&Path>) -> Result<StructureFile> {
    let file = parse_structure_unvalidated(text, base)?;
    let report = match &file.structure {
        Structure::Rel(s) => Some(validate_rel_structure(s)?),
        Structure::Cyl(s) => Some(validate_cyl_structure(s)),
        Structure::FinCo(_) => None,
    };
    if let Some(r) = &report {
        if let Some(v) = r.violations.first() {
            return Err(Error::Validation(format!("{}: {} violated: {}", file.name, v.clause, v.witness)));
        }
    }
    Ok(StructureFile { validation: report, ..file })
}

/// Parses without running the validators.
pub fn parse_structure_unvalidated(text: &str, base: Option<&Path>) -> Result<StructureFile> {
    let mut it = lines(text);
    let (hline, hw) = it.next().ok_or_else(|| parse_err(0, "empty structure file"))?;
    let (header, name) = match hw.as_slice() {
        ["rel", name] => (Header::Rel, name.to_string()),
        ["cyl", name, dim] => {
            let d = dim
                .strip_prefix("dim=")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| parse_err(hline, format!("expected dim=<n>, got `{dim}`")))?;
            (Header::Cyl(d), name.to_string())
        }
        _ => return Err(parse_err(hline, "expected `rel <name>` or `cyl <name> dim=<n>`")),
    };
    let mut t = Tables::default();
    let mut rule: Option<(usize, Rule)> = None;
    let mut explicit_line = None;
    for (line, w) in it {
        let kw = w[0];
        if kw == "rule:" {
            if rule.is_some() {
                return Err(parse_err(line, "second rule line"));
            }
            rule = Some((line, parse_rule(line, &w[1..])?));
            continue;
        }
        explicit_line.get_or_insert(line);
        let dim = match header {
            Header::Cyl(d) => d,
            Header::Rel => 2,
        };
        let is_rel = matches!(header, Header::Rel);
        match (kw, &w[1..]) {
            ("atom", [a]) => {
                if t.index.insert(a.to_string(), t.atoms.len()).is_some() {
                    return Err(parse_err(line, format!("duplicate atom `{a}`")));
                }
                t.atoms.push(a.to_string());
            }
            ("identity", [a]) if is_rel => {
                let a = t.atom(line, a)?;
                t.identity.push(a);
            }
            ("converse", [a, b]) if is_rel => {
                let (a, b) = (t.atom(line, a)?, t.atom(line, b)?);
                for (x, y) in [(a, b), (b, a)] {
                    if t.converse.insert(x, y).is_some_and(|old| old != y) {
                        return Err(parse_err(line, format!("conflicting converse for `{}`", t.atoms[x])));
                    }
                }
            }
            ("triple", [a, b, c]) if is_rel => {
                let tr = (t.atom(line, a)?, t.atom(line, b)?, t.atom(line, c)?);
                t.triples.push(tr);
            }
            ("diag", [i, j, a]) if !is_rel => {
                let d = (coordinate(line, i, dim)?, coordinate(line, j, dim)?, t.atom(line, a)?);
                t.diag.push(d);
            }
            ("equiv", [i, a, b]) if !is_rel => {
                let e = (coordinate(line, i, dim)?, t.atom(line, a)?, t.atom(line, b)?);
                t.equiv.push(e);
            }
            ("swap", [i, j, a, b]) if !is_rel => {
                let (i, j) = (coordinate(line, i, dim)?, coordinate(line, j, dim)?);
                if i >= j {
                    return Err(parse_err(line, "swap coordinates must be increasing"));
                }
                let s = (i, j, t.atom(line, a)?, t.atom(line, b)?);
                t.swap.push(s);
            }
            _ => return Err(parse_err(line, format!("unexpected `{}`", w.join(" ")))),
        }
    }

    if let Some((line, rule)) = rule {
        if let Some(l) = explicit_line {
            return Err(parse_err(l, "explicit tables cannot follow a rule"));
        }
        let structure = build_rule(&rule, base)?;
        match (&header, &structure) {
            (Header::Rel, Structure::Rel(_)) => {}
            (Header::Cyl(d), Structure::Cyl(s)) if *d == s.dim() => {}
            (Header::Cyl(d), Structure::FinCo(a)) if *d == a.dim() => {}
            _ => return Err(parse_err(line, format!("rule `{rule}` does not match the header"))),
        }
        return Ok(StructureFile { name, structure, rule: Some(rule), validation: None });
    }

    if t.atoms.is_empty() {
        return Err(parse_err(hline, "no atoms"));
    }
    let n = t.atoms.len();
    let structure = match header {
        Header::Rel => {
            let converse = (0..n)
                .map(|a| {
                    t.converse.get(&a).copied().ok_or_else(|| parse_err(0, format!("no converse for `{}`", t.atoms[a])))
                })
                .collect::<Result<Vec<_>>>()?;
            let identity = AtomSet::from_atoms(n, t.identity);
            Structure::Rel(RelAtomStructure::from_triples(name.clone(), t.atoms, identity, converse, t.triples)?)
        }
        Header::Cyl(dim) => {
            let mut diag = vec![AtomSet::empty(n); dim * dim];
            for (i, j, a) in t.diag {
                diag[i * dim + j].insert(a);
            }
            let mut equiv = vec![vec![AtomSet::empty(n); n]; dim];
            for (i, a, b) in t.equiv {
                equiv[i][a].insert(b);
            }
            let swap = (!t.swap.is_empty()).then(|| {
                let mut sw = vec![vec![AtomSet::empty(n); n]; dim * dim];
                for (i, j, a, b) in t.swap {
                    sw[i * dim + j][a].insert(b);
                }
                sw
            });
            Structure::Cyl(CylAtomStructure::from_parts(name.clone(), dim, t.atoms, diag, equiv, swap)?)
        }
    };
    Ok(StructureFile { name, structure, rule: None, validation: None })
}

fn check_name(a: &str) -> Result<()> {
    if a.is_empty() || a.contains(char::is_whitespace) || a.contains('#') {
        return Err(Error::InvalidParams(format!("atom name `{a}` cannot be written to a structure file")));
    }
    Ok(())
}

/// Canonical text: rule files keep their rule, explicit structures list
/// every table entry in atom order.
pub fn structure_to_text(f: &StructureFile) -> Result<String> {
    let mut out = String::new();
    // names are one word in the header
    let name = f.name.split_whitespace().collect::<Vec<_>>().join("-");
    match &f.structure {
        Structure::Rel(_) => writeln!(out, "rel {name}"),
        Structure::Cyl(s) => writeln!(out, "cyl {name} dim={}", s.dim()),
        Structure::FinCo(a) => writeln!(out, "cyl {name} dim={}", a.dim()),
    }
    .expect("writing to a string");
    if let Some(rule) = &f.rule {
        out.push_str(&format!("rule: {rule}\n"));
        return Ok(out);
    }
    match &f.structure {
        Structure::Rel(s) => out.push_str(&rel_tables(s)?),
        Structure::Cyl(s) => out.push_str(&cyl_tables(s)?),
        Structure::FinCo(_) => {
            return Err(Error::Unsupported("the finite/cofinite algebra is only written as a rule".into()))
        }
    }
    Ok(out)
}

pub fn rel_to_text(s: &RelAtomStructure) -> Result<String> {
    if let Some(r) = s.rule() {
        return Ok(format!("rel {}\nrule: {}\n", s.name(), r.header()));
    }
    Ok(format!("rel {}\n{}", s.name(), rel_tables(s)?))
}

pub fn cyl_to_text(s: &CylAtomStructure) -> Result<String> {
    Ok(format!("cyl {} dim={}\n{}", s.name(), s.dim(), cyl_tables(s)?))
}

fn rel_tables(s: &RelAtomStructure) -> Result<String> {
    if s.rule().is_some() {
        return Err(Error::UnsupportedSymbolic(format!("{} is rule-backed", s.name())));
    }
    let n = s.atom_count();
    let mut out = String::new();
    for a in s.atoms() {
        check_name(a)?;
        let _ = writeln!(out, "atom {a}");
    }
    for a in s.identity().iter() {
        let _ = writeln!(out, "identity {}", s.atom_name(a));
    }
    for a in (0..n).filter(|&a| a <= s.converse(a)) {
        let _ = writeln!(out, "converse {} {}", s.atom_name(a), s.atom_name(s.converse(a)));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if s.is_consistent(a, b, c) {
                    let _ = writeln!(out, "triple {} {} {}", s.atom_name(a), s.atom_name(b), s.atom_name(c));
                }
            }
        }
    }
    Ok(out)
}

fn cyl_tables(s: &CylAtomStructure) -> Result<String> {
    let (n, dim) = (s.atom_count(), s.dim());
    let mut out = String::new();
    for a in s.atoms() {
        check_name(a)?;
        let _ = writeln!(out, "atom {a}");
    }
    for i in 0..dim {
        for j in 0..dim {
            for a in s.diag_set(i, j).iter() {
                let _ = writeln!(out, "diag {i} {j} {}", s.atom_name(a));
            }
        }
    }
    for i in 0..dim {
        for a in 0..n {
            for b in s.equiv_row(i, a).iter() {
                let _ = writeln!(out, "equiv {i} {} {}", s.atom_name(a), s.atom_name(b));
            }
        }
    }
    if s.has_swap() {
        for i in 0..dim {
            for j in i + 1..dim {
                for a in 0..n {
                    for b in s.swap_row(i, j, a).into_iter().flat_map(|r| r.iter()) {
                        let _ = writeln!(out, "swap {i} {j} {} {}", s.atom_name(a), s.atom_name(b));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monk::build_maddux;

    const ONE: &str = "# the one-atom algebra\nrel one-atom\natom e\nidentity e\nconverse e e\ntriple e e e\n";

    #[test]
    fn one_atom_round_trips() {
        let f = parse_structure(ONE, None).unwrap();
        assert!(f.validation.as_ref().unwrap().is_valid());
        let text = f.to_text().unwrap();
        assert_eq!(text, ONE.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
        assert_eq!(parse_structure(&text, None).unwrap().to_text().unwrap(), text);
    }

    #[test]
    fn maddux_and_cartesian_round_trip() {
        let m = build_maddux(3).unwrap();
        let text = rel_to_text(&m).unwrap();
        let back = parse_structure(&text, None).unwrap();
        let Structure::Rel(r) = &back.structure else { panic!() };
        for a in 0..m.atom_count() {
            for b in 0..m.atom_count() {
                assert_eq!(r.comp(a, b), m.comp(a, b));
            }
        }
        assert_eq!(back.to_text().unwrap(), text);

        let c = CylAtomStructure::cartesian(3, 2).unwrap();
        let text = cyl_to_text(&c).unwrap();
        let back = parse_structure(&text, None).unwrap();
        assert_eq!(back.to_text().unwrap(), text);
        assert_eq!(back.fingerprint().unwrap(), fingerprint(&text));
    }

    #[test]
    fn monk_rule_loads() {
        let f = parse_structure("rel m\nrule: monk I=6 l=2 mu=1 bound=2\n", None).unwrap();
        let Structure::Rel(s) = &f.structure else { panic!() };
        let direct = build_monk(&MonkParams::new(6, 2, 1, 2)).unwrap();
        assert_eq!(s.atom_count(), direct.atom_count());
        assert!(s.rule().is_some());
        assert_eq!(f.to_text().unwrap(), "rel m\nrule: monk I=6 l=2 mu=1 bound=2\n");
    }

    #[test]
    fn spaced_names_are_written_as_one_word() {
        let p = MonkParams::new(6, 2, 1, 2);
        let s = build_monk(&p).unwrap();
        let f = StructureFile {
            name: s.name().to_string(),
            structure: Structure::Rel(s),
            rule: Some(Rule::Monk(p)),
            validation: None,
        };
        let text = f.to_text().unwrap();
        let back = parse_structure(&text, None).unwrap();
        assert_eq!(back.name, "monk-I=6-l=2-mu=1-bound=2");
        assert_eq!(back.to_text().unwrap(), text);
    }

    #[test]
    fn graph_rules_and_files() {
        let f = parse_structure("rel a\nrule: alpha graph=K2 n=2\n", None).unwrap();
        assert!(matches!(f.structure, Structure::Rel(_)));
        let f = parse_structure("cyl e dim=3\nrule: eta graph=K2 n=3\n", None).unwrap();
        let Structure::Cyl(s) = &f.structure else { panic!() };
        assert_eq!(s.atom_count(), 181);
        let f = parse_structure("cyl f dim=3\nrule: finco n=3\n", None).unwrap();
        assert!(matches!(f.structure, Structure::FinCo(_)));
        assert!(parse_structure("cyl e dim=4\nrule: eta graph=K2 n=3\n", None).is_err());

        let dir = std::env::temp_dir().join(format!("atomlab-format-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("p3.graph"), "graph 3\nedge 0 1\nedge 1 2 # path\n").unwrap();
        let f = parse_structure("rel a\nrule: alpha graph=p3.graph n=2\n", Some(&dir)).unwrap();
        let Structure::Rel(s) = &f.structure else { panic!() };
        assert_eq!(s.atom_count(), 7);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn errors_name_the_line() {
        let bad = "rel x\natom e\nidentity e\nconverse e e\ntriple e e\n";
        match parse_structure(bad, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        match parse_structure("rel x\natom e\ntriple e e q\n", None) {
            Err(Error::Parse { line: 3, msg }) => assert!(msg.contains("`q`")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_structure("rel x\nrule: monk I=6 l=2\n", None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn invalid_structures_are_rejected_with_a_witness() {
        // no identity witness for e
        let text = "rel x\natom e\nidentity e\nconverse e e\n";
        assert!(matches!(parse_structure(text, None), Err(Error::Validation(_))));
        assert!(parse_structure_unvalidated(text, None).is_ok());
    }

    #[test]
    fn graph_files_round_trip() {
        let g = Graph::grotzsch();
        let text = graph_to_text(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert!(matches!(parse_graph("edge 0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_graph("graph 2\nedge 0 5\n").is_err());
    }
}
