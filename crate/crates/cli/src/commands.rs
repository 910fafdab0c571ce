use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use atomlab_core::algebra::{
    check_ca_axioms, eval_term, validate_cyl_structure, validate_rel_structure_with, AxiomBudget, CylAtomStructure,
    Element, RelAtomStructure, Term,
};
use atomlab_core::format::{
    fingerprint, graph_to_text, parse_structure, parse_structure_unvalidated, resolve_graph, structure_to_text, Rule,
    Structure, StructureFile,
};
use atomlab_core::games::{
    basic_matrices, cylindric_basis_check, matrix_structure, solve_f, solve_h, GameConfig, GameResult, Network, Outcome,
};
use atomlab_core::graphalg::{
    alpha_of_graph, chromatic_number, clique_number, erdos_search, eta_of_graph, girth, shortest_odd_cycle,
    ErdosOutcome, Graph,
};
use atomlab_core::monk::{build_monk, maddux_embedding_check, MonkParams};
use atomlab_core::repr::{
    build_complete_graph, finco_nonadditivity_witness, find_square_rep_with, ramsey_check_with, rep_check,
    sample_term_elements, verify_square_rep, RamseyConfig, RamseyOutcome, SquareConfig, SquareSearch,
    FINCO_FILTER_NOTE,
};
use atomlab_core::{AtomSet, Budget, Error, Parallelism, Result};

use crate::report::Report;

/// Settings shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub budget: Budget,
    pub parallelism: Parallelism,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path, validate: bool) -> Result<StructureFile> {
    let text = read(path)?;
    if validate {
        parse_structure(&text, path.parent())
    } else {
        parse_structure_unvalidated(&text, path.parent())
    }
}

fn header(r: &mut Report, f: &StructureFile) -> Result<()> {
    r.line("structure", &f.name);
    r.line("fingerprint", f.fingerprint()?);
    Ok(())
}

fn rel(f: &StructureFile) -> Result<&RelAtomStructure> {
    match &f.structure {
        Structure::Rel(s) => Ok(s),
        _ => Err(Error::Unsupported(format!("{} is not a relation atom structure", f.name))),
    }
}

/// Cylindric structures are used as they are; a relation structure is
/// replaced by its basic matrices of dimension `n`.
fn cyl(f: &StructureFile, n: usize, ctx: &Ctx, r: &mut Report) -> Result<Option<CylAtomStructure>> {
    match &f.structure {
        Structure::Cyl(s) => Ok(Some(s.clone())),
        Structure::Rel(s) => {
            let Some(m) = matrices_or_inconclusive(s, n, None, ctx, r)? else { return Ok(None) };
            r.line("basic-matrices", format!("{} (n={n})", m.len()));
            Ok(Some(matrix_structure(s, &m, n)?))
        }
        Structure::FinCo(_) => Err(Error::Unsupported(
            "the finite/cofinite algebra has no finite atom structure; use `atomlab finco`".into(),
        )),
    }
}

fn matrices_or_inconclusive(
    s: &RelAtomStructure,
    n: usize,
    atom_bound: Option<usize>,
    ctx: &Ctx,
    r: &mut Report,
) -> Result<Option<Vec<Network>>> {
    match basic_matrices(s, n, atom_bound, &ctx.budget) {
        Ok(m) => Ok(Some(m)),
        Err(Error::CapExceeded(_)) => {
            r.inconclusive(&ctx.budget);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn names(s: &[String], x: &AtomSet) -> String {
    let v: Vec<&str> = x.iter().map(|a| s[a].as_str()).collect();
    format!("{{{}}}", v.join(" "))
}

/// Whitespace-separated atom names; `0` and `1` stand for the empty set and
/// the unit unless an atom has that name.
fn parse_set(atoms: &[String], text: &str) -> Result<AtomSet> {
    let n = atoms.len();
    let words: Vec<&str> = text.split_whitespace().collect();
    let find = |w: &str| atoms.iter().position(|a| a == w);
    match words.as_slice() {
        ["0"] if find("0").is_none() => return Ok(AtomSet::empty(n)),
        ["1"] if find("1").is_none() => return Ok(AtomSet::full(n)),
        _ => {}
    }
    let mut x = AtomSet::empty(n);
    for w in words {
        x.insert(find(w).ok_or_else(|| Error::InvalidParams(format!("no atom named `{w}`")))?);
    }
    Ok(x)
}

fn emit_structure(r: &mut Report, f: &StructureFile, path: Option<&Path>) -> Result<()> {
    let text = structure_to_text(f)?;
    r.line("fingerprint", fingerprint(&text));
    if let Some(p) = path {
        write(p, &text)?;
        r.line("written", p.display());
    }
    Ok(())
}

pub fn validate(ctx: &Ctx, r: &mut Report, file: &Path) -> Result<()> {
    let f = load(file, false)?;
    header(r, &f)?;
    match &f.structure {
        Structure::Rel(s) => r.validation(&validate_rel_structure_with(s, ctx.parallelism)?),
        Structure::Cyl(s) => {
            let mut v = validate_cyl_structure(s);
            v.merge(check_ca_axioms(s, axiom_budget(ctx)));
            r.validation(&v);
        }
        Structure::FinCo(a) => {
            r.line("subject", format!("finite/cofinite algebra of dimension {}", a.dim()));
            r.line("mode", "closed-form");
            r.line("verdict", "pass");
            r.line("note", FINCO_FILTER_NOTE);
        }
    }
    Ok(())
}

fn axiom_budget(ctx: &Ctx) -> AxiomBudget {
    AxiomBudget { seed: ctx.seed, parallelism: ctx.parallelism, ..AxiomBudget::default() }
}

pub fn compose(r: &mut Report, file: &Path, x: &str, y: &str) -> Result<()> {
    let f = load(file, true)?;
    header(r, &f)?;
    let s = rel(&f)?;
    let (x, y) = (parse_set(s.atoms(), x)?, parse_set(s.atoms(), y)?);
    r.line("left", names(s.atoms(), &x));
    r.line("right", names(s.atoms(), &y));
    r.line("verdict", names(s.atoms(), &s.compose_sets(&x, &y)));
    Ok(())
}

pub fn matrices(ctx: &Ctx, r: &mut Report, file: &Path, n: usize, atom_bound: Option<usize>) -> Result<()> {
    let f = load(file, true)?;
    header(r, &f)?;
    let s = rel(&f)?;
    r.line("budget", ctx.budget.describe());
    if let Some(m) = matrices_or_inconclusive(s, n, atom_bound, ctx, r)? {
        r.line("verdict", format!("{} basic matrices (n={n})", m.len()));
        for x in &m {
            r.line("matrix", x);
        }
    }
    Ok(())
}

pub fn basis(ctx: &Ctx, r: &mut Report, file: &Path, n: usize) -> Result<()> {
    let f = load(file, true)?;
    header(r, &f)?;
    let s = rel(&f)?;
    r.line("budget", ctx.budget.describe());
    if let Some(m) = matrices_or_inconclusive(s, n, None, ctx, r)? {
        r.line("basic-matrices", format!("{} (n={n})", m.len()));
        r.validation(&cylindric_basis_check(s, &m, n)?);
    }
    Ok(())
}

pub struct GameArgs<'a> {
    pub file: &'a Path,
    pub rounds: usize,
    pub nodes: usize,
    pub dim: usize,
    pub memo: bool,
    pub certificate: Option<&'a Path>,
}

fn default_cert_path(file: &Path, kind: &str) -> PathBuf {
    let mut name = file.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!(".{kind}.cert"));
    file.with_file_name(name)
}

fn game_report(r: &mut Report, g: &GameResult, cert_path: &Path) -> Result<()> {
    r.line("game", &g.game);
    r.line("budget", g.budget.describe());
    match g.outcome {
        Outcome::Won(p) => {
            r.line("verdict", p);
            if let Some(c) = &g.certificate {
                let text = c.to_text();
                write(cert_path, &text)?;
                r.line("certificate", cert_path.display());
                r.line("certificate-fingerprint", fingerprint(&text));
                r.line("certificate-positions", c.positions.len());
            }
        }
        Outcome::Inconclusive => r.inconclusive(&g.budget),
    }
    for n in &g.notes {
        r.line("note", n);
    }
    Ok(())
}

fn game_config(ctx: &Ctx, memo: bool) -> GameConfig {
    GameConfig { budget: ctx.budget, memo, parallelism: ctx.parallelism, certificate: true }
}

pub fn game_f(ctx: &Ctx, r: &mut Report, a: &GameArgs) -> Result<()> {
    let f = load(a.file, true)?;
    header(r, &f)?;
    let Some(s) = cyl(&f, a.dim, ctx, r)? else { return Ok(()) };
    let g = solve_f(&s, a.nodes, a.rounds, &game_config(ctx, a.memo))?;
    let path = a.certificate.map_or_else(|| default_cert_path(a.file, "game-f"), Path::to_path_buf);
    game_report(r, &g, &path)
}

pub fn game_h(ctx: &Ctx, r: &mut Report, a: &GameArgs, hyperlabels: usize) -> Result<()> {
    let f = load(a.file, true)?;
    header(r, &f)?;
    let Some(s) = cyl(&f, a.dim, ctx, r)? else { return Ok(()) };
    let g = solve_h(&s, a.rounds, a.nodes, hyperlabels, &game_config(ctx, a.memo))?;
    let path = a.certificate.map_or_else(|| default_cert_path(a.file, "game-h"), Path::to_path_buf);
    game_report(r, &g, &path)
}

fn graph_lines(r: &mut Report, g: &Graph) -> Result<()> {
    r.line("vertices", g.vertex_count());
    r.line("edges", g.edge_count());
    let c = chromatic_number(g)?;
    r.line("chromatic", c.colours);
    let assignment: Vec<String> = c.assignment.iter().enumerate().map(|(v, k)| format!("{v}:{k}")).collect();
    r.line("colouring", assignment.join(" "));
    r.line("clique", clique_number(g)?);
    r.line("girth", girth(g).map_or("infinite".to_string(), |x| x.to_string()));
    if let Some(cycle) = shortest_odd_cycle(g) {
        let v: Vec<String> = cycle.iter().map(|x| x.to_string()).collect();
        r.line("odd-cycle", v.join(" "));
    }
    Ok(())
}

pub fn graph(r: &mut Report, source: &str, emit: Option<&Path>) -> Result<()> {
    let g = resolve_graph(source, None)?;
    let text = graph_to_text(&g);
    r.line("graph", source);
    r.line("fingerprint", fingerprint(&text));
    graph_lines(r, &g)?;
    if let Some(p) = emit {
        write(p, &text)?;
        r.line("written", p.display());
    }
    Ok(())
}

pub fn erdos(ctx: &Ctx, r: &mut Report, k: usize, trials: usize, emit: Option<&Path>) -> Result<()> {
    r.line("search", format!("chromatic number and girth above {k}, {trials} trials"));
    match erdos_search(k, trials, ctx.seed)? {
        ErdosOutcome::Found { graph, chromatic, girth, trial } => {
            r.line("verdict", "found");
            r.line("trial", trial);
            r.line("chromatic", chromatic);
            r.line("girth", girth);
            let text = graph_to_text(&graph);
            r.line("fingerprint", fingerprint(&text));
            for (u, v) in graph.edges() {
                r.line("edge", format!("{u} {v}"));
            }
            if let Some(p) = emit {
                write(p, &text)?;
                r.line("written", p.display());
            }
        }
        ErdosOutcome::Exhausted { trials } => {
            r.status = crate::report::Status::Inconclusive;
            r.line("verdict", "inconclusive");
            r.line("budget-exhausted", format!("trials={trials}"));
        }
    }
    Ok(())
}

pub fn monk(ctx: &Ctx, r: &mut Report, p: MonkParams, emit: Option<&Path>) -> Result<()> {
    let s = build_monk(&p)?;
    let f = StructureFile {
        name: s.name().to_string(),
        structure: Structure::Rel(s),
        rule: Some(Rule::Monk(p)),
        validation: None,
    };
    r.line("structure", &f.name);
    r.line("rule", p);
    emit_structure(r, &f, emit)?;
    let s = rel(&f)?;
    r.line("atoms", s.atom_count());
    let mut v = validate_rel_structure_with(s, ctx.parallelism)?;
    v.merge(maddux_embedding_check(&p)?);
    r.validation(&v);
    Ok(())
}

pub fn eta(ctx: &Ctx, r: &mut Report, source: &str, n: usize, emit: Option<&Path>) -> Result<()> {
    let g = resolve_graph(source, None)?;
    let s = eta_of_graph(&g, n)?;
    let f = StructureFile {
        name: s.name().to_string(),
        structure: Structure::Cyl(s),
        rule: Some(Rule::Eta { graph: source.to_string(), dim: n }),
        validation: None,
    };
    r.line("structure", &f.name);
    emit_structure(r, &f, emit)?;
    let Structure::Cyl(s) = &f.structure else { unreachable!() };
    r.line("atoms", s.atom_count());
    let mut v = validate_cyl_structure(s);
    v.merge(check_ca_axioms(s, axiom_budget(ctx)));
    r.validation(&v);
    Ok(())
}

pub fn alpha(ctx: &Ctx, r: &mut Report, source: &str, colours: usize, emit: Option<&Path>) -> Result<()> {
    let g = resolve_graph(source, None)?;
    let s = alpha_of_graph(&g, colours)?;
    let f = StructureFile {
        name: s.name().to_string(),
        structure: Structure::Rel(s),
        rule: Some(Rule::Alpha { graph: source.to_string(), colours }),
        validation: None,
    };
    r.line("structure", &f.name);
    emit_structure(r, &f, emit)?;
    let s = rel(&f)?;
    r.line("atoms", s.atom_count());
    r.validation(&validate_rel_structure_with(s, ctx.parallelism)?);
    Ok(())
}

pub fn repr_square(ctx: &Ctx, r: &mut Report, file: &Path, max_base: usize, out: Option<&Path>) -> Result<()> {
    let f = load(file, true)?;
    header(r, &f)?;
    let s = rel(&f)?;
    r.line("budget", ctx.budget.describe());
    let cfg = SquareConfig { budget: ctx.budget, parallelism: ctx.parallelism };
    match find_square_rep_with(s, max_base, &cfg)? {
        SquareSearch::Found(rep) => {
            r.line("verdict", format!("representable on base {}", rep.base));
            let text = rep.to_text(s);
            for l in text.lines() {
                r.line("witness", l);
            }
            if let Some(p) = out {
                write(p, &text)?;
                r.line("written", p.display());
            }
            r.validation(&verify_square_rep(s, &rep));
        }
        SquareSearch::Exhausted { max_base, nodes } => {
            r.line("verdict", format!("no representation on any base up to {max_base}"));
            r.line("witness", format!("exhaustive search, {nodes} nodes"));
        }
        SquareSearch::Inconclusive { base, .. } => {
            r.line("reached-base", base);
            r.inconclusive(&ctx.budget);
        }
    }
    Ok(())
}

pub fn repr_graph(ctx: &Ctx, r: &mut Report, p: MonkParams, size: usize, samples: usize) -> Result<()> {
    r.line("rule", p);
    let b = build_complete_graph(&p, size)?;
    r.line("nodes", b.graph.len());
    r.line("discharged", b.discharged);
    r.line("stopped-at-bound", b.stopped_at_bound);
    let mut v = b.graph.triangle_scan();
    let sample = sample_term_elements(&p, samples, ctx.seed)?;
    v.merge(rep_check(&p, &b.graph, &sample)?);
    r.validation(&v);
    Ok(())
}

pub fn ramsey(ctx: &Ctx, r: &mut Report, colours: usize, clique: usize) -> Result<()> {
    r.line("question", format!("every {colours}-colouring of K{clique} has a monochromatic triangle"));
    r.line("budget", ctx.budget.describe());
    let cfg = RamseyConfig { budget: ctx.budget, parallelism: ctx.parallelism };
    match ramsey_check_with(colours, clique, &cfg)? {
        RamseyOutcome::Forced { nodes } => {
            r.line("verdict", true);
            r.line("witness", format!("exhaustive search, {nodes} nodes"));
        }
        RamseyOutcome::Avoidable(c) => {
            r.line("verdict", false);
            let mut edges = Vec::new();
            for (i, row) in c.iter().enumerate() {
                for (j, x) in row.iter().enumerate().skip(i + 1) {
                    edges.push(format!("{i}-{j}:{x}"));
                }
            }
            r.line("witness", edges.join(" "));
        }
        RamseyOutcome::Inconclusive { .. } => r.inconclusive(&ctx.budget),
    }
    Ok(())
}

pub fn finco(r: &mut Report, n: usize) -> Result<()> {
    r.validation(&finco_nonadditivity_witness(n)?);
    Ok(())
}

pub fn term(r: &mut Report, file: &Path, term: &str, vars: &[String]) -> Result<()> {
    let f = load(file, true)?;
    header(r, &f)?;
    let Structure::Cyl(s) = &f.structure else {
        return Err(Error::Unsupported(format!("{} is not a cylindric atom structure", f.name)));
    };
    let t: Term = term.parse()?;
    let mut env = HashMap::new();
    for v in vars {
        let (k, x) =
            v.split_once('=').ok_or_else(|| Error::InvalidParams(format!("expected --var name=atoms, got `{v}`")))?;
        env.insert(k.to_string(), Element::Explicit(parse_set(s.atoms(), x)?));
    }
    r.line("term", &t);
    for (k, x) in env.iter().collect::<std::collections::BTreeMap<_, _>>() {
        r.line("var", format!("{k}={}", names(s.atoms(), x.as_explicit().expect("explicit"))));
    }
    let value = eval_term(s, &t, &env)?;
    r.line("verdict", names(s.atoms(), value.as_explicit().expect("explicit")));
    Ok(())
}
