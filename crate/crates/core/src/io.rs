//! Line-oriented text formats for instances, extensions, species sets and
//! CDS instances.
//!
//! Every format starts with a header line (`pdd 1`, `ext 1`, `set 1`,
//! `cds 1`). `#` starts a comment and blank lines are ignored. Serializers
//! emit a canonical form that the parsers read back to the same value.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::extension::{check_parents, ExtensionViolation, TreeExtension};
use crate::foodweb::{FoodWeb, InstanceDraft, InvalidInstance, PddInstance, SpeciesId};
use crate::rational::Rational;
use crate::reduction::{is_vertex_name, CdsError, CdsInstance};
use crate::species_set::SpeciesSet;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{msg} at line {line}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Instance(#[from] InvalidInstance),
    #[error("invalid extension: {}", render(.0))]
    Extension(Vec<ExtensionViolation>),
    #[error(transparent)]
    Cds(#[from] CdsError),
}

fn render(v: &[ExtensionViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Species names: `[A-Za-z0-9_@>.-]+`.
pub fn is_species_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '@' | '>' | '.' | '-'))
}

/// Non-blank, comment-stripped lines as `(line number, tokens)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

/// Splits off and checks the header record.
fn body<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>, ParseError> {
    let mut recs: Vec<_> = records(text).collect();
    let want: Vec<&str> = header.split(' ').collect();
    match recs.first() {
        Some((_, toks)) if *toks == want => {
            recs.remove(0);
            Ok(recs)
        }
        Some((line, _)) => Err(syntax(*line, format!("expected header `{header}`"))),
        None => Err(syntax(1, format!("expected header `{header}`"))),
    }
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() != n {
        return Err(syntax(line, format!("`{}` takes {} field(s)", toks[0], n - 1)));
    }
    Ok(())
}

fn int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("malformed {what} `{tok}`")))
}

fn species_name(line: usize, tok: &str) -> Result<&str, ParseError> {
    if !is_species_name(tok) {
        return Err(syntax(line, format!("bad species name `{tok}`")));
    }
    Ok(tok)
}

fn once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(syntax(line, format!("duplicate `{key}` line")));
    }
    *slot = Some(value);
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<PddInstance, ParseError> {
    let recs = body(text, "pdd 1")?;
    let mut budget = None;
    let mut target = None;
    let mut draft = InstanceDraft::default();
    let mut known = HashSet::new();
    let mut arc_lines = Vec::new();
    for (line, toks) in &recs {
        let line = *line;
        match toks[0] {
            "budget" => {
                arity(line, toks, 2)?;
                once(&mut budget, int::<u64>(line, toks[1], "budget")?, line, "budget")?;
            }
            "target" => {
                arity(line, toks, 2)?;
                once(&mut target, int::<u64>(line, toks[1], "target")?, line, "target")?;
            }
            "species" => {
                arity(line, toks, 3)?;
                let name = species_name(line, toks[1])?;
                let d: i128 = int(line, toks[2], "diversity")?;
                if d < 1 {
                    return Err(syntax(line, format!("non-positive diversity {d}")));
                }
                if !known.insert(name) {
                    return Err(syntax(line, format!("duplicate species `{name}`")));
                }
                draft.species.push((name.to_string(), d));
            }
            "arc" => {
                arity(line, toks, 4)?;
                arc_lines.push((line, toks));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let mut seen = HashSet::new();
    for (line, toks) in arc_lines {
        let (u, v) = (toks[1], toks[2]);
        for x in [u, v] {
            if !known.contains(x) {
                return Err(syntax(line, format!("unknown species `{x}`")));
            }
        }
        let g: Rational = toks[3]
            .parse()
            .map_err(|_| syntax(line, format!("malformed rational `{}`", toks[3])))?;
        if !g.is_unit_interval() {
            return Err(syntax(line, "gamma out of (0,1]"));
        }
        if u == v {
            return Err(syntax(line, format!("self-loop on `{u}`")));
        }
        if !seen.insert((u, v)) {
            return Err(syntax(line, format!("duplicate arc {u} -> {v}")));
        }
        draft.arcs.push((u.to_string(), v.to_string(), g));
    }
    let last = recs.last().map_or(1, |r| r.0);
    draft.budget = budget.ok_or_else(|| syntax(last, "missing `budget` line"))?;
    draft.target = target.ok_or_else(|| syntax(last, "missing `target` line"))?;
    Ok(PddInstance::from_draft(&draft)?)
}

pub fn serialize_instance(inst: &PddInstance) -> String {
    let mut out = String::from("pdd 1\n");
    let _ = writeln!(out, "budget {}", inst.budget());
    let _ = writeln!(out, "target {}", inst.target());
    let web = inst.web();
    for v in web.species() {
        let _ = writeln!(out, "species {} {}", web.name(v), inst.diversity_of(v));
    }
    for (i, a) in web.arcs().iter().enumerate() {
        let _ = writeln!(out, "arc {} {} {}", web.name(a.prey), web.name(a.predator), inst.gamma(i));
    }
    out
}

fn resolve(web: &FoodWeb, line: usize, tok: &str) -> Result<SpeciesId, ParseError> {
    web.lookup(tok)
        .ok_or_else(|| syntax(line, format!("unknown species `{tok}`")))
}

/// Reads an extension of `web` and checks it against the arcs of `web`.
pub fn parse_extension(text: &str, web: &FoodWeb) -> Result<TreeExtension, ParseError> {
    let recs = body(text, "ext 1")?;
    let mut root = None;
    let mut parent: Vec<Option<SpeciesId>> = vec![None; web.len()];
    let mut has_parent = vec![false; web.len()];
    for (line, toks) in &recs {
        let line = *line;
        match toks[0] {
            "root" => {
                arity(line, toks, 2)?;
                let r = resolve(web, line, toks[1])?;
                once(&mut root, r, line, "root")?;
            }
            "parent" => {
                arity(line, toks, 3)?;
                let c = resolve(web, line, toks[1])?;
                let p = resolve(web, line, toks[2])?;
                if has_parent[c.0] {
                    return Err(syntax(line, format!("second parent for `{}`", toks[1])));
                }
                has_parent[c.0] = true;
                parent[c.0] = Some(p);
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let last = recs.last().map_or(1, |r| r.0);
    match root {
        None if !web.is_empty() => return Err(syntax(last, "missing `root` line")),
        Some(r) if has_parent[r.0] => {
            return Err(ParseError::Extension(vec![ExtensionViolation::NotATree(format!(
                "root `{}` has a parent",
                web.name(r)
            ))]))
        }
        _ => {}
    }
    if let Some(v) = (0..web.len()).find(|&v| !has_parent[v] && root != Some(SpeciesId(v))) {
        return Err(ParseError::Extension(vec![ExtensionViolation::NotATree(format!(
            "`{}` has no parent",
            web.name(SpeciesId(v))
        ))]));
    }
    check_parents(web, parent).map_err(ParseError::Extension)
}

pub fn serialize_extension(t: &TreeExtension, web: &FoodWeb) -> String {
    let mut out = String::from("ext 1\n");
    if let Some(r) = t.root() {
        let _ = writeln!(out, "root {}", web.name(r));
    }
    for v in web.species() {
        if let Some(p) = t.parent(v) {
            let _ = writeln!(out, "parent {} {}", web.name(v), web.name(p));
        }
    }
    out
}

pub fn parse_set(text: &str, web: &FoodWeb) -> Result<SpeciesSet, ParseError> {
    let recs = body(text, "set 1")?;
    let mut set = SpeciesSet::empty(web.len());
    for (line, toks) in &recs {
        let line = *line;
        match toks[0] {
            "member" => {
                arity(line, toks, 2)?;
                let v = resolve(web, line, toks[1])?;
                if !set.insert(v) {
                    return Err(syntax(line, format!("duplicate member `{}`", toks[1])));
                }
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(set)
}

pub fn serialize_set(set: &SpeciesSet, web: &FoodWeb) -> String {
    let mut out = String::from("set 1\n");
    for v in set.iter() {
        let _ = writeln!(out, "member {}", web.name(v));
    }
    out
}

pub fn parse_cds(text: &str) -> Result<CdsInstance, ParseError> {
    let recs = body(text, "cds 1")?;
    let mut k = None;
    let mut names: Vec<String> = Vec::new();
    let mut capacity = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut edge_lines = Vec::new();
    for (line, toks) in &recs {
        let line = *line;
        match toks[0] {
            "k" => {
                arity(line, toks, 2)?;
                once(&mut k, int::<u64>(line, toks[1], "k")?, line, "k")?;
            }
            "vertex" => {
                arity(line, toks, 3)?;
                let name = toks[1];
                if !is_vertex_name(name) {
                    return Err(syntax(line, format!("bad vertex name `{name}`")));
                }
                let cap: u64 = int(line, toks[2], "capacity")?;
                if index.insert(name, names.len()).is_some() {
                    return Err(syntax(line, format!("duplicate vertex `{name}`")));
                }
                names.push(name.to_string());
                capacity.push(cap);
            }
            "edge" => {
                arity(line, toks, 3)?;
                edge_lines.push((line, toks));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (line, toks) in edge_lines {
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&toks[1..]) {
            *slot = *index
                .get(tok)
                .ok_or_else(|| syntax(line, format!("unknown vertex `{tok}`")))?;
        }
        let [u, v] = ends;
        if u == v {
            return Err(syntax(line, format!("self-loop on `{}`", toks[1])));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(syntax(line, format!("parallel edge {} -- {}", toks[1], toks[2])));
        }
        edges.push((u, v));
    }
    let last = recs.last().map_or(1, |r| r.0);
    let k = k.ok_or_else(|| syntax(last, "missing `k` line"))?;
    Ok(CdsInstance::from_indexed(names, edges, capacity, k)?)
}

pub fn serialize_cds(cds: &CdsInstance) -> String {
    let mut out = String::from("cds 1\n");
    let _ = writeln!(out, "k {}", cds.k());
    for v in 0..cds.len() {
        let _ = writeln!(out, "vertex {} {}", cds.name(v), cds.capacity(v));
    }
    for &(u, v) in cds.edges() {
        let _ = writeln!(out, "edge {} {}", cds.name(u), cds.name(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{greedy_extension, topo_path_extension};
    use crate::foodweb::fixtures::w1;
    use crate::random::{random_instance, GammaStyle};
    use crate::reduction::reduce_cds;
    use proptest::prelude::*;

    const W1: &str = "pdd 1\n# three species\nbudget 2\ntarget 8\n\nspecies a 5\nspecies b 3\nspecies c 4\narc a b 1\narc a c 1/2\narc b c 2/4 # not reduced\n";

    #[test]
    fn w1_parses() {
        let inst = parse_instance(W1).unwrap();
        assert_eq!(inst.to_draft(), w1(2, 8).to_draft());
        let canon = serialize_instance(&inst);
        assert_eq!(
            canon,
            "pdd 1\nbudget 2\ntarget 8\nspecies a 5\nspecies b 3\nspecies c 4\narc a b 1/1\narc a c 1/2\narc b c 1/2\n"
        );
        assert_eq!(serialize_instance(&parse_instance(&canon).unwrap()), canon);
    }

    #[test]
    fn instance_errors() {
        let base = "pdd 1\nbudget 1\ntarget 1\nspecies a 1\nspecies c 1\n";
        let err = |extra: &str| parse_instance(&format!("{base}{extra}")).unwrap_err().to_string();
        assert_eq!(err("arc a c 3/2\n"), "gamma out of (0,1] at line 6");
        assert_eq!(err("arc a c 0/1\n"), "gamma out of (0,1] at line 6");
        assert_eq!(err("arc a z 1\n"), "unknown species `z` at line 6");
        assert_eq!(err("arc a c x/2\n"), "malformed rational `x/2` at line 6");
        assert_eq!(err("arc a c 1\narc a c 1/2\n"), "duplicate arc a -> c at line 7");
        assert_eq!(err("species a 2\n"), "duplicate species `a` at line 6");
        assert_eq!(err("species b 0\n"), "non-positive diversity 0 at line 6");
        assert_eq!(err("species b$ 1\n"), "bad species name `b$` at line 6");
        assert_eq!(err("budget 3\n"), "duplicate `budget` line at line 6");
        assert_eq!(err("arc c a 1\narc a c 1\n").split(':').next(), Some("cycle through a, c"));
        assert!(parse_instance("pdd 2\n").unwrap_err().to_string().contains("header"));
        assert!(parse_instance("").is_err());
        assert!(parse_instance("pdd 1\ntarget 1\n").unwrap_err().to_string().contains("budget"));
    }

    #[test]
    fn extension_files() {
        let inst = w1(2, 8);
        let web = inst.web();
        let t = parse_extension("ext 1\nroot a\nparent c b\nparent b a\n", web).unwrap();
        assert_eq!(t.parents(), &[None, Some(SpeciesId(0)), Some(SpeciesId(1))]);
        assert_eq!(serialize_extension(&t, web), "ext 1\nroot a\nparent b a\nparent c b\n");
        assert!(parse_extension("ext 1\nroot a\nparent b a\nparent z b\n", web)
            .unwrap_err()
            .to_string()
            .contains("unknown species `z`"));
        assert!(matches!(
            parse_extension("ext 1\nroot c\nparent b c\nparent a b\n", web),
            Err(ParseError::Extension(_))
        ));
        assert!(parse_extension("ext 1\nroot a\nparent b a\n", web).is_err());
        assert!(parse_extension("ext 1\nparent b a\nparent c b\n", web).is_err());
    }

    #[test]
    fn set_files() {
        let inst = w1(2, 8);
        let s = parse_set("set 1\nmember c\nmember a\n", inst.web()).unwrap();
        assert_eq!(inst.set_names(&s), vec!["a", "c"]);
        assert_eq!(serialize_set(&s, inst.web()), "set 1\nmember a\nmember c\n");
        assert!(parse_set("set 1\nmember a\nmember a\n", inst.web()).is_err());
        assert!(parse_set("set 1\nmember q\n", inst.web()).is_err());
        assert!(parse_set("set 1\n", inst.web()).unwrap().is_empty());
    }

    #[test]
    fn cds_files() {
        let text = "cds 1\nk 2\nvertex a 1\nvertex b 1\nvertex c 2\nvertex d 2\nedge a b\nedge b d\nedge b c\nedge d c\n";
        let cds = parse_cds(text).unwrap();
        assert_eq!((cds.len(), cds.edges().len(), cds.k()), (4, 4, 2));
        assert_eq!(serialize_cds(&cds), text);
        assert!(parse_cds("cds 1\nk 1\nvertex a 0\nedge a a\n").unwrap_err().to_string().contains("line 4"));
        assert!(parse_cds("cds 1\nk 1\nvertex a.b 0\n").is_err());
        assert!(parse_cds("cds 1\nvertex a 0\n").is_err());
        assert!(parse_cds("cds 1\nk 1\nvertex a 0\nvertex b 0\nedge a b\nedge b a\n").is_err());
    }

    #[test]
    fn reduced_instance_names_survive_files() {
        let cds = parse_cds("cds 1\nk 1\nvertex x 1\nvertex y 0\nedge x y\n").unwrap();
        let (inst, _) = reduce_cds(&cds).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap().to_draft(), inst.to_draft());
    }

    proptest! {
        #[test]
        fn instance_roundtrip(seed in any::<u64>(), n in 1usize..9, p in 0.0f64..1.0, den in 1u32..7) {
            let inst = random_instance(seed, n, p, &GammaStyle::SmallDenominator(den)).unwrap();
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(back.to_draft(), inst.to_draft());
            prop_assert_eq!(serialize_instance(&back), text);
        }

        #[test]
        fn extension_and_set_roundtrip(seed in any::<u64>(), n in 1usize..9, mask in any::<u16>()) {
            let inst = random_instance(seed, n, 0.4, &GammaStyle::Alpha(Rational::new(1, 2))).unwrap();
            let web = inst.web();
            for t in [topo_path_extension(web), greedy_extension(web)] {
                let back = parse_extension(&serialize_extension(&t, web), web).unwrap();
                prop_assert_eq!(back, t);
            }
            let set = SpeciesSet::from_ids(n, (0..n).filter(|i| mask >> i & 1 == 1).map(SpeciesId));
            prop_assert_eq!(parse_set(&serialize_set(&set, web), web).unwrap(), set);
        }
    }
}
