//! Plain-text instance, coloring and trace files.
//!
//! Instances: a `p t` header, then `precolor u v c` and `list u v : c ...`
//! records. Colorings: the same header, then `edge u v c`. Vertices and
//! colors are 1-based; `#` starts a comment, and `#! generator ...` carries
//! generator metadata.

use std::fmt::{self, Write as _};

use edge_extend::model::{colors_for_order, Color, CompleteGraph, EdgeColoring, EdgeId, Vertex};
use edge_extend::num_rational::Ratio;
use edge_extend::oracle::{GeneratorMeta, Instance};
use edge_extend::swap::SwapTrace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

/// Non-blank lines with comments stripped, numbered from 1. Metadata lines
/// are passed through whole.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let l = raw.trim();
        if l.starts_with("#!") {
            return Some((i + 1, l));
        }
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn num(line: usize, tok: Option<&str>, what: &str) -> Result<usize, ParseError> {
    let Some(tok) = tok else {
        return err(line, format!("missing {what}"));
    };
    tok.parse().or_else(|_| err(line, format!("bad {what} `{tok}`")))
}

fn header(line: usize, rec: &str) -> Result<(usize, usize), ParseError> {
    let mut it = rec.split_whitespace();
    let p = num(line, it.next(), "order")?;
    let t = num(line, it.next(), "color count")?;
    if it.next().is_some() {
        return err(line, "header is `p t`");
    }
    if p < 2 {
        return err(line, format!("order {p} is below 2"));
    }
    if t != colors_for_order(p) {
        return err(line, format!("K_{p} uses {} colors, header says {t}", colors_for_order(p)));
    }
    Ok((p, t))
}

fn pair(line: usize, p: usize, u: usize, v: usize) -> Result<EdgeId, ParseError> {
    if u == 0 || v == 0 || u > p || v > p {
        return err(line, format!("vertex out of 1..={p}"));
    }
    if u == v {
        return err(line, "loop edge");
    }
    Ok(EdgeId::of(u - 1, v - 1))
}

fn color(line: usize, t: usize, c: usize) -> Result<Color, ParseError> {
    if c == 0 || c > t {
        return err(line, format!("color {c} out of 1..={t}"));
    }
    Ok(c)
}

/// Parses `1/5`, `0.2` or `1` exactly.
pub fn parse_ratio(s: &str) -> Option<Ratio<i64>> {
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (i64, i64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0).then(|| Ratio::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        return Some(Ratio::new(int * den + frac, den));
    }
    s.parse().ok().map(Ratio::from_integer)
}

fn parse_meta(line: usize, rec: &str) -> Result<Option<GeneratorMeta>, ParseError> {
    let mut it = rec.trim_start_matches("#!").split_whitespace();
    if it.next() != Some("generator") {
        return Ok(None);
    }
    let (mut seed, mut alpha, mut beta) = (None, None, None);
    for kv in it {
        let Some((k, v)) = kv.split_once('=') else {
            return err(line, format!("bad metadata `{kv}`"));
        };
        match k {
            "seed" => seed = v.parse().ok(),
            "alpha" => alpha = parse_ratio(v),
            "beta" => beta = parse_ratio(v),
            _ => return err(line, format!("unknown metadata key `{k}`")),
        }
    }
    match (seed, alpha, beta) {
        (Some(seed), Some(alpha), Some(beta)) => Ok(Some(GeneratorMeta { seed, alpha, beta })),
        _ => err(line, "generator metadata needs seed, alpha and beta"),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut recs = records(text).peekable();
    let mut meta = None;
    while let Some(&(line, rec)) = recs.peek() {
        if !rec.starts_with("#!") {
            break;
        }
        meta = parse_meta(line, rec)?.or(meta);
        recs.next();
    }
    let Some((line, rec)) = recs.next() else {
        return err(0, "empty instance");
    };
    let (p, _) = header(line, rec)?;
    let mut inst = Instance::empty(p).expect("order checked");
    let t = inst.colors;
    // Line of the record that introduced each precoloring.
    let mut pre_line = vec![0usize; inst.graph().edge_count()];
    for (line, rec) in recs {
        if rec.starts_with("#!") {
            meta = parse_meta(line, rec)?.or(meta);
            continue;
        }
        let (head, rest) = rec.split_once(char::is_whitespace).unwrap_or((rec, ""));
        match head {
            "precolor" => {
                let mut it = rest.split_whitespace();
                let u = num(line, it.next(), "vertex")?;
                let v = num(line, it.next(), "vertex")?;
                let c = color(line, t, num(line, it.next(), "color")?)?;
                if it.next().is_some() {
                    return err(line, "precolor takes `u v c`");
                }
                let e = pair(line, p, u, v)?;
                if inst.phi.is_colored(e) {
                    return err(line, format!("edge {u} {v} precolored twice"));
                }
                if inst.lists.contains(e, c) {
                    return err(line, format!("edge {u} {v} is precolored {c}, which its list forbids"));
                }
                if let Err(e) = inst.phi.set(e, c) {
                    return err(line, format!("improper precoloring: {e}"));
                }
                pre_line[e.0] = line;
            }
            "list" => {
                let Some((ends, cols)) = rest.split_once(':') else {
                    return err(line, "list takes `u v : c1 c2 ...`");
                };
                let mut it = ends.split_whitespace();
                let u = num(line, it.next(), "vertex")?;
                let v = num(line, it.next(), "vertex")?;
                if it.next().is_some() {
                    return err(line, "list takes `u v : c1 c2 ...`");
                }
                let e = pair(line, p, u, v)?;
                for tok in cols.split_whitespace() {
                    let c = color(line, t, num(line, Some(tok), "color")?)?;
                    if inst.phi.get(e) == Some(c) {
                        return err(line, format!("list of {u} {v} forbids its precolor {c} (line {})", pre_line[e.0]));
                    }
                    inst.lists.insert(e, c).expect("color in range");
                }
            }
            _ => return err(line, format!("unknown record `{head}`")),
        }
    }
    inst.meta = meta;
    Ok(inst)
}

fn ends(g: &CompleteGraph, e: EdgeId) -> (Vertex, Vertex) {
    let (a, b) = g.endpoints(e);
    (a.min(b) + 1, a.max(b) + 1)
}

/// Edges in canonical file order: by first vertex, then second.
fn sorted_edges(g: &CompleteGraph) -> Vec<EdgeId> {
    let mut es: Vec<EdgeId> = g.edges().collect();
    es.sort_by_key(|&e| ends(g, e));
    es
}

pub fn ratio_str(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: sorted records, single spaces, LF endings.
pub fn serialize_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut s = String::new();
    if let Some(m) = &inst.meta {
        writeln!(s, "#! generator seed={} alpha={} beta={}", m.seed, ratio_str(m.alpha), ratio_str(m.beta)).unwrap();
    }
    writeln!(s, "{} {}", inst.order, inst.colors).unwrap();
    let es = sorted_edges(g);
    for &e in &es {
        if let Some(c) = inst.phi.get(e) {
            let (u, v) = ends(g, e);
            writeln!(s, "precolor {u} {v} {c}").unwrap();
        }
    }
    for &e in &es {
        let l = inst.lists.list(e);
        if !l.is_empty() {
            let (u, v) = ends(g, e);
            let mut l = l.to_vec();
            l.sort_unstable();
            let cols: Vec<String> = l.iter().map(|c| c.to_string()).collect();
            writeln!(s, "list {u} {v} : {}", cols.join(" ")).unwrap();
        }
    }
    s
}

/// A coloring as read from a file; nothing is checked beyond ranges, so
/// improper or partial colorings can be reported by `verify`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringFile {
    pub order: usize,
    pub colors: usize,
    /// Color per edge id, 0 where no record was given.
    pub edge_colors: Vec<Color>,
}

pub fn parse_coloring(text: &str) -> Result<ColoringFile, ParseError> {
    let mut recs = records(text).filter(|r| !r.1.starts_with("#!"));
    let Some((line, rec)) = recs.next() else {
        return err(0, "empty coloring");
    };
    let (p, t) = header(line, rec)?;
    let g = CompleteGraph::new(p);
    let mut edge_colors = vec![0; g.edge_count()];
    for (line, rec) in recs {
        let mut it = rec.split_whitespace();
        if it.next() != Some("edge") {
            return err(line, "expected `edge u v c`");
        }
        let u = num(line, it.next(), "vertex")?;
        let v = num(line, it.next(), "vertex")?;
        let c = color(line, t, num(line, it.next(), "color")?)?;
        if it.next().is_some() {
            return err(line, "edge takes `u v c`");
        }
        let e = pair(line, p, u, v)?;
        if edge_colors[e.0] != 0 {
            return err(line, format!("edge {u} {v} given twice"));
        }
        edge_colors[e.0] = c;
    }
    Ok(ColoringFile {
        order: p,
        colors: t,
        edge_colors,
    })
}

pub fn serialize_coloring(h: &EdgeColoring) -> String {
    let g = h.graph();
    let mut s = String::new();
    writeln!(s, "{} {}", g.order(), h.num_colors()).unwrap();
    for e in sorted_edges(g) {
        if let Some(c) = h.get(e) {
            let (u, v) = ends(g, e);
            writeln!(s, "edge {u} {v} {c}").unwrap();
        }
    }
    s
}

/// One `swap a b c d c1 c2` line per logged swap: the cycle (1-based) and
/// its colors before the swap, first edge first.
pub fn serialize_trace(trace: &SwapTrace) -> String {
    let mut s = String::new();
    for r in trace.records() {
        let [a, b, c, d] = r.cycle.map(|v| v + 1);
        writeln!(s, "swap {a} {b} {c} {d} {} {}", r.colors.0, r.colors.1).unwrap();
    }
    s
}

/// Graphviz rendering, edges colored by palette index around the hue
/// circle.
pub fn coloring_to_dot(c: &ColoringFile) -> String {
    let g = CompleteGraph::new(c.order);
    let mut s = String::new();
    writeln!(s, "graph K{} {{", c.order).unwrap();
    writeln!(s, "  layout=circo;").unwrap();
    writeln!(s, "  node [shape=circle];").unwrap();
    for v in 1..=c.order {
        writeln!(s, "  {v};").unwrap();
    }
    for e in sorted_edges(&g) {
        let col = c.edge_colors[e.0];
        let (u, v) = ends(&g, e);
        if col == 0 {
            writeln!(s, "  {u} -- {v} [style=dashed];").unwrap();
        } else {
            let hue = (col - 1) as f64 / c.colors as f64;
            writeln!(s, "  {u} -- {v} [label={col}, color=\"{hue:.3} 0.850 0.900\"];").unwrap();
        }
    }
    s.push_str("}\n");
    s
}
