//! Built-in knot table with reference polynomials.
//!
//! References are stored in the usual tabulated conventions and converted on
//! load: Jones by `t -> t^-1`, HOMFLY by `v -> a^-1`.

use std::sync::OnceLock;

use crate::poly::{LaurentPoly, LaurentPoly2};
use crate::rational::parse_q;

use super::{connected_sum, BraidWord, KnotError, PlanarDiagram};

const DATA: &str = include_str!("../../data/knots.tsv");

#[derive(Clone, Debug)]
pub struct KnotEntry {
    pub name: String,
    pub crossings: usize,
    pub pd: PlanarDiagram,
    pub braid: Option<BraidWord>,
    /// Jones polynomial in the local convention.
    pub jones_ref: LaurentPoly,
    /// HOMFLY polynomial in `(a, z)`, local convention.
    pub homfly_ref: LaurentPoly2,
}

impl KnotEntry {
    pub fn mirror(&self) -> KnotEntry {
        let mut h = LaurentPoly2::zero(('a', 'z'));
        for ((ea, ez), c) in self.homfly_ref.terms() {
            h.add_term((-ea, ez), c.clone());
        }
        KnotEntry {
            name: format!("{}*", self.name),
            crossings: self.crossings,
            pd: self.pd.mirror(),
            braid: self.braid.as_ref().map(|b| BraidWord::new(b.strands, b.word.iter().map(|g| -g).collect()).expect("mirror of a valid braid")),
            jones_ref: self.jones_ref.power_map(-1),
            homfly_ref: h,
        }
    }

    pub fn sum(&self, other: &KnotEntry) -> Result<KnotEntry, KnotError> {
        Ok(KnotEntry {
            name: format!("{}#{}", self.name, other.name),
            crossings: self.crossings + other.crossings,
            pd: connected_sum(&self.pd, &other.pd)?,
            braid: None,
            jones_ref: &self.jones_ref * &other.jones_ref,
            homfly_ref: &self.homfly_ref * &other.homfly_ref,
        })
    }
}

fn bad(line: usize, what: &str) -> KnotError {
    KnotError::MalformedPd(format!("knot table line {line}: {what}"))
}

fn parse_jones(s: &str, line: usize) -> Result<LaurentPoly, KnotError> {
    let mut p = LaurentPoly::zero('t');
    for tok in s.split_whitespace() {
        let (e, c) = tok.split_once(':').ok_or_else(|| bad(line, tok))?;
        let e: i64 = e.parse().map_err(|_| bad(line, tok))?;
        p.add_term(-e, parse_q(c).ok_or_else(|| bad(line, tok))?);
    }
    Ok(p)
}

fn parse_homfly(s: &str, line: usize) -> Result<LaurentPoly2, KnotError> {
    let mut p = LaurentPoly2::zero(('a', 'z'));
    for tok in s.split_whitespace() {
        let (e, c) = tok.split_once(':').ok_or_else(|| bad(line, tok))?;
        let (ev, ez) = e.split_once(',').ok_or_else(|| bad(line, tok))?;
        let ev: i64 = ev.parse().map_err(|_| bad(line, tok))?;
        let ez: i64 = ez.parse().map_err(|_| bad(line, tok))?;
        p.add_term((-ev, ez), parse_q(c).ok_or_else(|| bad(line, tok))?);
    }
    Ok(p)
}

fn load() -> Result<Vec<KnotEntry>, KnotError> {
    let mut out: Vec<KnotEntry> = Vec::new();
    for (n, line) in DATA.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let name = cols[0].to_string();
        if cols.get(3).map_or(true, |c| c.is_empty()) {
            let mut e = lookup(&out, cols[2])?;
            e.name = name;
            out.push(e);
            continue;
        }
        if cols.len() < 6 {
            return Err(bad(line_no, "expected six columns"));
        }
        let crossings = cols[1].parse().map_err(|_| bad(line_no, "crossing count"))?;
        let pd = PlanarDiagram::parse(cols[2])?;
        if pd.crossing_count() != crossings {
            return Err(bad(line_no, "crossing count does not match PD"));
        }
        out.push(KnotEntry {
            name,
            crossings,
            pd,
            braid: Some(BraidWord::parse(cols[3])?),
            jones_ref: parse_jones(cols[4], line_no)?,
            homfly_ref: parse_homfly(cols[5], line_no)?,
        });
    }
    Ok(out)
}

fn lookup(entries: &[KnotEntry], name: &str) -> Result<KnotEntry, KnotError> {
    let name = name.trim();
    if name.contains('#') {
        let mut parts = name.split('#');
        let mut acc = lookup(entries, parts.next().unwrap_or(""))?;
        for p in parts {
            acc = acc.sum(&lookup(entries, p)?)?;
        }
        return Ok(acc);
    }
    if let Some(base) = name.strip_suffix('*') {
        return Ok(lookup(entries, base)?.mirror());
    }
    let key = if name == "unknot" { "0_1" } else { name };
    entries.iter().find(|e| e.name == key).cloned().ok_or_else(|| KnotError::UnknownKnot(name.to_string()))
}

/// All table entries, in file order.
pub fn table() -> &'static [KnotEntry] {
    static T: OnceLock<Vec<KnotEntry>> = OnceLock::new();
    T.get_or_init(|| load().expect("built-in knot table is well formed"))
}

/// Looks up `name`; accepts `unknot`, a trailing `*` for the mirror image and
/// `#` for connected sums.
pub fn knot_by_name(name: &str) -> Result<KnotEntry, KnotError> {
    lookup(table(), name)
}
