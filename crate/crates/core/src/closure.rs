//! Closing zig-zag complexes into link complexes, and the comparisons
//! against the cube engine built on top of that.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cobcat::{
    frobenius_map, homology, BigradedHomology, ChainComplex, Frobenius, LaurentPoly, SparseMatrix, Summand,
};
use crate::cube::{self, build_diagram, Closure, OrientationRequest, OrientationType, PDDiagram};
use crate::error::{domain, Error, Result};
use crate::fraction::{canonical_form, canonical_standard_form, ContinuedFraction, Fraction, Notation, StandardForm};
use crate::zigzag::{build_zigzag, Kind, MorphismString, Smoothing, ZigObject, ZigZagComplex};

/// Circles left by the numerator closure of an object.
fn circles(s: Smoothing) -> usize {
    match s {
        Smoothing::Inf => 1,
        Smoothing::Zero => 2,
    }
}

/// Matrix of a letter after closing, in the direction of the differential.
fn letter_map(kind: Kind, src: Smoothing, tgt: Smoothing) -> Result<SparseMatrix> {
    let k = circles(src);
    match kind {
        Kind::A => Ok(frobenius_map(Frobenius::Dot(0), 1)?.scaled(&BigInt::from(2))),
        Kind::B => Ok(SparseMatrix::zeros(2, 2)),
        Kind::C | Kind::D => {
            let x0 = frobenius_map(Frobenius::Dot(0), 2)?;
            let x1 = frobenius_map(Frobenius::Dot(1), 2)?;
            let sign = if kind == Kind::C { BigInt::one() } else { -BigInt::one() };
            let mut m = x0;
            for (r, c, v) in x1.entries() {
                m.add(r, c, v * &sign);
            }
            Ok(m)
        }
        Kind::S | Kind::R => match (src, tgt) {
            (Smoothing::Inf, Smoothing::Zero) => frobenius_map(Frobenius::Split(0), k),
            (Smoothing::Zero, Smoothing::Inf) => frobenius_map(Frobenius::Merge(0, 1), k),
            _ => Err(Error::Typing(format!("a saddle cannot join two {src:?} objects"))),
        },
    }
}

/// The numerator closure of a zig-zag complex as a chain complex of
/// `V^{⊗k}` summands, one per object.
pub fn close_zigzag(zz: &ZigZagComplex) -> Result<ChainComplex> {
    let (lo, hi) = zz.height_span();
    let levels = (hi - lo + 1) as usize;
    let mut objects: Vec<Vec<Summand>> = vec![Vec::new(); levels];
    // (level, summand index, offset within the level)
    let mut place = Vec::with_capacity(zz.objects.len());
    let mut dims = vec![0usize; levels];
    for (i, o) in zz.objects.iter().enumerate() {
        let lvl = (o.height - lo) as usize;
        let s = Summand::new(format!("{i}"), circles(o.smoothing), o.qgrading);
        place.push((lvl, dims[lvl]));
        dims[lvl] += s.rank();
        objects[lvl].push(s);
    }
    let mut diffs: Vec<SparseMatrix> = (0..levels - 1).map(|l| SparseMatrix::zeros(dims[l + 1], dims[l])).collect();
    for (i, letter) in zz.edges() {
        let (src, tgt) = if letter.is_backward() { (i + 1, i) } else { (i, i + 1) };
        let (ls, os) = place[src];
        let (lt, ot) = place[tgt];
        if lt != ls + 1 {
            return domain(format!("letter {i} ({letter}) does not raise the height by one"));
        }
        let m = letter_map(letter.kind(), zz.objects[src].smoothing, zz.objects[tgt].smoothing)?;
        for (r, c, v) in m.entries() {
            diffs[ls].add(ot + r, os + c, v.clone());
        }
    }
    ChainComplex::new(lo, objects, diffs)
}

/// The standard form both engines use for `n`: a sign-coherent standard
/// form is kept as written, anything else is replaced by the canonical
/// standard form of its fraction. `None` stands for the tangle `[∞]`.
pub fn working_form(n: &Notation) -> Result<Option<StandardForm>> {
    if let Notation::Standard(sf) = n {
        if sf.is_sign_coherent() {
            return Ok(Some(sf.clone()));
        }
    }
    let f = n.fraction();
    if f.is_infinite() {
        return Ok(None);
    }
    Ok(Some(canonical_standard_form(&f)?))
}

fn infinity_zigzag() -> ZigZagComplex {
    ZigZagComplex {
        objects: vec![ZigObject { smoothing: Smoothing::Inf, height: 0, qgrading: 0 }],
        string: MorphismString::default(),
        mirrored: false,
    }
}

/// Everything the fast engine produced for one closure.
#[derive(Debug, Clone)]
pub struct FastResult {
    /// The form whose numerator closure was computed (after rotating, for
    /// the denominator closure).
    pub form: Option<StandardForm>,
    pub zigzag: ZigZagComplex,
    pub orientation: Option<OrientationType>,
    pub homology: BigradedHomology,
}

/// The form whose numerator closure equals the requested closure of `n`.
pub fn numerator_form(n: &Notation, closure: Closure) -> Result<Option<StandardForm>> {
    match closure {
        Closure::Numerator => working_form(n),
        Closure::Denominator => {
            let f = n.fraction().rotate();
            if f.is_infinite() {
                Ok(None)
            } else {
                Ok(Some(canonical_standard_form(&f)?))
            }
        }
    }
}

/// Khovanov homology of a closure of `n` through the zig-zag complex.
///
/// The denominator closure `D(T)` is computed as `N` of the tangle rotated a
/// quarter turn, whose fraction is `-1/F(T)`.
pub fn kh_fast(n: &Notation, closure: Closure, orient: OrientationRequest) -> Result<FastResult> {
    let form = numerator_form(n, closure)?;
    let (zigzag, orientation) = match &form {
        Some(sf) => {
            let b = build_zigzag(sf, orient)?;
            (b.complex, Some(b.orientation))
        }
        None => (infinity_zigzag(), None),
    };
    let homology = homology(&close_zigzag(&zigzag)?);
    Ok(FastResult { form, zigzag, orientation, homology })
}

/// The PD diagram the cube engine uses for the same closure.
pub fn oracle_diagram(n: &Notation, closure: Closure, orient: OrientationRequest) -> Result<PDDiagram> {
    match working_form(n)? {
        Some(sf) => Ok(build_diagram(&sf, closure, orient)?.pd),
        None => {
            let loops = if closure == Closure::Numerator { 1 } else { 2 };
            PDDiagram::new(Vec::new(), loops)
        }
    }
}

pub fn kh_cube(n: &Notation, closure: Closure, orient: OrientationRequest, bound: usize) -> Result<BigradedHomology> {
    cube::kh_oracle(&oracle_diagram(n, closure, orient)?, bound)
}

/// Unnormalized Jones polynomial from the fast engine.
pub fn jones_fast(n: &Notation, closure: Closure, orient: OrientationRequest) -> Result<LaurentPoly> {
    Ok(kh_fast(n, closure, orient)?.homology.graded_euler())
}

// ---------------------------------------------------------------------------
// Tables

/// Free ranks and torsion laid out with `q` descending by two and `t`
/// ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KhTable {
    pub ts: Vec<i64>,
    pub qs: Vec<i64>,
    pub free: Vec<Vec<usize>>,
    pub torsion: Vec<Vec<String>>,
}

pub fn kh_table(h: &BigradedHomology) -> KhTable {
    let cells: Vec<((i64, i64), _)> = h.entries().filter(|(_, g)| !g.is_zero()).collect();
    if cells.is_empty() {
        return KhTable { ts: Vec::new(), qs: Vec::new(), free: Vec::new(), torsion: Vec::new() };
    }
    let (tmin, tmax) = (cells.iter().map(|c| c.0 .0).min().unwrap(), cells.iter().map(|c| c.0 .0).max().unwrap());
    let (qmin, qmax) = (cells.iter().map(|c| c.0 .1).min().unwrap(), cells.iter().map(|c| c.0 .1).max().unwrap());
    let ts: Vec<i64> = (tmin..=tmax).collect();
    let qs: Vec<i64> = (0..).map(|k| qmax - 2 * k).take_while(|&q| q >= qmin).collect();
    let mut free = vec![vec![0; ts.len()]; qs.len()];
    let mut torsion = vec![vec![String::new(); ts.len()]; qs.len()];
    for ((t, q), g) in cells {
        let (r, c) = (((qmax - q) / 2) as usize, (t - tmin) as usize);
        free[r][c] = g.free;
        torsion[r][c] = g.torsion.iter().map(|x| format!("Z/{x}")).collect::<Vec<_>>().join("+");
    }
    KhTable { ts, qs, free, torsion }
}

impl KhTable {
    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().flatten().any(|s| !s.is_empty())
    }

    fn grid(&self, torsion: bool) -> Vec<Vec<String>> {
        let mut rows =
            vec![std::iter::once("q\\t".to_string()).chain(self.ts.iter().map(|t| t.to_string())).collect::<Vec<_>>()];
        for (r, q) in self.qs.iter().enumerate() {
            let mut row = vec![q.to_string()];
            for c in 0..self.ts.len() {
                row.push(if torsion {
                    self.torsion[r][c].clone()
                } else if self.free[r][c] > 0 {
                    self.free[r][c].to_string()
                } else {
                    String::new()
                });
            }
            rows.push(row);
        }
        rows
    }

    /// Tab-separated free ranks, then the torsion table after a blank line
    /// when there is any torsion.
    pub fn to_tsv(&self) -> String {
        if self.qs.is_empty() {
            return String::new();
        }
        let emit = |g: Vec<Vec<String>>| g.into_iter().map(|row| row.join("\t") + "\n").collect::<String>();
        let mut out = emit(self.grid(false));
        if self.has_torsion() {
            let mut g = self.grid(true);
            g[0][0] = "torsion".into();
            out.push('\n');
            out.push_str(&emit(g));
        }
        out
    }

    pub fn to_ascii(&self) -> String {
        if self.qs.is_empty() {
            return String::new();
        }
        let mut out = String::new();
        let mut tables = vec![("free", self.grid(false))];
        if self.has_torsion() {
            tables.push(("torsion", self.grid(true)));
        }
        for (n, (name, g)) in tables.into_iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            let widths: Vec<usize> =
                (0..g[0].len()).map(|c| g.iter().map(|r| r[c].chars().count()).max().unwrap_or(0).max(1)).collect();
            let _ = writeln!(out, "{name}");
            for (i, row) in g.iter().enumerate() {
                let cells: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:>w$}")).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
                if i == 0 {
                    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                    let _ = writeln!(out, "|-{}-|", rule.join("-+-"));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Structure of rational homology

/// Whether the rational homology of a knot is a pawn `q^{s-1} + q^{s+1}` at
/// `t = 0` plus knight moves `t^k q^j (1 + t q^4)`. Returns the `s` found.
pub fn knight_move_decomposition(h: &BigradedHomology) -> Option<i64> {
    let mut ranks: BTreeMap<(i64, i64), i64> =
        h.entries().filter(|(_, g)| g.free > 0).map(|(k, g)| (k, g.free as i64)).collect();
    let at0: Vec<i64> = ranks.keys().filter(|k| k.0 == 0).map(|k| k.1).collect();
    // The pawn sits at the lowest q in degree 0 paired with q + 2 above it,
    // or, if that fails, at some other pair; try every candidate.
    for &q in &at0 {
        let mut trial = ranks.clone();
        let take = |m: &mut BTreeMap<(i64, i64), i64>, k: (i64, i64)| -> bool {
            match m.get_mut(&k) {
                Some(v) if *v > 0 => {
                    *v -= 1;
                    true
                }
                _ => false,
            }
        };
        if !(take(&mut trial, (0, q)) && take(&mut trial, (0, q + 2))) {
            continue;
        }
        let mut ok = true;
        let keys: Vec<(i64, i64)> = trial.keys().copied().collect();
        for k in keys {
            while trial[&k] > 0 {
                if !(take(&mut trial, k) && take(&mut trial, (k.0 + 1, k.1 + 4))) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            ranks = trial;
            debug_assert!(ranks.values().all(|&v| v == 0));
            return Some(q + 1);
        }
    }
    None
}

/// All free ranks lie on the two diagonals `q - 2t = s ± 1`.
pub fn is_thin(h: &BigradedHomology, s: i64) -> bool {
    h.entries().filter(|(_, g)| g.free > 0).all(|((t, q), _)| (q - 2 * t - s).abs() == 1)
}

// ---------------------------------------------------------------------------
// Sweeps over rational links

/// One rational link up to isotopy, with the canonical fraction used for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepEntry {
    pub fraction: Fraction,
    pub form: StandardForm,
    pub crossings: usize,
}

/// `(p, min(q mod p, q⁻¹ mod p))`, equal exactly for isotopic `N(p/q)`.
pub fn link_key(f: &Fraction) -> (BigInt, BigInt) {
    let p = f.numer().abs();
    let q = if f.numer().is_negative() { -f.denom() } else { f.denom().clone() };
    if p.is_one() {
        return (p, BigInt::zero());
    }
    if p.is_zero() {
        return (p, BigInt::one());
    }
    let q = num_integer::Integer::mod_floor(&q, &p);
    let inv = (1..p.to_u64().unwrap_or(0))
        .map(BigInt::from)
        .find(|x| num_integer::Integer::mod_floor(&(x * &q), &p).is_one())
        .unwrap_or_else(|| q.clone());
    (p, q.min(inv))
}

/// Every rational link with at most `max` crossings, mirrors included, once
/// each, via its canonical continued fraction.
pub fn sweep_links(max: usize) -> Vec<SweepEntry> {
    fn rec(prefix: &mut Vec<i64>, left: usize, out: &mut Vec<Vec<i64>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        let lo = if prefix.is_empty() { 0 } else { 1 };
        for a in lo..=left as i64 {
            prefix.push(a);
            rec(prefix, left - a as usize, out);
            prefix.pop();
        }
    }
    let mut seqs = Vec::new();
    rec(&mut Vec::new(), max, &mut seqs);
    let mut best: BTreeMap<(BigInt, BigInt), SweepEntry> = BTreeMap::new();
    for s in seqs {
        let Ok(cf) = ContinuedFraction::from_i64(&s) else { continue };
        let f = cf.eval();
        if f.is_infinite() || canonical_form(&f).ok().as_ref() != Some(&cf) {
            continue;
        }
        for g in [f.clone(), f.negate()] {
            let form = canonical_standard_form(&g).expect("finite fraction");
            let crossings = form.crossing_count();
            let entry = SweepEntry { fraction: g.clone(), form, crossings };
            best.entry(link_key(&g))
                .and_modify(|e| {
                    if crossings < e.crossings {
                        *e = entry.clone();
                    }
                })
                .or_insert(entry);
        }
    }
    let mut out: Vec<SweepEntry> = best.into_values().collect();
    out.sort_by(|a, b| {
        a.crossings
            .cmp(&b.crossings)
            .then_with(|| a.fraction.partial_cmp(&b.fraction).unwrap_or(std::cmp::Ordering::Equal))
    });
    out
}

/// Outcome of running both engines on one closure.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub fast: BigradedHomology,
    pub oracle: BigradedHomology,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.fast == self.oracle
    }

    /// Cells where the two engines disagree.
    pub fn differences(&self) -> Vec<((i64, i64), String, String)> {
        let mut keys: Vec<(i64, i64)> = self.fast.entries().chain(self.oracle.entries()).map(|(k, _)| k).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter_map(|(t, q)| {
                let (a, b) = (self.fast.get(t, q), self.oracle.get(t, q));
                (a != b).then(|| ((t, q), a.to_string(), b.to_string()))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "agree": self.agrees(),
            "fast": self.fast.to_json(),
            "oracle": self.oracle.to_json(),
            "differences": self.differences().into_iter().map(|((t, q), a, b)| json!({"h": t, "q": q, "fast": a, "oracle": b})).collect::<Vec<_>>(),
        })
    }
}

pub fn compare(n: &Notation, closure: Closure, orient: OrientationRequest, bound: usize) -> Result<Comparison> {
    let fast = kh_fast(n, closure, orient)?.homology;
    let oracle = kh_cube(n, closure, orient, bound)?;
    Ok(Comparison { fast, oracle })
}
