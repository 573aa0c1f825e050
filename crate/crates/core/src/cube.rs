//! The reference engine: oriented planar diagrams of rational links and the
//! full cube of resolutions.
//!
//! Crossings are stored in PD form `[a, b, c, d]`, counterclockwise, with
//! `a` the incoming under-edge. The 0-smoothing joins `a–b` and `c–d`, the
//! 1-smoothing joins `a–d` and `b–c`. A crossing is positive when the
//! over-strand runs from `d` to `b`; the 0-smoothing of a positive crossing
//! is then its oriented resolution.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::cobcat::{homology, BigradedHomology, ChainComplex, LaurentPoly, SparseMatrix, Summand};
use crate::error::{domain, Error, Result};
use crate::fraction::StandardForm;

/// Default cap on the number of crossings the cube will expand.
pub const DEFAULT_MAX_CROSSINGS: usize = 14;

/// The oracle cap, honouring `KH_MAX_CROSSINGS` when it parses.
pub fn oracle_bound() -> usize {
    std::env::var("KH_MAX_CROSSINGS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_CROSSINGS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Join NW–NE and SW–SE.
    Numerator,
    /// Join NW–SW and NE–SE.
    Denominator,
}

/// Which pair of tangle endpoints are entered by the orientation.
///
/// For the numerator closure type II enters at {NW, SW} and type I at
/// {NW, SE}; for the denominator closure type II enters at {NW, NE} and
/// type I at {NW, SE}. Reversing every strand gives the complementary pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationType {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationRequest {
    Auto,
    Fixed(OrientationType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub edges: [usize; 4],
    pub sign: i8,
}

impl Crossing {
    /// Slot indices `(incoming over, outgoing over)`.
    fn over_slots(&self) -> (usize, usize) {
        if self.sign > 0 {
            (3, 1)
        } else {
            (1, 3)
        }
    }

    fn is_incoming(&self, slot: usize) -> bool {
        slot == 0 || slot == self.over_slots().0
    }
}

/// An oriented link diagram in PD form, plus crossingless circles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PDDiagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    /// Edge labels renumbered densely, per crossing.
    dense: Vec<[usize; 4]>,
    edge_count: usize,
}

impl PDDiagram {
    /// Checks that every label occurs twice, once entering and once leaving
    /// a crossing.
    pub fn new(crossings: Vec<Crossing>, free_loops: usize) -> Result<Self> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut seen: Vec<(usize, usize)> = Vec::new();
        let mut dense = Vec::with_capacity(crossings.len());
        for x in &crossings {
            if x.sign != 1 && x.sign != -1 {
                return domain(format!("crossing sign must be ±1, got {}", x.sign));
            }
            let mut row = [0; 4];
            for (k, &label) in x.edges.iter().enumerate() {
                let next = index.len();
                let id = *index.entry(label).or_insert(next);
                if id == seen.len() {
                    seen.push((0, 0));
                }
                if x.is_incoming(k) {
                    seen[id].0 += 1;
                } else {
                    seen[id].1 += 1;
                }
                row[k] = id;
            }
            dense.push(row);
        }
        let labels: HashMap<usize, usize> = index.iter().map(|(&l, &i)| (i, l)).collect();
        for (id, &(i, o)) in seen.iter().enumerate() {
            if i + o != 2 {
                return domain(format!("edge {} occurs {} times", labels[&id], i + o));
            }
            if i != 1 {
                return Err(Error::Orientation(format!(
                    "edge {} is {} at both ends",
                    labels[&id],
                    if i == 2 { "incoming" } else { "outgoing" }
                )));
            }
        }
        Ok(PDDiagram { crossings, free_loops, dense, edge_count: seen.len() })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.len() - self.n_plus()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|x| x.sign as i64).sum()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.crossings.iter().map(|x| x.sign).collect()
    }

    /// Component of each dense edge, and the total component count.
    fn edge_components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.edge_count);
        for e in &self.dense {
            uf.union(e[0], e[2]);
            uf.union(e[1], e[3]);
        }
        let mut ids = HashMap::new();
        let comp: Vec<usize> = (0..self.edge_count)
            .map(|e| {
                let r = uf.find(e);
                let n = ids.len();
                *ids.entry(r).or_insert(n)
            })
            .collect();
        (comp, ids.len() + self.free_loops)
    }

    pub fn components(&self) -> usize {
        self.edge_components().1
    }

    /// Half the signed count of crossings between the two components.
    pub fn linking_number(&self) -> Result<i64> {
        let (comp, n) = self.edge_components();
        if n != 2 {
            return domain(format!("linking number needs 2 components, diagram has {n}"));
        }
        let twice: i64 = self
            .dense
            .iter()
            .zip(&self.crossings)
            .filter(|(e, _)| comp[e[0]] != comp[e[1]])
            .map(|(_, x)| x.sign as i64)
            .sum();
        debug_assert!(twice % 2 == 0);
        Ok(twice / 2)
    }

    /// Swap over and under at every crossing.
    pub fn mirror(&self) -> PDDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                let [a, b, c, d] = x.edges;
                let edges = if x.sign > 0 { [d, a, b, c] } else { [b, c, d, a] };
                Crossing { edges, sign: -x.sign }
            })
            .collect();
        PDDiagram::new(crossings, self.free_loops).expect("mirror of a valid diagram")
    }

    /// Add `n` crossingless circles.
    pub fn with_free_loops(&self, n: usize) -> PDDiagram {
        let mut d = self.clone();
        d.free_loops += n;
        d
    }

    pub fn to_json(&self) -> Value {
        let pd: Vec<Value> = self.crossings.iter().map(|x| json!([x.edges, x.sign])).collect();
        if self.free_loops == 0 {
            Value::Array(pd)
        } else {
            json!({ "pd": pd, "free_loops": self.free_loops })
        }
    }

    /// Accepts `[[[a,b,c,d],sign],...]` or `{"pd": [...], "free_loops": n}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Domain(format!("malformed PD JSON: {m}"));
        let (list, loops) = match v {
            Value::Array(a) => (a, 0),
            Value::Object(o) => {
                let pd = o.get("pd").and_then(Value::as_array).ok_or_else(|| bad("missing \"pd\" list"))?;
                let loops = match o.get("free_loops") {
                    None => 0,
                    Some(n) => n.as_u64().ok_or_else(|| bad("free_loops must be a count"))? as usize,
                };
                (pd, loops)
            }
            _ => return Err(bad("expected a list or an object")),
        };
        let mut crossings = Vec::with_capacity(list.len());
        for item in list {
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("crossing must be [edges, sign]"))?;
            let edges = pair[0].as_array().filter(|e| e.len() == 4).ok_or_else(|| bad("need four edge labels"))?;
            let mut e = [0usize; 4];
            for (slot, val) in e.iter_mut().zip(edges) {
                *slot = val.as_u64().ok_or_else(|| bad("edge labels must be nonnegative integers"))? as usize;
            }
            let sign = pair[1].as_i64().ok_or_else(|| bad("sign must be an integer"))?;
            crossings.push(Crossing { edges: e, sign: sign as i8 });
        }
        PDDiagram::new(crossings, loops)
    }

    /// Faces of the planar diagram, each as the list of slots `(crossing,
    /// slot)` at which the boundary walk arrives. The walk turns left at
    /// every crossing, so the face lies to its left.
    pub fn faces(&self) -> Vec<Vec<(usize, usize)>> {
        let other = self.slot_partner();
        let mut seen = vec![[false; 4]; self.crossings.len()];
        let mut faces = Vec::new();
        for c in 0..self.crossings.len() {
            for k in 0..4 {
                if seen[c][k] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut x, mut s) = (c, k);
                while !seen[x][s] {
                    seen[x][s] = true;
                    face.push((x, s));
                    (x, s) = other[&(x, (s + 3) % 4)];
                }
                faces.push(face);
            }
        }
        faces
    }

    /// For each slot, the slot at the other end of its edge.
    fn slot_partner(&self) -> HashMap<(usize, usize), (usize, usize)> {
        let mut by_edge: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (c, e) in self.dense.iter().enumerate() {
            for (k, &id) in e.iter().enumerate() {
                by_edge.entry(id).or_default().push((c, k));
            }
        }
        let mut out = HashMap::new();
        for slots in by_edge.values() {
            out.insert(slots[0], slots[1]);
            out.insert(slots[1], slots[0]);
        }
        out
    }

    fn max_label(&self) -> usize {
        self.crossings.iter().flat_map(|x| x.edges).max().unwrap_or(0)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

// ---------------------------------------------------------------------------
// Diagrams of rational tangles

const NW: usize = 0;
const NE: usize = 1;
const SW: usize = 2;
const SE: usize = 3;

// Geometric slots of a crossing, counterclockwise from NW.
const G_NW: usize = 0;
const G_SW: usize = 1;
const G_SE: usize = 2;
const G_NE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Boundary(usize),
    Slot(usize, usize),
}

#[derive(Debug, Clone)]
struct GeoCrossing {
    edges: [usize; 4],
    /// The over-strand runs SW–NE.
    rising: bool,
}

impl GeoCrossing {
    fn is_under(&self, g: usize) -> bool {
        g.is_multiple_of(2) == self.rising
    }

    fn ccw_index(&self, g: usize) -> usize {
        if self.rising {
            g
        } else {
            (g + 3) % 4
        }
    }
}

struct TangleBuilder {
    crossings: Vec<GeoCrossing>,
    ends: Vec<[End; 2]>,
    boundary: [usize; 4],
}

impl TangleBuilder {
    fn new(vertical: bool) -> Self {
        let b = End::Boundary;
        if vertical {
            TangleBuilder { crossings: Vec::new(), ends: vec![[b(NW), b(SW)], [b(NE), b(SE)]], boundary: [0, 1, 0, 1] }
        } else {
            TangleBuilder { crossings: Vec::new(), ends: vec![[b(NW), b(NE)], [b(SW), b(SE)]], boundary: [0, 0, 1, 1] }
        }
    }

    fn attach(&mut self, edge: usize, from: usize, to: End) {
        let slot = self.ends[edge].iter_mut().find(|e| **e == End::Boundary(from)).expect("boundary end present");
        *slot = to;
    }

    fn new_edge(&mut self, a: End, b: End) -> usize {
        self.ends.push([a, b]);
        self.ends.len() - 1
    }

    /// Add a crossing on the east side (`right`) or the south side.
    fn twist(&mut self, right: bool, rising: bool) {
        let c = self.crossings.len();
        let mut edges = [0; 4];
        if right {
            let (ne, se) = (self.boundary[NE], self.boundary[SE]);
            self.attach(ne, NE, End::Slot(c, G_NW));
            self.attach(se, SE, End::Slot(c, G_SW));
            edges[G_NW] = ne;
            edges[G_SW] = se;
            edges[G_SE] = self.new_edge(End::Slot(c, G_SE), End::Boundary(SE));
            edges[G_NE] = self.new_edge(End::Slot(c, G_NE), End::Boundary(NE));
            self.boundary[SE] = edges[G_SE];
            self.boundary[NE] = edges[G_NE];
        } else {
            let (sw, se) = (self.boundary[SW], self.boundary[SE]);
            self.attach(sw, SW, End::Slot(c, G_NW));
            self.attach(se, SE, End::Slot(c, G_NE));
            edges[G_NW] = sw;
            edges[G_NE] = se;
            edges[G_SW] = self.new_edge(End::Slot(c, G_SW), End::Boundary(SW));
            edges[G_SE] = self.new_edge(End::Slot(c, G_SE), End::Boundary(SE));
            self.boundary[SW] = edges[G_SW];
            self.boundary[SE] = edges[G_SE];
        }
        self.crossings.push(GeoCrossing { edges, rising });
    }

    fn other_end(&self, edge: usize, from: End) -> End {
        let [a, b] = self.ends[edge];
        if a == from {
            b
        } else {
            a
        }
    }

    /// Walk the strand entering at boundary point `start`. Returns the exit
    /// point and the `(crossing, geometric in-slot)` passages in order.
    fn trace(&self, start: usize) -> (usize, Vec<(usize, usize)>) {
        let mut passages = Vec::new();
        let mut edge = self.boundary[start];
        let mut from = End::Boundary(start);
        loop {
            match self.other_end(edge, from) {
                End::Boundary(b) => return (b, passages),
                End::Slot(c, g) => {
                    passages.push((c, g));
                    let out = (g + 2) % 4;
                    edge = self.crossings[c].edges[out];
                    from = End::Slot(c, out);
                }
            }
        }
    }
}

/// A closed, oriented diagram built from a standard form.
#[derive(Debug, Clone)]
pub struct BuiltDiagram {
    pub pd: PDDiagram,
    /// Crossing signs in construction order (equal to `pd` order).
    pub signs: Vec<i8>,
    pub orientation: OrientationType,
}

/// Build the closure of `sf` as an oriented PD diagram.
///
/// Positive twists put the over-strand on the SW–NE diagonal; negative ones
/// on NW–SE. Crossings appear in construction order.
pub fn build_diagram(sf: &StandardForm, closure: Closure, orient: OrientationRequest) -> Result<BuiltDiagram> {
    let mut tb = TangleBuilder::new(sf.starts_vertical());
    for (right, sign) in sf.build_steps().into_iter().zip(sf.twist_signs()) {
        tb.twist(right, sign > 0);
    }
    let candidates = match orient {
        OrientationRequest::Auto => vec![OrientationType::TypeII, OrientationType::TypeI],
        OrientationRequest::Fixed(t) => vec![t],
    };
    let mut last_err = None;
    for t in candidates {
        match close_and_orient(&tb, closure, t) {
            Ok(pd) => {
                let signs = pd.signs();
                return Ok(BuiltDiagram { pd, signs, orientation: t });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one candidate"))
}

fn close_and_orient(tb: &TangleBuilder, closure: Closure, t: OrientationType) -> Result<PDDiagram> {
    let ins: [usize; 2] = match (closure, t) {
        (Closure::Numerator, OrientationType::TypeII) => [NW, SW],
        (Closure::Numerator, OrientationType::TypeI) => [NW, SE],
        (Closure::Denominator, OrientationType::TypeII) => [NW, NE],
        (Closure::Denominator, OrientationType::TypeI) => [NW, SE],
    };
    // Each tangle strand must run from an entry point to an exit point.
    let mut in_under = vec![None; tb.crossings.len()];
    let mut in_over = vec![None; tb.crossings.len()];
    for &start in &ins {
        let (exit, passages) = tb.trace(start);
        if ins.contains(&exit) {
            return Err(Error::Orientation(format!(
                "type {} would make both ends of a strand incoming",
                if t == OrientationType::TypeI { "I" } else { "II" }
            )));
        }
        for (c, g) in passages {
            if tb.crossings[c].is_under(g) {
                in_under[c] = Some(g);
            } else {
                in_over[c] = Some(g);
            }
        }
    }
    let mut uf = UnionFind::new(tb.ends.len());
    let pairs = match closure {
        Closure::Numerator => [(NW, NE), (SW, SE)],
        Closure::Denominator => [(NW, SW), (NE, SE)],
    };
    for (a, b) in pairs {
        uf.union(tb.boundary[a], tb.boundary[b]);
    }
    let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
    let mut crossings = Vec::with_capacity(tb.crossings.len());
    for (c, x) in tb.crossings.iter().enumerate() {
        let (gu, go) =
            (in_under[c].expect("strands cover all crossings"), in_over[c].expect("strands cover all crossings"));
        let mut ccw = [0usize; 4];
        for g in 0..4 {
            ccw[x.ccw_index(g)] = uf.find(x.edges[g]);
        }
        let pu = x.ccw_index(gu);
        let po = x.ccw_index(go);
        let mut edges = [0usize; 4];
        for (k, slot) in edges.iter_mut().enumerate() {
            let root = ccw[(pu + k) % 4];
            let n = labels.len() + 1;
            *slot = *labels.entry(root).or_insert(n);
        }
        let sign = if po == (pu + 3) % 4 { 1 } else { -1 };
        crossings.push(Crossing { edges, sign });
    }
    let mut with_slots = vec![false; tb.ends.len()];
    for x in &tb.crossings {
        for &e in &x.edges {
            let r = uf.find(e);
            with_slots[r] = true;
        }
    }
    let free_loops = (0..tb.ends.len()).filter(|&e| uf.find(e) == e && !with_slots[e]).count();
    PDDiagram::new(crossings, free_loops)
}

/// Closure of a braid on `strands` strands. Generator `i > 0` is a positive
/// crossing of strands `i` and `i + 1`; `-i` is its inverse.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<PDDiagram> {
    let mut current: Vec<usize> = (0..strands).collect();
    let mut next_label = strands;
    let mut raw = Vec::with_capacity(word.len());
    for &g in word {
        let i = g.unsigned_abs() as usize;
        if g == 0 || i >= strands {
            return domain(format!("braid generator {g} out of range for {strands} strands"));
        }
        let (x, y) = (current[i - 1], current[i]);
        let (x2, y2) = (next_label, next_label + 1);
        next_label += 2;
        raw.push(if g > 0 { ([y, y2, x2, x], 1) } else { ([x, y, y2, x2], -1) });
        current[i - 1] = x2;
        current[i] = y2;
    }
    let mut uf = UnionFind::new(next_label);
    for (p, &c) in current.iter().enumerate() {
        uf.union(p, c);
    }
    let mut free_loops = 0;
    let used: Vec<usize> = raw.iter().flat_map(|(e, _)| e.iter().copied()).collect();
    for p in 0..strands {
        if uf.find(p) == p && !used.iter().any(|&l| uf.find(l) == p) {
            free_loops += 1;
        }
    }
    let crossings = raw.into_iter().map(|(e, sign)| Crossing { edges: e.map(|l| uf.find(l)), sign }).collect();
    PDDiagram::new(crossings, free_loops)
}

// ---------------------------------------------------------------------------
// Reidemeister surgery on PD codes

/// Insert a curl on the edge labelled `edge`, with a crossing of the given
/// sign. The result is isotopic to the input.
pub fn add_kink(d: &PDDiagram, edge: usize, positive: bool) -> Result<PDDiagram> {
    let mut crossings = d.crossings.clone();
    // The occurrence where the edge enters a crossing gets the new label.
    let head = crossings
        .iter()
        .enumerate()
        .flat_map(|(c, x)| (0..4).map(move |k| (c, k, x)))
        .find(|(_, k, x)| x.edges[*k] == edge && x.is_incoming(*k))
        .map(|(c, k, _)| (c, k));
    let Some((c, k)) = head else { return domain(format!("no edge labelled {edge}")) };
    let base = d.max_label();
    let (out, curl) = (base + 1, base + 2);
    crossings[c].edges[k] = out;
    let kink = if positive {
        Crossing { edges: [edge, out, curl, curl], sign: 1 }
    } else {
        Crossing { edges: [edge, curl, curl, out], sign: -1 }
    };
    crossings.push(kink);
    PDDiagram::new(crossings, d.free_loops)
}

/// Push edge `e` over edge `f` across a face they share, creating a bigon
/// with two new crossings of opposite sign.
///
/// `face` indexes [`PDDiagram::faces`]; `i` and `j` pick two distinct edges
/// of that face boundary.
pub fn add_clasp(d: &PDDiagram, face: usize, i: usize, j: usize) -> Result<PDDiagram> {
    let faces = d.faces();
    let Some(walk) = faces.get(face) else { return domain(format!("no face {face}")) };
    if i == j || i >= walk.len() || j >= walk.len() {
        return domain("need two distinct edges of the face");
    }
    let partner = d.slot_partner();
    // Edge number i of the walk runs from slot (x, (s+3)%4) to walk[i+1].
    let step = |n: usize| {
        let (x, s) = walk[(n + walk.len() - 1) % walk.len()];
        let from = (x, (s + 3) % 4);
        (from, partner[&from])
    };
    let (e_from, e_to) = step(i);
    let (f_from, f_to) = step(j);
    let mut crossings = d.crossings.clone();
    let e_label = crossings[e_from.0].edges[e_from.1];
    let f_label = crossings[f_from.0].edges[f_from.1];
    let e_forward = !crossings[e_from.0].is_incoming(e_from.1);
    let f_forward = !crossings[f_from.0].is_incoming(f_from.1);
    let base = d.max_label();
    let (em, er, fm, fr) = (base + 1, base + 2, base + 3, base + 4);
    // e: e_from --eL--> X1 --eM--> X2 --eR--> e_to, in face direction.
    crossings[e_to.0].edges[e_to.1] = er;
    crossings[f_to.0].edges[f_to.1] = fr;
    let (el, fl) = (e_label, f_label);
    // Counterclockwise slots; e runs S→N through X1 and N→S through X2,
    // f runs E→W through both.
    let x1 = [el, fm, em, fr];
    let x2 = [em, fm, er, fl];
    // In face direction e enters X1 at slot 0 and X2 at slot 0; f enters
    // X1 at slot 1 and X2 at slot 3.
    let mk = |ccw: [usize; 4], e_in: usize, f_in: usize| {
        let (e_in, f_in) =
            (if e_forward { e_in } else { (e_in + 2) % 4 }, if f_forward { f_in } else { (f_in + 2) % 4 });
        let edges = [0, 1, 2, 3].map(|k| ccw[(f_in + k) % 4]);
        let sign = if (e_in + 4 - f_in) % 4 == 3 { 1 } else { -1 };
        Crossing { edges, sign }
    };
    crossings.push(mk(x1, 0, 1));
    crossings.push(mk(x2, 0, 3));
    PDDiagram::new(crossings, d.free_loops)
}

// ---------------------------------------------------------------------------
// States and the cube

/// Circles of one resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub circles: usize,
    /// Circle index of each dense edge; free loops come after these.
    pub edge_circle: Vec<usize>,
}

/// Resolve every crossing per `state` (bit `i` is crossing `i`).
pub fn resolve(d: &PDDiagram, state: u64) -> Resolution {
    let mut uf = UnionFind::new(d.edge_count);
    for (i, e) in d.dense.iter().enumerate() {
        if state >> i & 1 == 0 {
            uf.union(e[0], e[1]);
            uf.union(e[2], e[3]);
        } else {
            uf.union(e[0], e[3]);
            uf.union(e[1], e[2]);
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let edge_circle: Vec<usize> = (0..d.edge_count)
        .map(|e| {
            let r = uf.find(e);
            let n = ids.len();
            *ids.entry(r).or_insert(n)
        })
        .collect();
    Resolution { circles: ids.len() + d.free_loops, edge_circle }
}

fn check_bound(d: &PDDiagram, bound: usize) -> Result<()> {
    if d.crossing_count() > bound || d.crossing_count() >= 63 {
        return Err(Error::CrossingBound { crossings: d.crossing_count(), bound });
    }
    Ok(())
}

/// The Khovanov complex of `d`, with heights `-n₋..=n₊` and the summand at
/// cube level `r` shifted by `r + n₊ - 2n₋`.
pub fn cube_complex(d: &PDDiagram, bound: usize) -> Result<ChainComplex> {
    check_bound(d, bound)?;
    let n = d.crossing_count();
    let (np, nm) = (d.n_plus() as i64, d.n_minus() as i64);
    let states: Vec<Resolution> = (0..1u64 << n).map(|s| resolve(d, s)).collect();
    let mut by_level: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for s in 0..1u64 << n {
        by_level[s.count_ones() as usize].push(s);
    }
    let mut offset = vec![0usize; 1 << n];
    let mut objects = Vec::with_capacity(n + 1);
    for (r, level) in by_level.iter().enumerate() {
        let mut acc = 0;
        let mut obj = Vec::with_capacity(level.len());
        for &s in level {
            offset[s as usize] = acc;
            let k = states[s as usize].circles;
            acc += 1 << k;
            let tag: String = (0..n).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect();
            obj.push(Summand::new(tag, k, r as i64 + np - 2 * nm));
        }
        objects.push(obj);
    }
    let dims: Vec<usize> = objects.iter().map(|o| o.iter().map(Summand::rank).sum()).collect();
    let mut diffs: Vec<SparseMatrix> = (0..n).map(|r| SparseMatrix::zeros(dims[r + 1], dims[r])).collect();
    for (r, level) in by_level.iter().enumerate().take(n) {
        for &s in level {
            for i in (0..n).filter(|&i| s >> i & 1 == 0) {
                let t = s | 1 << i;
                let sign =
                    if (s & ((1u64 << i) - 1)).count_ones().is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
                edge_map(d, &states[s as usize], &states[t as usize], i, |src, tgt, coef| {
                    let v = if coef > 0 { sign.clone() } else { -sign.clone() };
                    diffs[r].add(offset[t as usize] + tgt, offset[s as usize] + src, v);
                });
            }
        }
    }
    ChainComplex::new(-nm, objects, diffs)
}

/// Emit the entries of the saddle at crossing `i` from resolution `src` to
/// `tgt`, as `(source generator, target generator, ±1)`.
fn edge_map(d: &PDDiagram, src: &Resolution, tgt: &Resolution, i: usize, mut emit: impl FnMut(usize, usize, i32)) {
    let [a, b, c, _] = d.dense[i];
    let (ks, kt) = (src.circles, tgt.circles);
    let edge_circles = ks - d.free_loops;
    // Where each untouched source circle lands.
    let mut tau = vec![usize::MAX; ks];
    for (e, &sc) in src.edge_circle.iter().enumerate() {
        if tau[sc] == usize::MAX {
            tau[sc] = tgt.edge_circle[e];
        }
    }
    for (j, t) in tau.iter_mut().enumerate().skip(edge_circles) {
        *t = kt - (ks - j);
    }
    let (ca, cc) = (src.edge_circle[a], src.edge_circle[c]);
    let carry = |m: usize, skip: &[usize]| {
        (0..ks).filter(|j| !skip.contains(j) && m >> j & 1 == 1).fold(0usize, |acc, j| acc | 1 << tau[j])
    };
    if ca != cc {
        let merged = tgt.edge_circle[a];
        for m in 0..1usize << ks {
            let (xa, xc) = (m >> ca & 1, m >> cc & 1);
            if xa == 1 && xc == 1 {
                continue;
            }
            let t = carry(m, &[ca, cc]) | (xa | xc) << merged;
            emit(m, t, 1);
        }
    } else {
        let (t1, t2) = (tgt.edge_circle[a], tgt.edge_circle[b]);
        debug_assert_ne!(t1, t2);
        for m in 0..1usize << ks {
            let base = carry(m, &[ca]);
            if m >> ca & 1 == 1 {
                emit(m, base | 1 << t1 | 1 << t2, 1);
            } else {
                emit(m, base | 1 << t1, 1);
                emit(m, base | 1 << t2, 1);
            }
        }
    }
}

/// Khovanov homology of `d` through the full cube.
pub fn kh_oracle(d: &PDDiagram, bound: usize) -> Result<BigradedHomology> {
    Ok(homology(&cube_complex(d, bound)?))
}

/// Counts of states by `(1-smoothings, circles)`.
fn state_census(d: &PDDiagram, bound: usize) -> Result<BTreeMap<(usize, usize), u64>> {
    check_bound(d, bound)?;
    let mut census = BTreeMap::new();
    for s in 0..1u64 << d.crossing_count() {
        let k = resolve(d, s).circles;
        *census.entry((s.count_ones() as usize, k)).or_insert(0) += 1;
    }
    Ok(census)
}

/// `Σ_S A^{#0} B^{#1} d^{γ-1} (q + q⁻¹)` with `A = q`, `B = q⁻¹`,
/// `d = -(q² + q⁻²)`; the one-circle diagram evaluates to `q + q⁻¹` and the
/// empty diagram to `1`.
pub fn kauffman_bracket(d: &PDDiagram, bound: usize) -> Result<LaurentPoly> {
    let n = d.crossing_count();
    let loop_value = LaurentPoly::from_terms(&[(-2, -1), (2, -1)]);
    let mut total = LaurentPoly::zero();
    for ((r, k), count) in state_census(d, bound)? {
        if k == 0 {
            return Ok(LaurentPoly::one());
        }
        let term = &loop_value.pow(k as u32 - 1) * &LaurentPoly::circle();
        total = &total + &term.shift(&BigInt::from(count), n as i64 - 2 * r as i64);
    }
    Ok(total)
}

/// `Σ_S (-q)^{r_S} (q + q⁻¹)^{γ_S}`, the bracket whose categorification is
/// the cube complex.
pub fn khovanov_bracket(d: &PDDiagram, bound: usize) -> Result<LaurentPoly> {
    let mut total = LaurentPoly::zero();
    for ((r, k), count) in state_census(d, bound)? {
        let sign = if r % 2 == 0 { BigInt::from(count) } else { -BigInt::from(count) };
        total = &total + &LaurentPoly::circle().pow(k as u32).shift(&sign, r as i64);
    }
    Ok(total)
}

/// `(-1)^{n₋} q^{n₊ - 2n₋} · Σ_S (-q)^{r_S} (q + q⁻¹)^{γ_S}`.
pub fn unnormalized_jones(d: &PDDiagram, bound: usize) -> Result<LaurentPoly> {
    let (np, nm) = (d.n_plus() as i64, d.n_minus() as i64);
    let sign = if nm % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    Ok(khovanov_bracket(d, bound)?.shift(&sign, np - 2 * nm))
}

/// Unnormalized Jones polynomial divided by `q + q⁻¹`; the unknot gives 1.
pub fn jones(d: &PDDiagram, bound: usize) -> Result<LaurentPoly> {
    let u = unnormalized_jones(d, bound)?;
    u.div_exact(&LaurentPoly::circle())
        .ok_or_else(|| Error::Domain(format!("unnormalized Jones {u} is not divisible by q + q^-1")))
}

/// `(-q)^{-3w} ⟨L⟩ / (q + q⁻¹)` in the bracket variable.
pub fn bracket_jones(d: &PDDiagram, bound: usize) -> Result<LaurentPoly> {
    let w = d.writhe();
    let sign = if w % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let b = kauffman_bracket(d, bound)?.shift(&sign, -3 * w);
    b.div_exact(&LaurentPoly::circle())
        .ok_or_else(|| Error::Domain(format!("bracket {b} is not divisible by q + q^-1")))
}

/// Substitute `q ↦ c·q^k` for `c = ±1`.
pub fn substitute(p: &LaurentPoly, k: i64, negate: bool) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (e, c) in p.terms() {
        let flip = negate && e.rem_euclid(2) == 1;
        out.add_term(e * k, if flip { -c } else { c.clone() });
    }
    out
}
