//! Morphism strings and the zig-zag complexes they describe.
//!
//! The Khovanov complex of a positive rational tangle simplifies to a path of
//! indecomposable objects, each a `[0]` or `[∞]` tangle, joined by one of six
//! morphisms `a, b, c, d, s, r` (with `r` the backwards saddle). Adding a
//! crossing on the right or at the bottom rewrites the word by the rules
//! `f` and `g` implemented here.

use std::fmt;

use serde_json::{json, Value};

use crate::cube::{build_diagram, Closure, OrientationRequest, OrientationType};
use crate::error::{domain, Error, Result};
use crate::fraction::StandardForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    A,
    B,
    C,
    D,
    S,
    R,
}

/// A letter of a morphism string. `dashed` marks a backwards arrow; the
/// backwards saddle is spelled `r` rather than a dashed `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    kind: Kind,
    dashed: bool,
}

impl Letter {
    pub fn new(kind: Kind, dashed: bool) -> Result<Self> {
        if dashed && matches!(kind, Kind::S | Kind::R) {
            return domain("saddles carry no dash; write r for a backwards s");
        }
        Ok(Letter { kind, dashed })
    }

    pub const fn plain(kind: Kind) -> Self {
        Letter { kind, dashed: false }
    }

    const fn dashed(kind: Kind) -> Self {
        Letter { kind, dashed: true }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_dashed(&self) -> bool {
        self.dashed
    }

    /// The arrow points from the later object back to the earlier one.
    pub fn is_backward(&self) -> bool {
        self.dashed || self.kind == Kind::R
    }

    /// The same morphism read in the opposite direction.
    pub fn reversed(&self) -> Letter {
        match self.kind {
            Kind::S => Letter::plain(Kind::R),
            Kind::R => Letter::plain(Kind::S),
            k => Letter { kind: k, dashed: !self.dashed },
        }
    }

    /// `a ↔ b` and `c ↔ d`, keeping the dash.
    fn swapped(&self) -> Letter {
        let kind = match self.kind {
            Kind::A => Kind::B,
            Kind::B => Kind::A,
            Kind::C => Kind::D,
            Kind::D => Kind::C,
            k => k,
        };
        Letter { kind, dashed: self.dashed }
    }

    fn is_ab(&self) -> bool {
        matches!(self.kind, Kind::A | Kind::B)
    }

    fn is_cd(&self) -> bool {
        matches!(self.kind, Kind::C | Kind::D)
    }

    fn char(&self) -> char {
        match self.kind {
            Kind::A => 'a',
            Kind::B => 'b',
            Kind::C => 'c',
            Kind::D => 'd',
            Kind::S => 's',
            Kind::R => 'r',
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.char(), if self.dashed { "'" } else { "" })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MorphismString {
    letters: Vec<Letter>,
}

impl MorphismString {
    pub fn new(letters: Vec<Letter>) -> Self {
        MorphismString { letters }
    }

    /// Letters `a b c d s r`, each optionally followed by `'` or `′`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters: Vec<Letter> = Vec::new();
        for (offset, ch) in text.char_indices() {
            let kind = match ch {
                'a' => Kind::A,
                'b' => Kind::B,
                'c' => Kind::C,
                'd' => Kind::D,
                's' => Kind::S,
                'r' => Kind::R,
                '\'' | '′' => {
                    let last = letters.last_mut().filter(|l| !l.dashed && !matches!(l.kind, Kind::S | Kind::R));
                    match last {
                        Some(l) => {
                            l.dashed = true;
                            continue;
                        }
                        None => return Err(Error::Parse { offset, message: "misplaced dash".into() }),
                    }
                }
                _ => return Err(Error::Parse { offset, message: format!("unexpected character {ch:?}") }),
            };
            letters.push(Letter::plain(kind));
        }
        Ok(MorphismString { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The string read from the other end.
    pub fn reversed(&self) -> MorphismString {
        MorphismString { letters: self.letters.iter().rev().map(Letter::reversed).collect() }
    }

    fn concat(parts: Vec<Vec<Letter>>) -> MorphismString {
        MorphismString { letters: parts.into_iter().flatten().collect() }
    }
}

impl fmt::Display for MorphismString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The word for the complex of the one-crossing tangle.
pub fn base_string() -> MorphismString {
    MorphismString { letters: vec![Letter::plain(Kind::S)] }
}

/// First window whose middle letter breaks the adjacency conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub position: usize,
    pub window: String,
}

/// Check every three-letter window (dashes ignored). Windows at the ends of
/// the word are checked against the neighbours that exist.
pub fn validate_structure(ms: &MorphismString) -> std::result::Result<(), Violation> {
    use Kind::*;
    let k: Vec<Kind> = ms.letters.iter().map(|l| l.kind).collect();
    for i in 0..k.len() {
        let (left, right): (&[Kind], &[Kind]) = match k[i] {
            A => (&[B], &[B]),
            B => (&[A, R], &[A, S]),
            C => (&[D], &[D]),
            D => (&[C, S], &[C, R]),
            R => (&[D], &[B]),
            S => (&[B], &[D]),
        };
        let ok_left = i == 0 || left.contains(&k[i - 1]);
        let ok_right = i + 1 == k.len() || right.contains(&k[i + 1]);
        if !(ok_left && ok_right) {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(k.len());
            let window = MorphismString { letters: ms.letters[lo..hi].to_vec() }.to_string();
            return Err(Violation { position: i, window });
        }
    }
    Ok(())
}

fn split_err<T>(position: usize, message: &str) -> Result<T> {
    Err(Error::Split { position, message: message.to_string() })
}

/// Split for `f`: pieces `c, c', d, d', rΒ, rΒs, Βs` with `Β` over
/// `{a, a', b, b'}`, found right to left.
fn split_for_add(ms: &MorphismString) -> Result<Vec<&[Letter]>> {
    let w = &ms.letters;
    let mut pieces = Vec::new();
    let mut end = w.len();
    while end > 0 {
        let last = w[end - 1];
        let start = if last.is_cd() {
            end - 1
        } else if last.kind == Kind::S || last.is_ab() || last.kind == Kind::R {
            let mut i = if last.kind == Kind::S { end - 1 } else { end };
            while i > 0 && w[i - 1].is_ab() {
                i -= 1;
            }
            if i > 0 && w[i - 1].kind == Kind::R {
                i - 1
            } else if last.kind == Kind::S {
                i
            } else if last.kind == Kind::R {
                end - 1
            } else {
                return split_err(i, "a run of a/b letters must start with r or end with s");
            }
        } else {
            unreachable!("every letter kind is covered")
        };
        pieces.push(&w[start..end]);
        end = start;
    }
    pieces.reverse();
    debug_assert_eq!(pieces.concat(), *w);
    Ok(pieces)
}

/// Split for `g`: pieces `a, a', b, b', sΒ, sΒr, Βr` with `Β` over
/// `{c, c', d, d'}`, found right to left.
fn split_for_mul(ms: &MorphismString) -> Result<Vec<&[Letter]>> {
    let w = &ms.letters;
    let mut pieces = Vec::new();
    let mut end = w.len();
    while end > 0 {
        let last = w[end - 1];
        let start = if last.is_ab() {
            end - 1
        } else {
            let mut i = if last.kind == Kind::R { end - 1 } else { end };
            while i > 0 && w[i - 1].is_cd() {
                i -= 1;
            }
            if i > 0 && w[i - 1].kind == Kind::S {
                i - 1
            } else if last.kind == Kind::R {
                i
            } else if last.kind == Kind::S {
                end - 1
            } else {
                return split_err(i, "a run of c/d letters must start with s or end with r");
            }
        };
        pieces.push(&w[start..end]);
        end = start;
    }
    pieces.reverse();
    debug_assert_eq!(pieces.concat(), *w);
    Ok(pieces)
}

const fn l(k: Kind) -> Letter {
    Letter::plain(k)
}

/// Rewrite for `T ↦ T + [1]`.
pub fn apply_add_one(ms: &MorphismString) -> Result<MorphismString> {
    let pieces = split_for_add(ms)?;
    let n = pieces.len();
    let mut out = Vec::with_capacity(n);
    for (i, w) in pieces.into_iter().enumerate() {
        let first = w[0];
        let piece = if first.is_cd() {
            if first.kind == Kind::C {
                vec![l(Kind::R), Letter { kind: Kind::B, dashed: first.dashed }, l(Kind::S)]
            } else {
                let mut p = Vec::with_capacity(3);
                if i == 0 {
                    p.push(l(Kind::S));
                }
                p.push(first);
                if i + 1 == n {
                    p.push(l(Kind::R));
                }
                p
            }
        } else {
            let has_r = first.kind == Kind::R;
            let has_s = w.last().is_some_and(|x| x.kind == Kind::S);
            let inner = &w[has_r as usize..w.len() - has_s as usize];
            let mut p = Vec::with_capacity(w.len() + 2);
            if has_r {
                p.push(l(Kind::R));
                p.push(Letter::dashed(Kind::B));
            }
            p.extend(inner.iter().map(Letter::swapped));
            if has_s {
                p.push(l(Kind::B));
                p.push(l(Kind::S));
            }
            p
        };
        out.push(piece);
    }
    Ok(MorphismString::concat(out))
}

/// Rewrite for `T ↦ T * [1]`.
pub fn apply_mul_one(ms: &MorphismString) -> Result<MorphismString> {
    let pieces = split_for_mul(ms)?;
    let n = pieces.len();
    let mut out = Vec::with_capacity(n);
    for (i, w) in pieces.into_iter().enumerate() {
        let first = w[0];
        let piece = if first.is_ab() {
            if first.kind == Kind::A {
                vec![l(Kind::S), Letter { kind: Kind::D, dashed: first.dashed }, l(Kind::R)]
            } else {
                let mut p = Vec::with_capacity(3);
                if i == 0 {
                    p.push(l(Kind::R));
                }
                p.push(first);
                if i + 1 == n {
                    p.push(l(Kind::S));
                }
                p
            }
        } else {
            let has_s = first.kind == Kind::S;
            let has_r = w.last().is_some_and(|x| x.kind == Kind::R);
            let inner = &w[has_s as usize..w.len() - has_r as usize];
            let mut p = Vec::with_capacity(w.len() + 2);
            if has_s {
                p.push(l(Kind::S));
                p.push(l(Kind::D));
            }
            p.extend(inner.iter().map(Letter::swapped));
            if has_r {
                p.push(Letter::dashed(Kind::D));
                p.push(l(Kind::R));
            }
            p
        };
        out.push(piece);
    }
    Ok(MorphismString::concat(out))
}

// ---------------------------------------------------------------------------
// Typed complexes

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothing {
    Zero,
    Inf,
}

/// Smoothing types of the objects of `ms`, from the letter typing:
/// `a, b` join `[∞]` objects, `c, d` join `[0]` objects and saddles run from
/// `[∞]` to `[0]` along the differential.
pub fn infer_types(ms: &MorphismString) -> Result<Vec<Smoothing>> {
    use Smoothing::*;
    let ends = |x: &Letter| -> (Smoothing, Smoothing) {
        match x.kind {
            Kind::A | Kind::B => (Inf, Inf),
            Kind::C | Kind::D => (Zero, Zero),
            Kind::S => (Inf, Zero),
            Kind::R => (Zero, Inf),
        }
    };
    let Some(first) = ms.letters.first() else { return domain("an empty string has no objects") };
    let mut types = vec![ends(first).0];
    for (i, x) in ms.letters.iter().enumerate() {
        let (a, b) = ends(x);
        if types[i] != a {
            return Err(Error::Typing(format!("letter {} ({x}) cannot leave a {:?} object", i, types[i])));
        }
        types.push(b);
    }
    Ok(types)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZigObject {
    pub smoothing: Smoothing,
    pub height: i64,
    pub qgrading: i64,
}

/// Objects along the path and the letters between consecutive ones. Letter
/// `i` joins objects `i` and `i + 1`; a backward letter's differential runs
/// from `i + 1` to `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigZagComplex {
    pub objects: Vec<ZigObject>,
    pub string: MorphismString,
    /// Built as the mirror image of a positive tangle: saddles run from
    /// `[0]` to `[∞]` and the typing rules do not apply.
    pub mirrored: bool,
}

impl ZigZagComplex {
    fn from_string(ms: &MorphismString, start: ZigObject) -> Result<Self> {
        let types = infer_types(ms)?;
        let mut objects = vec![ZigObject { smoothing: types[0], ..start }];
        for (i, x) in ms.letters.iter().enumerate() {
            let prev = objects[i];
            let dq = if matches!(x.kind, Kind::S | Kind::R) { 1 } else { 2 };
            let (dh, dq) = if x.is_backward() { (-1, -dq) } else { (1, dq) };
            objects.push(ZigObject { smoothing: types[i + 1], height: prev.height + dh, qgrading: prev.qgrading + dq });
        }
        Ok(ZigZagComplex { objects, string: ms.clone(), mirrored: false })
    }

    fn single(smoothing: Smoothing) -> Self {
        ZigZagComplex {
            objects: vec![ZigObject { smoothing, height: 0, qgrading: 0 }],
            string: MorphismString::default(),
            mirrored: false,
        }
    }

    /// Reverse every arrow and negate every grading.
    fn dual(&self) -> Self {
        ZigZagComplex {
            objects: self
                .objects
                .iter()
                .map(|o| ZigObject { smoothing: o.smoothing, height: -o.height, qgrading: -o.qgrading })
                .collect(),
            string: MorphismString { letters: self.string.letters.iter().map(Letter::reversed).collect() },
            mirrored: !self.mirrored,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.string.letters.iter().copied().enumerate()
    }

    /// Indices of objects with at most one neighbour.
    pub fn z_ends(&self) -> Vec<usize> {
        if self.objects.len() == 1 {
            vec![0]
        } else {
            vec![0, self.objects.len() - 1]
        }
    }

    pub fn height_span(&self) -> (i64, i64) {
        let hs = self.objects.iter().map(|o| o.height);
        (hs.clone().min().unwrap_or(0), hs.max().unwrap_or(0))
    }

    /// Letters leaving objects in the direction of the differential raise
    /// `h` by one and `q` by two (one for saddles).
    pub fn check_gradings(&self) -> Result<()> {
        for (i, x) in self.edges() {
            let (src, tgt) = if x.is_backward() {
                (self.objects[i + 1], self.objects[i])
            } else {
                (self.objects[i], self.objects[i + 1])
            };
            let dq = if matches!(x.kind, Kind::S | Kind::R) { 1 } else { 2 };
            if tgt.height - src.height != 1 || tgt.qgrading - src.qgrading != dq {
                return domain(format!("letter {i} ({x}) has inconsistent gradings"));
            }
        }
        Ok(())
    }

    /// The string read from the z-end of lowest height (see [`Presentation`]).
    pub fn presentation(&self) -> Presentation {
        let (first, last) = (self.objects[0].height, self.objects[self.objects.len() - 1].height);
        let fwd_undashed = self.string.letters.first().is_none_or(|x| !x.is_dashed());
        let (reversed, tie) = match first.cmp(&last) {
            std::cmp::Ordering::Less => (false, false),
            std::cmp::Ordering::Greater => (true, false),
            std::cmp::Ordering::Equal => (!fwd_undashed && !self.string.reversed().letters[0].is_dashed(), true),
        };
        let string = if reversed { self.string.reversed() } else { self.string.clone() };
        let start = if reversed { self.objects[self.objects.len() - 1] } else { self.objects[0] };
        Presentation { string, reversed, tie, start }
    }

    pub fn to_json(&self) -> Value {
        let p = self.presentation();
        json!({
            "string": p.string.to_string(),
            "reversed": p.reversed,
            "tie": p.tie,
            "mirrored": self.mirrored,
            "objects": self.objects.iter().map(|o| json!({
                "type": if o.smoothing == Smoothing::Inf { "inf" } else { "zero" },
                "h": o.height,
                "q": o.qgrading,
            })).collect::<Vec<_>>(),
        })
    }
}

/// A morphism string as reported to users: read from the z-end of lowest
/// homological height; on a tie, from the end whose first letter carries no
/// dash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub string: MorphismString,
    pub reversed: bool,
    pub tie: bool,
    pub start: ZigObject,
}

// ---------------------------------------------------------------------------
// Construction and calibration

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Add,
    Mul,
}

/// One crossing added after the first: the operation and the letter that
/// left the tracked z-end beforehand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub step: Step,
    pub leaving: Letter,
}

/// How a string was built: whether there is a first crossing at all, then one
/// entry per later crossing. Every intermediate string is kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub has_base: bool,
    pub steps: Vec<TraceStep>,
    pub strings: Vec<MorphismString>,
}

impl ConstructionTrace {
    pub fn crossings(&self) -> usize {
        self.has_base as usize + self.steps.len()
    }
}

/// `(Δq, Δh)` of the tracked z-end for a positive crossing.
fn shift(step: Step, leaving: Letter) -> (i64, i64) {
    match (leaving.kind, step) {
        (Kind::A, Step::Add) | (Kind::B, Step::Add) | (Kind::S, Step::Add) => (0, 0),
        (Kind::C, Step::Add) | (Kind::R, Step::Add) => (2, 1),
        (Kind::D, Step::Add) => (1, 0),
        (Kind::A, Step::Mul) | (Kind::S, Step::Mul) => (1, 0),
        (Kind::B, Step::Mul) => (2, 1),
        (Kind::C, Step::Mul) | (Kind::D, Step::Mul) | (Kind::R, Step::Mul) => (3, 1),
    }
}

/// Grading `(q, h)` of the construction-order first object.
///
/// The single positive crossing starts at `(1, 0)`. Each later crossing moves
/// the tracked end by the shift table; a negative crossing adds `(-3, -1)` on
/// top, including the first.
pub fn calibrate_start(trace: &ConstructionTrace, signs: &[i8]) -> Result<(i64, i64)> {
    if signs.len() != trace.crossings() {
        return domain(format!("{} signs for {} crossings", signs.len(), trace.crossings()));
    }
    if !trace.has_base {
        return Ok((0, 0));
    }
    let neg = |s: i8| if s < 0 { (-3, -1) } else { (0, 0) };
    let (mut q, mut h) = (1 + neg(signs[0]).0, neg(signs[0]).1);
    for (t, &s) in trace.steps.iter().zip(&signs[1..]) {
        let (dq, dh) = shift(t.step, t.leaving);
        q += dq + neg(s).0;
        h += dh + neg(s).1;
    }
    Ok((q, h))
}

/// Run the rewriting rules along the construction of a positive standard
/// form, starting from `s`.
pub fn construct(sf: &StandardForm) -> Result<ConstructionTrace> {
    if sf.is_negative() {
        return domain("the rewriting rules apply to positive tangles");
    }
    let steps = sf.build_steps();
    let mut trace = ConstructionTrace::default();
    let Some(_) = steps.first() else { return Ok(trace) };
    trace.has_base = true;
    let mut cur = base_string();
    trace.strings.push(cur.clone());
    for &right in &steps[1..] {
        let step = if right { Step::Add } else { Step::Mul };
        trace.steps.push(TraceStep { step, leaving: cur.letters[0] });
        cur = if right { apply_add_one(&cur)? } else { apply_mul_one(&cur)? };
        trace.strings.push(cur.clone());
    }
    Ok(trace)
}

/// A calibrated zig-zag complex together with how it was obtained.
#[derive(Debug, Clone)]
pub struct ZigZagBuild {
    pub complex: ZigZagComplex,
    pub trace: ConstructionTrace,
    /// Crossing signs of the closed diagram, construction order.
    pub signs: Vec<i8>,
    pub orientation: OrientationType,
}

/// Build and calibrate the complex of a sign-coherent standard form whose
/// numerator closure is oriented per `orient`.
///
/// Negative forms are built as the mirror of their positive counterpart and
/// then dualized.
pub fn build_zigzag(sf: &StandardForm, orient: OrientationRequest) -> Result<ZigZagBuild> {
    if !sf.is_sign_coherent() {
        return domain(format!("{sf} mixes positive and negative twists"));
    }
    let diagram = build_diagram(sf, Closure::Numerator, orient)?;
    let negative = sf.is_negative();
    let positive = if negative { sf.negate() } else { sf.clone() };
    let trace = construct(&positive)?;
    let signs: Vec<i8> = if negative { diagram.signs.iter().map(|s| -s).collect() } else { diagram.signs.clone() };
    let (q, h) = calibrate_start(&trace, &signs)?;
    let mut complex = match trace.strings.last() {
        Some(ms) => ZigZagComplex::from_string(ms, ZigObject { smoothing: Smoothing::Inf, height: h, qgrading: q })?,
        None => ZigZagComplex::single(if positive.starts_vertical() { Smoothing::Inf } else { Smoothing::Zero }),
    };
    if negative {
        complex = complex.dual();
    }
    Ok(ZigZagBuild { complex, trace, signs: diagram.signs, orientation: diagram.orientation })
}

// ---------------------------------------------------------------------------
// Dot diagrams

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotGlyph {
    pub column: usize,
    pub smoothing: Smoothing,
    pub qgrading: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slope {
    /// Next object one column to the right.
    Down,
    /// Next object one column to the left.
    Up,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotEdge {
    pub from: usize,
    pub to: usize,
    pub letter: Letter,
    pub slope: Slope,
}

/// One row per object in path order; the column is the height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotDiagram {
    pub min_height: i64,
    pub columns: usize,
    pub glyphs: Vec<DotGlyph>,
    pub edges: Vec<DotEdge>,
}

pub fn to_dot_diagram(zz: &ZigZagComplex) -> DotDiagram {
    let p = zz.presentation();
    let objects: Vec<ZigObject> =
        if p.reversed { zz.objects.iter().rev().copied().collect() } else { zz.objects.clone() };
    let (lo, hi) = zz.height_span();
    let glyphs = objects
        .iter()
        .map(|o| DotGlyph { column: (o.height - lo) as usize, smoothing: o.smoothing, qgrading: o.qgrading })
        .collect();
    let edges = p
        .string
        .letters
        .iter()
        .enumerate()
        .map(|(i, &letter)| {
            let slope = if objects[i + 1].height > objects[i].height { Slope::Down } else { Slope::Up };
            DotEdge { from: i, to: i + 1, letter, slope }
        })
        .collect();
    DotDiagram { min_height: lo, columns: (hi - lo + 1) as usize, glyphs, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotFormat {
    Ascii,
    Svg,
}

pub fn render(dd: &DotDiagram, format: DotFormat) -> String {
    match format {
        DotFormat::Ascii => render_ascii(dd),
        DotFormat::Svg => render_svg(dd),
    }
}

const CELL: usize = 8;

fn render_ascii(dd: &DotDiagram) -> String {
    let mut out = String::new();
    let header: String = (0..dd.columns).map(|c| format!("{:<CELL$}", dd.min_height + c as i64)).collect();
    out.push_str(&format!("h {}\n", header.trim_end()));
    for (i, g) in dd.glyphs.iter().enumerate() {
        let mark = if g.smoothing == Smoothing::Inf { 'o' } else { '*' };
        out.push_str(&format!("  {}{}({})\n", " ".repeat(g.column * CELL), mark, g.qgrading));
        if let Some(e) = dd.edges.get(i) {
            let col = g.column.min(dd.glyphs[e.to].column) * CELL + CELL / 2;
            let bar = if e.slope == Slope::Down { '\\' } else { '/' };
            out.push_str(&format!("  {}{} {}\n", " ".repeat(col), bar, e.letter));
        }
    }
    out
}

fn render_svg(dd: &DotDiagram) -> String {
    let (dx, dy, pad) = (48, 28, 24);
    let x = |c: usize| pad + c * dx;
    let y = |r: usize| pad + r * dy;
    let width = 2 * pad + dd.columns.saturating_sub(1) * dx;
    let height = 2 * pad + dd.glyphs.len().saturating_sub(1) * dy;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    for e in &dd.edges {
        let (a, b) = (&dd.glyphs[e.from], &dd.glyphs[e.to]);
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" data-letter=\"{}\"/>\n",
            x(a.column),
            y(e.from),
            x(b.column),
            y(e.to),
            e.letter
        ));
    }
    for (r, g) in dd.glyphs.iter().enumerate() {
        let fill = if g.smoothing == Smoothing::Inf { "white" } else { "black" };
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"6\" stroke=\"black\" fill=\"{fill}\" data-h=\"{}\" data-q=\"{}\"/>\n",
            x(g.column),
            y(r),
            dd.min_height + g.column as i64,
            g.qgrading
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> MorphismString {
        MorphismString::parse(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(ms("sdrbsdcd'rb's").to_string(), "sdrbsdcd'rb's");
        assert_eq!(ms("ab′").to_string(), "ab'");
        assert!(MorphismString::parse("s'").is_err());
        assert!(MorphismString::parse("'a").is_err());
        assert!(MorphismString::parse("ax").is_err());
        assert_eq!(ms("absdrb'").reversed().to_string(), "bsd'rb'a'");
    }

    #[test]
    fn structure_rules() {
        assert!(validate_structure(&base_string()).is_ok());
        assert!(validate_structure(&ms("bab")).is_ok());
        assert!(validate_structure(&ms("drb")).is_ok());
        let v = validate_structure(&ms("aab")).unwrap_err();
        assert_eq!(v.position, 0);
        assert!(validate_structure(&ms("sdrbsdcd'rb's")).is_ok());
    }

    #[test]
    fn add_rule_examples() {
        assert_eq!(apply_add_one(&ms("s")).unwrap().to_string(), "bs");
        assert_eq!(apply_add_one(&ms("bs")).unwrap().to_string(), "abs");
        assert_eq!(apply_add_one(&ms("d")).unwrap().to_string(), "sdr");
        assert_eq!(apply_add_one(&ms("sd")).unwrap().to_string(), "bsdr");
        assert_eq!(apply_add_one(&ms("bsdr")).unwrap().to_string(), "absdrb'");
        assert_eq!(apply_add_one(&ms("c'")).unwrap().to_string(), "rb's");
    }

    #[test]
    fn mul_rule_examples() {
        assert_eq!(apply_mul_one(&ms("absdrb'")).unwrap().to_string(), "sdrbsdcd'rb's");
        assert_eq!(apply_mul_one(&ms("s")).unwrap().to_string(), "sd");
        assert_eq!(apply_mul_one(&ms("ababs")).unwrap().to_string(), "sdrbsdrbsd");
        assert_eq!(apply_mul_one(&ms("b")).unwrap().to_string(), "rbs");
    }

    #[test]
    fn split_failures_are_reported() {
        assert!(matches!(apply_add_one(&ms("ab")), Err(Error::Split { .. })));
        assert!(matches!(apply_mul_one(&ms("cd")), Err(Error::Split { .. })));
    }

    #[test]
    fn typing() {
        assert_eq!(infer_types(&base_string()).unwrap(), vec![Smoothing::Inf, Smoothing::Zero]);
        assert!(matches!(infer_types(&ms("sb")), Err(Error::Typing(_))));
    }

    fn sfz(t: &[i64]) -> StandardForm {
        StandardForm::from_i64(t).unwrap()
    }

    #[test]
    fn one_crossing_gradings() {
        // A lone positive crossing starts at (q, h) = (1, 0); a second sign
        // for a one-crossing trace is rejected.
        let trace = construct(&sfz(&[1])).unwrap();
        assert_eq!(calibrate_start(&trace, &[1]).unwrap(), (1, 0));
        let zz = ZigZagComplex::from_string(
            &trace.strings[0],
            ZigObject { smoothing: Smoothing::Inf, height: 0, qgrading: 1 },
        )
        .unwrap();
        let hq: Vec<(i64, i64)> = zz.objects.iter().map(|o| (o.height, o.qgrading)).collect();
        assert_eq!(hq, vec![(0, 1), (1, 2)]);
        assert!(calibrate_start(&trace, &[1, 1]).is_err());
    }

    #[test]
    fn golden_anchor() {
        let b = build_zigzag(&sfz(&[5, 1, 2]), OrientationRequest::Auto).unwrap();
        let first = b.complex.objects[0];
        assert_eq!((first.qgrading, first.height), (-16, -6));
    }

    #[test]
    fn seven_one_anchor() {
        let b = build_zigzag(&sfz(&[7]), OrientationRequest::Auto).unwrap();
        assert_eq!(b.orientation, OrientationType::TypeII);
        assert!(b.signs.iter().all(|&s| s < 0));
        let first = b.complex.objects[0];
        assert_eq!((first.qgrading, first.height), (-20, -7));
        assert_eq!(b.complex.presentation().string.to_string(), "abababs");
    }

    #[test]
    fn leading_zero_examples() {
        let b = build_zigzag(&sfz(&[0, 2, 2]), OrientationRequest::Auto).unwrap();
        assert_eq!(b.complex.presentation().string.to_string(), "absdrb'");
        let b = build_zigzag(&sfz(&[0, 2, 2, 1]), OrientationRequest::Auto).unwrap();
        assert_eq!(b.complex.presentation().string.to_string(), "sdrbsdcd'rb's");
    }

    #[test]
    fn object_counts() {
        let b = build_zigzag(&sfz(&[2, 2]), OrientationRequest::Auto).unwrap();
        assert_eq!(b.complex.objects.len(), b.complex.string.len() + 1);
        let b = build_zigzag(&sfz(&[0]), OrientationRequest::Auto).unwrap();
        assert_eq!(b.complex.objects.len(), 1);
        assert!(build_zigzag(&sfz(&[2, -1]), OrientationRequest::Auto).is_err());
    }

    #[test]
    fn mirror_is_dual() {
        let p = build_zigzag(&sfz(&[2, 1, 1]), OrientationRequest::Auto).unwrap().complex;
        let n = build_zigzag(&sfz(&[-2, -1, -1]), OrientationRequest::Auto).unwrap().complex;
        assert!(n.mirrored);
        assert_eq!(n.objects.len(), p.objects.len());
        for (a, b) in p.objects.iter().zip(&n.objects) {
            assert_eq!(a.smoothing, b.smoothing);
            assert_eq!((a.height, a.qgrading), (-b.height, -b.qgrading));
        }
        n.check_gradings().unwrap();
    }

    #[test]
    fn dot_diagrams() {
        let zz = build_zigzag(&sfz(&[5]), OrientationRequest::Auto).unwrap().complex;
        let dd = to_dot_diagram(&zz);
        assert_eq!(dd.glyphs.len(), 6);
        assert_eq!(dd.columns - 1, 5);
        let single = build_zigzag(&sfz(&[0]), OrientationRequest::Auto).unwrap().complex;
        let dd1 = to_dot_diagram(&single);
        assert_eq!((dd1.glyphs.len(), dd1.edges.len()), (1, 0));
        let svg = render(&dd, DotFormat::Svg);
        assert_eq!(svg.matches("<circle").count(), 6);
        assert_eq!(svg.matches("<line").count(), 5);
        assert_eq!(render(&dd, DotFormat::Ascii), render(&dd, DotFormat::Ascii));
    }
}
