//! Helpers shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use ratkh::cobcat::{deloop, frobenius_map, gaussian_eliminate, ChainComplex, Frobenius, SparseMatrix, Summand};
use ratkh::fraction::{canonical_form, ContinuedFraction, Fraction, StandardForm};

/// A two-term piece `src → tgt` placed at some height.
struct Piece {
    height: usize,
    src: Summand,
    tgt: Option<Summand>,
    map: SparseMatrix,
}

fn piece<R: Rng>(rng: &mut R, heights: usize) -> Piece {
    let height = rng.gen_range(0..heights - 1);
    let s = rng.gen_range(-4..=4);
    let frob = |f, k| frobenius_map(f, k).expect("valid circle index");
    let (src, tgt, map) = match rng.gen_range(0..7) {
        0 => {
            let k = rng.gen_range(0..3);
            (Summand::new("g", k, s), None, SparseMatrix::zeros(0, 1 << k))
        }
        1 => {
            let n = [1, -1, 2, -2, 3, 0][rng.gen_range(0..6)];
            (Summand::new("z", 0, s), Some(Summand::new("z", 0, s)), SparseMatrix::from_dense(&[vec![n]]))
        }
        2 => (
            Summand::new("v", 1, s),
            Some(Summand::new("v", 1, s + 2)),
            frob(Frobenius::Dot(0), 1).scaled(&BigInt::from(2)),
        ),
        3 => (Summand::new("v", 1, s), Some(Summand::new("vv", 2, s + 1)), frob(Frobenius::Split(0), 1)),
        4 => (Summand::new("vv", 2, s), Some(Summand::new("v", 1, s + 1)), frob(Frobenius::Merge(0, 1), 2)),
        5 => {
            let mut m = frob(Frobenius::Dot(0), 2);
            for (r, c, v) in frob(Frobenius::Dot(1), 2).entries() {
                m.add(r, c, -v);
            }
            (Summand::new("vv", 2, s), Some(Summand::new("vv", 2, s + 2)), m)
        }
        _ => (
            Summand::new("v", 1, s),
            Some(Summand::new("v", 1, s)),
            SparseMatrix::from_dense(&[vec![1, 0], vec![0, 1]]),
        ),
    };
    Piece { height, src, tgt, map }
}

/// A random bigraded complex whose homology is known piece by piece, with
/// its basis scrambled by homogeneous unimodular changes at every height.
pub fn random_complex<R: Rng>(rng: &mut R) -> ChainComplex {
    let heights = rng.gen_range(2..5);
    let pieces: Vec<Piece> = (0..rng.gen_range(1..6)).map(|_| piece(rng, heights)).collect();
    let mut objects: Vec<Vec<Summand>> = vec![Vec::new(); heights];
    let mut offsets = Vec::new();
    let mut dims = vec![0usize; heights];
    for p in &pieces {
        let a = dims[p.height];
        objects[p.height].push(p.src.clone());
        dims[p.height] += p.src.rank();
        let b = dims[p.height + 1];
        if let Some(t) = &p.tgt {
            objects[p.height + 1].push(t.clone());
            dims[p.height + 1] += t.rank();
        }
        offsets.push((a, b));
    }
    let mut diffs: Vec<SparseMatrix> = (0..heights - 1).map(|h| SparseMatrix::zeros(dims[h + 1], dims[h])).collect();
    for (p, (a, b)) in pieces.iter().zip(offsets) {
        for (r, c, v) in p.map.entries() {
            diffs[p.height].add(b + r, a + c, v.clone());
        }
    }
    let mut c = ChainComplex::new(0, objects, diffs).expect("pieces are homogeneous");
    for _ in 0..rng.gen_range(0..12) {
        c = scramble(rng, &c);
    }
    c
}

/// Replace generator `j` by `e_j + k e_i` at one height, for `i, j` of equal
/// quantum degree.
fn scramble<R: Rng>(rng: &mut R, c: &ChainComplex) -> ChainComplex {
    let h = rng.gen_range(0..c.objects().len()) as i64 + c.start();
    let qs: Vec<i64> = c.basis(h).generators.iter().map(|g| g.1).collect();
    let pairs: Vec<(usize, usize)> = (0..qs.len())
        .flat_map(|i| (0..qs.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && qs[i] == qs[j])
        .collect();
    if pairs.is_empty() {
        return c.clone();
    }
    let (i, j) = pairs[rng.gen_range(0..pairs.len())];
    let k = BigInt::from([1, -1, 2][rng.gen_range(0..3)]);
    let idx = (h - c.start()) as usize;
    let mut diffs = c.diffs().to_vec();
    // With E = I + k·E_ij the incoming map becomes E⁻¹·d and the outgoing
    // one d·E.
    if idx > 0 {
        let d = &mut diffs[idx - 1];
        let row: Vec<(usize, BigInt)> = d.entries().filter(|e| e.0 == j).map(|e| (e.1, e.2.clone())).collect();
        for (col, v) in row {
            d.add(i, col, -(&k * v));
        }
    }
    if idx < diffs.len() {
        let d = &mut diffs[idx];
        let col: Vec<(usize, BigInt)> = d.entries().filter(|e| e.1 == i).map(|e| (e.0, e.2.clone())).collect();
        for (row, v) in col {
            d.add(row, j, &k * v);
        }
    }
    ChainComplex::new(c.start(), c.objects().to_vec(), diffs).expect("basis change keeps homogeneity")
}

/// A random canonical positive fraction with at most `max` crossings, as
/// its standard form.
pub fn random_positive_form<R: Rng>(rng: &mut R, max: usize) -> StandardForm {
    loop {
        let len = rng.gen_range(1..=max.min(7));
        let mut terms: Vec<i64> = (0..len).map(|i| rng.gen_range(if i == 0 { 0 } else { 1 }..=4)).collect();
        if terms.len().is_multiple_of(2) {
            terms.push(1);
        }
        let Ok(cf) = ContinuedFraction::from_i64(&terms) else { continue };
        let f: Fraction = cf.eval();
        if f.is_infinite() {
            continue;
        }
        let canon = canonical_form(&f).expect("finite");
        let sf = canon.to_standard_form();
        let n = sf.crossing_count();
        if n >= 1 && n <= max {
            return sf;
        }
    }
}

/// Simplify one step at a time through the public `deloop` and
/// `gaussian_eliminate`, always taking the first circle or unit entry.
pub fn stepwise_simplify(c: &ChainComplex) -> ChainComplex {
    let mut out = c.clone();
    for h in out.heights().collect::<Vec<_>>() {
        while let Some(idx) = out.object(h).iter().position(|s| s.circles > 0) {
            out = deloop(&out, h, idx, 0).expect("summand has a circle");
        }
    }
    loop {
        let pivot = out.heights().find_map(|h| {
            let d = out.differential(h)?;
            d.entries().find(|e| e.2 == &BigInt::from(1) || e.2 == &BigInt::from(-1)).map(|(r, c, _)| (h, c, r))
        });
        let Some((h, x, y)) = pivot else { break };
        out = gaussian_eliminate(&out, h, x, y).expect("circle-free unit pivot");
    }
    out
}
