//! Seeded generators for small benchmark systems: random systems with a
//! planted solution, and a toy Feistel cipher with the round structure
//! `L' = R ⊕ (S^a L & S^b L) ⊕ S^c L ⊕ k`, `R' = L`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anf::{Monomial, Polynomial, Var};
use crate::error::GenError;
use crate::io::AnfDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchKind {
    RandomPlanted {
        vars: usize,
        polys: usize,
        degree: usize,
    },
    ToyFeistel {
        width: usize,
        rounds: usize,
        pairs: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchSpec {
    pub kind: BenchKind,
    pub seed: u64,
}

/// A generated instance together with the data used to build it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub doc: AnfDocument,
    /// A satisfying assignment of every generated variable.
    pub planted: Vec<bool>,
    /// Plaintext/ciphertext pairs for Feistel instances.
    pub pairs: Vec<(u32, u32)>,
}

pub const MAX_PLANTED_VARS: usize = 32;
pub const MAX_FEISTEL_WIDTH: usize = 16;
pub const MAX_FEISTEL_ROUNDS: usize = 8;

pub fn generate(spec: &BenchSpec) -> Result<AnfDocument, GenError> {
    generate_instance(spec).map(|i| i.doc)
}

pub fn generate_instance(spec: &BenchSpec) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        BenchKind::RandomPlanted {
            vars,
            polys,
            degree,
        } => planted(vars, polys, degree, spec.seed, &mut rng),
        BenchKind::ToyFeistel {
            width,
            rounds,
            pairs,
        } => feistel(width, rounds, pairs, spec.seed, &mut rng),
    }
}

fn planted(
    n: usize,
    m: usize,
    degree: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Instance, GenError> {
    if !(1..=MAX_PLANTED_VARS).contains(&n) {
        return Err(GenError::OutOfRange(format!(
            "variables must be in 1..={MAX_PLANTED_VARS}, got {n}"
        )));
    }
    if !(1..=n).contains(&degree) {
        return Err(GenError::OutOfRange(format!(
            "degree must be in 1..={n}, got {degree}"
        )));
    }
    if m > 10_000 {
        return Err(GenError::OutOfRange(format!(
            "at most 10000 polynomials, got {m}"
        )));
    }
    let target: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut polys = Vec::with_capacity(m);
    while polys.len() < m {
        let terms = rng.gen_range(2..=5);
        let monos = (0..terms).map(|_| {
            let d = rng.gen_range(1..=degree);
            let vars = rand::seq::index::sample(rng, n, d);
            Monomial::from_vars(vars.into_iter().map(|i| Var(i as u32)))
        });
        let mut p = Polynomial::normalize(monos.collect::<Vec<_>>());
        if p.eval(&target) {
            p = p.add_constant(true);
        }
        if p.degree() >= 1 {
            polys.push(p);
        }
    }
    Ok(Instance {
        doc: AnfDocument {
            num_vars: n,
            polys,
            comments: vec![format!(
                "random-planted vars {n} polys {m} degree {degree} seed {seed}"
            )],
        },
        planted: target,
        pairs: Vec::new(),
    })
}

fn rotations(half: usize) -> [usize; 3] {
    [1 % half, (half / 2) % half, 2 % half]
}

fn rot(x: u32, by: usize, half: usize) -> u32 {
    let mask = (1u32 << half) - 1;
    let by = by % half;
    ((x << by) | (x >> ((half - by) % half))) & mask
}

/// Encrypts `pt` (left half in the high bits) with one key per round.
pub fn toy_feistel_encrypt(width: usize, round_keys: &[u32], pt: u32) -> u32 {
    let half = width / 2;
    let mask = (1u32 << half) - 1;
    let [a, b, c] = rotations(half);
    let (mut l, mut r) = (pt >> half & mask, pt & mask);
    for &k in round_keys {
        let f = (rot(l, a, half) & rot(l, b, half)) ^ rot(l, c, half);
        (l, r) = ((r ^ f ^ k) & mask, l);
    }
    l << half | r
}

fn feistel(
    width: usize,
    rounds: usize,
    pairs: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Instance, GenError> {
    if !(4..=MAX_FEISTEL_WIDTH).contains(&width) || width % 2 != 0 {
        return Err(GenError::OutOfRange(format!(
            "block width must be even and in 4..={MAX_FEISTEL_WIDTH}, got {width}"
        )));
    }
    if rounds > MAX_FEISTEL_ROUNDS {
        return Err(GenError::OutOfRange(format!(
            "at most {MAX_FEISTEL_ROUNDS} rounds, got {rounds}"
        )));
    }
    if !(1..=16).contains(&pairs) {
        return Err(GenError::OutOfRange(format!(
            "pairs must be in 1..=16, got {pairs}"
        )));
    }
    let half = width / 2;
    let mask = (1u32 << half) - 1;
    let [ra, rb, rc] = rotations(half);
    let keys: Vec<u32> = (0..rounds).map(|_| rng.gen::<u32>() & mask).collect();

    // key bit i of round r is variable r*half + i; each pair then adds one
    // variable per bit of every intermediate left half
    let key_vars = rounds * half;
    let state_per_pair = rounds.saturating_sub(1) * half;
    let num_vars = key_vars + pairs * state_per_pair;
    let mut planted = vec![false; num_vars];
    for (r, &k) in keys.iter().enumerate() {
        for i in 0..half {
            planted[r * half + i] = k >> i & 1 == 1;
        }
    }

    let bit_poly = |word: u32, i: usize| Polynomial::constant(word >> i & 1 == 1);
    let mut polys = Vec::new();
    let mut pair_list = Vec::new();
    for p in 0..pairs {
        let pt = rng.gen::<u32>() & ((1u32 << width) - 1);
        let ct = toy_feistel_encrypt(width, &keys, pt);
        pair_list.push((pt, ct));
        let base = key_vars + p * state_per_pair;

        let mut l: Vec<Polynomial> = (0..half).map(|i| bit_poly(pt >> half, i)).collect();
        let mut r: Vec<Polynomial> = (0..half).map(|i| bit_poly(pt, i)).collect();
        let (mut lw, mut rw) = (pt >> half & mask, pt & mask);
        for round in 0..rounds {
            let last = round + 1 == rounds;
            let fw = (rot(lw, ra, half) & rot(lw, rb, half)) ^ rot(lw, rc, half);
            let new_w = (rw ^ fw ^ keys[round]) & mask;
            // bit i of S^j l is bit (i - j) mod half of l
            let src = |j: usize, i: usize| (i + half - j % half) % half;
            let mut next = Vec::with_capacity(half);
            for i in 0..half {
                let f = l[src(ra, i)].mul(&l[src(rb, i)]).add(&l[src(rc, i)]);
                let rhs = r[i]
                    .add(&f)
                    .add(&Polynomial::var(Var((round * half + i) as u32)));
                let out = if last {
                    bit_poly(ct >> half, i)
                } else {
                    let v = Var((base + round * half + i) as u32);
                    planted[v.index()] = new_w >> i & 1 == 1;
                    Polynomial::var(v)
                };
                let eq = rhs.add(&out);
                if !eq.is_zero() {
                    polys.push(eq);
                }
                next.push(out);
            }
            r = std::mem::replace(&mut l, next);
            (lw, rw) = (new_w, lw);
        }
        // the right half of the ciphertext is the last round's input left half
        for (i, bit) in r.iter().enumerate() {
            let eq = bit.add(&bit_poly(ct, i));
            if !eq.is_zero() {
                polys.push(eq);
            }
        }
    }
    let doc = AnfDocument {
        num_vars,
        polys,
        comments: std::iter::once(format!(
            "toy-feistel width {width} rounds {rounds} pairs {pairs} seed {seed}"
        ))
        .chain(
            pair_list
                .iter()
                .map(|(p, c)| format!("pair {p:0w$x} {c:0w$x}", w = width.div_ceil(4))),
        )
        .collect(),
    };
    Ok(Instance {
        doc,
        planted,
        pairs: pair_list,
    })
}

/// Round keys read from an assignment of the key variables.
pub fn feistel_keys(width: usize, rounds: usize, assignment: &[bool]) -> Vec<u32> {
    let half = width / 2;
    (0..rounds)
        .map(|r| (0..half).fold(0u32, |k, i| k | (assignment[r * half + i] as u32) << i))
        .collect()
}
