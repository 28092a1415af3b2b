//! Seeded random inputs: paravectors, imaginary units, and commuting operator
//! tuples with a known block structure.
//!
//! Tuples are built as `T_j = S D_j S^{-1}` where every `D_j` is block
//! diagonal with a shared block pattern. A 1×1 block contributes the real
//! values `(a_0, a_1, ..., a_n)`, whose spectral sphere is `(a_0, |a_|)`. A
//! 2×2 block `[[a, -b], [b, a]]` per component models a complex eigenpair.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{embed_in_plane, Algebra, ImaginaryUnit, Multivector, Paravector, SpectralSphere};
use crate::error::Result;
use crate::operator::OperatorTuple;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_paravector<R: Rng>(alg: Algebra, rng: &mut R, scale: f64) -> Paravector {
    let parts = (0..=alg.units()).map(|_| rng.random_range(-scale..=scale)).collect();
    Paravector::new(alg, parts).expect("length matches")
}

pub fn random_multivector<R: Rng>(alg: Algebra, rng: &mut R, scale: f64) -> Multivector {
    let coeffs = (0..alg.dim()).map(|_| rng.random_range(-scale..=scale)).collect();
    Multivector::from_coeffs(alg, coeffs).expect("length matches")
}

/// Uniformly distributed unit 1-vector.
pub fn random_unit<R: Rng>(alg: Algebra, rng: &mut R) -> ImaginaryUnit {
    loop {
        let comps: Vec<f64> = (0..alg.units()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let r2: f64 = comps.iter().map(|c| c * c).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            return ImaginaryUnit::normalized(alg, comps).expect("nonzero");
        }
    }
}

/// Uniform point of the ball of radius `radius` in `R^{n+1}`.
pub fn random_in_ball<R: Rng>(alg: Algebra, rng: &mut R, radius: f64) -> Paravector {
    loop {
        let p = random_paravector(alg, rng, radius);
        if p.norm() <= radius {
            return p;
        }
    }
}

/// Random point of the ball of radius `2 max(bound, 1)` at distance at least
/// `tube` from every sphere.
pub fn random_resolvent_point<R: Rng>(
    alg: Algebra,
    rng: &mut R,
    spheres: &[SpectralSphere],
    bound: f64,
    tube: f64,
) -> Paravector {
    let radius = 2.0 * bound.max(1.0);
    loop {
        let p = random_in_ball(alg, rng, radius);
        if spheres.iter().all(|s| s.distance_to(&p) > tube) {
            return p;
        }
    }
}

/// A point of a known sphere, in a random plane.
pub fn random_point_on<R: Rng>(alg: Algebra, rng: &mut R, sphere: &SpectralSphere) -> Paravector {
    embed_in_plane(sphere.center, sphere.radius, &random_unit(alg, rng))
}

/// One diagonal block shared by all components.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// Values `(a_0, ..., a_n)`, one per component.
    Real(Vec<f64>),
    /// Pairs `(a_j, b_j)` giving `[[a_j, -b_j], [b_j, a_j]]` in component `j`.
    Complex(Vec<(f64, f64)>),
}

impl Block {
    fn size(&self) -> usize {
        match self {
            Block::Real(_) => 1,
            Block::Complex(_) => 2,
        }
    }

    /// Sphere of a real block, known in closed form.
    pub fn sphere(&self) -> Option<SpectralSphere> {
        match self {
            Block::Real(v) => Some(SpectralSphere::new(v[0], v[1..].iter().map(|x| x * x).sum::<f64>().sqrt())),
            Block::Complex(_) => None,
        }
    }
}

/// `I + 0.3 R / sqrt(d)` with `R` uniform in `[-1, 1]`, redrawn until its
/// condition number is below 10.
pub fn random_conditioner<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let r = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..=1.0));
        let s = DMatrix::identity(d, d) + r * (0.3 / (d as f64).sqrt());
        let sv = s.singular_values();
        if sv.max() / sv.min() < 10.0 {
            return s;
        }
    }
}

/// Assembles `S diag(blocks) S^{-1}` for each component.
pub fn tuple_from_blocks(alg: Algebra, blocks: &[Block], conditioner: Option<&DMatrix<f64>>) -> Result<OperatorTuple> {
    let d: usize = blocks.iter().map(Block::size).sum();
    let ncomp = alg.units() + 1;
    let mut comps = vec![DMatrix::zeros(d, d); ncomp];
    let mut at = 0;
    for b in blocks {
        match b {
            Block::Real(v) => {
                for (j, c) in comps.iter_mut().enumerate() {
                    c[(at, at)] = v[j];
                }
            }
            Block::Complex(v) => {
                for (j, c) in comps.iter_mut().enumerate() {
                    let (a, bb) = v[j];
                    c[(at, at)] = a;
                    c[(at, at + 1)] = -bb;
                    c[(at + 1, at)] = bb;
                    c[(at + 1, at + 1)] = a;
                }
            }
        }
        at += b.size();
    }
    if let Some(s) = conditioner {
        let inv = s.clone().try_inverse().expect("conditioner is well conditioned");
        for c in &mut comps {
            *c = s * &*c * &inv;
        }
    }
    OperatorTuple::new(alg, comps)
}

/// A generic commuting tuple of size `d`: real blocks with `T_0` values in
/// `[-1.5, 1.5]` and vector parts in `[-1, 1]`, plus one complex block when
/// `d ≥ 3`.
pub fn random_commuting_tuple<R: Rng>(alg: Algebra, d: usize, rng: &mut R) -> OperatorTuple {
    let ncomp = alg.units() + 1;
    let mut blocks = Vec::new();
    let mut left = d;
    if d >= 3 {
        blocks.push(Block::Complex(
            (0..ncomp)
                .map(|j| {
                    let a = if j == 0 { rng.random_range(-1.5..=1.5) } else { rng.random_range(-0.7..=0.7) };
                    (a, rng.random_range(-0.7..=0.7))
                })
                .collect(),
        ));
        left -= 2;
    }
    for _ in 0..left {
        blocks.push(Block::Real(
            (0..ncomp)
                .map(|j| if j == 0 { rng.random_range(-1.5..=1.5) } else { rng.random_range(-1.0..=1.0) })
                .collect(),
        ));
    }
    let s = random_conditioner(d, rng);
    tuple_from_blocks(alg, &blocks, Some(&s)).expect("block construction commutes")
}

/// Tuple whose spectrum splits into a group near -2 and a group near +2,
/// each group within distance 0.6 of its center. Returns the tuple and the
/// blocks it was built from (`d/2` blocks per group, first group first).
pub fn split_spectrum_tuple<R: Rng>(alg: Algebra, d: usize, rng: &mut R) -> (OperatorTuple, Vec<Block>) {
    assert!(d >= 2 && d % 2 == 0, "split fixtures need an even size");
    let ncomp = alg.units() + 1;
    let per_comp = 0.3 / (alg.units() as f64).sqrt();
    let mut blocks = Vec::new();
    for center in [-2.0, 2.0] {
        for _ in 0..d / 2 {
            blocks.push(Block::Real(
                (0..ncomp)
                    .map(|j| {
                        if j == 0 {
                            center + rng.random_range(-0.3..=0.3)
                        } else {
                            rng.random_range(-per_comp..=per_comp)
                        }
                    })
                    .collect(),
            ));
        }
    }
    let s = random_conditioner(d, rng);
    let t = tuple_from_blocks(alg, &blocks, Some(&s)).expect("block construction commutes");
    (t, blocks)
}

/// The five split-spectrum fixtures used for projector checks (`d` in
/// {2, 4, 6}).
pub fn split_fixture_family(alg: Algebra, seed: u64) -> Vec<OperatorTuple> {
    let mut rng = seeded(seed);
    [2, 4, 6, 4, 2]
        .iter()
        .map(|&d| split_spectrum_tuple(alg, d, &mut rng).0)
        .collect()
}
